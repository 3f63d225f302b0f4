"""
Bounding polytropes of a small sample
=====================================

A three-node network with edges 0->1, 0->2 and 1->2.  In the min-plus
picture every observation is a point ``x`` with ``x_i - x_j <= c_ij`` for
each edge ``j -> i``; the smallest such region containing a sample is
computed from coordinate differences alone.
"""

import numpy as np

from tropmlbn import (Dag, cell_of_point, dual_subdivision, kleene_star, min_bounding_matrix,
                      pseudovertices, restrict_to_dag)

inf = np.inf
C = np.array([[0, inf, inf],
              [1, 0, inf],
              [2, 3, 0]], dtype=float)
G = Dag(3, {(0, 1): 1.0, (0, 2): 2.0, (1, 2): 3.0})

# the direct edge 0 -> 2 (weight 2) beats the path through 1 (1 + 3)
print("C* == C:", np.array_equal(kleene_star(C), C))

# the region has two vertices; each is tight on a spanning tree of constraints
for point, cell in pseudovertices(C):
    print("vertex", point, "tight edges", sorted(cell))

# two points, one on each maximal cell, recover every weight
S = np.array([[0.0, -1.0, 2.0], [0.0, 1.0, 1.0]])
print("bounding matrix:\n", min_bounding_matrix(S))
print("restricted to G:\n", restrict_to_dag(min_bounding_matrix(S), G))
print("cells of the sample:", [sorted(cell_of_point(C, p)) for p in S])

# a point strictly inside touches no facet and carries no information
print("interior point cell:", cell_of_point(C, [0.0, 0.0, 1.0]))

sigma = dual_subdivision(C)
print("universe", sorted(sigma.universe), "cells", sigma.sorted_cells)
