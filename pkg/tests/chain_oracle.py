"""Brute-force solution of an element chain, written from nodal continuity.

Unknowns are the nodal effort values of every element. The equations are:
effort matching on each element, e^q = u1 at the left end, e^p = u2 at the
right end, and continuity of e^p and e^q at shared points. No elimination
tricks: one dense solve per query.
"""

import numpy as np

from phnet1d.element_matrices import build_dirac_pair, compute_matrices


def solve_chain(mesh, sigma, g, u):
    pairs = [build_dirac_pair(compute_matrices(el, sigma)) for el in mesh]
    n = len(pairs)
    G = np.zeros((6 * n, 6 * n))
    rhs = np.zeros(6 * n)
    row = 0
    for i, p in enumerate(pairs):
        G[row:row + 4, 6 * i:6 * i + 6] = p.M_e
        rhs[row:row + 4] = g[4 * i:4 * i + 4]
        row += 4
    G[row, 3] = 1.0                      # e^q(z_start) = u1
    rhs[row] = u[0]
    G[row + 1, 6 * (n - 1) + 2] = 1.0    # e^p(z_end) = u2
    rhs[row + 1] = u[1]
    row += 2
    for i in range(n - 1):
        G[row, 6 * i + 2], G[row, 6 * i + 6] = 1.0, -1.0      # e^p
        G[row + 1, 6 * i + 5], G[row + 1, 6 * i + 9] = 1.0, -1.0  # e^q
        row += 2
    w = np.linalg.solve(G, rhs).reshape(n, 6)
    xdot = np.concatenate([-p.M_f @ v for p, v in zip(pairs, w)])
    y = np.array([w[0, 0], -w[-1, 5]])   # current at the left end, minus voltage at the right
    return xdot, y, w, pairs
