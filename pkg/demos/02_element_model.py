"""
From element matrices to a port-Hamiltonian element
===================================================

The six element matrices fix a Dirac structure in image form. Solving it
for the storage flows and port outputs gives a 4th order state-space
model which is skew in the lossless case and passive with dissipation.
"""

import numpy as np

from phnet1d import (Element, build_dirac_pair, compute_matrices,
                     element_state_space)

el = Element(0.0, 0.5)
mx = compute_matrices(el, sigma=0.0)
with np.printoptions(precision=4, suppress=True):
    for name in ("M2", "M3", "M4", "M5", "M6"):
        print(name, "=\n", getattr(mx, name))

pair = build_dirac_pair(mx)
print("max |F E^T + E F^T| =", pair.dirac_defect)
print("rank [F | E] =", pair.kernel_rank)

model = element_state_space(pair)
print("lossless: max |R| =", np.abs(model.R).max())

# a resistive element is no longer skew but stays passive
lossy = element_state_space(build_dirac_pair(compute_matrices(el, sigma=0.5)))
print("sigma = 0.5: eigenvalues of R =", np.round(np.linalg.eigvalsh(lossy.R), 6))

# power balance for an arbitrary effort and port flow
rng = np.random.default_rng(0)
es, fe = rng.normal(size=4), rng.normal(size=2)
fs = -model.A @ es - model.B @ fe
ee = model.C @ es + model.D @ fe
print("e^s.f^s + e^e.f^e =", es @ fs + ee @ fe)
