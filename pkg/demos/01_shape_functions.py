"""
Shape functions on one element
==============================

Each element [a, b] carries ten local forms. Flux flows are piecewise
constant, charge flows are affine densities, voltages are affine or hat
functions and currents are quadratics. The midpoint m is what makes room
for both an exact power pairing and a matched energy.
"""

import numpy as np

from phnet1d import Element, ShapeKind, build_shape_set, normalization_report

el = Element(2.0, 4.0)
shapes = build_shape_set(el)
z = np.linspace(el.a, el.b, 9)

# values on a coarse grid, one row per function
for kind in ShapeKind:
    print(f"{kind.name:5s}", np.round(shapes(kind, z), 4))

# every normalization condition at once
report = normalization_report(shapes)
print("largest normalization residual:", report.max_residual)

# the two charge densities always add up to 2/h
print("q_am + q_mb =", shapes(ShapeKind.Q_AM, z) + shapes(ShapeKind.Q_MB, z))
