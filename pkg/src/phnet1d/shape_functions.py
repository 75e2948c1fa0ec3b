"""Shape functions on a single element.

Ten functions live on every element ``[a, b]`` with midpoint ``m``:

* ``P_ONEFORM`` ``am``/``mb``: piecewise constant one-forms (flux flows),
* ``Q_ZEROFORM`` ``a``/``m``/``b``: affine zero-forms (voltage-type efforts),
* ``Q_ONEFORM`` ``am``/``mb``: affine one-forms (charge flows),
* ``P_ZEROFORM`` ``a``/``m``/``b``: quadratic zero-forms (current-type efforts).

One-forms are stored as densities with respect to ``dz``. Every function is
kept as a pair of polynomial pieces, one per half-interval, written in the
local coordinate ``t = (z - a) / h`` so that the coefficients do not depend
on where the element sits or how wide it is.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .mesh import Element

__all__ = ["Family", "ShapeKind", "ShapeSet", "build_shape_set", "evaluate",
           "integrate", "normalization_report", "NormalizationReport"]


class Family(enum.Enum):
    P_ONEFORM = "p-oneform"
    Q_ZEROFORM = "q-zeroform"
    Q_ONEFORM = "q-oneform"
    P_ZEROFORM = "p-zeroform"

    @property
    def is_oneform(self) -> bool:
        return self in (Family.P_ONEFORM, Family.Q_ONEFORM)


class ShapeKind(enum.Enum):
    """One of the ten shape functions, as ``(family, index)``."""

    P_AM = (Family.P_ONEFORM, "am")
    P_MB = (Family.P_ONEFORM, "mb")
    QZ_A = (Family.Q_ZEROFORM, "a")
    QZ_M = (Family.Q_ZEROFORM, "m")
    QZ_B = (Family.Q_ZEROFORM, "b")
    Q_AM = (Family.Q_ONEFORM, "am")
    Q_MB = (Family.Q_ONEFORM, "mb")
    PZ_A = (Family.P_ZEROFORM, "a")
    PZ_M = (Family.P_ZEROFORM, "m")
    PZ_B = (Family.P_ZEROFORM, "b")

    @property
    def family(self) -> Family:
        return self.value[0]

    @property
    def index(self) -> str:
        return self.value[1]


P_ONEFORMS = (ShapeKind.P_AM, ShapeKind.P_MB)
Q_ONEFORMS = (ShapeKind.Q_AM, ShapeKind.Q_MB)
P_ZEROFORMS = (ShapeKind.PZ_A, ShapeKind.PZ_M, ShapeKind.PZ_B)
Q_ZEROFORMS = (ShapeKind.QZ_A, ShapeKind.QZ_M, ShapeKind.QZ_B)

# Coefficients in t = (z - a)/h, lowest order first, as (left piece, right
# piece). One-form entries are multiplied by 1/h when instantiated.
_LOCAL_COEFFS = {
    ShapeKind.P_AM: ([2.0], [0.0]),
    ShapeKind.P_MB: ([0.0], [2.0]),
    ShapeKind.QZ_A: ([1.0, -1.0], [1.0, -1.0]),
    ShapeKind.QZ_B: ([0.0, 1.0], [0.0, 1.0]),
    # hat function; the right branch is 2(b - z)/h
    ShapeKind.QZ_M: ([0.0, 2.0], [2.0, -2.0]),
    ShapeKind.Q_AM: ([3.0, -4.0], [3.0, -4.0]),
    ShapeKind.Q_MB: ([-1.0, 4.0], [-1.0, 4.0]),
    # (z - b)^2/h^2, (z - a)^2/h^2 and -4(z - a)(z - b)/h^2
    ShapeKind.PZ_A: ([1.0, -2.0, 1.0], [1.0, -2.0, 1.0]),
    ShapeKind.PZ_B: ([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]),
    ShapeKind.PZ_M: ([0.0, 4.0, -4.0], [0.0, 4.0, -4.0]),
}


@dataclass(frozen=True)
class ShapeSet:
    """All ten shape functions instantiated on one element.

    ``pieces[kind]`` is a ``(left, right)`` pair of polynomials in ``z``
    valid on ``[a, m]`` and ``[m, b]`` respectively.
    """

    element: Element
    pieces: dict

    def piece(self, kind: ShapeKind, half: str) -> Polynomial:
        left, right = self.pieces[kind]
        if half == "am":
            return left
        if half == "mb":
            return right
        raise ValueError(f"half must be 'am' or 'mb', got {half!r}")

    def __call__(self, kind: ShapeKind, z):
        return evaluate(self, kind, z)


def build_shape_set(element: Element) -> ShapeSet:
    """Instantiate the ten shape functions on `element`."""
    domain = [element.a, element.b]
    pieces = {}
    for kind, (left, right) in _LOCAL_COEFFS.items():
        scale = 1.0 / element.h if kind.family.is_oneform else 1.0
        pieces[kind] = tuple(
            Polynomial(np.asarray(c) * scale, domain=domain, window=[0.0, 1.0])
            for c in (left, right))
    return ShapeSet(element, pieces)


def evaluate(shape_set: ShapeSet, kind: ShapeKind, z):
    """Value (zero-form) or density (one-form) of `kind` at `z`.

    At ``z == m`` the left piece is used.

    Raises
    ------
    ValueError
        If any `z` lies outside ``[a, b]``.
    """
    el = shape_set.element
    z_arr = np.asarray(z, dtype=float)
    if np.any(z_arr < el.a) or np.any(z_arr > el.b):
        raise ValueError(f"z outside the element [{el.a}, {el.b}]")
    left, right = shape_set.pieces[kind]
    out = np.where(z_arr <= el.m, left(z_arr), right(z_arr))
    return float(out) if out.ndim == 0 else out


def integrate(poly: Polynomial, lo: float, hi: float) -> float:
    """Exact definite integral of a polynomial piece over ``[lo, hi]``."""
    anti = poly.integ()
    return float(anti(hi) - anti(lo))


def half_bounds(element: Element, half: str) -> tuple[float, float]:
    if half == "am":
        return element.a, element.m
    if half == "mb":
        return element.m, element.b
    raise ValueError(f"half must be 'am' or 'mb', got {half!r}")


@dataclass(frozen=True)
class NormalizationReport:
    """Residuals of every normalization condition, keyed by a short label."""

    residuals: dict

    @property
    def max_residual(self) -> float:
        return max(abs(r) for r in self.residuals.values())


def normalization_report(shape_set: ShapeSet) -> NormalizationReport:
    """Check the one-form integral and zero-form nodal normalizations.

    One-forms must integrate to 1 over their own half-interval and to 0 over
    the other one. Zero-forms must take the value 1 at their own node and 0
    at the other nodes (the midpoint function is only required to vanish at
    the endpoints and equal 1 at ``m``; the endpoint functions are only
    constrained at ``a`` and ``b``). ``P_ZEROFORM`` ``a``/``b`` must also
    equal 1/4 at the midpoint.
    """
    el = shape_set.element
    res = {}
    for kinds in (P_ONEFORMS, Q_ONEFORMS):
        for kind in kinds:
            for half in ("am", "mb"):
                lo, hi = half_bounds(el, half)
                target = 1.0 if half == kind.index else 0.0
                val = integrate(shape_set.piece(kind, half), lo, hi)
                res[f"int_{half} {kind.name}"] = val - target

    nodes = {"a": el.a, "m": el.m, "b": el.b}
    for kinds in (P_ZEROFORMS, Q_ZEROFORMS):
        for kind in kinds:
            checked = ("a", "m", "b") if kind.index == "m" else ("a", "b")
            for node in checked:
                target = 1.0 if node == kind.index else 0.0
                val = evaluate(shape_set, kind, nodes[node])
                res[f"{kind.name}({node})"] = val - target
            if kind.index == "m":
                # both pieces must agree at m
                left, right = shape_set.pieces[kind]
                res[f"{kind.name} continuity"] = float(left(el.m) - right(el.m))

    for kind in (ShapeKind.PZ_A, ShapeKind.PZ_B):
        res[f"{kind.name}(m) - 1/4"] = evaluate(shape_set, kind, el.m) - 0.25
    return NormalizationReport(res)
