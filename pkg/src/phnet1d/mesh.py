"""One-dimensional domains and their partitions into elements."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

__all__ = ["Domain", "Element", "Mesh", "build_uniform_mesh", "build_mesh",
           "element_of"]

# relative to the domain length
MIN_WIDTH_FRACTION = 1e-12


@dataclass(frozen=True)
class Domain:
    """Closed interval ``[z_start, z_end]``."""

    z_start: float
    z_end: float

    def __post_init__(self):
        if not (np.isfinite(self.z_start) and np.isfinite(self.z_end)):
            raise ValueError("domain endpoints must be finite")
        if not self.z_start < self.z_end:
            raise ValueError(
                f"degenerate domain [{self.z_start}, {self.z_end}]")

    @property
    def length(self) -> float:
        return self.z_end - self.z_start


@dataclass(frozen=True)
class Element:
    """Mesh cell ``[a, b]`` with its interior midpoint ``m``."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise ValueError("element endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"element requires a < b, got [{self.a}, {self.b}]")

    @property
    def m(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def h(self) -> float:
        return self.b - self.a


@dataclass(frozen=True)
class Mesh:
    """Ordered partition of a domain.

    Attributes
    ----------
    domain : Domain
    breakpoints : tuple of float
        ``N + 1`` strictly increasing coordinates, starting at
        ``domain.z_start`` and ending at ``domain.z_end``.
    """

    domain: Domain
    breakpoints: tuple

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        if bp.ndim != 1 or bp.size < 2:
            raise ValueError("a mesh needs at least two breakpoints")
        if not np.all(np.isfinite(bp)):
            raise ValueError("breakpoints must be finite")
        if bp[0] != self.domain.z_start or bp[-1] != self.domain.z_end:
            raise ValueError(
                f"breakpoints must start at {self.domain.z_start} and end at "
                f"{self.domain.z_end}, got {bp[0]} and {bp[-1]}")
        widths = np.diff(bp)
        if np.any(widths <= 0):
            raise ValueError("breakpoints must be strictly increasing "
                             "(unsorted or duplicate entries)")
        min_width = MIN_WIDTH_FRACTION * self.domain.length
        if np.any(widths < min_width):
            raise ValueError(
                f"element narrower than {min_width:g} "
                f"({MIN_WIDTH_FRACTION:g} of the domain length)")
        object.__setattr__(self, "breakpoints", tuple(float(z) for z in bp))

    @property
    def n_elements(self) -> int:
        return len(self.breakpoints) - 1

    @property
    def widths(self) -> np.ndarray:
        return np.diff(np.asarray(self.breakpoints))

    @property
    def left(self) -> np.ndarray:
        return np.asarray(self.breakpoints[:-1])

    @property
    def right(self) -> np.ndarray:
        return np.asarray(self.breakpoints[1:])

    def __len__(self) -> int:
        return self.n_elements

    def __iter__(self) -> Iterator[Element]:
        for a, b in zip(self.breakpoints[:-1], self.breakpoints[1:]):
            yield Element(a, b)


def build_uniform_mesh(domain: Domain, n: int) -> Mesh:
    """Partition `domain` into `n` elements of equal width."""
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"number of elements must be a positive integer, got {n!r}")
    n = int(n)
    bp = np.linspace(domain.z_start, domain.z_end, n + 1)
    # linspace already pins both ends; keep them bit-exact anyway
    bp[0], bp[-1] = domain.z_start, domain.z_end
    return Mesh(domain, tuple(bp))


def build_mesh(domain: Domain, breakpoints: Sequence[float]) -> Mesh:
    """Mesh with explicit (possibly nonuniform) breakpoints."""
    return Mesh(domain, tuple(float(z) for z in breakpoints))


def element_of(mesh: Mesh, i: int) -> Element:
    """Return element `i` of `mesh`, counted from 1 as ``1 <= i <= N``."""
    if isinstance(i, bool) or int(i) != i or not 1 <= i <= mesh.n_elements:
        raise IndexError(
            f"element index {i!r} out of range 1..{mesh.n_elements}")
    i = int(i)
    return Element(mesh.breakpoints[i - 1], mesh.breakpoints[i])
