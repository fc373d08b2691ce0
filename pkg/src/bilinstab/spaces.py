"""State spaces: norms, pairings and duality-map selections.

Five concrete structures are supported:

``FiniteDim``
    Euclidean R^n.
``SpectralL2``
    L^2(0, 1) expanded in the Dirichlet eigenbasis phi_j = sqrt(2) sin(j pi x);
    coefficients are taken with respect to an orthonormal basis, so the norm
    is the Euclidean norm of the coefficient vector.
``EnergyWave``
    H_0^1 x L^2 in modal form. Coefficients are interleaved pairs
    ``(alpha_j, beta_j)`` with displacement ``sum alpha_j phi_j`` and velocity
    ``sum sqrt(lambda_j) beta_j phi_j``; the energy norm is
    ``sum lambda_j (alpha_j^2 + beta_j^2)``.
``GridL1`` / ``GridL2``
    Piecewise-constant cell values, midpoint quadrature.
``GridSup``
    Nodal values with the max norm.

Hilbert spaces identify their duality map with the identity. In L^1 the
selection is ``||v|| sign(v)`` with ``sign(0) = 0``; in the sup-norm space it
is the point mass at the smallest index attaining ``max |v|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import StructureError, ValidationError


def dirichlet_eigenvalues(n_modes: int) -> np.ndarray:
    """Eigenvalues ``(j pi)^2``, j = 1..n_modes, of -d^2/dx^2 on (0, 1)."""
    j = np.arange(1, n_modes + 1, dtype=float)
    return (j * np.pi) ** 2


def _check_eigenvalues(eigenvalues) -> np.ndarray:
    lam = np.array(eigenvalues, dtype=float, copy=True)
    if lam.ndim != 1 or lam.size < 1:
        raise ValidationError("eigenvalues", "need at least one mode")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise ValidationError("eigenvalues", "must be finite and positive")
    if lam.size > 1 and np.any(np.diff(lam) <= 0):
        raise ValidationError("eigenvalues", "must be strictly increasing")
    lam.setflags(write=False)
    return lam


@dataclass(frozen=True, eq=False)
class Space:
    """Common interface; concrete variants below."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    hilbert = True

    def norm(self, v: np.ndarray) -> float:
        raise NotImplementedError

    def inner(self, v: np.ndarray, w: np.ndarray) -> float:
        raise StructureError(f"{type(self).__name__} has no inner product")

    def weights(self) -> np.ndarray:
        """Diagonal Gram weights (Hilbert spaces only)."""
        raise StructureError(f"{type(self).__name__} has no inner product")


@dataclass(frozen=True, eq=False)
class FiniteDim(Space):
    n: int

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValidationError("n", "dimension must be >= 1")

    @property
    def dim(self) -> int:
        return int(self.n)

    def norm(self, v):
        return float(np.sqrt(np.dot(v, v)))

    def inner(self, v, w):
        return float(np.dot(v, w))

    def weights(self):
        return np.ones(self.dim)


@dataclass(frozen=True, eq=False)
class SpectralL2(Space):
    eigenvalues: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _check_eigenvalues(self.eigenvalues))

    @classmethod
    def dirichlet(cls, n_modes: int) -> "SpectralL2":
        if n_modes < 1:
            raise ValidationError("n_modes", "must be >= 1")
        return cls(dirichlet_eigenvalues(n_modes))

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.size

    @property
    def dim(self) -> int:
        return self.n_modes

    def norm(self, v):
        return float(np.sqrt(np.dot(v, v)))

    def inner(self, v, w):
        return float(np.dot(v, w))

    def weights(self):
        return np.ones(self.dim)


@dataclass(frozen=True, eq=False)
class EnergyWave(Space):
    eigenvalues: np.ndarray

    def __post_init__(self):
        lam = _check_eigenvalues(self.eigenvalues)
        object.__setattr__(self, "eigenvalues", lam)
        w = np.repeat(lam, 2)
        w.setflags(write=False)
        object.__setattr__(self, "_gram", w)

    @classmethod
    def dirichlet(cls, n_modes: int) -> "EnergyWave":
        if n_modes < 1:
            raise ValidationError("n_modes", "must be >= 1")
        return cls(dirichlet_eigenvalues(n_modes))

    @property
    def n_modes(self) -> int:
        return self.eigenvalues.size

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def norm(self, v):
        return float(np.sqrt(np.dot(self._gram * v, v)))

    def inner(self, v, w):
        return float(np.dot(self._gram * v, w))

    def weights(self):
        return self._gram


@dataclass(frozen=True, eq=False)
class _Grid(Space):
    n: int
    dx: float

    def __post_init__(self):
        if int(self.n) < 1:
            raise ValidationError("n", "must be >= 1")
        if not (np.isfinite(self.dx) and self.dx > 0):
            raise ValidationError("dx", "must be positive")

    @property
    def dim(self) -> int:
        return int(self.n)

    @property
    def length(self) -> float:
        return self.n * self.dx

    def cell_midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dx


@dataclass(frozen=True, eq=False)
class GridL1(_Grid):
    hilbert = False

    def norm(self, v):
        return float(np.sum(np.abs(v)) * self.dx)


@dataclass(frozen=True, eq=False)
class GridL2(_Grid):
    def norm(self, v):
        return float(np.sqrt(np.dot(v, v) * self.dx))

    def inner(self, v, w):
        return float(np.dot(v, w) * self.dx)

    def weights(self):
        return np.full(self.dim, self.dx)


@dataclass(frozen=True, eq=False)
class GridSup(_Grid):
    """Nodal grid ``x_i = i * dx``, i = 0..n-1."""

    hilbert = False

    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * self.dx

    def norm(self, v):
        return float(np.max(np.abs(v))) if len(v) else 0.0


# --------------------------------------------------------------------------
# state vectors and dual elements


@dataclass(frozen=True, eq=False)
class StateVector:
    """Coefficient array bound to a space. Immutable."""

    space: Space
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float, copy=True).reshape(-1)
        if c.size != self.space.dim:
            raise StructureError(
                f"coefficient length {c.size} does not match space dimension "
                f"{self.space.dim}"
            )
        if not np.all(np.isfinite(c)):
            raise ValidationError("coeffs", "entries must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __len__(self):
        return self.coeffs.size

    def with_coeffs(self, coeffs) -> "StateVector":
        return StateVector(self.space, coeffs)

    @classmethod
    def zeros(cls, space: Space) -> "StateVector":
        return cls(space, np.zeros(space.dim))


@dataclass(frozen=True, eq=False)
class SameSpace:
    """Hilbert-space dual element (Riesz representative)."""

    coeffs: np.ndarray


@dataclass(frozen=True, eq=False)
class BoundedFn:
    """L^infinity function on the L^1 grid (cell values)."""

    values: np.ndarray


@dataclass(frozen=True)
class PointMass:
    """Weighted Dirac measure at a node of the sup-norm grid."""

    index: int
    weight: float


DualityElement = Union[SameSpace, BoundedFn, PointMass]


def _coeffs(space: Space, v) -> np.ndarray:
    if isinstance(v, StateVector):
        if v.space is not space and v.space.dim != space.dim:
            raise StructureError("state vector belongs to a different space")
        return v.coeffs
    arr = np.asarray(v, dtype=float).reshape(-1)
    if arr.size != space.dim:
        raise StructureError(
            f"array length {arr.size} does not match space dimension {space.dim}"
        )
    return arr


def norm(space: Space, v) -> float:
    """Norm of ``v`` in ``space``."""
    return space.norm(_coeffs(space, v))


def pairing(space: Space, v, w) -> float:
    """Duality pairing <v, w> with w a dual element or (Hilbert) a state."""
    x = _coeffs(space, v)
    if isinstance(w, PointMass):
        if not isinstance(space, GridSup):
            raise StructureError("point masses pair only with the sup-norm grid")
        if not 0 <= w.index < space.dim:
            raise StructureError(f"point mass index {w.index} out of range")
        return float(x[w.index] * w.weight)
    if isinstance(w, BoundedFn):
        if not isinstance(space, GridL1):
            raise StructureError("bounded functions pair only with the L1 grid")
        f = np.asarray(w.values, dtype=float)
        if f.size != space.dim:
            raise StructureError("dual element has wrong length")
        return float(np.dot(x, f) * space.dx)
    if not space.hilbert:
        raise StructureError(
            f"{type(space).__name__} requires an explicit dual element"
        )
    y = w.coeffs if isinstance(w, SameSpace) else _coeffs(space, w)
    if np.size(y) != space.dim:
        raise StructureError("dual element has wrong length")
    return space.inner(x, np.asarray(y, dtype=float))


def duality_select(space: Space, v) -> DualityElement:
    """Deterministic element of the duality map J(v)."""
    x = _coeffs(space, v)
    if isinstance(space, GridL1):
        return BoundedFn(space.norm(x) * np.sign(x))
    if isinstance(space, GridSup):
        i0 = int(np.argmax(np.abs(x)))  # argmax returns the first maximiser
        return PointMass(i0, float(x[i0]))
    return SameSpace(np.array(x, copy=True))


def dual_norm(space: Space, element: DualityElement) -> float:
    if isinstance(element, PointMass):
        return abs(element.weight)
    if isinstance(element, BoundedFn):
        vals = np.asarray(element.values)
        return float(np.max(np.abs(vals))) if vals.size else 0.0
    return space.norm(np.asarray(element.coeffs, dtype=float))
