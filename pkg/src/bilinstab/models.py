"""Catalog of bilinear systems x' = A x + u B x.

Each model couples a :mod:`bilinstab.spaces` structure with the exact (or
spectrally exact) semigroup generated by ``A`` and the action of the control
operator ``B``. Model specs are plain records; :func:`build_model` validates
them and returns an immutable :class:`Model`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.linalg import expm

from . import spaces
from .errors import DomainError, StructureError, ValidationError
from .spaces import StateVector

# --------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class HeatDirichletSpectral:
    """Dirichlet heat equation on (0, 1); B is Id or a modal multiplier."""

    n_modes: int = 16
    multiplier: Optional[Sequence[float]] = None


@dataclass(frozen=True)
class WaveUndamped:
    """z_tt = z_xx + v z on (0, 1); B (y, w) = (0, y)."""

    n_modes: int = 16


@dataclass(frozen=True)
class WaveDamped:
    """z_tt = z_xx + v z_t on (0, 1); B (y, w) = (0, w)."""

    n_modes: int = 16


@dataclass(frozen=True)
class TransportL1:
    """y_t = -y_x + u 1_(alpha, inf) y in L^1(0, x_max), zero inflow."""

    n: int = 1000
    dx: float = 0.01
    alpha_cut: float = 0.5


@dataclass(frozen=True)
class HeatNeumannSup:
    """Neumann heat equation x_t = x_zz + u a(z) x with the sup norm.

    ``a`` is a callable evaluated at the nodes, an array of nodal values, or
    None for the default profile ``1 + z (1 - z)``. ``k`` is the lower bound
    used by the surrogate pairing operator ``k Id`` (defaults to ``min a``).
    """

    n: int = 51
    a: Union[None, Callable, Sequence[float]] = None
    k: Optional[float] = None


@dataclass(frozen=True)
class TransportL2FTS:
    """Right shift on L^2(0, x_max) with B = indicator of (a_cut, inf)."""

    n: int = 1000
    dx: float = 0.01
    a_cut: float = 1.0


@dataclass(frozen=True)
class HeatSpectralProjection:
    """Dirichlet heat with B y = sum_{j<=q} a_j <y, phi_j> phi_j."""

    n_modes: int = 16
    weights: Sequence[float] = (2.0, 1.0, 3.0)


@dataclass(frozen=True)
class FiniteDimR4:
    """The fixed 4x4 example with B = diag(1, 1, 1, 0)."""


@dataclass(frozen=True)
class FiniteDimCustom:
    A: Sequence[Sequence[float]]
    B: Sequence[Sequence[float]]
    omega0: Optional[float] = None


ModelSpec = Union[
    HeatDirichletSpectral,
    WaveUndamped,
    WaveDamped,
    TransportL1,
    HeatNeumannSup,
    TransportL2FTS,
    HeatSpectralProjection,
    FiniteDimR4,
    FiniteDimCustom,
]

R4_A = np.array(
    [[0.0, 1.0, 0.0, 2.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 0.0]]
)
R4_B = np.diag([1.0, 1.0, 1.0, 0.0])


def default_sup_profile(z):
    return 1.0 + z * (1.0 - z)


# --------------------------------------------------------------------------
# control operators


class _DiagonalB:
    """B acting as a nonnegative diagonal multiplier on the coefficients."""

    def __init__(self, weights):
        w = np.array(weights, dtype=float)
        w.setflags(write=False)
        self.w = w
        self.active = w > 0
        self.norm = float(np.max(np.abs(w))) if w.size else 0.0
        self.beta = float(np.min(w[self.active])) if self.active.any() else 0.0
        self.b_max = self.norm

    def apply(self, v):
        return self.w * v

    def flow(self, U, v):
        return np.exp(U * self.w) * v

    def flow_limit(self, v):
        return np.where(self.active, 0.0, v)

    def kernel_split(self, v):
        kmask = self.w == 0
        return np.where(kmask, v, 0.0), np.where(kmask, 0.0, v)

    def matrix(self):
        return np.diag(self.w)

    def kernel_basis(self):
        idx = np.flatnonzero(self.w == 0)
        basis = np.zeros((self.w.size, idx.size))
        basis[idx, np.arange(idx.size)] = 1.0
        return basis


class _SymmetricB:
    """Symmetric positive semidefinite matrix B on a Euclidean space."""

    def __init__(self, B):
        self.B = np.array(B, dtype=float)
        w, Q = np.linalg.eigh(self.B)
        scale = max(1.0, float(np.max(np.abs(w))) if w.size else 0.0)
        w = np.where(np.abs(w) <= 1e-12 * scale, 0.0, w)
        self.w, self.Q = w, Q
        self.active = w > 0
        self.norm = float(np.max(np.abs(w))) if w.size else 0.0
        self.beta = float(np.min(w[self.active])) if self.active.any() else 0.0
        self.b_max = self.norm

    def apply(self, v):
        return self.B @ v

    def flow(self, U, v):
        return self.Q @ (np.exp(U * self.w) * (self.Q.T @ v))

    def flow_limit(self, v):
        return self.Q @ np.where(self.active, 0.0, self.Q.T @ v)

    def kernel_split(self, v):
        c = self.Q.T @ v
        kmask = self.w == 0
        v_ker = self.Q @ np.where(kmask, c, 0.0)
        return v_ker, v - v_ker

    def matrix(self):
        return self.B.copy()

    def kernel_basis(self):
        return self.Q[:, self.w == 0]

    def sqrt_apply(self, v):
        return self.Q @ (np.sqrt(np.clip(self.w, 0.0, None)) * (self.Q.T @ v))


class _WaveCouplingB:
    """B (y, w) = (0, y) written in energy coordinates (alpha_j, beta_j).

    The velocity y = sum alpha_j phi_j has beta-coordinate alpha_j / sqrt(lambda_j);
    B is nilpotent so exp(U B) = I + U B.
    """

    def __init__(self, eigenvalues):
        self.c = 1.0 / np.sqrt(eigenvalues)
        self.norm = float(np.max(self.c))
        self.beta = 0.0
        self.b_max = self.norm

    def apply(self, v):
        out = np.zeros_like(v)
        out[1::2] = self.c * v[0::2]
        return out

    def flow(self, U, v):
        out = np.array(v, dtype=float, copy=True)
        out[1::2] += U * self.c * v[0::2]
        return out

    def flow_limit(self, v):
        raise StructureError("B is nilpotent here; the feedback flow has no limit")

    def kernel_split(self, v):
        v_ker = np.array(v, dtype=float, copy=True)
        v_ker[0::2] = 0.0
        return v_ker, v - v_ker

    def matrix(self):
        n = 2 * self.c.size
        M = np.zeros((n, n))
        M[np.arange(1, n, 2), np.arange(0, n, 2)] = self.c
        return M

    def kernel_basis(self):
        n = 2 * self.c.size
        basis = np.zeros((n, self.c.size))
        basis[np.arange(1, n, 2), np.arange(self.c.size)] = 1.0
        return basis


# --------------------------------------------------------------------------
# models


class Model:
    """A validated (A, B) pair on a concrete state space.

    Attributes
    ----------
    spec : the originating spec record
    space : :class:`bilinstab.spaces.Space`
    beta : coercivity constant of B on ker(B)^perp (0 if none)
    omega0 : quasi-contraction type of the semigroup
    b_norm : operator norm of B
    """

    #: grid spacing when the semigroup is an exact shift (transport), else None
    shift_quantum: Optional[float] = None

    def __init__(self, spec, space, bop, beta=None, omega0=0.0):
        self.spec = spec
        self.space = space
        self._b = bop
        self.beta = float(bop.beta if beta is None else beta)
        self.omega0 = float(omega0)
        self.b_norm = float(bop.norm)

    @property
    def name(self) -> str:
        return type(self.spec).__name__

    @property
    def dim(self) -> int:
        return self.space.dim

    def __repr__(self):
        return f"<Model {self.name} dim={self.dim} beta={self.beta:g} omega0={self.omega0:g}>"

    # -- array-level kernels (used by the integrator) -----------------------

    def norm(self, v) -> float:
        return self.space.norm(v)

    def semigroup(self, v, t):
        raise NotImplementedError

    def semigroup_many(self, v, ts) -> np.ndarray:
        """Rows S(t_i) v for each t_i in ``ts`` (all >= 0)."""
        return np.array([self.semigroup(v, float(t)) if t > 0 else np.array(v, dtype=float)
                         for t in ts])

    def b_form_many(self, Y) -> np.ndarray:
        """b_form applied to each row of ``Y``."""
        if self.space.hilbert and isinstance(self._b, _DiagonalB):
            return (Y * Y) @ (self.space.weights() * self._b.w)
        return np.array([self.b_form(y) for y in Y])

    def apply_b(self, v):
        return self._b.apply(v)

    def b_form(self, v) -> float:
        """<B v, J(v)> with the deterministic duality selection."""
        return self.space.inner(self._b.apply(v), v)

    def pairing_form(self, v) -> float:
        """Form of the (possibly surrogate) single-valued pairing operator."""
        return self.b_form(v)

    def b_flow(self, U, v):
        """exp(U B) v."""
        return self._b.flow(U, v)

    def b_flow_limit(self, v):
        """lim_{U -> -inf} exp(U B) v."""
        return self._b.flow_limit(v)

    @property
    def b_max(self) -> float:
        return self._b.b_max

    def kernel_split(self, v):
        if not self.space.hilbert:
            raise StructureError(
                f"{self.name}: kernel projection needs a Hilbert structure"
            )
        return self._b.kernel_split(v)

    def b_matrix(self):
        return self._b.matrix()

    def kernel_basis(self):
        return self._b.kernel_basis()

    def l_star(self, v):
        """L* v for a factorisation B = L L* (input space R^q)."""
        if isinstance(self._b, _DiagonalB):
            g = self.space.weights()
            act = self._b.active
            return np.sqrt(g[act] * self._b.w[act]) * np.asarray(v)[act]
        if isinstance(self._b, _SymmetricB):
            return self._b.sqrt_apply(v)
        raise StructureError(f"{self.name}: no factorisation B = L L*")

    def generator_matrix(self):
        raise StructureError(f"{self.name}: generator is not a finite matrix")

    def weak_functionals(self, K: int) -> np.ndarray:
        """Rows are K fixed linear functionals used for weak-convergence probes."""
        K = min(int(K), self.dim)
        W = np.zeros((K, self.dim))
        W[np.arange(K), np.arange(K)] = 1.0
        return W

    def echo(self) -> dict:
        out = {"model": self.name}
        for f in fields(self.spec):
            val = getattr(self.spec, f.name)
            if callable(val):
                val = getattr(val, "__name__", repr(val))
            elif isinstance(val, np.ndarray):
                val = val.tolist()
            elif isinstance(val, tuple):
                val = [list(r) if isinstance(r, (tuple, list, np.ndarray)) else r for r in val]
            out[f.name] = val
        out.update(beta=self.beta, omega0=self.omega0, b_norm=self.b_norm)
        return out


class _SpectralHeatModel(Model):
    def __init__(self, spec, space, bop):
        super().__init__(spec, space, bop)
        self._lam = space.eigenvalues

    def semigroup(self, v, t):
        return np.exp(-self._lam * t) * v

    def semigroup_many(self, v, ts):
        return np.exp(-np.outer(ts, self._lam)) * v

    def generator_matrix(self):
        return np.diag(-self._lam)


class _WaveModel(Model):
    def __init__(self, spec, space, bop):
        super().__init__(spec, space, bop)
        self._omega = np.sqrt(space.eigenvalues)
        self._rot_cache = {}

    def _rotation(self, t):
        cs = self._rot_cache.get(t)
        if cs is None:
            if len(self._rot_cache) > 64:
                self._rot_cache.clear()
            cs = (np.cos(self._omega * t), np.sin(self._omega * t))
            self._rot_cache[t] = cs
        return cs

    def semigroup(self, v, t):
        c, s = self._rotation(t)
        a, b = v[0::2], v[1::2]
        out = np.empty_like(v, dtype=float)
        out[0::2] = a * c + b * s
        out[1::2] = -a * s + b * c
        return out

    def semigroup_many(self, v, ts):
        ph = np.outer(ts, self._omega)
        c, s = np.cos(ph), np.sin(ph)
        a, b = v[0::2], v[1::2]
        out = np.empty((len(ts), v.size))
        out[:, 0::2] = a * c + b * s
        out[:, 1::2] = -a * s + b * c
        return out

    def generator_matrix(self):
        n = self.dim
        M = np.zeros((n, n))
        idx = np.arange(0, n, 2)
        M[idx, idx + 1] = self._omega
        M[idx + 1, idx] = -self._omega
        return M

    def weak_functionals(self, K):
        K = min(int(K), self.space.n_modes)
        W = np.zeros((K, self.dim))
        W[np.arange(K), 2 * np.arange(K)] = self._omega[:K]
        return W


def _hat_functionals(points, dx, K, length):
    K = int(K)
    W = np.zeros((K, points.size))
    if K == 0:
        return W
    h = length / (K + 1)
    for k in range(K):
        c = (k + 1) * h
        W[k] = np.clip(1.0 - np.abs(points - c) / h, 0.0, None) * dx
    return W


class _TransportModel(Model):
    """Exact right shift with zero inflow; mass leaving x_max is dropped."""

    def __init__(self, spec, space, bop):
        super().__init__(spec, space, bop)
        self.shift_quantum = space.dx

    @property
    def x_max(self) -> float:
        return self.space.length

    def semigroup(self, v, t):
        s = t / self.space.dx
        m = int(round(s))
        if abs(s - m) <= 1e-9 * max(1.0, s):
            return _shift(v, m)
        m = int(math.floor(s))
        theta = s - m
        # cell averages of the exactly shifted piecewise-constant profile
        return (1.0 - theta) * _shift(v, m) + theta * _shift(v, m + 1)

    def b_form(self, v):
        if isinstance(self.space, spaces.GridL1):
            dx = self.space.dx
            mass = np.abs(v)
            return float(np.sum(mass) * dx * np.dot(self._b.w, mass) * dx)
        return super().b_form(v)

    def weak_functionals(self, K):
        return _hat_functionals(self.space.cell_midpoints(), self.space.dx, K, self.x_max)


def _shift(v, m):
    out = np.zeros_like(v, dtype=float)
    if m <= 0:
        out[:] = v
    elif m < v.size:
        out[m:] = v[: v.size - m]
    return out


def _propagate_uniform(semigroup, v, ts):
    """Rows S(t_i) v, reusing one propagator when ``ts`` is uniform from 0."""
    ts = np.asarray(ts, dtype=float)
    out = np.empty((ts.size, np.size(v)))
    if ts.size == 0:
        return out
    h = ts[1] - ts[0] if ts.size > 1 else 0.0
    uniform = ts[0] == 0 and ts.size > 1 and np.allclose(np.diff(ts), h, rtol=1e-12, atol=0)
    if not uniform:
        for i, t in enumerate(ts):
            out[i] = semigroup(v, float(t)) if t > 0 else v
        return out
    out[0] = v
    for i in range(1, ts.size):
        out[i] = semigroup(out[i - 1], float(h))
    return out


class _SupHeatModel(Model):
    def __init__(self, spec, space, bop, a_values, k):
        super().__init__(spec, space, bop, beta=k)
        self.a_values = a_values
        self.k = float(k)
        self.a_sup = float(np.max(np.abs(a_values)))
        n, dx = space.n, space.dx
        L = np.zeros((n, n))
        idx = np.arange(1, n - 1)
        L[idx, idx - 1] = 1.0
        L[idx, idx] = -2.0
        L[idx, idx + 1] = 1.0
        # Neumann ghost nodes x_{-1} = x_1, x_n = x_{n-2}
        L[0, 0], L[0, 1] = -2.0, 2.0
        L[n - 1, n - 1], L[n - 1, n - 2] = -2.0, 2.0
        self.laplacian = L / dx**2
        self._cache = {}

    def semigroup(self, v, t):
        E = self._cache.get(t)
        if E is None:
            if len(self._cache) > 64:
                self._cache.clear()
            E = expm(self.laplacian * t)
            self._cache[t] = E
        return E @ v

    def semigroup_many(self, v, ts):
        return _propagate_uniform(self.semigroup, v, ts)

    def b_form(self, v):
        i0 = int(np.argmax(np.abs(v)))
        return float(self.a_values[i0] * v[i0] * v[i0])

    def pairing_form(self, v):
        m = self.space.norm(v)
        return self.k * m * m

    def weak_functionals(self, K):
        nodes = self.space.nodes()
        return _hat_functionals(nodes, self.space.dx, K, nodes[-1])


class _MatrixModel(Model):
    def __init__(self, spec, space, bop, A, omega0):
        super().__init__(spec, space, bop, omega0=omega0)
        self.A = np.array(A, dtype=float)
        self.A.setflags(write=False)
        self._cache = {}

    def semigroup(self, v, t):
        E = self._cache.get(t)
        if E is None:
            if len(self._cache) > 64:
                self._cache.clear()
            E = expm(self.A * t)
            self._cache[t] = E
        return E @ v

    def semigroup_many(self, v, ts):
        return _propagate_uniform(self.semigroup, v, ts)

    def generator_matrix(self):
        return np.array(self.A)


# --------------------------------------------------------------------------
# construction


def _positive_int(name, value, minimum=1):
    try:
        iv = int(value)
    except (TypeError, ValueError):
        raise ValidationError(name, f"expected an integer, got {value!r}") from None
    if iv != value or iv < minimum:
        raise ValidationError(name, f"must be an integer >= {minimum}")
    return iv


def _grid_cut(name, cut, n, dx):
    if not (np.isfinite(dx) and dx > 0):
        raise ValidationError("dx", "must be positive")
    x_max = n * dx
    if not (0 < cut < x_max):
        raise ValidationError(name, f"must lie in (0, {x_max:g})")
    idx = cut / dx
    if abs(idx - round(idx)) > 1e-9 * max(1.0, idx):
        raise ValidationError(name, "must be an integer multiple of dx")
    return int(round(idx))


def _diag_or_sym(B):
    if np.count_nonzero(B - np.diag(np.diag(B))) == 0:
        return _DiagonalB(np.diag(B))
    return _SymmetricB(B)


def build_model(spec: ModelSpec) -> Model:
    """Validate ``spec`` and return the corresponding :class:`Model`."""
    if isinstance(spec, HeatDirichletSpectral):
        n = _positive_int("n_modes", spec.n_modes)
        space = spaces.SpectralL2.dirichlet(n)
        if spec.multiplier is None:
            w = np.ones(n)
        else:
            w = np.asarray(spec.multiplier, dtype=float)
            if w.shape != (n,):
                raise ValidationError("multiplier", f"needs {n} modal weights")
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise ValidationError("multiplier", "weights must be finite and >= 0")
        return _SpectralHeatModel(spec, space, _DiagonalB(w))

    if isinstance(spec, HeatSpectralProjection):
        n = _positive_int("n_modes", spec.n_modes)
        a = np.atleast_1d(np.asarray(spec.weights, dtype=float))
        if a.size < 1:
            raise ValidationError("weights", "need at least one weight (q >= 1)")
        if a.size > n:
            raise ValidationError("weights", f"q = {a.size} exceeds n_modes = {n}")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValidationError("weights", "all a_j must be > 0")
        w = np.zeros(n)
        w[: a.size] = a
        return _SpectralHeatModel(spec, spaces.SpectralL2.dirichlet(n), _DiagonalB(w))

    if isinstance(spec, WaveDamped):
        n = _positive_int("n_modes", spec.n_modes)
        space = spaces.EnergyWave.dirichlet(n)
        return _WaveModel(spec, space, _DiagonalB(np.tile([0.0, 1.0], n)))

    if isinstance(spec, WaveUndamped):
        n = _positive_int("n_modes", spec.n_modes)
        space = spaces.EnergyWave.dirichlet(n)
        return _WaveModel(spec, space, _WaveCouplingB(space.eigenvalues))

    if isinstance(spec, (TransportL1, TransportL2FTS)):
        n = _positive_int("n", spec.n)
        dx = float(spec.dx)
        if isinstance(spec, TransportL1):
            i0 = _grid_cut("alpha_cut", spec.alpha_cut, n, dx)
            space = spaces.GridL1(n, dx)
        else:
            i0 = _grid_cut("a_cut", spec.a_cut, n, dx)
            space = spaces.GridL2(n, dx)
        h = np.zeros(n)
        h[i0:] = 1.0
        return _TransportModel(spec, space, _DiagonalB(h))

    if isinstance(spec, HeatNeumannSup):
        n = _positive_int("n", spec.n, minimum=3)
        space = spaces.GridSup(n, 1.0 / (n - 1))
        nodes = space.nodes()
        if spec.a is None:
            a = default_sup_profile(nodes)
        elif callable(spec.a):
            a = np.asarray(spec.a(nodes), dtype=float) * np.ones(n)
        else:
            a = np.asarray(spec.a, dtype=float)
            if a.shape != (n,):
                raise ValidationError("a", f"needs {n} nodal values")
        if not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise ValidationError("a", "profile must be positive")
        k = float(np.min(a)) if spec.k is None else float(spec.k)
        if not k > 0:
            raise ValidationError("k", "must be > 0")
        if k > np.min(a) * (1 + 1e-12):
            raise ValidationError("k", "must not exceed min a")
        a.setflags(write=False)
        return _SupHeatModel(spec, space, _DiagonalB(a), a, k)

    if isinstance(spec, FiniteDimR4):
        return _MatrixModel(spec, spaces.FiniteDim(4), _DiagonalB(np.diag(R4_B)), R4_A, math.sqrt(2.0))

    if isinstance(spec, FiniteDimCustom):
        A = np.atleast_2d(np.asarray(spec.A, dtype=float))
        B = np.atleast_2d(np.asarray(spec.B, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n) or n < 1:
            raise ValidationError("A", "must be a square matrix")
        if B.shape != (n, n):
            raise ValidationError("B", f"must be {n}x{n}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise ValidationError("A", "entries must be finite")
        scale = max(1.0, float(np.max(np.abs(B))))
        if np.max(np.abs(B - B.T)) > 1e-12 * scale:
            raise ValidationError("B", "must be symmetric")
        if np.min(np.linalg.eigvalsh(B)) < -1e-12 * scale:
            raise ValidationError("B", "must be positive semidefinite")
        if spec.omega0 is None:
            omega0 = max(0.0, float(np.max(np.linalg.eigvalsh(0.5 * (A + A.T)))))
        else:
            omega0 = float(spec.omega0)
            if not np.isfinite(omega0):
                raise ValidationError("omega0", "must be finite")
        return _MatrixModel(spec, spaces.FiniteDim(n), _diag_or_sym(B), A, omega0)

    raise StructureError(f"unknown model spec {type(spec).__name__}")


# --------------------------------------------------------------------------
# state-vector level operations


def _arr(model: Model, v) -> np.ndarray:
    if isinstance(v, StateVector):
        if v.space.dim != model.dim:
            raise StructureError("state vector does not belong to the model space")
        return v.coeffs
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.size != model.dim:
        raise StructureError(f"expected {model.dim} coefficients, got {a.size}")
    return a


def semigroup_apply(model: Model, v, t: float) -> StateVector:
    """S(t) v, exact in the model's representation. ``t`` must be >= 0."""
    if not t >= 0:
        raise DomainError(f"semigroup time must be >= 0, got {t!r}")
    x = _arr(model, v)
    if t == 0:
        return StateVector(model.space, x)
    return StateVector(model.space, model.semigroup(x, float(t)))


def apply_B(model: Model, v) -> StateVector:
    return StateVector(model.space, model.apply_b(_arr(model, v)))


def b_form(model: Model, v) -> float:
    return model.b_form(_arr(model, v))


def kernel_b_projection(model: Model, v):
    """Split ``v`` into (ker B component, ker(B)^perp component)."""
    v_ker, v_perp = model.kernel_split(_arr(model, v))
    return StateVector(model.space, v_ker), StateVector(model.space, v_perp)


def mode(space, j: int, which: str = "alpha") -> StateVector:
    """Unit coefficient vector for basis index ``j`` (1-based).

    For the energy space ``which`` picks the alpha or beta coordinate.
    """
    c = np.zeros(space.dim)
    if isinstance(space, spaces.EnergyWave):
        c[2 * (j - 1) + (1 if which == "beta" else 0)] = 1.0
    else:
        c[j - 1] = 1.0
    return StateVector(space, c)
