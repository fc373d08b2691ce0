"""Feedback laws u = f(x) for the bilinear system x' = A x + u B x.

Every law depends on the state only through ``||x||`` and the pairing
``V = <B x, J(x)>`` (the model's ``b_form``), plus the time for
:class:`DelayedSwitch`. That keeps evaluation cheap inside the integrator,
which calls :meth:`gain` directly with precomputed scalars.

The indicator ``1_{x != 0}`` is realised as ``||x|| > zero_tol``; with the
default ``zero_tol = 0`` it is the exact test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import ValidationError
from .spaces import StateVector


def _check_mu(mu):
    if not (0.0 < mu < 0.5):
        raise ValidationError("mu", f"must lie strictly inside (0, 1/2), got {mu!r}")


def _check_positive(name, value):
    if not (np.isfinite(value) and value > 0):
        raise ValidationError(name, f"must be > 0, got {value!r}")


def _check_nonneg(name, value):
    if not (np.isfinite(value) and value >= 0):
        raise ValidationError(name, f"must be >= 0, got {value!r}")


@dataclass(frozen=True)
class SingularPart:
    """u = -shift - rho (V^-mu [+ V^mu]) on {V > 0}; used for extinction handling."""

    shift: float
    rho: float
    mu: float
    with_plus: bool


class _Law:
    kind = "law"

    def gain(self, norm: float, V: float, t: float = 0.0, zero_tol: float = 0.0) -> float:
        raise NotImplementedError

    def singular_part(self, t: float = 0.0) -> Optional[SingularPart]:
        return None

    def switch_times(self):
        return ()

    def echo(self) -> dict:
        out = {"law": type(self).__name__}
        for k, v in self.__dict__.items():
            out[k] = v.echo() if isinstance(v, _Law) else v
        return out


@dataclass(frozen=True)
class Zero(_Law):
    def gain(self, norm, V, t=0.0, zero_tol=0.0):
        return 0.0


@dataclass(frozen=True)
class QuadraticV0(_Law):
    """v0 = -<x, B x>."""

    def gain(self, norm, V, t=0.0, zero_tol=0.0):
        return -V if norm > zero_tol else 0.0


@dataclass(frozen=True)
class HomogeneousVr(_Law):
    """v_r = -<x, B x> / ||x||^r, homogeneous of degree 2 - r."""

    r: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r < 2):
            raise ValidationError("r", f"must be < 2, got {self.r!r}")

    def gain(self, norm, V, t=0.0, zero_tol=0.0):
        if norm <= zero_tol or norm == 0.0:
            return 0.0
        return -V / norm**self.r


@dataclass(frozen=True)
class NormalizedBanach(_Law):
    """u = -lam <B x, J(x)> / ||x||^2."""

    lam: float = 0.1

    def __post_init__(self):
        _check_positive("lam", self.lam)

    def gain(self, norm, V, t=0.0, zero_tol=0.0):
        if norm <= zero_tol or norm == 0.0:
            return 0.0
        return -self.lam * V / (norm * norm)


class _FTSFamily(_Law):
    def _terms(self):
        raise NotImplementedError

    def singular_part(self, t=0.0):
        return self._terms()

    def gain(self, norm, V, t=0.0, zero_tol=0.0):
        if norm <= zero_tol or norm == 0.0:
            return 0.0
        sp = self._terms()
        u = -sp.shift
        if V > 0.0:
            p = V**sp.mu
            u -= sp.rho / p
            if sp.with_plus:
                u -= sp.rho * p
        return u


@dataclass(frozen=True)
class FiniteTime(_FTSFamily):
    """u = -shift - <B x, x>^-mu; shift is omega0 / beta for quasi-contractions."""

    mu: float = 0.25
    shift: float = 0.0

    def __post_init__(self):
        _check_mu(self.mu)
        _check_nonneg("shift", self.shift)

    def _terms(self):
        return SingularPart(self.shift, 1.0, self.mu, False)


@dataclass(frozen=True)
class FixedTime(_FTSFamily):
    mu: float = 0.25
    shift: float = 0.0

    def __post_init__(self):
        _check_mu(self.mu)
        _check_nonneg("shift", self.shift)

    def _terms(self):
        return SingularPart(self.shift, 1.0, self.mu, True)


@dataclass(frozen=True)
class PrescribedTime(_FTSFamily):
    mu: float = 0.25
    rho: float = 1.0
    shift: float = 0.0

    def __post_init__(self):
        _check_mu(self.mu)
        _check_positive("rho", self.rho)
        _check_nonneg("shift", self.shift)

    def _terms(self):
        return SingularPart(self.shift, self.rho, self.mu, True)


@dataclass(frozen=True)
class NonInvariantFT(_FTSFamily):
    """u = -alpha - <B x, x>^-mu 1_{B x != 0}."""

    mu: float = 0.25
    alpha_shift: float = 0.0

    def __post_init__(self):
        _check_mu(self.mu)
        if not np.isfinite(self.alpha_shift):
            raise ValidationError("alpha_shift", "must be finite")

    def _terms(self):
        return SingularPart(self.alpha_shift, 1.0, self.mu, False)


@dataclass(frozen=True)
class LinearFT(_FTSFamily):
    """Vector control v = -(omega0/alpha^2) L* x - ||L* x||^-2mu L* x [- ||L* x||^2mu L* x].

    With B = L L* the closed loop equals the bilinear one with scalar gain
    ``-omega0/alpha^2 - V^-mu [- V^mu]``; :meth:`gain` returns that scalar.
    """

    mu: float = 0.25
    omega0: float = 0.0
    alpha_coerc: float = 1.0
    fixed_time: bool = False

    def __post_init__(self):
        _check_mu(self.mu)
        _check_positive("alpha_coerc", self.alpha_coerc)
        if not np.isfinite(self.omega0):
            raise ValidationError("omega0", "must be finite")

    def _terms(self):
        return SingularPart(self.omega0 / self.alpha_coerc**2, 1.0, self.mu, self.fixed_time)


@dataclass(frozen=True)
class DelayedSwitch(_Law):
    """u = 0 on [0, tau], then the inner law."""

    tau: float = 1.0
    inner: _Law = Zero()

    def __post_init__(self):
        _check_nonneg("tau", self.tau)
        if not isinstance(self.inner, _Law):
            raise ValidationError("inner", "must be a feedback law")

    def gain(self, norm, V, t=0.0, zero_tol=0.0):
        if t <= self.tau:
            return 0.0
        return self.inner.gain(norm, V, t, zero_tol)

    def singular_part(self, t=0.0):
        return None if t <= self.tau else self.inner.singular_part(t)

    def switch_times(self):
        return (self.tau,) + tuple(self.inner.switch_times())


FeedbackLaw = Union[
    Zero,
    QuadraticV0,
    HomogeneousVr,
    NormalizedBanach,
    FiniteTime,
    FixedTime,
    PrescribedTime,
    NonInvariantFT,
    DelayedSwitch,
    LinearFT,
]

SINGULAR_FAMILY = (FiniteTime, FixedTime, PrescribedTime, NonInvariantFT, LinearFT)


def is_fts_family(law) -> bool:
    if isinstance(law, DelayedSwitch):
        return is_fts_family(law.inner)
    return isinstance(law, SINGULAR_FAMILY)


def prescribed_rho(T_target: float, mu: float, beta: float = 1.0) -> float:
    """Gain rho = pi / (4 T mu beta^(1-mu)) reaching extinction before T."""
    _check_positive("T_target", T_target)
    _check_mu(mu)
    return math.pi / (4.0 * T_target * mu * beta ** (1.0 - mu))


def control_value(law, model, x, t: float = 0.0, zero_tol: float = 0.0):
    """Evaluate the feedback at state ``x`` and time ``t``.

    Returns a float, or an array in the input space of L for :class:`LinearFT`.
    """
    arr = x.coeffs if isinstance(x, StateVector) else np.asarray(x, dtype=float)
    nrm = model.norm(arr)
    V = model.b_form(arr)
    u = law.gain(nrm, V, t, zero_tol)
    if isinstance(law, LinearFT):
        return u * model.l_star(arr)
    return u
