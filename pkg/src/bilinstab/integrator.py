"""Closed-loop time stepping for x' = A x + u(x) B x.

One step of length h is the Lie splitting ``x -> S(h) F_h(x)``:

* ``F_h`` is the feedback substep x' = u(x) B x. Every solution of it has the
  form ``x(s) = exp(U(s) B) x`` with the scalar ``U' = u(exp(U B) x)``, so the
  substep reduces to a scalar ODE in U, integrated with classical RK4 on
  substeps small enough that ``|u| ||B|| ds <= 0.01``. The B-flow itself is
  applied exactly.
* ``S(h)`` is the model's exact semigroup.

For the finite-time family the time to reach ``U = -inf`` (where the
``ker B^perp`` part of x vanishes) is finite. When a cheap lower bound says
it may fall inside the admissible step, it is computed by quadrature; if it
does, the step lands exactly on that instant and, when the remaining kernel
component is below the extinction threshold, the state is set to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import BlowUpError, NumericalError, StructureError, ValidationError
from .feedback import LinearFT, is_fts_family
from .spaces import StateVector

#: bound on |u| ||B|| per RK4 substep of the feedback flow
FLOW_CAP = 0.01
_MAX_SUBSTEPS = 200_000


@dataclass(frozen=True)
class SimOptions:
    horizon: float = 10.0
    dt_max: float = 0.01
    eps_ext: float = 1e-12
    record_stride: int = 1
    weak_functionals: int = 5
    courant_cap: float = 0.1

    def __post_init__(self):
        if not (np.isfinite(self.dt_max) and self.dt_max > 0):
            raise ValidationError("dt_max", "must be > 0")
        if not (np.isfinite(self.horizon) and self.horizon > 0):
            raise ValidationError("horizon", "must be > 0")
        if not (0 < self.eps_ext <= 1e-6):
            raise ValidationError("eps_ext", "must lie in (0, 1e-6]")
        if int(self.record_stride) != self.record_stride or self.record_stride < 1:
            raise ValidationError("record_stride", "must be an integer >= 1")
        if int(self.weak_functionals) != self.weak_functionals or self.weak_functionals < 0:
            raise ValidationError("weak_functionals", "must be an integer >= 0")
        if not (np.isfinite(self.courant_cap) and self.courant_cap > 0):
            raise ValidationError("courant_cap", "must be > 0")

    def echo(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Trajectory:
    """Recorded samples of a closed-loop run.

    ``obs`` has one column per weak functional. ``control`` holds the scalar
    gain u (for :class:`~bilinstab.feedback.LinearFT` the scalar multiplying
    L* x).
    """

    t: np.ndarray
    norm: np.ndarray
    control: np.ndarray
    b_form: np.ndarray
    obs: np.ndarray
    extinction_time: Optional[float] = None
    final_state: Optional[StateVector] = None
    manifest: dict = field(default_factory=dict)
    n_steps: int = 0

    def __len__(self):
        return self.t.size

    @property
    def samples(self):
        return [
            (float(self.t[i]), float(self.norm[i]), float(self.control[i]),
             float(self.b_form[i]), tuple(self.obs[i]))
            for i in range(self.t.size)
        ]

    @property
    def horizon(self) -> float:
        return float(self.t[-1])

    @classmethod
    def from_arrays(cls, t, norm, control=None, b_form=None, obs=None,
                    extinction_time=None, **kw):
        """Build a trajectory from raw arrays (synthetic data, CSV reloads)."""
        t = np.asarray(t, dtype=float)
        norm = np.asarray(norm, dtype=float)
        z = np.zeros_like(t)
        control = z if control is None else np.asarray(control, dtype=float)
        b_form = z if b_form is None else np.asarray(b_form, dtype=float)
        obs = np.zeros((t.size, 0)) if obs is None else np.asarray(obs, dtype=float).reshape(t.size, -1)
        return cls(t, norm, control, b_form, obs, extinction_time, **kw)


# --------------------------------------------------------------------------
# feedback substep


def _gain_fn(model, law, x, t_eval, zero_tol):
    def g(U):
        y = model.b_flow(U, x)
        return law.gain(model.norm(y), model.b_form(y), t_eval, zero_tol)

    return g


def _feedback_flow(model, g, x, h, g0=None):
    """exp(U(h) B) x with U' = g(U), U(0) = 0."""
    bmax = model.b_max
    if h <= 0 or bmax == 0:
        return x
    U, s, n = 0.0, 0.0, 0
    k1 = g(0.0) if g0 is None else g0
    while s < h:
        if k1 == 0.0 and n == 0 and g(0.0) == 0.0:
            return x
        hs = h - s
        rate = abs(k1) * bmax
        if rate * hs > FLOW_CAP:
            hs = FLOW_CAP / rate
        k2 = g(U + 0.5 * hs * k1)
        k3 = g(U + 0.5 * hs * k2)
        k4 = g(U + hs * k3)
        U += hs * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        s += hs
        n += 1
        if n > _MAX_SUBSTEPS or not math.isfinite(U):
            raise NumericalError("feedback substep did not converge")
        if s < h:
            k1 = g(U)
    return model.b_flow(U, x)


def _extinction_lower_bound(sp, V0, bmax):
    """Lower bound on int_{-inf}^0 dU / |u(U)| using V(U) >= exp(2 U bmax) V0."""
    c = abs(sp.shift) + (sp.rho * V0**sp.mu if sp.with_plus else 0.0)
    d = sp.rho * V0 ** (-sp.mu)
    k = 2.0 * sp.mu * bmax
    if d == 0.0:  # V0 so large that the singular term underflows
        return math.inf
    if c > 0:
        return math.log1p(c / d) / (k * c)
    return 1.0 / (k * d)


def _time_to_extinction(model, law, x, t_eval):
    """int_{-inf}^0 dU / |u(U)|, or inf if the gain is not strictly negative."""

    def integrand(s):
        y = model.b_flow(-s, x)
        V = model.b_form(y)
        if V <= 0.0:  # underflow far out on the flow; the integrand is ~0 there
            return 0.0
        v = law.gain(model.norm(y), V, t_eval, 0.0)
        if not v < 0:
            raise _NoExtinction
        return -1.0 / v

    try:
        val, _ = quad(integrand, 0.0, np.inf, epsabs=0.0, epsrel=1e-11, limit=400)
    except _NoExtinction:
        return math.inf
    return float(val) if math.isfinite(val) else math.inf


class _NoExtinction(Exception):
    pass


def _landing(model, law, x, nrm, V, t_eval, zero_tol, h_allow):
    """Return (t_ext, limit_state) if the singular flow reaches U = -inf within h_allow."""
    if V <= 0 or nrm <= zero_tol:
        return None
    sp = law.singular_part(t_eval)
    if sp is None or model.b_max == 0:
        return None
    if _extinction_lower_bound(sp, V, model.b_max) > h_allow:
        return None
    try:
        limit = model.b_flow_limit(x)
    except StructureError:
        return None
    t_ext = _time_to_extinction(model, law, x, t_eval)
    if t_ext > h_allow:
        return None
    return t_ext, limit


def _split_step(model, law, x, t, h, zero_tol, h_land=None):
    """One splitting step. Returns (x_new, h_taken, extinct)."""
    t_eval = t + 0.5 * h
    nrm = model.norm(x)
    V = model.b_form(x)
    land = _landing(model, law, x, nrm, V, t_eval, zero_tol, h if h_land is None else h_land)
    if land is not None:
        t_ext, limit = land
        if model.norm(limit) <= zero_tol:
            return np.zeros_like(x), t_ext, True
        if t_ext <= h:
            # only the kernel part survives; B vanishes on it
            return model.semigroup(limit, h), h, False
    g = _gain_fn(model, law, x, t_eval, zero_tol)
    xf = _feedback_flow(model, g, x, h, law.gain(nrm, V, t_eval, zero_tol))
    return model.semigroup(xf, h), h, False


def step(model, law, x, t: float, dt: float, zero_tol: float = 0.0) -> StateVector:
    """Advance one Lie-splitting step ``S(dt) F_dt``.

    If the feedback drives the state to zero inside the step the returned
    state is exactly zero.
    """
    arr = x.coeffs if isinstance(x, StateVector) else np.asarray(x, dtype=float)
    if dt < 0:
        raise ValidationError("dt", "must be >= 0")
    if dt == 0:
        return StateVector(model.space, arr)
    with np.errstate(over="ignore", invalid="ignore"):
        out, _, extinct = _split_step(model, law, arr, t, float(dt), zero_tol)
    if not np.all(np.isfinite(out)):
        raise BlowUpError(t)
    return StateVector(model.space, out)


# --------------------------------------------------------------------------
# driver


class _Recorder:
    def __init__(self, model, law, W, zero_tol):
        self.model, self.law, self.W, self.zero_tol = model, law, W, zero_tol
        self.rows = []
        self.obs = []

    def add(self, t, x):
        nrm = self.model.norm(x)
        V = self.model.b_form(x)
        u = self.law.gain(nrm, V, t, self.zero_tol)
        self.rows.append((t, nrm, u, V))
        self.obs.append(self.W @ x)

    def trajectory(self, **kw):
        R = np.array(self.rows, dtype=float).reshape(-1, 4)
        obs = np.array(self.obs, dtype=float).reshape(R.shape[0], self.W.shape[0])
        return Trajectory(R[:, 0], R[:, 1], R[:, 2], R[:, 3], obs, **kw)


# overflow is reported as BlowUpError, not as floating-point warnings
@np.errstate(over="ignore", invalid="ignore")
def simulate(model, law, x0, opts: Optional[SimOptions] = None) -> Trajectory:
    """Run the closed loop from ``x0`` over ``[0, opts.horizon]``.

    Raises
    ------
    BlowUpError
        If the state becomes non-finite; ``last_time`` is the last valid time.
    """
    opts = SimOptions() if opts is None else opts
    if isinstance(x0, StateVector):
        if x0.space.dim != model.dim:
            raise StructureError("initial state does not belong to the model space")
        x = np.array(x0.coeffs, dtype=float)
    else:
        x = np.asarray(x0, dtype=float).reshape(-1).copy()
        if x.size != model.dim:
            raise StructureError(f"expected {model.dim} coefficients, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("x0", "entries must be finite")

    n0 = model.norm(x)
    zero_tol = opts.eps_ext * n0
    singular = is_fts_family(law)
    K = opts.weak_functionals
    W = model.weak_functionals(K) if K > 0 else np.zeros((0, model.dim))
    rec = _Recorder(model, law, W, zero_tol)
    horizon = float(opts.horizon)
    quantum = model.shift_quantum
    switches = sorted(s for s in law.switch_times() if 0 < s < horizon)
    if quantum is not None:
        for s in switches:
            q = s / quantum
            if abs(q - round(q)) > 1e-9 * max(1.0, q):
                raise ValidationError("tau", "switch time must be a multiple of dx for transport models")
    cap_scale = max(1.0, model.b_norm)

    rec.add(0.0, x)
    t, k = 0.0, 0
    extinction = None
    if singular and n0 == 0.0:
        extinction = 0.0
    while extinction is None and t < horizon:
        remaining = horizon - t
        snap = None
        if quantum is not None:
            h = quantum if remaining > quantum * (1 + 1e-9) else remaining
            h_land = h
        else:
            h_land = min(opts.dt_max, remaining)
            snap = horizon if remaining <= opts.dt_max else None
            for s in switches:
                if s > t + 1e-12 * max(1.0, t):
                    if s - t <= h_land:
                        h_land, snap = s - t, s
                    break
            u0 = abs(law.gain(model.norm(x), model.b_form(x), t + 0.5 * h_land, zero_tol))
            h = h_land if u0 == 0 else min(h_land, opts.courant_cap / (u0 * cap_scale))
            if not h > 0:
                raise NumericalError(f"step size underflow at t = {t!r}")
        x_new, h_taken, extinct = _split_step(model, law, x, t, h, zero_tol, h_land)
        if not np.all(np.isfinite(x_new)):
            raise BlowUpError(t)
        k += 1
        if extinct:
            t_new = t + h_taken
        elif quantum is not None and h == quantum:
            t_new = k * quantum
        else:
            t_new = snap if (snap is not None and h == h_land) else t + h
            if horizon - t_new <= 1e-12 * horizon:
                t_new = horizon
        # threshold extinction only while the singular term acts (B x != 0)
        if (singular and not extinct and model.norm(x_new) <= zero_tol
                and model.b_form(x_new) > 0 and law.singular_part(t_new) is not None):
            x_new = np.zeros_like(x_new)
            extinct = True
        x, t = x_new, t_new
        if extinct:
            extinction = t
            rec.add(t, x)
            break
        if k % opts.record_stride == 0 or t >= horizon:
            rec.add(t, x)
    if extinction is not None and t < horizon:
        rec.add(horizon, x)

    manifest = {
        "model": model.echo(),
        "law": law.echo(),
        "options": opts.echo(),
        "zero_tol": zero_tol,
        "vector_control": isinstance(law, LinearFT),
    }
    return rec.trajectory(
        extinction_time=extinction,
        final_state=StateVector(model.space, x),
        manifest=manifest,
        n_steps=k,
    )
