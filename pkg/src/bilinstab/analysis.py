"""Quantitative checks on trajectories, models and the supporting lemmas."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad, simpson, trapezoid

from . import spaces
from .errors import InsufficientDataError, NumericalError, StructureError, ValidationError
from .integrator import Trajectory

# --------------------------------------------------------------------------
# decay fits


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit ``||x|| ~ M t^-p`` (polynomial) or ``M e^-sigma t``.

    ``value`` is p or sigma depending on ``kind``.
    """

    kind: str
    value: float
    prefactor: float
    t_lo: float
    t_hi: float
    r2: float
    n_points: int

    @property
    def exponent(self) -> float:
        return self.value

    @property
    def rate(self) -> float:
        return self.value


def _pre_extinction(traj: Trajectory):
    t, nrm = traj.t, traj.norm
    keep = nrm > traj.manifest.get("zero_tol", 0.0)
    keep &= nrm > 0
    if traj.extinction_time is not None:
        keep &= t < traj.extinction_time
    return t[keep], nrm[keep]


def fit_decay(traj: Trajectory, kind: str = "polynomial", window=None) -> RateFit:
    """Fit the decay of ``||x(t)||`` over the last half of the pre-extinction run.

    Polynomial fits regress ``log ||x||`` on ``log t`` and also skip the first
    decade of time; when the run ends in extinction the last 10% before it is
    dropped. ``window=(t_lo, t_hi)`` overrides the automatic choice.
    """
    if kind not in ("polynomial", "exponential"):
        raise ValidationError("kind", "must be 'polynomial' or 'exponential'")
    t, nrm = _pre_extinction(traj)
    if t.size == 0:
        raise InsufficientDataError("no samples with nonzero norm")
    if window is None:
        t_end = traj.extinction_time if traj.extinction_time is not None else t[-1]
        lo = 0.5 * t_end
        hi = 0.9 * t_end if traj.extinction_time is not None else t_end
        if kind == "polynomial":
            t_pos = t[t > 0]
            if t_pos.size:
                lo = max(lo, 10.0 * t_pos[0]) if 10.0 * t_pos[0] < hi else lo
    else:
        lo, hi = window
    sel = (t >= lo) & (t <= hi)
    if kind == "polynomial":
        sel &= t > 0
    if np.count_nonzero(sel) < 20:
        raise InsufficientDataError(
            f"need at least 20 samples in the fit window, got {np.count_nonzero(sel)}"
        )
    ts, ys = t[sel], np.log(nrm[sel])
    xs = np.log(ts) if kind == "polynomial" else ts
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(kind, float(-slope), float(np.exp(intercept)), float(ts[0]),
                   float(ts[-1]), min(1.0, max(0.0, r2)), int(ts.size))


def settling_time(traj: Trajectory) -> Optional[float]:
    return traj.extinction_time


def bound_form_sup(traj: Trajectory, exponent: float, t_lo: float, t_hi: float) -> float:
    """sup over t in [t_lo, t_hi] of ||x(t)|| t^exponent."""
    sel = (traj.t >= t_lo) & (traj.t <= t_hi)
    if not sel.any():
        raise InsufficientDataError("no samples in the requested range")
    return float(np.max(traj.norm[sel] * traj.t[sel] ** exponent))


# --------------------------------------------------------------------------
# observability


@dataclass(frozen=True)
class ObservabilityEstimate:
    """Smallest sampled value of the observation functional.

    ``delta_hat`` divides by ``||y||^2`` and ``delta_hat_final`` by
    ``||S(T) y||^2``. Being minima over finitely many samples, both are upper
    bounds on the corresponding infima.
    """

    T: float
    delta_hat: float
    delta_hat_final: float
    n_samples: int
    argmin: np.ndarray
    argmin_final: np.ndarray


def observation_integral(model, y, T: float, n_intervals: int = 2000):
    """Quadrature of int_0^T |<B S(t) y, J(S(t) y)>| dt.

    Composite Simpson with ``n_intervals`` intervals; for exact-shift models
    the trapezoid rule on the grid t = k dx is used instead, which is exact
    there because the integrand is piecewise linear between grid times.
    Returns ``(integral, S(T) y)``.
    """
    y = np.asarray(y, dtype=float)
    q = model.shift_quantum
    if q is not None and abs(T / q - round(T / q)) <= 1e-9 * max(1.0, T / q):
        ts = q * np.arange(int(round(T / q)) + 1)
        Y = model.semigroup_many(y, ts)
        return float(trapezoid(np.abs(model.b_form_many(Y)), x=ts)), Y[-1]
    if n_intervals % 2:
        n_intervals += 1
    ts = np.linspace(0.0, T, n_intervals + 1)
    Y = model.semigroup_many(y, ts)
    return float(simpson(np.abs(model.b_form_many(Y)), x=ts)), Y[-1]


def _observability_samples(model, T, n_random, rng, max_modes=64, mix_modes=16):
    dim = model.dim
    allowed = np.arange(dim)
    if isinstance(model.space, (spaces.GridL1, spaces.GridL2)) and model.shift_quantum:
        # keep samples whose support stays inside the truncated domain up to T
        x_max = model.space.length
        allowed = np.flatnonzero(model.space.cell_midpoints() < x_max - T)
        if allowed.size == 0:
            raise ValidationError("T", "horizon leaves no admissible support")
    picks = allowed
    if picks.size > max_modes:
        picks = allowed[np.linspace(0, allowed.size - 1, max_modes).round().astype(int)]
    out = []
    for i in picks:
        v = np.zeros(dim)
        v[i] = 1.0
        out.append(v)
    mix = picks[:mix_modes]
    for a in range(mix.size):
        for b in range(a + 1, mix.size):
            for sgn in (1.0, -1.0):
                v = np.zeros(dim)
                v[mix[a]], v[mix[b]] = 1.0, sgn
                out.append(v)
    for _ in range(n_random):
        v = np.zeros(dim)
        v[allowed] = rng.standard_normal(allowed.size)
        out.append(v)
    return out


def observability_estimate(model, T: float, n_samples: int = 100, rng_seed: int = 0,
                           n_intervals: Optional[int] = None) -> ObservabilityEstimate:
    """Sample the observation functional over unit vectors.

    The sample set is every coordinate direction (at most 64, evenly spread),
    all equal-weight +/- mixtures of two of the first 16 such directions, and
    ``n_samples`` random directions. Simpson uses ``n_intervals`` intervals
    (400 on grids, 2000 otherwise, by default).
    """
    if not (np.isfinite(T) and T > 0):
        raise ValidationError("T", "must be > 0")
    if int(n_samples) != n_samples or n_samples < 1:
        raise ValidationError("n_samples", "must be an integer >= 1")
    if n_intervals is None:
        n_intervals = 400 if isinstance(model.space, spaces._Grid) else 2000
    rng = np.random.default_rng(rng_seed)
    best = (math.inf, None)
    best_final = (math.inf, None)
    samples = _observability_samples(model, T, int(n_samples), rng)
    for v in samples:
        nv = model.norm(v)
        if nv == 0:
            continue
        y = v / nv
        val, yT = observation_integral(model, y, T, n_intervals)
        if val < best[0]:
            best = (val, y)
        nT = model.norm(yT)
        ratio = val / (nT * nT) if nT > 0 else math.inf
        if ratio < best_final[0]:
            best_final = (ratio, y)
    return ObservabilityEstimate(
        float(T), float(best[0]), float(best_final[0]), len(samples), best[1], best_final[1]
    )


def damped_wave_observation_closed_form(space, y) -> float:
    """int_0^1 ||B S(s) y||^2 ds for the damped wave; equals ||y||^2 / 2."""
    lam = space.eigenvalues
    a, b = np.asarray(y)[0::2], np.asarray(y)[1::2]
    w = np.sqrt(lam)
    # int_0^1 (-a sin ws + b cos ws)^2 ds with w = j pi
    s2 = 0.5 - np.sin(2 * w) / (4 * w)
    c2 = 0.5 + np.sin(2 * w) / (4 * w)
    sc = np.sin(w) ** 2 / (2 * w)
    return float(np.sum(lam * (a * a * s2 + b * b * c2 - 2 * a * b * sc)))


# --------------------------------------------------------------------------
# lemma oracles


@dataclass(frozen=True)
class LemmaVerdict:
    params: dict
    value: float
    passed: bool
    detail: dict = field(default_factory=dict)


def _next_term(s, C, p, tol=1e-14, max_iter=200):
    """Root of r + C r^p = s on (0, s) by bisection."""
    lo, hi = 0.0, s
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid + C * mid**p < s:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * s:
            return 0.5 * (lo + hi)
    raise NumericalError("bisection did not reach tolerance")


def sequence_lemma_oracle(C: float, alpha: float, s0: float, K: int) -> LemmaVerdict:
    """Extremal sequence s_{k+1} + C s_{k+1}^(alpha+2) = s_k, k < K.

    ``value`` is ``sup_k s_k (k+1)^(1/(alpha+1))``; the verdict passes when it
    is finite. ``detail['sequence']`` holds s_0..s_K.
    """
    if not C > 0:
        raise ValidationError("C", "must be > 0")
    if not alpha > -1:
        raise ValidationError("alpha", "must be > -1")
    if not s0 >= 0:
        raise ValidationError("s0", "must be >= 0")
    if int(K) != K or K < 1:
        raise ValidationError("K", "must be an integer >= 1")
    K = int(K)
    p = alpha + 2.0
    s = np.zeros(K + 1)
    s[0] = s0
    if s0 > 0:
        for k in range(K):
            s[k + 1] = _next_term(s[k], C, p)
    weights = np.arange(1, K + 2, dtype=float) ** (1.0 / (alpha + 1.0))
    scaled = s * weights
    sup = float(np.max(scaled))
    return LemmaVerdict(
        {"C": C, "alpha": alpha, "s0": s0, "K": K},
        sup,
        bool(np.isfinite(sup)),
        {"sequence": s, "argmax": int(np.argmax(scaled))},
    )


def parsegov_extinction_time(a: float, b: float, nu: float, V0: float):
    """Extinction time of V' = -a V^(1-nu) - b V^(1+nu) and its uniform bound.

    With W = V^nu the equation becomes W' = -nu (a + b W^2), which integrates
    in closed form.
    """
    if not (a > 0 and b > 0):
        raise ValidationError("a", "a and b must be > 0")
    if not (0 < nu < 0.5):
        raise ValidationError("nu", "must lie in (0, 1/2)")
    if not V0 >= 0:
        raise ValidationError("V0", "must be >= 0")
    r = math.sqrt(a * b)
    t_exact = math.atan(math.sqrt(b / a) * V0**nu) / (nu * r)
    t_bound = math.pi / (2.0 * nu * r)
    return t_exact, t_bound


def parsegov_numeric_time(a: float, b: float, nu: float, V0: float) -> float:
    """Extinction time by quadrature of dt = -dV / (a V^(1-nu) + b V^(1+nu)).

    In the variable s = ln V the integrand e^(nu s) / (a + b e^(2 nu s)) is
    smooth and integrable on (-inf, ln V0].
    """
    if V0 == 0:
        return 0.0
    val, _ = quad(lambda s: math.exp(nu * s) / (a + b * math.exp(2 * nu * s)),
                  -np.inf, math.log(V0), epsabs=0.0, epsrel=1e-10, limit=200)
    return float(val)


# --------------------------------------------------------------------------
# settling-time bounds


def fts_bound(norm0: float, mu: float, beta: float = 1.0) -> float:
    """||x0||^(2 mu) / (2 mu beta^(1-mu))."""
    return norm0 ** (2 * mu) / (2 * mu * beta ** (1 - mu))


def fxts_bound(mu: float, beta: float = 1.0) -> float:
    """Uniform bound pi / (4 mu beta^(1-mu))."""
    return math.pi / (4 * mu * beta ** (1 - mu))


def fxts_parsegov_bound(mu: float, beta: float = 1.0) -> float:
    """Uniform bound from the two-power decay lemma applied to V = ||x||^2.

    On ker(B)^perp, V' <= -2 beta^(1-mu) V^(1-mu) - 2 beta^(1+mu) V^(1+mu).
    """
    return parsegov_extinction_time(2 * beta ** (1 - mu), 2 * beta ** (1 + mu), mu, 0.0)[1]


def prts_bound(mu: float, rho: float, beta: float = 1.0) -> float:
    return fxts_bound(mu, beta) / rho


def noninvariant_bounds(V0: float, mu: float, beta: float = 1.0) -> dict:
    """Candidate settling-time bounds for the law -alpha - V^-mu, V = <Bx, x>.

    ``stated`` and ``constructed`` are the two constants that appear for this
    result; ``derived`` integrates V' <= -2 beta V^(1-mu).
    """
    return {
        "stated": V0**mu / (beta * mu),
        "constructed": V0 ** (mu / 2) / (2 * beta * mu),
        "derived": V0**mu / (2 * beta * mu),
    }


def b_weighted_dissipativity(A, B) -> float:
    """Smallest alpha with <A x, B x> <= alpha <B x, x> (B positive definite)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    w, Q = np.linalg.eigh(B)
    if np.min(w) <= 0:
        raise StructureError("B must be positive definite")
    Bih = Q @ np.diag(w**-0.5) @ Q.T
    S = 0.5 * (B @ A + A.T @ B)
    return float(np.max(np.linalg.eigvalsh(Bih @ S @ Bih)))


# --------------------------------------------------------------------------
# necessary condition for finite-time stability


@dataclass(frozen=True)
class FTSVerdict:
    verdict: str
    kernel_dim: int
    kernel_invariant: bool
    witness: Optional[np.ndarray]
    reason: str

    @property
    def impossible(self) -> bool:
        return self.verdict == "impossible"


IMPOSSIBLE = "impossible"
NO_OBSTRUCTION = "no obstruction found"


def fts_necessary_check(model, tol: float = 1e-10) -> FTSVerdict:
    """Look for an S(t)-invariant ker(B) on which no control can act.

    In finite dimensions the restricted semigroup is a matrix exponential,
    hence injective and never nilpotent, so an invariant nontrivial kernel
    rules out global finite-time stability; the first kernel basis vector is
    returned as witness.
    """
    try:
        A = model.generator_matrix()
    except StructureError:
        raise StructureError(
            f"{model.name}: necessary-condition check needs a finite-dimensional "
            "or spectral model"
        ) from None
    basis = model.kernel_basis()
    k = basis.shape[1]
    if k == 0:
        return FTSVerdict(NO_OBSTRUCTION, 0, True, None, "ker(B) is trivial")
    Qk, _ = np.linalg.qr(basis)
    AK = A @ Qk
    resid = AK - Qk @ (Qk.T @ AK)
    scale = max(1.0, float(np.linalg.norm(A, 2)))
    invariant = float(np.linalg.norm(resid)) <= tol * scale
    if not invariant:
        return FTSVerdict(NO_OBSTRUCTION, k, False, None, "ker(B) is not invariant under A")
    witness = np.array(basis[:, 0], dtype=float)
    return FTSVerdict(
        IMPOSSIBLE, k, True, witness,
        "ker(B) is invariant and the restricted semigroup is injective (not nilpotent)",
    )


# --------------------------------------------------------------------------
# (A2) Lipschitz-type check of the pairing form


@dataclass(frozen=True)
class A2Report:
    constant_name: str
    max_ratio: float
    c_hat: float
    passed: bool
    n_pairs: int


def _a2_constant(model):
    if isinstance(model.space, spaces.GridL1):
        return "2(t+s)", 2.0
    if isinstance(model.space, spaces.GridSup):
        return "||a||_inf (t+s)", model.a_sup
    if model.space.hilbert:
        return "2||B||(t+s)", 2.0 * model.b_norm
    raise StructureError(f"{model.name}: no pairing constant available")


def verify_A2(model, n_samples: int = 500, rng_seed: int = 0) -> A2Report:
    """Empirical check of |F(y) - F(z)| <= K(||y||, ||z||) ||y - z||.

    F is the model's single-valued pairing form (the surrogate ``k ||y||^2``
    for the sup-norm heat model). Half the pairs are independent random
    states, the other half small perturbations of each other.
    """
    name, c = _a2_constant(model)
    rng = np.random.default_rng(rng_seed)
    worst, c_hat = 0.0, 0.0
    for i in range(int(n_samples)):
        y = rng.standard_normal(model.dim) * rng.uniform(0.1, 3.0)
        if i % 2:
            z = y + rng.standard_normal(model.dim) * 10.0 ** rng.uniform(-6, -1)
        else:
            z = rng.standard_normal(model.dim) * rng.uniform(0.1, 3.0)
        ny, nz, nd = model.norm(y), model.norm(z), model.norm(y - z)
        if nd == 0:
            continue
        diff = abs(model.pairing_form(y) - model.pairing_form(z))
        base = (ny + nz) * nd
        c_hat = max(c_hat, diff / base)
        worst = max(worst, diff / (c * base))
    return A2Report(name, worst, c_hat, worst <= 1.0 + 1e-9, int(n_samples))


# --------------------------------------------------------------------------
# trajectory reports


@dataclass(frozen=True)
class WeakReport:
    ratios: np.ndarray

    @property
    def all_decay(self) -> bool:
        return bool(np.all(self.ratios < 1.0))


def weak_report(traj: Trajectory) -> WeakReport:
    """Per functional: max |<x, phi_k>| over the last 10% over that of the first 10%."""
    if traj.obs.shape[1] == 0:
        raise InsufficientDataError("trajectory has no weak observables")
    t0, t1 = traj.t[0], traj.t[-1]
    span = t1 - t0
    first = traj.t <= t0 + 0.1 * span
    last = traj.t >= t1 - 0.1 * span
    num = np.max(np.abs(traj.obs[last]), axis=0)
    den = np.max(np.abs(traj.obs[first]), axis=0)
    ratios = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    return WeakReport(ratios)


@dataclass(frozen=True)
class ContractionReport:
    T: float
    ratios: np.ndarray
    zeta_bar: float

    @property
    def certified(self) -> bool:
        return self.zeta_bar < 1.0

    @property
    def sigma(self) -> float:
        """Rate -ln(zeta) / (4 T) implied by the worst window."""
        if self.zeta_bar <= 0:
            return math.inf
        return -math.log(self.zeta_bar) / (4.0 * self.T)

    @property
    def M(self) -> float:
        return self.zeta_bar ** -0.25 if self.zeta_bar > 0 else math.inf


def contraction_ratio_report(traj: Trajectory, T: float) -> ContractionReport:
    """zeta_j = ||x((j+1)T)|| / ||x(jT)|| for every full window."""
    if not T > 0:
        raise ValidationError("T", "must be > 0")
    horizon = traj.t[-1] - traj.t[0]
    if horizon < 3 * T * (1 - 1e-12):
        raise InsufficientDataError(f"horizon {horizon:g} shorter than 3T = {3 * T:g}")
    n_win = int(math.floor(horizon / T + 1e-9))
    marks = traj.t[0] + T * np.arange(n_win + 1)
    vals = np.interp(marks, traj.t, traj.norm)
    ratios = np.divide(vals[1:], vals[:-1], out=np.zeros(n_win), where=vals[:-1] > 0)
    return ContractionReport(float(T), ratios, float(np.max(ratios)))
