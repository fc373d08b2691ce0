"""Scenario catalog: one configured (model, law, x0, options) per application.

Each scenario declares flat, typed parameters with defaults. ``None`` means
"derived": the builder fills it from the other parameters (horizons sized to
the relevant settling-time bound, the prescribed-time gain, shifts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from . import analysis, feedback, models
from .errors import UnknownScenarioError, ValidationError
from .integrator import SimOptions

SIM_KEYS = ("horizon", "dt_max", "eps_ext", "record_stride", "weak_functionals", "courant_cap")

COMMON = {
    "seed": 0,
    "x0_scale": 1.0,
    "horizon": None,
    "dt_max": 0.01,
    "eps_ext": 1e-12,
    "record_stride": 1,
    "weak_functionals": 5,
    "courant_cap": 0.1,
}


@dataclass(frozen=True)
class Scenario:
    name: str
    summary: str
    defaults: dict
    build: Callable
    evaluate: Callable
    headline: str

    def params(self) -> dict:
        out = dict(COMMON)
        out.update(self.defaults)
        return out


@dataclass
class Setup:
    model: object
    law: object
    x0: np.ndarray
    options: SimOptions
    derived: dict


def _options(p, horizon):
    kw = {k: p[k] for k in SIM_KEYS if k != "horizon"}
    return SimOptions(horizon=float(p["horizon"] if p["horizon"] is not None else horizon), **kw)


def _monotone(traj, n0):
    if traj.t.size < 2 or n0 == 0:
        return 0.0
    return float(max(0.0, np.max(np.diff(traj.norm))) / n0)


def _unit(v, model):
    n = model.norm(v)
    if n == 0:
        raise ValidationError("x0", "initial state is zero")
    return v / n


def _settling_results(traj, bound, extra=None):
    ts = analysis.settling_time(traj)
    out = {
        "settling_time": ts,
        "bound": bound,
        "bound_ok": ts is not None and ts <= bound * (1 + 1e-9),
    }
    if extra:
        out.update(extra)
    return out


# --------------------------------------------------------------------------
# builders


def _scalar_fts(p):
    m = models.build_model(models.FiniteDimCustom([[0.0]], [[1.0]]))
    x0 = np.array([p["x0_scale"]])
    bound = analysis.fts_bound(abs(x0[0]), p["mu"])
    law = feedback.FiniteTime(p["mu"], 0.0)
    return Setup(m, law, x0, _options(p, 1.5 * bound + 0.5), {"bound": bound})


def _scalar_eval(s, traj):
    ts = traj.extinction_time
    res = _settling_results(traj, s.derived["bound"])
    res["relative_error"] = None if ts is None else abs(ts / s.derived["bound"] - 1)
    return res


def _wave_undamped(p):
    n = p["n_modes"]
    m = models.build_model(models.WaveUndamped(n))
    x0 = np.zeros(2 * n)
    j = np.arange(1, min(5, n) + 1)
    x0[2 * (j - 1)] = 1.0 / (j * np.pi)
    law = {"v0": feedback.QuadraticV0(), "zero": feedback.Zero()}.get(p["law"])
    if law is None:
        raise ValidationError("law", "must be 'v0' or 'zero'")
    return Setup(m, law, p["x0_scale"] * x0, _options(p, 500.0), {})


def _wave_undamped_eval(s, traj):
    rep = analysis.weak_report(traj)
    return {"weak_ratios": rep.ratios.tolist(), "all_decay": rep.all_decay,
            "energy_ratio": float(traj.norm[-1] / traj.norm[0])}


def _generic_wave_state(model, seed, scale):
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal(model.dim)
    return scale * _unit(x0, model)


def _wave_damped(p):
    m = models.build_model(models.WaveDamped(p["n_modes"]))
    law = feedback.HomogeneousVr(p["r"])
    x0 = _generic_wave_state(m, p["seed"], p["x0_scale"])
    return Setup(m, law, x0, _options(p, 1000.0), {"expected_exponent": 1.0 / (2.0 - p["r"])})


def _wave_damped_eval(s, traj):
    fit = analysis.fit_decay(traj, "polynomial")
    e = s.derived["expected_exponent"]
    t_hi = float(traj.t[-1])
    return {
        "fitted_exponent": fit.exponent,
        "fit_r2": fit.r2,
        "fit_window": [fit.t_lo, fit.t_hi],
        "expected_exponent": e,
        "bound_form_sup": analysis.bound_form_sup(traj, e, min(10.0, t_hi), t_hi),
    }


def _transport_l1(p):
    m = models.build_model(models.TransportL1(p["n"], p["dx"], p["alpha_cut"]))
    rng = np.random.default_rng(p["seed"])
    x0 = np.zeros(m.dim)
    k = int(round(p["support"] / p["dx"]))
    x0[:k] = rng.uniform(0.0, 1.0, k)
    x0 = p["x0_scale"] * _unit(x0, m)
    law = feedback.NormalizedBanach(p["lam"])
    return Setup(m, law, x0, _options(p, 4 * p["T_window"]), {})


def _transport_l1_eval(s, traj):
    rep = analysis.contraction_ratio_report(traj, s_params(s)["T_window"])
    fit = analysis.fit_decay(traj, "exponential", window=(0.0, traj.t[-1]))
    return {
        "zeta": rep.ratios.tolist(),
        "zeta_bar": rep.zeta_bar,
        "certified": rep.certified,
        "sigma_from_zeta": rep.sigma,
        "fitted_rate": fit.rate,
        "fit_r2": fit.r2,
    }


def _heat_sup(p):
    m = models.build_model(models.HeatNeumannSup(p["n"], k=p["k"]))
    z = m.space.nodes()
    x0 = p["x0_scale"] * (0.5 + np.cos(3 * np.pi * z)) / 1.5
    law = feedback.NormalizedBanach(p["lam"])
    return Setup(m, law, x0, _options(p, 10.0), {})


def _heat_sup_eval(s, traj):
    fit = analysis.fit_decay(traj, "exponential")
    a2 = analysis.verify_A2(s.model, 500, s_params(s)["seed"])
    return {
        "fitted_rate": fit.rate,
        "fit_r2": fit.r2,
        "A2_constant": a2.constant_name,
        "A2_max_ratio": a2.max_ratio,
        "A2_pass": a2.passed,
    }


def _r4_state(p):
    v = np.array([p["x1"], p["x2"], p["x3"], p["x4"]], dtype=float)
    n = np.linalg.norm(v[:3])
    if n == 0:
        raise ValidationError("x1", "the component in span{e1, e2, e3} must be nonzero")
    v[:3] *= p["x0_scale"] / n
    return v


def _r4(kind):
    def build(p):
        m = models.build_model(models.FiniteDimR4())
        x0 = _r4_state(p)
        shift = m.omega0 / m.beta if p["shift"] is None else p["shift"]
        derived = {"shift": shift}
        if kind == "fts":
            law = feedback.FiniteTime(p["mu"], shift)
            bound = analysis.fts_bound(p["x0_scale"], p["mu"], m.beta)
        elif kind == "fxts":
            law = feedback.FixedTime(p["mu"], shift)
            bound = analysis.fxts_bound(p["mu"], m.beta)
            derived["parsegov_bound"] = analysis.fxts_parsegov_bound(p["mu"], m.beta)
        else:
            rho = p["rho"]
            if rho is None:
                rho = feedback.prescribed_rho(p["T_target"], p["mu"], m.beta)
            law = feedback.PrescribedTime(p["mu"], rho, shift)
            bound = analysis.prts_bound(p["mu"], rho, m.beta)
            derived.update(rho=rho)
        derived["bound"] = bound
        return Setup(m, law, x0, _options(p, 1.25 * bound + 0.5), derived)

    return build


def _r4_eval(s, traj):
    extra = {"x4_final": float(s_final(traj)[3])}
    for k in ("rho", "parsegov_bound", "shift"):
        if k in s.derived:
            extra[k] = s.derived[k]
    return _settling_results(traj, s.derived["bound"], extra)


def _heat_projection_model(p):
    w = tuple(float(v) for v in str(p["weights"]).split(","))
    return models.build_model(models.HeatSpectralProjection(p["n_modes"], w))


def _heat_fts(p):
    m = _heat_projection_model(p)
    q = len(str(p["weights"]).split(","))
    rng = np.random.default_rng(p["seed"])
    x0 = np.zeros(m.dim)
    x0[:q] = rng.standard_normal(q)
    x0 = p["x0_scale"] * _unit(x0, m)
    law = feedback.FiniteTime(p["mu"], 0.0)
    bound = analysis.fts_bound(p["x0_scale"], p["mu"], m.beta)
    return Setup(m, law, x0, _options(p, 1.25 * bound + 0.5), {"bound": bound})


def _heat_fts_eval(s, traj):
    v = analysis.fts_necessary_check(s.model)
    return _settling_results(traj, s.derived["bound"], {"beta": s.model.beta,
                                                        "necessary_check": v.verdict})


def _heat_kernel(p):
    m = _heat_projection_model(p)
    j = p["mode"]
    if not 1 <= j <= m.dim:
        raise ValidationError("mode", f"must lie in 1..{m.dim}")
    x0 = p["x0_scale"] * models.mode(m.space, j).coeffs
    law = feedback.FiniteTime(p["mu"], 0.0)
    return Setup(m, law, x0, _options(p, 0.5), {"lambda": float(m.space.eigenvalues[j - 1])})


def _heat_kernel_eval(s, traj):
    lam = s.derived["lambda"]
    exact = traj.norm[0] * np.exp(-lam * traj.t)
    v = analysis.fts_necessary_check(s.model)
    return {
        "settling_time": traj.extinction_time,
        "max_abs_deviation": float(np.max(np.abs(traj.norm - exact))),
        "necessary_check": v.verdict,
        "witness": None if v.witness is None else v.witness.tolist(),
    }


def _transport_fts(p):
    m = models.build_model(models.TransportL2FTS(p["n"], p["dx"], p["a_cut"]))
    rng = np.random.default_rng(p["seed"])
    k = int(round(p["support"] / p["dx"]))
    x0 = np.zeros(m.dim)
    x0[:k] = rng.uniform(-1.0, 1.0, k)
    x0 = p["x0_scale"] * _unit(x0, m)
    tau = p["a_cut"] if p["tau"] is None else p["tau"]
    law = feedback.DelayedSwitch(tau, feedback.FiniteTime(p["mu"], 0.0))
    bound = tau + analysis.fts_bound(p["x0_scale"], p["mu"])
    return Setup(m, law, x0, _options(p, math.ceil(bound + 1.0)), {"bound": bound, "tau": tau})


def _transport_fts_eval(s, traj):
    return _settling_results(traj, s.derived["bound"], {"tau": s.derived["tau"]})


NONINVARIANT_A = [[-1.0, 1.0, 0.0], [-1.0, -1.0, 1.0], [0.0, -1.0, -1.0]]
NONINVARIANT_B = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 3.0]]


def _noninvariant(p):
    m = models.build_model(models.FiniteDimCustom(NONINVARIANT_A, NONINVARIANT_B))
    alpha = p["alpha_shift"]
    if alpha is None:
        alpha = max(0.0, analysis.b_weighted_dissipativity(NONINVARIANT_A, NONINVARIANT_B))
    rng = np.random.default_rng(p["seed"])
    x0 = p["x0_scale"] * _unit(rng.standard_normal(3), m)
    V0 = m.b_form(x0)
    bounds = analysis.noninvariant_bounds(V0, p["mu"], m.beta)
    law = feedback.NonInvariantFT(p["mu"], alpha)
    horizon = 1.25 * max(bounds.values()) + 0.5
    return Setup(m, law, x0, _options(p, horizon), {"alpha_shift": alpha, "V0": V0,
                                                   "bounds": bounds})


def _noninvariant_eval(s, traj):
    ts = traj.extinction_time
    bounds = s.derived["bounds"]
    return {
        "settling_time": ts,
        "V0": s.derived["V0"],
        "alpha_shift": s.derived["alpha_shift"],
        "bounds": bounds,
        "satisfied": {k: ts is not None and ts <= v * (1 + 1e-9) for k, v in bounds.items()},
        "bound": bounds["stated"],
        "bound_ok": ts is not None and ts <= bounds["stated"] * (1 + 1e-9),
    }


def _linear_fts(p):
    m = _heat_projection_model(p)
    q = len(str(p["weights"]).split(","))
    rng = np.random.default_rng(p["seed"])
    x0 = np.zeros(m.dim)
    x0[:q] = rng.standard_normal(q)
    x0 = p["x0_scale"] * _unit(x0, m)
    alpha = math.sqrt(m.beta)
    law = feedback.LinearFT(p["mu"], m.omega0, alpha, bool(p["fixed_time"]))
    if p["fixed_time"]:
        bound = analysis.fxts_bound(p["mu"], alpha**2)
    else:
        bound = analysis.fts_bound(p["x0_scale"], p["mu"], alpha**2)
    return Setup(m, law, x0, _options(p, 1.25 * bound + 0.5), {"bound": bound,
                                                              "alpha_coerc": alpha})


def _linear_fts_eval(s, traj):
    return _settling_results(traj, s.derived["bound"], {"alpha_coerc": s.derived["alpha_coerc"]})


# The evaluators need the resolved parameters; they are attached to the setup.
def s_params(s):
    return s.derived["_params"]


def s_final(traj):
    return traj.final_state.coeffs


_R4_STATE = {"x1": 1.0, "x2": -2.0, "x3": 0.5, "x4": 0.0, "mu": 0.25, "shift": None}

CATALOG: Dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario("scalar_fts", "x' = u x, finite-time feedback", {"mu": 0.25},
                 _scalar_fts, _scalar_eval, "settling_time"),
        Scenario("wave_undamped_weak", "undamped wave, quadratic feedback, weak decay",
                 {"n_modes": 16, "law": "v0", "record_stride": 10},
                 _wave_undamped, _wave_undamped_eval, "all_decay"),
        Scenario("wave_damped_vr", "damped wave with homogeneous feedback v_r",
                 {"n_modes": 16, "r": 0.0, "record_stride": 10},
                 _wave_damped, _wave_damped_eval, "fitted_exponent"),
        Scenario("transport_l1_exp", "transport in L1, normalized feedback",
                 {"n": 1000, "dx": 0.01, "alpha_cut": 0.5, "lam": 0.1, "T_window": 2.0,
                  "support": 2.0},
                 _transport_l1, _transport_l1_eval, "zeta_bar"),
        Scenario("heat_sup_exp", "Neumann heat in the sup norm, normalized feedback",
                 {"n": 51, "k": 1.0, "lam": 0.1},
                 _heat_sup, _heat_sup_eval, "fitted_rate"),
        Scenario("r4_fts", "4x4 example, finite-time feedback", dict(_R4_STATE),
                 _r4("fts"), _r4_eval, "settling_time"),
        Scenario("r4_fxts", "4x4 example, fixed-time feedback", dict(_R4_STATE),
                 _r4("fxts"), _r4_eval, "settling_time"),
        Scenario("r4_prts", "4x4 example, prescribed-time feedback",
                 dict(_R4_STATE, T_target=0.5, rho=None),
                 _r4("prts"), _r4_eval, "settling_time"),
        Scenario("heat_spectral_fts", "Dirichlet heat, finite-rank B, finite-time feedback",
                 {"n_modes": 16, "weights": "2,1,3", "mu": 0.25},
                 _heat_fts, _heat_fts_eval, "settling_time"),
        Scenario("heat_spectral_kernel", "Dirichlet heat started in ker(B)",
                 {"n_modes": 16, "weights": "2,1,3", "mu": 0.25, "mode": 4},
                 _heat_kernel, _heat_kernel_eval, "max_abs_deviation"),
        Scenario("transport_fts_delayed", "transport in L2, delayed finite-time feedback",
                 {"n": 1000, "dx": 0.01, "a_cut": 1.0, "mu": 0.25, "tau": None,
                  "support": 2.0},
                 _transport_fts, _transport_fts_eval, "settling_time"),
        Scenario("noninvariant_ft", "finite-time feedback with V = <Bx, x>",
                 {"mu": 0.25, "alpha_shift": None},
                 _noninvariant, _noninvariant_eval, "settling_time"),
        Scenario("linear_fts", "linear control v through B = L L*",
                 {"n_modes": 16, "weights": "2,1,3", "mu": 0.25, "fixed_time": False},
                 _linear_fts, _linear_fts_eval, "settling_time"),
    ]
}

ALIASES = {"wave_damped": "wave_damped_vr"}


def get_scenario(name: str) -> Scenario:
    key = ALIASES.get(name, name)
    if key not in CATALOG:
        raise UnknownScenarioError(name, CATALOG)
    return CATALOG[key]


def _coerce(key, default, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        if default is None:
            if text.lower() in ("", "none", "auto"):
                return None
            return float(text)
        if isinstance(default, int):
            f = float(text)
            if f != int(f):
                raise ValueError
            return int(f)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise ValidationError(key, f"cannot parse {raw!r}") from None
    return text


def resolve_params(scenario: Scenario, overrides: dict) -> dict:
    """Defaults updated by ``overrides``; unknown keys are errors."""
    p = scenario.params()
    for key, raw in overrides.items():
        k = "lam" if key in ("lambda", "λ") else key
        if k not in p:
            raise ValidationError(
                key, f"unknown parameter for {scenario.name}; known: {', '.join(sorted(p))}"
            )
        p[k] = _coerce(k, p[k], raw)
    return p


def build(scenario: Scenario, params: dict) -> Setup:
    setup = scenario.build(params)
    setup.derived["_params"] = params
    return setup


def evaluate(scenario: Scenario, setup: Setup, traj) -> dict:
    res = scenario.evaluate(setup, traj)
    res["max_step_increase"] = _monotone(traj, float(traj.norm[0]))
    return res
