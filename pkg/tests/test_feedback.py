import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinstab import feedback as fb
from bilinstab.errors import ValidationError
from bilinstab.models import FiniteDimCustom, FiniteDimR4, HeatSpectralProjection, WaveDamped, build_model

R4 = build_model(FiniteDimR4())
WAVE = build_model(WaveDamped(6))
PROJ = build_model(HeatSpectralProjection(8, (2.0, 1.0, 3.0)))

LAWS = [
    fb.Zero(),
    fb.QuadraticV0(),
    fb.HomogeneousVr(-1.0),
    fb.HomogeneousVr(1.0),
    fb.NormalizedBanach(0.3),
    fb.FiniteTime(0.25, 1.0),
    fb.FixedTime(0.3, 0.0),
    fb.PrescribedTime(0.2, 2.5, 0.5),
    fb.NonInvariantFT(0.25, 0.7),
    fb.LinearFT(0.25, 1.4, 1.0, True),
    fb.DelayedSwitch(1.0, fb.FiniteTime(0.25, 0.0)),
]


def test_quadratic_example():
    assert fb.QuadraticV0().gain(1.0, 0.5) == -0.5


def test_finite_time_example():
    assert fb.FiniteTime(0.25, 0.0).gain(1.0, 16.0) == pytest.approx(-0.5, rel=1e-15)


def test_fixed_time_example():
    assert fb.FixedTime(0.25, 0.0).gain(1.0, 16.0) == pytest.approx(-2.5, rel=1e-15)


@pytest.mark.parametrize("law", LAWS, ids=lambda l: type(l).__name__)
@pytest.mark.parametrize("model", [R4, WAVE, PROJ], ids=["r4", "wave", "proj"])
def test_zero_state_gives_zero(law, model):
    u = fb.control_value(law, model, np.zeros(model.dim), t=2.0)
    assert np.all(np.asarray(u) == 0.0)


def test_noninvariant_zero_on_kernel():
    x = np.array([0.0, 0.0, 0.0, 1.0])  # B e4 = 0 for the R4 model
    assert fb.control_value(fb.NonInvariantFT(0.25, 0.0), R4, x) == 0.0
    assert fb.control_value(fb.NonInvariantFT(0.25, 0.5), R4, x) == -0.5


def test_vr_zero_equals_v0():
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.standard_normal(WAVE.dim)
        a = fb.control_value(fb.HomogeneousVr(0.0), WAVE, x)
        b = fb.control_value(fb.QuadraticV0(), WAVE, x)
        assert a == pytest.approx(b, rel=1e-15)


@settings(max_examples=80, deadline=None)
@given(
    r=st.floats(-3.0, 1.9),
    c=st.floats(1e-3, 1e3),
    seed=st.integers(0, 2**32 - 1),
)
def test_vr_homogeneity(r, c, seed):
    x = np.random.default_rng(seed).standard_normal(WAVE.dim)
    law = fb.HomogeneousVr(r)
    u1 = fb.control_value(law, WAVE, x)
    uc = fb.control_value(law, WAVE, c * x)
    assert uc == pytest.approx(c ** (2 - r) * u1, rel=1e-10)


@settings(max_examples=80, deadline=None)
@given(lam=st.floats(1e-3, 10), c=st.floats(1e-6, 1e6), seed=st.integers(0, 2**32 - 1))
def test_normalized_banach_bounded_and_scale_free(lam, c, seed):
    x = np.random.default_rng(seed).standard_normal(PROJ.dim)
    law = fb.NormalizedBanach(lam)
    u = fb.control_value(law, PROJ, x)
    assert abs(u) <= lam * PROJ.b_norm * (1 + 1e-12)
    assert fb.control_value(law, PROJ, c * x) == pytest.approx(u, rel=1e-10)


def test_finite_time_blows_up_near_origin():
    law = fb.FiniteTime(0.25, 0.0)
    x = np.array([1.0, 0.5, -0.3, 0.0])
    vals = []
    for k in range(8):
        xk = x * 10.0 ** (-k)
        V = R4.b_form(xk)
        u = fb.control_value(law, R4, xk)
        assert u == pytest.approx(-V ** -0.25, rel=1e-14)
        vals.append(-u)
    assert all(b > a for a, b in zip(vals, vals[1:]))


@settings(max_examples=80, deadline=None)
@given(mu=st.floats(0.01, 0.49), shift=st.floats(0, 5), V=st.floats(1e-12, 1e12), n=st.floats(1e-6, 1e6))
def test_prescribed_rho_one_is_fixed_time(mu, shift, V, n):
    a = fb.PrescribedTime(mu, 1.0, shift).gain(n, V)
    b = fb.FixedTime(mu, shift).gain(n, V)
    assert a == b


@pytest.mark.parametrize("law", LAWS, ids=lambda l: type(l).__name__)
def test_singular_part_dissipative(law):
    # u * <Bx, x> never exceeds the shift contribution
    sp = law.singular_part(5.0)
    shift = sp.shift if sp is not None else 0.0
    rng = np.random.default_rng(1)
    for model in (R4, WAVE, PROJ):
        for _ in range(50):
            x = rng.standard_normal(model.dim) * 10 ** rng.uniform(-4, 4)
            V = model.b_form(x)
            u = law.gain(model.norm(x), V, 5.0)
            assert u * V <= -shift * V * (1 - 1e-12) + 1e-300


def test_delayed_switch():
    law = fb.DelayedSwitch(1.0, fb.FiniteTime(0.25, 0.0))
    assert law.gain(1.0, 16.0, t=0.5) == 0.0
    assert law.gain(1.0, 16.0, t=1.0) == 0.0
    assert law.gain(1.0, 16.0, t=1.5) == pytest.approx(-0.5)
    assert law.singular_part(0.5) is None
    assert law.switch_times() == (1.0,)
    assert fb.is_fts_family(law)
    assert not fb.is_fts_family(fb.DelayedSwitch(1.0, fb.Zero()))


def test_linear_ft_vector_control():
    m = build_model(FiniteDimCustom(np.zeros((2, 2)), [[4.0, 0.0], [0.0, 1.0]]))
    law = fb.LinearFT(0.25, omega0=2.0, alpha_coerc=1.0)
    x = np.array([1.0, 0.0])
    v = fb.control_value(law, m, x)
    Ls = m.l_star(x)
    np.testing.assert_allclose(Ls, [2.0, 0.0])
    want = -2.0 * Ls - np.linalg.norm(Ls) ** (-0.5) * Ls
    np.testing.assert_allclose(v, want, rtol=1e-14)


def test_prescribed_rho_formula():
    assert fb.prescribed_rho(0.5, 0.25) == pytest.approx(2 * math.pi)
    assert fb.prescribed_rho(1.0, 0.25, beta=16.0) == pytest.approx(math.pi / 8.0)


@pytest.mark.parametrize(
    "ctor, field",
    [
        (lambda: fb.FiniteTime(0.5, 0.0), "mu"),
        (lambda: fb.FixedTime(0.0, 0.0), "mu"),
        (lambda: fb.FiniteTime(0.25, -1.0), "shift"),
        (lambda: fb.PrescribedTime(0.25, 0.0), "rho"),
        (lambda: fb.HomogeneousVr(2.0), "r"),
        (lambda: fb.NormalizedBanach(0.0), "lam"),
        (lambda: fb.DelayedSwitch(-1.0, fb.Zero()), "tau"),
        (lambda: fb.DelayedSwitch(1.0, "x"), "inner"),
        (lambda: fb.LinearFT(0.25, 0.0, 0.0), "alpha_coerc"),
        (lambda: fb.NonInvariantFT(0.25, float("nan")), "alpha_shift"),
        (lambda: fb.prescribed_rho(0.0, 0.25), "T_target"),
    ],
)
def test_validation(ctor, field):
    with pytest.raises(ValidationError) as info:
        ctor()
    assert info.value.field == field


def test_echo_nested():
    e = fb.DelayedSwitch(2.0, fb.FixedTime(0.2, 0.1)).echo()
    assert e == {"law": "DelayedSwitch", "tau": 2.0,
                 "inner": {"law": "FixedTime", "mu": 0.2, "shift": 0.1}}
