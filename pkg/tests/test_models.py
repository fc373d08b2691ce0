import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilinstab import models, spaces
from bilinstab.errors import DomainError, StructureError, ValidationError
from bilinstab.models import (
    FiniteDimCustom,
    FiniteDimR4,
    HeatDirichletSpectral,
    HeatNeumannSup,
    HeatSpectralProjection,
    TransportL1,
    TransportL2FTS,
    WaveDamped,
    WaveUndamped,
    apply_B,
    b_form,
    build_model,
    kernel_b_projection,
    semigroup_apply,
)

CATALOG = {
    "heat": HeatDirichletSpectral(8),
    "wave_undamped": WaveUndamped(6),
    "wave_damped": WaveDamped(6),
    "transport_l1": TransportL1(200, 0.05, 0.5),
    "heat_sup": HeatNeumannSup(21),
    "transport_l2": TransportL2FTS(200, 0.05, 1.0),
    "heat_projection": HeatSpectralProjection(8, (2.0, 1.0, 3.0)),
    "r4": FiniteDimR4(),
    "custom": FiniteDimCustom([[0.0, 1.0], [-1.0, -0.5]], [[1.0, 0.0], [0.0, 0.0]]),
}


@pytest.fixture(params=sorted(CATALOG), ids=sorted(CATALOG))
def model(request):
    return build_model(CATALOG[request.param])


def test_projection_beta():
    assert build_model(HeatSpectralProjection(8, (2.0, 1.0, 3.0))).beta == 1.0


@pytest.mark.parametrize(
    "spec, field",
    [
        (HeatSpectralProjection(8, (-1.0,)), "weights"),
        (HeatSpectralProjection(2, (1.0, 1.0, 1.0)), "weights"),
        (HeatSpectralProjection(0, (1.0,)), "n_modes"),
        (HeatDirichletSpectral(3, (1.0, -1.0, 0.0)), "multiplier"),
        (TransportL1(100, 0.01, 1.5), "alpha_cut"),
        (TransportL1(100, 0.01, 0.505), "alpha_cut"),
        (TransportL2FTS(100, 0.01, 0.0), "a_cut"),
        (TransportL1(100, -0.01, 0.5), "dx"),
        (HeatNeumannSup(11, k=0.0), "k"),
        (HeatNeumannSup(11, k=2.0), "k"),
        (HeatNeumannSup(11, a=np.zeros(11)), "a"),
        (FiniteDimCustom([[0.0, 1.0]], [[1.0]]), "A"),
        (FiniteDimCustom([[0.0]], [[-1.0]]), "B"),
        (FiniteDimCustom([[0.0, 0.0], [0.0, 0.0]], [[1.0, 1.0], [0.0, 1.0]]), "B"),
    ],
)
def test_validation_names_field(spec, field):
    with pytest.raises(ValidationError) as info:
        build_model(spec)
    assert info.value.field == field


def test_r4_constants():
    m = build_model(FiniteDimR4())
    assert m.omega0 == pytest.approx(math.sqrt(2.0))
    assert m.beta == 1.0
    np.testing.assert_array_equal(m.generator_matrix(), models.R4_A)


def test_custom_default_omega0():
    m = build_model(FiniteDimCustom([[1.0, 0.0], [0.0, -2.0]], np.eye(2)))
    assert m.omega0 == 1.0


def test_heat_mode_decay():
    m = build_model(HeatDirichletSpectral(4))
    v = semigroup_apply(m, models.mode(m.space, 1), 0.1)
    assert v.coeffs[0] == pytest.approx(math.exp(-np.pi**2 * 0.1), rel=1e-14)


def test_transport_shift_of_indicator():
    m = build_model(TransportL1(400, 0.01, 0.5))
    v = np.zeros(400)
    v[:100] = 1.0
    out = semigroup_apply(m, v, 0.5).coeffs
    want = np.zeros(400)
    want[50:150] = 1.0
    np.testing.assert_array_equal(out, want)


def test_wave_modal_rotation():
    m = build_model(WaveUndamped(2))
    t = 0.3
    out = semigroup_apply(m, [1.0, 0.0, 0.0, 0.0], t).coeffs
    assert out[0] == pytest.approx(math.cos(np.pi * t))
    assert out[1] == pytest.approx(-math.sin(np.pi * t))


def test_negative_time_rejected(model):
    with pytest.raises(DomainError):
        semigroup_apply(model, np.ones(model.dim), -0.1)


def test_zero_time_identity(model):
    v = np.random.default_rng(0).standard_normal(model.dim)
    np.testing.assert_array_equal(semigroup_apply(model, v, 0.0).coeffs, v)


def test_semigroup_law(model):
    rng = np.random.default_rng(2)
    q = model.shift_quantum or 0.01
    for _ in range(5):
        v = rng.standard_normal(model.dim)
        s, t = q * rng.integers(1, 6), q * rng.integers(1, 6)
        lhs = semigroup_apply(model, semigroup_apply(model, v, s), t).coeffs
        rhs = semigroup_apply(model, v, s + t).coeffs
        scale = max(1.0, float(np.max(np.abs(rhs))))
        assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale * 10


def test_contraction(model):
    rng = np.random.default_rng(3)
    for _ in range(20):
        v = rng.standard_normal(model.dim)
        t = rng.uniform(0, 0.5)
        if model.shift_quantum:
            t = model.shift_quantum * rng.integers(0, 20)
        n_t = model.norm(semigroup_apply(model, v, t).coeffs)
        assert n_t <= math.exp(model.omega0 * t) * model.norm(v) * (1 + 1e-12)


def test_transport_isometry_before_boundary():
    m = build_model(TransportL1(400, 0.01, 0.5))
    v = np.zeros(400)
    v[:100] = np.random.default_rng(4).standard_normal(100)
    for k in (1, 50, 300):
        assert m.norm(m.semigroup(v, k * 0.01)) == pytest.approx(m.norm(v), rel=1e-14)
    assert m.norm(m.semigroup(v, 3.5)) < m.norm(v)


def test_wave_isometry():
    m = build_model(WaveUndamped(8))
    v = np.random.default_rng(5).standard_normal(16)
    for t in (0.1, 1.7, 33.0):
        assert m.norm(m.semigroup(v, t)) == pytest.approx(m.norm(v), rel=1e-13)


def test_apply_b_examples():
    wd = build_model(WaveDamped(2))
    np.testing.assert_array_equal(apply_B(wd, [1.0, 2.0, 3.0, 4.0]).coeffs, [0, 2.0, 0, 4.0])
    hp = build_model(HeatSpectralProjection(4, (2.0,)))
    np.testing.assert_array_equal(apply_B(hp, [1.0, 0, 0, 0]).coeffs, [2.0, 0, 0, 0])
    tr = build_model(TransportL2FTS(200, 0.01, 1.0))
    v = np.zeros(200)
    v[:100] = 1.0
    assert not np.any(apply_B(tr, v).coeffs)


def test_wave_undamped_b_maps_velocity_to_displacement():
    m = build_model(WaveUndamped(3))
    # y = phi_2 (alpha_2 = 1): B(y, w) = (0, y), velocity phi_2 has beta_2 = 1/sqrt(lambda_2)
    out = m.apply_b(np.array([0, 0, 1.0, 0, 0, 0]))
    np.testing.assert_allclose(out, [0, 0, 0, 1 / (2 * np.pi), 0, 0])


def test_b_form_examples():
    wd = build_model(WaveDamped(3))
    v = np.array([1.0, 0.5, -2.0, 0.1, 0.3, 0.0])
    lam = wd.space.eigenvalues
    assert b_form(wd, v) == pytest.approx(np.sum(lam * v[1::2] ** 2))
    tr = build_model(TransportL1(100, 0.01, 0.5))
    u = np.ones(100)  # unit mass, half beyond 0.5
    assert b_form(tr, u) == pytest.approx(0.5, rel=1e-14)
    sup = build_model(HeatNeumannSup(11, a=np.full(11, 2.0)))
    w = np.random.default_rng(6).standard_normal(11)
    assert b_form(sup, w) == pytest.approx(2.0 * np.max(np.abs(w)) ** 2)


def test_b_form_nonnegative(model):
    rng = np.random.default_rng(7)
    assert b_form(model, np.zeros(model.dim)) == 0.0
    if isinstance(model.spec, WaveUndamped):
        pytest.skip("B is not positive for the undamped wave coupling")
    for _ in range(50):
        assert b_form(model, rng.standard_normal(model.dim)) >= 0.0


def test_kernel_projection_examples():
    hp = build_model(HeatSpectralProjection(4, (1.0, 1.0)))
    ker, perp = kernel_b_projection(hp, [1.0, 0.0, 1.0, 0.0])
    np.testing.assert_array_equal(ker.coeffs, [0, 0, 1.0, 0])
    np.testing.assert_array_equal(perp.coeffs, [1.0, 0, 0, 0])
    r4 = build_model(FiniteDimR4())
    ker, perp = kernel_b_projection(r4, np.ones(4))
    np.testing.assert_array_equal(ker.coeffs, [0, 0, 0, 1.0])
    np.testing.assert_array_equal(perp.coeffs, [1.0, 1.0, 1.0, 0])
    eye = build_model(FiniteDimCustom(np.zeros((3, 3)), np.eye(3)))
    ker, _ = kernel_b_projection(eye, [1.0, 2.0, 3.0])
    assert not np.any(ker.coeffs)


def test_kernel_projection_nondiagonal_b():
    B = np.array([[1.0, 1.0], [1.0, 1.0]])
    m = build_model(FiniteDimCustom(np.zeros((2, 2)), B))
    ker, perp = kernel_b_projection(m, [1.0, 0.0])
    np.testing.assert_allclose(ker.coeffs, [0.5, -0.5], atol=1e-15)
    np.testing.assert_allclose(B @ ker.coeffs, 0, atol=1e-15)
    assert abs(ker.coeffs @ perp.coeffs) < 1e-15


def test_kernel_projection_rejected_for_banach():
    for spec in (TransportL1(100, 0.01, 0.5), HeatNeumannSup(11)):
        with pytest.raises(StructureError):
            kernel_b_projection(build_model(spec), np.ones(build_model(spec).dim))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=8, max_size=8))
def test_kernel_projection_properties(vals):
    m = build_model(HeatSpectralProjection(8, (2.0, 1.0, 3.0)))
    v = np.array(vals)
    ker, perp = kernel_b_projection(m, v)
    np.testing.assert_allclose(ker.coeffs + perp.coeffs, v, atol=1e-12)
    assert not np.any(m.apply_b(ker.coeffs))
    assert abs(ker.coeffs @ perp.coeffs) <= 1e-12
    ker2, _ = kernel_b_projection(m, ker)
    np.testing.assert_array_equal(ker2.coeffs, ker.coeffs)


@pytest.mark.parametrize("spec", [HeatSpectralProjection(8, (2.0, 1.0, 3.0)),
                                  TransportL2FTS(200, 0.01, 1.0)])
def test_kernel_perp_invariant(spec):
    m = build_model(spec)
    rng = np.random.default_rng(8)
    for _ in range(10):
        _, perp = m.kernel_split(rng.standard_normal(m.dim))
        out = m.semigroup(perp, 0.01 * rng.integers(1, 30))
        ker_out, _ = m.kernel_split(out)
        assert np.max(np.abs(ker_out)) <= 1e-14


def test_r4_quasi_dissipative():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        v = rng.standard_normal(4)
        assert v @ models.R4_A @ v <= math.sqrt(2.0) * (v @ v) * (1 + 1e-12)


def test_sup_heat_semigroup_is_sup_contraction():
    m = build_model(HeatNeumannSup(31))
    E = m.semigroup(np.eye(31), 0.05)
    assert np.min(E) >= -1e-14
    np.testing.assert_allclose(E.sum(axis=1), 1.0, atol=1e-12)


def test_sup_heat_surrogate_pairing():
    m = build_model(HeatNeumannSup(21))
    assert m.k == 1.0
    v = np.random.default_rng(10).standard_normal(21)
    assert m.pairing_form(v) == pytest.approx(np.max(np.abs(v)) ** 2)
    assert m.b_form(v) >= m.pairing_form(v)


def test_sup_heat_callable_profile():
    m = build_model(HeatNeumannSup(11, a=lambda z: 2.0 + 0 * z))
    assert m.k == 2.0 and m.a_sup == 2.0


def test_b_flow_and_limit(model):
    v = np.random.default_rng(11).standard_normal(model.dim)
    np.testing.assert_allclose(model.b_flow(0.0, v), v)
    if isinstance(model.spec, WaveUndamped):
        with pytest.raises(StructureError):
            model.b_flow_limit(v)
        return
    lim = model.b_flow_limit(v)
    far = model.b_flow(-200.0, v)
    np.testing.assert_allclose(far, lim, atol=1e-12 * max(1.0, np.max(np.abs(v))))


def test_l_star_factorises_b():
    m = build_model(HeatSpectralProjection(6, (2.0, 1.0, 3.0)))
    v = np.random.default_rng(12).standard_normal(6)
    Ls = m.l_star(v)
    assert Ls @ Ls == pytest.approx(m.b_form(v))
    mc = build_model(FiniteDimCustom(np.zeros((2, 2)), [[2.0, 1.0], [1.0, 2.0]]))
    w = np.array([0.3, -1.2])
    assert mc.l_star(w) @ mc.l_star(w) == pytest.approx(mc.b_form(w))


def test_mode_helper():
    sp = spaces.EnergyWave.dirichlet(3)
    assert models.mode(sp, 2, "beta").coeffs[3] == 1.0
    assert models.mode(spaces.SpectralL2.dirichlet(3), 3).coeffs[2] == 1.0


def test_structure_mismatch():
    m = build_model(FiniteDimR4())
    with pytest.raises(StructureError):
        apply_B(m, np.ones(3))


def test_batched_semigroup_matches_single(model):
    v = np.random.default_rng(13).standard_normal(model.dim)
    q = model.shift_quantum or 0.01
    ts = q * np.arange(6)
    Y = model.semigroup_many(v, ts)
    for i, t in enumerate(ts):
        want = model.semigroup(v, t) if t > 0 else v
        np.testing.assert_allclose(Y[i], want, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(model.b_form_many(Y), [model.b_form(y) for y in Y], rtol=1e-12)
