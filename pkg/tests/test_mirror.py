import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ablowitz_ladik.algebra import SIGMA3, det2, inv2
from ablowitz_ladik.boundary import k_minus, tau
from ablowitz_ladik.dynamics import ExtrinsicState, branch_of, rhs_open_extrinsic, to_extrinsic
from ablowitz_ladik.errors import ConstraintViolationError, IllConditionedError, PoleError
from ablowitz_ladik.lax import omega
from ablowitz_ladik.mirror import backlund, soliton
from ablowitz_ladik.mirror.backlund import (
    LineFields,
    asymptotic_matrix,
    backlund_seeds,
    determinant_spread,
    fold,
    folded_lax_residual,
    recursion_residual,
    run_backlund,
    step_backward,
    step_forward,
    symmetry_residual,
    tail_window,
    time_relation_residual,
)
from ablowitz_ladik.mirror.gauge import (
    K_minus_conjugated,
    K_minus_td,
    extrinsic_A0,
    extrinsic_zero_curvature_residual,
    gauge_consistency_residual,
    gauge_G,
    time_dependent_boundary_residual,
)
from ablowitz_ladik.mirror.scattering import (
    DiscreteData,
    F_infinity,
    f1_infinity_roots,
    f1_quartic,
    octet_expand,
    phi,
    robin_f,
    s11,
    s11_prime,
    s22,
)
from ablowitz_ladik.mirror.soliton import (
    bulk_residual,
    certify_root,
    closure_residual_series,
    soliton_field,
    soliton_solution,
    verify_boundary,
)
from ablowitz_ladik.model import BoundaryParams, LatticeState, ModelParams
from ablowitz_ladik.verify import backlund_chain, reference_data, reference_model

from conftest import boundaries, fields, models, small_complex, spectral
from oracles import robin_f_closed, soliton_mp

ZETA, D1 = 0.6 + 1.9j, 0.1
TWO_ZETAS = [ZETA, -1.2 + 0.8j]


@pytest.fixture(scope="module")
def ref():
    p, bp = reference_model()
    dd = reference_data()
    return p, dd, octet_expand(dd, p)


# ---------------------------------------------------------------- gauge


def test_gauge_robin_is_identity():
    assert np.allclose(gauge_G(0.3 + 0.1j, -0.2, BoundaryParams(1.4, 0.5, 0, 0), 1.1 + 0.5j), np.eye(2))


def test_gauge_zero_fields():
    a, c, d, z = 1.2, 0.4 - 0.1j, 0.3 + 0.2j, 0.9 + 0.4j
    expect = np.array([[a, c / z], [-d * z, a]]) / np.sqrt(a * a + c * d)
    assert np.allclose(gauge_G(0, 0, BoundaryParams(a, 0.1, c, d), z), expect)


@given(boundaries, small_complex, small_complex, spectral)
def test_gauge_unit_determinant(bp, q0, r0, z):
    assert abs(det2(gauge_G(q0, r0, bp, z)) - 1) < 1e-12


@given(models, spectral, small_complex, small_complex)
def test_K_minus_td_robin(p, z, Q0, R0):
    bp = BoundaryParams(1.1, 0.3 - 0.2j, 0, 0)
    assert np.allclose(K_minus_td(Q0, R0, z, bp, p), k_minus(z, bp, p), atol=1e-14)


@given(models, boundaries, fields(2, 4), spectral)
def test_K_minus_td_equals_conjugated(p, bp, qr, z):
    s = LatticeState(qr[0], qr[1])
    e = to_extrinsic(s, bp.with_branch(branch_of(s, bp)))
    diff = K_minus_td(e.Q[0], e.R[0], z, e.bp, p) - K_minus_conjugated(s.q[0], s.r[0], z, bp, p)
    assert np.max(np.abs(diff)) < 1e-10


@given(models, boundaries, spectral)
def test_extrinsic_A0_zero_fields(p, bp, z):
    e = ExtrinsicState(np.zeros(3), np.zeros(3), bp)
    assert np.allclose(extrinsic_A0(e, z, p), 1j * omega(z, p) * SIGMA3, atol=1e-14)


@given(models, boundaries, fields(2, 5), spectral)
def test_extrinsic_zero_curvature(p, bp, qr, z):
    e = ExtrinsicState(qr[0], qr[1], bp)
    Qd, Rd = rhs_open_extrinsic(e, p)
    assert extrinsic_zero_curvature_residual(e, z, p, Qd, Rd) < 1e-10


@settings(max_examples=8)
@given(models, boundaries, fields(3, 4), spectral)
def test_time_dependent_boundary_relation(p, bp, qr, z):
    e = ExtrinsicState(qr[0], qr[1], bp)
    assert time_dependent_boundary_residual(e, z, p) < 1e-6


@settings(max_examples=8)
@given(models, boundaries, fields(3, 4), spectral)
def test_gauge_consistency(p, bp, qr, z):
    s = LatticeState(qr[0], qr[1])
    assert gauge_consistency_residual(s, z, bp, p) < 1e-8


# ---------------------------------------------------------------- f1inf and phi


def test_f1_roots_robin(dnls):
    a, b = 1.3, -0.4
    vals = sorted(r.value.real for r in f1_infinity_roots(BoundaryParams(a, b, 0, 0), dnls))
    assert np.allclose(vals, sorted([0, 0, 0, 0, a, -a, 2 * b, -2 * b]), atol=1e-15)


def test_f1_roots_reference(ref):
    p, dd, _ = ref
    roots = f1_infinity_roots(dd.bp, p)
    assert roots[0].value == pytest.approx((1 + np.sqrt(5.84)) / 2, abs=1e-14)
    assert roots[0].factor == "a-"
    assert abs(f1_quartic(roots[0].value, dd.bp, p)) < 1e-12


@given(models, boundaries)
def test_f1_roots_solve_quartic(p, bp):
    for r in f1_infinity_roots(bp, p):
        assert abs(f1_quartic(r.value, bp, p)) < 1e-10


def test_f1_roots_dnls_reduced_form(ref):
    p, dd, _ = ref
    a, b, d2 = 1.0, -1.7, 1.1**2
    for r in f1_infinity_roots(dd.bp, p):
        f = r.value
        assert abs(((f * f - d2) ** 2 - a * a * f * f) * ((f * f - d2) ** 2 - 4 * b * b * f * f)) < 1e-10


@given(models, spectral)
def test_phi_robin(p, z):
    a, b = 1.2 - 0.1j, 0.4 + 0.2j
    assert abs(phi(z, a, BoundaryParams(a, b, 0, 0), p) - (a * z + b / (p.alpha * z))) < 1e-13


def test_phi_degenerate(dnls):
    with pytest.raises(ConstraintViolationError):
        phi(1.0, 0.5, BoundaryParams(1, 0, 0.5, 0.5), dnls)


@given(spectral)
def test_det_B_infinity(z):
    p, bp = reference_model()
    f1 = reference_data().f1inf
    lhs = det2(asymptotic_matrix(z, f1, bp, p))
    assert abs(lhs - det2(K_minus_td(0, 0, z, bp, p))) < 1e-10 * abs(lhs)


@given(spectral, st.floats(0.3, 2.0))
def test_robin_f_limit(z, chi):
    p = ModelParams.dnls()
    bp = BoundaryParams(-1.0, 1 / (2 * chi), 0, 0)
    for r in f1_infinity_roots(bp, p):
        if abs(r.value) < 1e-12:
            continue
        assume(abs(z * z - chi * r.value**2) > 1e-3)
        assert abs(robin_f(z, r.value, bp, p) - robin_f_closed(z, r.value, chi)) < 1e-12 * max(
            1, abs(robin_f_closed(z, r.value, chi)))


# ---------------------------------------------------------------- folding


def test_fold_delta(dnls):
    g = fold(LineFields(np.array([1.0 + 0j]), np.array([-1.0 + 0j]), 0), dnls)
    assert g.j0 == -1 and g.qa(-1) == -1 and g.qa(0) == 0


@given(st.lists(small_complex, min_size=5, max_size=5), st.integers(-4, 4))
def test_fold_involution(vals, j0):
    p = ModelParams.dnls()
    q = np.array(vals)
    f = LineFields(q, -np.conj(q), j0)
    g = fold(fold(f, p), p)
    assert g.j0 == j0 and np.allclose(g.q, f.q) and np.allclose(g.r, f.r)


@given(models, fields(5, 5), spectral)
def test_folded_lax_symmetry(p, qr, z):
    f = LineFields(np.array(qr[0]), np.array(qr[1]), -2)
    for j in range(-3, 3):
        assert folded_lax_residual(f, j, z, p) < 1e-12


# ---------------------------------------------------------------- scattering data


@given(st.floats(0, 2 * np.pi))
def test_s11_unit_determinant_on_circle(theta):
    u = np.exp(1j * theta)
    assert abs(s11(u, TWO_ZETAS) * s22(u, TWO_ZETAS) - 1) < 1e-12


@given(spectral)
def test_s11_inverse_symmetry(z):
    assert abs(s11(1 / z, TWO_ZETAS) - s22(z, TWO_ZETAS)) < 1e-12 * max(1, abs(s22(z, TWO_ZETAS)))
    assert abs(s11(-z, TWO_ZETAS) - s11(z, TWO_ZETAS)) < 1e-13 * max(1, abs(s11(z, TWO_ZETAS)))


def test_s11_at_infinity():
    assert s11(1e6, TWO_ZETAS) == pytest.approx(1 / F_infinity(TWO_ZETAS), rel=1e-10)
    assert F_infinity([ZETA]) == pytest.approx(abs(ZETA) ** 4)


def test_s11_zeros_and_pole():
    assert abs(s11(ZETA, [ZETA])) < 1e-14
    with pytest.raises(PoleError):
        s11(1 / np.conj(ZETA), [ZETA])


@given(spectral)
def test_s11_prime_matches_difference(z):
    h = 1e-5
    fd = (s11(z + h, TWO_ZETAS) - s11(z - h, TWO_ZETAS)) / (2 * h)
    assert abs(s11_prime(z, TWO_ZETAS) - fd) < 1e-7 * max(1, abs(fd))


def test_octet_single_soliton(ref):
    p, dd, oct = ref
    assert np.allclose(oct.z, [ZETA, np.conj(ZETA)])
    assert np.allclose(oct.zbar, [1 / ZETA, 1 / np.conj(ZETA)])
    assert oct.C[0] == D1
    assert oct.Cbar[1] == pytest.approx(np.conj(D1) / np.conj(ZETA) ** 2)


def test_octet_product_and_conjugation(ref):
    p, dd, _ = ref
    d2 = DiscreteData(TWO_ZETAS, [D1, 0.3 - 0.2j], dd.f1inf, dd.bp)
    oct = octet_expand(d2, p)
    k = 2
    for n in range(2 * k):
        zn = oct.z[n]
        expect = -phi(1 / zn, d2.f1inf, d2.bp, p) / ((zn * s11_prime(zn, TWO_ZETAS)) ** 2 * phi(zn, d2.f1inf, d2.bp, p))
        assert abs(oct.C[n] * oct.Cbar[n] - expect) < 1e-10 * abs(expect)
    for n in range(k):
        assert oct.zbar[n + k] == pytest.approx(1 / np.conj(TWO_ZETAS[n]))
        assert oct.Cbar[n + k] == pytest.approx(np.conj(d2.Ds[n]) / np.conj(TWO_ZETAS[n]) ** 2)
    assert np.allclose(oct.zbar, 1 / oct.z)


def test_discrete_data_validation(ref):
    p, dd, _ = ref
    with pytest.raises(ConstraintViolationError):
        DiscreteData([0.5 + 0.5j], [D1], dd.f1inf, dd.bp)
    with pytest.raises(ConstraintViolationError):
        DiscreteData([ZETA, -ZETA], [D1, D1], dd.f1inf, dd.bp)
    with pytest.raises(ConstraintViolationError):
        DiscreteData([ZETA], [D1, D1], dd.f1inf, dd.bp)
    with pytest.raises(ConstraintViolationError):
        DiscreteData([ZETA], [D1], 1.1, dd.bp)
    with pytest.raises(ConstraintViolationError):
        octet_expand(dd, ModelParams())


# ---------------------------------------------------------------- soliton


def test_vacuum_soliton(ref):
    p, dd, _ = ref
    empty = DiscreteData([], [], dd.f1inf, dd.bp)
    assert not np.any(soliton_field(octet_expand(empty, p), np.arange(-3, 4), 0.5))
    assert soliton_solution(empty, 2, 0.0, p) == 0
    _, res = verify_boundary(empty, np.linspace(-1, 1, 5), p)
    assert res == {"plus": 0.0, "minus": 0.0}


@pytest.mark.parametrize("t", [-4.0, 0.0, 0.7, 3.0])
def test_soliton_matches_extended_precision(ref, t):
    p, dd, _ = ref
    d2 = DiscreteData(TWO_ZETAS, [D1, 0.3 - 0.2j], dd.f1inf, dd.bp)
    for data in (dd, d2):
        oct = octet_expand(data, p)
        js = [-6, -1, 0, 1, 5, 12]
        got = soliton_field(oct, js, t)
        for j, v in zip(js, got):
            Q, R = soliton_mp(oct, j, t)
            assert abs(v - Q) < 1e-10 * max(abs(Q), 1e-300)
            # the dual system returns R = -conj(Q)
            assert abs(R + np.conj(Q)) < 1e-12 * abs(Q)


def test_soliton_tail_decay(ref):
    p, dd, oct = ref
    assert np.max(np.abs(soliton_field(oct, np.arange(40, 80), 0.0))) < 1e-8


def test_soliton_bulk_equation(ref):
    p, dd, oct = ref
    assert bulk_residual(oct, np.arange(-20, 41), np.linspace(-10, 10, 21), h=1e-4) < 1e-6


def test_soliton_boundary_one_branch(ref):
    p, dd, _ = ref
    branch, res = verify_boundary(dd, np.linspace(-10, 10, 21), p)
    assert branch is not None
    assert res[branch] < 1e-8
    other = "plus" if branch == "minus" else "minus"
    assert res[other] > 1e-4


def test_soliton_dirichlet(dnls):
    bp = BoundaryParams(1.0, 0.0, 0.0, 0.0)
    f1 = f1_infinity_roots(bp, dnls)[0].value
    dd = DiscreteData([ZETA], [D1], f1, bp)
    oct = octet_expand(dd, dnls)
    ts = np.linspace(-10, 10, 21)
    assert max(abs(soliton_field(oct, [-1], t)[0]) for t in ts) < 1e-12
    assert verify_boundary(dd, ts, dnls)[0] == "robin"
    assert np.max(closure_residual_series(oct, bp, ts, dnls)) < 1e-12


def test_certify_root(ref):
    p, dd, _ = ref
    f, branch, res = certify_root(dd.bp, p, 0)
    assert f == dd.f1inf and branch in ("plus", "minus")
    assert certify_root(dd.bp, p, 4)[1] is None


def test_ill_conditioned_without_fallback(ref, monkeypatch):
    p, dd, oct = ref
    monkeypatch.setattr(soliton, "COND_LIMIT", 1.0)
    with pytest.raises(IllConditionedError):
        soliton_field(oct, [0, 1], 0.0, extended=False)


def test_far_sites_finite(ref):
    p, dd, oct = ref
    vals = soliton_field(oct, np.array([-300, -60, 60, 300]), 0.3)
    assert np.all(np.isfinite(vals)) and np.max(np.abs(vals)) < 1e-30


# ---------------------------------------------------------------- Backlund chain


@pytest.fixture(scope="module")
def chain(ref):
    p, dd, _ = ref
    ch, oct, J = backlund_chain(0.7, dd, p)
    return ch, J


Z_B = 1.3 + 0.4j


def test_backlund_recursion(chain):
    ch, _ = chain
    assert recursion_residual(ch, Z_B, (-15, 15)) < 1e-10


def test_backlund_seed_is_K_minus(chain, ref):
    p, dd, _ = ref
    ch, _ = chain
    f = ch.fields
    assert np.max(np.abs(ch.matrix(0, Z_B) - K_minus_td(f.qa(0), f.ra(0), Z_B, dd.bp, p))) < 1e-10


def test_backlund_determinant(chain):
    ch, _ = chain
    assert determinant_spread(ch, Z_B) < 1e-10


def test_backlund_tails(chain, ref):
    p, dd, _ = ref
    ch, J = chain
    assert max(abs(ch.fields.qa(J)), abs(ch.fields.qa(-J))) < 1e-10
    assert np.max(np.abs(ch.matrix(J, Z_B) - ch.matrix(-J, Z_B))) < 1e-8
    assert np.max(np.abs(ch.matrix(J, Z_B) - asymptotic_matrix(Z_B, dd.f1inf, dd.bp, p))) < 1e-8


def test_backlund_symmetry(chain, ref):
    p, dd, _ = ref
    ch, _ = chain
    for j in range(-10, 11):
        assert symmetry_residual(ch, j, Z_B, dd.f1inf, dd.bp, p) < 1e-8


@pytest.mark.parametrize("t", [-2.0, 0.0, 2.0])
def test_backlund_time_relation(ref, t):
    p, dd, oct = ref
    assert time_relation_residual(lambda js, tt: soliton_field(oct, js, tt), t, Z_B, dd.bp, p) < 1e-6


@pytest.mark.parametrize("t", [-5.0, 5.0])
def test_backlund_chain_other_times(ref, t):
    p, dd, _ = ref
    ch, _, J = backlund_chain(t, dd, p)
    assert recursion_residual(ch, Z_B) < 1e-10


@given(st.lists(small_complex, min_size=18, max_size=18), st.integers(-2, 2))
def test_step_backward_inverts_forward(vals, j):
    p = ModelParams.dnls()
    q = np.array(vals[:9])
    f = LineFields(q, -np.conj(q), -4)
    g = fold(f, p)
    seeds = backlund_seeds(f.qa(0), f.ra(0), BoundaryParams.dnls(1.0, -1.7, 1.1), p)
    back = step_backward(j, step_forward(j, seeds, f, g), f, g)
    for name in ("f1", "f2", "g1", "g2", "x1", "x2", "y1", "y2"):
        assert abs(getattr(back, name) - getattr(seeds, name)) < 1e-12 * max(1, abs(getattr(seeds, name)))


def test_backlund_rejects_unrelated_pair(ref):
    p, dd, oct = ref
    js = np.arange(-12, 13)
    Q = soliton_field(oct, js, 0.7)
    f = LineFields(Q, -np.conj(Q), -12)
    seeds = backlund_seeds(f.qa(0), f.ra(0), dd.bp, p)
    with pytest.raises(ConstraintViolationError, match="site"):
        run_backlund(f, f, seeds, 8)


def test_tail_window_gives_up():
    with pytest.raises(ConstraintViolationError):
        tail_window(lambda js: np.ones(len(js)), J_max=10)


def test_backlund_inverse_matrix_symmetry(chain, ref):
    # phi(z) phi(tau z) is the determinant of the asymptotic matrix
    p, dd, _ = ref
    ch, _ = chain
    tz = tau(Z_B, p)
    lhs = phi(Z_B, dd.f1inf, dd.bp, p) * phi(tz, dd.f1inf, dd.bp, p)
    assert abs(lhs - det2(ch.matrix(0, Z_B))) < 1e-10 * abs(lhs)
    assert np.allclose(inv2(ch.matrix(0, Z_B)) @ ch.matrix(0, Z_B), np.eye(2))
