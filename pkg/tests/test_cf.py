import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cflab.cf import (CFProblem1D, CFProblem2D, DSliceIndex, TruncatedMultOp, assemble_polynomial,
                      cayley_coeffs_1d, cayley_coeffs_2d, cf1_construct, cf1_feasible,
                      cf2_extend, cf2_necessary, cf2_necessary_report, cf2_sufficient_class,
                      dslice_enumerate, extremal_value, format_laurent, kp_identity_check,
                      kp_matrix_2d, laurent_mul, symbol_from_matrix)
from cflab.errors import DegreeOverflow, Infeasible, NotInClass, WindowMismatch, WindowTooSmall
from cflab.linalg import operator_norm, psd_check
from cflab.poly import parse_poly

R2 = 1 / np.sqrt(2)
disc = st.tuples(st.floats(0, 1.2), st.floats(0, 2 * np.pi)).map(lambda t: t[0] * np.exp(1j * t[1]))


# -- one variable --------------------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(disc, disc)
def test_cf1_feasibility_is_schur_test(a1, a2):
    nrm = operator_norm([[a1, a2], [0, a1]])
    if abs(nrm - 1) > 1e-9:
        assert cf1_feasible(CFProblem1D(a1, a2)) == (nrm < 1)


@settings(max_examples=60, deadline=None)
@given(disc, disc, st.floats(0, 2 * np.pi))
def test_cf1_construct_round_trip(a1, a2, theta):
    prob = CFProblem1D(a1, a2)
    if not cf1_feasible(prob):
        return
    f = cf1_construct(prob, theta)
    c = f.taylor(3)
    assert abs(c[0]) < 1e-12 and abs(c[1] - a1) < 1e-10 and abs(c[2] - a2) < 1e-10
    # independent evaluation on the circle
    z = np.exp(2j * np.pi * np.arange(2048) / 2048)
    num = np.polyval(f.num.coeff_list()[::-1], z)
    den = np.polyval(f.den.coeff_list()[::-1], z)
    assert np.abs(num / den).max() <= 1 + 1e-9


def test_cf1_boundary_is_inner():
    f = cf1_construct(CFProblem1D(0.6, 0.64))
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 777))
    assert np.allclose(np.abs(f(z)), 1.0, atol=1e-12)


def test_kp_identity(rng):
    for n in range(1, 6):
        a = 0.4 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
        assert kp_identity_check(a, n) < 1e-12
    assert cayley_coeffs_1d([0.5], 3) == [0.5, 0.5, 0.25, 0.125]


# -- truncated multiplication operators ---------------------------------------

def test_periodic_is_star_homomorphism(rng):
    a = {k: complex(*rng.standard_normal(2)) for k in range(-3, 4)}
    b = {k: complex(*rng.standard_normal(2)) for k in range(0, 5)}
    A, B = TruncatedMultOp(a, 6), TruncatedMultOp(b, 6)
    assert np.allclose((A * B).matrix(), A.matrix() @ B.matrix())
    assert np.allclose(A.adjoint().matrix(), A.matrix().conj().T)
    assert np.allclose((A + B).matrix(), A.matrix() + B.matrix())


def test_toeplitz_mode_is_compression():
    S = TruncatedMultOp({1: 1.0}, 4, "toeplitz")
    M = S.matrix()
    assert np.allclose(M, np.eye(9, k=-1))
    # compressions do not multiply exactly at the edge
    assert not np.allclose((S.adjoint() * S).matrix(), S.adjoint().matrix() @ M)
    with pytest.raises(WindowMismatch):
        S * TruncatedMultOp({1: 1.0}, 4)


def test_norm_approaches_symbol_sup():
    # circulant eigenvalues are q at the (2N+1)-th roots of unity
    q = {0: 1.0, 1: 1.0j, -2: 0.5}
    roots = np.exp(2j * np.pi * np.arange(33) / 33)
    vals = q[0] + q[1] * roots + q[-2] * roots ** -2
    assert TruncatedMultOp(q, 16).norm() == pytest.approx(np.abs(vals).max(), abs=1e-12)
    fine = np.exp(2j * np.pi * np.arange(4096) / 4096)
    sup = np.abs(q[0] + q[1] * fine + q[-2] * fine ** -2).max()
    assert TruncatedMultOp(q, 16).norm() <= sup + 1e-12


def test_symbol_from_matrix_round_trip():
    sym = {-2: 0.5j, 0: 1.0, 3: -0.25}
    for mode in ("periodic", "toeplitz"):
        got, dev = symbol_from_matrix(TruncatedMultOp(sym, 16, mode).matrix(), 16, mode)
        assert dev < 1e-14
        assert all(abs(got.get(k, 0) - sym.get(k, 0)) < 1e-14 for k in set(got) | set(sym))
    assert format_laurent({4: -np.sqrt(2) / 4}) == "-0.3535533906 z^4"


def test_dslice_order():
    pts = dslice_enumerate(2)
    assert len(pts) == 25
    assert pts == sorted(pts)
    assert [p.diagonal for p in pts] == sorted(p.diagonal for p in pts)
    assert DSliceIndex.at(1, -1) < DSliceIndex.at(-1, 2)


def test_cayley_2d_and_kp_psd():
    A = [TruncatedMultOp({0: 0.3, 1: 0.2}, 8), TruncatedMultOp({1: 0.1, 2: 0.2}, 8)]
    C = cayley_coeffs_2d(A)
    assert C[0].symbol == A[0].symbol
    expected = laurent_mul(A[0].symbol, C[0].symbol)
    for k, v in A[1].symbol.items():
        expected[k] = expected.get(k, 0) + v
    assert all(abs(C[1].symbol.get(k, 0) - v) < 1e-15 for k, v in expected.items())
    K = kp_matrix_2d([TruncatedMultOp({0: 0.2}, 4)])
    assert psd_check(K)
    with pytest.raises(DegreeOverflow):
        cayley_coeffs_2d([TruncatedMultOp({-1: 1.0}, 8)])


# -- two variables -------------------------------------------------------------

def test_problem_from_poly():
    p = parse_poly("0.1 z1 + 0.2 z2 + 0.3 z1^2 - 0.1 z1 z2 + 0.05i z2^2")
    prob = CFProblem2D.from_poly(p)
    assert prob.p1 == {0: 0.1, 1: 0.2}
    assert prob.poly().allclose(p)


def test_counterexample_forces_z4():
    prob = CFProblem2D(R2, 0, 0, 0, 0.5)
    assert cf2_necessary(prob)
    rep = cf2_necessary_report(prob)
    assert rep.pointwise_max == pytest.approx(1.0)
    out = cf2_extend(prob, max_degree=4, window=16)
    assert out.status == "DegreeViolation" and out.violation_k == 3
    assert set(out.forced_symbol) == {4}
    # derived value: -p2² conj(p1) / (1 - |p1|²) = -(√2/4) λ⁴
    assert out.forced_symbol[4] == pytest.approx(-np.sqrt(2) / 4, abs=1e-10)
    assert out.degenerate and out.caveat is None
    assert out.norms[0] <= 1 + 1e-8
    # the same violation appears under the compression realization
    tz = cf2_extend(prob, max_degree=4, window=16, mode="toeplitz")
    assert tz.violation_k == 3 and tz.forced_symbol[4] == pytest.approx(-np.sqrt(2) / 4, abs=1e-6)


def test_constant_p1_extends_pointwise():
    c, b = 0.5, 0.3
    out = cf2_extend(CFProblem2D(c, 0, 0, b, 0), max_degree=5, window=16)
    assert out.extended
    # oracle: the scalar V = 0 step at each λ
    assert out.blocks[2] == pytest.approx({2: -b * b * c / (1 - c * c)})
    f = assemble_polynomial(out.blocks)
    assert f.coeff((1, 2)) == pytest.approx(-b * b * c / (1 - c * c))
    assert all(r < 1e-10 for r in out.residuals)


def test_extend_rejects():
    with pytest.raises(Infeasible):
        cf2_extend(CFProblem2D(0.9, 0, 0.5, 0, 0))
    with pytest.raises(WindowTooSmall):
        cf2_extend(CFProblem2D(0.1, 0, 0, 0, 0), max_degree=8, window=16)
    with pytest.raises(DegreeOverflow):
        assemble_polynomial([{0: 1}, {3: 1}])


@pytest.mark.parametrize("abgd, case", [
    ((0.4, 0, 0.5, 0.3), 1),
    ((0, 0.4, 0.3, 0.5), 2),
    ((0.3, 0.2, 0.4, 0.3), 3),
    ((0.3j, 0.2j, 0.4, 0.3), 3),
])
def test_sufficient_class(abgd, case):
    rep = cf2_sufficient_class(*abgd, max_degree=6, grid=128)
    assert rep.case == case
    assert rep.jet_residual < 1e-12
    assert rep.sup_norm <= 1 + 1e-3 and rep.norm_bound <= 1 + 1e-3
    if case == 3:
        lam = abs(abgd[0]) / abs(abgd[1])
        assert rep.split_a == pytest.approx(lam / (1 + lam))


def test_sufficient_class_rejects():
    with pytest.raises(NotInClass):
        cf2_sufficient_class(0.3, 0.2j, 0.4, 0.3)
    with pytest.raises(Infeasible):
        cf2_sufficient_class(0.9, 0, 0.9, 0.5)


def test_extremal_value_brackets():
    prob = CFProblem2D(0.3, 0.2, 0.1, 0.2, 0.1)
    ev = extremal_value(prob, window=16)
    assert ev.value <= ev.scalar_sup + 1e-3
    assert ev.value == pytest.approx(ev.scalar_sup, abs=5e-3)
    # oracle for the closed form: norm of the 2x2 Toeplitz at the worst node
    lam = np.exp(2j * np.pi * np.arange(512) / 512)
    a, b = 0.3 + 0.2 * lam, 0.1 + 0.2 * lam + 0.1 * lam ** 2
    brute = max(operator_norm([[x, y], [0, x]]) for x, y in zip(a, b))
    assert ev.scalar_sup == pytest.approx(brute, abs=1e-4)
