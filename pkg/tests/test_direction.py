import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmmopt.direction import (
    GrTestConstants,
    ZeroGradient,
    compute_direction,
    gradient_related_test,
    model_value,
    safeguarded_direction,
    solve_subspace,
)
from gmmopt.hk import HkBuildContext
from gmmopt.linalg2 import NoSolution, Sym2, eig_bounds, modified_cholesky


def ctx_of(g, s):
    n = len(g)
    return HkBuildContext(np.zeros(n), np.asarray(g, float), np.asarray(s, float), np.zeros(n), 0.0, 0.0)


def test_solve_subspace_identity():
    assert solve_subspace(Sym2.identity(), 4.0, 1.0) == pytest.approx((4.0, -1.0))


def test_solve_subspace_indefinite():
    with pytest.raises(NoSolution):
        solve_subspace(Sym2(1, 0, -1), 1.0, 0.0)


def test_solve_subspace_parallel_case_min_norm():
    # g parallel to s with B = I: H = [[1,-1],[-1,1]] scaled, rhs in range
    u = solve_subspace(Sym2(1, -1, 1), 2.0, 2.0)
    assert u == pytest.approx(tuple(np.linalg.pinv([[1, -1], [-1, 1]]) @ [2.0, -2.0]))


def test_solve_subspace_zero_gradient():
    with pytest.raises(ZeroGradient):
        solve_subspace(Sym2.identity(), 0.0, 0.0)


def test_gradient_related_examples():
    g = np.array([0.3, -1.0, 2.0])
    c = GrTestConstants()
    assert gradient_related_test(-g, g, c)
    assert not gradient_related_test(g, g, c)
    small = np.array([1e-4, 0.0])
    assert not gradient_related_test(-(small @ small) * small, small, GrTestConstants(1e-6, 1e6))


def test_gr_constants_validation():
    with pytest.raises(ValueError):
        GrTestConstants(0.0, 1.0)
    with pytest.raises(ValueError):
        GrTestConstants(1.0, float("inf"))


def test_first_iteration_is_gradient_step():
    g = np.array([1.0, -2.0, 0.5])
    out = compute_direction(ctx_of(g, np.zeros(3)), None)
    assert (out.alpha, out.beta) == (1.0, 0.0)
    assert np.array_equal(out.d, -g)
    assert out.used_safeguard


def test_first_iteration_uses_repaired_curvature():
    g = np.array([1.0, 1.0])
    out = safeguarded_direction(g, np.zeros(2), Sym2(4.0, 0.0, 1.0), tau=0.1)
    assert out.alpha == pytest.approx(0.25)
    out = safeguarded_direction(g, np.zeros(2), Sym2(-3.0, 0.0, 1.0), tau=0.1)
    assert out.alpha == pytest.approx(1.0 / modified_cholesky(Sym2(-3.0, 0.0, 1.0), 0.1).h11)


def test_scaling_rescues_small_gradient():
    g = np.array([1e-3, 0.0, 0.0])
    s = np.array([0.0, 2.0, 0.0])
    c = GrTestConstants(1e-3, 1e6)
    alpha, beta = solve_subspace(Sym2.identity(), g @ g, g @ s)
    assert not gradient_related_test(-alpha * g + beta * s, g, c)
    out = compute_direction(ctx_of(g, s), Sym2.identity(), c)
    assert out.used_safeguard
    assert out.H_used.to_array() == pytest.approx(np.diag([g @ g, s @ s]))
    assert (out.alpha, out.beta) == pytest.approx((1.0, 0.0))
    assert np.allclose(out.d, -g)
    assert gradient_related_test(out.d, g, c)


def test_accepted_candidate_not_safeguarded():
    g = np.array([1.0, 0.5, 0.0])
    s = np.array([0.0, 1.0, 1.0])
    H0 = Sym2(g @ g, -(g @ s), s @ s)
    out = compute_direction(ctx_of(g, s), H0)
    assert not out.used_safeguard
    assert out.H_used == H0


def test_build_failure_uses_identity_safeguard():
    g = np.array([1.0, 0.0])
    s = np.array([0.5, 0.5])
    out = compute_direction(ctx_of(g, s), None)
    ref = safeguarded_direction(g, s, Sym2.identity())
    assert out.used_safeguard
    assert np.array_equal(out.d, ref.d)


def test_force_safeguard():
    g = np.array([1.0, 0.5, 0.0])
    s = np.array([0.0, 1.0, 1.0])
    H0 = Sym2(g @ g, -(g @ s), s @ s)
    assert compute_direction(ctx_of(g, s), H0, force_safeguard=True).used_safeguard


def test_zero_gradient_raises():
    with pytest.raises(ZeroGradient):
        compute_direction(ctx_of(np.zeros(2), np.ones(2)), None)


def test_model_decrease_matches_closed_form():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g, s = rng.standard_normal(5), rng.standard_normal(5)
        M = rng.standard_normal((2, 2))
        H = Sym2.from_array(M @ M.T + 0.1 * np.eye(2))
        out = compute_direction(ctx_of(g, s), H, GrTestConstants(1e-12, 1e12))
        b = np.array([-(g @ g), g @ s])
        assert out.model_decrease <= 0
        if not out.used_safeguard:
            ref = -0.5 * b @ np.linalg.solve(H.to_array(), b)
            assert out.model_decrease == pytest.approx(ref, rel=1e-10)
        assert out.model_decrease == pytest.approx(model_value(out.H_used, g @ g, g @ s, (out.alpha, out.beta)), rel=1e-13)
        assert np.array_equal(out.d, -out.alpha * g + out.beta * s)


def random_spd(rng, lo=1e-3, hi=1e3):
    lam = np.exp(rng.uniform(np.log(lo), np.log(hi), 2))
    q, _ = np.linalg.qr(rng.standard_normal((2, 2)))
    return Sym2.from_array(q @ np.diag(lam) @ q.T)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_safeguard_bounds(seed):
    rng = np.random.default_rng(seed)
    n = 20
    g = rng.standard_normal(n) * np.exp(rng.uniform(-5, 5))
    s = rng.standard_normal(n) * np.exp(rng.uniform(-5, 5))
    Hhat = random_spd(rng)
    out = safeguarded_direction(g, s, Hhat, tau=1e-12)
    lmin, lmax = eig_bounds(Hhat)
    assert out.hhat_bounds == pytest.approx((lmin, lmax))
    gn2 = g @ g
    gn = np.sqrt(gn2)
    dn = np.linalg.norm(out.d)
    assert g @ out.d <= -(1 / lmax) * gn2 * (1 - 1e-9)
    assert dn >= (1 / lmax) * gn * (1 - 1e-9)
    assert dn <= (2 / lmin) * gn * (1 + 1e-9)


def test_safeguard_bounds_with_indefinite_input():
    rng = np.random.default_rng(21)
    for _ in range(200):
        g, s = rng.standard_normal(8), rng.standard_normal(8)
        H0 = Sym2(*rng.uniform(-5, 5, 3))
        out = compute_direction(ctx_of(g, s), H0)
        assert g @ out.d < 0
        if out.used_safeguard:
            lmin, lmax = out.hhat_bounds
            assert g @ out.d <= -(g @ g) / lmax * (1 - 1e-9)
            assert np.linalg.norm(out.d) <= 2 / lmin * np.linalg.norm(g) * (1 + 1e-9)
