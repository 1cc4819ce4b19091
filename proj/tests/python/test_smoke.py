"""End-to-end smoke tests for the python bindings."""

import math

import pytest

import sparsedual as sd


def screened_problem():
    # Small correlated instance whose oracle solution has a strict margin,
    # so the dual solver closes the gap completely.
    return sd.synthetic_problem(
        d=20, k_true=3, n=40, noise_sd=1.0, off_diag=0.25, seed=2,
        loss="squared", lam=0.1, k=3, normalize=True,
    )


def test_solve_closes_the_gap_and_bounds_the_oracle():
    prob = screened_problem()
    rep = prob.solve(
        "diht", max_iters=50000, step_schedule="theorem_mu",
        stop_gap_tol=1e-6, stop_rel_primal_tol=0.0,
    )
    assert rep["solver"] == "diht"
    assert rep["stop_reason"] == "gap_tol"
    assert rep["final"]["gap"] <= 1e-6
    assert rep["final"]["nnz"] <= prob.k
    assert len(rep["final_w"]) == prob.dim
    assert len(rep["final_alpha"]) == prob.n

    orc = prob.oracle()
    assert orc["primal"] <= rep["final"]["primal"] + 1e-9
    assert abs(orc["primal"] - rep["final"]["primal"]) <= 1e-6
    # Row normalization rescales coefficients, so compare supports only.
    assert sd.support_recovered(rep["final_w"], prob.true_w) is True

    # The certified saddle point ties the whole chain together; the dual
    # residual scales like the square root of the gap, hence the looser tol.
    cert = prob.certify(rep["final_w"], rep["final_alpha"], tol=1e-2)
    for key in ("b_ok", "c_ok", "gap_ok", "optimal_certified", "gap"):
        assert key in cert
    assert cert["optimal_certified"] is True


def test_weak_duality_from_the_bindings():
    prob = screened_problem()
    rep = prob.solve("diht", max_iters=200, step_schedule="theorem_mu",
                     stop_gap_tol=0.0, stop_rel_primal_tol=0.0)
    d = prob.dual_value(rep["final_alpha"])
    p = prob.primal_value(rep["final_w"])
    assert d <= p + 1e-10
    assert prob.duality_gap(rep["final_w"], rep["final_alpha"]) == pytest.approx(p - d, abs=1e-12)


def test_hard_threshold_keeps_the_largest_magnitudes():
    out = sd.hard_threshold([0.5, -3.0, 1.0, 0.25, 2.0], 2)
    assert out == [0.0, -3.0, 0.0, 0.0, 2.0]
    assert sd.top_k_indices([0.5, -3.0, 1.0, 0.25, 2.0], 2) == [1, 4]


def test_support_recovery_is_value_independent():
    assert sd.support_recovered([0.0, 5.0, -1.0], [0.0, 1.0, 2.0]) is True
    assert sd.support_recovered([1.0, 5.0, -1.0], [0.0, 1.0, 2.0]) is False


def test_divergence_raises_solver_abort():
    prob = sd.synthetic_problem(d=20, k_true=3, n=40, seed=33, lam=0.01, k=10,
                                normalize=True)
    with pytest.raises(sd.SolverAbort):
        prob.solve("iht", max_iters=100000, step_schedule="constant", eta0=1e6,
                   stop_gap_tol=0.0, stop_rel_primal_tol=0.0)


def test_load_libsvm_problem_round_trip(tmp_path):
    path = tmp_path / "tiny.libsvm"
    path.write_text(
        "1 1:0.5 3:-1.25\n"
        "-1 2:2.0\n"
        "1 1:-0.75 4:0.5\n"
    )
    prob = sd.load_libsvm_problem(str(path), loss="hinge", lam=0.5, k=2)
    assert prob.n == 3
    assert prob.dim == 4
    assert math.isfinite(prob.primal_value([0.0, 0.0, 0.0, 0.0]))
    rep = prob.solve("diht", max_iters=500, step_schedule="inv_t", eta0=5.0,
                     stop_gap_tol=0.0, stop_rel_primal_tol=0.0)
    assert rep["iterations"] == 500
    assert rep["final"]["dual"] <= rep["final"]["primal"] + 1e-10
