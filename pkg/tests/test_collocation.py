import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.polynomial import legendre as L
from scipy.integrate import quad, trapezoid
from scipy.special import roots_jacobi

from ez_avoid.collocation import (
    DecisionVector,
    Transcription,
    build_grid,
    evaluate_constraints,
    evaluate_objective,
    lagrange_interpolate,
    lgr_nodes,
    penalty_integral,
    reconstruct_states,
)
from ez_avoid.geometry import EngagementZone, penalty_g
from ez_avoid.problem import ScenarioSpec

GRID_SIZES = [2, 5, 10, 19, 30]


def _radau_roots_oracle(m):
    # roots of P_{m-1} + P_m from numpy's Legendre-series root finder
    c = np.zeros(m + 1)
    c[m - 1] = c[m] = 1.0
    return np.sort(L.legroots(c).real)


def test_m2_nodes_and_weights():
    g = build_grid(2)
    assert g.nodes == pytest.approx([-1.0, 1.0 / 3.0], abs=1e-15)
    assert g.weights == pytest.approx([0.5, 1.5], abs=1e-15)
    assert g.support[-1] == g.endpoint == 1.0


@pytest.mark.parametrize("m", GRID_SIZES)
def test_nodes_match_independent_root_finder(m):
    assert build_grid(m).nodes == pytest.approx(_radau_roots_oracle(m), abs=1e-12)


@pytest.mark.parametrize("m", GRID_SIZES)
def test_weights_match_gauss_jacobi(m):
    # interior Radau nodes/weights are the Gauss rule for the weight 1 + x, divided by 1 + x
    xj, wj = roots_jacobi(m - 1, 0.0, 1.0)
    g = build_grid(m)
    assert g.nodes[1:] == pytest.approx(xj, abs=1e-14)
    assert g.weights[1:] == pytest.approx(wj / (1.0 + xj), rel=1e-12)
    assert g.weights[0] == 2.0 / m**2


@pytest.mark.parametrize("m", GRID_SIZES)
def test_grid_invariants(m):
    g = build_grid(m)
    assert g.nodes[0] == -1.0 and np.all(np.diff(g.nodes) > 0) and g.nodes[-1] < 1.0
    assert np.all(g.weights > 0)
    assert abs(g.weights.sum() - 2.0) < 1e-14
    assert g.diff_matrix.shape == (m + 1, m + 1)
    # last row of the integration matrix reproduces the quadrature weights
    assert g.integration[-1] == pytest.approx(g.weights, abs=1e-13)
    rng = np.random.default_rng(m)
    # quadrature exact to degree 2m - 2
    coef = rng.normal(size=2 * m - 1)
    exact = np.polynomial.polynomial.polyval(1.0, np.polynomial.polynomial.polyint(coef)) - \
        np.polynomial.polynomial.polyval(-1.0, np.polynomial.polynomial.polyint(coef))
    approx = g.weights @ np.polynomial.polynomial.polyval(g.nodes, coef)
    assert abs(approx - exact) <= 1e-12 * max(1.0, abs(exact))
    # differentiation exact to degree m on the support points
    coef = rng.normal(size=m + 1)
    vals = np.polynomial.polynomial.polyval(g.support, coef)
    dvals = np.polynomial.polynomial.polyval(g.support, np.polynomial.polynomial.polyder(coef))
    assert np.max(np.abs(g.diff_matrix @ vals - dvals)) < 1e-10 * max(1.0, np.max(np.abs(dvals)))


def test_m19_monomial_36():
    g = build_grid(19)
    assert abs(g.weights @ g.nodes**36 - 2.0 / 37.0) / (2.0 / 37.0) < 1e-12


def test_grid_is_read_only_and_cached():
    g = build_grid(19)
    assert build_grid(19) is g
    with pytest.raises(ValueError):
        g.nodes[0] = 0.0


def test_bad_grid_size():
    with pytest.raises(ValueError):
        build_grid(1)


def test_lgr_nodes_reports_nonconvergence():
    from ez_avoid.errors import GridBuildFailure
    with pytest.raises(GridBuildFailure):
        lgr_nodes(30, tol=0.0, max_iter=3)


def test_interpolation_reproduces_nodes():
    g = build_grid(19)
    vals = np.column_stack((np.sin(g.support), np.cos(3 * g.support)))
    assert lagrange_interpolate(g.support, vals, g.support) == pytest.approx(vals, abs=1e-13)


# ------------------------------------------------------------------ transcription

SPEC_A = ScenarioSpec("A")


@pytest.mark.parametrize("m", GRID_SIZES)
def test_constant_heading_is_straight_line(m):
    g = build_grid(m)
    spec = SPEC_A.replace(grid_m=m)
    psi, tf = 0.7, 3.3
    states, defects = reconstruct_states(DecisionVector(np.full(m + 1, psi), tf), spec, g)
    t = 0.5 * (g.support + 1) * tf
    exact = np.asarray(spec.x0) + np.outer(t, [np.cos(psi), np.sin(psi)])
    assert states == pytest.approx(exact, abs=1e-12)
    assert np.max(np.abs(defects)) < 1e-10


def test_state_error_converges_spectrally():
    # smooth control psi(tau) = 0.8 sin(2 tau) + 0.3; reference terminal state by adaptive quadrature
    tf, v = 4.0, 1.0
    psi_f = lambda tau: 0.8 * np.sin(2 * tau) + 0.3
    ref = np.array([quad(lambda s: np.cos(psi_f(s)), -1, 1, epsabs=1e-14)[0],
                    quad(lambda s: np.sin(psi_f(s)), -1, 1, epsabs=1e-14)[0]]) * 0.5 * tf * v
    errs = []
    for m in (5, 9, 13, 19):
        g = build_grid(m)
        spec = SPEC_A.replace(grid_m=m)
        states, defects = reconstruct_states(DecisionVector(psi_f(g.support), tf), spec, g)
        errs.append(np.linalg.norm(states[-1] - np.asarray(spec.x0) - ref))
        assert np.max(np.abs(defects)) < 1e-10
    assert errs[-1] < 1e-12
    assert all(b < a * 0.1 for a, b in zip(errs[:2], errs[1:3]))


@given(st.floats(0.2, 5.0), st.floats(0.2, 10.0))
def test_speed_time_rescaling(v, tf):
    g = build_grid(19)
    psi = np.linspace(-1.0, 2.0, 20)
    a, _ = reconstruct_states(DecisionVector(psi, tf), SPEC_A.replace(v=v), g)
    b, _ = reconstruct_states(DecisionVector(psi, tf / 2), SPEC_A.replace(v=2 * v), g)
    assert a == pytest.approx(b, abs=1e-12)


def test_objectives():
    g = build_grid(19)
    far = ScenarioSpec("C", x0=(5.0, 5.0), xf=(6.0, 9.0), k_ez=50.0)
    psi = np.arctan2(4.0, 1.0)
    dv = DecisionVector(np.full(20, psi), np.hypot(1, 4))
    # fully outside: J_C equals tf whatever the gain
    assert evaluate_objective(dv, far, g) == dv.tf
    assert evaluate_objective(dv, far.replace(k_ez=0.0), g) == dv.tf
    assert evaluate_objective(dv, SPEC_A, g) == dv.tf
    assert evaluate_objective(dv, far.replace(kind="B"), g) == dv.tf
    d = far.replace(kind="D", t_go=dv.tf, k_ez=0.0)
    assert evaluate_objective(dv, d, g) == 0.0


def test_penalty_quadrature_against_dense_trapezoid():
    # chord that clips the zone: the penalty is discontinuous in slope at the boundary,
    # so LGR and a 1e4-sample trapezoid agree only to a few digits
    spec = ScenarioSpec("D", x0=(1.0, 3.0), xf=(-0.5, -3.0), t_go=np.sqrt(38.25))
    g = build_grid(19)
    psi = np.arctan2(-6.0, -1.5)
    dv = DecisionVector(np.full(20, psi), spec.t_go)
    t = np.linspace(0, spec.t_go, 10001)
    pts = np.asarray(spec.x0) + np.outer(t, [np.cos(psi), np.sin(psi)])
    ref = trapezoid(penalty_g(pts, np.full(t.size, psi), spec.ez), t)
    lgr = evaluate_objective(dv, spec, g)
    assert lgr == pytest.approx(ref, rel=0.2)
    assert penalty_integral(dv, spec, g) == lgr
    # a chord that never enters: both exactly zero
    clear = spec.replace(x0=(3.0, 3.0), xf=(3.0, -3.0), t_go=6.0)
    dv2 = DecisionVector(np.full(20, -np.pi / 2), 6.0)
    t = np.linspace(0, 6.0, 10001)
    pts = np.asarray(clear.x0) + np.outer(t, [0.0, -1.0])
    assert evaluate_objective(dv2, clear, g) == pytest.approx(
        trapezoid(penalty_g(pts, np.full(t.size, -np.pi / 2), clear.ez), t), abs=1e-6)


def test_constraint_residuals():
    g = build_grid(19)
    psi = np.arctan2(-6.0, -1.5)
    dv = DecisionVector(np.full(20, psi), np.sqrt(38.25))
    res = evaluate_constraints(dv, SPEC_A, g)
    assert np.max(np.abs(res.terminal)) < 1e-12
    assert res.path.size == 0
    resb = evaluate_constraints(dv, SPEC_A.replace(kind="B"), g)
    assert resb.path.shape == (20,)
    assert np.max(resb.path) > 0  # the chord crosses the zone


def test_decision_vector_validation():
    with pytest.raises(ValueError):
        DecisionVector(np.zeros(20), 0.0)


def test_transcription_caches_consistently():
    tr = Transcription(SPEC_A.replace(kind="B"))
    dv = DecisionVector(np.linspace(-2, -1.5, 20), 6.3)
    s1 = tr.state_table(dv)
    r1 = tr.constraints(dv)
    assert tr.objective(dv) == 6.3
    dv2 = DecisionVector(np.linspace(-2, -1.4, 20), 6.3)
    assert not np.allclose(tr.state_table(dv2), s1)
    assert tr.constraints(dv).path == pytest.approx(r1.path)
