import dataclasses
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from causalflow import blrm
from causalflow.exceptions import DeterministicRelation
from causalflow.gausscov import CovarianceMatrix, Var, lagged_joint
from causalflow.measures import (
    CURVE_COLUMNS,
    decompose,
    decompose_curve,
    gaussian_mi,
    linear_redundancy,
    transfer_entropy,
    wb_redundancy,
)
from causalflow.network import validate

from test_network import dags

info = st.floats(0.0, 30.0, allow_nan=False)


def _literal_redundancy(a, b):
    with mp.workdps(50):
        a, b = mp.mpf(a), mp.mpf(b)
        return float(mp.log(mp.exp(2 * (a + b)) / (mp.exp(2 * a) + mp.exp(2 * b) - 1)) / 2)


def test_redundancy_examples():
    assert linear_redundancy(0.0, 3.0) == 0.0
    assert linear_redundancy(0.5, 1.0) == pytest.approx(0.39546, abs=5e-6)
    assert linear_redundancy(0.5, 1.0) == pytest.approx(_literal_redundancy(0.5, 1.0), rel=1e-14)
    assert linear_redundancy(0.5493, math.inf) == 0.5493
    assert linear_redundancy(math.inf, 0.25) == 0.25


@given(info, info)
def test_redundancy_bounds_symmetry_and_literal_formula(a, b):
    r = linear_redundancy(a, b)
    assert 0.0 <= r <= min(a, b)
    assert r == linear_redundancy(b, a)
    if min(a, b) > 1e-6:
        assert r == pytest.approx(_literal_redundancy(a, b), rel=1e-12)


def test_redundancy_rejects_negative():
    with pytest.raises(ValueError):
        linear_redundancy(-0.1, 1.0)


def _mi(rho2):
    return -0.5 * math.log1p(-rho2)


@given(st.floats(-0.999, 0.999), st.floats(-0.999, 0.999))
def test_markov_chain_consistency(r_ab, r_bc):
    # A - B - C scalar Gaussian chain: corr(A, C) = r_ab r_bc
    i_ab = _mi(r_ab ** 2)
    i_c_ab = _mi(r_bc ** 2)  # I(C; (A, B)) = I(C; B)
    assert linear_redundancy(i_ab, i_c_ab) == pytest.approx(_mi((r_ab * r_bc) ** 2), abs=1e-9)


def test_wb_redundancy():
    assert wb_redundancy(0.3, 0.7) == 0.3
    assert wb_redundancy(0.7, 0.3) == 0.3
    assert wb_redundancy(0.4, 0.4) == 0.4


def test_gaussian_mi_scalar_correlation():
    rho = 0.6
    cov = CovarianceMatrix(["a", "b"], [[1.0, rho], [rho, 1.0]])
    assert gaussian_mi(cov, "a", "b") == pytest.approx(-0.5 * math.log(1 - rho ** 2), rel=1e-14)


def test_gaussian_mi_independent_is_zero():
    cov = CovarianceMatrix(["a", "b", "c"], np.diag([1.0, 2.0, 3.0]))
    assert gaussian_mi(cov, ["a"], ["b", "c"]) == 0.0


def test_gaussian_mi_deterministic_is_infinite():
    cov = CovarianceMatrix(["a", "b"], [[1.0, 2.0], [2.0, 4.0]])
    assert gaussian_mi(cov, "a", "b") == math.inf


def test_gaussian_mi_equal_time_blrm(ref_net):
    j = lagged_joint(ref_net, ["x", "y"], [], 0.0)
    assert gaussian_mi(j, "x", "y") == pytest.approx(0.5 * math.log(3.0), rel=1e-13)


def test_gaussian_mi_conditional_matches_chain_rule(ref_ffl):
    j = lagged_joint(ref_ffl.network(), ["z", "x", "y"], ["y"], 2.0)
    yl = Var("y", True)
    lhs = gaussian_mi(j, [yl], ["x", "y"], ["z"])
    rhs = gaussian_mi(j, [yl], ["x", "y", "z"]) - gaussian_mi(j, [yl], ["z"])
    assert lhs == pytest.approx(rhs, rel=1e-10)


def test_gaussian_mi_argument_checks():
    cov = CovarianceMatrix(["a", "b"], np.eye(2))
    with pytest.raises(ValueError):
        gaussian_mi(cov, [], ["b"])
    with pytest.raises(ValueError):
        gaussian_mi(cov, ["a"], ["a"])


def test_transfer_entropy_reverse_direction_vanishes(ref_net):
    for tau in np.geomspace(1e-3, 100, 40):
        assert abs(transfer_entropy(ref_net, "y", "x", tau)) <= 1e-10


def test_transfer_entropy_diverges_for_noiseless_target(ref_blrm, ref_net):
    te4 = transfer_entropy(ref_net, "x", "y", 1e-4)
    assert te4 > 3.0
    assert te4 == pytest.approx(blrm.te_closed_form(ref_blrm, 1e-4), rel=1e-9)
    assert transfer_entropy(ref_net, "x", "y", 1e-5) > te4
    with pytest.raises(DeterministicRelation):
        transfer_entropy(ref_net, "x", "y", 0.0)
    with pytest.raises(ValueError):
        transfer_entropy(ref_net, "x", "y", -1.0)


def test_transfer_entropy_vanishes_at_short_lag_with_target_noise(ref_ffl):
    net = ref_ffl.network()
    vals = [transfer_entropy(net, "x", "y", t, ["z"]) for t in (1e-4, 1e-6, 1e-8)]
    # TE ~ tau at short lags: the target noise dominates
    assert vals[0] > vals[1] > vals[2]
    assert vals[1] / vals[2] == pytest.approx(100.0, rel=1e-3)
    assert vals[2] < 1e-5


def test_decompose_zero_lag(ref_net):
    p = decompose(ref_net, "x", "y", 0.0)
    assert p.c == 0.0 and p.s == 0.0 and p.te == 0.0
    assert p.i_tot == math.inf and p.u_y == math.inf
    assert p.i_lag == p.i_xy == p.r_linear == pytest.approx(0.5 * math.log(3))


def test_reverse_influence_is_zero(ref_net):
    curve = decompose_curve(ref_net, "y", "x", np.linspace(0, 60, 301))
    assert np.max(np.abs(curve.column("c"))) <= 1e-10
    assert curve.peak_c <= 1e-10


def test_ffl_common_parent_gives_zero_influence(ref_ffl):
    net = dataclasses.replace(ref_ffl, gamma=0.0).network()
    curve = decompose_curve(net, "x", "y", np.linspace(0, 60, 301), condition_on_parents=True)
    assert curve.conditioned_on == {"z"}
    assert np.max(np.abs(curve.column("c"))) <= 1e-9
    assert np.all(curve.column("i_lag")[1:] > 0)


def test_curve_summaries(ref_net):
    grid = np.linspace(0.0, 30.0, 3001)
    curve = decompose_curve(ref_net, "x", "y", grid)
    step = grid[1] - grid[0]
    assert abs(curve.tau_opt - 10 * math.log(4 / 3)) <= step
    assert curve.tau_res > curve.tau_opt
    assert curve.peak_i == pytest.approx(np.max(curve.column("i_lag")))
    assert curve.peak_c == np.max(curve.column("c"))
    assert curve.metadata == {"r_wb_parent_conditioned": False}


def test_argmax_ties_go_to_smaller_tau(ref_net):
    # far tail: c is exactly 0 at both ends for the reverse direction
    curve = decompose_curve(ref_net, "y", "x", [0.0, 1.0, 2.0])
    assert curve.tau_res == min(t for t, c in zip(curve.taus, curve.column("c")) if c == curve.peak_c)


def test_negative_synergy_exists(ref_net):
    s = decompose_curve(ref_net, "x", "y", np.geomspace(1e-2, 100, 200)).column("s")
    assert np.any(s < 0)


def test_grid_validation(ref_net):
    with pytest.raises(ValueError):
        decompose_curve(ref_net, "x", "y", [1.0, 1.0])
    with pytest.raises(ValueError):
        decompose_curve(ref_net, "x", "y", [-1.0, 1.0])
    with pytest.raises(ValueError):
        decompose(ref_net, "x", "x", 1.0)


def test_point_columns():
    assert CURVE_COLUMNS == ("tau", "i_lag", "te", "i_tot", "i_xy", "r_linear", "r_wb",
                             "u_x", "u_y", "s", "c")


def _check_point(p):
    assert p.i_lag >= 0 and p.te >= 0 and p.i_tot >= 0 and p.i_xy >= 0
    assert 0 <= p.r_linear <= min(p.i_xy, p.i_tot) + 1e-12
    assert p.c == p.u_x
    if math.isfinite(p.i_tot):
        assert p.i_tot == pytest.approx(p.r_linear + p.u_x + p.u_y + p.s, abs=1e-9)
    assert p.i_lag == pytest.approx(p.r_linear + p.u_x, abs=1e-9)
    assert p.te == pytest.approx(p.u_x + p.s, abs=1e-9)
    assert p.r_wb == min(p.i_lag, p.i_self) or p.r_wb == pytest.approx(min(p.i_lag, p.i_self), abs=1e-12)


@given(dags(), st.data())
def test_closure_and_bounds_on_random_networks(network, data):
    v = validate(network)
    if len(v.names) < 2:
        return
    src, dst = data.draw(st.permutations(v.names))[:2]
    cond = data.draw(st.booleans())
    tau = data.draw(st.floats(0.0, 50.0))
    _check_point(decompose(v, src, dst, tau, condition_on_parents=cond))


def test_measures_do_not_consume_condition_values(ref_ffl):
    # only covariances enter: the result is a pure function of the network and lag
    net = ref_ffl.network()
    a = decompose(net, "x", "y", 1.5, True)
    b = decompose(net, "x", "y", 1.5, True)
    assert a == b


@given(st.floats(-3, 3).filter(lambda a: abs(a) > 1e-3), st.floats(-4, 4), st.floats(-3, 3))
def test_influence_nonnegative_on_response_models(alpha, log_beta, log_t):
    p = blrm.BlrmParams(alpha, math.exp(log_beta), math.exp(log_t), 1.0)
    grid = np.geomspace(1e-4, 1e3, 80)
    for src, dst in (("x", "y"), ("y", "x")):
        assert decompose_curve(p.network(), src, dst, grid).column("c").min() >= -1e-10


def test_influence_nonnegative_on_feed_forward_pairs(ref_ffl):
    net = ref_ffl.network()
    grid = np.geomspace(1e-3, 300, 128)
    for src, dst in (("x", "y"), ("y", "x"), ("z", "x"), ("x", "z"), ("y", "z")):
        assert decompose_curve(net, src, dst, grid, True).column("c").min() >= -1e-10


def test_negative_influence_is_reported_not_clamped():
    # conditioning on a mediator: a -> b -> c with b among the parents of (a, c)
    from causalflow.network import EdgeSpec, LinearNetwork, NodeSpec

    chain = validate(LinearNetwork(
        (NodeSpec("a", 1.0, 1.0), NodeSpec("b", 1.0, 0.0), NodeSpec("c", 1.0, 0.0)),
        (EdgeSpec("a", "b", 1.0), EdgeSpec("b", "c", 1.0)),
    ))
    grid = np.linspace(0.01, 10.0, 200)
    mediated = decompose_curve(chain, "a", "c", grid, condition_on_parents=True)
    assert mediated.conditioned_on == {"b"}
    assert mediated.column("c").min() < -0.1
    plain = decompose_curve(chain, "a", "c", grid)
    assert plain.column("c").min() >= -1e-10
