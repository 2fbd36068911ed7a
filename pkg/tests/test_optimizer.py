import pytest

from eicomb.area import EnsembleParams
from eicomb.bounds import random_channel, trial_rng
from eicomb.channel import bec, bsc, channel
from eicomb.functionals import Functional, evaluate, h2_inv
from eicomb.optimizer import (
    TwoPointChannel,
    Verdict,
    coordinate_descent,
    extremal_channel_cells,
    symmetrized_objective,
    transport_distance,
)
from eicomb.series import Polynomial, phi_of_poly, poly_from_string

H, B, E = Functional.H, Functional.B, Functional.E


# ----------------------------------------------------------------------
# two-point coordinates and the verdict distance


def test_two_point_channel_validation():
    with pytest.raises(ValueError):
        TwoPointChannel(0.3, 0.2, 0.5)
    with pytest.raises(ValueError):
        TwoPointChannel(0.1, 0.2, 1.5)
    with pytest.raises(ValueError):
        TwoPointChannel(-0.1, 0.2, 0.5)


def test_two_point_channel_degenerate_forms():
    assert TwoPointChannel(0.1, 0.1, 0.3).channel().approx_eq(bsc(0.1))
    assert TwoPointChannel(0.1, 0.4, 1.0).channel().approx_eq(bsc(0.1))
    assert TwoPointChannel(0.1, 0.4, 0.0).channel().approx_eq(bsc(0.4))
    assert TwoPointChannel(0.0, 0.5, 0.7).channel().approx_eq(bec(0.3))


def test_two_point_constraint_value():
    c = TwoPointChannel(0.0, 0.5, 0.55)
    assert c.constraint_value(H) == pytest.approx(0.45, abs=1e-15)
    assert c.constraint_value(E) == pytest.approx(0.225, abs=1e-15)


def test_transport_distance_basics():
    assert transport_distance(bsc(0.2), bsc(0.2)) == 0.0
    assert transport_distance(bsc(0.0), bsc(0.5)) == pytest.approx(0.5, abs=1e-15)
    # moving half the mass by 0.1 costs 0.05
    a = channel([(0.1, 0.5), (0.3, 0.5)])
    b = channel([(0.2, 0.5), (0.3, 0.5)])
    assert transport_distance(a, b) == pytest.approx(0.05, abs=1e-15)
    assert transport_distance(a, b) == transport_distance(b, a)


def test_transport_distance_tolerates_support_straddle():
    eps = h2_inv(0.45)
    near = channel([(eps - 1e-4, 0.5), (eps + 1e-4, 0.5)])
    assert transport_distance(near, bsc(eps)) <= 1.1e-4


# ----------------------------------------------------------------------
# symmetrized objective


def test_symmetrized_matches_poly_value_at_equal_coordinates():
    rhos = [Polynomial.monomial(2), Polynomial.monomial(3), poly_from_string("x^2+0.5x"),
            poly_from_string("x^5-0.75x^6")]
    for i in range(100):
        rng = trial_rng(41, i)
        rho = rhos[i % len(rhos)]
        a = random_channel(rng, max_support=3)
        tag = H if i % 2 == 0 else B
        d = rho.degree + int(rng.integers(0, 2))
        value = symmetrized_objective(rho, tag, [a] * d)
        want = phi_of_poly(tag, rho, a, tol=1e-11).value
        assert abs(value - want) <= 1e-9


def test_symmetrized_erasure_square():
    assert symmetrized_objective(
        Polynomial.monomial(2), H, [bec(0.3), bec(0.3)]
    ) == pytest.approx(0.51, abs=1e-12)


def test_symmetrized_single_coordinate_identity():
    a = bsc(0.17)
    assert symmetrized_objective(Polynomial((1.0,)), H, [a]) == pytest.approx(
        evaluate(H, a), abs=1e-15
    )


def test_symmetrized_requires_enough_coordinates():
    with pytest.raises(ValueError):
        symmetrized_objective(Polynomial.monomial(3), H, [bsc(0.1), bsc(0.2)])


# ----------------------------------------------------------------------
# coordinate descent


def test_descent_validates_arguments():
    rho = Polynomial.monomial(2)
    with pytest.raises(ValueError):
        coordinate_descent(rho, H, 1.5)
    with pytest.raises(ValueError):
        coordinate_descent(rho, H, 0.5, num_vars=1)
    with pytest.raises(ValueError):
        coordinate_descent(rho, H, 0.5, tol=0.0)


def test_descent_trace_is_monotone_and_coords_feasible():
    rho = poly_from_string("x^5-0.75x^6")
    for minimize in (True, False):
        res = coordinate_descent(rho, H, 0.35, minimize=minimize, seed=5, max_sweeps=30)
        objs = [t.objective for t in res.trace]
        if minimize:
            assert all(a >= b for a, b in zip(objs, objs[1:]))
        else:
            assert all(a <= b for a, b in zip(objs, objs[1:]))
        for c in res.coords:
            assert abs(c.constraint_value(H) - 0.35) <= 1e-10
        # the canonical objective agrees with the delta-accumulated one
        assert res.objective == pytest.approx(res.running_objective, abs=1e-10)


def test_descent_identity_objective_is_flat():
    # rho = X fixes the objective to the constraint level on the feasible set
    res = coordinate_descent(Polynomial((1.0,)), H, 0.4, seed=2, max_sweeps=10)
    assert res.objective == pytest.approx(0.4, abs=1e-10)
    assert res.converged


def test_descent_finds_bsc_minimizer_and_bec_maximizer():
    p = EnsembleParams(3, 6)
    for seed in (0, 1):
        res_min = coordinate_descent(p.area_poly, H, 0.45, minimize=True, seed=seed)
        assert res_min.verdict is Verdict.ALL_EQUAL_BSC
        res_max = coordinate_descent(p.area_poly, H, 0.45, minimize=False, seed=seed)
        assert res_max.verdict is Verdict.ALL_EQUAL_BEC


def test_descent_objective_matches_extremal_values():
    p = EnsembleParams(3, 6)
    from eicomb.convolution import phi_of_poly_convolved

    res_min = coordinate_descent(p.area_poly, H, 0.45, minimize=True, seed=3)
    want = phi_of_poly_convolved(H, p.area_poly, bsc(h2_inv(0.45)))
    assert res_min.objective == pytest.approx(want, abs=1e-9)
    res_max = coordinate_descent(p.area_poly, H, 0.45, minimize=False, seed=3)
    want = phi_of_poly_convolved(H, p.area_poly, bec(0.45))
    assert res_max.objective == pytest.approx(want, abs=1e-9)


def test_descent_supports_error_probability_constraint():
    res = coordinate_descent(
        Polynomial.monomial(2), H, 0.15, constraint=E, minimize=False, seed=1
    )
    for c in res.coords:
        assert abs(c.constraint_value(E) - 0.15) <= 1e-10
    # fixed-E maximizer of an increasing polynomial objective is the BSC
    assert res.verdict is Verdict.ALL_EQUAL_BSC


def test_descent_fixed_error_minimizer_is_bec():
    res = coordinate_descent(
        Polynomial.monomial(2), H, 0.15, constraint=E, minimize=True, seed=1
    )
    assert res.verdict is Verdict.ALL_EQUAL_BEC


def test_claim_cells_driver_shape():
    p = EnsembleParams(3, 6)
    cells = extremal_channel_cells(p.area_poly, [0.45], [0, 1, 2])
    assert len(cells) == 2  # one entropy, both directions
    for cell in cells:
        assert cell.seeds == 3
        assert cell.hits == 3
        assert cell.hit_fraction == 1.0
