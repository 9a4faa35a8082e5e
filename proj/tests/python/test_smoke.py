import math

import numpy as np
import pytest

import cbfed


def test_projection_examples():
    out = cbfed.project_lambda([0.5, -2.0, 1.0, 3.0])
    assert np.allclose(out, [0.5, -1.0, 1.0, 1.0])


def test_friction_law():
    law = cbfed.FrictionLaw()
    law.a, law.b, law.rho = 2.0, 0.5, 3.0
    assert law.omega(0.0) == pytest.approx(2.0)
    assert law.omega(50.0) == pytest.approx(0.5)
    law.b = 3.0
    with pytest.raises(ValueError):
        law.validate()


def test_unknown_case_rejected():
    with pytest.raises(ValueError):
        cbfed.case_params("ex7")


def test_solve_ex2_small_grid():
    r = cbfed.solve("ex2", 8)
    assert r["report"]["converged"]
    assert len(r["x"]) == 81
    assert np.all(np.abs(r["lambda"]) <= 1.0 + 1e-12)
    # Velocity vanishes on the bottom edge.
    bottom = r["y"] == 0.0
    assert np.all(r["u_x"][bottom] == 0.0) and np.all(r["u_y"][bottom] == 0.0)
    # Nodal values are close to the analytic field in the interior.
    k = int(np.argmin((r["x"] - 0.5) ** 2 + (r["y"] - 0.5) ** 2))
    ux, uy, _ = cbfed.exact_solution("ex2", r["x"][k], r["y"][k])
    assert abs(r["u_x"][k] - ux) < 0.2 and abs(r["u_y"][k] - uy) < 0.2


def test_zero_forcing_gives_zero_solution():
    r = cbfed.solve("ex1", 5, forcing=lambda x, y: (0.0, 0.0))
    assert r["report"]["outer_iterations"] == 1
    assert np.all(r["u_x"] == 0.0) and np.all(r["p"] == 0.0)


def test_repeat_solves_identical():
    a = cbfed.solve("ex3", 6)
    b = cbfed.solve("ex3", 6)
    assert np.array_equal(a["u_x"], b["u_x"]) and np.array_equal(a["p"], b["p"])


def test_small_convergence_study():
    rows = cbfed.convergence_study("ex2", grids=[4, 8], n_ref=16)
    assert [r["grid"] for r in rows] == [4, 8]
    assert math.isnan(rows[0]["ord_l2_u"])
    assert rows[1]["e_l2_u"] < rows[0]["e_l2_u"]


def test_checks_pass():
    beta = cbfed.inf_sup_constant(4)
    assert 0.0 < beta < 1.0
    weighted, strong = cbfed.check_monotonicity(3.0, 2000, 5)
    assert weighted >= -1e-12 and strong >= -1e-12
    assert all(ok for _, ok, _ in cbfed.run_checks(samples=2000))
