import math

import pytest

import hjbi


def test_paper_spec_values():
    s = hjbi.paper_spec()
    assert s.psi0 == 0.5
    assert s.horizon == 50.0
    assert s.disutility_f(0.5) == 0.0
    assert s.growth_a(0.5) == 0.25
    assert hjbi.validate_spec(s) == []
    c = hjbi.paper_spec(with_control=True)
    assert c.cost_h(1.0) == pytest.approx(0.1)


def test_validation_reports_violations():
    s = hjbi.paper_spec()
    s.psi0 = -0.5
    assert any("psi0 must be > 0" in v for v in hjbi.validate_spec(s))


def test_interp_weights():
    i, left, right = hjbi.interp_weights(10, 0.37)
    assert i == 3
    assert left == pytest.approx(0.3)
    assert right == pytest.approx(0.7)


def test_local_optimizers():
    c = hjbi.paper_spec(True)
    assert hjbi.optimal_lambda(c, 0.5, 2.0) == pytest.approx((0.25, -0.0625))
    assert hjbi.optimal_q(c, 0.5, 2.0) == pytest.approx((1.0, -0.1))
    assert hjbi.hamiltonian(c, 0.5, 2.0) == pytest.approx(0.1625)


def test_nonlocal_closed_form():
    n = 100
    phi = [i / n for i in range(n + 1)]
    d = hjbi.JumpDensity.uniform(0.2, 0.4)
    out = hjbi.apply_nonlocal(phi, d, "down", nu=1.0, psi=0.5)
    assert abs(out["delta"][-1] - 0.3) <= 2e-3
    assert abs(out["values"][-1] - 2 * (1 - math.exp(-0.15))) <= 2e-3
    assert abs(hjbi.apply_expectation(phi, d, "up")[0] - 0.3) <= 2e-3


def test_small_solve():
    s = hjbi.paper_spec(True)
    s.horizon = 1.0
    r = hjbi.solve(s, n_cells=50, dt=0.02, snapshot_times=[0.5])
    assert len(r["phi"]) == 51
    assert min(r["phi"]) >= 0.0
    assert max(r["phi"]) <= 1.0 + 1e-8
    assert 0.0 <= r["E_mean"] <= 1.0
    assert len(r["iteration_counts"]) == 50
    assert r["snapshots"][0]["time"] == pytest.approx(0.5)
    assert set(r["controls"]["q_star"]) <= {0.0, 1.0}


def test_mc_check_agrees():
    s = hjbi.paper_spec()
    s.horizon = 0.5
    r = hjbi.mc_check(s, n_cells=60, dt=0.01, n_paths=3000, dt_sim=1e-3)
    assert abs(r["mc_mean"] - r["pde_value"]) <= 3 * r["mc_std_err"] + 0.02


def test_iteration_failure_is_raised():
    s = hjbi.paper_spec()
    s.horizon = 0.1
    with pytest.raises(hjbi._hjbi.IterationFailure):
        hjbi.solve(s, n_cells=20, dt=0.05, max_iter=1)


def test_run_config(tmp_path):
    code, log = hjbi.run_config(
        'run.command = "sweep"\nsweep.param = "psi0"\nsweep.values = [0.25, 1.0]\n'
        "grid.n_cells = 30\ntime.dt = 0.05\nmodel.horizon = 1.0",
        str(tmp_path),
    )
    assert code == 0
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert rows[0].startswith("# resolved:")
    assert len(rows) == 4
    with pytest.raises(ValueError):
        hjbi.run_config("model.bogus = 1", str(tmp_path))
