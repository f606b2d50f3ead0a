import json
import os
import pathlib

import numpy as np
import pytest

import frequc

DATA = pathlib.Path(os.environ.get("FREQUC_DATA_DIR", pathlib.Path(__file__).resolve().parents[2] / "data"))


def scenario(name):
    return json.loads((DATA / "scenarios" / name).read_text())


def test_rocof_and_qss():
    s = scenario("g1_only_peak.json")
    assert frequc.rocof_initial(s) == pytest.approx(0.2625, abs=1e-12)
    assert frequc.qss_closed_form(s) == pytest.approx(0.5131, abs=1e-4)


def test_simulate_matches_reference_nadir():
    out = frequc.simulate(scenario("all_online.json"))
    assert out["nadir_df"] == pytest.approx(0.3884, rel=0.01)
    df = np.asarray(out["df"])
    assert df.max() == pytest.approx(out["nadir_df"])
    assert len(out["t"]) == len(df)


def test_spline_nadir_tightens_with_segments():
    s = scenario("all_online.json")
    oracle = frequc.simulate(s)["nadir_df"]
    errs = [abs(frequc.spline_nadir(s, 30.0, segments=n)[0] - oracle) for n in (1, 2, 8)]
    assert errs[0] > errs[1] > errs[2]
    uneven = frequc.spline_nadir(s, 30.0, fractions=[0.1, 0.2, 0.3, 0.4])[0]
    assert abs(uneven - oracle) / oracle <= 1e-3
    with pytest.raises(frequc.ConfigError):
        frequc.spline_nadir(s, 30.0)


def test_bernstein_hull_bounds_samples():
    rng = np.random.default_rng(3)
    for _ in range(200):
        c = rng.uniform(-5, 5, 4)
        top = max(frequc.bernstein_eval(c, t) for t in np.linspace(0, 1, 201))
        assert frequc.bernstein_hull_max(c, 2) >= top - 1e-12


def test_gaussian_threshold_by_sampling():
    cp = frequc.risk_coefficient(0.1, 0.0, 3.0, "gaussian")
    th = frequc.drcc_threshold(30.0, 3.0, cp)
    draws = np.random.default_rng(7).normal(30.0, 3.0, 200_000)
    assert np.mean(draws < th) <= 0.1 + 0.005
    with pytest.raises(frequc.DomainError):
        frequc.risk_coefficient(0.7, 0.0, 3.0)


def test_solve_without_frequency_rows(tmp_path):
    sol = frequc.solve(DATA / "six_bus", mode="no_freq", gap=0.005)
    assert sol["status"] in ("optimal", "feasible_gap")
    assert not sol["security"]["all_pass"]
    code = frequc.run_cli(["report", "-q", "-i", str(DATA / "six_bus" / "missing.json"), "-o", str(tmp_path)])
    assert code == 2
