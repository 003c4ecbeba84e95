import json
import math

import numpy as np
import pytest

from irsa.degree import make_distribution, named_distribution
from irsa.errors import ConfigError
from irsa.fastsim import FrameStats, simulate_frames
from irsa.frame import FixedActivity
from irsa.harness import (
    ExperimentConfig,
    binomial_ci,
    config_from_mapping,
    load_config,
    load_range,
    ratio_ci,
    read_csv,
    run_point,
    run_sweep,
    seed_stream,
    write_outputs,
)
from irsa.scaling import builtin_params, waterfall_center


def make_cfg(**kw):
    base = dict(dist="x3", m=50, load_grid=[0.5], max_frames=2000, target_errors=0, seed=5)
    base.update(kw)
    return config_from_mapping(base)


def test_seed_stream():
    assert seed_stream(1, 2, 3) == seed_stream(1, 2, 3)
    assert seed_stream(1, 0, 0) != seed_stream(1, 0, 1)
    assert seed_stream(1, 0, 1) != seed_stream(1, 1, 0)
    seeds = {seed_stream(42, p, w) for p in range(1000) for w in range(10)}
    assert len(seeds) == 10_000
    assert all(0 <= s < 2**64 for s in seeds)


@pytest.mark.parametrize(
    "override",
    [
        {"load_grid": []},
        {"load_grid": [0.5, 0.4]},
        {"load_grid": [0.5, 0.5]},
        {"load_grid": [-0.1, 0.2]},
        {"max_frames": 0},
        {"target_errors": -1},
        {"workers": 0},
        {"activity": "bernoulli"},
        {"activity": "binomial"},
        {"m": 2},
        {"dist": "3:0.5,4:0.5", "emit_prediction": True},
        {"bogus_field": 1},
    ],
)
def test_config_validation(override):
    with pytest.raises(ConfigError):
        make_cfg(**override)


def test_custom_dist_with_alpha_beta_predicts():
    cfg = make_cfg(dist={3: 1.0}, emit_prediction=True, alpha0=0.497867, beta0=0.964528)
    row = run_point(cfg, 0.5)
    ref = run_point(make_cfg(emit_prediction=True), 0.5)
    assert row.fep_pred == pytest.approx(ref.fep_pred, rel=1e-4)


def test_load_range():
    assert load_range(0.55, 0.95, 0.01)[-1] == 0.95
    assert len(load_range(0.55, 0.95, 0.01)) == 41
    assert load_range(0.1, 0.3, 0.1) == (0.1, 0.2, 0.3)


def test_run_point_deterministic():
    cfg = make_cfg(load_grid=[0.7], target_errors=50)
    a, b = run_point(cfg, 0.7), run_point(cfg, 0.7)
    assert a == b
    assert a.frame_errors == 50


def test_workers_reproducible():
    cfg = make_cfg(load_grid=[0.7], workers=3, max_frames=5000, target_errors=100)
    a, b = run_point(cfg, 0.7), run_point(cfg, 0.7)
    assert a == b
    assert a.frame_errors >= 100
    capped = run_point(make_cfg(workers=3, max_frames=4321), 0.5)
    assert capped.frames_run == 4321


def test_single_point_sweep_equals_run_point():
    cfg = make_cfg(load_grid=[0.6], emit_prediction=True, emit_floor=True)
    assert run_sweep(cfg).rows == [run_point(cfg, 0.6)]


def test_low_load_point_sees_almost_nothing():
    cfg = make_cfg(m=200, load_grid=[0.05], max_frames=10_000, emit_floor=True)
    row = run_point(cfg, 0.05)
    # ~0.4 expected identical-triple pairs in 1e4 frames
    assert row.frame_errors <= 5
    assert row.fep_floor == pytest.approx(50 / math.comb(200, 3), rel=1e-4)
    if row.frame_errors:
        assert row.fer_ci > 0.5 * row.fer


def test_waterfall_center_at_m50():
    params = builtin_params("x3")
    g = waterfall_center(50, params)
    row = run_point(make_cfg(load_grid=[g], max_frames=10_000, emit_prediction=True), g)
    assert row.plp_pred == pytest.approx(0.5 * params.gamma)
    assert abs(row.fer - 0.5) <= 3 * row.fer_ci


def test_row_invariants_and_ordering():
    cfg = make_cfg(load_grid=load_range(0.5, 0.9, 0.1), max_frames=3000, target_errors=200)
    for row in run_sweep(cfg).rows:
        assert row.frame_errors <= row.frames_run
        assert row.packets_lost <= row.packets_sent
        assert row.fer == row.frame_errors / row.frames_run
        assert row.plr == row.packets_lost / row.packets_sent
        if row.frames_run >= 1000 and row.frame_errors >= 10:
            assert row.fer >= row.plr


def test_binomial_ci_coverage():
    rng = np.random.default_rng(3)
    p, n = 0.1, 500
    hits = sum(abs(k / n - p) <= binomial_ci(k, n) for k in rng.binomial(n, p, size=1000))
    assert hits >= 900


def test_ratio_ci_coverage():
    # two degree-2 users in 4 slots: both lost iff identical, PLR = 1/6 exactly
    rng = np.random.default_rng(4)
    dist = make_distribution({2: 1.0})
    hits = 0
    for _ in range(300):
        s = simulate_frames(4, dist, FixedActivity(2), rng, 400)
        hits += abs(s.packets_lost / s.packets_sent - 1 / 6) <= ratio_ci(s)
    assert hits >= 270


def test_ratio_ci_matches_binomial_when_packets_fixed():
    # one packet per frame: ratio CI degenerates to the binomial one up to n/(n-1)
    s = FrameStats.from_frames(np.ones(1000, dtype=int), np.r_[np.ones(100), np.zeros(900)].astype(int))
    assert ratio_ci(s) == pytest.approx(binomial_ci(100, 1000) * math.sqrt(1000 / 999))


def test_csv_and_sidecar(tmp_path):
    cfg = make_cfg(load_grid=[0.6, 0.7], emit_prediction=True, emit_floor=True)
    result = run_sweep(cfg)
    text = result.to_csv()
    header = text.splitlines()[0]
    assert header == ("g,frames_run,frame_errors,packets_sent,packets_lost,fer,fer_ci,plr,plr_ci,"
                      "fep_pred,plp_pred,fep_floor,plp_floor")
    plain = run_sweep(make_cfg(load_grid=[0.6])).to_csv().splitlines()[0]
    assert plain == "g,frames_run,frame_errors,packets_sent,packets_lost,fer,fer_ci,plr,plr_ci"
    meta = write_outputs(result, tmp_path / "out.csv")
    data = json.loads(meta.read_text())
    assert data["config"]["seed"] == 5 and data["config"]["dist"] == "x3"
    assert data["version"]
    rows = read_csv(tmp_path / "out.csv")
    assert [r["g"] for r in rows] == [0.6, 0.7]
    assert rows[0]["frames_run"] == 2000


def test_yaml_config(tmp_path):
    path = tmp_path / "cfg.yaml"
    path.write_text(
        "dist: '3:0.86,8:0.14'\n"
        "m: 50\n"
        "load_grid: {start: 0.5, stop: 0.7, step: 0.1}\n"
        "activity: binomial:5000\n"
        "max_frames: 500\n"
        "target_errors: 50\n"
        "seed: 9\n"
        "workers: 1\n"
        "emit_floor: true\n"
        "emit_prediction: true\n"
    )
    cfg = load_config(path)
    assert cfg.dist_name == "lambda2" and cfg.population == 5000
    assert cfg.load_grid == (0.5, 0.6, 0.7)
    assert load_config(path, seed=10).seed == 10
    (tmp_path / "bad.yaml").write_text("- just\n- a list\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.yaml")


def test_activity_variants_run():
    for activity in ("poisson", "binomial:1000", "fixed"):
        row = run_point(make_cfg(activity=activity, max_frames=300), 0.5)
        assert row.frames_run == 300
    fixed = run_point(make_cfg(activity="fixed", max_frames=300), 0.5)
    assert fixed.packets_sent == 300 * 25
