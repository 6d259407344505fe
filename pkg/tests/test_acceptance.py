"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion
lines. Everything uses the bundled fixture worlds at 1x32x32 latents and
T = 50; statistical criteria run their stated number of seeds at their
stated thresholds.
"""

import json
import math
import time

import numpy as np
import pytest

from progedit import fixtures as fx
from progedit.bounds import recommend_tds, verify_bound
from progedit.cli import main as cli_main
from progedit.grids import EncoderConfig, add_noise, decode, encode
from progedit.metrics import boundary_smoothness, realism_proxy
from progedit.pnm import write_map_bytes, write_pnm
from progedit.rng import substream
from progedit.scheduler import (
    THRESHOLD_KINDS,
    EditParams,
    naive_blend_baseline,
    progressive_edit,
    progressive_edit_multi,
    spatial_noise_baseline,
    threshold_auc,
    threshold_value,
)
from progedit.worlds import full_reverse, gmm_score

from test_worlds import fd_gradient


CFG = EncoderConfig()
SEAM_T_DS = 30  # strength for the paired baseline comparisons


def report(n: int, text: str) -> None:
    print(f"\n[criterion {n:2d}] PASS: {text}")


def params_with(**kw):
    base = dict(T=50, t_ds_max=50, threshold="linear", mode="ancestral", seed=0)
    base.update(kw)
    return EditParams(**base)


def test_criterion_1_degenerate_reductions(two_texture, seam_inputs, tau_adh):
    start = time.time()
    x1, x2, mu = seam_inputs
    params = params_with(seed=31)

    run0 = progressive_edit(x1, x2, np.zeros_like(mu), params, two_texture, CFG)
    z2n = add_noise(encode(x2, CFG), 50, params.schedule(), substream(31, "init"))
    oracle = decode(
        full_reverse(z2n, 50, params.schedule(), two_texture,
                     rng=substream(31, "stepper")),
        CFG,
    )
    assert np.array_equal(run0.output, oracle), "mu=0 must be exemplar img2img bit-exactly"

    run1 = progressive_edit(x1, x2, np.ones_like(mu), params, two_texture, CFG)
    rmse = float(np.sqrt(np.mean((run1.output - x1) ** 2)))
    assert rmse <= tau_adh, f"mu=1 RMSE {rmse} above tau_adh {tau_adh}"

    elapsed = time.time() - start
    assert elapsed < 10.0
    report(1, f"mu=0 bit-exact img2img; mu=1 RMSE {rmse:.4f} <= tau_adh "
              f"{tau_adh:.4f} ({elapsed:.1f}s)")


def test_criterion_2_multi_exemplar_reduction(two_texture, seam_inputs):
    start = time.time()
    x1, x2, mu = seam_inputs
    x3 = fx.texture_b(1.0)
    ones = np.ones_like(mu)
    for seed in range(10):
        single = progressive_edit(x1, x2, mu, params_with(seed=seed), two_texture, CFG)
        double = progressive_edit_multi(
            x1, [(x2, mu), (x3, ones)], params_with(seed=seed), two_texture, CFG
        )
        assert np.array_equal(single.output, double.output), f"seed {seed} diverged"
    elapsed = time.time() - start
    assert elapsed < 30.0
    report(2, f"two-exemplar run with all-ones second map bit-identical to "
              f"single-exemplar across 10 seeds ({elapsed:.1f}s)")


def test_criterion_3_mask_schedule_invariants(two_texture, seam_inputs):
    x1, x2, mu = seam_inputs
    checked = 0
    for kind in THRESHOLD_KINDS:
        for t_ds in (50, 30):
            run = progressive_edit(
                x1, x2, mu, params_with(threshold=kind, t_ds_max=t_ds, seed=4),
                two_texture, CFG, retain_masks=True,
            )
            masks = run.per_step_masks
            assert len(masks) == t_ds
            assert np.array_equal(masks[0], mu > 0), f"{kind}: opening mask wrong"
            for earlier, later in zip(masks, masks[1:]):
                assert not np.any(later & ~earlier), f"{kind}: masks not nested"
            checked += len(masks)
    report(3, f"masks nested per element and opening mask equals mu_d > 0 "
              f"across {checked} steps, all 5 threshold kinds")


def test_criterion_4_threshold_dominance():
    n = 100
    for i in range(n):
        log_v = threshold_value("log", i, n)
        lin = threshold_value("linear", i, n)
        quad = threshold_value("quadratic", i, n)
        cub = threshold_value("cubic", i, n)
        assert log_v >= lin >= quad >= cub, f"dominance violated at i={i}"
    aucs = {k: threshold_auc(k, n) for k in ("log", "linear", "quadratic", "cubic")}
    assert aucs["log"] > aucs["linear"] > aucs["quadratic"] > aucs["cubic"]
    assert aucs["linear"] == 0.495
    report(4, f"pointwise log >= linear >= quadratic >= cubic at all {n} grid "
              f"points; AUC strictly ordered; linear AUC == 0.495 exactly")


def test_criterion_5_lemma_coverage(single_gaussian, seam_inputs, sched_default):
    start = time.time()
    x1, x2, mu = seam_inputs
    z_surgical = np.where((mu > 0.5)[None], encode(x1, CFG), encode(x2, CFG))
    coverages = {}
    for p in (0.1, 0.5):
        rep = verify_bound(single_gaussian, z_surgical, 25, sched_default,
                           p, 1000, seed=77)
        floor = (1 - p) - 3 * math.sqrt(p * (1 - p) / 1000)
        assert rep.empirical_coverage >= floor, (
            f"p={p}: coverage {rep.empirical_coverage} below {floor}"
        )
        coverages[p] = rep.empirical_coverage
    elapsed = time.time() - start
    assert elapsed < 120.0
    report(5, f"per-realization coverage {coverages} over 1000 trajectories at "
              f"p in {{0.1, 0.5}} ({elapsed:.1f}s)")


def test_criterion_6_score_correctness(two_texture, single_gaussian):
    worst = 0.0
    for world in (two_texture, single_gaussian):
        rng = np.random.default_rng(8)
        for _ in range(20):
            z = rng.normal(0.5, 0.6, size=world.shape)
            sigma = float(rng.uniform(0.0, 2.0))
            score = gmm_score(z, sigma, world)
            fd = fd_gradient(z, sigma, world)
            rel = float(np.linalg.norm(score - fd) / np.linalg.norm(fd))
            worst = max(worst, rel)
            assert rel <= 1e-4, f"relative error {rel} above 1e-4"
    report(6, f"analytic score matches central differences at 20 points per "
              f"fixture world, worst relative error {worst:.2e}")


def test_criterion_7_seam_quality_trend(two_texture, seam_inputs):
    start = time.time()
    x1, x2, mu = seam_inputs
    wins = 0
    for seed in range(20):
        params = params_with(t_ds_max=SEAM_T_DS, seed=seed)
        prog = progressive_edit(x1, x2, mu, params, two_texture, CFG)
        naive = naive_blend_baseline(x1, x2, mu, params, two_texture, CFG)
        wins += boundary_smoothness(prog.output, mu) < boundary_smoothness(naive.output, mu)
    elapsed = time.time() - start
    assert wins >= 18, f"progressive smoother in only {wins}/20 paired seeds"
    assert elapsed < 120.0
    report(7, f"progressive seam smoother than naive surgical blend in "
              f"{wins}/20 paired seeds ({elapsed:.1f}s)")


def test_criterion_8_spatial_noise_failure_mode(two_texture, seam_inputs):
    x1, x2, mu = seam_inputs
    wins = 0
    for seed in range(20):
        params = params_with(t_ds_max=SEAM_T_DS, seed=seed)
        prog = progressive_edit(x1, x2, mu, params, two_texture, CFG)
        spatial = spatial_noise_baseline(x1, x2, mu, params, two_texture, CFG)
        wins += realism_proxy(spatial.output, two_texture, CFG) < \
            realism_proxy(prog.output, two_texture, CFG)
    assert wins >= 18, f"spatial-noise less realistic in only {wins}/20 seeds"
    report(8, f"spatial-noise baseline less realistic than progressive in "
              f"{wins}/20 paired seeds")


def test_criterion_9_strength_tradeoff_trend(ladder_world):
    src, exemplars, mu = fx.ladder_inputs()
    floor = fx.default_realism_floor([src] + exemplars, ladder_world, CFG)
    monotone = 0
    for seed in range(20):
        recs = [
            recommend_tds(src, e, mu, ladder_world, CFG, floor,
                          EditParams(T=50, seed=seed)).t_ds
            for e in exemplars
        ]
        monotone += all(a <= b for a, b in zip(recs, recs[1:]))
    assert monotone >= 16, f"recommendation monotone in only {monotone}/20 seeds"

    # fixed-strength contrast at 0.2 T: the most distant exemplar falls short
    shortfall = 0
    for seed in range(20):
        run = progressive_edit(src, exemplars[-1], mu,
                               EditParams(T=50, t_ds_max=10, seed=seed),
                               ladder_world, CFG)
        shortfall += realism_proxy(run.output, ladder_world, CFG) < floor
    assert shortfall >= 18, f"fixed-strength shortfall in only {shortfall}/20 seeds"
    report(9, f"recommended strength non-decreasing with latent distance in "
              f"{monotone}/20 seeds; fixed 0.2T strength under-realistic for the "
              f"most distant exemplar in {shortfall}/20 seeds")


def test_criterion_10_cli_determinism(tmp_path):
    d = tmp_path
    x1, x2, mu = fx.two_texture_inputs()
    write_pnm(d / "source.pgm", x1)
    write_pnm(d / "exemplar.pgm", x2)
    write_pnm(d / "exemplar2.pgm", fx.texture_b(1.0))
    (d / "map.pgm").write_bytes(write_map_bytes(mu))
    (d / "map2.pgm").write_bytes(write_map_bytes(fx.band_map(32, 32, 16, 30)))
    base = {
        "source": "source.pgm",
        "exemplars": ["exemplar.pgm"],
        "maps": ["map.pgm"],
        "T": 50, "t_ds_max": 15, "seed": 12,
        "world": {"fixture": "two-texture"},
        "emit": {"result": True, "step_masks": True, "score_json": True},
    }
    multi = dict(base, exemplars=["exemplar.pgm", "exemplar2.pgm"],
                 maps=["map.pgm", "map2.pgm"])
    bound = dict(base, world={"fixture": "single-gaussian"},
                 bound={"t_ds": 10, "p_tail": 0.5, "n_runs": 150, "b_samples": 4})
    sweep = dict(multi, sweep={"realism_floor": 1.297, "fixed_tds": 10},
                 emit={"result": False})
    (d / "base.json").write_text(json.dumps(base))
    (d / "multi.json").write_text(json.dumps(multi))
    (d / "bound.json").write_text(json.dumps(bound))
    (d / "sweep.json").write_text(json.dumps(sweep))

    invocations = [
        ("edit", ["edit", "--config", str(d / "base.json")]),
        ("multi-edit", ["multi-edit", "--config", str(d / "multi.json")]),
        ("iterate", ["iterate", "--config", str(d / "multi.json")]),
        ("baseline naive", ["baseline", "naive", "--config", str(d / "base.json")]),
        ("baseline spatial-noise",
         ["baseline", "spatial-noise", "--config", str(d / "base.json")]),
        ("schedule-viz", ["schedule-viz", "--config", str(d / "base.json")]),
        ("bound-check", ["bound-check", "--config", str(d / "bound.json")]),
        ("sweep-tds", ["sweep-tds", "--config", str(d / "sweep.json")]),
    ]
    for i, (name, argv) in enumerate(invocations):
        out_a = d / f"run{i}a"
        out_b = d / f"run{i}b"
        assert cli_main(argv + ["--out", str(out_a)]) == 0, f"{name} failed"
        assert cli_main(argv + ["--out", str(out_b)]) == 0, f"{name} rerun failed"
        files_a = {p.name: p.read_bytes() for p in sorted(out_a.iterdir())}
        files_b = {p.name: p.read_bytes() for p in sorted(out_b.iterdir())}
        assert files_a == files_b, f"{name}: artifacts differ between runs"
        assert files_a, f"{name}: produced no artifacts"
    report(10, f"all {len(invocations)} CLI subcommands byte-identical across "
               f"repeated runs")
