import dataclasses
import json
import os

import numpy as np
import pytest

from sykqrc import harness, tasks
from sykqrc.ensembles import ModelSpec
from sykqrc.harness import ExperimentConfig, derive_seed
from sykqrc.tasks import SplitSpec


def small_qrc_config(**kw):
    base = dict(model=ModelSpec(N=3, J4=1.0),
                split=SplitSpec(20, 60, 40),
                task=tasks.stm_task(1),
                sweep_name='dt_in', sweep_values=(1.0, 10.0),
                realizations=3, master_seed=42, V=4)
    base.update(kw)
    return ExperimentConfig(**base)


class TestSeeds:
    def test_deterministic(self):
        assert derive_seed(7, 3, "model") == derive_seed(7, 3, "model")

    def test_distinct_across_arguments(self):
        s = derive_seed(7, 3, "model")
        assert s != derive_seed(7, 4, "model")
        assert s != derive_seed(8, 3, "model")
        assert s != derive_seed(7, 3, "inputs")

    def test_64_bit_range(self):
        for i in range(50):
            s = derive_seed(123, i, "x")
            assert 0 <= s < 2 ** 64

    def test_no_collisions_bulk(self):
        seen = set()
        for master in (0, 1):
            for i in range(2000):
                for role in ("model", "inputs", "init"):
                    seen.add(derive_seed(master, i, role))
        assert len(seen) == 2 * 2000 * 3

    def test_no_separator_ambiguity(self):
        # "1|23" vs "12|3" style collisions must not occur
        assert derive_seed(1, 23, "x") != derive_seed(12, 3, "x")


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            small_qrc_config(sweep_name='coupling')
        with pytest.raises(ValueError):
            small_qrc_config(sweep_values=())
        with pytest.raises(ValueError):
            small_qrc_config(realizations=0)

    def test_kappa_sweep_forces_normalization(self):
        cfg = small_qrc_config(sweep_name='kappa_ratio', sweep_values=(0.1, 10.0))
        assert cfg.model.normalize

    def test_model_at(self):
        cfg = small_qrc_config(sweep_name='kappa_ratio', sweep_values=(0.5, 2.0),
                               model=ModelSpec(N=4, J4=2.0))
        assert cfg.model_at(0.5).kappa2 == pytest.approx(1.0)
        cfg2 = small_qrc_config(sweep_name='system_size', sweep_values=(4, 6))
        assert cfg2.model_at(6).N == 6

    def test_task_and_dt_at(self):
        cfg = small_qrc_config(sweep_name='delay', sweep_values=(0, 3))
        assert cfg.task_at(3).d == 3
        assert cfg.dt_at(3) == cfg.dt_in
        cfg2 = small_qrc_config()
        assert cfg2.dt_at(10.0) == 10.0
        assert cfg2.sigma_at(10.0) == cfg2.noise_sigma

    def test_json_roundtrip(self, tmp_path):
        cfg = small_qrc_config(task=tasks.narma_task(2), noise_sigma=1e-4)
        path = tmp_path / "cfg.json"
        harness.save_config(cfg, path)
        back = harness.load_config(path)
        assert back == cfg
        with open(path) as f:
            assert json.load(f)['schema_version'] == harness.SCHEMA_VERSION


class TestAggregate:
    def test_basic_stats(self):
        agg = harness._aggregate(np.array([1.0, 2.0, 3.0]))
        assert agg['mean'] == pytest.approx(2.0)
        assert agg['std'] == pytest.approx(1.0)
        assert agg['stderr'] == pytest.approx(1.0 / np.sqrt(3))
        assert agg['median'] == pytest.approx(2.0)
        assert agg['n'] == 3 and agg['failures'] == 0

    def test_nan_counted_as_failure(self):
        agg = harness._aggregate(np.array([1.0, np.nan, 3.0]))
        assert agg['n'] == 2 and agg['failures'] == 1
        assert agg['mean'] == pytest.approx(2.0)


class TestLevels:
    def test_sweep_shape_and_files(self, tmp_path):
        cfg = small_qrc_config(
            model=ModelSpec(N=6, J4=1.0), sweep_name='kappa_ratio',
            sweep_values=(0.1, 50.0), realizations=8,
            output_dir=str(tmp_path / "lv"))
        res = harness.run_levels(cfg)
        assert len(res['mean_r']) == 2
        assert all(0.3 < r < 0.7 for r in res['mean_r'])
        assert 'boundaries' in res
        assert (tmp_path / "lv" / "levels.csv").exists()
        assert (tmp_path / "lv" / "manifest_levels.json").exists()
        # histograms integrate to one
        edges, dens = res['histograms'][0.1]
        assert np.sum(dens * np.diff(edges)) == pytest.approx(1.0)

    def test_reproducible(self):
        cfg = small_qrc_config(model=ModelSpec(N=6, J4=1.0),
                               sweep_name='system_size', sweep_values=(6,),
                               realizations=5)
        a = harness.run_levels(cfg)
        b = harness.run_levels(cfg)
        np.testing.assert_array_equal(a['mean_r'], b['mean_r'])


class TestSff:
    def test_curve_shape(self, tmp_path):
        cfg = small_qrc_config(model=ModelSpec(N=6, J4=1.0),
                               sweep_name='system_size', sweep_values=(6,),
                               realizations=30, sff_t_points=120,
                               output_dir=str(tmp_path / "sf"))
        res = harness.run_sff(cfg)
        curve = res['curves'][0]
        # the log grid starts at t = 1e-2, so K is just below 1 there
        assert curve.K[0] == pytest.approx(1.0, abs=1e-2)
        assert res['sector_dims'][0] == 20
        # late times sit near the plateau 1/20
        late = curve.K[curve.t_grid > 2e3]
        assert np.median(late) == pytest.approx(1 / 20, rel=0.35)
        assert (tmp_path / "sf" / "sff_plateau.csv").exists()


class TestQrcSweep:
    def test_runs_and_aggregates(self, tmp_path):
        cfg = small_qrc_config(output_dir=str(tmp_path / "q"))
        res = harness.run_qrc_sweep(cfg)
        assert res['per_realization'].shape == (2, 3)
        assert not res['errors']
        assert np.all(np.isfinite(res['per_realization']))
        # delay-1 memory at N=3 is decent for both dt values
        assert all(a['mean'] > 0.3 for a in res['aggregates'])
        assert (tmp_path / "q" / "qrc_sweep.csv").exists()

    def test_paired_seeds_order_invariant(self):
        cfg = small_qrc_config(sweep_values=(1.0, 10.0))
        res_fwd = harness.run_qrc_sweep(cfg)
        cfg_rev = dataclasses.replace(cfg, sweep_values=(10.0, 1.0))
        res_rev = harness.run_qrc_sweep(cfg_rev)
        np.testing.assert_allclose(res_fwd['per_realization'][0],
                                   res_rev['per_realization'][1], rtol=1e-12)
        np.testing.assert_allclose(res_fwd['per_realization'][1],
                                   res_rev['per_realization'][0], rtol=1e-12)

    def test_post_hoc_axis_shares_trajectory(self):
        cfg = small_qrc_config(sweep_name='delay', sweep_values=(0, 1, 2),
                               task=tasks.stm_task(0), realizations=2)
        res = harness.run_qrc_sweep(cfg)
        assert res['per_realization'].shape == (3, 2)
        assert np.all(np.isfinite(res['per_realization']))
        # memory quality decays with delay on average
        means = [a['mean'] for a in res['aggregates']]
        assert means[0] > means[2]

    def test_haar_baseline_emitted(self):
        cfg = small_qrc_config(include_haar_baseline=True, realizations=2)
        res = harness.run_qrc_sweep(cfg)
        assert len(res['haar']) == 2
        assert np.isfinite(res['haar'][0]['mean'])
        # single baseline replicated across the dt grid
        assert res['haar'][0] == res['haar'][1]

    def test_sigma_sweep_monotone_on_average(self):
        cfg = small_qrc_config(sweep_name='sigma',
                               sweep_values=(0.0, 0.3),
                               realizations=3)
        res = harness.run_qrc_sweep(cfg)
        assert res['aggregates'][0]['mean'] > res['aggregates'][1]['mean']

    def test_failed_realization_counted_not_fatal(self):
        # NARMA-10 on inputs in [0, 1] diverges; every realization fails
        bad_task = tasks.TaskSpec(kind='narma', n=10, input_range=(0.0, 1.0))
        cfg = small_qrc_config(task=bad_task, realizations=2,
                               sweep_values=(1.0,))
        res = harness.run_qrc_sweep(cfg)
        assert len(res['errors']) == 2
        assert res['aggregates'][0]['failures'] == 2


class TestEsp:
    def test_distance_curves(self, tmp_path):
        cfg = small_qrc_config(esp_pairs=3, esp_steps=40,
                               output_dir=str(tmp_path / "e"))
        res = harness.run_esp(cfg)
        assert len(res['mean']) == 2
        assert res['mean'][0].shape == (40,)
        assert np.all(res['mean'][0] >= 0)
        # contraction: late-time mean below the initial distance
        assert res['mean'][0][-1] < res['mean'][0][0]
        assert (tmp_path / "e" / "esp_1.0.csv").exists()


class TestTrace:
    def test_trace_csv_layout(self, tmp_path):
        cfg = small_qrc_config(sweep_values=(10.0,), trace_steps=5,
                               task=tasks.stm_task(0),
                               output_dir=str(tmp_path / "t"))
        res = harness.run_trace(cfg)
        assert res['trace'].shape == (5, cfg.V + 1, 3)
        path = tmp_path / "t" / "trace.csv"
        rows = path.read_text().strip().split("\n")
        assert rows[0] == "k,v,t,site,occupation"
        assert len(rows) == 1 + 5 * (cfg.V + 1) * 3

    def test_reproducible_csv_bytes(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            cfg = small_qrc_config(sweep_values=(10.0,), trace_steps=4,
                                   task=tasks.stm_task(0), output_dir=str(out))
            harness.run_trace(cfg)
        assert (out1 / "trace.csv").read_bytes() == (out2 / "trace.csv").read_bytes()


class TestCli:
    def test_help_lists_subcommands(self, capsys):
        from sykqrc import cli
        with pytest.raises(SystemExit):
            cli.main(['--help'])
        out = capsys.readouterr().out
        for name in ('levels', 'sff', 'qrc', 'esp', 'trace'):
            assert name in out

    def test_trace_smoke(self, tmp_path):
        from sykqrc import cli
        code = cli.main(['trace', '--seed', '3', '--out', str(tmp_path / "tr")])
        assert code == 0
        assert (tmp_path / "tr" / "trace.csv").exists()

    def test_config_override(self, tmp_path):
        from sykqrc import cli
        cfg = small_qrc_config(sweep_values=(5.0,), trace_steps=3,
                               task=tasks.stm_task(0))
        cfg_path = tmp_path / "cfg.json"
        harness.save_config(cfg, cfg_path)
        code = cli.main(['trace', '--config', str(cfg_path),
                         '--out', str(tmp_path / "o")])
        assert code == 0
        with open(tmp_path / "o" / "manifest_trace.json") as f:
            manifest = json.load(f)
        assert manifest['config']['trace_steps'] == 3
