import json

import numpy as np
import pytest

from adaptqaoa import harness
from adaptqaoa.harness import (
    ExperimentConfig, aggregate, difference_series, run_delta_comparison, run_spectrum_study,
    run_sweep, scatter_max_entropy_vs_final_error, substream_seed,
)
from adaptqaoa.problem import ProblemInstance
from adaptqaoa.records import LayerRow, RunRecord, read_csv

EDGE_CFG = ExperimentConfig(n_qubits=2, degree=1, n_instances=5, p_max=2)
SMALL = ExperimentConfig(n_qubits=4, n_instances=3, p_max=3)


class TestConfig:
    def test_defaults(self):
        c = ExperimentConfig()
        assert (c.degree, c.p_max, c.n_instances, c.f, c.gamma0) == (5, 15, 50, 0.05, 0.01)
        assert ExperimentConfig(n_qubits=8).p_max == 20

    @pytest.mark.parametrize("kw", [dict(pool="ladder", n_qubits=5), dict(delta=1.0),
                                    dict(algo="vqe"), dict(mode="x"), dict(pool="ring")])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            ExperimentConfig(**kw)

    def test_json_roundtrip(self):
        c = ExperimentConfig(n_qubits=4, delta=-0.1, pool="linear")
        assert ExperimentConfig.from_json(json.loads(json.dumps(c.to_json()))) == c

    def test_unknown_key(self):
        with pytest.raises(ValueError):
            ExperimentConfig.from_json({"qubitz": 3})

    def test_instance_seeds(self):
        c = ExperimentConfig(base_seed=100)
        assert c.instance(7) == ProblemInstance.generate(6, 5, 107, 0.05)

    def test_substreams(self):
        assert substream_seed(0, "haar") == substream_seed(0, "haar")
        assert substream_seed(0, "haar") != substream_seed(1, "haar")
        assert substream_seed(0, "a", 1) != substream_seed(0, "a", 2)


class TestSweep:
    def test_single_edge_solved(self):
        res = run_sweep(EDGE_CFG)
        assert len(res.records) == 5 and not res.failures
        for r in res.records:
            assert r.rows[2].norm_error < 1e-6

    def test_files_and_determinism(self, tmp_path):
        a = run_sweep(SMALL.replace(out=str(tmp_path / "a")))
        run_sweep(SMALL.replace(out=str(tmp_path / "b")))
        tag = SMALL.tag
        first = (tmp_path / "a" / f"aggregate_{tag}.csv").read_bytes()
        assert first == (tmp_path / "b" / f"aggregate_{tag}.csv").read_bytes()
        runs = sorted((tmp_path / "a" / "runs").glob("*.csv"))
        assert len(runs) == 3
        assert len(list((tmp_path / "a" / "instances").glob("*.json"))) == 3
        assert (tmp_path / "a" / f"threshold_{tag}.csv").exists()
        # aggregates recomputed from the emitted files match exactly
        reread = [r for f in runs for r in read_csv(f)]
        assert aggregate(reread).to_csv() == first.decode()
        assert aggregate(a.records).to_csv() == first.decode()
        ansatz = json.loads((tmp_path / "a" / "runs" / f"{tag}_0000_ansatz.json").read_text())
        assert [x["mixer"] for x in ansatz] == a.records[0].tokens

    def test_instance_files_are_shared_inputs(self, tmp_path):
        run_sweep(SMALL.replace(out=str(tmp_path)))
        inst = ProblemInstance.load(tmp_path / "instances" / "instance_0002.json")
        assert inst == SMALL.instance(2)

    def test_parallel_matches_serial(self):
        serial = run_sweep(SMALL)
        parallel = run_sweep(SMALL.replace(jobs=2))
        assert aggregate(serial.records).to_csv() == aggregate(parallel.records).to_csv()

    def test_failure_excluded(self, monkeypatch):
        real = harness.run_instance

        def flaky(config, k, keep=False):
            if k == 1:
                raise FloatingPointError("boom")
            return real(config, k, keep)

        monkeypatch.setattr(harness, "run_instance", flaky)
        res = run_sweep(SMALL)
        assert set(res.failures) == {1} and "boom" in res.failures[1]
        assert [r.instance_id for r in res.records] == [0, 2]
        assert res.aggregate.n_instances == 2


class TestAggregate:
    def test_mean_and_median(self):
        def rec(i, errs):
            rows = [LayerRow(l, 0.0, e, e, 0.0, "M", 0, 0, 0) for l, e in enumerate(errs)]
            return RunRecord(i, "adapt", "preserve", "full", 0.0, rows)

        agg = aggregate([rec(0, [0.5, 0.1]), rec(1, [0.5, 0.2]), rec(2, [0.5, 0.6])])
        np.testing.assert_allclose(agg.mean["norm_error"], [0.5, 0.3])
        np.testing.assert_allclose(agg.median["norm_error"], [0.5, 0.2])

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate([])


class TestDelta:
    def test_zero_vs_zero(self):
        base = run_sweep(SMALL)
        series, _ = run_delta_comparison(SMALL, [0.0], baseline=base)
        for m in series[0.0].mean.values():
            assert not np.any(m)

    def test_rerun_of_same_delta_is_zero(self):
        a, b = run_sweep(SMALL), run_sweep(SMALL)
        s = difference_series(a.records, b.records, 0.0)
        assert all(not np.any(v) for v in s.median.values())

    def test_csv(self, tmp_path):
        series, sweeps = run_delta_comparison(SMALL.replace(out=str(tmp_path)), [-0.5, 0.5])
        lines = (tmp_path / "delta_differences.csv").read_text().splitlines()
        assert lines[0].startswith("delta,layer,mean_diff_norm_error")
        assert len(lines) == 1 + 2 * (SMALL.p_max + 1)
        assert set(sweeps) == {0.0, -0.5, 0.5}
        # layer 0 is the shared reference state
        assert series[0.5].mean["norm_error"][0] == 0


class TestSpectrumStudy:
    def test_shape_and_layer_zero(self, tmp_path):
        cfg = ExperimentConfig(n_qubits=4, n_instances=2, p_max=2, out=str(tmp_path))
        study = run_spectrum_study(cfg, 5, 2, haar_samples=200)
        assert [s.layer for s in study.adapt] == [0, 1, 2]
        assert study.adapt[0].mean_entropy_middle == 0 and study.qaoa[0].mean_entropy_middle == 0
        for name in ("adapt", "qaoa", "haar"):
            assert (tmp_path / f"spectrum_{name}.csv").exists()
            assert (tmp_path / f"spectrum_{name}_summary.csv").exists()

    def test_reuses_prior_runs(self):
        cfg = ExperimentConfig(n_qubits=4, n_instances=1, p_max=2)
        rec = harness.run_instance(cfg, 0)
        a = run_spectrum_study(cfg, 4, 1, {0: rec}, haar_samples=50)
        b = run_spectrum_study(cfg, 4, 1, haar_samples=50)
        np.testing.assert_array_equal(a.adapt[2].levels_mean, b.adapt[2].levels_mean)


class TestScatter:
    def test_columns_and_correlation(self, tmp_path):
        res = run_sweep(SMALL)
        out = tmp_path / "scatter.csv"
        sc = scatter_max_entropy_vs_final_error(res.records, out)
        assert out.read_text().splitlines()[0] == "instance_id,algo,max_ent_middle,final_norm_error"
        assert len(sc.rows) == 3 and "adapt" in sc.spearman

    def test_monotone_entropy_uses_first_layer(self):
        rows = [LayerRow(l, 0.0, e, s, 0.0, "M", 0, 0, 0)
                for l, (e, s) in enumerate([(0.3, 0.0), (0.1, 0.9), (0.0, 0.4)])]
        sc = scatter_max_entropy_vs_final_error([RunRecord(0, "adapt", "preserve", "full", 0.0, rows)])
        assert sc.rows == [(0, "adapt", 0.9, 0.0)]
