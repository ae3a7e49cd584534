import numpy as np
import pytest

from statedisc.errors import ParameterError, ResourceError
from statedisc.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    FigureRecord,
    emit_csv,
    read_csv,
    run_experiment,
    run_trials,
    sample_uniform_angle,
    sample_uniform_sphere,
    sphere_angles,
    substream,
)
from statedisc.greedy import plateau_bound


class TestSampling:
    def test_angle_determinism_and_range(self):
        a = [sample_uniform_angle(substream(1, t, 0, 0)) for t in range(100)]
        b = [sample_uniform_angle(substream(1, t, 0, 0)) for t in range(100)]
        assert a == b
        assert all(0 < x < 2 * np.pi for x in a)

    def test_angle_mean(self):
        r = np.random.Generator(np.random.Philox(3))
        x = np.array([sample_uniform_angle(r) for _ in range(100_000)])
        assert abs(x.mean() - np.pi) <= 5 * x.std() / np.sqrt(x.size)

    def test_sphere_transform(self):
        assert sphere_angles(0.3, 0.5)[1] == pytest.approx(np.pi / 2)
        assert sphere_angles(0.3, 0.0)[1] == 0.0
        assert sphere_angles(0.25, 0.1)[0] == pytest.approx(np.pi / 2)

    def test_sphere_uniform(self):
        r = np.random.Generator(np.random.Philox(4))
        z = np.array([np.cos(sample_uniform_sphere(r)[1]) for _ in range(100_000)])
        assert abs(z.mean()) <= 5 * z.std() / np.sqrt(z.size)

    def test_substreams_independent_of_gamma_set(self):
        small = ExperimentConfig.for_figure("fig1_lg_copies", n_trial=20, gamma_set=[0.3], N_set=[4])
        big = ExperimentConfig.for_figure("fig1_lg_copies", n_trial=20, gamma_set=[0.01, 0.3], N_set=[2, 4])
        np.testing.assert_array_equal(run_trials(small)["gamma=0.3"][:, 0], run_trials(big)["gamma=0.3"][:, 1])


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig.for_figure("fig6_qutrit_diff")
        assert cfg.n_trial == 100 and cfg.qutrit_quantization == ((2,), 4) and cfg.N_set == (3,)
        assert ExperimentConfig.for_figure("fig6_qutrit_diff", paper_scale=True).n_trial == 1000
        assert ExperimentConfig.for_figure("fig1_lg_copies").gamma_set == (0.01, 0.05, 0.1, 0.3)

    def test_from_dict(self):
        cfg = ExperimentConfig.from_dict({"figure_id": "fig3_qubit_order", "n_trial": 5, "gamma_set": [0.2], "qutrit_quantization": [[1], 2]})
        assert (cfg.n_trial, cfg.gamma_set, cfg.qutrit_quantization) == (5, (0.2,), ((1,), 2))
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    @pytest.mark.parametrize(
        "kw",
        [
            {"figure_id": "fig9"},
            {"figure_id": "fig1_lg_copies", "n_trial": 0},
            {"figure_id": "fig1_lg_copies", "gamma_set": [1.5]},
            {"figure_id": "fig1_lg_copies", "N_set": [0]},
            {"figure_id": "fig1_lg_copies", "bogus": 1},
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(ParameterError):
            ExperimentConfig.from_dict(kw)

    def test_qutrit_cap(self):
        with pytest.raises(ResourceError):
            ExperimentConfig.for_figure("fig5_qutrit_succ", N_set=[4])


class TestRuns:
    def test_fig1_records(self):
        cfg = ExperimentConfig.for_figure("fig1_lg_copies", n_trial=30, seed=7)
        recs = run_experiment(cfg)
        assert len(recs) == 48
        assert [(r.series, r.x) for r in recs] == sorted((r.series, r.x) for r in recs)
        for r in recs:
            assert 0 <= r.mean <= 1 and r.stderr >= 0 and r.n_trial == 30 and r.seed == 7
            g = float(r.series.split("=")[1])
            assert r.mean <= max(0.5, plateau_bound(g)) + 1e-10

    def test_threads_bit_identical(self):
        serial = ExperimentConfig.for_figure("fig2_mlg_copies", n_trial=13, N_set=[1, 6])
        parallel = ExperimentConfig.for_figure("fig2_mlg_copies", n_trial=13, N_set=[1, 6], threads=3)
        assert run_experiment(serial) == run_experiment(parallel)

    def test_fig4_and_fig6_are_paired_differences(self):
        cfg = ExperimentConfig.for_figure("fig4_order_diff", n_trial=3, gamma_set=[0.2], N_set=[2, 3], Q_phi=16, Q_p=101)
        raw = run_trials(cfg)
        recs = run_experiment(cfg)
        assert {r.series for r in recs} == {"N=2", "N=3"}
        diff = raw["best"] - raw["worst"]
        assert diff.min() >= -1e-12
        assert recs[0].mean == pytest.approx(diff[:, 0, 0].mean())
        cfg6 = ExperimentConfig.for_figure("fig6_qutrit_diff", n_trial=2, gamma_set=[0.3], qutrit_quantization=([1], 1), Q_p=51)
        raw6 = run_trials(cfg6)
        recs6 = {r.series: r.mean for r in run_experiment(cfg6)}
        assert recs6["ternary_best-binary_worst"] == pytest.approx((raw6["ternary_best"] - raw6["binary_worst"]).mean())

    def test_appb_comparison_series(self):
        cfg = ExperimentConfig.for_figure("appB_comparison", n_trial=2, N_set=[1, 3], Q_p=51)
        recs = run_experiment(cfg)
        assert {r.series for r in recs} == {"copies_lg gamma=0.3", "distinct_order_opt_lg gamma=0.3"}
        # one subsystem: both reduce to a single Helstrom measurement on the same first pair
        first = [r.mean for r in recs if r.x == 1]
        assert first[0] == pytest.approx(first[1], abs=2e-3)


class TestCsv:
    def test_empty(self, tmp_path):
        path = emit_csv([], tmp_path / "e.csv")
        assert path.read_text() == ",".join(CSV_HEADER) + "\n"

    def test_round_trip_and_determinism(self, tmp_path):
        cfg = ExperimentConfig.for_figure("fig1_lg_copies", n_trial=5, seed=3, N_set=[1, 2])
        a = emit_csv(run_experiment(cfg), tmp_path / "a.csv", ["note"])
        b = emit_csv(run_experiment(cfg), tmp_path / "b.csv", ["note"])
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()
        assert read_csv(a) == run_experiment(cfg)

    def test_row_order(self, tmp_path):
        recs = [FigureRecord("f", s, x, 0.5, 0.0, 1, 0) for s, x in (("b", 2.0), ("a", 3.0), ("b", 1.0))]
        rows = emit_csv(recs, tmp_path / "o.csv").read_text().splitlines()[1:]
        assert [r.split(",")[1:3] for r in rows] == [["a", "3"], ["b", "1"], ["b", "2"]]

    def test_bad_header(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("a,b\n")
        with pytest.raises(ParameterError):
            read_csv(p)
