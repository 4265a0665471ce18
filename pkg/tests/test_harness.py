import json

import pytest

from numrad.errors import UnknownBoundError
from numrad.harness import (
    CampaignConfig,
    counterexample_suite,
    replay_trial,
    report_to_csv,
    report_to_json,
    run_campaign,
    tightness_sweep,
)

SMALL = dict(
    dims=((1, 1), (2, 2), (2, 3)),
    min_trials_per_bound=24,
    master_seed=314,
)


def small_config(**overrides):
    return CampaignConfig(**{**SMALL, **overrides})


class TestRunCampaign:
    def test_zero_violations_small(self):
        cfg = small_config(bound_ids=("main1.v1", "sum_norm", "main11.young.v2",
                                      "main3.v2", "th1"))
        report = run_campaign(cfg)
        assert len(report.violations) == 0
        assert len(report.errors) == 0
        for entry in report.summary.values():
            assert entry["count"] >= cfg.min_trials_per_bound
            assert 0.0 <= entry["ratio_max"] <= 1.0 + cfg.slack

    def test_empty_bound_list(self):
        report = run_campaign(small_config(bound_ids=()))
        assert report.records == []
        assert report.summary == {}

    def test_scalar_ensemble_tight_cases(self):
        cfg = small_config(
            bound_ids=("main1.v1",),
            dims=((1, 1),),
            alpha_values=(0.5,),
            r_values=(1.0,),
            min_trials_per_bound=100,
            ensembles={"x": "scalar", "y": "scalar", "contraction": "contraction",
                       "block": "ginibre", "normal": "normal"},
        )
        report = run_campaign(cfg)
        assert len(report.violations) == 0
        ratios = [rec.ratio for rec in report.records]
        # scalar inputs are exactly tight at alpha = 1/2, r = 1
        assert max(ratios) >= 1.0 - 1e-9

    def test_as_stated_campaign_flags_fixed_counterexample(self):
        cfg = small_config(
            bound_ids=("main11.v1",),
            dims=((1, 1),),
            r_values=(1.0,),
            alpha_values=(0.5,),
            holder_p_values=(2.0,),
            min_trials_per_bound=5,
            constant_mode="as_stated",
            extra_trials=(
                ("main11.v1",
                 {"m": 1, "n": 1, "r": 1.0, "alpha": 0.5, "p": 2.0,
                  "constant_mode": "as_stated"},
                 {"x": [[1.0]], "y": [[1.0]]}),
            ),
        )
        report = run_campaign(cfg)
        fixed = report.records[-1]
        assert fixed.violation
        assert fixed.value == pytest.approx(0.5, abs=1e-12)
        assert fixed.omega_lo == pytest.approx(1.0, abs=1e-8)
        assert report.summary["main11.v1"]["violations"] >= 1

    def test_determinism_across_jobs(self):
        cfg1 = small_config(bound_ids=("main1.v2", "main4.v1"), jobs=1)
        cfg2 = small_config(bound_ids=("main1.v2", "main4.v1"), jobs=3)
        rep1 = run_campaign(cfg1)
        rep2 = run_campaign(cfg2)
        assert report_to_json(rep1) == report_to_json(rep2)
        assert report_to_csv(rep1) == report_to_csv(rep2)

    def test_replay_reproduces_record(self):
        cfg = small_config(bound_ids=("main1.v1",), min_trials_per_bound=4)
        report = run_campaign(cfg)
        target = report.records[7]
        again = replay_trial(cfg, 7)
        assert again.value == target.value
        assert again.digests == target.digests
        assert again.ratio == target.ratio
        assert again.seed_path == target.seed_path

    def test_violation_flag_definition(self):
        cfg = small_config(bound_ids=("main1.v1",), min_trials_per_bound=8)
        report = run_campaign(cfg)
        for rec in report.records:
            lhs_pow = rec.omega_lo ** rec.exponent
            expect = rec.value < lhs_pow - cfg.slack * max(1.0, rec.value)
            assert rec.violation == expect


class TestReports:
    def test_json_structure(self):
        report = run_campaign(small_config(bound_ids=("sum_norm",),
                                           min_trials_per_bound=4))
        payload = json.loads(report_to_json(report))
        assert payload["format_version"] == "numrad-report/1"
        assert payload["config"]["master_seed"] == 314
        assert "sum_norm" in payload["summary"]
        assert payload["summary"]["sum_norm"]["violations"] == 0
        assert "jobs" not in payload["config"]

    def test_csv_header_and_rows(self):
        report = run_campaign(small_config(bound_ids=("main1.v1",),
                                           min_trials_per_bound=2))
        text = report_to_csv(report)
        lines = text.strip().split("\n")
        assert lines[0] == ("trial,bound_id,m,n,r,alpha,p,q,value,omega_lo,"
                            "omega_hi,ratio,violation,seed_path")
        assert len(lines) == 1 + len(report.records)
        first = lines[1].split(",")
        assert first[1] == "main1.v1"
        assert first[12] in ("true", "false")

    def test_summary_consistency(self):
        report = run_campaign(small_config(bound_ids=("main1.v1", "th1"),
                                           min_trials_per_bound=6))
        for bound_id, entry in report.summary.items():
            recs = [r for r in report.records if r.bound_id == bound_id]
            assert entry["count"] == len(recs)
            assert entry["violations"] == sum(r.violation for r in recs)
            ratios = [r.ratio for r in recs if r.ratio is not None]
            assert entry["ratio_max"] == max(ratios)


class TestCounterexampleSuite:
    def test_sections(self):
        report = counterexample_suite(random_pairs=120)
        stated, proved = report.records[0], report.records[1]
        assert stated.params["section"] == "a"
        assert stated.violation and stated.value == pytest.approx(0.5, abs=1e-12)
        assert stated.omega_lo ** stated.exponent == pytest.approx(1.0, abs=1e-7)
        assert proved.params["section"] == "c"
        assert not proved.violation and proved.value == pytest.approx(2.0, abs=1e-12)
        search = [r for r in report.records if r.params.get("section") == "b"]
        assert len(search) == 120
        # the misapplied normality inequality fails on some random pairs
        assert any(r.violation for r in search)

    def test_deterministic(self):
        a = counterexample_suite(random_pairs=40)
        b = counterexample_suite(random_pairs=40)
        assert report_to_json(a) == report_to_json(b)


class TestTightnessSweep:
    def test_r_sweep_scalar(self):
        rows = tightness_sweep("main1.v1", {"x": [[1.0]], "y": [[1.0]]},
                               {"r": [1.0, 2.0, 3.0]}, base={"alpha": 0.5})
        ratios = [ratio for _, ratio in rows]
        assert ratios == pytest.approx([1.0, 0.5, 0.25], abs=1e-8)

    def test_alpha_sweep_peaks_at_half(self):
        rows = tightness_sweep("main1.v1", {"x": [[1.0]], "y": [[1.0]]},
                               {"alpha": [0.0, 0.5, 1.0]}, base={"r": 1.0})
        by_alpha = {pt["alpha"]: ratio for pt, ratio in rows}
        assert by_alpha[0.5] >= by_alpha[0.0]
        assert by_alpha[0.5] >= by_alpha[1.0]
        assert by_alpha[0.5] == pytest.approx(1.0, abs=1e-9)

    def test_empty_sweep(self):
        assert tightness_sweep("main1.v1", {"x": [[1.0]], "y": [[1.0]]}, {}) == []

    def test_unknown_bound(self):
        with pytest.raises(UnknownBoundError):
            tightness_sweep("main99", {"x": [[1.0]], "y": [[1.0]]}, {"r": [1.0]})
