import json
from importlib import resources

import jsonschema
import pytest

from oucp.dp import Segmentation
from oucp.io import to_json_text
from oucp.pelt import detect_pelt
from oucp.pipeline import PipelineConfig, full_pipeline
from oucp.results import summarize_segments
from oucp.sns import detect_unknown_m_sns
from oucp.stats import realized_volatility

from conftest import small_case

SCHEMA = json.loads(
    resources.files("oucp").joinpath("schemas/detection_result.schema.json").read_text()
)


@pytest.mark.parametrize("algorithm", ["dp", "sns", "pelt"])
def test_results_validate_against_schema(algorithm):
    s, b = small_case(2, 3, n=300, T=3.0)
    res = full_pipeline(s, PipelineConfig(algorithm=algorithm, basis="case2", m=2, m_max=4))
    doc = json.loads(to_json_text(res.to_dict()))
    jsonschema.validate(doc, SCHEMA)
    assert doc["schema_version"] == "1.0"
    assert ("ic_trace" in doc) == (algorithm == "sns")
    assert ("pruning_stats" in doc) == (algorithm == "pelt")


def test_segments_tile_and_fractions():
    s, b = small_case(1, 2, n=300, T=3.0)
    res = detect_unknown_m_sns(s, b, m_max=3)
    segs = res.per_segment
    assert segs[0].start == 0 and segs[-1].stop == s.n
    assert all(x.stop == y.start for x, y in zip(segs, segs[1:]))
    assert res.change_fractions == [k / s.n for k in res.change_indices]
    assert res.change_times == [k * s.delta_t for k in res.change_indices]


def test_long_run_statistics_only_when_mean_reverting():
    s, b = small_case(1, 5, n=300, T=3.0)
    seg = Segmentation((100, 200), 300, 15)
    for summary in summarize_segments(s, b, seg, 0.2):
        if summary.a > 0:
            assert summary.long_run_mean == pytest.approx(summary.mu[0] / summary.a)
            assert summary.long_run_var == pytest.approx(0.04 / (2 * summary.a))
        else:
            assert summary.long_run_mean is None and summary.long_run_var is None


def test_no_long_run_mean_with_two_weights():
    s, b = small_case(2, 5, n=300, T=3.0)
    for summary in detect_pelt(s, b).per_segment:
        assert summary.long_run_mean is None


def test_pipeline_sigma_options():
    s, b = small_case(1, 1, n=300, T=3.0)
    res = full_pipeline(s, PipelineConfig(algorithm="pelt", sigma="realized"))
    assert res.sigma_used == realized_volatility(s)
    res = full_pipeline(s, PipelineConfig(algorithm="pelt", sigma=0.3))
    assert res.sigma_used == 0.3
    for bad in (-1.0, "often"):
        with pytest.raises(ValueError):
            full_pipeline(s, PipelineConfig(algorithm="pelt", sigma=bad))
    with pytest.raises(ValueError):
        full_pipeline(s, PipelineConfig(algorithm="dp"))


def test_pipeline_writes_outputs(tmp_path):
    s, b = small_case(1, 1, n=300, T=3.0)
    out = tmp_path / "r.json"
    full_pipeline(s, PipelineConfig(algorithm="pelt", out_json=str(out),
                                    plot_dir=str(tmp_path / "figs")))
    jsonschema.validate(json.loads(out.read_text()), SCHEMA)
    assert (tmp_path / "figs" / "series.png").stat().st_size > 0
