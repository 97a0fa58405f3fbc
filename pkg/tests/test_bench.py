import pytest

from ehrgate.bench import (
    BenchConfig,
    BenchReport,
    DIAZ_NOTE,
    REFERENCE_NOTE,
    RocReport,
    check_threshold_freeze,
    emit_report,
    fit_latency_scaling,
    run_identify_bench,
    run_roc,
)
from ehrgate.errors import InvalidConfig
from ehrgate.synth import SynthConfig

FAST_SYNTH = SynthConfig(fp_count_min=20, fp_count_max=30)


def small_config(**kw):
    defaults = dict(
        modalities=("iris",),
        gallery_sizes=(10, 40, 160),
        trials_per_cell=3,
        seed=5,
        synth=FAST_SYNTH,
    )
    defaults.update(kw)
    return BenchConfig(**defaults)


def test_config_validation():
    with pytest.raises(InvalidConfig):
        BenchConfig(modalities=("sonar",))
    with pytest.raises(InvalidConfig):
        BenchConfig(gallery_sizes=(200, 100))
    with pytest.raises(InvalidConfig):
        BenchConfig(gallery_sizes=())
    with pytest.raises(InvalidConfig):
        BenchConfig(trials_per_cell=0)


def test_bench_row_count():
    cfg = small_config(modalities=("iris", "fingerprint"), gallery_sizes=(10, 20), trials_per_cell=2)
    report = run_identify_bench(cfg)
    assert len(report.rows) == 4
    assert {(r.modality, r.gallery_size) for r in report.rows} == {
        ("iris", 10), ("iris", 20), ("fingerprint", 10), ("fingerprint", 20)
    }
    assert all(0.0 <= r.rank1_rate <= 1.0 for r in report.rows)


def test_bench_latency_nondecreasing_over_16x():
    report = run_identify_bench(small_config())
    means = [r.mean_latency_ms for r in report.rows]
    assert means == sorted(means)


def test_bench_deterministic_nontiming_fields():
    cfg = small_config(trials_per_cell=4)
    r1 = run_identify_bench(cfg)
    r2 = run_identify_bench(cfg)
    assert [(a.modality, a.gallery_size, a.trials, a.rank1_rate) for a in r1.rows] == [
        (a.modality, a.gallery_size, a.trials, a.rank1_rate) for a in r2.rows
    ]


def test_roc_degenerate_thresholds():
    report = run_roc("iris", [0.0, 1.0], 50, 50, synth=FAST_SYNTH, seed=1)
    by_t = {r.threshold: r for r in report.rows}
    assert by_t[1.0].far == 1.0 and by_t[1.0].frr == 0.0  # accept-all
    assert by_t[0.0].frr >= 0.99  # zero flips essentially never happens


def test_roc_monotonicity():
    grid = [i / 20 for i in range(21)]
    for modality in ("iris", "fingerprint"):
        report = run_roc(modality, grid, 60, 60, synth=FAST_SYNTH, seed=2)
        fars = [r.far for r in report.rows]
        frrs = [r.frr for r in report.rows]
        if modality == "iris":  # larger threshold = looser
            assert fars == sorted(fars)
            assert frrs == sorted(frrs, reverse=True)
        else:  # larger threshold = stricter
            assert fars == sorted(fars, reverse=True)
            assert frrs == sorted(frrs)


def test_roc_determinism():
    a = run_roc("iris", [0.3, 0.4], 30, 30, seed=9)
    b = run_roc("iris", [0.3, 0.4], 30, 30, seed=9)
    assert a == b


def test_roc_validation():
    with pytest.raises(InvalidConfig):
        run_roc("iris", [1.5], 10, 10)
    with pytest.raises(InvalidConfig):
        run_roc("iris", [0.3], 0, 10)
    with pytest.raises(InvalidConfig):
        run_roc("sonar", [0.3], 10, 10)


def test_threshold_freeze_check():
    good = RocReport(rows=(), eer_threshold=0.33, eer_far=0.0, eer_frr=0.0, modality="iris")
    check_threshold_freeze(good)
    bad = RocReport(rows=(), eer_threshold=0.10, eer_far=0.0, eer_frr=0.0, modality="iris")
    with pytest.raises(InvalidConfig):
        check_threshold_freeze(bad)
    fp_ok = RocReport(rows=(), eer_threshold=0.45, eer_far=0.0, eer_frr=0.0, modality="fingerprint")
    check_threshold_freeze(fp_ok)


def test_emit_bench_csv_line_count():
    cfg = small_config(modalities=("iris",), gallery_sizes=(10, 20), trials_per_cell=2)
    report = run_identify_bench(cfg)
    csv_doc = emit_report(report, "csv")
    lines = csv_doc.strip().splitlines()
    assert len(lines) == 3
    assert lines[0] == "modality,gallery_size,trials,mean_latency_ms,p95_latency_ms,rank1_rate"


def test_emit_empty_roc_csv():
    report = RocReport(rows=(), eer_threshold=0.3, eer_far=0.0, eer_frr=0.0, modality="iris")
    assert emit_report(report, "csv").strip() == "modality,threshold,far,frr"


def test_emit_text_carries_reference_annotations():
    report = BenchReport(rows=())
    text = emit_report(report, "text")
    assert REFERENCE_NOTE in text
    assert DIAZ_NOTE in text
    assert "paper(§4.2): fp 6.0s, iris 11.1s @ N=200" in text


def test_fit_latency_scaling():
    report = run_identify_bench(small_config())
    slope, intercept, r2 = fit_latency_scaling(report, "iris")
    assert slope > 0
    assert r2 >= 0.9
