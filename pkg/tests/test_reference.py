"""Reference figures for the baselines and the adversarial selector on Iris.

The bands match the ones used for the incremental selector on the same
data: +-3 pp for error rates, +-8 pp for retention rates.  They reuse the
cached 10x10 cross-validation from ``conftest.benchmark``.
"""
import pytest
from conftest import benchmark

ER_BAND, RR_BAND = 3.0, 8.0


@pytest.mark.slow
def test_cnn_iris(report):
    m = benchmark("iris")[0]["cnn"]
    report(f"[ref] iris CNN: contraharmonic ER {m.er_contraharmonic:.2f} (12.2), RR {m.rr_contraharmonic:.2f} (36.4)")
    assert m.er_contraharmonic == pytest.approx(12.2, abs=ER_BAND)
    assert m.rr_contraharmonic == pytest.approx(36.4, abs=RR_BAND)


@pytest.mark.slow
def test_enn_iris(report):
    m = benchmark("iris")[0]["enn"]
    report(f"[ref] iris ENN: contraharmonic ER {m.er_contraharmonic:.2f} (9.2), RR {m.rr_contraharmonic:.2f} (94.5)")
    assert m.er_contraharmonic == pytest.approx(9.2, abs=ER_BAND)
    assert m.rr_contraharmonic == pytest.approx(94.5, abs=RR_BAND)


@pytest.mark.slow
def test_aps_iris(report):
    runs = benchmark("iris")[0]
    prof, both = runs["professor"], runs["both"]
    report(f"[ref] iris APS: professor ER {prof.er_mean:.2f} (3.9), RR {prof.rr_mean:.2f} (16.5);"
           f" professor+student RR {both.rr_mean:.2f} (40.0)")
    assert prof.er_mean == pytest.approx(3.9, abs=ER_BAND)
    assert prof.rr_mean == pytest.approx(16.5, abs=RR_BAND)
    assert both.rr_mean == pytest.approx(40.0, abs=RR_BAND)
