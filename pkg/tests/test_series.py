import hashlib
import io
import statistics

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from glfit.distribution import GLParams, pdf, sample
from glfit.exceptions import DegenerateDataError, ParseError, SampleSizeError
from glfit.series import (
    FreqSeries,
    Sample,
    build_freq,
    bundled_dataset_text,
    format_sample,
    load_bundled,
    load_sample,
    model_freq,
    stats,
    sturges_bins,
    weighted_stats,
)

DATASET_SHA256 = "ba450390e12ae05c21b72bccd6262292b1bf0ae4dc22724489efe7186c49a07c"


def test_bundled_checksum():
    digest = hashlib.sha256(bundled_dataset_text().encode()).hexdigest()
    assert digest == DATASET_SHA256


def test_bundled_dataset_shape():
    s = load_bundled()
    assert s.n == 206
    assert s.values[0] == 4.151
    assert s.values[-1] == 9.603
    assert np.all(np.diff(s.values) >= 0)


def test_load_sorts():
    assert load_sample("3\n1\n2") == Sample([1.0, 2.0, 3.0])


def test_load_semicolons_and_commas():
    assert load_sample("4.151; 4.401; 4.421").values.tolist() == [4.151, 4.401, 4.421]
    assert load_sample("1,2\n3;4").n == 4


def test_load_stream_and_comments():
    text = "# header\n5\n  # indented comment\n\n6\n7\n"
    assert load_sample(io.StringIO(text)).values.tolist() == [5.0, 6.0, 7.0]


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        load_sample("1\n2\n3; x4\n")
    assert (info.value.line, info.value.column) == (3, 4)
    assert "x4" in str(info.value)


def test_too_few_values():
    with pytest.raises(SampleSizeError):
        load_sample("1\n2")


def test_format_round_trip():
    s = load_bundled()
    assert load_sample(format_sample(s)) == s


def test_stats_small():
    st_ = stats(Sample([1, 2, 3]))
    assert st_.mean == 2.0
    assert st_.median == 2.0
    assert st_.sd == pytest.approx(1.0, abs=1e-12)
    assert st_.sd_mle == pytest.approx(0.8165, abs=1e-4)
    assert st_.skewness == pytest.approx(0.0, abs=1e-12)


def test_stats_even_median():
    assert stats(Sample([4, 1, 3, 2])).median == 2.5


def test_stats_bundled_against_stdlib():
    values = [float(tok) for tok in bundled_dataset_text().split()]
    st_ = stats(load_bundled())
    assert st_.mean == pytest.approx(statistics.fmean(values), abs=1e-13)
    assert st_.sd == pytest.approx(statistics.stdev(values), abs=1e-13)
    assert st_.sd_mle == pytest.approx(statistics.pstdev(values), abs=1e-13)
    assert st_.median == statistics.median(values)


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=60))
@settings(max_examples=100, deadline=None)
def test_sd_identity(values):
    s = Sample(values)
    if np.ptp(s.values) < 1e-6:
        return
    st_ = stats(s)
    assert st_.sd == pytest.approx(st_.sd_mle * np.sqrt(s.n / (s.n - 1)), rel=1e-12)


def test_stats_degenerate():
    with pytest.raises(DegenerateDataError):
        stats(Sample([2.5, 2.5, 2.5, 2.5]))


def test_distinct_counts():
    fs = build_freq(Sample([1, 1, 2, 3, 3, 3]), "distinct")
    assert fs.x.tolist() == [1, 2, 3]
    assert fs.y.tolist() == [2, 1, 3]
    assert fs.cell_width == 1.0
    assert fs.n_total == 6


def test_histogram_two_cells():
    fs = build_freq(Sample([0, 1, 2, 3]), "histogram", bins=2)
    assert fs.x.tolist() == [0.75, 2.25]
    assert fs.y.tolist() == [2, 2]
    assert fs.cell_width == 1.5


def test_histogram_drops_empty_cells():
    fs = build_freq(Sample([0, 0.1, 0.2, 10]), "histogram", bins=4)
    assert fs.y.tolist() == [3, 1]
    assert fs.n_total == 4
    assert np.all(fs.y > 0)


def test_histogram_default_bins_is_sturges():
    s = load_bundled()
    assert sturges_bins(206) == 9
    fs = build_freq(s, "histogram")
    assert fs.cell_width == pytest.approx((9.603 - 4.151) / 9)


def test_bundled_distinct():
    fs = build_freq(load_bundled(), "distinct")
    assert fs.n_total == 206
    assert fs.y.sum() == 206
    assert fs.y[fs.x.tolist().index(6.137)] == 5


def test_build_freq_errors():
    with pytest.raises(DegenerateDataError):
        build_freq(Sample([1, 1, 1]))
    with pytest.raises(SampleSizeError):
        build_freq(Sample([1, 2, 3]), "histogram", bins=1)
    with pytest.raises(ValueError):
        build_freq(Sample([1, 2, 3]), "kde")


@given(st.lists(st.integers(-20, 20), min_size=3, max_size=40), st.randoms())
@settings(max_examples=100, deadline=None)
def test_distinct_invariants(values, rnd):
    if len(set(values)) < 2:
        return
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a = build_freq(Sample(values))
    b = build_freq(Sample(shuffled))
    assert a.y.sum() == len(values)
    np.testing.assert_array_equal(a.x, b.x)
    np.testing.assert_array_equal(a.y, b.y)


def test_freq_series_validation():
    with pytest.raises(ValueError):
        FreqSeries([1, 1], [1, 1], 2, 1.0)
    with pytest.raises(ValueError):
        FreqSeries([1, 2], [1, 0], 1, 1.0)


def test_weighted_stats_matches_sample_in_distinct_mode():
    s = load_bundled()
    st_ = stats(s)
    mean, sd = weighted_stats(build_freq(s))
    assert mean == pytest.approx(st_.mean, abs=1e-12)
    assert sd == pytest.approx(st_.sd, abs=1e-12)


def test_model_freq_single_cell():
    fs = FreqSeries([2.0], [1.0], 1, 1.0)
    assert model_freq(fs, GLParams(2.0, 1.0, 2.0))[0] == pytest.approx(0.3989, abs=1e-4)


def test_model_freq_linearity():
    fs = build_freq(load_bundled())
    params = GLParams(6.464, 0.802, 2.0)
    base = model_freq(fs, params)
    np.testing.assert_allclose(model_freq(fs.scaled(2.0), params), 2 * base, rtol=1e-14)
    wider = FreqSeries(fs.x, fs.y, fs.n_total, 3 * fs.cell_width)
    np.testing.assert_allclose(model_freq(wider, params), 3 * base, rtol=1e-14)


def test_model_freq_bundled_against_direct_oracle():
    s = load_bundled()
    fs = build_freq(s)
    params = GLParams(6.464, 0.802, 2.0)
    width = (s.values[-1] - s.values[0]) / (np.unique(s.values).size - 1)
    z = (fs.x - 6.464) / 0.802
    oracle = 206 * width * np.exp(-0.5 * z * z) / (0.802 * np.sqrt(2 * np.pi))
    np.testing.assert_allclose(model_freq(fs, params), oracle, rtol=1e-12)
    assert np.all(model_freq(fs, params) > 0)
    np.testing.assert_allclose(model_freq(fs, params), 206 * fs.cell_width * pdf(fs.x, params))


def test_histogram_model_mass_approaches_total():
    params = GLParams(0.0, 1.0, 2.0)
    s = Sample(sample(params, 20_000, 5))
    bins = 256
    lo, hi = s.values[0], s.values[-1]
    width = (hi - lo) / bins
    centers = lo + width * (np.arange(bins) + 0.5)
    total = s.n * width * pdf(centers, params).sum()
    assert total / s.n == pytest.approx(1.0, abs=1e-2)
    # the omitted empty cells carry little mass
    fs = build_freq(s, "histogram", bins)
    assert model_freq(fs, params).sum() / s.n == pytest.approx(1.0, abs=1e-2)
