"""Sample ingestion, descriptive statistics and frequency series.

A frequency series pairs support points ``x`` with positive weights ``y``.
Two constructions are available:

``distinct``
    ``x`` are the distinct sample values and ``y`` their multiplicities;
    every point gets the cell width ``(max - min) / (n_distinct - 1)``.
``histogram``
    ``bins`` equal-width cells over ``[min, max]``; ``x`` are the cell
    centers, ``y`` the counts, and empty cells are dropped.
"""

from dataclasses import dataclass
from importlib import resources
import io
import math
import os
import re

import numpy as np

from .distribution import pdf
from .exceptions import DegenerateDataError, ParseError, SampleSizeError

MIN_SAMPLE_SIZE = 3
BUNDLED_DATASET = "pcb_logkow.txt"
FREQ_MODES = ("distinct", "histogram")

_TOKEN = re.compile(r"[^,;\s]+")


def _frozen_array(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Sample:
    """Observations sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        values = np.sort(np.asarray(self.values, dtype=float).ravel())
        if values.size < MIN_SAMPLE_SIZE:
            raise SampleSizeError(
                f"a sample needs at least {MIN_SAMPLE_SIZE} values, got {values.size}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("sample values must be finite")
        object.__setattr__(self, "values", _frozen_array(values))

    @property
    def n(self):
        return int(self.values.size)

    def __len__(self):
        return self.n

    def __eq__(self, other):
        return isinstance(other, Sample) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())

    def without_index(self, index):
        return Sample(np.delete(self.values, index))


@dataclass(frozen=True, eq=False)
class FreqSeries:
    x: np.ndarray
    y: np.ndarray
    n_total: float
    cell_width: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        y = np.asarray(self.y, dtype=float).ravel()
        if x.shape != y.shape or x.size == 0:
            raise ValueError("x and y must be non-empty and of equal length")
        if np.any(np.diff(x) <= 0.0):
            raise ValueError("support points must be strictly increasing")
        if np.any(y <= 0.0):
            raise ValueError("frequencies must be strictly positive")
        if not self.cell_width > 0.0:
            raise ValueError("cell_width must be positive")
        object.__setattr__(self, "x", _frozen_array(x))
        object.__setattr__(self, "y", _frozen_array(y))
        object.__setattr__(self, "n_total", float(self.n_total))
        object.__setattr__(self, "cell_width", float(self.cell_width))

    def __len__(self):
        return int(self.x.size)

    def scaled(self, factor):
        """Same support, frequencies (and total) multiplied by ``factor``."""
        return FreqSeries(self.x, self.y * factor, self.n_total * factor, self.cell_width)


@dataclass(frozen=True)
class SampleStats:
    mean: float
    sd: float
    sd_mle: float
    median: float
    skewness: float
    kurtosis: float


def parse_values(text):
    """Parse numbers separated by newlines, commas, semicolons or blanks.

    Lines whose first non-blank character is ``#`` are skipped.
    """
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if line.lstrip().startswith("#"):
            continue
        for match in _TOKEN.finditer(line):
            token = match.group()
            try:
                value = float(token)
            except ValueError:
                raise ParseError(token, lineno, match.start() + 1) from None
            if not math.isfinite(value):
                raise ParseError(token, lineno, match.start() + 1)
            values.append(value)
    return values


def load_sample(source):
    """Read a :class:`Sample` from a string or a text stream."""
    text = source if isinstance(source, str) else source.read()
    return Sample(parse_values(text))


def load_sample_file(path):
    with open(os.fspath(path), encoding="utf-8") as fh:
        return load_sample(fh)


def bundled_dataset_text():
    return resources.files("glfit").joinpath("data", BUNDLED_DATASET).read_text(encoding="utf-8")


def load_bundled():
    """The 206 log(K_ow) values shipped with the package."""
    return load_sample(io.StringIO(bundled_dataset_text()))


def format_sample(sample):
    """Serialize in the input file format, one value per line, round-trippable."""
    return "".join(f"{v!r}\n" for v in sample.values.tolist())


def stats(sample):
    x = sample.values
    n = x.size
    mean = math.fsum(x) / n
    dev = x - mean
    m2 = math.fsum(dev * dev) / n
    if m2 == 0.0:
        raise DegenerateDataError("all sample values are identical")
    m3 = math.fsum(dev ** 3) / n
    m4 = math.fsum(dev ** 4) / n
    mid = n // 2
    median = x[mid] if n % 2 else 0.5 * (x[mid - 1] + x[mid])
    return SampleStats(
        mean=mean,
        sd=math.sqrt(m2 * n / (n - 1)),
        sd_mle=math.sqrt(m2),
        median=float(median),
        skewness=m3 / m2 ** 1.5,
        kurtosis=m4 / (m2 * m2),
    )


def sturges_bins(n):
    return math.ceil(1.0 + math.log2(n))


def build_freq(sample, mode="distinct", bins=None):
    x = sample.values
    lo, hi = float(x[0]), float(x[-1])
    if hi == lo:
        raise DegenerateDataError("cannot build a frequency series when max equals min")
    if mode == "distinct":
        support, counts = np.unique(x, return_counts=True)
        width = (hi - lo) / (support.size - 1)
        return FreqSeries(support, counts.astype(float), sample.n, width)
    if mode == "histogram":
        if bins is None:
            bins = sturges_bins(sample.n)
        bins = int(bins)
        if bins < 2:
            raise SampleSizeError(f"histogram mode needs at least 2 bins, got {bins}")
        width = (hi - lo) / bins
        idx = np.clip(np.floor((x - lo) / width).astype(int), 0, bins - 1)
        counts = np.bincount(idx, minlength=bins).astype(float)
        centers = lo + width * (np.arange(bins) + 0.5)
        keep = counts > 0
        return FreqSeries(centers[keep], counts[keep], sample.n, width)
    raise ValueError(f"unknown frequency mode {mode!r}; expected one of {FREQ_MODES}")


def weighted_stats(fs):
    """Frequency-weighted mean and standard deviation.

    ``mean = sum(x*y) / sum(y)`` and
    ``var = sum(y * (x - mean)**2) / (sum(y) - 1)``.
    """
    total = math.fsum(fs.y)
    mean = math.fsum(fs.x * fs.y) / total
    var = math.fsum(fs.y * (fs.x - mean) ** 2) / (total - 1.0)
    if var <= 0.0:
        raise DegenerateDataError("frequency series has zero spread")
    return mean, math.sqrt(var)


def model_freq(fs, params):
    """Expected frequency at each support point, ``n_total * cell_width * pdf``."""
    return fs.n_total * fs.cell_width * pdf(fs.x, params)
