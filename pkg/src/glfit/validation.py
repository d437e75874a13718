"""Input validation for the estimator classes."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import SampleSizeError
from .series import MIN_SAMPLE_SIZE, Sample


def check_sample(X, min_samples=MIN_SAMPLE_SIZE):
    """Coerce ``X`` to a 1-D float array of observations.

    Accepts a :class:`~glfit.series.Sample`, a 1-D array-like, or a
    single-column 2-D array-like.  Non-finite entries are rejected.
    """
    if isinstance(X, Sample):
        X = X.values
    arr = check_array(X, ensure_2d=False, dtype=np.float64, ensure_all_finite=True)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(
                f"expected a single feature column, got an array of shape {arr.shape}"
            )
        arr = arr[:, 0]
    if arr.size < min_samples:
        raise SampleSizeError(f"need at least {min_samples} observations, got {arr.size}")
    return arr
