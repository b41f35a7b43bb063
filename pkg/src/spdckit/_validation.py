"""Input validation shared by the estimator wrappers."""

import numpy as np
from sklearn.utils.validation import check_array, check_consistent_length, column_or_1d


def check_abscissa(X):
    """Accept ``(n,)`` or ``(n, 1)`` input and return a 1-D float array."""
    X = check_array(X, ensure_2d=False, dtype=np.float64)
    if X.ndim == 2:
        if X.shape[1] != 1:
            raise ValueError(f"expected a single feature column, got {X.shape[1]}")
        X = X[:, 0]
    return X


def check_fit_data(X, y, y_err=None):
    x = check_abscissa(X)
    y = column_or_1d(check_array(y, ensure_2d=False, dtype=np.float64))
    if y_err is None:
        check_consistent_length(x, y)
        return np.column_stack([x, y])
    y_err = column_or_1d(check_array(y_err, ensure_2d=False, dtype=np.float64))
    check_consistent_length(x, y, y_err)
    return np.column_stack([x, y, y_err])
