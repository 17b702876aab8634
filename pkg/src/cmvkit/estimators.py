"""scikit-learn style wrappers around the inverse solvers.

``fit`` takes eigenvalue data (and parameters where the problem needs
them) and stores the reconstructed matrix; ``predict`` evaluates its
characteristic function at points of the disk; ``transform`` maps
eigenvalue sets to parameter arrays.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .errors import ArgumentError
from .inverse import MixedFirstData, MixedLastData, mixed_first, mixed_last, reconstruct_from_spectrum
from .numkernel import match_multisets
from .spectra import charfun_schur, spectrum


class _CmvEstimator(BaseEstimator):
    def _store(self, t):
        if not hasattr(t, "dense"):
            raise ArgumentError("the data determine a family of matrices, not a single one")
        self.matrix_ = t
        self.params_ = t.params.as_array()
        self.verification_ = dict(t.info.get("verification", {}))
        return self

    def predict(self, z):
        """Characteristic function of the fitted matrix at ``z``."""
        check_is_fitted(self, "matrix_")
        return np.asarray(charfun_schur(self.matrix_, np.asarray(z, dtype=complex)))

    def eigenvalues(self) -> np.ndarray:
        check_is_fitted(self, "matrix_")
        return spectrum(self.matrix_).eigenvalues

    def score(self, X, y=None) -> float:
        """Negative largest distance between X and the fitted spectrum (0 is perfect)."""
        check_is_fitted(self, "matrix_")
        X = np.asarray(X, dtype=complex).ravel()
        ev = self.eigenvalues()
        if X.size == ev.size:
            return -match_multisets(X, ev)
        return -float(max(np.min(np.abs(ev - x)) for x in X))


class InverseSpectralCMV(_CmvEstimator):
    """Truncated CMV matrix with a prescribed full spectrum.

    Parameters
    ----------
    phase : float
        Selects the member of the unitarily equivalent family (the common
        rotation of all parameters).
    """

    def __init__(self, phase: float = 0.0):
        self.phase = phase

    def fit(self, X, y=None):
        return self._store(reconstruct_from_spectrum(np.asarray(X, dtype=complex).ravel(), self.phase))

    def transform(self, X):
        """Parameters (interior then terminal) for each eigenvalue set in X."""
        return np.array([reconstruct_from_spectrum(np.ravel(x), self.phase).params.as_array() for x in X])


class MixedFirstCMV(_CmvEstimator):
    """Truncated CMV matrix from part of its spectrum and its leading parameters.

    ``fit(X, y)`` takes eigenvalues X (repeats count as multiplicity) and
    leading parameters y.  ``n`` defaults to len(y) + len(X) - 1.
    """

    def __init__(self, n: int | None = None, method: str = "auto"):
        self.n = n
        self.method = method

    def fit(self, X, y):
        X = np.asarray(X, dtype=complex).ravel()
        y = np.asarray(y, dtype=complex).ravel()
        n = self.n if self.n is not None else y.size + X.size - 1
        return self._store(mixed_first(MixedFirstData(list(X), y, n), method=self.method))


class MixedLastCMV(_CmvEstimator):
    """Truncated CMV matrix from part of its spectrum and its trailing parameters.

    ``fit(X, y)`` takes eigenvalues X and the interior trailing parameters y;
    the unimodular last parameter is ``terminal``.
    """

    def __init__(self, terminal: complex = 1.0, seed: int = 0):
        self.terminal = terminal
        self.seed = seed

    def fit(self, X, y):
        X = np.asarray(X, dtype=complex).ravel()
        y = np.asarray(y, dtype=complex).ravel()
        d = MixedLastData(X, y, self.terminal, X.size + y.size)
        return self._store(mixed_last(d, seed=self.seed))
