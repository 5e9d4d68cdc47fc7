"""Input coercion and checks for the estimator layer."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from .fcidump import MolecularIntegrals, load_fcidump
from .pauli import DimensionError, QubitOperator
from .simulator import Histogram


def check_integrals(X) -> MolecularIntegrals:
    """MolecularIntegrals from an instance or an FCIDUMP path."""
    if isinstance(X, MolecularIntegrals):
        return X
    if isinstance(X, (str, Path)):
        return load_fcidump(X)
    raise TypeError(f"expected MolecularIntegrals or an FCIDUMP path, got {type(X).__name__}")


def check_operator(X) -> QubitOperator:
    if isinstance(X, QubitOperator):
        if not X.is_hermitian():
            raise ValueError("the qubit operator must be Hermitian")
        return X
    if isinstance(X, (list, tuple)):
        return QubitOperator.from_json_list(list(X))
    raise TypeError(f"expected a QubitOperator, got {type(X).__name__}")


def check_parameters(X, n_parameters: int) -> np.ndarray:
    """2-D float array of parameter vectors (one per row)."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionError(f"parameters must be 1-D or 2-D, got shape {arr.shape}")
    if arr.shape[1] != n_parameters:
        raise DimensionError(f"expected {n_parameters} parameters per row, got {arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("parameters must be finite")
    return arr


def check_histograms(X) -> list[Histogram]:
    """List of Histogram from histograms or their dict form; a single one is wrapped."""
    if isinstance(X, (Histogram, Mapping)):
        X = [X]
    out = []
    for h in X:
        if isinstance(h, Histogram):
            out.append(h)
        elif isinstance(h, Mapping):
            out.append(Histogram.from_dict(h))
        else:
            raise TypeError(f"expected Histogram objects, got {type(h).__name__}")
    if not out:
        raise ValueError("no histograms given")
    return out
