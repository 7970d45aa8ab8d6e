"""Sample covariance, Hermitian eigendecomposition, and subspace partition."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError, NumericalError
from .signal_synth import SnapshotMatrix

HERMITIAN_RTOL = 1e-12
_CANONICAL_TOL = 1e-12


def _as_matrix(value) -> np.ndarray:
    if isinstance(value, CovarianceMatrix):
        return value.matrix
    if isinstance(value, SnapshotMatrix):
        return value.data
    return np.asarray(value)


def _hermitian_defect(matrix: np.ndarray) -> float:
    scale = np.linalg.norm(matrix)
    if scale == 0.0:
        return 0.0
    return float(np.linalg.norm(matrix - matrix.conj().T) / scale)


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Hermitian (PSD up to rounding) spatial covariance, M x M."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValueError("covariance must be a square matrix")
        if not np.all(np.isfinite(mat)):
            raise ValueError("covariance entries must be finite")
        if _hermitian_defect(mat) > HERMITIAN_RTOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "matrix", mat)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Real eigenvalues in ascending order with paired orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True, eq=False)
class SubspaceSplit:
    """Partition into signal (m columns) and noise (M - m columns) bases."""

    source_count: int
    noise_basis: np.ndarray
    signal_basis: np.ndarray


def sample_covariance(snapshots: Union[SnapshotMatrix, np.ndarray]) -> CovarianceMatrix:
    """Average of snapshot outer products, (1/N) * sum_n x_n x_n^H.

    The result is re-symmetrized after accumulation so the Hermitian
    invariant holds exactly despite rounding.
    """
    data = _as_matrix(snapshots)
    if data.ndim != 2 or data.size == 0:
        raise ValueError("snapshot matrix must be a non-empty M x N array")
    n = data.shape[1]
    cov = data @ data.conj().T / n
    cov = (cov + cov.conj().T) / 2.0
    return CovarianceMatrix(cov)


def _canonicalize_columns(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its first above-threshold component is real positive.

    Makes eigenvector output comparable across implementations when
    eigenvalues tie (the decomposition is otherwise unique only up to phase).
    """
    out = np.array(vectors)
    for k in range(out.shape[1]):
        column = out[:, k]
        idx = int(np.argmax(np.abs(column) > _CANONICAL_TOL))
        pivot = column[idx]
        magnitude = abs(pivot)
        if magnitude > 0.0:
            column *= np.conj(pivot) / magnitude
    return out


def eig_hermitian(cov: Union[CovarianceMatrix, np.ndarray]) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Raises ValueError for inputs that are not Hermitian within tolerance and
    NumericalError if the solver fails to converge (never silent).
    """
    matrix = _as_matrix(cov)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError("expected a square matrix")
    if _hermitian_defect(matrix) > HERMITIAN_RTOL:
        raise ValueError("matrix is not Hermitian within tolerance")
    matrix = (matrix + matrix.conj().T) / 2.0
    try:
        values, vectors = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigendecomposition failed to converge: {exc}") from exc
    return EigenDecomposition(eigenvalues=values, eigenvectors=_canonicalize_columns(vectors))


def split_subspaces(eig: EigenDecomposition, source_count: int) -> SubspaceSplit:
    """Noise basis from the M - m smallest eigenvalues, signal basis the rest."""
    dim = eig.eigenvectors.shape[0]
    if not 1 <= source_count < dim:
        raise ConfigurationError(
            f"source count must satisfy 1 <= m < M={dim}, got {source_count}")
    noise = eig.eigenvectors[:, :dim - source_count]
    signal = eig.eigenvectors[:, dim - source_count:]
    return SubspaceSplit(source_count=source_count, noise_basis=noise, signal_basis=signal)
