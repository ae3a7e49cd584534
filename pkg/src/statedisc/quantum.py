"""Real density matrices, the depolarizing channel and small symmetric eigensolvers.

Every density matrix handed out by this module is a read-only ``float64``
ndarray; complex input is rejected because all measurement statistics used
downstream only depend on the real part of a projector.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError, ResourceError

DensityMatrix = np.ndarray

SYMMETRY_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
EIG_SYMMETRY_TOL = 1e-9
DEGENERACY_TOL = 1e-10
DEFAULT_DIM_CAP = 3**8


class EigenDecomposition(NamedTuple):
    """Eigenvalues in descending order with matching orthonormal columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def _frozen(m: np.ndarray) -> np.ndarray:
    m.setflags(write=False)
    return m


def as_density_matrix(m, *, check: bool = True) -> DensityMatrix:
    """Validate ``m`` and return it as a read-only real density matrix.

    Raises:
        ParameterError: complex entries, non-square shape, or a violated
            symmetry / trace / positivity invariant.
    """
    arr = np.asarray(m)
    if np.iscomplexobj(arr):
        raise ParameterError("density matrices must be real")
    arr = np.array(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise ParameterError(f"expected a square matrix, got shape {arr.shape}")
    if check:
        if not np.all(np.isfinite(arr)):
            raise ParameterError("density matrix has non-finite entries")
        if np.max(np.abs(arr - arr.T)) > SYMMETRY_TOL:
            raise ParameterError("density matrix is not symmetric")
        if abs(np.trace(arr) - 1.0) > TRACE_TOL:
            raise ParameterError(f"density matrix trace is {np.trace(arr)!r}, expected 1")
        if np.linalg.eigvalsh(arr)[0] < -PSD_TOL:
            raise ParameterError("density matrix is not positive semidefinite")
    return _frozen(arr)


def pure_qubit(theta: float) -> DensityMatrix:
    """|theta><theta| for |theta> = cos(theta/2)|0> + sin(theta/2)|1>."""
    if not np.isfinite(theta):
        raise ParameterError("theta must be finite")
    v = np.array([np.cos(theta / 2.0), np.sin(theta / 2.0)])
    return _frozen(np.outer(v, v))


def qutrit_vector(phi: float, theta: float) -> np.ndarray:
    """Real unit vector (sin t cos p, sin t sin p, cos t)."""
    if not (np.isfinite(phi) and np.isfinite(theta)):
        raise ParameterError("angles must be finite")
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def pure_qutrit(phi: float, theta: float) -> DensityMatrix:
    v = qutrit_vector(phi, theta)
    return _frozen(np.outer(v, v))


def depolarize(rho, gamma: float, d: int | None = None) -> DensityMatrix:
    """Apply the depolarizing channel ``(1 - gamma) rho + gamma I / d``."""
    rho = np.asarray(rho, dtype=np.float64)
    if d is None:
        d = rho.shape[0]
    if rho.shape != (d, d):
        raise ParameterError(f"rho has shape {rho.shape}, expected ({d}, {d})")
    if not 0.0 <= gamma <= 1.0:
        raise ParameterError(f"gamma must lie in [0, 1], got {gamma!r}")
    return _frozen((1.0 - gamma) * rho + (gamma / d) * np.eye(d))


def tensor(factors: Sequence, *, dim_cap: int = DEFAULT_DIM_CAP) -> DensityMatrix:
    """Kronecker product of ``factors`` in list order."""
    if len(factors) == 0:
        raise ParameterError("tensor needs at least one factor")
    total = 1
    for f in factors:
        total *= np.shape(f)[0]
    if total > dim_cap:
        raise ResourceError(f"tensor dimension {total} exceeds cap {dim_cap}")
    out = np.asarray(factors[0], dtype=np.float64)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=np.float64))
    return _frozen(np.array(out))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    # first component with |x| > tol of each column is made positive
    mask = np.abs(vectors) > 1e-12
    first = np.argmax(mask, axis=0)
    signs = np.sign(vectors[first, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def _eig2(m: np.ndarray) -> EigenDecomposition:
    a, b, c = m[0, 0], m[0, 1], m[1, 1]
    mean = 0.5 * (a + c)
    r = np.hypot(0.5 * (a - c), b)
    values = np.array([mean + r, mean - r])
    if r <= DEGENERACY_TOL * max(1.0, abs(mean)):
        return EigenDecomposition(values, np.eye(2))
    # top eigenvector from whichever row of (M - lambda_min I) is better conditioned
    lo = values[1]
    u = np.array([a - lo, b])
    w = np.array([b, c - lo])
    top = u if np.dot(u, u) >= np.dot(w, w) else w
    top = top / np.linalg.norm(top)
    vectors = np.column_stack([top, [-top[1], top[0]]])
    return EigenDecomposition(values, vectors)


def eig_sym(m) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix, eigenvalues descending.

    The input is symmetrized as ``(M + M^T) / 2`` first. Each eigenvector is
    signed so that its first non-negligible component is positive.
    """
    arr = np.asarray(m)
    if np.iscomplexobj(arr):
        raise ParameterError("eig_sym expects a real matrix")
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {arr.shape}")
    if np.max(np.abs(arr - arr.T), initial=0.0) > EIG_SYMMETRY_TOL:
        raise ParameterError("matrix is not symmetric")
    arr = 0.5 * (arr + arr.T)
    if arr.shape[0] == 1:
        return EigenDecomposition(arr[0].copy(), np.ones((1, 1)))
    if arr.shape[0] == 2:
        values, vectors = _eig2(arr)
    else:
        values, vectors = np.linalg.eigh(arr)
        values, vectors = values[::-1], vectors[:, ::-1]
    return EigenDecomposition(values, _fix_signs(vectors))
