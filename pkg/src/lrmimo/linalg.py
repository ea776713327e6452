"""Dense complex linear algebra primitives used throughout the package.

All routines operate on plain numpy complex arrays and are pure functions;
matrices are never modified in place.  The QR decomposition is normalized so
that the diagonal of R is real and strictly positive, which the reduction
predicates rely on.
"""

import numpy as np

from .errors import SingularMatrixError, ValidationError

# Relative threshold under which an R diagonal entry counts as numerically zero.
_RANK_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Validate and return a 2-D complex array (finite entries, nonempty)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValidationError(f"expected a nonempty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValidationError("matrix entries must be finite")
    return m


def as_vector(v) -> np.ndarray:
    """Validate and return a 1-D complex array (finite entries, nonempty)."""
    w = np.asarray(v, dtype=np.complex128)
    if w.ndim != 1 or w.shape[0] < 1:
        raise ValidationError(f"expected a nonempty 1-D array, got shape {w.shape}")
    if not np.all(np.isfinite(w.real)) or not np.all(np.isfinite(w.imag)):
        raise ValidationError("vector entries must be finite")
    return w


def qr_decompose(a) -> tuple[np.ndarray, np.ndarray]:
    """Reduced QR of a full-column-rank matrix, R diagonal real and positive.

    Returns (Q, R) with Q of shape (rows, cols) having orthonormal columns and
    R upper triangular.  Raises SingularMatrixError when a diagonal entry of R
    falls below 1e-12 times the largest column norm.
    """
    a = as_matrix(a)
    rows, cols = a.shape
    if rows < cols:
        raise ValidationError(f"need rows >= cols, got {rows}x{cols}")
    q, r = np.linalg.qr(a, mode="reduced")
    d = np.diagonal(r).copy()
    scale = np.max(np.linalg.norm(a, axis=0))
    if scale == 0.0 or np.min(np.abs(d)) <= _RANK_TOL * scale:
        raise SingularMatrixError("matrix is numerically rank deficient")
    phase = d / np.abs(d)
    q = q * phase[np.newaxis, :]
    r = r * np.conj(phase)[:, np.newaxis]
    # kill the O(eps) imaginary residue so the diagonal is exactly real
    idx = np.arange(cols)
    r[idx, idx] = r[idx, idx].real
    return q, r


def pseudoinverse(a) -> np.ndarray:
    """Left pseudoinverse (A^H A)^-1 A^H of a full-column-rank matrix."""
    q, r = qr_decompose(a)
    return np.linalg.solve(r, q.conj().T)


def singular_values(a) -> np.ndarray:
    """Singular values of a, sorted descending (all nonnegative)."""
    a = as_matrix(a)
    return np.linalg.svd(a, compute_uv=False)


def gram_det(a) -> float:
    """det(A^H A) computed as the product of squared R diagonal entries.

    Always real and nonnegative; returns 0.0 for rank-deficient input.
    """
    a = as_matrix(a)
    if a.shape[0] < a.shape[1]:
        raise ValidationError("need rows >= cols for a Gram determinant")
    try:
        _, r = qr_decompose(a)
    except SingularMatrixError:
        return 0.0
    d = np.abs(np.diagonal(r))
    return float(np.prod(d * d))
