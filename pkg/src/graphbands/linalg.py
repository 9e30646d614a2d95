"""Dense Hermitian eigensolver plus small exact-arithmetic helpers.

The eigensolver is a cyclic Jacobi iteration with complex Givens rotations.
Fiber matrices in this package are tiny (a handful of rows), so O(n^3) sweeps
are cheap, and Jacobi is fully deterministic: the rotation sequence applied to
a matrix depends only on that matrix's own entries, never on what else sits in
the same batch.  The integer-lattice and GF(2) routines work on exact Python
integers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError, ParameterError

JACOBI_OFFDIAG_TOL = 1e-13
JACOBI_MAX_SWEEPS = 50
POWER_ITER_TOL = 1e-12
POWER_ITER_MAX = 100_000


@dataclass(frozen=True)
class EigenResult:
    """Eigenvalues in ascending order; optional orthonormal column vectors."""

    values: np.ndarray
    vectors: np.ndarray | None = None


def _offdiag_norms(stack: np.ndarray) -> np.ndarray:
    off = stack.copy()
    idx = np.arange(stack.shape[-1])
    off[:, idx, idx] = 0.0
    return np.sqrt((np.abs(off) ** 2).sum(axis=(1, 2)))


def _apply_rotation(mats: np.ndarray, vecs: np.ndarray | None, p: int, q: int) -> None:
    """Zero the (p, q) entries of a stack of Hermitian matrices in place.

    The unitary acts as the identity except on rows/columns p and q, where it
    is the 2x2 rotation diag-phased so the pivot entry becomes real before
    the classic symmetric Jacobi angle is applied.
    """
    apq = mats[:, p, q].copy()
    r = np.abs(apq)
    rotate = r > 0.0
    if not rotate.any():
        return
    app = mats[:, p, p].real.copy()
    aqq = mats[:, q, q].real.copy()
    safe_r = np.where(rotate, r, 1.0)
    phase = np.where(rotate, apq / safe_r, 1.0)
    # cot(2*theta); smaller-angle root keeps the iteration contracting.
    w = 0.5 * (app - aqq) / safe_r
    t = np.sign(w) / (np.abs(w) + np.sqrt(1.0 + w * w))
    t = np.where(w == 0.0, 1.0, t)
    t = np.where(rotate, t, 0.0)
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c

    cs = c[:, None]
    ss = s[:, None]
    ph = phase[:, None]

    col_p = mats[:, :, p].copy()
    col_q = mats[:, :, q].copy()
    mats[:, :, p] = cs * col_p + ss * np.conj(ph) * col_q
    mats[:, :, q] = -ss * ph * col_p + cs * col_q
    row_p = mats[:, p, :].copy()
    row_q = mats[:, q, :].copy()
    mats[:, p, :] = cs * row_p + ss * ph * row_q
    mats[:, q, :] = -ss * np.conj(ph) * row_p + cs * row_q

    # Closed forms keep the pivot exactly zero and the diagonal exactly real.
    mats[:, p, p] = np.where(rotate, app + t * r, mats[:, p, p])
    mats[:, q, q] = np.where(rotate, aqq - t * r, mats[:, q, q])
    mats[:, p, q] = np.where(rotate, 0.0, mats[:, p, q])
    mats[:, q, p] = np.where(rotate, 0.0, mats[:, q, p])

    if vecs is not None:
        vcol_p = vecs[:, :, p].copy()
        vcol_q = vecs[:, :, q].copy()
        vecs[:, :, p] = cs * vcol_p + ss * np.conj(ph) * vcol_q
        vecs[:, :, q] = -ss * ph * vcol_p + cs * vcol_q


def eigh_stack(stack: np.ndarray, want_vectors: bool = False):
    """Eigen-decompose a stack of Hermitian matrices, shape (..., n, n).

    Returns (values, vectors): values shape (batch, n) ascending per matrix,
    vectors shape (batch, n, n) with columns matching values, or None.

    Matrices that have individually converged are frozen and never touched
    again, so each matrix's result is bit-identical no matter how the stack
    is chunked.
    """
    mats = np.array(stack, dtype=complex, order="C")
    if mats.ndim == 2:
        mats = mats[None]
    if mats.ndim != 3 or mats.shape[-1] != mats.shape[-2]:
        raise ParameterError("expected a square matrix or a stack of them")
    if not (np.isfinite(mats.real).all() and np.isfinite(mats.imag).all()):
        raise NumericError("non-finite entries in eigensolver input")
    batch, n, _ = mats.shape

    vecs = None
    if want_vectors:
        vecs = np.broadcast_to(np.eye(n, dtype=complex), (batch, n, n)).copy()

    if n > 1:
        fro = np.sqrt((np.abs(mats) ** 2).sum(axis=(1, 2)))
        thresh = JACOBI_OFFDIAG_TOL * np.maximum(fro, np.finfo(float).tiny)
        active = _offdiag_norms(mats) > thresh
        for _ in range(JACOBI_MAX_SWEEPS):
            if not active.any():
                break
            live = np.flatnonzero(active)
            sub = mats[live]
            subv = vecs[live] if want_vectors else None
            for p in range(n - 1):
                for q in range(p + 1, n):
                    _apply_rotation(sub, subv, p, q)
            mats[live] = sub
            if want_vectors:
                vecs[live] = subv
            active[live] = _offdiag_norms(sub) > thresh[live]

    values = np.diagonal(mats, axis1=1, axis2=2).real.copy()
    order = np.argsort(values, axis=1, kind="stable")
    values = np.take_along_axis(values, order, axis=1)
    if want_vectors:
        vecs = np.take_along_axis(vecs, order[:, None, :], axis=2)
    return values, vecs


def hermitian_eigs(matrix, want_vectors: bool = False) -> EigenResult:
    """All eigenvalues (ascending) of one Hermitian matrix.

    The caller is responsible for symmetrizing; only finiteness is checked.
    """
    mat = np.asarray(matrix, dtype=complex)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ParameterError("hermitian_eigs expects one square matrix")
    values, vectors = eigh_stack(mat[None], want_vectors=want_vectors)
    return EigenResult(values[0], vectors[0] if want_vectors else None)


def spectral_radius_nonneg(matrix) -> float:
    """Dominant eigenvalue of an entrywise nonnegative matrix.

    Power iteration from the all-ones vector; for an irreducible matrix this
    converges to the simple dominant (Perron) root.
    """
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ParameterError("expected a square matrix")
    if (mat < 0).any():
        raise ParameterError("negative entry: spectral_radius_nonneg needs entries >= 0")
    x = np.ones(mat.shape[0])
    estimate = -1.0
    for _ in range(POWER_ITER_MAX):
        y = mat @ x
        top = np.abs(y).max()
        if top == 0.0:
            return 0.0
        x = y / top
        if abs(top - estimate) <= POWER_ITER_TOL * top:
            return float(top)
        estimate = top
    raise NumericError("power iteration did not converge (matrix may be reducible)")


def is_irreducible(matrix) -> bool:
    """True iff the support digraph of the matrix is strongly connected."""
    mat = np.asarray(matrix)
    n = mat.shape[0]
    if n == 1:
        return True
    support = mat != 0

    def reachable(adj):
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adj[u]):
                if v not in seen:
                    seen.add(int(v))
                    stack.append(int(v))
        return seen

    return len(reachable(support)) == n and len(reachable(support.T)) == n


def _lu_det(matrix: np.ndarray) -> complex:
    """Determinant via LU with partial pivoting; 0 for a singular input."""
    a = np.array(matrix, dtype=complex)
    n = a.shape[0]
    det = 1.0 + 0.0j
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0.0:
            return 0.0 + 0.0j
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            det = -det
        det *= a[k, k]
        a[k + 1:, k] /= a[k, k]
        a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return complex(det)


def _lu_solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve A X = B by LU with partial pivoting; raises on a singular A."""
    a = np.array(matrix, dtype=complex)
    b = np.array(rhs, dtype=complex)
    n = a.shape[0]
    scale = np.abs(a).max()
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if np.abs(a[piv, k]) <= 1e-14 * max(scale, 1.0):
            raise NumericError("singular leading block")
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        factors = a[k + 1:, k] / a[k, k]
        a[k + 1:, k + 1:] -= np.outer(factors, a[k, k + 1:])
        b[k + 1:] -= np.outer(factors, b[k])
    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return x


def block_determinant(matrix, split: int) -> complex:
    """det(M) via the Schur complement of the leading split x split block.

    Raises NumericError when that block is singular; perturb and retry.
    """
    mat = np.asarray(matrix, dtype=complex)
    n = mat.shape[0]
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ParameterError("expected a square matrix")
    if not 1 <= split <= n - 1:
        raise ParameterError(f"split must lie in [1, {n - 1}], got {split}")
    a = mat[:split, :split]
    b = mat[:split, split:]
    c = mat[split:, :split]
    d = mat[split:, split:]
    schur = d - c @ _lu_solve(a, b)
    return _lu_det(a) * _lu_det(schur)


def gf2_solve(rows, rhs):
    """One solution of a linear system over GF(2), or None if inconsistent.

    Free variables are set to zero.
    """
    mat = [[int(x) & 1 for x in row] for row in rows]
    vec = [int(x) & 1 for x in rhs]
    if len(mat) != len(vec):
        raise ParameterError("row/right-hand-side count mismatch")
    if not mat:
        return ()
    ncols = len(mat[0])
    pivots = []
    row = 0
    for col in range(ncols):
        hit = next((i for i in range(row, len(mat)) if mat[i][col]), None)
        if hit is None:
            continue
        mat[row], mat[hit] = mat[hit], mat[row]
        vec[row], vec[hit] = vec[hit], vec[row]
        for i in range(len(mat)):
            if i != row and mat[i][col]:
                mat[i] = [a ^ b for a, b in zip(mat[i], mat[row])]
                vec[i] ^= vec[row]
        pivots.append((row, col))
        row += 1
        if row == len(mat):
            break
    for i in range(row, len(mat)):
        if vec[i]:
            return None
    solution = [0] * ncols
    for r, c in pivots:
        solution[c] = vec[r]
    return tuple(solution)


def integer_lattice_full(vectors, dimension: int) -> bool:
    """True iff the integer span of the given vectors is all of Z^dimension.

    Row reduction over Z (repeated Euclid steps per column); the span is full
    exactly when every column gets a pivot and the pivot product is 1.
    """
    rows = []
    for vec in vectors:
        row = [int(x) for x in vec]
        if len(row) != dimension:
            raise ParameterError("vector length does not match the dimension")
        rows.append(row)
    index = 1
    top = 0
    for col in range(dimension):
        while True:
            candidates = [i for i in range(top, len(rows)) if rows[i][col] != 0]
            if not candidates:
                pivot = None
                break
            best = min(candidates, key=lambda i: abs(rows[i][col]))
            rows[top], rows[best] = rows[best], rows[top]
            clean = True
            for i in range(top + 1, len(rows)):
                if rows[i][col]:
                    factor = rows[i][col] // rows[top][col]
                    rows[i] = [a - factor * b for a, b in zip(rows[i], rows[top])]
                    if rows[i][col]:
                        clean = False
            if clean:
                pivot = rows[top][col]
                break
        if pivot is None:
            return False
        index *= abs(pivot)
        top += 1
    return index == 1
