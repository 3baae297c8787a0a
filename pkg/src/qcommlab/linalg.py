"""Small dense complex linear algebra: SVD in the U*Sigma*V row-factor
convention, tolerance-based numeric rank, an exact rational rank oracle,
Kronecker products and qubit-subset unitary application.

Conventions used throughout the package:

* qubit 0 is the leftmost (most significant) tensor factor;
* ``tensor(a, b)`` puts ``a`` in the most significant index block;
* a state vector over n qubits has dimension 2**n and basis index
  ``b_0 b_1 ... b_{n-1}`` read as a big-endian integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ContractViolationError, NumericalFailureError

DEFAULT_TOL = 1e-9

_UNITARY_TOL = 1e-9


@dataclass(frozen=True)
class SvdResult:
    """Factorization m = u @ diag(sigma) @ v.

    Note the product convention: ``v`` already is the adjoint of the
    conventional right factor, so no dagger appears when reconstructing.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        k = self.sigma.shape[0]
        return (self.u[:, :k] * self.sigma) @ self.v[:k, :]


def svd(m) -> SvdResult:
    """Singular value decomposition of ``m`` (the argument itself; callers
    that want the transpose convention pass ``m.T``)."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        raise ValueError("svd of an empty matrix")
    if not np.all(np.isfinite(m)):
        raise ValueError("svd input contains NaN/Inf")
    try:
        u, s, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    return SvdResult(u=u, sigma=s, v=vh)


def numeric_rank(m, tol: float = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol * sigma_max``; 0 for the
    all-zero matrix."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    s = svd(m).sigma
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def tensor(a, b) -> np.ndarray:
    """Kronecker product with the left factor as the most significant
    index block (works for vectors and matrices alike)."""
    return np.kron(np.asarray(a), np.asarray(b))


def is_unitary(u, tol: float = _UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    eye = np.eye(u.shape[0])
    return bool(np.max(np.abs(u @ u.conj().T - eye)) <= tol)


def apply_on_qubits(state, u, targets) -> np.ndarray:
    """Apply unitary ``u`` to the given qubits of ``state`` (identity
    elsewhere).  ``targets`` are qubit indices, most-significant-first."""
    state = np.asarray(state, dtype=complex)
    u = np.asarray(u, dtype=complex)
    dim = state.shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n:
        raise ValueError("state length is not a power of two")
    targets = list(targets)
    k = len(targets)
    if len(set(targets)) != k or any(t < 0 or t >= n for t in targets):
        raise ValueError(f"bad target qubits {targets} for {n} qubits")
    if u.shape != (1 << k, 1 << k):
        raise ValueError("unitary dimension does not match target count")
    if not is_unitary(u):
        raise ContractViolationError("operator is not unitary within 1e-9")
    psi = state.reshape([2] * n)
    psi = np.moveaxis(psi, targets, range(k))
    shape = psi.shape
    psi = u @ psi.reshape(1 << k, -1)
    psi = np.moveaxis(psi.reshape(shape), range(k), targets)
    return psi.reshape(dim)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def exact_rank(m) -> int:
    """Exact rank by fraction-free Gaussian elimination over the rationals.

    Entries must be real; binary floats convert losslessly via Fraction.
    Use this as the tolerance-free oracle shadowing ``numeric_rank`` on
    matrices whose entries are exact.
    """
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.any(m.imag != 0):
        raise ValueError("exact_rank only supports real matrices")
    rows = [[Fraction(float(np.real(x))) for x in row] for row in m]
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank = 0
    row = 0
    for col in range(ncols):
        pivot = next((r for r in range(row, nrows) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[row], rows[pivot] = rows[pivot], rows[row]
        pv = rows[row][col]
        for r in range(row + 1, nrows):
            if rows[r][col] != 0:
                factor = rows[r][col] / pv
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[row])]
        row += 1
        rank += 1
        if row == nrows:
            break
    return rank


def unitary_with_first_column(phi) -> np.ndarray:
    """Deterministic unitary whose first column is the given unit vector."""
    phi = np.asarray(phi, dtype=complex)
    dim = phi.shape[0]
    norm = np.linalg.norm(phi)
    if abs(norm - 1.0) > 1e-9:
        raise ValueError("first column must be a unit vector")
    basis = np.concatenate([phi[:, None], np.eye(dim, dtype=complex)], axis=1)
    q, _ = np.linalg.qr(basis)
    # QR fixes the first column only up to phase; undo it.
    phase = np.vdot(q[:, 0], phi)
    q[:, 0] *= phase / abs(phase)
    # Drop the column that became (numerically) dependent.
    if q.shape[1] > dim:
        q = q[:, :dim]
    return q
