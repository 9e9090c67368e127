"""Dense symmetric matrices, the frequency matrices Q_j and G_j, and Morse indices.

Eigenvalues come from a plain cyclic Jacobi solver. The matrices in this
package are at most a few dozen rows, where Jacobi is accurate and easy to
audit; numpy is used only for storage and elementwise arithmetic.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60


class EigenError(RuntimeError):
    """The Jacobi iteration did not converge within the sweep cap."""


class SymmetricMatrix:
    """Real symmetric matrix; the input is symmetrized on construction.

    Inputs whose asymmetry exceeds 1e-12 relative to the largest entry are
    rejected, since silently averaging them would hide modelling errors.
    """

    __slots__ = ("entries",)

    def __init__(self, entries, check: bool = True):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if check and a.size:
            scale = max(float(np.max(np.abs(a))), 1.0)
            asym = float(np.max(np.abs(a - a.T)))
            if asym > SYMMETRY_TOL * scale:
                raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3e})")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self.entries = a

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __repr__(self):
        return f"SymmetricMatrix(dim={self.dim})"

    def norm_inf(self) -> float:
        return float(np.max(np.sum(np.abs(self.entries), axis=1))) if self.dim else 0.0


def _as_array(m) -> np.ndarray:
    return m.entries if isinstance(m, SymmetricMatrix) else np.asarray(m, dtype=float)


@dataclass
class MorseData:
    m_minus: int
    m_plus: int
    m_zero: int
    eigenvalues: list[float] = field(default_factory=list)
    zero_tolerance: float = 0.0

    @property
    def dim(self) -> int:
        return self.m_minus + self.m_plus + self.m_zero


def symplectic_J(n: int) -> np.ndarray:
    """The standard symplectic matrix [[0, -I], [I, 0]] of size 2n."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def build_qj(K, j: int) -> SymmetricMatrix:
    """Q_0(K) = -K; for j >= 1, (1/(1+j^2)) [[-K, j J^t], [j J, -K]]."""
    K = _as_array(K)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError("K must be square")
    if K.shape[0] % 2:
        raise ValueError(f"K must have even dimension, got {K.shape[0]}")
    if j < 0:
        raise ValueError("j must be nonnegative")
    if j == 0:
        return SymmetricMatrix(-K)
    J = symplectic_J(K.shape[0] // 2)
    q = np.block([[-K, j * J.T], [j * J, -K]]) / (1.0 + j * j)
    return SymmetricMatrix(q)


def build_gj(C, D, j: int) -> SymmetricMatrix:
    """G_j = [[-C, jI], [jI, -D]]."""
    C, D = _as_array(C), _as_array(D)
    if C.shape != D.shape or C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError(f"C and D must be square of equal size, got {C.shape} and {D.shape}")
    eye = np.eye(C.shape[0]) * j
    return SymmetricMatrix(np.block([[-C, eye], [eye, -D]]))


def conjugator_X(n: int) -> np.ndarray:
    """Signed permutation X with X^t Q_j(diag(C, D)) X = (1/(1+j^2)) diag(G_j, G_j)."""
    eye = np.eye(n)
    z = np.zeros((n, n))
    return np.block(
        [
            [eye, z, z, z],
            [z, z, z, -eye],
            [z, z, eye, z],
            [z, eye, z, z],
        ]
    )


def block_diag(*blocks) -> np.ndarray:
    blocks = [_as_array(b) for b in blocks]
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i : i + k, i : i + k] = b
        i += k
    return out


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigen(M, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi rotations. Returns (eigenvalues, eigenvectors), unsorted."""
    a = np.array(_as_array(M), dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    if n <= 1:
        return np.diag(a).copy(), v
    fro = np.linalg.norm(a)
    if fro == 0.0:
        return np.zeros(n), v
    for _ in range(max_sweeps):
        off = _off_norm(a)
        if off <= tol * fro:
            return np.diag(a).copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                diff = a[q, q] - a[p, p]
                if abs(apq) <= 1e-300 * max(abs(diff), 1.0):
                    # negligible entry; rotating would overflow theta
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.hypot(theta, 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows/columns p and q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    off = _off_norm(a)
    if off <= tol * fro:
        return np.diag(a).copy(), v
    raise EigenError(f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {off:.3e})")


def sym_eigen(M) -> list[float]:
    """Eigenvalues of a symmetric matrix in ascending order."""
    w, _ = jacobi_eigen(M)
    return sorted(float(x) for x in w)


def default_zero_tolerance(M) -> float:
    a = _as_array(M)
    norm = float(np.max(np.sum(np.abs(a), axis=1))) if a.size else 0.0
    return 1e-9 * (1.0 + norm)


def morse_indices(M, zero_tolerance: float | None = None) -> MorseData:
    """Negative, positive and (near-)zero eigenvalue counts."""
    tol = default_zero_tolerance(M) if zero_tolerance is None else zero_tolerance
    eig = sym_eigen(M)
    m_minus = sum(1 for x in eig if x < -tol)
    m_plus = sum(1 for x in eig if x > tol)
    m_zero = len(eig) - m_minus - m_plus
    if m_zero:
        log.warning("matrix has %d eigenvalue(s) within %.3e of zero; Morse counts are at a degenerate point", m_zero, tol)
    return MorseData(m_minus, m_plus, m_zero, eig, tol)


def pair_eigenvalues(eig, tol: float = 1e-8) -> list[float]:
    """Collapse a sorted list with even multiplicities into one value per pair.

    Raises ValueError when consecutive entries fail to pair up within
    ``tol * (1 + |largest|)``.
    """
    eig = sorted(eig)
    if len(eig) % 2:
        raise ValueError("odd number of eigenvalues cannot pair up")
    scale = 1.0 + max((abs(x) for x in eig), default=0.0)
    out = []
    for a, b in zip(eig[0::2], eig[1::2]):
        if abs(a - b) > tol * scale:
            raise ValueError(f"eigenvalues {a!r} and {b!r} do not form a pair")
        out.append(0.5 * (a + b))
    return out


__all__ = [
    "SymmetricMatrix",
    "MorseData",
    "EigenError",
    "symplectic_J",
    "build_qj",
    "build_gj",
    "conjugator_X",
    "block_diag",
    "jacobi_eigen",
    "sym_eigen",
    "morse_indices",
    "default_zero_tolerance",
    "pair_eigenvalues",
]
