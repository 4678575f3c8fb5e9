"""Dense complex linear algebra for 2x2 and 4x4 matrices.

Everything works on plain numpy arrays in the computational basis, which for
two-qubit objects is ordered |00>, |01>, |10>, |11> throughout the package.
Eigendecompositions are returned in a deterministic, phase-fixed form so that
downstream eigenvector selection is reproducible run to run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "I2",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "PAULIS",
    "PHI_PLUS",
    "PHI_MINUS",
    "PSI_PLUS",
    "PSI_MINUS",
    "SWAP",
    "MAGIC_BASIS",
    "EigenDecomposition",
    "tensor_product",
    "is_hermitian",
    "is_psd",
    "is_unitary",
    "hermitian_eig",
    "partial_transpose",
    "swap_conjugate",
    "to_magic_basis",
]

I2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, PAULI_X, PAULI_Y, PAULI_Z)

_SQRT2 = np.sqrt(2.0)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / _SQRT2
PHI_MINUS = np.array([1, 0, 0, -1], dtype=complex) / _SQRT2
PSI_PLUS = np.array([0, 1, 1, 0], dtype=complex) / _SQRT2
PSI_MINUS = np.array([0, 1, -1, 0], dtype=complex) / _SQRT2

# |ij> -> |ji|
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)

# Columns are the maximally entangled basis in which every maximally
# entangled state has real coordinates (up to a global phase).
MAGIC_BASIS = np.column_stack(
    [PHI_PLUS, 1j * PHI_MINUS, 1j * PSI_PLUS, PSI_MINUS]
)

# Eigenvalues closer than this are treated as a degenerate cluster when
# fixing the deterministic ordering.
_TIE_TOL = 1e-12


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product in computational-basis ordering.

    Restricted to results of dimension at most 4 (this package never builds
    anything larger).
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > 4:
        raise ValueError(
            f"tensor product dimension {a.shape[0] * b.shape[0]} exceeds 4"
        )
    return np.kron(a, b)


def is_hermitian(m: np.ndarray, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(m - m.conj().T) <= tol)


def is_psd(m: np.ndarray, tol: float = 1e-9) -> bool:
    """Hermitian with all eigenvalues >= -tol."""
    if not is_hermitian(m, tol):
        return False
    return bool(np.linalg.eigvalsh(m).min() >= -tol)


def is_unitary(m: np.ndarray, tol: float = 1e-9) -> bool:
    m = np.asarray(m)
    return bool(np.linalg.norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol)


def _fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate the global phase so the largest-magnitude entry is real >= 0."""
    k = int(np.argmax(np.abs(v)))
    pivot = v[k]
    if np.abs(pivot) == 0.0:
        return v
    return v * (pivot.conjugate() / np.abs(pivot))


def _vector_key(v: np.ndarray) -> tuple:
    """Deterministic comparison key for tie-breaking degenerate eigenvectors."""
    w = _fix_phase(v)
    rounded = np.round(np.concatenate([w.real, w.imag]), 10)
    return tuple(rounded.tolist())


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    ``eigenvalues`` is real and sorted descending; column ``k`` of
    ``eigenvectors`` is the unit eigenvector paired with ``eigenvalues[k]``,
    phase-fixed so its largest-magnitude component is real and nonnegative.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        """Return sum_k lambda_k |v_k><v_k|."""
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_eig(m: np.ndarray, tol: float = 1e-9) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix with deterministic output.

    Eigenvalues are sorted descending.  Inside clusters of (numerically)
    equal eigenvalues the eigenvectors are ordered by a lexicographic key on
    their rounded, phase-fixed components, so repeated calls and degenerate
    spectra still produce a reproducible decomposition.

    Raises ``ValueError`` if ``m`` is farther than ``tol`` from Hermitian
    (Frobenius norm).
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    herm = (m + m.conj().T) / 2
    w, v = np.linalg.eigh(herm)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]

    # Canonical ordering inside degenerate clusters.
    n = len(w)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[start] - w[stop] < _TIE_TOL:
            stop += 1
        if stop - start > 1:
            keys = sorted(
                range(start, stop), key=lambda k: _vector_key(v[:, k])
            )
            v[:, start:stop] = v[:, keys]
        start = stop

    for k in range(n):
        v[:, k] = _fix_phase(v[:, k])
    w.setflags(write=False)
    v.setflags(write=False)
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def partial_transpose(m: np.ndarray, subsystem: str = "first") -> np.ndarray:
    """Partial transpose of a two-qubit operator on the chosen factor."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    t = m.reshape(2, 2, 2, 2)
    if subsystem == "first":
        t = t.transpose(2, 1, 0, 3)
    elif subsystem == "second":
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError("subsystem must be 'first' or 'second'")
    return t.reshape(4, 4)


def swap_conjugate(m: np.ndarray) -> np.ndarray:
    """Return (V^dag m V)^* with V the two-qubit swap, conjugation in the
    computational basis.  Preserves the spectrum of Hermitian inputs."""
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    return (SWAP @ m @ SWAP).conj()


def to_magic_basis(m: np.ndarray) -> np.ndarray:
    """Conjugate a 4x4 operator into the magic basis.

    Maximally entangled pure states have real coordinate vectors there, so
    the real part of the transformed matrix governs overlaps with the
    maximally entangled manifold.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
    return MAGIC_BASIS.conj().T @ m @ MAGIC_BASIS
