"""Vectorized building blocks for the derivative-free searches.

All functions operate on stacks of small matrices (leading batch axis) so
the optimizers can evaluate hundreds of candidates per objective call.
"""

from __future__ import annotations

import numpy as np

from .linalg import I2, MAGIC_BASIS


def su2_euler_batch(alpha, beta, gamma) -> np.ndarray:
    """Stack of SU(2) matrices Rz(alpha) Ry(beta) Rz(gamma)."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    c = np.cos(beta / 2)
    s = np.sin(beta / 2)
    plus = np.exp(-0.5j * (alpha + gamma))
    minus = np.exp(-0.5j * (alpha - gamma))
    out = np.empty(np.broadcast(alpha, beta, gamma).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = plus * c
    out[..., 0, 1] = -minus * s
    out[..., 1, 0] = minus.conj() * s
    out[..., 1, 1] = plus.conj() * c
    return out


def kron_right_identity(a: np.ndarray) -> np.ndarray:
    """Batched A (x) I for a stack of 2x2 matrices."""
    return np.einsum("...ac,bd->...abcd", a, I2).reshape(a.shape[:-2] + (4, 4))


def kron_left_identity(a: np.ndarray) -> np.ndarray:
    """Batched I (x) A for a stack of 2x2 matrices."""
    return np.einsum("ac,...bd->...abcd", I2, a).reshape(a.shape[:-2] + (4, 4))


def partial_transpose_batch(m: np.ndarray) -> np.ndarray:
    """Partial transpose on the first qubit for a stack of 4x4 matrices."""
    shape = m.shape
    t = m.reshape(shape[:-2] + (2, 2, 2, 2))
    t = np.moveaxis(t, (-4, -2), (-2, -4))
    return t.reshape(shape)


def magic_top_eig_batch(m: np.ndarray) -> np.ndarray:
    """lambda_max of Re(Q^dag M Q) for a stack of Hermitian 4x4 matrices.

    This is the (unnormalized) maximal overlap with the maximally entangled
    manifold: the magic basis makes that manifold the real unit sphere.
    """
    transformed = MAGIC_BASIS.conj().T @ m @ MAGIC_BASIS
    sym = transformed.real
    sym = (sym + np.swapaxes(sym, -1, -2)) / 2
    return np.linalg.eigvalsh(sym)[..., -1]


def negativity_batch(rho: np.ndarray) -> np.ndarray:
    """max(0, -2 lambda_min(rho^Gamma)) for a stack of density matrices."""
    eigs = np.linalg.eigvalsh(partial_transpose_batch(rho))
    return np.maximum(0.0, -2.0 * eigs[..., 0])
