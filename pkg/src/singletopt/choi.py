"""Choi and dual-Choi states of qubit channels.

The Choi state is the two-qubit state obtained by sending half of |Phi+>
through the channel; it encodes the channel completely and its spectral
structure carries the optimal singlet fraction and optimal input state.
The dual Choi state (built analogously from the daggered Kraus operators)
is entrywise the swap-conjugate of the Choi state, so the two share a
spectrum and paired eigenvectors share Schmidt coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import KrausChannel, apply_to_half, dual
from .linalg import (
    I2,
    PHI_PLUS,
    SWAP,
    EigenDecomposition,
    hermitian_eig,
    swap_conjugate,
)

__all__ = [
    "ChoiState",
    "choi",
    "dual_choi",
    "eigenvector_correspondence_check",
    "DEGENERACY_GAP",
]

# Below this eigenvalue gap, neighboring eigenvectors are treated as a
# degenerate subspace (individually they are not well defined).
DEGENERACY_GAP = 1e-8


@dataclass(frozen=True)
class ChoiState:
    """A 4x4 Choi-type state with its eigendecomposition cached."""

    matrix: np.ndarray
    eig: EigenDecomposition
    source: str = ""


def _build(matrix: np.ndarray, source: str, check_marginal: bool) -> ChoiState:
    trace = np.trace(matrix).real
    if abs(trace - 1.0) > 1e-12:
        raise ValueError(f"Choi matrix has trace {trace}, expected 1")
    eig = hermitian_eig(matrix, tol=1e-9)
    if eig.eigenvalues.min() < -1e-9:
        raise ValueError("Choi matrix is not positive semidefinite")
    if check_marginal:
        marginal = matrix.reshape(2, 2, 2, 2).trace(axis1=1, axis2=3)
        if np.linalg.norm(marginal - I2 / 2) > 1e-10:
            raise ValueError("Choi matrix first marginal is not maximally mixed")
    frozen = np.array(matrix)
    frozen.setflags(write=False)
    return ChoiState(matrix=frozen, eig=eig, source=source)


def choi(channel: KrausChannel) -> ChoiState:
    """Choi state of a channel: send half of |Phi+> through it."""
    matrix = apply_to_half(channel, PHI_PLUS)
    return _build(matrix, channel.describe(), check_marginal=True)


def dual_choi(channel: KrausChannel) -> ChoiState:
    """Choi-type state of the dual map.

    Constructed from the daggered Kraus list and cross-checked against the
    independent identity dual = (V^dag choi V)^*, so both construction paths
    are exercised on every call.  Unit trace and positivity always hold, but
    the maximally mixed marginal moves to the other side unless the channel
    is unital, so no marginal condition is imposed here.
    """
    matrix = apply_to_half(dual(channel), PHI_PLUS)
    mirrored = swap_conjugate(apply_to_half(channel, PHI_PLUS))
    mismatch = np.abs(matrix - mirrored).max()
    if mismatch > 1e-12:
        raise AssertionError(
            f"dual Choi construction mismatch ({mismatch:.3e}): "
            "Kraus route and swap-conjugate route disagree"
        )
    return _build(matrix, f"dual({channel.describe()})", check_marginal=False)


def _phase_aligned_distance(candidate: np.ndarray, target: np.ndarray) -> float:
    """Distance between unit vectors minimized over a global phase.

    Computed as an explicit difference after rotating the candidate's phase
    onto the target (the closed form sqrt(2 - 2|overlap|) bottoms out at
    sqrt(machine epsilon) and would mask genuinely tiny residuals).
    """
    overlap = np.vdot(target, candidate)
    if abs(overlap) == 0.0:
        return float(np.sqrt(2.0))
    aligned = candidate * (overlap.conjugate() / abs(overlap))
    return float(np.linalg.norm(aligned - target))


def _clusters(eigenvalues: np.ndarray, gap: float):
    start = 0
    n = len(eigenvalues)
    while start < n:
        stop = start + 1
        while stop < n and eigenvalues[stop - 1] - eigenvalues[stop] < gap:
            stop += 1
        yield start, stop
        start = stop


def eigenvector_correspondence_check(channel: KrausChannel) -> float:
    """Largest residual of the swap-conjugate eigenvector pairing.

    Mapping each Choi eigenvector v through (V^dag v)^* must reproduce the
    dual-Choi eigenvector of the same eigenvalue (up to phase).  Where the
    spectrum is degenerate (gap below ``DEGENERACY_GAP``) individual vectors
    are not defined, so whole eigenspaces are compared through their
    projectors instead.
    """
    forward = choi(channel).eig
    backward = dual_choi(channel).eig
    worst = 0.0
    for start, stop in _clusters(forward.eigenvalues, DEGENERACY_GAP):
        if stop - start == 1:
            mapped = (SWAP @ forward.eigenvectors[:, start]).conj()
            residual = _phase_aligned_distance(mapped, backward.eigenvectors[:, start])
        else:
            block = forward.eigenvectors[:, start:stop]
            mapped = (SWAP @ block).conj()
            proj_mapped = mapped @ mapped.conj().T
            dual_block = backward.eigenvectors[:, start:stop]
            proj_dual = dual_block @ dual_block.conj().T
            residual = float(np.linalg.norm(proj_mapped - proj_dual))
        worst = max(worst, residual)
    return worst
