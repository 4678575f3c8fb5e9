"""Shared helpers for the test suite."""

import numpy as np

from singletopt.channel import KrausChannel, random_channel
from singletopt.linalg import PAULIS


def random_density(rng, rank=4, dim=4):
    """Random mixed state of the given rank (Ginibre construction)."""
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng, dim=4):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_product_state(rng):
    """Pure product state on qubit x qubit."""
    return np.kron(random_pure(rng, 2), random_pure(rng, 2))


def random_unitary(rng, dim=2):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r))).conj()


def random_pauli_mixture(rng, min_gap=1e-6):
    """Random unital channel built as a Pauli mixture.

    Resamples until the largest weight is separated from the second by
    ``min_gap`` so the top Choi eigenvalue is simple.
    """
    while True:
        q = rng.dirichlet(np.ones(4))
        top = np.sort(q)
        if top[-1] - top[-2] > min_gap:
            break
    ops = tuple(np.sqrt(qi) * sigma for qi, sigma in zip(q, PAULIS) if qi > 1e-14)
    return KrausChannel(kraus=ops, label="pauli_mixture")


def random_channels(seed, count, ranks=(1, 2, 3, 4)):
    """Deterministic stream of random channels with cycling Kraus rank."""
    return [
        random_channel((seed * 1_000_003 + k) % 2**63, ranks[k % len(ranks)])
        for k in range(count)
    ]
