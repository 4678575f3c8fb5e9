"""Headline quantities of a qubit channel under a single use.

The optimal singlet fraction of a channel equals the top eigenvalue of its
Choi state; the pure input achieving it is the top eigenvector of the dual
Choi state, maximally entangled exactly when the channel is unital.  This
module computes those, the related teleportation fidelity, the negativity
identity lambda_max = (1 + N)/2, a derivative-free maximization of the
output negativity over all pure inputs, and an aggregated report.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._batched import (
    kron_left_identity,
    kron_right_identity,
    magic_top_eig_batch,
    negativity_batch,
    su2_euler_batch,
)
from .channel import KrausChannel, apply_to_half, is_unital, validate
from .choi import DEGENERACY_GAP, choi, dual_choi, eigenvector_correspondence_check
from .entmetrics import (
    SchmidtData,
    negativity,
    pt_spectrum_identity_residual,
    schmidt,
    singlet_fraction,
    teleportation_fidelity,
)
from .linalg import swap_conjugate
from .optimize import SearchSpec, compass_search

__all__ = [
    "ENTANGLEMENT_BREAKING_THRESHOLD",
    "OptimalFraction",
    "OptimalInput",
    "Classification",
    "NegativitySearch",
    "ChannelReport",
    "optimal_singlet_fraction",
    "optimal_input_state",
    "preprocessed_fidelity",
    "preprocessed_fidelity_oracle",
    "classify",
    "negativity_relation_residual",
    "channel_negativity",
    "report",
]

# A channel whose Choi top eigenvalue does not exceed 1/2 leaves no usable
# entanglement after a single use; the classical value 1/2 is then reported.
ENTANGLEMENT_BREAKING_THRESHOLD = 0.5 + 1e-12


@dataclass(frozen=True)
class OptimalFraction:
    """Optimal singlet fraction with the raw Choi eigenvalue alongside."""

    value: float
    lambda_max: float
    entanglement_breaking: bool


def optimal_singlet_fraction(channel: KrausChannel) -> OptimalFraction:
    """Best singlet fraction over all pure inputs and local post-processing.

    Equals the top Choi eigenvalue whenever that exceeds 1/2; below that the
    channel is flagged entanglement breaking and the reported value floors
    at the separably achievable 1/2.
    """
    lam = float(choi(channel).eig.eigenvalues[0])
    breaking = lam <= ENTANGLEMENT_BREAKING_THRESHOLD
    return OptimalFraction(
        value=max(0.5, lam), lambda_max=lam, entanglement_breaking=breaking
    )


@dataclass(frozen=True)
class OptimalInput:
    """Optimal pure input: top eigenvector of the dual Choi state."""

    state: np.ndarray
    schmidt: SchmidtData
    degenerate: bool


def optimal_input_state(channel: KrausChannel) -> OptimalInput:
    """Pure input whose channel output attains the optimal singlet fraction.

    When the dual Choi top eigenvalue is degenerate the optimizing input is
    not unique; the deterministic tie-broken eigenvector is returned with
    ``degenerate`` set.
    """
    eig = dual_choi(channel).eig
    gap = float(eig.eigenvalues[0] - eig.eigenvalues[1])
    state = eig.eigenvectors[:, 0]
    return OptimalInput(
        state=state, schmidt=schmidt(state), degenerate=gap < DEGENERACY_GAP
    )


def preprocessed_fidelity(channel: KrausChannel) -> float:
    """Best singlet fraction over pure inputs without any post-processing.

    Equals the top eigenvalue of the dual Choi state, which by the swap
    conjugation identity coincides with the top Choi eigenvalue.
    """
    return float(dual_choi(channel).eig.eigenvalues[0])


def _schmidt_family_states(lam, alpha, beta, gamma) -> np.ndarray:
    """States (I (x) V(angles)) (sqrt(lam)|00> + sqrt(1-lam)|11>), batched."""
    lam = np.asarray(lam, dtype=float)
    base = np.zeros(lam.shape + (4,), dtype=complex)
    base[..., 0] = np.sqrt(np.clip(lam, 0.0, 1.0))
    base[..., 3] = np.sqrt(np.clip(1.0 - lam, 0.0, 1.0))
    v = su2_euler_batch(alpha, beta, gamma)
    return np.einsum("...ij,...j->...i", kron_left_identity(v), base)


def _output_states(channel: KrausChannel, psi: np.ndarray) -> np.ndarray:
    """Channel action on the second qubit for a batch of pure inputs."""
    rho = psi[..., :, None] * psi[..., None, :].conj()
    out = np.zeros_like(rho)
    for op in channel.kraus:
        big = kron_left_identity(np.asarray(op)[None, :, :])[0]
        out += big @ rho @ big.conj().T
    return out


def preprocessed_fidelity_oracle(
    channel: KrausChannel,
    schmidt_points: int = 17,
    angle_points: int = 12,
    refine: bool = True,
) -> float:
    """Grid maximization of the output singlet fraction over pure inputs.

    Inputs are swept in Schmidt form (weight times a local unitary on the
    transmitted qubit; a local unitary on the kept qubit cannot change the
    singlet fraction).  The best grid cells are polished by coordinate
    search.  Always a lower bound on :func:`preprocessed_fidelity`.
    """
    lam = np.linspace(0.0, 1.0, schmidt_points)
    alpha = np.arange(angle_points) * (2 * np.pi / angle_points)
    beta = np.linspace(0.0, np.pi, max(3, angle_points // 2 + 1))
    gamma = np.arange(angle_points) * (2 * np.pi / angle_points)
    grids = np.meshgrid(lam, alpha, beta, gamma, indexing="ij")
    params = np.stack([g.ravel() for g in grids], axis=-1)

    def objective(x: np.ndarray) -> np.ndarray:
        psi = _schmidt_family_states(x[:, 0], x[:, 1], x[:, 2], x[:, 3])
        return magic_top_eig_batch(_output_states(channel, psi))

    values = objective(params)
    if not refine:
        return float(values.max())
    top = np.argsort(values)[-6:]
    spec = SearchSpec.build(
        4, clip={0: (0.0, 1.0)}, wrap={1: 2 * np.pi, 2: 2 * np.pi, 3: 2 * np.pi}
    )
    _, best = compass_search(
        objective, params[top], spec, step0=0.3, step_tol=1e-7
    )
    return float(max(best, values.max()))


@dataclass(frozen=True)
class Classification:
    """Unitality against entanglement of the optimal input."""

    unital: bool
    unitality_deviation: float
    psi0_maximally_entangled: bool | None
    verdict: str


def classify(channel: KrausChannel, mes_tol: float = 1e-7) -> Classification:
    """Check that the optimal input is maximally entangled iff unital.

    A degenerate dual-Choi top eigenvalue leaves the optimal input
    ambiguous, so the verdict is then "indeterminate".
    """
    unital, deviation = is_unital(channel)
    inp = optimal_input_state(channel)
    if inp.degenerate:
        return Classification(unital, deviation, None, "indeterminate")
    mes = abs(float(inp.schmidt.coefficients[0]) - 0.5) < mes_tol
    verdict = "consistent" if mes == unital else "inconsistent"
    return Classification(unital, deviation, mes, verdict)


def negativity_relation_residual(channel: KrausChannel) -> float:
    """|lambda_max(choi) - (1 + N(choi))/2|.

    Zero (to numerical precision) for every channel that is not
    entanglement breaking; in the breaking regime N vanishes while
    lambda_max drops below 1/2, so the relation intentionally fails there
    and the residual is reported without being asserted.
    """
    state = choi(channel)
    lam = float(state.eig.eigenvalues[0])
    return abs(lam - 0.5 * (1.0 + negativity(state.matrix)))


@dataclass(frozen=True)
class NegativitySearch:
    """Best output negativity found over pure inputs."""

    value: float
    input_state: np.ndarray
    schmidt_weight: float
    euler_angles: tuple


def channel_negativity(
    channel: KrausChannel,
    restarts: int = 16,
    budget: int = 5000,
    seed: int = 0,
) -> NegativitySearch:
    """Maximize output negativity over all pure inputs.

    Inputs are parameterized through the equivalent filter picture: the
    output for the Schmidt-form input (weight lam, local unitary V on the
    transmitted qubit) is the Choi state filtered on the kept side by
    W_lam V^T, renormalized.  The kept-side unitary is dropped since
    negativity is invariant under local unitaries.  The search runs the
    requested number of random restarts plus the maximally entangled seed,
    so the result never falls below the Choi negativity.
    """
    j = choi(channel).matrix

    def objective(x: np.ndarray) -> np.ndarray:
        lam = np.clip(x[:, 0], 0.0, 1.0)
        v = su2_euler_batch(x[:, 1], x[:, 2], x[:, 3])
        w = np.zeros_like(v)
        w[:, 0, 0] = np.sqrt(lam)
        w[:, 1, 1] = np.sqrt(1.0 - lam)
        filt = kron_right_identity(w @ np.swapaxes(v, 1, 2))
        m = filt @ j @ filt.conj().swapaxes(1, 2)
        p = np.einsum("nii->n", m).real
        safe = np.where(p > 1e-14, p, 1.0)
        values = negativity_batch(m / safe[:, None, None])
        return np.where(p > 1e-14, values, 0.0)

    rng = np.random.default_rng(seed)
    starts = np.empty((restarts + 1, 4))
    starts[0] = (0.5, 0.0, 0.0, 0.0)
    starts[1:, 0] = rng.uniform(0.0, 1.0, restarts)
    starts[1:, 1] = rng.uniform(0.0, 2 * np.pi, restarts)
    starts[1:, 2] = rng.uniform(0.0, np.pi, restarts)
    starts[1:, 3] = rng.uniform(0.0, 2 * np.pi, restarts)

    spec = SearchSpec.build(
        4, clip={0: (0.0, 1.0)}, wrap={1: 2 * np.pi, 2: 2 * np.pi, 3: 2 * np.pi}
    )
    x, value = compass_search(
        objective, starts, spec, step0=0.4, step_tol=1e-7, max_evals=budget
    )
    psi = _schmidt_family_states(
        np.array([x[0]]), np.array([x[1]]), np.array([x[2]]), np.array([x[3]])
    )[0]
    return NegativitySearch(
        value=value,
        input_state=psi,
        schmidt_weight=float(max(x[0], 1.0 - x[0])),
        euler_angles=(float(x[1]), float(x[2]), float(x[3])),
    )


@dataclass(frozen=True)
class ChannelReport:
    """Everything derived from one channel, with self-check residuals."""

    label: str
    F_lambda: float
    lambda_max: float
    entanglement_breaking: bool
    psi0: np.ndarray
    psi0_schmidt: np.ndarray
    psi0_degenerate: bool
    unital: bool
    unitality_deviation: float
    f_tel: float
    N_choi: float
    F1: float
    residuals: dict

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "F_lambda": self.F_lambda,
            "lambda_max": self.lambda_max,
            "entanglement_breaking": self.entanglement_breaking,
            "psi0": [[float(z.real), float(z.imag)] for z in self.psi0],
            "psi0_schmidt": [float(x) for x in self.psi0_schmidt],
            "psi0_degenerate": self.psi0_degenerate,
            "unital": self.unital,
            "unitality_deviation": self.unitality_deviation,
            "f_tel": self.f_tel,
            "N_choi": self.N_choi,
            "F1": self.F1,
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
        }


def report(channel: KrausChannel) -> ChannelReport:
    """Compute all derived quantities and identity residuals for a channel.

    Raises ``ValueError`` if the channel fails CPTP validation.
    """
    check = validate(channel)
    if not check.ok:
        raise ValueError(
            "channel is not CPTP: "
            f"tp_residual={check.tp_residual:.3e}, "
            f"cp_min_eigenvalue={check.cp_min_eigenvalue:.3e}"
        )
    forward = choi(channel)
    backward = dual_choi(channel)
    frac = optimal_singlet_fraction(channel)
    inp = optimal_input_state(channel)
    unital, deviation = is_unital(channel)

    achieved, _ = singlet_fraction(apply_to_half(channel, inp.state))
    residuals = {
        "tp": check.tp_residual,
        "cp_min_eigenvalue": check.cp_min_eigenvalue,
        "dual_choi_entrywise": float(
            np.abs(backward.matrix - swap_conjugate(forward.matrix)).max()
        ),
        "dual_choi_spectrum": float(
            np.abs(backward.eig.eigenvalues - forward.eig.eigenvalues).max()
        ),
        "pt_spectrum_identity": abs(pt_spectrum_identity_residual(forward.matrix)),
        "negativity_relation": negativity_relation_residual(channel),
        "eigenvector_correspondence": eigenvector_correspondence_check(channel),
        "optimal_input_achievement": abs(achieved - frac.lambda_max),
    }
    return ChannelReport(
        label=channel.describe(),
        F_lambda=frac.value,
        lambda_max=frac.lambda_max,
        entanglement_breaking=frac.entanglement_breaking,
        psi0=inp.state,
        psi0_schmidt=inp.schmidt.coefficients,
        psi0_degenerate=inp.degenerate,
        unital=unital,
        unitality_deviation=deviation,
        f_tel=teleportation_fidelity(frac.value),
        N_choi=negativity(forward.matrix),
        F1=preprocessed_fidelity(channel),
        residuals=residuals,
    )
