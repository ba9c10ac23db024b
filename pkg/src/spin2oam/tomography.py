"""Projective tomography of the receiver's OAM qubit and its reconstruction.

Measurements are projections onto the six states {h, v, d, a, l, r} -- the
eigenstates of the three Pauli operators in the (h, v) mode basis, forming
three mutually unbiased bases.  Counts are drawn independently per projector
from Poisson(shots * p) with p the Born probability; this is the minimal
shot-noise model, with the absolute count scale a free simulation parameter.

Reconstruction maximizes sum_i count_i * log Tr(Pi_i rho) over unit-trace
positive matrices with a diluted fixed-point iteration:

    R(rho)   = sum_i (f_i / p_i) Pi_i,          f_i = count_i / total
    T        = (I + eps * R) / (1 + eps)
    rho_next = T rho T / Tr(T rho T)

Every iterate is Hermitian and positive by construction; a step that would
lower the log-likelihood shrinks eps and retries, so the accepted trajectory
is non-decreasing.  Pure targets sit on the boundary of the state space,
which the plain fixed point approaches only harmonically, so each iteration
also proposes squaring the minor eigenvalue of rho (same eigenvectors); the
proposal is kept only when it does not lower the likelihood, which preserves
monotonicity and leaves interior optima untouched while restoring fast
boundary convergence.  Because the six projectors sum to 3*I, the Poisson
and multinomial likelihoods differ only by a constant on the unit-trace set
and share the same maximizer; ``likelihood`` selects which value is reported.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hilbert import CIRCULAR, HV, DensityMatrix, Ket, oam_basis_change
from .protocol import (
    POLARIZATION_ANGLES,
    BellLabel,
    InputPolarization,
    teleport,
)

__all__ = [
    "MUB_LABELS",
    "BASIS_PAIRS",
    "MUB_STATE_VECTORS",
    "TABLE_INPUT_ORDER",
    "table_inputs",
    "ProjectorSet",
    "CountRecord",
    "MLEResult",
    "TomographyReport",
    "mub_projectors",
    "simulate_counts",
    "mle_reconstruct",
    "fidelity",
    "trace_distance",
    "tomography_report",
    "write_counts_csv",
    "write_report_csv",
    "density_matrix_to_json",
    "density_matrix_from_json",
]

MUB_LABELS = ("h", "v", "d", "a", "l", "r")
BASIS_PAIRS = (("h", "v"), ("d", "a"), ("l", "r"))

_SQRT2 = math.sqrt(2.0)

# State vectors in the (h, v) basis; l and r are the circular states |+l>, |-l>.
MUB_STATE_VECTORS: dict[str, np.ndarray] = {
    "h": np.array([1, 0], dtype=complex),
    "v": np.array([0, 1], dtype=complex),
    "d": np.array([1, 1], dtype=complex) / _SQRT2,
    "a": np.array([1, -1], dtype=complex) / _SQRT2,
    "l": np.array([1, 1j], dtype=complex) / _SQRT2,
    "r": np.array([1, -1j], dtype=complex) / _SQRT2,
}

# Row order of the reference fidelity table over the six polarization inputs.
TABLE_INPUT_ORDER = ("L", "V", "D", "H", "A", "R")


def table_inputs() -> list[tuple[str, float, float]]:
    """(label, gamma, delta) rows for the six reference polarization inputs."""
    return [(label, *POLARIZATION_ANGLES[label]) for label in TABLE_INPUT_ORDER]


@dataclass(frozen=True, eq=False)
class ProjectorSet:
    """Six rank-1 projectors onto the MUB states, grouped into three bases."""

    ell: int
    labels: tuple[str, ...]
    projectors: np.ndarray  # stacked (6, 2, 2)

    def projector(self, label: str) -> np.ndarray:
        return self.projectors[self.labels.index(label)]


@dataclass(frozen=True)
class CountRecord:
    """One projector's result: shot budget and the (possibly exact) count."""

    label: str
    shots: int
    count: float
    seed: int | None = None


@dataclass(frozen=True, eq=False)
class MLEResult:
    rho: DensityMatrix
    iterations: int
    converged: bool
    log_likelihood: float
    history: np.ndarray


@dataclass(frozen=True, eq=False)
class TomographyReport:
    label: str
    gamma: float
    delta: float
    true_state: Ket
    reconstruction: DensityMatrix
    f_mean: float
    f_std: float
    trials: int
    shots: int
    counts: tuple[CountRecord, ...] = ()  # first trial, for provenance dumps


def mub_projectors(ell: int) -> ProjectorSet:
    """The six-projector tomography set for the |l| subspace.

    Within each basis pair the projectors sum to the identity; states from
    different bases overlap with probability exactly 1/2.
    """
    if int(ell) < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    stack = np.stack(
        [np.outer(MUB_STATE_VECTORS[k], MUB_STATE_VECTORS[k].conj()) for k in MUB_LABELS]
    )
    return ProjectorSet(ell=int(ell), labels=MUB_LABELS, projectors=stack)


def _as_density(state: Ket | DensityMatrix | np.ndarray) -> np.ndarray:
    """2x2 density matrix in the (h, v) basis from any accepted state form."""
    if isinstance(state, Ket):
        sub = state.subsystems[0]
        if len(state.subsystems) != 1 or not sub.is_oam:
            raise ValueError("expected a single-OAM-subsystem ket")
        if sub.basis == CIRCULAR:
            state = oam_basis_change(state, sub.name, "circular_to_hv")
        a = state.amplitudes
        return np.outer(a, a.conj())
    if isinstance(state, DensityMatrix):
        if tuple(state.basis) != HV:
            raise ValueError(f"expected a density matrix in the (h, v) basis, got {state.basis}")
        return state.matrix
    return DensityMatrix(np.asarray(state)).matrix


def simulate_counts(
    state: Ket | DensityMatrix,
    shots: int,
    seed: int | None = None,
    noiseless: bool = False,
    projector_set: ProjectorSet | None = None,
) -> list[CountRecord]:
    """Per-projector counts, Poisson(shots * p) or the exact expectations.

    Sampling is independent across projectors and fully determined by
    ``seed``; ``noiseless=True`` returns real-valued expected counts and
    records no seed.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    projectors = (
        projector_set.projectors
        if projector_set is not None
        else mub_projectors(getattr(state, "ell", None) or 1).projectors
    )
    rho = _as_density(state)
    probabilities = np.einsum("ijk,kj->i", projectors, rho).real.clip(min=0.0)
    if noiseless:
        counts = shots * probabilities
        return [
            CountRecord(label, shots, float(c), seed=None)
            for label, c in zip(MUB_LABELS, counts)
        ]
    rng = np.random.default_rng(seed)
    counts = rng.poisson(shots * probabilities)
    return [
        CountRecord(label, shots, int(c), seed=seed)
        for label, c in zip(MUB_LABELS, counts)
    ]


def _log_likelihood(
    counts: np.ndarray, shots: np.ndarray, probabilities: np.ndarray, likelihood: str
) -> float:
    expected = shots * probabilities
    with np.errstate(divide="ignore"):
        terms = np.where(counts > 0, counts * np.log(np.maximum(expected, 1e-300)), 0.0)
    value = float(terms.sum())
    if likelihood == "poisson":
        value -= float(expected.sum())
    return value


def mle_reconstruct(
    counts: list[CountRecord],
    projector_set: ProjectorSet | None = None,
    dilution: float = 0.5,
    tol: float = 1e-12,
    max_iterations: int = 100_000,
    likelihood: str = "poisson",
) -> MLEResult:
    """Maximum-likelihood density matrix from six projector counts.

    Runs the diluted fixed-point iteration described in the module docstring,
    starting from the maximally mixed state, until the accepted log-likelihood
    improvement drops below ``tol`` or ``max_iterations`` is hit (flagged via
    ``converged``).  The result is Hermitian, positive semidefinite, and
    unit-trace by construction.
    """
    if likelihood not in ("poisson", "multinomial"):
        raise ValueError(f"unknown likelihood {likelihood!r}")
    if projector_set is None:
        projector_set = mub_projectors(1)
    order = {label: i for i, label in enumerate(projector_set.labels)}
    n = np.zeros(len(order))
    shots = np.zeros(len(order))
    for record in counts:
        n[order[record.label]] = record.count
        shots[order[record.label]] = record.shots
    if n.sum() <= 0:
        raise ValueError("all counts are zero; nothing to reconstruct")
    projectors = projector_set.projectors
    frequencies = n / n.sum()

    def evaluate(candidate: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
        candidate = (candidate + candidate.conj().T) / 2.0
        candidate = candidate / np.trace(candidate).real
        probs = np.einsum("ijk,kj->i", projectors, candidate).real
        return candidate, probs, _log_likelihood(n, shots, probs, likelihood)

    rho = np.eye(2, dtype=complex) / 2.0
    probabilities = np.einsum("ijk,kj->i", projectors, rho).real
    current = _log_likelihood(n, shots, probabilities, likelihood)
    history = [current]
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        start = current
        weights = np.where(n > 0, frequencies / np.maximum(probabilities, 1e-300), 0.0)
        r_op = np.einsum("i,ijk->jk", weights, projectors)

        eps = dilution
        accepted = False
        for _ in range(60):
            t_op = (np.eye(2) + eps * r_op) / (1.0 + eps)
            candidate, candidate_probs, candidate_ll = evaluate(t_op @ rho @ t_op)
            if candidate_ll >= current:
                accepted = True
                rho, probabilities, current = candidate, candidate_probs, candidate_ll
                history.append(current)
                break
            eps /= 2.0

        # Boundary acceleration: propose squaring the minor eigenvalue.
        w, v = np.linalg.eigh(rho)
        minor = float(w[0])
        if 0.0 < minor < 0.5:
            squeezed = (v * np.array([minor**2, 1.0 - minor**2])) @ v.conj().T
            candidate, candidate_probs, candidate_ll = evaluate(squeezed)
            if candidate_ll >= current:
                accepted = True
                rho, probabilities, current = candidate, candidate_probs, candidate_ll
                history.append(current)

        if not accepted:
            # No proposal improves the objective in double precision: done.
            converged = True
            break
        if current - start < tol:
            converged = True
            break

    return MLEResult(
        rho=DensityMatrix(rho),
        iterations=iterations,
        converged=converged,
        log_likelihood=current,
        history=np.array(history),
    )


def fidelity(rho_true: DensityMatrix | np.ndarray, rho_rec: DensityMatrix | np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2 of two qubit states.

    For 2x2 states the eigenvalues l1, l2 of sqrt(rho) sigma sqrt(rho) reduce
    exactly to its trace Tr(rho sigma) and determinant det(rho) det(sigma),
    so F = (sqrt(l1) + sqrt(l2))^2 = Tr(rho sigma) + 2 sqrt(det rho det sigma).
    Evaluating that form avoids the sqrt(eps) noise an explicit matrix square
    root picks up at pure states.  Symmetric in its arguments, equal to
    <psi|sigma|psi> when one state is pure, clipped into [0, 1].
    """
    rho = _as_density(rho_true) if not isinstance(rho_true, DensityMatrix) else rho_true.matrix
    sigma = _as_density(rho_rec) if not isinstance(rho_rec, DensityMatrix) else rho_rec.matrix
    cross = float(np.trace(rho @ sigma).real)
    # determinants below double-precision noise are pure states in disguise
    det_rho = float(np.linalg.det(rho).real)
    det_sigma = float(np.linalg.det(sigma).real)
    det_rho = det_rho if det_rho > 1e-14 else 0.0
    det_sigma = det_sigma if det_sigma > 1e-14 else 0.0
    value = cross + 2.0 * math.sqrt(det_rho * det_sigma)
    return min(max(value, 0.0), 1.0)


def trace_distance(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    """Half the trace norm of the difference of two density matrices."""
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b)
    return float(0.5 * np.abs(np.linalg.eigvalsh(ma - mb)).sum())


def tomography_report(
    inputs: list[tuple[str, float, float]],
    ell: int,
    shots: int,
    trials: int,
    seed: int | None = None,
    noiseless: bool = False,
) -> list[TomographyReport]:
    """Teleport each input, tomograph the received qubit, report fidelities.

    Each input row is (label, gamma, delta).  The post-selected analyzer
    outcome is PhiPlus (no receiver correction needed); counts for every
    trial use an independent 63-bit seed derived from ``seed``, so reports
    are reproducible and trials can be fanned out safely.  Fidelity is
    mean +/- standard deviation over trials; ``noiseless`` runs a single
    exact-expectation trial per input.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    projector_set = mub_projectors(ell)
    master = np.random.default_rng(seed)
    effective_trials = 1 if noiseless else trials
    trial_seeds = master.integers(0, 2**63, size=(len(inputs), effective_trials))

    reports = []
    for row, (label, gamma, delta) in enumerate(inputs):
        pol = InputPolarization(gamma, delta)
        true_state = teleport(pol, ell, outcome=BellLabel.PHI_PLUS).b_state
        rho_true = DensityMatrix.from_ket(
            true_state
            if true_state.subsystems[0].basis == HV
            else oam_basis_change(true_state, "oamB", "circular_to_hv")
        )
        fidelities = []
        reconstruction = None
        first_counts: tuple[CountRecord, ...] = ()
        for trial in range(effective_trials):
            counts = simulate_counts(
                true_state,
                shots,
                seed=int(trial_seeds[row, trial]),
                noiseless=noiseless,
                projector_set=projector_set,
            )
            result = mle_reconstruct(counts, projector_set=projector_set)
            if reconstruction is None:
                reconstruction = result.rho
                first_counts = tuple(counts)
            fidelities.append(fidelity(rho_true, result.rho))
        fidelities = np.array(fidelities)
        reports.append(
            TomographyReport(
                label=label,
                gamma=gamma,
                delta=delta,
                true_state=true_state,
                reconstruction=reconstruction,
                f_mean=float(fidelities.mean()),
                f_std=float(fidelities.std()),
                trials=effective_trials,
                shots=shots,
                counts=first_counts,
            )
        )
    return reports


def write_counts_csv(path, counts_by_label: dict[str, list[CountRecord]]) -> Path:
    """CSV with header label,projector,shots,count; one row per projector."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label", "projector", "shots", "count"])
        for label, records in counts_by_label.items():
            for record in records:
                writer.writerow([label, record.label, record.shots, record.count])
    return path


def write_report_csv(path, reports: list[TomographyReport]) -> Path:
    """CSV with header label,gamma,delta,F_mean,F_std,trials,N."""
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["label", "gamma", "delta", "F_mean", "F_std", "trials", "N"])
        for report in reports:
            writer.writerow(
                [
                    report.label,
                    f"{report.gamma:.10g}",
                    f"{report.delta:.10g}",
                    f"{report.f_mean:.6f}",
                    f"{report.f_std:.6f}",
                    report.trials,
                    report.shots,
                ]
            )
    return path


def density_matrix_to_json(rho: DensityMatrix) -> str:
    """2x2 nested arrays of [re, im] pairs, row-major in the (h, v) basis."""
    nested = [
        [[float(entry.real), float(entry.imag)] for entry in row] for row in rho.matrix
    ]
    return json.dumps(nested)


def density_matrix_from_json(text: str) -> DensityMatrix:
    nested = json.loads(text)
    matrix = np.array(
        [[complex(entry[0], entry[1]) for entry in row] for row in nested]
    )
    return DensityMatrix(matrix)
