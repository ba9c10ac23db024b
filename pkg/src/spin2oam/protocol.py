"""Spin-to-OAM teleportation pipeline between two OAM-entangled photons.

The simulated protocol, working in a single post-selected |l| subspace:

1. A down-conversion source emits a photon pair anti-correlated in OAM,
   ``(|-l>_A |+l>_B + |+l>_A |-l>_B)/sqrt(2)``, with both photons initially
   H-polarized.  Photon B's polarization never participates in any operation
   and is tracked as metadata (``PHOTON_B_POLARIZATION``), not as a simulated
   subsystem, so the joint state lives in 8 dimensions.
2. A sender rotates photon A's polarization to ``alpha|H> + beta|V>`` with
   ``alpha = sin(gamma/2)`` and ``beta = cos(gamma/2) exp(i delta)``.
3. A single-photon Bell-state analysis on photon A's combined
   polarization/OAM qubit pair projects onto the hybrid Bell basis; each of
   the four outcomes occurs with probability 1/4.
4. Photon B applies the outcome-dependent Pauli correction and is left in
   ``alpha|h_l> + beta|v_l>`` regardless of the outcome.

Conventions fixed here and used everywhere downstream:

* Polarization superpositions: D = (H+V)/sqrt2, A = (H-V)/sqrt2,
  L = (H+iV)/sqrt2, R = (H-iV)/sqrt2.
* Jones matrix of a retarder with retardance phi and fast axis at angle
  theta from H: ``R(theta) @ diag(1, exp(-i phi)) @ R(-theta)`` with R the
  real rotation matrix.  HWP: phi = pi, QWP: phi = pi/2.
* Joint amplitudes are ordered (polA, oamA, oamB) row-major.
* Outcome sampling uses ``numpy.random.default_rng`` (PCG64, 64-bit) seeded
  explicitly and draws by inverse CDF over the four-outcome distribution, so
  runs are bit-reproducible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    CIRCULAR,
    CIRCULAR_TO_HV,
    IDENTITY_2,
    OAM_A_CIRCULAR,
    OAM_A_HV,
    OAM_B_CIRCULAR,
    OAM_B_HV,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    POL_A,
    Ket,
    Operator,
    Subsystem,
    apply,
    oam_basis_change,
)

__all__ = [
    "PHOTON_B_POLARIZATION",
    "POLARIZATION_ANGLES",
    "BellLabel",
    "BELL_ORDER",
    "InputPolarization",
    "BellOutcome",
    "DovePrismSetting",
    "TeleportResult",
    "spdc_state",
    "waveplate_jones",
    "prepare_input",
    "bell_states",
    "dove_prism_unitary",
    "sagnac_unitary",
    "psi_dp_unitary",
    "bell_measurement",
    "pauli_correction",
    "teleport",
    "classical_bits",
]

# Photon B stays in this polarization throughout; it is never operated on.
PHOTON_B_POLARIZATION = "H"

_SQRT2 = math.sqrt(2.0)

# (gamma, delta) settings producing the six reference polarization inputs.
POLARIZATION_ANGLES: dict[str, tuple[float, float]] = {
    "H": (math.pi, 0.0),
    "V": (0.0, 0.0),
    "D": (math.pi / 2, 0.0),
    "A": (math.pi / 2, math.pi),
    "L": (math.pi / 2, math.pi / 2),
    "R": (math.pi / 2, 3 * math.pi / 2),
}


class BellLabel(enum.Enum):
    """The four hybrid Bell outcomes of the single-photon analyzer."""

    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"


BELL_ORDER = (
    BellLabel.PHI_PLUS,
    BellLabel.PHI_MINUS,
    BellLabel.PSI_PLUS,
    BellLabel.PSI_MINUS,
)

# Two classical bits communicated to the receiver: (branch, sign) with
# branch 0 = Phi, 1 = Psi and sign 0 = +, 1 = -.
_CLASSICAL_BITS = {
    BellLabel.PHI_PLUS: (0, 0),
    BellLabel.PHI_MINUS: (0, 1),
    BellLabel.PSI_PLUS: (1, 0),
    BellLabel.PSI_MINUS: (1, 1),
}


def classical_bits(label: BellLabel) -> tuple[int, int]:
    return _CLASSICAL_BITS[label]


@dataclass(frozen=True)
class InputPolarization:
    """Sender's polarization setting via sphere angles (radians).

    gamma in [0, pi] and delta (wrapped into [0, 2*pi)) fix the amplitudes
    alpha = sin(gamma/2), beta = cos(gamma/2) exp(i delta); gamma = pi is
    pure |H>, gamma = 0 pure |V>.
    """

    gamma: float
    delta: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= math.pi:
            raise ValueError(f"gamma must be in [0, pi], got {self.gamma}")
        object.__setattr__(self, "delta", float(self.delta) % (2 * math.pi))

    @property
    def alpha(self) -> float:
        return math.sin(self.gamma / 2)

    @property
    def beta(self) -> complex:
        return math.cos(self.gamma / 2) * complex(math.cos(self.delta), math.sin(self.delta))

    def jones_vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=complex)

    @classmethod
    def named(cls, label: str) -> "InputPolarization":
        gamma, delta = POLARIZATION_ANGLES[label.upper()]
        return cls(gamma, delta)


@dataclass(frozen=True)
class DovePrismSetting:
    """Rotation angle of the prism inside the polarizing interferometer."""

    theta: float
    ell: int

    def __post_init__(self) -> None:
        if int(self.ell) < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")

    @classmethod
    def canonical(cls, ell: int) -> "DovePrismSetting":
        """The angle pi/(8*ell) at which the analyzer separates all four outcomes."""
        return cls(theta=math.pi / (8 * ell), ell=ell)

    @property
    def is_canonical(self) -> bool:
        return abs(self.theta - math.pi / (8 * self.ell)) <= 1e-14


@dataclass(frozen=True, eq=False)
class BellOutcome:
    """One analyzer branch: label, Born probability, conditional B state."""

    label: BellLabel
    probability: float
    conditional_b: Ket | None


@dataclass(frozen=True, eq=False)
class TeleportResult:
    b_state: Ket
    outcome: BellLabel
    probability: float


def spdc_state(ell: int) -> Ket:
    """Post-selected pair state on (polA, oamA, oamB), both OAM sides circular.

    Amplitude 1/sqrt2 at (H, +l, -l) and at (H, -l, +l); photon B's fixed
    H polarization is metadata, not a subsystem.
    """
    if int(ell) < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    amplitudes = np.zeros(8, dtype=complex)
    amplitudes[0b001] = 1 / _SQRT2  # (H, +l, -l)
    amplitudes[0b010] = 1 / _SQRT2  # (H, -l, +l)
    return Ket((POL_A, OAM_A_CIRCULAR, OAM_B_CIRCULAR), amplitudes, ell=int(ell))


def waveplate_jones(kind: str, angle: float) -> Operator:
    """Jones matrix of a wave plate with fast axis at ``angle`` (radians).

    ``kind`` selects the retardance: "HWP" (pi) or "QWP" (pi/2).  Under this
    convention HWP at 0 is diag(1, -1) and QWP at pi/4 sends |H> to
    (|H> + i|V>)/sqrt2 up to a global phase.
    """
    retardance = {"HWP": math.pi, "QWP": math.pi / 2}.get(kind.upper())
    if retardance is None:
        raise ValueError(f"unknown wave plate kind {kind!r}")
    c, s = math.cos(angle), math.sin(angle)
    rot = np.array([[c, -s], [s, c]], dtype=complex)
    retard = np.diag([1.0, np.exp(-1j * retardance)])
    return Operator((POL_A,), rot @ retard @ rot.T, kind="unitary")


def prepare_input(chi: Ket, pol: InputPolarization) -> Ket:
    """Rotate photon A's polarization from |H> to alpha|H> + beta|V>.

    Requires a fresh pair state whose polA amplitudes sit entirely on |H>;
    the rotation is the SU(2) element with first column (alpha, beta), so OAM
    amplitudes are untouched and the norm is preserved.
    """
    index = list(chi.names()).index("polA")
    slab = np.moveaxis(chi.amplitudes.reshape((2,) * len(chi.subsystems)), index, 0)
    if np.max(np.abs(slab[1])) > 1e-12:
        raise ValueError("input state already has a |V>_A component")
    alpha, beta = pol.alpha, pol.beta
    rotation = np.array(
        [[alpha, -np.conj(beta)], [beta, np.conj(alpha)]], dtype=complex
    )
    return apply(Operator((POL_A,), rotation, kind="unitary"), chi)


def bell_states(ell: int) -> dict[BellLabel, Ket]:
    """The four single-photon Bell states on (polA, oamA), oamA in (h, v).

    PhiPlus/PhiMinus = (|H,h> +/- |V,v>)/sqrt2 and PsiPlus/PsiMinus =
    (|H,v> +/- |V,h>)/sqrt2; mutually orthonormal.
    """
    if int(ell) < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    subsystems = (POL_A, OAM_A_HV)
    vectors = {
        BellLabel.PHI_PLUS: np.array([1, 0, 0, 1]) / _SQRT2,
        BellLabel.PHI_MINUS: np.array([1, 0, 0, -1]) / _SQRT2,
        BellLabel.PSI_PLUS: np.array([0, 1, 1, 0]) / _SQRT2,
        BellLabel.PSI_MINUS: np.array([0, 1, -1, 0]) / _SQRT2,
    }
    return {label: Ket(subsystems, vec, ell=int(ell)) for label, vec in vectors.items()}


def dove_prism_unitary(
    theta: float, ell: int, direction: int = +1, subsystem: Subsystem = OAM_A_CIRCULAR
) -> Operator:
    """Rotated-prism action on one OAM qubit in the circular basis.

    Traversal with the prism rotated by ``direction * theta`` flips the OAM
    sign and imprints the sign-dependent phase:
    |+l> -> exp(+2i*l*theta*direction)|-l> and
    |-l> -> exp(-2i*l*theta*direction)|+l>.
    """
    if direction not in (+1, -1):
        raise ValueError("direction must be +1 or -1")
    if subsystem.basis != CIRCULAR:
        raise ValueError("dove prism is defined on a circular-basis OAM subsystem")
    phase = 2.0 * ell * theta * direction
    matrix = np.array(
        [[0.0, np.exp(-1j * phase)], [np.exp(1j * phase), 0.0]], dtype=complex
    )
    return Operator((subsystem,), matrix, kind="unitary", ell=int(ell))


def _dove_prism_hv(theta: float, ell: int, direction: int) -> np.ndarray:
    """Prism matrix conjugated into the (h, v) basis; a reflection by 2*l*theta."""
    circ = dove_prism_unitary(theta, ell, direction).matrix
    return CIRCULAR_TO_HV @ circ @ CIRCULAR_TO_HV.conj().T


def sagnac_unitary(theta: float, ell: int) -> Operator:
    """Round trip of the polarizing interferometer containing the prism.

    The entrance beam splitter sends H and V around the loop in opposite
    directions, so they see the prism at opposite rotation angles; the
    counter-propagating paths pick up a relative OAM-dependent phase
    4*l*theta.  Acts on (polA, oamA) with oamA in the (h, v) basis.
    """
    block_h = _dove_prism_hv(theta, ell, +1)
    block_v = _dove_prism_hv(theta, ell, -1)
    matrix = np.zeros((4, 4), dtype=complex)
    matrix[:2, :2] = block_h
    matrix[2:, 2:] = block_v
    return Operator((POL_A, OAM_A_HV), matrix, kind="unitary", ell=int(ell))


# Analyzer output ports, (polarization, oamA) product states per Bell branch.
_POL_D = np.array([1, 1], dtype=complex) / _SQRT2
_POL_A_STATE = np.array([1, -1], dtype=complex) / _SQRT2
_OAM_H = np.array([1, 0], dtype=complex)
_OAM_V = np.array([0, 1], dtype=complex)
_ANALYZER_PORTS = {
    BellLabel.PHI_PLUS: (_POL_A_STATE, _OAM_V),
    BellLabel.PHI_MINUS: (_POL_D, _OAM_V),
    BellLabel.PSI_PLUS: (_POL_A_STATE, _OAM_H),
    BellLabel.PSI_MINUS: (_POL_D, _OAM_H),
}


def _analyzer_target(ell: int) -> np.ndarray:
    """Unitary sending each Bell state to its product output port, phase 0."""
    bells = bell_states(ell)
    target = np.zeros((4, 4), dtype=complex)
    for label in BELL_ORDER:
        pol, oam = _ANALYZER_PORTS[label]
        target += np.outer(np.kron(pol, oam), bells[label].amplitudes.conj())
    return target


def psi_dp_unitary(setting: DovePrismSetting) -> Operator:
    """Analyzer unitary on (polA, oamA) for a given prism setting.

    At the canonical angle pi/(8*ell) the four Bell states map exactly onto
    orthogonal product states -- PhiPlus -> (A, v), PhiMinus -> (D, v),
    PsiPlus -> (A, h), PsiMinus -> (D, h) -- with all output phases fixed to
    zero by construction.  For other angles the same fixed alignment unitary
    (absorbing mirror and plate phases) is composed with the angle-dependent
    interferometer round trip, so the prism phase law stays testable while
    the operator remains exactly unitary.
    """
    ell = int(setting.ell)
    canonical = sagnac_unitary(math.pi / (8 * ell), ell).matrix
    alignment = _analyzer_target(ell) @ canonical.conj().T
    matrix = alignment @ sagnac_unitary(setting.theta, ell).matrix
    return Operator((POL_A, OAM_A_HV), matrix, kind="unitary", ell=ell)


def _as_hv(state: Ket) -> Ket:
    for name in ("oamA", "oamB"):
        if any(s.name == name for s in state.subsystems):
            if state.subsystem(name).basis == CIRCULAR:
                state = oam_basis_change(state, name, "circular_to_hv")
    return state


def bell_measurement(state: Ket, mode: str = "direct") -> list[BellOutcome]:
    """Project photon A onto the four Bell states; B's conditionals ride along.

    ``direct`` projects onto the Bell kets themselves; ``physical`` runs the
    analyzer unitary and measures the polarization in (D, A) and the OAM in
    (h, v), relabelling the product ports back to Bell outcomes.  The two
    modes agree to 1e-10.  Returned in the canonical order
    (PhiPlus, PhiMinus, PsiPlus, PsiMinus); probabilities sum to 1.
    """
    if state.names() != ("polA", "oamA", "oamB"):
        raise ValueError(f"expected a (polA, oamA, oamB) state, got {state.names()}")
    if abs(state.norm() - 1.0) > 1e-9:
        raise ValueError("state is not normalized")
    psi = _as_hv(state)
    ell = psi.ell

    if mode == "direct":
        bells = bell_states(ell)
        projector_vectors = {label: bells[label].amplitudes for label in BELL_ORDER}
    elif mode == "physical":
        psi = apply(psi_dp_unitary(DovePrismSetting.canonical(ell)), psi)
        projector_vectors = {
            label: np.kron(pol, oam) for label, (pol, oam) in _ANALYZER_PORTS.items()
        }
    else:
        raise ValueError(f"unknown measurement mode {mode!r}")

    block = psi.amplitudes.reshape(4, 2)  # (polA x oamA, oamB)
    outcomes = []
    for label in BELL_ORDER:
        residual = projector_vectors[label].conj() @ block
        probability = float(np.vdot(residual, residual).real)
        if probability > 1e-15:
            conditional = Ket((OAM_B_HV,), residual / np.sqrt(probability), ell=ell)
        else:
            conditional = None
        outcomes.append(BellOutcome(label, probability, conditional))
    return outcomes


def pauli_correction(outcome_label: BellLabel) -> Operator:
    """Receiver's unitary in the (h, v) basis for a given Bell outcome.

    PhiPlus needs no correction; PhiMinus flips the relative sign (sigma_z),
    PsiPlus swaps the modes (sigma_x), PsiMinus does both (i*sigma_y).
    """
    matrices = {
        BellLabel.PHI_PLUS: IDENTITY_2,
        BellLabel.PHI_MINUS: PAULI_Z,
        BellLabel.PSI_PLUS: PAULI_X,
        BellLabel.PSI_MINUS: 1j * PAULI_Y,
    }
    return Operator((OAM_B_HV,), matrices[BellLabel(outcome_label)], kind="unitary")


def teleport(
    pol: InputPolarization,
    ell: int,
    outcome: BellLabel | str | None = None,
    seed: int | None = None,
    mode: str = "direct",
) -> TeleportResult:
    """Run the full pipeline and return photon B's corrected state.

    If ``outcome`` is given that Bell branch is post-selected; otherwise the
    outcome is sampled from the Born distribution by inverse CDF using a
    freshly seeded generator.  For every branch the corrected state equals
    alpha|h_l> + beta|v_l> to machine precision.
    """
    chi = spdc_state(ell)
    psi = prepare_input(chi, pol)
    outcomes = bell_measurement(psi, mode=mode)

    if outcome is None:
        probabilities = np.array([o.probability for o in outcomes])
        cdf = np.cumsum(probabilities / probabilities.sum())
        draw = np.random.default_rng(seed).random()
        label = BELL_ORDER[int(np.searchsorted(cdf, draw, side="right"))]
    else:
        label = BellLabel(outcome)

    picked = next(o for o in outcomes if o.label == label)
    if picked.conditional_b is None:
        raise RuntimeError(f"outcome {label.value} has zero probability")
    b_state = apply(pauli_correction(label), picked.conditional_b)
    return TeleportResult(b_state=b_state, outcome=label, probability=picked.probability)
