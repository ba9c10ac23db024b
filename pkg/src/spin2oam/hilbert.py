"""Labeled finite-dimensional Hilbert-space kernel for the teleportation simulator.

Every state and operator declares the ordered list of two-level subsystems it
acts on.  The simulator uses three subsystems:

* ``polA``  -- polarization of photon A, basis (H, V)
* ``oamA``  -- orbital-angular-momentum qubit of photon A
* ``oamB``  -- orbital-angular-momentum qubit of photon B

OAM subsystems carry one of two basis labels: the circular basis (+l, -l) of
helical modes, or the linear basis (h, v) of their real superpositions.  The
fixed convention relating them is

    |+l> = (|h> + i|v>) / sqrt(2),      |-l> = (|h> - i|v>) / sqrt(2),

so converting circular-basis amplitudes to the (h, v) representation
multiplies by ``CIRCULAR_TO_HV = [[1, 1], [i, -i]] / sqrt(2)``.

Joint amplitudes are stored row-major over the declared subsystem order; the
canonical protocol ordering is (polA, oamA, oamB).  All values are immutable
and all operations are pure functions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LabelCollisionError",
    "UnknownSubsystemError",
    "BasisMismatchError",
    "Subsystem",
    "Ket",
    "Operator",
    "DensityMatrix",
    "POL_A",
    "OAM_A_CIRCULAR",
    "OAM_A_HV",
    "OAM_B_CIRCULAR",
    "OAM_B_HV",
    "CIRCULAR",
    "HV",
    "CIRCULAR_TO_HV",
    "IDENTITY_2",
    "PAULI_X",
    "PAULI_Y",
    "PAULI_Z",
    "basis_ket",
    "tensor",
    "apply",
    "partial_trace",
    "oam_basis_change",
]

# Tolerances: exact-arithmetic identities vs eigenvalue positivity headroom.
ATOL_IDENTITY = 1e-12
ATOL_NORM = 1e-9
EIGENVALUE_FLOOR = -1e-10

SUBSYSTEM_NAMES = ("polA", "oamA", "oamB")
POLARIZATION_BASIS = ("H", "V")
CIRCULAR = ("+l", "-l")
HV = ("h", "v")

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# Columns are |+l>, |-l| expressed in (h, v) rows.
CIRCULAR_TO_HV = np.array([[1, 1], [1j, -1j]], dtype=complex) / np.sqrt(2)


class LabelCollisionError(ValueError):
    """Tensor product of values that share a subsystem label."""


class UnknownSubsystemError(ValueError):
    """Referenced subsystem label is not part of the value."""


class BasisMismatchError(ValueError):
    """Subsystem is present but expressed in a different basis."""


@dataclass(frozen=True)
class Subsystem:
    """A named two-level subsystem together with its current basis labels."""

    name: str
    basis: tuple[str, str]

    def __post_init__(self) -> None:
        if self.name not in SUBSYSTEM_NAMES:
            raise ValueError(f"unknown subsystem name {self.name!r}")
        allowed = (POLARIZATION_BASIS,) if self.name == "polA" else (CIRCULAR, HV)
        if self.basis not in allowed:
            raise ValueError(f"basis {self.basis!r} not valid for {self.name}")

    @property
    def is_oam(self) -> bool:
        return self.name != "polA"


POL_A = Subsystem("polA", POLARIZATION_BASIS)
OAM_A_CIRCULAR = Subsystem("oamA", CIRCULAR)
OAM_A_HV = Subsystem("oamA", HV)
OAM_B_CIRCULAR = Subsystem("oamB", CIRCULAR)
OAM_B_HV = Subsystem("oamB", HV)


def _check_unique_names(subsystems: tuple[Subsystem, ...]) -> None:
    names = [s.name for s in subsystems]
    if len(set(names)) != len(names):
        raise LabelCollisionError(f"duplicate subsystem labels in {names}")


def _frozen(array: np.ndarray) -> np.ndarray:
    out = np.array(array, dtype=complex)
    out.setflags(write=False)
    return out


def _validate_ell(
    subsystems: tuple[Subsystem, ...], ell: int | None, required: bool = True
) -> None:
    has_oam = any(s.is_oam for s in subsystems)
    if has_oam and required and ell is None:
        raise ValueError("ell is required for values with an OAM subsystem")
    if ell is not None and int(ell) < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")


@dataclass(frozen=True, eq=False)
class Ket:
    """Normalized complex amplitude vector over labeled subsystems.

    Amplitudes are row-major over the declared subsystem order; that ordering
    is part of the value's identity.  ``ell`` is the |l| of the post-selected
    OAM subspace (required whenever an OAM subsystem is present).
    """

    subsystems: tuple[Subsystem, ...]
    amplitudes: np.ndarray
    ell: int | None = None

    def __post_init__(self) -> None:
        subsystems = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subsystems)
        _check_unique_names(subsystems)
        _validate_ell(subsystems, self.ell)
        amps = _frozen(np.ravel(self.amplitudes))
        if amps.size != 2 ** len(subsystems):
            raise ValueError(
                f"expected {2 ** len(subsystems)} amplitudes, got {amps.size}"
            )
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > ATOL_NORM:
            raise ValueError(f"ket is not normalized: ||amplitudes|| = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    def subsystem(self, name: str) -> Subsystem:
        for s in self.subsystems:
            if s.name == name:
                return s
        raise UnknownSubsystemError(f"no subsystem {name!r} in {self.names()}")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "Ket":
        return Ket(self.subsystems, self.amplitudes / np.linalg.norm(self.amplitudes), self.ell)

    def inner(self, other: "Ket") -> complex:
        """<self|other>; requires identical subsystem lists and bases."""
        if self.subsystems != other.subsystems:
            raise BasisMismatchError("kets live on different labeled bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def overlap(self, other: "Ket") -> float:
        """|<self|other>|^2, the phase-insensitive fidelity of two kets."""
        return abs(self.inner(other)) ** 2


def basis_ket(subsystem: Subsystem, label: str, ell: int | None = None) -> Ket:
    """Unit ket along one basis direction of a single subsystem."""
    try:
        index = subsystem.basis.index(label)
    except ValueError:
        raise ValueError(f"label {label!r} not in basis {subsystem.basis}") from None
    amps = np.zeros(2, dtype=complex)
    amps[index] = 1.0
    return Ket((subsystem,), amps, ell=ell)


@dataclass(frozen=True, eq=False)
class Operator:
    """Square complex matrix acting on named subsystems.

    ``kind`` records the algebraic contract: unitaries satisfy
    max|U+U - I| <= 1e-12, projectors are Hermitian and idempotent to the
    same tolerance, ``general`` is unchecked.
    """

    subsystems: tuple[Subsystem, ...]
    matrix: np.ndarray
    kind: str = "general"
    ell: int | None = None

    def __post_init__(self) -> None:
        subsystems = tuple(self.subsystems)
        object.__setattr__(self, "subsystems", subsystems)
        _check_unique_names(subsystems)
        # Operators on an OAM subsystem may be subspace-generic (ell=None).
        _validate_ell(subsystems, self.ell, required=False)
        dim = 2 ** len(subsystems)
        mat = _frozen(self.matrix)
        if mat.shape != (dim, dim):
            raise ValueError(f"expected {dim}x{dim} matrix, got {mat.shape}")
        if self.kind == "unitary":
            defect = np.max(np.abs(mat.conj().T @ mat - np.eye(dim)))
            if defect > ATOL_IDENTITY:
                raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
        elif self.kind == "projector":
            if np.max(np.abs(mat - mat.conj().T)) > ATOL_IDENTITY:
                raise ValueError("projector is not Hermitian")
            if np.max(np.abs(mat @ mat - mat)) > ATOL_IDENTITY:
                raise ValueError("projector is not idempotent")
        elif self.kind != "general":
            raise ValueError(f"unknown operator kind {self.kind!r}")
        object.__setattr__(self, "matrix", mat)

    def names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.subsystems)

    def dagger(self) -> "Operator":
        return Operator(self.subsystems, self.matrix.conj().T, self.kind, self.ell)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """2x2 Hermitian, positive-semidefinite, unit-trace matrix."""

    matrix: np.ndarray
    basis: tuple[str, str] = HV

    def __post_init__(self) -> None:
        mat = _frozen(self.matrix)
        if mat.shape != (2, 2):
            raise ValueError(f"expected 2x2 matrix, got {mat.shape}")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL_IDENTITY:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > ATOL_IDENTITY:
            raise ValueError(f"density matrix trace {np.trace(mat)!r} != 1")
        eigenvalues = np.linalg.eigvalsh(mat)
        if eigenvalues.min() < EIGENVALUE_FLOOR:
            raise ValueError(f"density matrix has negative eigenvalue {eigenvalues.min():.3e}")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "basis", tuple(self.basis))

    @classmethod
    def from_ket(cls, psi: Ket) -> "DensityMatrix":
        if len(psi.subsystems) != 1:
            raise ValueError("from_ket expects a single-subsystem ket")
        a = psi.amplitudes
        return cls(np.outer(a, a.conj()), basis=psi.subsystems[0].basis)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def _merge_ell(a: int | None, b: int | None) -> int | None:
    if a is not None and b is not None and a != b:
        raise ValueError(f"OAM subspace mismatch: ell={a} vs ell={b}")
    return a if a is not None else b


def tensor(a, b):
    """Kronecker product of two kets or two operators in declared order."""
    if isinstance(a, Ket) and isinstance(b, Ket):
        shared = set(a.names()) & set(b.names())
        if shared:
            raise LabelCollisionError(f"subsystem labels {sorted(shared)} appear on both factors")
        return Ket(
            a.subsystems + b.subsystems,
            np.kron(a.amplitudes, b.amplitudes),
            ell=_merge_ell(a.ell, b.ell),
        )
    if isinstance(a, Operator) and isinstance(b, Operator):
        shared = set(a.names()) & set(b.names())
        if shared:
            raise LabelCollisionError(f"subsystem labels {sorted(shared)} appear on both factors")
        kind = a.kind if a.kind == b.kind else "general"
        return Operator(
            a.subsystems + b.subsystems,
            np.kron(a.matrix, b.matrix),
            kind=kind,
            ell=_merge_ell(a.ell, b.ell),
        )
    raise TypeError("tensor expects two Kets or two Operators")


def apply(op: Operator, psi: Ket) -> Ket:
    """Apply ``op`` to the subsystems it names, identity on the rest.

    The operator's subsystems must appear in ``psi`` with the same basis
    labels; ordering may differ (amplitudes are permuted internally and
    restored afterwards).
    """
    names = list(psi.names())
    positions = []
    for s in op.subsystems:
        if s.name not in names:
            raise UnknownSubsystemError(f"operator acts on {s.name!r}, ket has {names}")
        here = psi.subsystem(s.name)
        if here.basis != s.basis:
            raise BasisMismatchError(
                f"{s.name}: operator in basis {s.basis}, ket in basis {here.basis}"
            )
        positions.append(names.index(s.name))
    ell = _merge_ell(psi.ell, op.ell)

    n = len(psi.subsystems)
    rest = [i for i in range(n) if i not in positions]
    perm = positions + rest
    k = len(positions)
    block = psi.amplitudes.reshape((2,) * n).transpose(perm).reshape(2**k, -1)
    block = op.matrix @ block
    inverse = np.argsort(perm)
    amplitudes = block.reshape((2,) * n).transpose(inverse).reshape(-1)
    if op.kind != "unitary":
        # Projectors shrink the norm; renormalization is the caller's call.
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > ATOL_NORM:
            raise ValueError(
                f"non-unitary operator produced norm {norm!r}; normalize explicitly"
            )
    return Ket(psi.subsystems, amplitudes, ell=ell)


def partial_trace(psi: Ket, keep) -> DensityMatrix:
    """Reduced density matrix of one subsystem, tracing out all others."""
    name = keep.name if isinstance(keep, Subsystem) else str(keep)
    names = list(psi.names())
    if name not in names:
        raise UnknownSubsystemError(f"no subsystem {name!r} in {names}")
    index = names.index(name)
    n = len(psi.subsystems)
    block = np.moveaxis(psi.amplitudes.reshape((2,) * n), index, 0).reshape(2, -1)
    rho = block @ block.conj().T
    rho = (rho + rho.conj().T) / 2.0
    rho = rho / np.trace(rho).real
    return DensityMatrix(rho, basis=psi.subsystems[index].basis)


def oam_basis_change(psi: Ket, subsystem, direction: str) -> Ket:
    """Re-express one OAM subsystem in the other basis.

    ``direction`` is ``"circular_to_hv"`` or ``"hv_to_circular"``; the ket's
    current basis for that subsystem must match the source side.  The round
    trip is the identity to within 1e-12.
    """
    name = subsystem.name if isinstance(subsystem, Subsystem) else str(subsystem)
    target = psi.subsystem(name)
    if not target.is_oam:
        raise BasisMismatchError(f"{name} is a polarization subsystem, not OAM")
    if direction == "circular_to_hv":
        source_basis, new_basis, matrix = CIRCULAR, HV, CIRCULAR_TO_HV
    elif direction == "hv_to_circular":
        source_basis, new_basis, matrix = HV, CIRCULAR, CIRCULAR_TO_HV.conj().T
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if target.basis != source_basis:
        raise BasisMismatchError(
            f"{name} is in basis {target.basis}, cannot convert {direction}"
        )

    names = list(psi.names())
    index = names.index(name)
    n = len(psi.subsystems)
    block = np.moveaxis(psi.amplitudes.reshape((2,) * n), index, 0).reshape(2, -1)
    block = matrix @ block
    amplitudes = np.moveaxis(block.reshape((2,) + (2,) * (n - 1)), 0, index).reshape(-1)
    subsystems = tuple(
        Subsystem(s.name, new_basis) if s.name == name else s for s in psi.subsystems
    )
    return Ket(subsystems, amplitudes, ell=psi.ell)
