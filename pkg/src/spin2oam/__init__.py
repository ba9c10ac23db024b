"""Deterministic simulator of polarization-to-OAM photonic teleportation.

The package splits into a labeled two-level Hilbert-space kernel
(:mod:`spin2oam.hilbert`), the teleportation pipeline itself
(:mod:`spin2oam.protocol`), spatial-mode optics and holograms
(:mod:`spin2oam.optics`), simulated projective tomography with
maximum-likelihood reconstruction (:mod:`spin2oam.tomography`), and a CLI
(:mod:`spin2oam.cli`) that writes JSON/CSV/PGM artifacts plus matplotlib
figures.
"""

from .hilbert import (
    DensityMatrix,
    Ket,
    Operator,
    Subsystem,
    apply,
    basis_ket,
    oam_basis_change,
    partial_trace,
    tensor,
)
from .optics import (
    GridSpec,
    HologramSpec,
    Image,
    intensity_image,
    lg_field,
    poincare_coords,
    sector_hologram,
    write_pgm,
    write_raw_float64,
)
from .protocol import (
    BellLabel,
    BellOutcome,
    DovePrismSetting,
    InputPolarization,
    TeleportResult,
    bell_measurement,
    bell_states,
    pauli_correction,
    prepare_input,
    psi_dp_unitary,
    spdc_state,
    teleport,
    waveplate_jones,
)
from .tomography import (
    CountRecord,
    MLEResult,
    ProjectorSet,
    TomographyReport,
    fidelity,
    mle_reconstruct,
    mub_projectors,
    simulate_counts,
    tomography_report,
    trace_distance,
)

__version__ = "0.1.0"
