import numpy as np
import pytest

from spin2oam.hilbert import OAM_B_HV, Ket, Subsystem
from spin2oam.tomography import MUB_STATE_VECTORS

# OAM qubit state vectors in the (h, v) basis, keyed by conventional label.
OAM_STATE_VECTORS = MUB_STATE_VECTORS


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_ket(rng: np.random.Generator, subsystems: tuple[Subsystem, ...], ell: int | None = None) -> Ket:
    dim = 2 ** len(subsystems)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return Ket(subsystems, amps / np.linalg.norm(amps), ell=ell)


def oam_ket(label: str, ell: int = 2) -> Ket:
    return Ket((OAM_B_HV,), OAM_STATE_VECTORS[label], ell=ell)


def ncc(a: np.ndarray, b: np.ndarray) -> float:
    """Normalized cross-correlation (Pearson) of two images."""
    da = a.ravel() - a.mean()
    db = b.ravel() - b.mean()
    return float(da @ db / np.sqrt((da @ da) * (db @ db)))


def sample_circle(values: np.ndarray, grid, radius: float, n: int = 720):
    """Bilinear samples of an image along a centered circle; returns (phi, v)."""
    angles = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    x = radius * np.cos(angles)
    y = radius * np.sin(angles)
    col = x / grid.dx + (grid.width - 1) / 2.0
    row = y / grid.dy + (grid.height - 1) / 2.0
    r0 = np.floor(row).astype(int)
    c0 = np.floor(col).astype(int)
    fr = row - r0
    fc = col - c0
    v = (
        values[r0, c0] * (1 - fr) * (1 - fc)
        + values[r0 + 1, c0] * fr * (1 - fc)
        + values[r0, c0 + 1] * (1 - fr) * fc
        + values[r0 + 1, c0 + 1] * fr * fc
    )
    return angles, v


def count_lobes(profile: np.ndarray) -> int:
    """Number of contiguous above-half-max segments in a circular profile."""
    mask = profile > 0.5 * profile.max()
    return int(np.sum(mask & ~np.roll(mask, 1)))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
