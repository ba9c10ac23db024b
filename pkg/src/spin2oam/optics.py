"""Spatial-mode optics: helical beam fields, mode images, holograms, sphere map.

Geometry convention: pixel (0, 0) is the top-left corner, x runs rightward
along columns and y downward along rows, both centered on the frame, so pixel
centers sit at ``((j - (W-1)/2) * dx, (i - (H-1)/2) * dy)``.  Each axis spans
``+/- extent * waist``.  The azimuth is ``atan2(y, x)`` folded into [0, 2*pi)
with phi = 0 along +x.

The radial profile is the lowest radial order of the helical mode family,
``(r/w)^|l| * exp(-r^2/w^2)``; the normalization constant is computed on the
grid itself so discrete intensity integrals equal one exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hilbert import CIRCULAR, HV, Ket, oam_basis_change

__all__ = [
    "GridSpec",
    "Image",
    "HologramSpec",
    "lg_field",
    "intensity_image",
    "sector_hologram",
    "poincare_coords",
    "pgm_bytes",
    "write_pgm",
    "write_raw_float64",
]

HOLOGRAM_TARGETS = ("sector_v", "sector_h", "blazed")


@dataclass(frozen=True)
class GridSpec:
    """Rectangular sampling grid with physical extent in waist units."""

    width: int = 256
    height: int = 256
    extent: float = 3.0
    waist: float = 1.0

    def __post_init__(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ValueError("grid must be at least 2x2 pixels")
        if self.extent <= 0 or self.waist <= 0:
            raise ValueError("extent and waist must be positive")

    @property
    def dx(self) -> float:
        return 2.0 * self.extent * self.waist / self.width

    @property
    def dy(self) -> float:
        return 2.0 * self.extent * self.waist / self.height

    @property
    def pixel_area(self) -> float:
        return self.dx * self.dy

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Pixel-center coordinate arrays (X, Y), y increasing downward."""
        x = (np.arange(self.width) - (self.width - 1) / 2.0) * self.dx
        y = (np.arange(self.height) - (self.height - 1) / 2.0) * self.dy
        return np.meshgrid(x, y)

    def polar(self) -> tuple[np.ndarray, np.ndarray]:
        """Radius and azimuth arrays; phi in [0, 2*pi), 0 along +x."""
        xx, yy = self.coordinates()
        radius = np.hypot(xx, yy)
        phi = np.mod(np.arctan2(yy, xx), 2.0 * math.pi)
        return radius, phi


@dataclass(frozen=True, eq=False)
class Image:
    """Real-valued pixel grid, either nonnegative intensity or phase in [0, 2*pi)."""

    grid: GridSpec
    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.height, self.grid.width):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"{(self.grid.height, self.grid.width)}"
            )
        if self.kind == "intensity":
            if values.min() < 0:
                raise ValueError("intensity images must be nonnegative")
        elif self.kind == "phase":
            if values.min() < 0 or values.max() >= 2.0 * math.pi:
                raise ValueError("phase images must lie in [0, 2*pi)")
        else:
            raise ValueError(f"unknown image kind {self.kind!r}")
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def integral(self) -> float:
        return float(self.values.sum() * self.grid.pixel_area)


@dataclass(frozen=True)
class HologramSpec:
    """Phase-mask recipe: sector pattern for one |l| on a blazed carrier."""

    ell: int
    pitch: float
    target: str = "sector_v"

    def __post_init__(self) -> None:
        if int(self.ell) < 1:
            raise ValueError(f"ell must be >= 1, got {self.ell}")
        if self.pitch < 2:
            raise ValueError(f"pitch must be >= 2 pixels, got {self.pitch}")
        if self.target not in HOLOGRAM_TARGETS:
            raise ValueError(f"target must be one of {HOLOGRAM_TARGETS}")


def lg_field(ell_signed: int, grid: GridSpec) -> np.ndarray:
    """Complex field of the p = 0 helical mode with signed charge ``ell_signed``.

    field(r, phi) = N * (r/w)^|l| * exp(-r^2/w^2) * exp(i * l * phi), with N
    chosen so that sum(|field|^2) * pixel_area = 1 on this grid.
    """
    ell_signed = int(ell_signed)
    if ell_signed == 0:
        raise ValueError("ell_signed = 0 is not supported (no helical phase)")
    radius, phi = grid.polar()
    rho = radius / grid.waist
    envelope = rho ** abs(ell_signed) * np.exp(-(rho**2))
    field = envelope * np.exp(1j * ell_signed * phi)
    power = np.sum(np.abs(field) ** 2) * grid.pixel_area
    return field / math.sqrt(power)


def _circular_coefficients(b_state: Ket) -> tuple[complex, complex, int]:
    if len(b_state.subsystems) != 1 or not b_state.subsystems[0].is_oam:
        raise ValueError("expected a single-OAM-subsystem ket")
    sub = b_state.subsystems[0]
    if sub.basis == HV:
        b_state = oam_basis_change(b_state, sub.name, "hv_to_circular")
    elif sub.basis != CIRCULAR:
        raise ValueError(f"unsupported basis {sub.basis}")
    c_plus, c_minus = b_state.amplitudes
    return complex(c_plus), complex(c_minus), int(b_state.ell)


def intensity_image(b_state: Ket, grid: GridSpec) -> Image:
    """Far-field intensity of an OAM qubit: |c+ F(+l) + c- F(-l)|^2 per pixel."""
    c_plus, c_minus, ell = _circular_coefficients(b_state)
    field = c_plus * lg_field(+ell, grid) + c_minus * lg_field(-ell, grid)
    return Image(grid, np.abs(field) ** 2, kind="intensity")


def sector_hologram(spec: HologramSpec, grid: GridSpec) -> Image:
    """Pixelwise phase mask Mod(sgn(trig(l*phi)) + 2*pi*x/pitch, 2*pi).

    ``sector_v`` uses sin, ``sector_h`` cos, ``blazed`` drops the sign term;
    x is the 0-based pixel column and sgn(0) is taken as +1.
    """
    _, phi = grid.polar()
    column = np.arange(grid.width, dtype=float)[np.newaxis, :]
    carrier = 2.0 * math.pi * column / spec.pitch * np.ones((grid.height, 1))
    if spec.target == "blazed":
        sector = np.zeros_like(carrier)
    else:
        trig = np.sin if spec.target == "sector_v" else np.cos
        sector = np.where(trig(spec.ell * phi) >= 0.0, 1.0, -1.0)
    values = np.mod(sector + carrier, 2.0 * math.pi)
    # mod can round up to exactly 2*pi for negative arguments; fold those back
    values[values >= 2.0 * math.pi] = 0.0
    return Image(grid, values, kind="phase")


def poincare_coords(b_state: Ket) -> np.ndarray:
    """Unit sphere coordinates of an OAM qubit.

    Convention: |+l> sits at the south pole (0, 0, -1), |-l> at the north
    pole, and equal-weight superpositions (h, v, d, a) on the equator.  The
    map is invariant under a global phase, and orthogonal states are
    antipodal.
    """
    c_plus, c_minus, _ = _circular_coefficients(b_state)
    cross = np.conj(c_plus) * c_minus
    coords = np.array(
        [2.0 * cross.real, 2.0 * cross.imag, abs(c_minus) ** 2 - abs(c_plus) ** 2]
    )
    norm = np.linalg.norm(coords)
    return coords / norm


def pgm_bytes(image: Image) -> bytes:
    """Binary PGM (P5, maxval 255) encoding of an image.

    Intensities are scaled linearly by their maximum; phases by the fixed
    full scale 2*pi, so [0, 2*pi) maps onto [0, 255].
    """
    if image.kind == "phase":
        scale = 255.0 / (2.0 * math.pi)
    else:
        peak = image.values.max()
        scale = 255.0 / peak if peak > 0 else 0.0
    pixels = np.clip(np.round(image.values * scale), 0, 255).astype(np.uint8)
    header = f"P5\n{image.grid.width} {image.grid.height}\n255\n".encode("ascii")
    return header + pixels.tobytes()


def write_pgm(image: Image, path) -> Path:
    path = Path(path)
    path.write_bytes(pgm_bytes(image))
    return path


def write_raw_float64(image: Image, path) -> Path:
    """Headerless little-endian float64 dump, row-major, for bit-exact diffs."""
    path = Path(path)
    path.write_bytes(image.values.astype("<f8").tobytes())
    return path
