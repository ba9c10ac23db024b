"""Command-line front end: teleport, render, holo, and table1 subcommands.

Angles are radians unless ``--degrees`` is given.  Every command is
deterministic under a fixed seed and configuration.  Exit codes: 0 success,
2 configuration/validation failure, 1 internal error; failures also emit a
machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .hilbert import OAM_B_HV, Ket
from .optics import (
    GridSpec,
    HologramSpec,
    intensity_image,
    poincare_coords,
    sector_hologram,
    write_pgm,
)
from .protocol import BellLabel, InputPolarization, classical_bits, teleport
from .tomography import (
    MUB_STATE_VECTORS,
    density_matrix_to_json,
    table_inputs,
    tomography_report,
    write_counts_csv,
    write_report_csv,
)

__all__ = ["main", "entry", "RunConfig"]

OUTCOME_FLAGS = {
    "phi-plus": BellLabel.PHI_PLUS,
    "phi-minus": BellLabel.PHI_MINUS,
    "psi-plus": BellLabel.PSI_PLUS,
    "psi-minus": BellLabel.PSI_MINUS,
}

# render --state accepts the MUB labels plus circular-pole synonyms
STATE_CHOICES = ("l", "h", "a", "v", "d", "r", "plus", "minus")
STATE_ALIASES = {"plus": "l", "minus": "r"}
FIG_PANEL_STATES = ("l", "h", "a", "v", "d")


@dataclass
class RunConfig:
    """Validated settings for one CLI invocation."""

    command: str
    gamma: float = math.pi
    delta: float = 0.0
    ell: int = 2
    outcome: BellLabel | None = None
    shots: int = 10_000
    trials: int = 100
    seed: int | None = None
    grid: tuple[int, int] = (256, 256)
    extent: float = 3.0
    pitch: float = 16.0
    target: str = "sector_v"
    states: tuple[str, ...] = FIG_PANEL_STATES
    extra_rows: tuple[tuple[str, float, float], ...] = ()
    noiseless: bool = False
    out: Path | None = None

    def validate(self) -> None:
        if self.ell < 1:
            raise ValueError(f"--ell must be >= 1, got {self.ell}")
        if not 0.0 <= self.gamma <= math.pi:
            raise ValueError(f"--gamma must be in [0, pi], got {self.gamma}")
        if self.pitch < 2:
            raise ValueError(f"--pitch must be >= 2 pixels, got {self.pitch}")
        if self.grid[0] < 2 or self.grid[1] < 2:
            raise ValueError(f"--grid must be at least 2x2, got {self.grid}")
        if self.extent <= 0:
            raise ValueError(f"--extent must be positive, got {self.extent}")
        if self.shots < 1:
            raise ValueError(f"--shots must be >= 1, got {self.shots}")
        if self.trials < 1:
            raise ValueError(f"--trials must be >= 1, got {self.trials}")
        for label, gamma, _ in self.extra_rows:
            if not 0.0 <= gamma <= math.pi:
                raise ValueError(f"extra row {label!r}: gamma must be in [0, pi]")

    def grid_spec(self) -> GridSpec:
        return GridSpec(width=self.grid[0], height=self.grid[1], extent=self.extent)


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None


def _parse_extra(text: str) -> tuple[str, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected label,gamma,delta, got {text!r}")
    try:
        return parts[0], float(parts[1]), float(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad angles in {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spin2oam",
        description="simulate polarization-to-OAM teleportation between entangled photons",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, *, angles=False, grid=False):
        p.add_argument("--ell", type=int, default=2, help="|l| of the OAM subspace")
        p.add_argument("--seed", type=int, default=None, help="PRNG seed")
        p.add_argument("--out", type=Path, default=None, help="output file or directory")
        if angles:
            p.add_argument("--gamma", type=float, default=math.pi, help="sphere angle of the input")
            p.add_argument("--delta", type=float, default=0.0, help="sphere angle of the input")
            p.add_argument("--degrees", action="store_true", help="interpret angles in degrees")
        if grid:
            p.add_argument("--grid", type=_parse_grid, default=(256, 256), metavar="WxH")
            p.add_argument("--extent", type=float, default=3.0, help="half-width in waist units")

    p = sub.add_parser("teleport", help="run one teleportation and emit JSON")
    add_common(p, angles=True)
    p.add_argument("--outcome", choices=sorted(OUTCOME_FLAGS), default=None,
                   help="post-select this analyzer outcome instead of sampling")

    p = sub.add_parser("render", help="write mode images as PGM files plus a panel figure")
    add_common(p, grid=True)
    p.add_argument("--state", nargs="+", choices=STATE_CHOICES, default=list(FIG_PANEL_STATES),
                   help="OAM qubit states to render")

    p = sub.add_parser("holo", help="write a phase hologram as a PGM file")
    add_common(p, grid=True)
    p.add_argument("--pitch", type=float, default=16.0, help="grating period in pixels")
    p.add_argument("--target", choices=("sector-v", "sector-h", "blazed"), default="sector-v")

    p = sub.add_parser("table1", help="fidelity table over the six reference inputs")
    add_common(p)
    p.add_argument("--shots", type=int, default=10_000, help="shots per projector")
    p.add_argument("--trials", type=int, default=100, help="repetitions per input")
    p.add_argument("--noiseless", action="store_true", help="exact expectations, no shot noise")
    p.add_argument("--degrees", action="store_true", help="interpret extra-row angles in degrees")
    p.add_argument("--extra", type=_parse_extra, action="append", default=[],
                   metavar="LABEL,GAMMA,DELTA", help="additional input rows")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    to_rad = math.pi / 180.0 if getattr(args, "degrees", False) else 1.0
    config = RunConfig(command=args.command, ell=args.ell, seed=args.seed, out=args.out)
    if hasattr(args, "gamma"):
        config.gamma = args.gamma * to_rad
        config.delta = args.delta * to_rad
    if hasattr(args, "grid"):
        config.grid = args.grid
        config.extent = args.extent
    if getattr(args, "outcome", None) is not None:
        config.outcome = OUTCOME_FLAGS[args.outcome]
    if hasattr(args, "pitch"):
        config.pitch = args.pitch
        config.target = args.target.replace("-", "_")
    if hasattr(args, "state"):
        config.states = tuple(dict.fromkeys(STATE_ALIASES.get(s, s) for s in args.state))
    if hasattr(args, "shots"):
        config.shots = args.shots
        config.trials = args.trials
        config.noiseless = args.noiseless
        config.extra_rows = tuple(
            (label, gamma * to_rad, delta * to_rad) for label, gamma, delta in args.extra
        )
    return config


def _oam_ket(label: str, ell: int) -> Ket:
    return Ket((OAM_B_HV,), MUB_STATE_VECTORS[label], ell=ell)


def cmd_teleport(config: RunConfig) -> int:
    result = teleport(
        InputPolarization(config.gamma, config.delta),
        ell=config.ell,
        outcome=config.outcome,
        seed=config.seed,
    )
    pol = InputPolarization(config.gamma, config.delta)
    amplitudes = result.b_state.amplitudes
    payload = {
        "input": {
            "gamma": config.gamma,
            "delta": pol.delta,
            "alpha": [pol.alpha, 0.0],
            "beta": [pol.beta.real, pol.beta.imag],
        },
        "ell": config.ell,
        "outcome": result.outcome.value,
        "classical_bits": list(classical_bits(result.outcome)),
        "probability": result.probability,
        "b_state": {
            "basis": ["h", "v"],
            "amplitudes": [[float(a.real), float(a.imag)] for a in amplitudes],
        },
        "poincare": [float(x) for x in poincare_coords(result.b_state)],
        "seed": config.seed,
    }
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    sys.stdout.write(text)
    if config.out is not None:
        Path(config.out).write_text(text)
    return 0


def cmd_render(config: RunConfig) -> int:
    from .figures import save_mode_panels

    out_dir = Path(config.out) if config.out is not None else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = config.grid_spec()
    images = {}
    for label in config.states:
        image = intensity_image(_oam_ket(label, config.ell), grid)
        images[label] = image
        write_pgm(image, out_dir / f"mode_{label}_ell{config.ell}.pgm")
    panel = save_mode_panels(
        images, out_dir / f"modes_ell{config.ell}.png", title=f"|l| = {config.ell}"
    )
    for label in config.states:
        print(out_dir / f"mode_{label}_ell{config.ell}.pgm")
    print(panel)
    return 0


def cmd_holo(config: RunConfig) -> int:
    spec = HologramSpec(ell=config.ell, pitch=config.pitch, target=config.target)
    image = sector_hologram(spec, config.grid_spec())
    out = Path(config.out) if config.out is not None else Path(
        f"holo_{config.target}_ell{config.ell}.pgm"
    )
    if out.is_dir():
        out = out / f"holo_{config.target}_ell{config.ell}.pgm"
    write_pgm(image, out)
    print(out)
    return 0


def cmd_table1(config: RunConfig) -> int:
    from .figures import save_fidelity_chart

    inputs = table_inputs() + list(config.extra_rows)
    reports = tomography_report(
        inputs,
        ell=config.ell,
        shots=config.shots,
        trials=config.trials,
        seed=config.seed,
        noiseless=config.noiseless,
    )
    out_dir = Path(config.out) if config.out is not None else Path(".")
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = write_report_csv(out_dir / "table1.csv", reports)
    write_counts_csv(
        out_dir / "counts.csv", {r.label: list(r.counts) for r in reports}
    )
    for report in reports:
        (out_dir / f"dm_{report.label}.json").write_text(
            density_matrix_to_json(report.reconstruction) + "\n"
        )
    save_fidelity_chart(reports, out_dir / "table1.png")

    sys.stdout.write(csv_path.read_text())
    grand = float(np.mean([r.f_mean for r in reports]))
    sys.stdout.write(f"# grand mean F = {grand:.6f} over {len(reports)} inputs\n")
    return 0


_COMMANDS = {
    "teleport": cmd_teleport,
    "render": cmd_render,
    "holo": cmd_holo,
    "table1": cmd_table1,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = config_from_args(args)
        config.validate()
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "exit_code": 2}) + "\n")
        return 2
    try:
        return _COMMANDS[config.command](config)
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": str(exc), "exit_code": 2}) + "\n")
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        sys.stderr.write(
            json.dumps({"error": f"{type(exc).__name__}: {exc}", "exit_code": 1}) + "\n"
        )
        return 1


def entry() -> None:
    sys.exit(main())
