"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here.
"""

import hashlib
import math
import time

import numpy as np
import pytest

from spin2oam.hilbert import DensityMatrix
from spin2oam.optics import (
    GridSpec,
    HologramSpec,
    intensity_image,
    pgm_bytes,
    sector_hologram,
)
from spin2oam.protocol import (
    BELL_ORDER,
    InputPolarization,
    bell_measurement,
    prepare_input,
    spdc_state,
    teleport,
)
from spin2oam.tomography import (
    fidelity,
    mle_reconstruct,
    simulate_counts,
    table_inputs,
    tomography_report,
    trace_distance,
)
from conftest import count_lobes, ncc, oam_ket, sample_circle

GOLDEN_HOLOGRAM_SHA256 = "3bd2e6235dd5b742a9101ea6ee16a1f87eb19e5eacaf353a845c5834288136b8"


def report(number: int, text: str) -> None:
    print(f"\nACCEPTANCE {number}: PASS - {text}")


def random_inputs(n: int, seed: int) -> list[InputPolarization]:
    rng = np.random.default_rng(seed)
    return [
        InputPolarization(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        for _ in range(n)
    ]


def test_criterion_1_end_to_end_identity():
    start = time.perf_counter()
    worst = 1.0
    for pol in random_inputs(200, seed=101):
        target = np.array([pol.alpha, pol.beta], dtype=complex)
        for ell in (1, 2, 3):
            for label in BELL_ORDER:
                result = teleport(pol, ell=ell, outcome=label)
                overlap = abs(np.vdot(target, result.b_state.amplitudes)) ** 2
                worst = min(worst, overlap)
                assert overlap >= 1 - 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    report(1, f"200 inputs x l in {{1,2,3}} x 4 outcomes, worst overlap {worst:.2e} "
              f"from 1, {elapsed * 1000:.0f} ms")


def test_criterion_2_uniform_bell_statistics():
    start = time.perf_counter()
    worst = 0.0
    for pol in random_inputs(100, seed=202):
        state = prepare_input(spdc_state(2), pol)
        for outcome in bell_measurement(state):
            worst = max(worst, abs(outcome.probability - 0.25))
            assert abs(outcome.probability - 0.25) <= 1e-12
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    report(2, f"all outcome probabilities 0.25 within {worst:.2e} <= 1e-12")


def test_criterion_3_measurement_chain_oracle():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(100):
        pol = InputPolarization(rng.uniform(0, math.pi), rng.uniform(0, 2 * math.pi))
        ell = int(rng.integers(1, 4))
        state = prepare_input(spdc_state(ell), pol)
        direct = bell_measurement(state, mode="direct")
        physical = bell_measurement(state, mode="physical")
        for d, p in zip(direct, physical):
            worst = max(worst, abs(d.probability - p.probability))
            assert abs(d.probability - p.probability) <= 1e-10
            assert d.conditional_b.overlap(p.conditional_b) >= 1 - 1e-10
    report(3, f"physical vs direct on 100 random states, max probability gap {worst:.2e}")


def test_criterion_4_fidelity_table_desk_scale():
    start = time.perf_counter()
    noiseless = tomography_report(table_inputs(), ell=2, shots=10_000, trials=1, noiseless=True)
    for row in noiseless:
        assert abs(row.f_mean - 1.0) <= 1e-6, row.label

    noisy = tomography_report(table_inputs(), ell=2, shots=10_000, trials=100, seed=404)
    row_means = {row.label: row.f_mean for row in noisy}
    for label, mean in row_means.items():
        assert mean >= 0.984, f"{label}: {mean}"
    grand = float(np.mean(list(row_means.values())))
    assert grand >= 0.99
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"runtime {elapsed:.1f}s exceeds 60s"
    report(4, f"noiseless F = 1 within 1e-6; N=1e4 x 100 trials row means >= "
              f"{min(row_means.values()):.4f}, grand mean {grand:.4f}, {elapsed:.1f} s")


def test_criterion_5_mode_image_panels():
    grid = GridSpec(256, 256)
    radius, phi = grid.polar()
    rho = radius / grid.waist
    envelope = (rho**2 * np.exp(-(rho**2))) ** 2
    closed_forms = {
        "l": envelope,
        "h": envelope * np.cos(2 * phi) ** 2,
        "a": envelope * np.cos(2 * phi + math.pi / 4) ** 2,
        "v": envelope * np.sin(2 * phi) ** 2,
        "d": envelope * np.sin(2 * phi + math.pi / 4) ** 2,
    }
    # images produced from the teleported states themselves
    panel_inputs = {"l": "L", "h": "H", "a": "A", "v": "V", "d": "D"}
    scores = {}
    for mode_label, pol_label in panel_inputs.items():
        b_state = teleport(InputPolarization.named(pol_label), ell=2, outcome="PhiPlus").b_state
        image = intensity_image(b_state, grid)
        score = ncc(image.values, closed_forms[mode_label])
        scores[mode_label] = score
        assert score >= 0.999, (mode_label, score)
        if mode_label != "l":
            _, profile = sample_circle(image.values, grid, grid.waist)
            assert count_lobes(profile) == 4, mode_label
    report(5, f"five panels match closed forms, min NCC {min(scores.values()):.6f}; "
              f"superposition states show exactly 4 lobes")


def test_criterion_6_mle_validity_suite():
    rng = np.random.default_rng(606)
    for _ in range(1000):
        vec = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        vec /= np.linalg.norm(vec)
        counts = simulate_counts(
            DensityMatrix(np.outer(vec, vec.conj())),
            shots=int(rng.integers(50, 5000)),
            seed=int(rng.integers(2**63)),
        )
        result = mle_reconstruct(counts)
        rho = result.rho.matrix
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
        assert abs(np.trace(rho).real - 1.0) <= 1e-12
        assert np.linalg.eigvalsh(rho).min() >= -1e-10
        assert np.all(np.diff(result.history) >= 0.0)

    worst = 0.0
    for _ in range(100):
        vec = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        vec /= np.linalg.norm(vec)
        truth = DensityMatrix(np.outer(vec, vec.conj()))
        counts = simulate_counts(truth, shots=10_000, noiseless=True)
        distance = trace_distance(mle_reconstruct(counts).rho, truth)
        worst = max(worst, distance)
        assert distance <= 1e-6
    report(6, f"1000 noisy reconstructions physical and monotone; noiseless "
              f"consistency worst trace distance {worst:.2e} <= 1e-6")


def test_criterion_7_fidelity_identities():
    h = DensityMatrix(np.array([[1, 0], [0, 0]], dtype=complex))
    v = DensityMatrix(np.array([[0, 0], [0, 1]], dtype=complex))
    mixed = DensityMatrix(np.eye(2) / 2)
    rng = np.random.default_rng(707)
    g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    m = g @ g.conj().T
    rho = DensityMatrix(m / np.trace(m).real)

    assert abs(fidelity(rho, rho) - 1.0) <= 1e-10
    assert abs(fidelity(h, h) - 1.0) <= 1e-10
    assert abs(fidelity(h, v)) <= 1e-10
    assert abs(fidelity(h, mixed) - 0.5) <= 1e-10
    report(7, "F(rho,rho)=1, F(h,v)=0, F(pure,I/2)=1/2 all within 1e-10")


def test_criterion_8_hologram_bit_exactness(tmp_path):
    spec = HologramSpec(ell=2, pitch=16, target="sector_v")
    grid = GridSpec(256, 256)
    first = pgm_bytes(sector_hologram(spec, grid))
    second = pgm_bytes(sector_hologram(spec, grid))
    assert first == second
    digest = hashlib.sha256(first).hexdigest()
    assert digest == GOLDEN_HOLOGRAM_SHA256
    report(8, f"golden hologram PGM stable, sha256 {digest[:12]}...")
