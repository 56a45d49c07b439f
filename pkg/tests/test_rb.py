"""Clifford group structure, benchmarking runs, and decay fitting."""

from __future__ import annotations

import numpy as np
import pytest

from pertopt import (
    RBFitError,
    average_gate_fidelity,
    fit_rb_decay,
    interleaved_gate_fidelity,
    run_rb,
)
from pertopt.rb import (
    X90_GENERATOR_INDEX,
    _generator_unitaries,
    build_clifford_group,
    clifford_group,
    compile_cliffords,
)
from pertopt.transmon import embed_qubit_gate, rotation_unitary

X90 = rotation_unitary("x", np.pi / 2)


def phase_distance(a, b):
    """Distance between unitaries modulo global phase."""
    return abs(abs(np.trace(a.conj().T @ b)) - a.shape[0])


# -------------------------------------------------------------------- group


def test_group_has_24_elements_identity_first():
    g = clifford_group()
    assert len(g) == 24
    np.testing.assert_allclose(g.unitaries[0], np.eye(2), atol=1e-12)
    assert g.decompositions[0] == ()


def test_group_is_closed_with_permutation_rows():
    g = clifford_group()
    for i in range(24):
        assert sorted(g.multiplication[i]) == list(range(24))
        assert sorted(g.multiplication[:, i]) == list(range(24))


def test_multiplication_table_matches_matrix_products():
    g = clifford_group()
    rng = np.random.default_rng(2)
    for _ in range(60):
        i, j = rng.integers(0, 24, size=2)
        product = g.unitaries[j] @ g.unitaries[i]  # apply i then j
        k = g.multiplication[i, j]
        assert phase_distance(product, g.unitaries[k]) < 1e-9


def test_inverse_table():
    g = clifford_group()
    for i in range(24):
        assert g.multiplication[i, g.inverse[i]] == 0
        product = g.unitaries[g.inverse[i]] @ g.unitaries[i]
        assert phase_distance(product, np.eye(2)) < 1e-9


def test_decompositions_rebuild_every_element():
    g = clifford_group()
    gens = _generator_unitaries()
    for decomp, u in zip(g.decompositions, g.unitaries):
        rebuilt = np.eye(2, dtype=complex)
        for g_idx in decomp:
            rebuilt = gens[g_idx] @ rebuilt
        assert phase_distance(rebuilt, u) < 1e-9


def test_x90_usage_across_decompositions():
    # the compiled group applies the gate under test 12 times across 24
    # elements: 0.5 occurrences per Clifford on average
    g = clifford_group()
    counts = [d.count(X90_GENERATOR_INDEX) for d in g.decompositions]
    assert sum(counts) == 12
    assert max(len(d) for d in g.decompositions) <= 3
    assert g.index_of(X90) == 1


def test_compile_with_ideal_gate_reproduces_group():
    g = clifford_group()
    compiled = compile_cliffords(g, X90)
    for u, c in zip(g.unitaries, compiled):
        assert phase_distance(u, c) < 1e-9


def test_compile_embeds_other_generators_on_three_levels():
    g = clifford_group()
    compiled = compile_cliffords(g, embed_qubit_gate(X90, 3))
    for u, c in zip(g.unitaries, compiled):
        assert c.shape == (3, 3)
        assert phase_distance(u, c[:2, :2]) < 1e-9
        assert abs(c[2, 2]) == pytest.approx(1.0, abs=1e-12)


def test_build_is_deterministic():
    a, b = build_clifford_group(), build_clifford_group()
    assert a.decompositions == b.decompositions
    np.testing.assert_array_equal(a.multiplication, b.multiplication)


# ----------------------------------------------------------------- sequences


def test_ideal_gate_survival_is_one():
    data = run_rb(X90, lengths=(0, 5, 20, 100), n_sequences=6, seed=3)
    assert np.max(np.abs(data.survival - 1.0)) <= 1e-12
    assert not data.interleaved


def test_ideal_gate_survival_is_one_with_shots():
    data = run_rb(X90, lengths=(1, 10, 50), n_sequences=4, shots=200, seed=9)
    np.testing.assert_array_equal(data.survival, np.ones(3))


def test_rb_run_is_seeded():
    gate = rotation_unitary("x", np.pi / 2 + 0.05)
    a = run_rb(gate, (0, 4, 16), 5, shots=100, seed=21)
    b = run_rb(gate, (0, 4, 16), 5, shots=100, seed=21)
    np.testing.assert_array_equal(a.survival, b.survival)


def test_rb_validation():
    with pytest.raises(ValueError, match="lengths"):
        run_rb(X90, (-1, 2), 4)
    with pytest.raises(ValueError, match="n_sequences"):
        run_rb(X90, (0, 2), 0)
    with pytest.raises(ValueError, match="shots"):
        run_rb(X90, (0, 2), 4, shots=-1)
    with pytest.raises(ValueError, match="square"):
        run_rb(np.ones((2, 3)), (0, 2), 4)


def test_three_level_ideal_gate_keeps_survival():
    data = run_rb(embed_qubit_gate(X90, 3), (0, 8, 40), 4, seed=1)
    assert np.max(np.abs(data.survival - 1.0)) <= 1e-12


# -------------------------------------------------------- fixture benchmark

FIXTURE_LENGTHS = (0, 1, 2, 3, 4, 5, 6, 8, 11, 14, 19, 25, 32, 42, 55, 72,
                   93, 122, 159, 208, 272, 355, 463, 605, 790, 1032, 1347,
                   1759, 2297, 3000)


def test_over_rotation_fixture_decay_matches_twirl_oracle():
    # 0.0447-rad over-rotation: per-gate infidelity r = sin^2(d/2) * 2/3,
    # and the group applies the gate 0.5 times per Clifford on average
    delta = 0.0447
    gate = rotation_unitary("x", np.pi / 2 + delta)
    fid = average_gate_fidelity(gate, X90)
    assert fid == pytest.approx(0.9996670404458022, abs=1e-12)

    # independent oracle: depolarizing parameter of the per-Clifford twirl
    g = clifford_group()
    compiled = compile_cliffords(g, gate)
    p_cliffords = [
        2.0 * average_gate_fidelity(c, u) - 1.0
        for c, u in zip(compiled, g.unitaries)
    ]
    p_theory = float(np.mean(p_cliffords))
    # the twirl reproduces the decomposition-count estimate 2 * r * 0.5
    assert 1.0 - p_theory == pytest.approx(2.0 * (1.0 - fid) * 0.5, rel=1e-3)

    data = run_rb(gate, FIXTURE_LENGTHS, n_sequences=60, seed=19)
    fit = fit_rb_decay(data.lengths, data.survival)
    assert not fit.degenerate
    # coherent errors average to a mixture of nearby exponentials, so a
    # single fitted rate lands within a factor of two of the oracle
    ratio = (1.0 - fit.decay_rate) / (1.0 - p_theory)
    assert 0.5 <= ratio <= 2.0
    assert fit.amplitude + fit.offset == pytest.approx(1.0, abs=0.02)


def test_interleaved_fixture_recovers_direct_fidelity():
    delta = 0.0447
    gate = rotation_unitary("x", np.pi / 2 + delta)
    direct = average_gate_fidelity(gate, X90)

    ref = run_rb(gate, FIXTURE_LENGTHS, n_sequences=60, seed=19)
    inter = run_rb(gate, FIXTURE_LENGTHS, n_sequences=60, seed=119,
                   interleaved=True)
    assert inter.interleaved
    fit_ref = fit_rb_decay(ref.lengths, ref.survival)
    fit_int = fit_rb_decay(inter.lengths, inter.survival)
    estimate = interleaved_gate_fidelity(fit_ref.decay_rate, fit_int.decay_rate)
    assert abs(estimate - direct) <= 5e-4


# ---------------------------------------------------------------------- fit


def test_fit_recovers_noiseless_parameters():
    lengths = np.arange(0, 300, 10)
    survival = 0.45 * 0.985**lengths + 0.52
    fit = fit_rb_decay(lengths, survival)
    assert fit.amplitude == pytest.approx(0.45, abs=1e-6)
    assert fit.offset == pytest.approx(0.52, abs=1e-6)
    assert fit.decay_rate == pytest.approx(0.985, abs=1e-6)
    assert not fit.degenerate
    assert fit.stderr_decay < 1e-6


def test_fit_flags_constant_survival_as_degenerate():
    fit = fit_rb_decay((0, 10, 20, 40), np.full(4, 1.0))
    assert fit.degenerate
    assert fit.decay_rate == 1.0
    assert fit.amplitude == 0.0
    assert fit.offset == 1.0
    assert np.isinf(fit.stderr_decay)


def test_fit_input_validation():
    with pytest.raises(ValueError, match="points"):
        fit_rb_decay((0, 1), (1.0, 0.9))
    with pytest.raises(ValueError, match="points"):
        fit_rb_decay((0, 1, 2), (1.0, 0.9))


def test_fit_stderr_covers_truth():
    # 3-sigma coverage of the decay parameter across noisy realizations
    lengths = np.arange(0, 310, 10)
    truth = 0.97
    rng = np.random.default_rng(31)
    covered = 0
    for _ in range(100):
        survival = 0.5 * truth**lengths + 0.5 + 0.01 * rng.standard_normal(
            lengths.size
        )
        fit = fit_rb_decay(lengths, np.clip(survival, 0.0, 1.0))
        if abs(fit.decay_rate - truth) <= 3.0 * fit.stderr_decay:
            covered += 1
    assert covered >= 94


def test_interleaved_fidelity_formula():
    assert interleaved_gate_fidelity(0.995, 0.9936) == pytest.approx(
        0.9992964824120603, abs=1e-12
    )
    assert interleaved_gate_fidelity(1.0, 0.998) == pytest.approx(0.999,
                                                                  abs=1e-12)
    assert interleaved_gate_fidelity(0.9, 0.9) == 1.0


def test_interleaved_fidelity_warns_when_ratio_exceeds_one():
    with pytest.warns(UserWarning, match="exceeds"):
        value = interleaved_gate_fidelity(0.99, 0.995)
    assert value > 1.0


def test_interleaved_fidelity_validation():
    with pytest.raises(ValueError, match="p_reference"):
        interleaved_gate_fidelity(0.0, 0.99)
    with pytest.raises(ValueError, match="p_interleaved"):
        interleaved_gate_fidelity(0.99, 1.2)
