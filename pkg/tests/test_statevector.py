"""Unit and property tests for the dense simulation primitives."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbslab.errors import (
    DimensionMismatch,
    NormalizationError,
    UnnormalizedAxis,
    ZeroDimension,
)
from gibbslab.statevector import (
    QueryLedger,
    StateVector,
    apply_marked_phase_flip,
    apply_reflection_about,
    basis_state,
    fidelity,
    init_uniform,
    inner_product,
    measure_sample,
    measure_samples,
    trial_rng,
)


def test_uniform_single_element():
    state = init_uniform(1)
    assert state.amplitudes[0] == pytest.approx(1.0)


def test_uniform_d4_amplitudes():
    state = init_uniform(4)
    np.testing.assert_allclose(state.amplitudes, 0.5, atol=1e-15)


def test_uniform_d16_normalized():
    state = init_uniform(16)
    assert abs(inner_product(state, state) - 1.0) < 1e-12


def test_zero_dimension_rejected():
    with pytest.raises(ZeroDimension):
        init_uniform(0)


def test_unnormalized_amplitudes_rejected():
    with pytest.raises(NormalizationError):
        StateVector(2, np.array([1.0, 1.0], dtype=complex))


def test_phase_flip_global_phase_is_invisible():
    ledger = QueryLedger()
    state = init_uniform(8)
    flipped = apply_marked_phase_flip(state, lambda i: True, math.pi, ledger)
    assert fidelity(flipped, state) == pytest.approx(1.0, abs=1e-12)


def test_phase_flip_sign_on_marked_index():
    ledger = QueryLedger()
    state = init_uniform(2)
    out = apply_marked_phase_flip(state, {0}, math.pi, ledger)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(out.amplitudes, [-s, s], atol=1e-12)


def test_phase_flip_counts_one_query_per_call():
    ledger = QueryLedger()
    state = init_uniform(4)
    for expected in range(1, 6):
        state = apply_marked_phase_flip(state, {1, 2}, 0.3, ledger)
        assert ledger.oh_queries == expected
        assert ledger.ob_queries == expected


def test_reflection_fixes_axis_up_to_global_phase():
    axis = init_uniform(6)
    out = apply_reflection_about(axis, axis, math.pi)
    assert fidelity(out, axis) == pytest.approx(1.0, abs=1e-12)


def test_reflection_leaves_orthogonal_component():
    axis = basis_state(4, 0)
    perp = basis_state(4, 2)
    out = apply_reflection_about(perp, axis, math.pi)
    np.testing.assert_allclose(out.amplitudes, perp.amplitudes, atol=1e-12)


def test_reflection_involution():
    rng = trial_rng(11, 0)
    amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    state = StateVector(8, amps / np.linalg.norm(amps))
    axis_amps = rng.normal(size=8) + 1j * rng.normal(size=8)
    axis = StateVector(8, axis_amps / np.linalg.norm(axis_amps))
    twice = apply_reflection_about(apply_reflection_about(state, axis, math.pi), axis, math.pi)
    assert fidelity(twice, state) >= 1 - 1e-10


def test_reflection_rejects_unnormalized_axis():
    state = init_uniform(3)
    bad = StateVector.__new__(StateVector)
    object.__setattr__(bad, "dimension", 3)
    object.__setattr__(bad, "amplitudes", np.array([1.0, 1e-4, 0.0], dtype=complex))
    with pytest.raises(UnnormalizedAxis):
        apply_reflection_about(state, bad, math.pi)


def test_inner_product_conjugate_symmetry_and_mismatch():
    a = init_uniform(4)
    b = basis_state(4, 1)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)))
    with pytest.raises(DimensionMismatch):
        inner_product(a, init_uniform(5))


def test_inner_product_uniform_vs_marked_subset():
    # |<s|T>| = sqrt(4/16) for 4 marked of 16, by the direct sum
    s = init_uniform(16)
    t_amps = np.zeros(16, dtype=complex)
    t_amps[:4] = 0.5
    t = StateVector(16, t_amps)
    direct = sum(s.amplitudes[i].conjugate() * t_amps[i] for i in range(16))
    assert inner_product(s, t) == pytest.approx(direct)
    assert abs(inner_product(s, t)) == pytest.approx(0.5, abs=1e-12)


def test_measure_deterministic_state():
    state = basis_state(5, 3)
    rng = trial_rng(0, 0)
    assert all(measure_sample(state, rng) == 3 for _ in range(20))


def test_measure_uniform_frequencies():
    state = init_uniform(4)
    rng = trial_rng(123, 0)
    draws = measure_samples(state, rng, 40_000)
    freqs = np.bincount(draws, minlength=4) / 40_000
    # 4-sigma binomial interval around 0.25
    np.testing.assert_allclose(freqs, 0.25, atol=0.01)


def test_measure_replay_identical():
    state = init_uniform(8)
    first = measure_samples(state, trial_rng(7, 4), 100)
    second = measure_samples(state, trial_rng(7, 4), 100)
    np.testing.assert_array_equal(first, second)


def test_ledger_monotone_rejects_negative():
    ledger = QueryLedger()
    with pytest.raises(ValueError):
        ledger.record_oh(-1)


def test_ledger_delta():
    ledger = QueryLedger()
    ledger.record_oh(3)
    snap = ledger.snapshot()
    ledger.record_oh(2)
    ledger.record_reflection()
    diff = ledger.delta(snap)
    assert (diff.oh_queries, diff.reflections) == (2, 1)


@settings(max_examples=60, deadline=None)
@given(
    dim=st.integers(min_value=2, max_value=24),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
    n_ops=st.integers(min_value=1, max_value=12),
)
def test_norm_preserved_under_random_op_sequences(dim, seed, n_ops):
    rng = trial_rng(seed, 0)
    state = init_uniform(dim)
    axis_amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    axis = StateVector(dim, axis_amps / np.linalg.norm(axis_amps))
    ledger = QueryLedger()
    for _ in range(n_ops):
        if rng.random() < 0.5:
            mask = rng.random(dim) < 0.5
            state = apply_marked_phase_flip(state, mask, rng.uniform(-math.pi, math.pi), ledger)
        else:
            state = apply_reflection_about(state, axis, rng.uniform(-math.pi, math.pi))
    assert abs(np.linalg.norm(state.amplitudes) - 1.0) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(
    dim=st.integers(min_value=2, max_value=16),
    seed=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_disjoint_phase_flips_commute(dim, seed):
    rng = trial_rng(seed, 1)
    split = rng.random(dim) < 0.5
    mask_a, mask_b = split, ~split
    phase_a, phase_b = rng.uniform(-math.pi, math.pi, size=2)
    state = init_uniform(dim)
    ab = apply_marked_phase_flip(
        apply_marked_phase_flip(state, mask_a, phase_a, QueryLedger()),
        mask_b, phase_b, QueryLedger(),
    )
    ba = apply_marked_phase_flip(
        apply_marked_phase_flip(state, mask_b, phase_b, QueryLedger()),
        mask_a, phase_a, QueryLedger(),
    )
    assert np.max(np.abs(ab.amplitudes - ba.amplitudes)) <= 1e-12


def test_ledger_counts_equal_flip_calls_exactly():
    ledger = QueryLedger()
    state = init_uniform(10)
    calls = 0
    rng = trial_rng(9, 9)
    for _ in range(25):
        state = apply_marked_phase_flip(state, rng.random(10) < 0.3, 0.17, ledger)
        calls += 1
    assert ledger.oh_queries == calls
    assert ledger.ob_queries == calls
