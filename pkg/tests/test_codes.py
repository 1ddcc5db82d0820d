import cmath
import itertools

import numpy as np
import pytest

from quditqec.codes import (
    build_nine_code,
    character_sum,
    copy_gate,
    dft_gate,
    dimension_bound,
    encode_flip,
    encode_nine,
    encode_nine_by_circuit,
    encode_pair_phase,
    encode_phase,
    flip_code,
    minimal_registers,
    omega,
    phase_code,
)
from quditqec.tensor import StateVec, basis_index, basis_state, is_unitary, random_state

SHOR_AMP = 2**-1.5


def _loop_character_sum(N, k):
    return sum(cmath.exp(2j * cmath.pi * m * k / N) for m in range(N))


def nine_codeword_oracle(N, m):
    """Direct triple loop over (k, p, q)."""
    amps = np.zeros(N**9, dtype=complex)
    w = cmath.exp(2j * cmath.pi / N)
    for k, p, q in itertools.product(range(N), repeat=3):
        amps[basis_index(N, (k,) * 3 + (p,) * 3 + (q,) * 3)] += w ** ((k + p + q) * m) / N**1.5
    return amps


def test_omega_is_primitive():
    for N in range(2, 8):
        w = omega(N)
        assert abs(w**N - 1) < 1e-12
        assert all(abs(w**k - 1) > 1e-6 for k in range(1, N))


def test_character_sum_examples():
    assert abs(character_sum(3, 1)) < 1e-10
    assert abs(character_sum(4, 4) - 4) < 1e-10
    assert abs(character_sum(5, 10) - 5) < 1e-10
    assert abs(_loop_character_sum(5, 10) - 5) < 1e-10


@pytest.mark.parametrize("N", range(2, 8))
def test_character_sum_matches_loop(N):
    for k in range(-3 * N, 3 * N + 1):
        assert abs(character_sum(N, k) - _loop_character_sum(N, k)) < 1e-10


def test_flip_encoder():
    assert np.array_equal(encode_flip(basis_state(3, (0,))).amplitudes, basis_state(3, (0, 0, 0)).amplitudes)
    plus = StateVec(2, 1, np.array([1, 1]) / np.sqrt(2))
    expected = (basis_state(2, (0, 0, 0)).amplitudes + basis_state(2, (1, 1, 1)).amplitudes) / np.sqrt(2)
    assert np.allclose(encode_flip(plus).amplitudes, expected, atol=1e-15)
    with pytest.raises(ValueError, match="single-register"):
        encode_flip(basis_state(2, (0, 0)))


def test_flip_encoder_preserves_norm(rng):
    for N in (2, 3, 4):
        assert abs(encode_flip(random_state(N, 1, rng)).norm() - 1) < 1e-12


def test_pair_phase_code():
    code = encode_pair_phase(2, 3)
    single = np.array([0, 1, 1])
    expected = np.kron(np.kron(single, single), single) / np.sqrt(8)
    assert np.allclose(code.codewords[1].amplitudes, expected, atol=1e-15)
    single = np.array([0, 1, -1])
    expected = np.kron(np.kron(single, single), single) / np.sqrt(8)
    assert np.allclose(code.codewords[2].amplitudes, expected, atol=1e-15)
    assert np.array_equal(code.codewords[0].amplitudes, basis_state(3, (0, 0, 0)).amplitudes)
    assert code.is_orthonormal(1e-12)
    for N, i in [(4, 2), (4, 3), (5, 4)]:
        assert encode_pair_phase(i, N).is_orthonormal(1e-12)


@pytest.mark.parametrize("i,N", [(1, 3), (1, 2), (0, 3), (3, 3)])
def test_pair_phase_rejects(i, N):
    with pytest.raises(ValueError):
        encode_pair_phase(i, N)


def test_phase_encoder_N2():
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    cube = lambda v: np.kron(np.kron(v, v), v)
    assert np.allclose(encode_phase(basis_state(2, (0,))).amplitudes, cube(plus), atol=1e-15)
    assert np.allclose(encode_phase(basis_state(2, (1,))).amplitudes, cube(minus), atol=1e-15)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_three_register_codes_orthonormal(N):
    assert flip_code(N).is_orthonormal()
    gram = phase_code(N).gram()
    # entry (m, m') is the cube of a character sum over k of omega^{k (m' - m)} / N
    for m in range(N):
        for mp in range(N):
            expected = (_loop_character_sum(N, mp - m) / N) ** 3
            assert abs(gram[m, mp] - expected) < 1e-10
    assert np.max(np.abs(gram - np.eye(N))) < 1e-10


def test_shor_reduction():
    code = build_nine_code(2)
    for m, sign in ((0, 1), (1, -1)):
        amps = code.codewords[m].amplitudes
        nonzero = np.flatnonzero(amps)
        assert len(nonzero) == 8
        for k, p, q in itertools.product(range(2), repeat=3):
            idx = basis_index(2, (k,) * 3 + (p,) * 3 + (q,) * 3)
            assert abs(amps[idx] - sign ** (k + p + q) * SHOR_AMP) < 1e-12
    block = lambda s: np.array([1] + [0] * 6 + [s]) / np.sqrt(2)
    for m, s in ((0, 1), (1, -1)):
        shor = np.kron(np.kron(block(s), block(s)), block(s))
        assert np.max(np.abs(code.codewords[m].amplitudes - shor)) < 1e-12


@pytest.mark.parametrize("N", [2, 3])
def test_nine_code_matches_loop_oracle(N):
    code = build_nine_code(N)
    for m in range(N):
        assert np.max(np.abs(code.codewords[m].amplitudes - nine_codeword_oracle(N, m))) < 1e-12
    assert code.is_orthonormal()


def test_nine_code_is_flip_inside_phase():
    N = 3
    flip = flip_code(N)
    for m in range(N):
        outer = phase_code(N).codewords[m].amplitudes.reshape(N, N, N)
        amps = np.zeros(N**9, dtype=complex)
        for k, p, q in itertools.product(range(N), repeat=3):
            word = np.kron(np.kron(flip.codewords[k].amplitudes, flip.codewords[p].amplitudes), flip.codewords[q].amplitudes)
            amps += outer[k, p, q] * word
        assert np.max(np.abs(build_nine_code(N).codewords[m].amplitudes - amps)) < 1e-12


def test_nine_code_cap():
    with pytest.raises(ValueError, match="exceeds the cap"):
        build_nine_code(6)
    with pytest.raises(ValueError, match="exceeds the cap"):
        build_nine_code(3, cap=1000)


def test_dft_gate():
    assert np.allclose(dft_gate(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2), atol=1e-15)
    for N in range(2, 8):
        F = dft_gate(N)
        assert np.max(np.abs(F.conj().T @ F - np.eye(N))) < 1e-12
        assert np.allclose(F[:, 0], np.full(N, 1 / np.sqrt(N)), atol=1e-15)


def test_copy_gate():
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    assert np.array_equal(copy_gate(2), cnot)
    g = copy_gate(3)
    assert np.array_equal(g @ basis_state(3, (2, 0)).amplitudes, basis_state(3, (2, 2)).amplitudes)
    for N in (2, 3, 4, 5):
        g = copy_gate(N)
        assert np.all(np.isin(g, (0, 1)))
        assert np.all(g.sum(axis=0) == 1) and np.all(g.sum(axis=1) == 1)
        assert is_unitary(g, 1e-12)


@pytest.mark.parametrize("N", [2, 3, 4])
def test_circuit_matches_formula_on_basis(N):
    code = build_nine_code(N)
    for m in range(N):
        circuit = encode_nine_by_circuit(basis_state(N, (m,)))
        assert np.max(np.abs(circuit.amplitudes - code.codewords[m].amplitudes)) < 1e-12


@pytest.mark.parametrize("N", [2, 3])
def test_circuit_matches_formula_on_random_states(rng, N):
    for _ in range(20):
        psi = random_state(N, 1, rng)
        diff = encode_nine_by_circuit(psi).amplitudes - encode_nine(psi).amplitudes
        assert np.max(np.abs(diff)) < 1e-12


def test_circuit_first_stage():
    N = 3
    for m in range(N):
        mid = encode_nine_by_circuit(basis_state(N, (m,)), stages=1)
        assert np.array_equal(mid.amplitudes, basis_state(N, (m, 0, 0, m, 0, 0, m, 0, 0)).amplitudes)


def test_circuit_second_stage():
    N = 3
    w = omega(N)
    mid = encode_nine_by_circuit(basis_state(N, (1,)), stages=2)
    for k, p, q in itertools.product(range(N), repeat=3):
        idx = basis_index(N, (k, 0, 0, p, 0, 0, q, 0, 0))
        assert abs(mid.amplitudes[idx] - w ** (k + p + q) / N**1.5) < 1e-12


def test_encoders_are_linear(rng):
    N = 3
    u, v = random_state(N, 1, rng), random_state(N, 1, rng)
    a, b = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    combo = StateVec(N, 1, a * u.amplitudes + b * v.amplitudes)
    for enc in (encode_flip, encode_phase, encode_nine, encode_nine_by_circuit):
        lhs = enc(combo).amplitudes
        rhs = a * enc(u).amplitudes + b * enc(v).amplitudes
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_dimension_bound_examples():
    assert dimension_bound(2, 5) == {"n": 5, "lhs": 32, "rhs": 32, "satisfied": True, "perfect": True}
    row = dimension_bound(2, 9)
    assert (row["lhs"], row["rhs"], row["satisfied"], row["perfect"]) == (56, 512, True, False)
    assert dimension_bound(3, 4)["lhs"] == 99 and not dimension_bound(3, 4)["satisfied"]
    assert dimension_bound(3, 5)["lhs"] == 123 and dimension_bound(3, 5)["satisfied"]
    assert minimal_registers(2) == 5
    assert minimal_registers(3) == 5
    with pytest.raises(ValueError):
        dimension_bound(1, 3)


def test_codespec_json(rng):
    doc = build_nine_code(2).to_json()
    assert doc["N"] == 2 and doc["registers"] == 9 and len(doc["codewords"]) == 2
    re, im = doc["codewords"][0]["amplitudes"][0]
    assert abs(re - SHOR_AMP) < 1e-15 and im == 0
