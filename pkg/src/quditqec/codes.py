"""Codeword construction: the three-register flip and phase codes, the nine-register
concatenated code (closed form and encoding circuit), and the counting bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor import (
    CHECK_TOL,
    StateVec,
    apply_gate,
    apply_local,
    basis_state,
    check_dim,
    register_digits,
    state_to_json,
)

NINE = 9
BLOCKS = ((0, 1, 2), (3, 4, 5), (6, 7, 8))
LEADS = (0, 3, 6)


def omega(N: int) -> complex:
    """Primitive N-th root of unity ``exp(2 pi i / N)``."""
    return complex(np.exp(2j * np.pi / N))


def omega_power(N: int, k) -> np.ndarray | complex:
    """``omega(N) ** k``; the exponent is reduced mod N to keep the angle small."""
    return np.exp(2j * np.pi * (np.mod(k, N)) / N)


def character_sum(N: int, k: int) -> complex:
    """``sum_m omega^(m k)``: N when k is a multiple of N, else 0."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    return complex(np.sum(omega_power(N, np.arange(N) * k)))


@dataclass
class CodeSpec:
    N: int
    physical_registers: int
    codewords: list[StateVec]

    @property
    def logical_dim(self) -> int:
        return len(self.codewords)

    def gram(self) -> np.ndarray:
        words = np.array([w.amplitudes for w in self.codewords])
        return words.conj() @ words.T

    def is_orthonormal(self, tol: float = CHECK_TOL) -> bool:
        return bool(np.max(np.abs(self.gram() - np.eye(self.logical_dim))) <= tol)

    def encode(self, logical: StateVec) -> StateVec:
        """Linear extension of ``|m> -> codewords[m]``."""
        if logical.registers != 1 or logical.N != self.logical_dim:
            raise ValueError(
                f"expected a single register with {self.logical_dim} levels, got {logical!r}"
            )
        words = np.array([w.amplitudes for w in self.codewords])
        return StateVec(self.N, self.physical_registers, logical.amplitudes @ words)

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "registers": self.physical_registers,
            "codewords": [state_to_json(w) for w in self.codewords],
        }


def _single_register(logical: StateVec):
    if logical.registers != 1:
        raise ValueError(f"expected a single-register logical state, got {logical.registers} registers")


def flip_code(N: int) -> CodeSpec:
    return CodeSpec(N, 3, [basis_state(N, (i, i, i)) for i in range(N)])


def encode_flip(logical: StateVec) -> StateVec:
    _single_register(logical)
    return flip_code(logical.N).encode(logical)


def encode_pair_phase(i: int, N: int) -> CodeSpec:
    """Code protecting against ``R_i``: levels 1 and i go to ``(|1> +- |i>)^{x3} / sqrt 8``."""
    if not 1 <= i <= N - 1:
        raise ValueError(f"i must lie in [1, {N - 1}], got {i}")
    if i == 1:
        raise ValueError("i = 1 makes the pair {|1>, |i>} degenerate")
    words = []
    for j in range(N):
        if j in (1, i):
            sign = 1.0 if j == 1 else -1.0
            single = np.zeros(N, dtype=np.complex128)
            single[1], single[i] = 1.0, sign
            amps = np.kron(np.kron(single, single), single) / np.sqrt(8)
            words.append(StateVec(N, 3, amps))
        else:
            words.append(basis_state(N, (j, j, j)))
    return CodeSpec(N, 3, words)


def phase_code(N: int) -> CodeSpec:
    digits = register_digits(N, 3)
    total = digits.sum(axis=0)
    words = [StateVec(N, 3, omega_power(N, total * m) / N**1.5) for m in range(N)]
    return CodeSpec(N, 3, words)


def encode_phase(logical: StateVec) -> StateVec:
    _single_register(logical)
    return phase_code(logical.N).encode(logical)


def build_nine_code(N: int, cap: int | None = None) -> CodeSpec:
    """Codewords ``N^{-3/2} sum_{k,p,q} omega^{(k+p+q) m} |kkk ppp qqq>``."""
    check_dim(N, NINE, cap)
    ks = np.arange(N)
    # Indices of |kkk> in a three-register block, then of |kkk ppp qqq>.
    rep = ks * (N**2 + N + 1)
    idx = (rep[:, None, None] * N**6 + rep[None, :, None] * N**3 + rep[None, None, :]).reshape(-1)
    total = (ks[:, None, None] + ks[None, :, None] + ks[None, None, :]).reshape(-1)
    words = []
    for m in range(N):
        amps = np.zeros(N**NINE, dtype=np.complex128)
        amps[idx] = omega_power(N, total * m) / N**1.5
        words.append(StateVec(N, NINE, amps))
    return CodeSpec(N, NINE, words)


def encode_nine(logical: StateVec, cap: int | None = None) -> StateVec:
    _single_register(logical)
    return build_nine_code(logical.N, cap).encode(logical)


def dft_gate(N: int) -> np.ndarray:
    """``F[k, m] = omega^(k m) / sqrt(N)``."""
    k = np.arange(N)
    return omega_power(N, np.outer(k, k)) / np.sqrt(N)


def copy_gate(N: int) -> np.ndarray:
    """Two-register gate ``|a, b> -> |a, a + b mod N>``; CNOT when N = 2."""
    gate = np.zeros((N * N, N * N), dtype=np.complex128)
    for a in range(N):
        for b in range(N):
            gate[a * N + (a + b) % N, a * N + b] = 1.0
    return gate


def copy_stage(state: StateVec, source: int, targets, inverse: bool = False) -> StateVec:
    gate = copy_gate(state.N)
    if inverse:
        gate = gate.conj().T
    for t in targets:
        state = apply_gate(state, gate, (source, t))
    return state


def encode_nine_by_circuit(logical: StateVec, cap: int | None = None, stages: int = 3) -> StateVec:
    """Encode through the copy / DFT / copy circuit.

    ``stages`` < 3 stops early, which exposes the intermediate states.
    """
    _single_register(logical)
    N = logical.N
    check_dim(N, NINE, cap)
    amps = np.zeros(N**NINE, dtype=np.complex128)
    # |m 0 0 0 0 0 0 0 0> sits at index m * N**8.
    amps[np.arange(N) * N ** (NINE - 1)] = logical.amplitudes
    state = StateVec(N, NINE, amps)

    state = copy_stage(state, 0, (3, 6))
    if stages >= 2:
        F = dft_gate(N)
        for lead in LEADS:
            state = apply_local(state, F, lead)
    if stages >= 3:
        for lead, *rest in BLOCKS:
            state = copy_stage(state, lead, rest)
    return state


def dimension_bound(N: int, n: int) -> dict:
    if N < 2 or n < 1:
        raise ValueError(f"need N >= 2 and n >= 1, got N={N}, n={n}")
    lhs = (1 + (N * N - 1) * n) * N
    rhs = N**n
    return {"n": n, "lhs": lhs, "rhs": rhs, "satisfied": lhs <= rhs, "perfect": lhs == rhs}


def minimal_registers(N: int, max_n: int = 64) -> int | None:
    for n in range(1, max_n + 1):
        if dimension_bound(N, n)["satisfied"]:
            return n
    return None

