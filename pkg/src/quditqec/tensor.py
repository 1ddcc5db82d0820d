"""Dense state-vector kernel for registers of N-level systems.

Basis state ``|d0 d1 ... d_{n-1}>`` lives at index ``sum(d_i * N**(n-1-i))``,
so register 0 is the most significant digit. Operators are plain complex
numpy arrays.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

CHECK_TOL = 1e-10
ALGEBRA_TOL = 1e-12
DEFAULT_MAX_DIM = 2_000_000
CAP_ENV = "QECC_CAP"


def max_dim(cap: int | None = None) -> int:
    """Amplitude cap: explicit argument, else ``$QECC_CAP``, else the default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get(CAP_ENV)
    if env:
        return int(env)
    return DEFAULT_MAX_DIM


def check_dim(N: int, registers: int, cap: int | None = None) -> int:
    if N < 2:
        raise ValueError(f"levels per register must be >= 2, got {N}")
    if registers < 1:
        raise ValueError(f"register count must be >= 1, got {registers}")
    dim = N**registers
    limit = max_dim(cap)
    if dim > limit:
        raise ValueError(
            f"state dimension {N}**{registers} = {dim} exceeds the cap of {limit} amplitudes"
        )
    return dim


@dataclass(frozen=True, eq=False)
class StateVec:
    """Amplitudes of ``registers`` N-level registers in big-endian basis order."""

    N: int
    registers: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.N < 2 or self.registers < 1:
            raise ValueError(f"invalid shape N={self.N}, registers={self.registers}")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size != self.N**self.registers:
            raise ValueError(
                f"expected {self.N**self.registers} amplitudes for N={self.N}, "
                f"registers={self.registers}; got {amps.size}"
            )
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def is_normalized(self, tol: float = CHECK_TOL) -> bool:
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0) <= tol

    def normalized(self) -> StateVec:
        nrm = self.norm()
        if nrm < ALGEBRA_TOL:
            raise ValueError("cannot normalize a zero state")
        return StateVec(self.N, self.registers, self.amplitudes / nrm)

    def scaled(self, factor: complex) -> StateVec:
        return StateVec(self.N, self.registers, self.amplitudes * factor)

    def tensor(self) -> np.ndarray:
        """Read-only view with one axis per register."""
        return self.amplitudes.reshape((self.N,) * self.registers)

    def __add__(self, other: StateVec) -> StateVec:
        _check_same_shape(self, other)
        return StateVec(self.N, self.registers, self.amplitudes + other.amplitudes)

    def __repr__(self):
        return f"StateVec(N={self.N}, registers={self.registers})"


def basis_state(N: int, digits) -> StateVec:
    digits = list(digits)
    for d in digits:
        if not 0 <= d < N:
            raise ValueError(f"digit {d} out of range for N={N}")
    amps = np.zeros(N ** len(digits), dtype=np.complex128)
    amps[basis_index(N, digits)] = 1.0
    return StateVec(N, len(digits), amps)


def basis_index(N: int, digits) -> int:
    idx = 0
    for d in digits:
        idx = idx * N + int(d)
    return idx


@lru_cache(maxsize=32)
def register_digits(N: int, registers: int) -> np.ndarray:
    """Integer array ``digits[r, x]``: value of register r in basis index x."""
    idx = np.arange(N**registers)
    powers = N ** np.arange(registers - 1, -1, -1)
    digits = (idx[None, :] // powers[:, None]) % N
    digits.flags.writeable = False
    return digits


def random_state(N: int, registers: int, rng: np.random.Generator) -> StateVec:
    """Normalized state from independent standard complex Gaussians."""
    dim = N**registers
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVec(N, registers, amps / np.linalg.norm(amps))


def random_matrix(N: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))


def random_unitary(N: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(random_matrix(N, rng))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases[None, :]


def is_unitary(op: np.ndarray, tol: float = CHECK_TOL) -> bool:
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        return False
    return bool(np.max(np.abs(op.conj().T @ op - np.eye(op.shape[0]))) <= tol)


def apply_gate(state: StateVec, op: np.ndarray, registers) -> StateVec:
    """Apply an operator on the listed registers (in that order) and return a new state."""
    registers = tuple(int(r) for r in registers)
    k = len(registers)
    op = np.asarray(op, dtype=np.complex128)
    N, n = state.N, state.registers
    if op.shape != (N**k, N**k):
        raise ValueError(
            f"operator shape {op.shape} does not act on {k} register(s) of dimension {N}"
        )
    if len(set(registers)) != k:
        raise ValueError(f"repeated register in {registers}")
    for r in registers:
        if not 0 <= r < n:
            raise ValueError(f"register {r} out of range for {n} registers")

    psi = state.amplitudes.reshape((N,) * n)
    gate = op.reshape((N,) * (2 * k))
    out = np.tensordot(gate, psi, axes=(list(range(k, 2 * k)), list(registers)))
    # tensordot puts the gate's output axes first; move them back into place.
    out = np.moveaxis(out, list(range(k)), list(registers))
    return StateVec(N, n, out.reshape(-1))


def apply_local(state: StateVec, op: np.ndarray, register: int) -> StateVec:
    """Return ``(I x ... x op x ... x I)|state>`` with ``op`` in slot ``register``."""
    op = np.asarray(op, dtype=np.complex128)
    N, n = state.N, state.registers
    if op.shape != (N, N):
        raise ValueError(f"operator shape {op.shape} does not match register dimension {N}")
    if not 0 <= register < n:
        raise ValueError(f"register {register} out of range for {n} registers")
    psi = state.amplitudes.reshape(N**register, N, N ** (n - register - 1))
    out = np.einsum("ij,ajb->aib", op, psi)
    return StateVec(N, n, out.reshape(-1))


def _check_same_shape(a: StateVec, b: StateVec):
    if (a.N, a.registers) != (b.N, b.registers):
        raise ValueError(
            f"shape mismatch: (N={a.N}, registers={a.registers}) vs "
            f"(N={b.N}, registers={b.registers})"
        )


def inner_product(a: StateVec, b: StateVec) -> complex:
    """``<a|b>``, conjugate-linear in the first argument."""
    _check_same_shape(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity_up_to_phase(a: StateVec, b: StateVec, raw: bool = False, tol: float = CHECK_TOL) -> float:
    """``|<a|b>|`` for normalized states; ``raw=True`` skips the normalization check."""
    if not raw:
        for s in (a, b):
            if not s.is_normalized(tol):
                raise ValueError(f"state is not normalized (norm {s.norm():.3g}); pass raw=True")
    overlap = abs(inner_product(a, b))
    # rounding can push the overlap of identical states a hair above 1
    return overlap if raw else min(overlap, 1.0)


def tensor(a: StateVec, b: StateVec) -> StateVec:
    if a.N != b.N:
        raise ValueError(f"cannot tensor N={a.N} with N={b.N}")
    return StateVec(a.N, a.registers + b.registers, np.kron(a.amplitudes, b.amplitudes))


def tensor_op(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("tensor_op expects two matrices")
    return np.kron(a, b)


def state_to_json(state: StateVec, **extra) -> dict:
    doc = {
        "N": state.N,
        "registers": state.registers,
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }
    doc.update(extra)
    return doc


def state_from_json(doc: dict) -> StateVec:
    try:
        amps = np.asarray(doc["amplitudes"], dtype=np.float64)
        N, registers = int(doc["N"]), int(doc["registers"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    if amps.ndim != 2 or amps.shape[1] != 2:
        raise ValueError("amplitudes must be a list of [re, im] pairs")
    return StateVec(N, registers, amps[:, 0] + 1j * amps[:, 1])


def save_state(state: StateVec, path, **extra):
    Path(path).write_text(json.dumps(state_to_json(state, **extra), sort_keys=True))


def load_state(path) -> StateVec:
    return state_from_json(json.loads(Path(path).read_text()))
