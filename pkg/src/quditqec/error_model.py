"""Single-register error operators, their decomposition, and the group they generate.

``R_i`` negates level ``i``; ``P_mn`` swaps levels ``m`` and ``n``; ``Q_mn``
has ``+1`` at row ``m`` column ``n`` and ``-1`` at row ``n`` column ``m``.
Together with the identity, ``{R_i}`` and ``{P_mn, Q_mn : m < n}`` are ``N**2``
linearly independent matrices, so every ``N x N`` matrix has a unique expansion.
"""

from __future__ import annotations

import json
import math
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

DEFAULT_MAX_ORDER = 10_000

KINDS = ("I", "R", "P", "Q", "custom")


def make_R(i: int, N: int) -> np.ndarray:
    if not 1 <= i <= N - 1:
        raise ValueError(f"R index must lie in [1, {N - 1}], got {i}")
    op = np.eye(N, dtype=np.complex128)
    op[i, i] = -1.0
    return op


def _check_pair(m: int, n: int, N: int):
    if not 0 <= m < n <= N - 1:
        raise ValueError(f"need 0 <= m < n <= {N - 1}, got m={m}, n={n}")


def make_P(m: int, n: int, N: int) -> np.ndarray:
    _check_pair(m, n, N)
    op = np.eye(N, dtype=np.complex128)
    op[[m, n], [m, n]] = 0.0
    op[m, n] = op[n, m] = 1.0
    return op


def make_Q(m: int, n: int, N: int) -> np.ndarray:
    _check_pair(m, n, N)
    op = np.eye(N, dtype=np.complex128)
    op[[m, n], [m, n]] = 0.0
    op[m, n] = 1.0
    op[n, m] = -1.0
    return op


def shift_op(delta: int, N: int) -> np.ndarray:
    """Modular shift ``|v> -> |v + delta mod N>``."""
    op = np.zeros((N, N), dtype=np.complex128)
    v = np.arange(N)
    op[(v + delta) % N, v] = 1.0
    return op


@dataclass(frozen=True)
class ErrorLabel:
    """Name of a single-register error: ``I``, ``R:i``, ``P:m,n``, ``Q:m,n`` or a custom matrix."""

    kind: str
    indices: tuple[int, ...] = ()
    matrix: np.ndarray | None = field(default=None, compare=False, repr=False)
    source: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown error kind {self.kind!r}")
        expected = {"I": 0, "R": 1, "P": 2, "Q": 2, "custom": 0}[self.kind]
        if len(self.indices) != expected:
            raise ValueError(f"{self.kind} takes {expected} indices, got {self.indices}")
        if self.kind in ("P", "Q") and not self.indices[0] < self.indices[1]:
            raise ValueError(f"{self.kind} indices must satisfy m < n, got {self.indices}")
        if self.kind == "R" and self.indices[0] < 1:
            raise ValueError(f"R index must be >= 1, got {self.indices[0]}")
        if self.kind == "custom":
            if self.matrix is None:
                raise ValueError("custom error needs a matrix")
            mat = np.array(self.matrix, dtype=np.complex128)
            if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
                raise ValueError(f"custom error must be a square matrix, got shape {mat.shape}")
            if not np.any(mat):
                raise ValueError("custom error matrix is zero")
            mat.flags.writeable = False
            object.__setattr__(self, "matrix", mat)

    def operator(self, N: int) -> np.ndarray:
        if self.kind == "I":
            return np.eye(N, dtype=np.complex128)
        if self.kind == "R":
            return make_R(self.indices[0], N)
        if self.kind == "P":
            return make_P(*self.indices, N)
        if self.kind == "Q":
            return make_Q(*self.indices, N)
        if self.matrix.shape != (N, N):
            raise ValueError(f"custom matrix has shape {self.matrix.shape}, expected ({N}, {N})")
        return np.array(self.matrix)

    def __str__(self):
        if self.kind == "I":
            return "I"
        if self.kind == "custom":
            return f"custom:@{self.source}" if self.source else "custom"
        return f"{self.kind}:" + ",".join(str(i) for i in self.indices)

    @classmethod
    def identity(cls) -> ErrorLabel:
        return cls("I")

    @classmethod
    def custom(cls, matrix, source: str | None = None) -> ErrorLabel:
        return cls("custom", (), np.asarray(matrix), source)

    @classmethod
    def parse(cls, text: str, base_dir=None) -> ErrorLabel:
        """Parse ``I``, ``R:i``, ``P:m,n``, ``Q:m,n`` or ``custom:@file.json``."""
        text = text.strip()
        if text == "I":
            return cls("I")
        if text.startswith("custom:@"):
            source = text[len("custom:@"):]
            path = Path(source)
            if base_dir is not None and not path.is_absolute():
                path = Path(base_dir) / path
            return cls.custom(load_matrix(path), source)
        kind, sep, rest = text.partition(":")
        if not sep or kind not in ("R", "P", "Q"):
            raise ValueError(f"cannot parse error label {text!r}")
        try:
            indices = tuple(int(tok) for tok in rest.split(","))
        except ValueError:
            raise ValueError(f"cannot parse error label {text!r}") from None
        return cls(kind, indices)


def load_matrix(path) -> np.ndarray:
    """Read an N x N complex matrix stored as ``[[[re, im], ...], ...]``."""
    raw = np.asarray(json.loads(Path(path).read_text()), dtype=np.float64)
    if raw.ndim != 3 or raw.shape[2] != 2 or raw.shape[0] != raw.shape[1]:
        raise ValueError(f"{path}: expected an N x N matrix of [re, im] pairs")
    return raw[..., 0] + 1j * raw[..., 1]


def matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def pairs(N: int):
    return [(m, n) for m in range(N) for n in range(m + 1, N)]


def basis_labels(N: int) -> list[ErrorLabel]:
    """``I``, then ``R_1..R_{N-1}``, then ``P_mn`` and ``Q_mn`` for every ``m < n``."""
    labels = [ErrorLabel.identity()]
    labels += [ErrorLabel("R", (i,)) for i in range(1, N)]
    for m, n in pairs(N):
        labels += [ErrorLabel("P", (m, n)), ErrorLabel("Q", (m, n))]
    return labels


@dataclass
class Decomposition:
    """Coefficients of a matrix over ``{I, R_i, P_mn, Q_mn}``; ``beta[i-1]`` multiplies ``R_i``."""

    N: int
    alpha: complex
    beta: np.ndarray
    gamma: dict[tuple[int, int], complex]
    delta: dict[tuple[int, int], complex]

    def reconstruct(self) -> np.ndarray:
        N = self.N
        out = self.alpha * np.eye(N, dtype=np.complex128)
        for i, b in enumerate(self.beta, start=1):
            out += b * make_R(i, N)
        for (m, n), g in self.gamma.items():
            out += g * make_P(m, n, N)
        for (m, n), d in self.delta.items():
            out += d * make_Q(m, n, N)
        return out

    def terms(self):
        """``(ErrorLabel, coefficient)`` pairs for the nonzero coefficients."""
        out = []
        if self.alpha != 0:
            out.append((ErrorLabel.identity(), self.alpha))
        out += [(ErrorLabel("R", (i,)), b) for i, b in enumerate(self.beta, 1) if b != 0]
        for mn in sorted(self.gamma):
            if self.gamma[mn] != 0:
                out.append((ErrorLabel("P", mn), self.gamma[mn]))
            if self.delta[mn] != 0:
                out.append((ErrorLabel("Q", mn), self.delta[mn]))
        return out


def decompose(E: np.ndarray) -> Decomposition:
    E = np.asarray(E, dtype=np.complex128)
    if E.ndim != 2 or E.shape[0] != E.shape[1] or E.shape[0] < 2:
        raise ValueError(f"expected a square matrix of size >= 2, got shape {E.shape}")
    if not np.any(E):
        raise ValueError("cannot decompose the zero matrix")
    N = E.shape[0]

    gamma, delta = {}, {}
    for m, n in pairs(N):
        gamma[m, n] = (E[m, n] + E[n, m]) / 2
        delta[m, n] = (E[m, n] - E[n, m]) / 2

    # P_mn and Q_mn both carry 1 on every diagonal slot except m and n.
    diag = np.diag(E).copy()
    for m, n in pairs(N):
        off = np.ones(N)
        off[[m, n]] = 0
        diag -= (gamma[m, n] + delta[m, n]) * off

    # Columns: diagonals of I, R_1, ..., R_{N-1}.
    system = np.ones((N, N))
    for i in range(1, N):
        system[i, i] = -1.0
    coeffs = np.linalg.solve(system, diag)
    return Decomposition(N, complex(coeffs[0]), coeffs[1:], gamma, delta)


def basis_rank(N: int) -> int:
    stacked = np.array([lab.operator(N).reshape(-1) for lab in basis_labels(N)])
    return int(np.linalg.matrix_rank(stacked))


def generators(N: int) -> list[np.ndarray]:
    gens = [make_R(i, N) for i in range(1, N)]
    gens += [make_P(0, n, N) for n in range(1, N)]
    return gens


def projected_order(N: int) -> int:
    return 2**N * math.factorial(N)


def generate_group(N: int, max_order: int = DEFAULT_MAX_ORDER):
    """Close ``{R_1..R_{N-1}, P_01..P_0,N-1}`` under multiplication.

    Returns ``(elements, order)``; elements are integer matrices with entries
    in ``{-1, 0, 1}``, so deduplication is exact.
    """
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    bound = projected_order(N)
    if bound > max_order:
        raise ValueError(f"projected group order 2**{N} * {N}! = {bound} exceeds max_order {max_order}")

    gens = [g.real.astype(np.int64) for g in generators(N)]
    identity = np.eye(N, dtype=np.int64)
    seen = {identity.tobytes(): identity}
    queue = deque([identity])
    while queue:
        elem = queue.popleft()
        for g in gens:
            prod = g @ elem
            key = prod.tobytes()
            if key not in seen:
                if len(seen) >= max_order:
                    raise ValueError(f"closure exceeded max_order {max_order}")
                seen[key] = prod
                queue.append(prod)
    elements = list(seen.values())
    return elements, len(elements)


def is_signed_permutation(mat: np.ndarray) -> bool:
    mat = np.asarray(mat)
    if not np.all(np.isin(mat, (-1, 0, 1))):
        return False
    nonzero = mat != 0
    return bool(np.all(nonzero.sum(axis=0) == 1) and np.all(nonzero.sum(axis=1) == 1))
