"""Knill-Laflamme check: ``<i|A^dag B|j> = lambda_AB delta_ij`` over an error list.

An error entry is a ``(ErrorLabel, register)`` pair or a tuple of such pairs
(a product acting on several registers). Entries print as ``R:1@4`` and
``P:0,1@0*P:0,1@3``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import CodeSpec
from .error_model import ErrorLabel, basis_labels
from .tensor import StateVec, apply_local

DEFAULT_TOL = 1e-9
DEFAULT_CHUNK_BYTES = 256 * 2**20


def as_product(entry) -> tuple[tuple[ErrorLabel, int], ...]:
    if len(entry) == 2 and isinstance(entry[0], ErrorLabel):
        return ((entry[0], int(entry[1])),)
    factors = tuple((lab, int(reg)) for lab, reg in entry)
    if not factors:
        raise ValueError("empty error product")
    return factors


def format_entry(entry) -> str:
    return "*".join(f"{lab}@{reg}" for lab, reg in as_product(entry))


def parse_entry(text: str, base_dir=None):
    factors = []
    for part in text.split("*"):
        label, sep, reg = part.strip().rpartition("@")
        if not sep:
            raise ValueError(f"error entry {part!r} is missing '@register'")
        try:
            register = int(reg)
        except ValueError:
            raise ValueError(f"bad register in error entry {part!r}") from None
        factors.append((ErrorLabel.parse(label, base_dir), register))
    return factors[0] if len(factors) == 1 else tuple(factors)


def is_identity(entry) -> bool:
    return all(lab.kind == "I" for lab, _ in as_product(entry))


def apply_error(state: StateVec, entry) -> StateVec:
    for label, register in as_product(entry):
        if not 0 <= register < state.registers:
            raise ValueError(f"register {register} out of range for {state.registers} registers")
        if label.kind != "I":
            state = apply_local(state, label.operator(state.N), register)
    return state


def single_register_error_set(N: int, registers: int) -> list[tuple[ErrorLabel, int]]:
    """Identity plus every ``R_i``, ``P_mn``, ``Q_mn`` on every register."""
    if N < 2:
        raise ValueError(f"N must be >= 2, got {N}")
    nontrivial = basis_labels(N)[1:]
    out = [(ErrorLabel.identity(), 0)]
    for r in range(registers):
        out += [(lab, r) for lab in nontrivial]
    return out


@dataclass
class KLReport:
    error_labels: list
    lam: np.ndarray
    max_offdiag_violation: float
    max_lambda_inconsistency: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return (
            self.max_offdiag_violation <= self.tolerance
            and self.max_lambda_inconsistency <= self.tolerance
        )

    def to_json(self) -> dict:
        return {
            "labels": [format_entry(e) for e in self.error_labels],
            "lambda": [[[float(z.real), float(z.imag)] for z in row] for row in self.lam],
            "max_offdiag_violation": self.max_offdiag_violation,
            "max_lambda_inconsistency": self.max_lambda_inconsistency,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def _images(code: CodeSpec, entries) -> np.ndarray:
    """Array ``[e * K + j] = E_e |j_Enc>`` for a chunk of error entries."""
    rows = []
    for entry in entries:
        for word in code.codewords:
            rows.append(apply_error(word, entry).amplitudes)
    return np.array(rows)


def overlap_tensor(code: CodeSpec, errors, chunk_bytes: int = DEFAULT_CHUNK_BYTES) -> np.ndarray:
    """``M[a, b, i, j] = <i_Enc| A_a^dag B_b |j_Enc>``, built in memory-bounded chunks."""
    K = code.logical_dim
    E = len(errors)
    dim = code.codewords[0].dim
    per_error = K * dim * 16
    chunk = max(1, min(E, chunk_bytes // per_error))
    starts = list(range(0, E, chunk))

    gram = np.zeros((E * K, E * K), dtype=np.complex128)
    for a_pos, a0 in enumerate(starts):
        a1 = min(a0 + chunk, E)
        left = _images(code, errors[a0:a1])
        for b0 in starts[a_pos:]:
            b1 = min(b0 + chunk, E)
            right = left if b0 == a0 else _images(code, errors[b0:b1])
            block = left.conj() @ right.T
            gram[a0 * K:a1 * K, b0 * K:b1 * K] = block
            gram[b0 * K:b1 * K, a0 * K:a1 * K] = block.conj().T
            del right
    return gram.reshape(E, K, E, K).transpose(0, 2, 1, 3)


def kl_check(
    code: CodeSpec,
    errors,
    tolerance: float = DEFAULT_TOL,
    include_identity: bool = True,
    chunk_bytes: int = DEFAULT_CHUNK_BYTES,
) -> KLReport:
    """Evaluate the Knill-Laflamme matrices for every ordered pair of errors.

    ``include_identity`` prepends the no-error entry when the list lacks one,
    since an uncorrupted codeword always has to be handled as well.
    """
    errors = [as_product(e) for e in errors]
    if not errors and not include_identity:
        raise ValueError("empty error list")
    for entry in errors:
        for _, reg in entry:
            if not 0 <= reg < code.physical_registers:
                raise ValueError(
                    f"register {reg} out of range for {code.physical_registers} registers"
                )
    if include_identity and not any(is_identity(e) for e in errors):
        errors.insert(0, ((ErrorLabel.identity(), 0),))
    labels = [e[0] if len(e) == 1 else e for e in errors]

    M = overlap_tensor(code, errors, chunk_bytes)
    K = code.logical_dim
    diag = np.diagonal(M, axis1=2, axis2=3)
    lam = diag.mean(axis=2)
    offdiag = M * (1 - np.eye(K))[None, None]
    return KLReport(
        error_labels=labels,
        lam=lam,
        max_offdiag_violation=float(np.max(np.abs(offdiag))),
        max_lambda_inconsistency=float(np.max(np.abs(diag - lam[..., None]))),
        tolerance=tolerance,
    )
