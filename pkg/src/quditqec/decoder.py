"""Syndrome measurement and recovery for the nine-register code.

Recovery runs in three stages:

1. For each block, measure the digit differences of registers 1 and 2 against
   register 0 and shift the one deviant register back.
2. Undo the block copies and the lead-register DFTs, then measure the same
   differences between the lead registers 0, 3, 6 and shift the deviant lead.
   A single-register diagonal error (anything in span{I, R_i}, including the
   projector left behind by stage 1) shows up here as a lead offset.
3. Undo the lead copies and read the logical state off register 0.

Measurements partition basis indices directly; no ancillas are simulated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .codes import BLOCKS, LEADS, NINE, copy_stage, dft_gate, encode_nine
from .error_model import shift_op
from .tensor import (
    CHECK_TOL,
    StateVec,
    apply_local,
    fidelity_up_to_phase,
    register_digits,
    state_to_json,
)

BRANCH_CUTOFF = 1e-12


class UncorrectableSyndrome(ValueError):
    """The measured difference pair points at two deviant registers."""


@dataclass
class SyndromeRecord:
    flip_syndromes: list = field(default_factory=lambda: [None, None, None])
    flip_corrections: list = field(default_factory=lambda: [None, None, None])
    phase_syndrome: tuple | None = None
    phase_correction: tuple | None = None
    branch_probability: float = 1.0
    uncorrectable: bool = False

    def copy(self) -> SyndromeRecord:
        return SyndromeRecord(
            list(self.flip_syndromes),
            list(self.flip_corrections),
            self.phase_syndrome,
            self.phase_correction,
            self.branch_probability,
            self.uncorrectable,
        )

    def to_json(self) -> dict:
        def pair(x):
            return None if x is None else [int(v) for v in x]

        return {
            "flip_syndromes": [pair(s) for s in self.flip_syndromes],
            "flip_corrections": [pair(c) for c in self.flip_corrections],
            "phase_syndrome": pair(self.phase_syndrome),
            "phase_correction": pair(self.phase_correction),
            "branch_probability": float(self.branch_probability),
            "uncorrectable": self.uncorrectable,
        }


@dataclass
class RecoveryOutcome:
    logical_state: StateVec | None
    syndrome: SyndromeRecord
    reencoded_state: StateVec | None = None
    fidelity_vs_reference: float | None = None

    def to_json(self, verbose: bool = False) -> dict:
        doc = {
            "syndrome": self.syndrome.to_json(),
            "fidelity": self.fidelity_vs_reference,
            "uncorrectable": self.syndrome.uncorrectable,
        }
        if verbose:
            doc["logical_state"] = None if self.logical_state is None else state_to_json(self.logical_state)
            if self.reencoded_state is not None:
                doc["reencoded_state"] = state_to_json(self.reencoded_state)
        return doc


def is_correctable(outcome) -> bool:
    d1, d2 = outcome
    return d1 == 0 or d2 == 0 or d1 == d2


def correction_for(outcome, registers, N: int):
    """``(register, shift)`` undoing a single deviant register, ``None`` for a clean outcome."""
    d1, d2 = (int(v) % N for v in outcome)
    r0, r1, r2 = registers
    if d1 == 0 and d2 == 0:
        return None
    if d1 == d2:
        return (r0, d1)
    if d2 == 0:
        return (r1, (-d1) % N)
    if d1 == 0:
        return (r2, (-d2) % N)
    raise UncorrectableSyndrome(f"difference pair {(d1, d2)} on registers {registers} has two deviants")


def _rng(mode, seed, rng):
    if mode not in ("sample", "enumerate"):
        raise ValueError(f"mode must be 'sample' or 'enumerate', got {mode!r}")
    if mode == "sample" and rng is None:
        rng = np.random.default_rng(seed)
    return rng


def measure_differences(state: StateVec, registers, mode: str = "enumerate", seed=None, rng=None):
    """Projectively measure ``((v1 - v0) mod N, (v2 - v0) mod N)`` on three registers.

    Returns ``[(outcome, probability, post_state), ...]``: every branch above
    the cutoff in enumerate mode, one sampled branch in sample mode.
    """
    rng = _rng(mode, seed, rng)
    N = state.N
    digits = register_digits(N, state.registers)
    r0, r1, r2 = registers
    labels = ((digits[r1] - digits[r0]) % N) * N + (digits[r2] - digits[r0]) % N
    weights = np.abs(state.amplitudes) ** 2
    probs = np.bincount(labels, weights=weights, minlength=N * N)
    total = probs.sum()
    if total < BRANCH_CUTOFF:
        raise ValueError("cannot measure a zero state")
    probs = probs / total

    if mode == "sample":
        candidates = [int(rng.choice(N * N, p=probs))]
    else:
        candidates = [int(s) for s in np.flatnonzero(probs > BRANCH_CUTOFF)]

    branches = []
    for sector in candidates:
        mask = labels == sector
        post = np.where(mask, state.amplitudes, 0) / np.sqrt(probs[sector] * total)
        branches.append(((sector // N, sector % N), float(probs[sector]), StateVec(N, state.registers, post)))
    return branches


def measure_flip_syndrome(state: StateVec, block: int, mode: str = "enumerate", seed=None, rng=None):
    if block not in (0, 1, 2):
        raise ValueError(f"block must be 0, 1 or 2, got {block}")
    _check_nine(state)
    return measure_differences(state, BLOCKS[block], mode, seed, rng)


def _shift(state: StateVec, correction) -> StateVec:
    if correction is None:
        return state
    register, delta = correction
    return apply_local(state, shift_op(delta, state.N), register)


def correct_flip(state: StateVec, block: int, outcome) -> StateVec:
    """Shift the deviant register of ``block``; raises ``UncorrectableSyndrome`` for two deviants."""
    return _shift(state, correction_for(outcome, BLOCKS[block], state.N))


def to_lead_frame(state: StateVec) -> StateVec:
    """Undo the in-block copies and the lead DFTs: ``|kkk ppp qqq>`` basis to lead values."""
    for lead, *rest in BLOCKS:
        state = copy_stage(state, lead, rest, inverse=True)
    Finv = dft_gate(state.N).conj().T
    for lead in LEADS:
        state = apply_local(state, Finv, lead)
    return state


def measure_and_correct_phase(state: StateVec, mode: str = "enumerate", seed=None, rng=None):
    """Phase stage on a flip-corrected state.

    Returns ``[(post_state, outcome, correction, probability), ...]``; post
    states are in the lead frame. ``correction`` is ``"uncorrectable"`` when
    the outcome has two deviant leads, in which case the state is left as
    measured.
    """
    _check_nine(state)
    framed = to_lead_frame(state)
    out = []
    for outcome, prob, post in measure_differences(framed, LEADS, mode, seed, rng):
        if not is_correctable(outcome):
            out.append((post, outcome, "uncorrectable", prob))
            continue
        corr = correction_for(outcome, LEADS, state.N)
        out.append((_shift(post, corr), outcome, corr, prob))
    return out


def read_logical(state: StateVec) -> StateVec:
    """Undo the lead copies and return register 0 (the rest should be ``|0...0>``)."""
    state = copy_stage(state, 0, (3, 6), inverse=True)
    N = state.N
    amps = state.amplitudes.reshape(N, -1)[:, 0]
    nrm = np.linalg.norm(amps)
    if nrm < BRANCH_CUTOFF:
        raise ValueError("decoded state has no weight on the |0...0> ancilla pattern")
    return StateVec(N, 1, amps / nrm)


def _check_nine(state: StateVec):
    if state.registers != NINE:
        raise ValueError(f"expected a nine-register state, got {state.registers} registers")


def _finish(state, record, reference, reencode):
    logical = read_logical(state)
    fid = None if reference is None else fidelity_up_to_phase(logical, reference)
    again = encode_nine(logical) if reencode else None
    return RecoveryOutcome(logical, record, again, fid)


def recover(
    state: StateVec,
    mode: str = "enumerate",
    seed=None,
    reference: StateVec | None = None,
    reencode: bool = False,
    rng=None,
):
    """Run the full recovery.

    Enumerate mode returns a list of ``RecoveryOutcome`` (one per branch);
    sample mode returns a single outcome drawn with ``rng`` or ``seed``.
    """
    _check_nine(state)
    if not state.is_normalized(CHECK_TOL):
        raise ValueError(f"recover expects a normalized state (norm {state.norm():.6g})")
    if reference is not None and (reference.registers != 1 or reference.N != state.N):
        raise ValueError("reference must be a single register with the same N")
    rng = _rng(mode, seed, rng)

    outcomes = []
    # Depth-first over measurement branches: (state, record, next block).
    stack = [(state, SyndromeRecord(), 0)]
    while stack:
        current, record, block = stack.pop()
        if block < 3:
            branches = measure_flip_syndrome(current, block, mode, rng=rng)
            for outcome, prob, post in reversed(branches):
                rec = record.copy()
                rec.flip_syndromes[block] = outcome
                rec.branch_probability *= prob
                if not is_correctable(outcome):
                    rec.uncorrectable = True
                    outcomes.append((rec.branch_probability, RecoveryOutcome(None, rec)))
                    continue
                rec.flip_corrections[block] = correction_for(outcome, BLOCKS[block], state.N)
                stack.append((_shift(post, rec.flip_corrections[block]), rec, block + 1))
            continue

        for post, outcome, corr, prob in measure_and_correct_phase(current, mode, rng=rng):
            rec = record.copy()
            rec.phase_syndrome = outcome
            rec.branch_probability *= prob
            if corr == "uncorrectable":
                rec.uncorrectable = True
                outcomes.append((rec.branch_probability, RecoveryOutcome(None, rec)))
                continue
            rec.phase_correction = corr
            outcomes.append((rec.branch_probability, _finish(post, rec, reference, reencode)))

    results = [o for _, o in outcomes]
    if mode == "sample":
        return results[0]
    return results
