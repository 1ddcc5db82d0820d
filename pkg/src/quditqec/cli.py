"""Command-line front end: ``quditqec <command> [flags]``.

Every command prints (or writes to ``--out``) one JSON document with sorted
keys. Exit status is 0 when the verdict is positive, 1 when it is negative,
and 2 on bad input, with ``{"error": ...}`` on stdout.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import codes, decoder, error_model, kl
from .tensor import (
    StateVec,
    apply_local,
    basis_state,
    check_dim,
    fidelity_up_to_phase,
    load_state,
    random_matrix,
    random_state,
    random_unitary,
    state_to_json,
)

log = logging.getLogger("quditqec")

DEFAULT_TOL = 1e-9
ERROR_SOURCES = ("basis", "random-matrix", "random-unitary")


class CLIError(Exception):
    pass


def parse_amps(text: str) -> np.ndarray:
    try:
        return np.array([complex(tok.strip().replace(" ", "")) for tok in text.split(",")])
    except ValueError:
        raise CLIError(f"cannot parse amplitudes {text!r}") from None


def logical_from_args(N: int, basis, amps) -> StateVec:
    if (basis is None) == (amps is None):
        raise CLIError("give exactly one of --basis or --amps")
    if basis is not None:
        if not 0 <= basis < N:
            raise CLIError(f"--basis must lie in [0, {N - 1}]")
        return basis_state(N, [basis])
    vec = parse_amps(amps)
    if vec.size != N:
        raise CLIError(f"--amps needs {N} entries, got {vec.size}")
    nrm = np.linalg.norm(vec)
    if nrm < 1e-12:
        raise CLIError("logical amplitudes are all zero")
    if abs(nrm - 1) > 1e-10:
        log.warning("logical amplitudes have norm %.6g; normalizing", nrm)
    return StateVec(N, 1, vec / nrm)


def cmd_encode(args):
    check_dim(args.N, codes.NINE, args.cap)
    logical = logical_from_args(args.N, args.basis, args.amps)
    if args.via == "circuit":
        state = codes.encode_nine_by_circuit(logical, cap=args.cap)
    else:
        state = codes.encode_nine(logical, cap=args.cap)
    return state_to_json(state), True


def cmd_corrupt(args):
    state = load_state(args.state)
    check_dim(state.N, state.registers, args.cap)
    label = error_model.ErrorLabel.parse(args.error, base_dir=Path.cwd())
    if not 0 <= args.reg < state.registers:
        raise CLIError(f"--reg {args.reg} out of range for {state.registers} registers")
    if label.kind == "I":
        return state_to_json(state, metadata={"error": str(label), "register": args.reg}), True
    out = apply_local(state, label.operator(state.N), args.reg)
    norm = out.norm()
    meta = {"error": str(label), "register": args.reg, "pre_normalization_norm": norm}
    if norm < 1e-12:
        raise CLIError(f"error {label} annihilates the state (norm {norm:.3g})")
    if abs(norm - 1) > 1e-12:
        out = out.normalized()
    return state_to_json(out, metadata=meta), True


def _reference(args, N):
    if args.reference:
        ref = load_state(args.reference)
        if ref.registers != 1 or ref.N != N:
            raise CLIError("reference must be a single-register state with matching N")
        return ref
    if args.ref_basis is not None or args.ref_amps is not None:
        return logical_from_args(N, args.ref_basis, args.ref_amps)
    return None


def cmd_recover(args):
    state = load_state(args.state)
    check_dim(state.N, state.registers, args.cap)
    reference = _reference(args, state.N)
    if not state.is_normalized():
        log.warning("input state has norm %.6g; normalizing", state.norm())
        state = state.normalized()
    outcomes = decoder.recover(state, mode=args.mode, seed=args.seed, reference=reference)
    if args.mode == "sample":
        outcomes = [outcomes]
    ok = all(
        not o.syndrome.uncorrectable
        and (o.fidelity_vs_reference is None or o.fidelity_vs_reference >= 1 - args.tol)
        for o in outcomes
    )
    doc = {
        "N": state.N,
        "mode": args.mode,
        "branches": [o.to_json(verbose=args.verbose) for o in outcomes],
        "correctable": ok,
    }
    return doc, ok


def _error_set(args, N):
    spec = args.errors
    if spec == "single-register":
        return kl.single_register_error_set(N, codes.NINE)
    if spec.startswith("@"):
        path = Path(spec[1:])
        entries = json.loads(path.read_text())
        return [kl.parse_entry(text, base_dir=path.parent) for text in entries]
    raise CLIError(f"--errors must be 'single-register' or '@file.json', got {spec!r}")


def cmd_verify_kl(args):
    check_dim(args.N, codes.NINE, args.cap)
    errors = _error_set(args, args.N)
    code = codes.build_nine_code(args.N, cap=args.cap)
    report = kl.kl_check(code, errors, tolerance=args.tol)
    doc = report.to_json()
    doc["N"] = args.N
    doc["count"] = len(report.error_labels)
    return doc, report.passed


def cmd_group(args):
    elements, order = error_model.generate_group(args.N, max_order=args.max_order)
    signed = all(error_model.is_signed_permutation(g) for g in elements)
    return {
        "N": args.N,
        "order": order,
        "quotient_order": order // 2,
        "is_signed_permutation_group": signed,
    }, signed


def cmd_bound(args):
    rows = [codes.dimension_bound(args.N, n) for n in range(1, args.max_n + 1)]
    minimal = next((r["n"] for r in rows if r["satisfied"]), None)
    return {"N": args.N, "rows": rows, "minimal_n": minimal}, True


def random_error(N: int, source: str, rng: np.random.Generator):
    if source == "basis":
        labels = error_model.basis_labels(N)[1:]
        label = labels[int(rng.integers(len(labels)))]
        return str(label), label.operator(N)
    if source == "random-matrix":
        return "random-matrix", random_matrix(N, rng)
    if source == "random-unitary":
        return "random-unitary", random_unitary(N, rng)
    raise CLIError(f"unknown error source {source!r}")


def roundtrip(N: int, trials: int, seed: int, source: str, tol: float = DEFAULT_TOL, cap=None) -> dict:
    """Encode, corrupt one random register, recover by sampling; one substream per trial."""
    if trials < 1:
        raise CLIError("--trials must be >= 1")
    code = codes.build_nine_code(N, cap=cap)
    fidelities, failures = [], []
    for t, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        logical = random_state(N, 1, rng)
        register = int(rng.integers(codes.NINE))
        name, op = random_error(N, source, rng)
        corrupted = apply_local(code.encode(logical), op, register)
        if corrupted.norm() < 1e-12:
            failures.append({"trial": t, "reason": "error annihilated the state"})
            continue
        outcome = decoder.recover(corrupted.normalized(), mode="sample", rng=rng)
        if outcome.syndrome.uncorrectable:
            failures.append({"trial": t, "error": name, "register": register, "reason": "uncorrectable"})
            continue
        fid = fidelity_up_to_phase(outcome.logical_state, logical)
        fidelities.append(fid)
        if fid < 1 - tol:
            failures.append({"trial": t, "error": name, "register": register, "fidelity": fid})
    return {
        "N": N,
        "seed": seed,
        "error_source": source,
        "trials": trials,
        "min_fidelity": min(fidelities) if fidelities else None,
        "mean_fidelity": float(np.mean(fidelities)) if fidelities else None,
        "failures": len(failures),
        "failed_trials": failures,
    }


def cmd_roundtrip(args):
    check_dim(args.N, codes.NINE, args.cap)
    doc = roundtrip(args.N, args.trials, args.seed, args.error_source, args.tol, args.cap)
    return doc, doc["failures"] == 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=2, help="levels per register")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--cap", type=int, default=None, help="max amplitudes (default $QECC_CAP or 2e6)")
    common.add_argument("--out", default=None, help="write JSON here instead of stdout")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="quditqec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", parents=[common], help="encode a logical state into nine registers")
    p.add_argument("--basis", type=int)
    p.add_argument("--amps", help="comma-separated complex amplitudes, e.g. 1,0.5j")
    p.add_argument("--via", choices=("formula", "circuit"), default="formula")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("corrupt", parents=[common], help="apply an error to one register")
    p.add_argument("state")
    p.add_argument("--error", required=True, help="I, R:i, P:m,n, Q:m,n or custom:@file.json")
    p.add_argument("--reg", type=int, required=True)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("recover", parents=[common], help="measure syndromes and decode")
    p.add_argument("state")
    p.add_argument("--mode", choices=("enumerate", "sample"), default="enumerate")
    p.add_argument("--reference", help="single-register state file to compare against")
    p.add_argument("--ref-basis", type=int)
    p.add_argument("--ref-amps")
    p.add_argument("--verbose", action="store_true", help="include amplitudes")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("verify-kl", parents=[common], help="check the Knill-Laflamme conditions")
    p.add_argument("--errors", default="single-register", help="'single-register' or @list.json")
    p.set_defaults(func=cmd_verify_kl)

    p = sub.add_parser("group", parents=[common], help="enumerate the generated error group")
    p.add_argument("--max-order", type=int, default=error_model.DEFAULT_MAX_ORDER)
    p.set_defaults(func=cmd_group)

    p = sub.add_parser("bound", parents=[common], help="tabulate the counting bound")
    p.add_argument("--max-n", type=int, default=12)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("roundtrip", parents=[common], help="Monte Carlo encode/corrupt/recover")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--error-source", choices=ERROR_SOURCES, default="basis")
    p.set_defaults(func=cmd_roundtrip)
    return parser


def emit(doc: dict, out, indent=None):
    text = json.dumps(doc, sort_keys=True, indent=indent)
    if out:
        Path(out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        doc, ok = args.func(args)
    except (CLIError, ValueError, OSError) as exc:
        emit({"error": str(exc), "command": args.command}, None)
        return 2
    state_like = args.command in ("encode", "corrupt")
    emit(doc, args.out, indent=None if state_like else 2)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
