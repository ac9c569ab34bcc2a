"""``sppf`` command line: synth, verify, generate, bench.

Exit codes: 0 success or verification pass, 1 verification fail, 2 bad input,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import bench
from .circuit import ParseError, parse, to_json, to_qasm
from .oracle import circuit_unitary, equiv_up_to_phase, verify_synthesis
from .pauli import format_exponential, parse_exponential
from .synth import MAPPING_MODES, synthesize
from .topology import TopologyError, load_topology

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2, 3
SELF_CHECK_MAX_QUBITS = 6

log = logging.getLogger("sppf")


class InputError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _json_field(path: str, key: str):
    """Load ``path`` as JSON; if it is an object carrying ``key`` (a stats file), return that."""
    try:
        data = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if isinstance(data, dict) and key in data:
        return data[key]
    return data


def cmd_synth(args) -> int:
    e = parse_exponential(_read(args.input))
    g = load_topology(args.topology)
    if e.n_qubits > g.n_qubits:
        raise InputError(f"{e.n_qubits} logical qubits exceed {g.n_qubits} physical qubits on {g.name}")
    with warnings.catch_warnings():
        if args.allow_reorder:
            warnings.simplefilter("ignore")
        circuit, stats = synthesize(
            e, g, mapping_mode=args.mapping, seed=args.seed, allow_reorder=args.allow_reorder
        )
    text = to_qasm(circuit) if args.format == "qasm" else to_json(circuit)
    _write(args.output, text)
    if args.stats:
        Path(args.stats).write_text(stats.to_json(timing=not args.no_timing) + "\n")

    if args.self_check:
        active = set(stats.mapping.values()) | {q for gate in circuit.gates for q in gate.qubits}
        if len(active) > SELF_CHECK_MAX_QUBITS:
            log.warning("self-check skipped: %d active qubits > %d", len(active), SELF_CHECK_MAX_QUBITS)
        elif not verify_synthesis(e, circuit, stats.mapping, stats.gadget_order):
            print("self-check FAILED: circuit does not match the exponential", file=sys.stderr)
            return EXIT_INVARIANT
        else:
            log.info("self-check passed")
    return EXIT_OK


def cmd_verify(args) -> int:
    e = parse_exponential(_read(args.input), allow_empty=True) if args.input else None
    if e is not None and not e.gadgets:
        e = None
    text = _read(args.circuit)
    circuit = parse(text)
    mapping = None
    if args.mapping:
        raw = _json_field(args.mapping, "mapping")
        if not isinstance(raw, dict):
            raise InputError(f"{args.mapping}: mapping must be a JSON object")
        mapping = {int(k): int(v) for k, v in raw.items()}
    order = None
    if args.order:
        order = _json_field(args.order, "gadget_order")
        if not isinstance(order, list):
            raise InputError(f"{args.order}: order must be a JSON list")
    if e is None:
        # empty exponential: the circuit must be the identity
        ok = not circuit.gates or equiv_up_to_phase(
            circuit_unitary(circuit), np.eye(2**circuit.n_qubits), args.tol
        )
    else:
        ok = verify_synthesis(e, circuit, mapping, order, args.tol)
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_generate(args) -> int:
    e = bench.random_exponential(args.qubits, args.gadgets, args.seed)
    _write(args.output, format_exponential(e))
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = bench.BenchConfig(
        topology=args.topology,
        min_gadgets=args.min_gadgets,
        max_gadgets=args.max_gadgets,
        step=args.step,
        samples=args.samples,
        seed=args.seed,
        modes=tuple(args.modes.split(",")),
        output=args.output,
        n_qubits=args.qubits,
        timeout_s=args.timeout,
        timing=not args.no_timing,
    )
    try:
        rows = bench.run_bench(cfg)
    except bench.BenchTimeout as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    fmt = args.format or ("json" if (args.output or "").endswith(".json") else "csv")
    _write(args.output, bench.format_rows(rows, fmt))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sppf", description="Architecture-aware Pauli exponential compiler")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="compile an exponential for a topology")
    s.add_argument("--input", required=True, help="exponential file ('-' for stdin)")
    s.add_argument("--topology", required=True, help="line:N, grid:RxC, complete:N, device name or edge-list file")
    s.add_argument("--mapping", choices=MAPPING_MODES, default="sppf")
    s.add_argument("--seed", type=int, default=0, help="seed for --mapping random")
    s.add_argument("--output", help="circuit output path (stdout if omitted)")
    s.add_argument("--format", choices=("qasm", "json"), default="qasm")
    s.add_argument("--stats", help="write stats JSON here")
    s.add_argument("--allow-reorder", action="store_true", help="accept non-commuting gadgets")
    s.add_argument("--self-check", action="store_true", help="verify the result with the dense oracle")
    s.add_argument("--no-timing", action="store_true", help="write runtime_ms as null")
    s.set_defaults(func=cmd_synth)

    v = sub.add_parser("verify", parents=[common], help="check a circuit against an exponential")
    v.add_argument("--input", help="exponential file (omit for the empty exponential)")
    v.add_argument("--circuit", required=True)
    v.add_argument("--mapping", help="mapping JSON or stats file")
    v.add_argument("--order", help="gadget order JSON or stats file")
    v.add_argument("--tol", type=float, default=1e-9)
    v.set_defaults(func=cmd_verify)

    gen = sub.add_parser("generate", parents=[common], help="write a random exponential")
    gen.add_argument("--qubits", type=int, required=True)
    gen.add_argument("--gadgets", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output")
    gen.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", parents=[common], help="sweep gadget counts and compare mapping modes")
    b.add_argument("--topology", required=True)
    b.add_argument("--min-gadgets", type=int, default=2)
    b.add_argument("--max-gadgets", type=int, default=20)
    b.add_argument("--step", type=int, default=2)
    b.add_argument("--samples", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--modes", default="sppf,random", help="comma-separated mapping modes")
    b.add_argument("--qubits", type=int, help="logical qubits (default: topology size)")
    b.add_argument("--timeout", type=float, help="per-sample limit in seconds")
    b.add_argument("--output")
    b.add_argument("--format", choices=("csv", "json"))
    b.add_argument("--no-timing", action="store_true", help="leave mean_runtime_ms empty")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, ParseError, TopologyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except AssertionError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
