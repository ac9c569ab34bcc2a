"""Gate-level circuit representation over {V, Vdg, S, Sdg, CNOT, Rz}."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

CLIFFORD_KINDS = ("V", "Vdg", "S", "Sdg", "CNOT")
KINDS = CLIFFORD_KINDS + ("Rz",)

_INVERSE = {"V": "Vdg", "Vdg": "V", "S": "Sdg", "Sdg": "S", "CNOT": "CNOT", "Rz": "Rz"}
_QASM_NAME = {"V": "sx", "Vdg": "sxdg", "S": "s", "Sdg": "sdg", "CNOT": "cx", "Rz": "rz"}
_FROM_QASM = {v: k for k, v in _QASM_NAME.items()}


class ParseError(ValueError):
    """Malformed circuit text. Carries 1-based line/column of the offending token."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        arity = 2 if self.kind == "CNOT" else 1
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"CNOT needs distinct qubits, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.qubits}")
        if (self.kind == "Rz") != (self.angle is not None):
            raise ValueError("angle must be given for Rz and only for Rz")
        if self.angle is not None:
            object.__setattr__(self, "angle", float(self.angle))

    @property
    def is_clifford(self) -> bool:
        return self.kind != "Rz"

    def inverse(self) -> Gate:
        angle = None if self.angle is None else -self.angle
        return Gate(_INVERSE[self.kind], self.qubits, angle)

    def relabel(self, mapping: Sequence[int] | dict[int, int]) -> Gate:
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.angle)

    def __repr__(self) -> str:
        args = ",".join(map(str, self.qubits))
        if self.angle is None:
            return f"{self.kind}({args})"
        return f"{self.kind}[{self.angle!r}]({args})"


def V(q: int) -> Gate:
    return Gate("V", (q,))


def Vdg(q: int) -> Gate:
    return Gate("Vdg", (q,))


def S(q: int) -> Gate:
    return Gate("S", (q,))


def Sdg(q: int) -> Gate:
    return Gate("Sdg", (q,))


def CNOT(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def Rz(q: int, theta: float) -> Gate:
    return Gate("Rz", (q,), theta)


@dataclass
class Circuit:
    n_qubits: int
    gates: list[Gate] = field(default_factory=list)

    def __post_init__(self):
        self.gates = list(self.gates)
        for g in self.gates:
            self._check(g)

    def _check(self, gate: Gate) -> None:
        if max(gate.qubits) >= self.n_qubits:
            raise ValueError(f"{gate!r} out of range for {self.n_qubits} qubits")

    def append(self, gate: Gate) -> None:
        self._check(gate)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        return Circuit(max(self.n_qubits, other.n_qubits), self.gates + other.gates)

    @property
    def is_clifford(self) -> bool:
        return all(g.is_clifford for g in self.gates)

    def cnots(self) -> list[tuple[int, int]]:
        return [g.qubits for g in self.gates if g.kind == "CNOT"]

    def relabel(self, mapping: Sequence[int] | dict[int, int], n_qubits: int) -> Circuit:
        return Circuit(n_qubits, [g.relabel(mapping) for g in self.gates])


def cnot_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind == "CNOT")


def cnot_depth(circuit: Circuit) -> int:
    """Number of ASAP layers of the CNOT-only subcircuit.

    Single-qubit gates are ignored; two CNOTs conflict iff they share a qubit.
    """
    level: dict[int, int] = {}
    depth = 0
    for g in circuit.gates:
        if g.kind != "CNOT":
            continue
        a, b = g.qubits
        layer = max(level.get(a, 0), level.get(b, 0)) + 1
        level[a] = level[b] = layer
        depth = max(depth, layer)
    return depth


def adjoint(circuit: Circuit) -> Circuit:
    return Circuit(circuit.n_qubits, [g.inverse() for g in reversed(circuit.gates)])


# -- serialization -----------------------------------------------------------

def _fmt_angle(theta: float) -> str:
    return "%.17g" % theta


def to_qasm(circuit: Circuit) -> str:
    lines = ["OPENQASM 2.0;", f"qreg q[{circuit.n_qubits}];"]
    for g in circuit.gates:
        args = ",".join(f"q[{q}]" for q in g.qubits)
        name = _QASM_NAME[g.kind]
        if g.kind == "Rz":
            name = f"rz({_fmt_angle(g.angle)})"
        lines.append(f"{name} {args};")
    return "\n".join(lines) + "\n"


def to_json(circuit: Circuit) -> str:
    gates = []
    for g in circuit.gates:
        entry = {"kind": g.kind, "qubits": list(g.qubits)}
        if g.angle is not None:
            entry["angle"] = g.angle
        gates.append(entry)
    return json.dumps({"n": circuit.n_qubits, "gates": gates})


_QREG = re.compile(r"qreg\s+(\w+)\s*\[\s*(\d+)\s*\]\s*;?$")
_STMT = re.compile(r"(\w+)\s*(?:\(\s*([^)]*?)\s*\))?\s+(.*?)\s*;$")
_ARG = re.compile(r"(\w+)\s*\[\s*(\d+)\s*\]$")


def _parse_qasm(text: str) -> Circuit:
    n = None
    reg = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        col = len(raw) - len(raw.lstrip()) + 1
        if not line or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        m = _QREG.match(line)
        if m:
            if n is not None:
                raise ParseError("only one register is supported", lineno, col)
            reg, n = m.group(1), int(m.group(2))
            continue
        m = _STMT.match(line)
        if not m:
            raise ParseError(f"cannot parse statement {line!r}", lineno, col)
        if n is None:
            raise ParseError("gate before qreg declaration", lineno, col)
        name, param, args = m.groups()
        if name not in _FROM_QASM:
            raise ParseError(f"unsupported gate {name!r}", lineno, col)
        kind = _FROM_QASM[name]
        angle = None
        if kind == "Rz":
            if param is None:
                raise ParseError("rz needs an angle", lineno, col)
            try:
                angle = float(param)
            except ValueError:
                raise ParseError(f"bad angle {param!r}", lineno, col + line.index(param)) from None
        elif param is not None:
            raise ParseError(f"{name} takes no parameter", lineno, col)
        qubits = []
        for a in args.split(","):
            am = _ARG.match(a.strip())
            if not am or am.group(1) != reg:
                raise ParseError(f"bad qubit argument {a.strip()!r}", lineno, col + line.index(a.strip()))
            qubits.append(int(am.group(2)))
        try:
            gate = Gate(kind, tuple(qubits), angle)
            if max(qubits) >= n:
                raise ValueError(f"qubit index {max(qubits)} >= register size {n}")
        except ValueError as exc:
            raise ParseError(str(exc), lineno, col) from None
        gates.append(gate)
    if n is None:
        raise ParseError("missing qreg declaration")
    return Circuit(n, gates)


def _parse_json(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(data, dict) or "n" not in data or "gates" not in data:
        raise ParseError("expected an object with 'n' and 'gates'", 1, 1)
    gates = []
    for i, entry in enumerate(data["gates"]):
        try:
            gates.append(Gate(entry["kind"], tuple(entry["qubits"]), entry.get("angle")))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"gate #{i}: {exc}", 1, 1) from None
    try:
        return Circuit(int(data["n"]), gates)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from None


def parse(text: str) -> Circuit:
    """Parse either the JSON or the QASM-style rendering of a circuit."""
    if text.lstrip().startswith("{"):
        return _parse_json(text)
    return _parse_qasm(text)
