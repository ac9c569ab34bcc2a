"""Pauli letters, strings, gadgets and their conjugation by Clifford gates.

Letters are stored as characters ``"IXYZ"`` and converted to ``(x, z)`` bit
pairs for the algebra: ``I=(0,0)``, ``X=(1,0)``, ``Z=(0,1)``, ``Y=(1,1)``.
A gadget ``exp(-i*angle*P)`` never carries a separate sign: a ``-1`` picked up
during conjugation is absorbed by negating the angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

from .circuit import Gate

LETTERS = "IXYZ"
LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_LETTER = {v: k for k, v in LETTER_BITS.items()}

# A Clifford step is just a non-Rz gate.
CliffordStep = Gate


def letter_bits(letter: str) -> tuple[int, int]:
    try:
        return LETTER_BITS[letter]
    except KeyError:
        raise ValueError(f"not a Pauli letter: {letter!r}") from None


def letter_from_bits(x: int, z: int) -> str:
    return _BITS_LETTER[(int(x), int(z))]


# Forward action P -> g P g^dagger, written on bits so that it also works
# elementwise on numpy uint8 arrays. Each returns (x', z', flip).

def _fwd_single(kind: str, x, z):
    if kind == "S":
        return x, z ^ x, x & z
    if kind == "Sdg":
        return x, z ^ x, x & (z ^ 1)
    if kind == "V":
        return x ^ z, z, z & (x ^ 1)
    if kind == "Vdg":
        return x ^ z, z, x & z
    raise ValueError(f"not a single-qubit Clifford: {kind!r}")


def _fwd_cnot(xc, zc, xt, zt):
    flip = xc & zt & (xt ^ zc ^ 1)
    return xc, zc ^ zt, xt ^ xc, zt, flip


def _check_clifford(gate: Gate) -> None:
    if gate.kind == "Rz":
        raise ValueError("Rz is not a Clifford step")


def conj_single(gate: Gate, p: str) -> tuple[str, int]:
    """Return ``(p2, sign)`` with ``gate^dag . p . gate == sign * p2``."""
    _check_clifford(gate)
    if gate.kind == "CNOT":
        raise ValueError("conj_single needs a single-qubit gate")
    x, z = letter_bits(p)
    x2, z2, flip = _fwd_single(gate.inverse().kind, x, z)
    return letter_from_bits(x2, z2), -1 if flip else 1


def conj_cnot(p_c: str, p_t: str) -> tuple[str, str, int]:
    """Return ``(c2, t2, sign)`` with ``CNOT (p_c x p_t) CNOT == sign * (c2 x t2)``."""
    xc, zc = letter_bits(p_c)
    xt, zt = letter_bits(p_t)
    xc, zc, xt, zt, flip = _fwd_cnot(xc, zc, xt, zt)
    return letter_from_bits(xc, zc), letter_from_bits(xt, zt), -1 if flip else 1


@dataclass(frozen=True)
class PauliGadget:
    """One rotation ``exp(-i * angle * string)``."""

    string: str
    angle: float
    original_index: int = 0

    def __post_init__(self):
        bad = set(self.string) - set(LETTERS)
        if bad:
            raise ValueError(f"invalid Pauli letters {sorted(bad)} in {self.string!r}")
        if not math.isfinite(self.angle):
            raise ValueError(f"gadget angle must be finite, got {self.angle}")

    @property
    def n_qubits(self) -> int:
        return len(self.string)

    @property
    def weight(self) -> int:
        return weight(self)

    @property
    def support(self) -> frozenset[int]:
        return support(self)


def weight(g: PauliGadget | str) -> int:
    s = g.string if isinstance(g, PauliGadget) else g
    return sum(1 for c in s if c != "I")


def support(g: PauliGadget | str) -> frozenset[int]:
    s = g.string if isinstance(g, PauliGadget) else g
    return frozenset(i for i, c in enumerate(s) if c != "I")


def commute_through_gadget(gate: Gate, g: PauliGadget) -> PauliGadget:
    """Conjugate ``g`` so that its unitary becomes ``gate^dag . U(g) . gate``."""
    _check_clifford(gate)
    if max(gate.qubits) >= len(g.string):
        raise IndexError(f"{gate!r} out of range for {len(g.string)}-qubit gadget")
    letters = list(g.string)
    if gate.kind == "CNOT":
        c, t = gate.qubits
        # CNOT is self-inverse, so gate^dag P gate == CNOT P CNOT
        letters[c], letters[t], sign = conj_cnot(letters[c], letters[t])
    else:
        q = gate.qubits[0]
        letters[q], sign = conj_single(gate, letters[q])
    return replace(g, string="".join(letters), angle=g.angle if sign > 0 else -g.angle)


def strings_commute(a: str, b: str) -> bool:
    anti = 0
    for p, q in zip(a, b):
        xa, za = LETTER_BITS[p]
        xb, zb = LETTER_BITS[q]
        anti ^= (xa & zb) ^ (za & xb)
    return anti == 0


@dataclass
class PauliExponential:
    """Ordered product of gadgets. Gadget 0 is applied first."""

    gadgets: list[PauliGadget]
    n_qubits: int

    def __post_init__(self):
        self.gadgets = list(self.gadgets)
        for g in self.gadgets:
            if len(g.string) != self.n_qubits:
                raise ValueError(
                    f"gadget {g.string!r} has length {len(g.string)}, expected {self.n_qubits}"
                )

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[str, float]], n_qubits: int | None = None):
        gadgets = [PauliGadget(s, float(a), i) for i, (s, a) in enumerate(terms)]
        if n_qubits is None:
            if not gadgets:
                raise ValueError("cannot infer qubit count of an empty exponential")
            n_qubits = len(gadgets[0].string)
        return cls(gadgets, n_qubits)

    def __len__(self) -> int:
        return len(self.gadgets)

    def __iter__(self):
        return iter(self.gadgets)

    def __getitem__(self, i: int) -> PauliGadget:
        return self.gadgets[i]


def mutually_commuting(e: PauliExponential | Sequence[PauliGadget]) -> bool:
    """True iff every pair of strings has even symplectic product."""
    strings = [g.string for g in e]
    if len(strings) < 2:
        return True
    bits = np.array([[LETTER_BITS[c] for c in s] for s in strings], dtype=np.int64)
    x, z = bits[..., 0], bits[..., 1]
    return not ((x @ z.T + z @ x.T) % 2).any()


def parse_exponential(text: str, allow_empty: bool = False) -> PauliExponential:
    """Read the ``<letters> <angle>`` line format (``#`` comments, blanks skipped).

    An input without gadgets is an error unless ``allow_empty``, in which case
    a zero-qubit, zero-gadget exponential comes back.
    """
    terms = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected '<letters> <angle>', got {line!r}")
        letters, angle = parts
        letters = letters.upper()
        if set(letters) - set(LETTERS):
            raise ValueError(f"line {lineno}: invalid Pauli string {letters!r}")
        try:
            theta = float(angle)
        except ValueError:
            raise ValueError(f"line {lineno}: invalid angle {angle!r}") from None
        if not math.isfinite(theta):
            raise ValueError(f"line {lineno}: angle must be finite")
        if n is None:
            n = len(letters)
        elif len(letters) != n:
            raise ValueError(f"line {lineno}: string length {len(letters)} differs from {n}")
        terms.append((letters, theta))
    if n is None:
        if allow_empty:
            return PauliExponential([], 0)
        raise ValueError("no gadgets in input")
    return PauliExponential.from_terms(terms, n)


def format_exponential(e: PauliExponential) -> str:
    return "".join(f"{g.string} {g.angle!r}\n" for g in e.gadgets)
