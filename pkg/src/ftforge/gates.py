"""Gate records shared by the algebra, circuit and environment layers."""

from typing import NamedTuple, Tuple

from . import kernels

GATE_CODES = {"H": kernels.H, "S": kernels.S, "X": kernels.X, "SX": kernels.SX,
              "CX": kernels.CX, "CZ": kernels.CZ}
ARITY = {"H": 1, "S": 1, "X": 1, "SX": 1, "CX": 2, "CZ": 2}
ONE_QUBIT = ("H", "S", "X", "SX")
TWO_QUBIT = ("CX", "CZ")

_ALIASES = {"CNOT": "CX", "SQRTX": "SX", "SQRT_X": "SX", "√X": "SX"}


class Gate(NamedTuple):
    """A Clifford gate.  ``qubits`` is ``(q,)`` or ``(control, target)`` for CX."""

    kind: str
    qubits: Tuple[int, ...]

    @property
    def code(self) -> int:
        return GATE_CODES[self.kind]

    @property
    def is_two_qubit(self) -> bool:
        return len(self.qubits) == 2

    def __str__(self):
        return " ".join([self.kind, *map(str, self.qubits)])


def make_gate(kind: str, *qubits: int) -> Gate:
    kind = _ALIASES.get(kind.upper(), kind.upper())
    if kind not in ARITY:
        raise ValueError(f"unknown gate {kind!r}")
    if len(qubits) != ARITY[kind]:
        raise ValueError(f"{kind} takes {ARITY[kind]} qubit(s), got {len(qubits)}")
    qs = tuple(int(q) for q in qubits)
    if any(q < 0 for q in qs):
        raise ValueError("negative qubit index")
    if len(qs) == 2:
        if qs[0] == qs[1]:
            raise ValueError(f"{kind} needs two distinct qubits")
        if kind == "CZ":
            qs = (min(qs), max(qs))
    return Gate(kind, qs)


def normalize_gate_name(kind: str) -> str:
    kind = _ALIASES.get(kind.upper(), kind.upper())
    if kind not in ARITY:
        raise ValueError(f"unknown gate {kind!r}")
    return kind
