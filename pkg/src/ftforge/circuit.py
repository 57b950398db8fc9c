"""Circuits, the circuit text format, connectivity graphs and action tables.

Circuit files look like::

    # Steane |0> encoder
    qubits 7 0
    H 0
    CX 0 1

The ``qubits <n_data> <n_flag>`` header is required.  Flag qubits are
numbered after the data qubits.
"""

import hashlib
import re
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .gates import ARITY, ONE_QUBIT, TWO_QUBIT, Gate, make_gate, normalize_gate_name
from .tableau import StabilizerTableau


class CircuitParseError(ValueError):
    pass


@dataclass
class Circuit:
    n_data: int
    n_flag: int = 0
    gates: List[Gate] = field(default_factory=list)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_flag

    def __len__(self):
        return len(self.gates)

    def append(self, gate: Gate) -> "Circuit":
        if max(gate.qubits) >= self.n_qubits:
            raise ValueError(f"gate {gate} outside {self.n_qubits}-qubit register")
        self.gates.append(gate)
        return self

    def copy(self) -> "Circuit":
        return Circuit(self.n_data, self.n_flag, list(self.gates))

    def two_qubit_count(self) -> int:
        return sum(g.is_two_qubit for g in self.gates)

    def gate_counts(self) -> Dict[str, int]:
        out: Dict[str, int] = {}
        for g in self.gates:
            out[g.kind] = out.get(g.kind, 0) + 1
        return out

    def with_flags(self, n_flag: int) -> "Circuit":
        """Same gates on a register with at least ``n_flag`` flag qubits."""
        if n_flag < self.n_flag:
            raise ValueError("cannot drop flag qubits")
        return Circuit(self.n_data, n_flag, list(self.gates))

    def simulate(self) -> StabilizerTableau:
        """Final stabilizer tableau starting from |0...0>."""
        return StabilizerTableau.zero_state(self.n_qubits).apply_all(self.gates)

    def to_text(self, comment: Optional[str] = None) -> str:
        lines = [f"# {c}" for c in (comment.splitlines() if comment else [])]
        lines.append(f"qubits {self.n_data} {self.n_flag}")
        lines += [str(g) for g in self.gates]
        return "\n".join(lines) + "\n"


def parse_circuit(text: str) -> Circuit:
    circ = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if circ is None:
            if tok[0].lower() != "qubits" or len(tok) != 3:
                raise CircuitParseError(f"line {lineno}: expected header 'qubits <n_data> <n_flag>'")
            try:
                nd, nf = int(tok[1]), int(tok[2])
            except ValueError:
                raise CircuitParseError(f"line {lineno}: qubit counts must be integers") from None
            if nd < 1 or nf < 0:
                raise CircuitParseError(f"line {lineno}: need n_data >= 1 and n_flag >= 0")
            circ = Circuit(nd, nf)
            continue
        try:
            kind = normalize_gate_name(tok[0])
            qs = [int(t) for t in tok[1:]]
            gate = make_gate(kind, *qs)
            circ.append(gate)
        except ValueError as exc:
            raise CircuitParseError(f"line {lineno}: {exc}") from None
    if circ is None:
        raise CircuitParseError("missing 'qubits <n_data> <n_flag>' header")
    return circ


def load_circuit(path) -> Circuit:
    with open(path) as fh:
        return parse_circuit(fh.read())


# Device coupling maps (undirected).
_PRESETS = {
    "line_5": (5, [(0, 1), (1, 2), (2, 3), (3, 4)]),
    "jakarta_7": (7, [(0, 1), (1, 2), (1, 3), (3, 5), (4, 5), (5, 6)]),
    "heavy_hex_16": (16, [(0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
                          (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14)]),
    "tokyo_20": (20, [(0, 1), (0, 5), (1, 2), (1, 6), (1, 7), (2, 3), (2, 6), (3, 8), (3, 9),
                      (4, 8), (4, 9), (5, 6), (5, 10), (5, 11), (6, 7), (6, 10), (6, 11), (7, 8),
                      (7, 12), (7, 13), (8, 9), (8, 12), (8, 13), (9, 14), (10, 11), (10, 15),
                      (11, 12), (11, 16), (11, 17), (12, 13), (12, 16), (13, 14), (13, 18),
                      (13, 19), (14, 18), (14, 19), (15, 16), (16, 17), (17, 18), (18, 19)]),
}


@dataclass(frozen=True)
class ConnectivityGraph:
    n: int
    edges: frozenset

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]]) -> "ConnectivityGraph":
        es = set()
        for e in edges:
            a, b = int(e[0]), int(e[1])
            if a == b or not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"bad edge {tuple(e)} for {n} qubits")
            es.add((min(a, b), max(a, b)))
        return cls(n, frozenset(es))

    @classmethod
    def all_to_all(cls, n: int) -> "ConnectivityGraph":
        return cls(n, frozenset(combinations(range(n), 2)))

    @classmethod
    def grid(cls, rows: int, cols: int) -> "ConnectivityGraph":
        es = []
        for i in range(rows):
            for j in range(cols):
                q = i * cols + j
                if j + 1 < cols:
                    es.append((q, q + 1))
                if i + 1 < rows:
                    es.append((q, q + cols))
        return cls.from_edges(rows * cols, es)

    def connected(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def induced(self, placement: Sequence[int]) -> "ConnectivityGraph":
        """Graph on ``len(placement)`` qubits; qubit i sits on node placement[i]."""
        if len(set(placement)) != len(placement) or any(not 0 <= p < self.n for p in placement):
            raise ValueError("placement must list distinct device qubits")
        pos = {p: i for i, p in enumerate(placement)}
        es = [(pos[a], pos[b]) for a, b in self.edges if a in pos and b in pos]
        return ConnectivityGraph.from_edges(len(placement), es)


def connectivity_preset(name: str, n: Optional[int] = None) -> ConnectivityGraph:
    """Named connectivity.  ``all_to_all`` needs ``n``; ``grid RxC`` and ``line_N`` are parsed."""
    key = name.strip().lower()
    if key in ("all_to_all", "all-to-all", "full"):
        if n is None:
            raise ValueError("all_to_all needs a qubit count")
        return ConnectivityGraph.all_to_all(n)
    m = re.fullmatch(r"grid[ _]?(\d+)x(\d+)", key)
    if m:
        return ConnectivityGraph.grid(int(m.group(1)), int(m.group(2)))
    m = re.fullmatch(r"line[ _](\d+)", key)
    if m:
        k = int(m.group(1))
        return ConnectivityGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)])
    if key in _PRESETS:
        size, es = _PRESETS[key]
        return ConnectivityGraph.from_edges(size, es)
    raise ValueError(f"unknown connectivity {name!r}")


def preset_names() -> List[str]:
    return ["all_to_all", "grid_3x3", "grid RxC", "line_N"] + sorted(_PRESETS)


@dataclass(frozen=True)
class ActionTable:
    """Ordered list of gates the agent may choose from."""

    gates: Tuple[Gate, ...]

    def __len__(self):
        return len(self.gates)

    def __getitem__(self, i) -> Gate:
        return self.gates[i]

    def index(self, gate: Gate) -> int:
        return self.gates.index(gate)

    def digest(self) -> bytes:
        """SHA-256 of the action list, used to pair agents with their tables."""
        return hashlib.sha256("\n".join(map(str, self.gates)).encode()).digest()


def _kind_key(g: Gate):
    return (g.kind, g.qubits)


def enumerate_actions(n_qubits: int, gate_set: Iterable[str],
                      connectivity: Optional[ConnectivityGraph] = None,
                      no_data_data: Optional[int] = None,
                      only_qubits: Optional[Iterable[int]] = None) -> ActionTable:
    """Every allowed gate, sorted by (kind, qubits).

    Each edge gives two directed CX actions and one CZ.  With
    ``no_data_data=n_data`` two-qubit gates between two qubits below
    ``n_data`` are dropped.  ``only_qubits`` limits one-qubit gates to the
    listed qubits.
    """
    kinds = [normalize_gate_name(k) for k in gate_set]
    if len(set(kinds)) != len(kinds):
        raise ValueError("duplicate gate in gate set")
    if connectivity is None:
        connectivity = ConnectivityGraph.all_to_all(n_qubits)
    if connectivity.n < n_qubits:
        raise ValueError(f"connectivity has {connectivity.n} qubits, need {n_qubits}")
    oneq = set(range(n_qubits)) if only_qubits is None else set(only_qubits)
    out = []
    for k in kinds:
        if ARITY[k] == 1:
            out += [make_gate(k, q) for q in sorted(oneq) if q < n_qubits]
            continue
        for a, b in sorted(connectivity.edges):
            if b >= n_qubits:
                continue
            if no_data_data is not None and a < no_data_data and b < no_data_data:
                continue
            if k == "CX":
                out += [make_gate("CX", a, b), make_gate("CX", b, a)]
            else:
                out.append(make_gate(k, a, b))
    out.sort(key=_kind_key)
    return ActionTable(tuple(out))
