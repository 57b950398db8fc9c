"""Stabilizer codes and target logical states."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .pauli import PauliOperator, commutes, pauli_multiply
from .tableau import StabilizerTableau, canonicalize, is_stabilizer_state

_TABLE = {
    "perfect5": ("[[5,1,3]]", 3, ["IXZZX", "XZZXI", "ZZXIX", "ZXIXZ"]),
    "steane": ("[[7,1,3]]", 3, ["ZIZIZIZ", "XIXIXIX", "IZZIIZZ", "IXXIIXX", "IIIZZZZ", "IIIXXXX"]),
    "shor": ("[[9,1,3]]", 3, ["ZZIIIIIII", "ZIZIIIIII", "XXXXXXIII", "IIIZZIIII", "IIIZIZIII",
                              "XXXIIIXXX", "IIIIIIZZI", "IIIIIIZIZ"]),
    "surface17": ("[[9,1,3]]", 3, ["ZIIZIIIII", "IIIZZIZZI", "IZZIZZIII", "IIIIIZIIZ",
                                   "IXXIIIIII", "XXIXXIIII", "IIIIXXIXX", "IIIIIIXXI"]),
    "rm15": ("[[15,1,3]]", 3, ["ZIZIZIZIZIZIZIZ", "XIXIXIXIXIXIXIX", "IZZIIZZIIZZIIZZ",
                               "IXXIIXXIIXXIIXX", "IIIZZZZIIIIZZZZ", "IIIXXXXIIIIXXXX",
                               "IIIIIIIZZZZZZZZ", "IIIIIIIXXXXXXXX", "IIZIIIZIIIZIIIZ",
                               "IIIIZIZIIIIIZIZ", "IIIIIZZIIIIIIZZ", "IIIIIIIIIZZIIZZ",
                               "IIIIIIIIIIIZZZZ", "IIIIIIIIZIZIZIZ"]),
    "color17": ("[[17,1,5]]", 5, ["XXXXIIIIIIIIIIIII", "ZZZZIIIIIIIIIIIII", "XIXIXXIIIIIIIIIII",
                                  "ZIZIZZIIIIIIIIIII", "IIIIXXIIXXIIIIIII", "IIIIZZIIZZIIIIIII",
                                  "IIIIIIXXIIXXIIIII", "IIIIIIZZIIZZIIIII", "IIIIIIIIXXIIXXIII",
                                  "IIIIIIIIZZIIZZIII", "IIIIIIIIIIXXIIXXI", "IIIIIIIIIIZZIIZZI",
                                  "IIIIIIIXIIIXIIIXX", "IIIIIIIZIIIZIIIZZ", "IIXXIXXIIXXIIXXII",
                                  "IIZZIZZIIZZIIZZII"]),
}

_ALIASES = {
    "5": "perfect5", "five": "perfect5", "[[5,1,3]]": "perfect5", "perfect": "perfect5",
    "7": "steane", "[[7,1,3]]": "steane",
    "9": "shor", "[[9,1,3]]": "shor",
    "surface": "surface17", "surface-17": "surface17",
    "15": "rm15", "[[15,1,3]]": "rm15", "reed-muller": "rm15", "reedmuller": "rm15",
    "17": "color17", "[[17,1,5]]": "color17", "color": "color17",
}

STATES = ("0", "1", "+", "-", "+i", "-i")


@dataclass(frozen=True)
class StabilizerCode:
    name: str
    n: int
    k: int
    d: int
    generators: tuple
    logical_z: PauliOperator
    logical_x: PauliOperator

    @property
    def t(self) -> int:
        return (self.d - 1) // 2

    def validate(self):
        gens = list(self.generators)
        for i, a in enumerate(gens):
            if a.n != self.n:
                raise ValueError("generator length does not match n")
            for b in gens[i + 1:]:
                if not commutes(a, b):
                    raise ValueError(f"generators {a} and {b} anticommute")
        for lg in (self.logical_z, self.logical_x):
            if lg.n != self.n:
                raise ValueError("logical length does not match n")
            for g in gens:
                if not commutes(lg, g):
                    raise ValueError(f"logical {lg} anticommutes with generator {g}")
        if commutes(self.logical_z, self.logical_x):
            raise ValueError("logical Z and X must anticommute")
        if len(gens) + self.k != self.n:
            raise ValueError(f"{len(gens)} generators do not leave {self.k} logical qubit(s)")
        canonicalize(StabilizerTableau.from_paulis(gens + [self.logical_z]))
        return self


def builtin_code(name: str) -> StabilizerCode:
    key = _ALIASES.get(name.lower(), name.lower())
    if key not in _TABLE:
        raise KeyError(f"unknown code {name!r}; known: {', '.join(_TABLE)}")
    label, d, gens = _TABLE[key]
    n = len(gens[0])
    return StabilizerCode(
        key, n, 1, d, tuple(PauliOperator.from_string(g) for g in gens),
        PauliOperator.from_string("Z" * n), PauliOperator.from_string("X" * n))


def builtin_names() -> List[str]:
    return list(_TABLE)


def code_label(code: StabilizerCode) -> str:
    return f"[[{code.n},{code.k},{code.d}]]"


def load_code(text: str, name: str = "custom", d: Optional[int] = None) -> StabilizerCode:
    """Parse a code file: generator lines, then ``ZL: ...`` and ``XL: ...``.

    ``#`` starts a comment.  A ``d: <int>`` line sets the distance; without
    it the distance is found by brute force (small codes only).
    """
    gens, zl, xl = [], None, None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key = key.strip().upper()
        try:
            if rest and key == "ZL":
                zl = PauliOperator.from_string(rest)
            elif rest and key == "XL":
                xl = PauliOperator.from_string(rest)
            elif rest and key == "D":
                d = int(rest)
            else:
                gens.append(PauliOperator.from_string(line))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    if zl is None or xl is None:
        raise ValueError("code file needs both ZL: and XL: lines")
    if not gens:
        raise ValueError("code file has no generators")
    n = gens[0].n
    probe = StabilizerCode(name, n, 1, d or 1, tuple(gens), zl, xl).validate()
    if d is None:
        d = code_distance(probe)
    return StabilizerCode(name, n, 1, d, tuple(gens), zl, xl)


def code_distance(code: StabilizerCode, max_weight: int = 6) -> int:
    """Smallest weight of a Pauli that commutes with all generators but is not in the group."""
    from itertools import combinations, product

    gens = list(code.generators)
    n = code.n
    full = StabilizerTableau.from_paulis(gens)
    from .tableau import stabilizer_sign
    for w in range(1, max_weight + 1):
        for qs in combinations(range(n), w):
            for letters in product("XYZ", repeat=w):
                s = ["I"] * n
                for q, ch in zip(qs, letters):
                    s[q] = ch
                p = PauliOperator.from_string("".join(s))
                if all(commutes(p, g) for g in gens) and stabilizer_sign(full, p) == 0:
                    return w
    raise ValueError(f"distance exceeds {max_weight}")


@dataclass
class LogicalTarget:
    """A target stabilizer state on ``n`` data qubits.

    ``tableau`` holds the unsigned code generators followed by the signed
    logical operator that fixes the state.  ``code`` is None for plain
    states such as GHZ, in which case ``t`` is zero.
    """

    name: str
    tableau: StabilizerTableau
    code: Optional[StabilizerCode] = None
    logical: Optional[PauliOperator] = None

    @property
    def n(self) -> int:
        return self.tableau.n

    @property
    def t(self) -> int:
        return self.code.t if self.code is not None else 0

    def canonical(self):
        return canonicalize(self.tableau)


def logical_operator(code: StabilizerCode, state: str) -> PauliOperator:
    """Signed logical Pauli stabilizing the requested logical state."""
    if state not in STATES:
        raise ValueError(f"state must be one of {STATES}")
    if state in ("0", "1"):
        op = code.logical_z
    elif state in ("+", "-"):
        op = code.logical_x
    else:
        op = pauli_multiply(code.logical_x, code.logical_z)
        op = PauliOperator(op.n, op.x, op.z, op.phase + 1)
    if state in ("1", "-", "-i"):
        op = op.negate()
    return op


def make_target(code: StabilizerCode, state: str) -> LogicalTarget:
    lg = logical_operator(code, state)
    tab = StabilizerTableau.from_paulis(list(code.generators) + [lg])
    if not is_stabilizer_state(tab):
        raise ValueError("generators plus logical do not define a state")
    return LogicalTarget(f"{code.name}|{state}>", tab, code, lg)


def ghz_target(n: int) -> LogicalTarget:
    """GHZ state on ``n`` qubits: X...X and neighbouring ZZ pairs."""
    rows = ["X" * n] + ["I" * i + "ZZ" + "I" * (n - i - 2) for i in range(n - 1)]
    return LogicalTarget(f"ghz{n}", StabilizerTableau.from_strings(rows))


def target_from_strings(rows: Sequence[str], name: str = "custom") -> LogicalTarget:
    tab = StabilizerTableau.from_strings(rows)
    if not is_stabilizer_state(tab):
        raise ValueError("rows do not define a stabilizer state")
    return LogicalTarget(name, tab)


def state_stabilizer_group(target: LogicalTarget):
    """All ``2^m`` elements of the group generated by the target rows.

    Returned as unsigned ``(x, z)`` uint64 arrays; phases are irrelevant for
    weight minimization.
    """
    gx = np.zeros(1, dtype=np.uint64)
    gz = np.zeros(1, dtype=np.uint64)
    for x, z in zip(target.tableau.x, target.tableau.z):
        gx = np.concatenate([gx, gx ^ x])
        gz = np.concatenate([gz, gz ^ z])
    return gx, gz
