"""Multi-qubit Pauli operators with exact phase tracking.

A Pauli is ``i^phase * P_0 (x) P_1 (x) ...`` where qubit ``q`` carries the
letter given by bit ``q`` of ``x`` and ``z`` (00 = I, 10 = X, 01 = Z, 11 = Y).

>>> p = PauliOperator.from_string("XZ")
>>> q = PauliOperator.from_string("ZX")
>>> str(pauli_multiply(p, q)), commutes(p, q)
('+YY', True)
"""

from dataclasses import dataclass
from typing import Iterable, Optional

from .gates import Gate

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1), "_": (0, 0)}
_PHASE_STR = {0: "+", 1: "+i", 2: "-", 3: "-i"}
_PREFIX = [("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2), ("−", 2)]


@dataclass(frozen=True)
class PauliOperator:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        lim = 1 << self.n
        if not (0 <= self.x < lim and 0 <= self.z < lim):
            raise ValueError("bit masks exceed qubit count")
        object.__setattr__(self, "phase", self.phase & 3)

    @classmethod
    def from_string(cls, s: str) -> "PauliOperator":
        s = s.strip()
        phase = 0
        for pre, ph in _PREFIX:
            if s.startswith(pre):
                phase, s = ph, s[len(pre):]
                break
        x = z = 0
        for q, ch in enumerate(s.upper()):
            if ch not in _BITS:
                raise ValueError(f"bad Pauli letter {ch!r}")
            bx, bz = _BITS[ch]
            x |= bx << q
            z |= bz << q
        if not s:
            raise ValueError("empty Pauli string")
        return cls(len(s), x, z, phase)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, q: int, letter: str) -> "PauliOperator":
        bx, bz = _BITS[letter]
        return cls(n, bx << q, bz << q, 0)

    def letters(self) -> str:
        return "".join(_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n))

    def __str__(self):
        return _PHASE_STR[self.phase] + self.letters()

    def __mul__(self, other):
        return pauli_multiply(self, other)

    @property
    def sign(self) -> int:
        if self.phase & 1:
            raise ValueError("non-Hermitian Pauli has no real sign")
        return 1 - self.phase

    @property
    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0

    def unsigned(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, 0)

    def negate(self) -> "PauliOperator":
        return PauliOperator(self.n, self.x, self.z, self.phase + 2)

    def restrict(self, qubits: Iterable[int]) -> "PauliOperator":
        """New operator on ``len(qubits)`` qubits, phase dropped."""
        qubits = list(qubits)
        x = z = 0
        for i, q in enumerate(qubits):
            x |= ((self.x >> q) & 1) << i
            z |= ((self.z >> q) & 1) << i
        return PauliOperator(len(qubits), x, z, 0)

    def pad(self, n_total: int) -> "PauliOperator":
        """Same operator on ``n_total >= n`` qubits with identity on the rest."""
        if n_total < self.n:
            raise ValueError("cannot pad to fewer qubits")
        return PauliOperator(n_total, self.x, self.z, self.phase)


def _phase_exponent(x1, z1, x2, z2):
    pos = (x1 & ~z1 & x2 & z2) | (x1 & z1 & ~x2 & z2) | (~x1 & z1 & x2 & ~z2)
    neg = (x1 & z1 & x2 & ~z2) | (~x1 & z1 & x2 & z2) | (x1 & ~z1 & ~x2 & z2)
    return pos.bit_count() - neg.bit_count()


def pauli_multiply(a: PauliOperator, b: PauliOperator) -> PauliOperator:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")
    ph = a.phase + b.phase + _phase_exponent(a.x, a.z, b.x, b.z)
    return PauliOperator(a.n, a.x ^ b.x, a.z ^ b.z, ph)


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")
    return ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) % 2 == 0


def weight(p: PauliOperator, support: Optional[Iterable[int]] = None) -> int:
    mask = p.x | p.z
    if support is None:
        return mask.bit_count()
    return sum((mask >> q) & 1 for q in support)


# Heisenberg images of X_q and Z_q, as (letters on the gate qubits, phase).
_IMAGES = {
    "H": {"X": ("Z", 0), "Z": ("X", 0)},
    "S": {"X": ("Y", 0), "Z": ("Z", 0)},
    "X": {"X": ("X", 0), "Z": ("Z", 2)},
    "SX": {"X": ("X", 0), "Z": ("Y", 2)},
    "CX": {"X0": ("XX", 0), "X1": ("IX", 0), "Z0": ("ZI", 0), "Z1": ("ZZ", 0)},
    "CZ": {"X0": ("XZ", 0), "X1": ("ZX", 0), "Z0": ("ZI", 0), "Z1": ("IZ", 0)},
}


def _embed(n, qubits, letters, phase):
    x = z = 0
    for q, ch in zip(qubits, letters):
        bx, bz = _BITS[ch]
        x |= bx << q
        z |= bz << q
    return PauliOperator(n, x, z, phase)


def conjugate(p: PauliOperator, gate: Gate) -> PauliOperator:
    """Return ``U p U^dagger`` for the gate ``U``.

    Works by expanding ``p`` into single-qubit X and Z factors and multiplying
    their images, which keeps it independent of the bitwise kernel rules.
    """
    qs = gate.qubits
    if max(qs) >= p.n:
        raise ValueError(f"gate {gate} outside {p.n}-qubit register")
    table = _IMAGES[gate.kind]
    n = p.n
    # p = i^(phase + |x&z|) * prod X^x * prod Z^z
    base_phase = p.phase + (p.x & p.z).bit_count()
    gmask = 0
    for q in qs:
        gmask |= 1 << q
    out = PauliOperator(n, p.x & ~gmask, 0, base_phase)
    for j, q in enumerate(qs):
        if (p.x >> q) & 1:
            key = "X" if len(qs) == 1 else f"X{j}"
            out = pauli_multiply(out, _embed(n, qs, *table[key]))
    out = pauli_multiply(out, PauliOperator(n, 0, p.z & ~gmask, 0))
    for j, q in enumerate(qs):
        if (p.z >> q) & 1:
            key = "Z" if len(qs) == 1 else f"Z{j}"
            out = pauli_multiply(out, _embed(n, qs, *table[key]))
    return out
