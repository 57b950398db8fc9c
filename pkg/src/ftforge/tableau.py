"""Stabilizer tableaus, canonical form and tableau distances.

A tableau is a list of ``m`` Pauli rows on ``n`` qubits held as parallel
numpy arrays, so the gate and canonicalization kernels can work on it in
place.  Rows of a state tableau are signed (phase 0 or 2).
"""

from typing import Iterable, List, Sequence

import numpy as np

from . import kernels
from .gates import Gate
from .pauli import PauliOperator, pauli_multiply

MAX_QUBITS = 64


class StabilizerTableau:
    __slots__ = ("n", "x", "z", "r")

    def __init__(self, n: int, x, z, r):
        if not 0 < n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}")
        self.n = n
        self.x = np.ascontiguousarray(x, dtype=np.uint64)
        self.z = np.ascontiguousarray(z, dtype=np.uint64)
        self.r = np.ascontiguousarray(r, dtype=np.uint8) & np.uint8(3)
        if not (len(self.x) == len(self.z) == len(self.r)):
            raise ValueError("row arrays differ in length")

    @classmethod
    def from_paulis(cls, rows: Sequence[PauliOperator]) -> "StabilizerTableau":
        if not rows:
            raise ValueError("empty tableau")
        n = rows[0].n
        if any(p.n != n for p in rows):
            raise ValueError("rows act on different qubit counts")
        return cls(n, [p.x for p in rows], [p.z for p in rows], [p.phase for p in rows])

    @classmethod
    def from_strings(cls, rows: Iterable[str]) -> "StabilizerTableau":
        return cls.from_paulis([PauliOperator.from_string(s) for s in rows])

    @classmethod
    def zero_state(cls, n: int) -> "StabilizerTableau":
        """The |0...0> state, rows Z_0 .. Z_{n-1}."""
        z = np.uint64(1) << np.arange(n, dtype=np.uint64)
        return cls(n, np.zeros(n, np.uint64), z, np.zeros(n, np.uint8))

    def __len__(self):
        return len(self.x)

    def copy(self):
        return type(self)(self.n, self.x.copy(), self.z.copy(), self.r.copy())

    def rows(self) -> List[PauliOperator]:
        return [PauliOperator(self.n, int(a), int(b), int(c))
                for a, b, c in zip(self.x, self.z, self.r)]

    def strings(self) -> List[str]:
        return [str(p) for p in self.rows()]

    def apply(self, gate: Gate) -> "StabilizerTableau":
        """Conjugate every row by ``gate`` in place and return self."""
        if max(gate.qubits) >= self.n:
            raise ValueError(f"gate {gate} outside {self.n}-qubit register")
        b = gate.qubits[1] if len(gate.qubits) == 2 else -1
        kernels.conjugate_rows(self.x, self.z, self.r, gate.code, gate.qubits[0], b)
        return self

    def apply_all(self, gates: Iterable[Gate]) -> "StabilizerTableau":
        for g in gates:
            self.apply(g)
        return self

    def __eq__(self, other):
        return (isinstance(other, StabilizerTableau) and self.n == other.n
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)
                and np.array_equal(self.r, other.r))

    def __repr__(self):
        return f"{type(self).__name__}({self.strings()})"


class CanonicalTableau(StabilizerTableau):
    """Tableau in canonical echelon form; equal states give equal instances."""

    __slots__ = ()


def canonicalize(tab: StabilizerTableau) -> CanonicalTableau:
    """Canonical echelon form of the rows of ``tab``.

    Qubit columns are visited in order; in each one an X pivot and then a Z
    pivot are selected and cleared from all other rows, with rows combined
    by phase-exact multiplication.  Raises ``ValueError`` if the rows are
    not independent.
    """
    out = CanonicalTableau(tab.n, tab.x.copy(), tab.z.copy(), tab.r.copy())
    rank = kernels.canonicalize_rows(out.x, out.z, out.r, out.n)
    if rank < len(out):
        raise ValueError(f"rows are dependent (rank {rank} < {len(out)})")
    return out


def is_stabilizer_state(tab: StabilizerTableau) -> bool:
    """True if the rows are ``n`` independent, commuting, Hermitian Paulis."""
    if len(tab) != tab.n or np.any(tab.r & 1):
        return False
    rows = tab.rows()
    for i, a in enumerate(rows):
        for b in rows[i + 1:]:
            if ((a.x & b.z).bit_count() + (a.z & b.x).bit_count()) & 1:
                return False
    try:
        canonicalize(tab)
    except ValueError:
        return False
    return True


def _pivot(p: PauliOperator):
    for q in range(p.n):
        if (p.x >> q) & 1:
            return q, 0
        if (p.z >> q) & 1:
            return q, 1
    return None


def stabilizer_sign(tab: StabilizerTableau, p: PauliOperator) -> int:
    """+1 if ``p`` is in the group generated by the rows, -1 if ``-p`` is, else 0."""
    if p.n != tab.n:
        raise ValueError("qubit count mismatch")
    canon = StabilizerTableau(tab.n, tab.x.copy(), tab.z.copy(), tab.r.copy())
    rank = kernels.canonicalize_rows(canon.x, canon.z, canon.r, canon.n)
    acc = PauliOperator.identity(p.n)
    res_x, res_z = p.x, p.z
    for row in canon.rows()[:rank]:
        q, part = _pivot(row)
        if ((res_x if part == 0 else res_z) >> q) & 1:
            acc = pauli_multiply(acc, row)
            res_x ^= row.x
            res_z ^= row.z
    if res_x or res_z:
        return 0
    diff = (acc.phase - p.phase) & 3
    if diff & 1:
        return 0
    return 1 if diff == 0 else -1


def to_binary_vector(tab: StabilizerTableau) -> np.ndarray:
    """Row-major ``[x | z | sign]`` bits, length ``m * (2n + 1)``."""
    q = np.arange(tab.n, dtype=np.uint64)
    xb = (tab.x[:, None] >> q) & np.uint64(1)
    zb = (tab.z[:, None] >> q) & np.uint64(1)
    sb = ((tab.r >> 1) & 1).astype(np.uint64)[:, None]
    return np.concatenate([xb, zb, sb], axis=1).astype(np.uint8).ravel()


def _counts(u, v):
    u = np.asarray(u, dtype=bool)
    v = np.asarray(v, dtype=bool)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape} vs {v.shape}")
    c11 = int(np.count_nonzero(u & v))
    c10 = int(np.count_nonzero(u & ~v))
    c01 = int(np.count_nonzero(~u & v))
    return c11, c10, c01, u.size


def jaccard_distance(u, v) -> float:
    """(C01 + C10) / (C01 + C10 + C11); zero for two all-zero vectors."""
    c11, c10, c01, _ = _counts(u, v)
    den = c01 + c10 + c11
    return (c01 + c10) / den if den else 0.0


def hamming_distance(u, v) -> float:
    c11, c10, c01, tot = _counts(u, v)
    return (c01 + c10) / tot if tot else 0.0
