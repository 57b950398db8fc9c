"""Single-fault propagation, error classification and the fault-tolerance check.

Noise model: after every gate a Pauli fault may strike the gate's qubits, one
of 3 non-identity Paulis for a one-qubit gate and one of 15 for a two-qubit
gate.  Only single faults are tracked.

Two routes are provided and kept deliberately separate:

* ``FaultErrorSet`` plus ``min_weight_data``/``classify_errors`` is the fast
  incremental path used inside the environment (array kernels, group
  enumeration).
* ``verify_fault_tolerance`` propagates each fault on its own with the
  ``PauliOperator`` algebra and decides tolerability by linear algebra over
  GF(2).  It is the independent check applied to emitted circuits.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from functools import lru_cache
from itertools import combinations, product
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .circuit import Circuit
from .codes import LogicalTarget, state_stabilizer_group
from .gates import Gate
from .pauli import PauliOperator, conjugate
from .tableau import StabilizerTableau, stabilizer_sign

_LETTERS = "IXYZ"
_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


class ErrorClass(IntEnum):
    TRIVIAL_FLAGGED = 0
    TOLERABLE = 1
    HARMFUL_FLAGGED = 2
    HARMFUL_UNFLAGGED = 3


CONTRIBUTION = {ErrorClass.TRIVIAL_FLAGGED: 0, ErrorClass.TOLERABLE: 1,
                ErrorClass.HARMFUL_FLAGGED: 1, ErrorClass.HARMFUL_UNFLAGGED: 0}


def _generator_letters(arity: int):
    return [ls for ls in product(_LETTERS, repeat=arity) if any(c != "I" for c in ls)]


_GEN1 = _generator_letters(1)
_GEN2 = _generator_letters(2)


def error_generators(gate: Gate, n_qubits: int) -> List[PauliOperator]:
    """Non-identity Paulis on the gate's support, ``I X Y Z`` lexicographic order."""
    table = _GEN1 if len(gate.qubits) == 1 else _GEN2
    out = []
    for letters in table:
        x = z = 0
        for q, ch in zip(gate.qubits, letters):
            bx, bz = _BITS[ch]
            x |= bx << q
            z |= bz << q
        out.append(PauliOperator(n_qubits, x, z, 0))
    return out


@lru_cache(maxsize=4096)
def _generator_arrays(gate: Gate):
    table = _GEN1 if len(gate.qubits) == 1 else _GEN2
    x = np.zeros(len(table), np.uint64)
    z = np.zeros(len(table), np.uint64)
    for i, letters in enumerate(table):
        for q, ch in zip(gate.qubits, letters):
            bx, bz = _BITS[ch]
            x[i] |= np.uint64(bx << q)
            z[i] |= np.uint64(bz << q)
    return x, z


class FaultErrorSet:
    """Deduplicated set of propagated single-fault errors (phases ignored)."""

    def __init__(self, n_qubits: int):
        self.n = n_qubits
        self.x = np.zeros(0, np.uint64)
        self.z = np.zeros(0, np.uint64)
        self._r = np.zeros(0, np.uint8)

    def __len__(self):
        return len(self.x)

    def copy(self) -> "FaultErrorSet":
        out = FaultErrorSet(self.n)
        out.x, out.z, out._r = self.x.copy(), self.z.copy(), self._r.copy()
        return out

    def extend(self, gate: Gate) -> "FaultErrorSet":
        """Push existing errors through ``gate`` and add the gate's own faults."""
        if len(self.x):
            b = gate.qubits[1] if len(gate.qubits) == 2 else -1
            kernels.conjugate_rows(self.x, self.z, self._r, gate.code, gate.qubits[0], b)
        gx, gz = _generator_arrays(gate)
        # conjugation is a bijection, so only the new faults can repeat an
        # existing error, and any such error lives on the gate's support
        support = np.uint64(sum(1 << q for q in gate.qubits))
        inside = ((self.x | self.z) & ~support) == 0
        seen = set(zip(self.x[inside].tolist(), self.z[inside].tolist()))
        keep = [i for i, k in enumerate(zip(gx.tolist(), gz.tolist())) if k not in seen]
        self.x = np.concatenate([self.x, gx[keep]])
        self.z = np.concatenate([self.z, gz[keep]])
        self._r = np.zeros(len(self.x), np.uint8)
        return self

    def paulis(self) -> List[PauliOperator]:
        return [PauliOperator(self.n, int(a), int(b)) for a, b in zip(self.x, self.z)]

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "FaultErrorSet":
        es = cls(circuit.n_qubits)
        for g in circuit.gates:
            es.extend(g)
        return es


def per_fault_errors(circuit: Circuit) -> List[Tuple[int, int, PauliOperator]]:
    """Every single fault propagated alone to the circuit output.

    Returns ``(gate_index, generator_index, final_error)`` triples.
    """
    n = circuit.n_qubits
    out = []
    for i, g in enumerate(circuit.gates):
        for j, e in enumerate(error_generators(g, n)):
            for h in circuit.gates[i + 1:]:
                e = conjugate(e, h)
            out.append((i, j, e))
    return out


WEIGHT_MODES = ("auto", "joint", "css")


def is_css_target(target: LogicalTarget) -> bool:
    """True if every target row is purely X-type or purely Z-type."""
    return all(not (x and z) for x, z in zip(target.tableau.x.tolist(), target.tableau.z.tolist()))


def resolve_weight_mode(target: LogicalTarget, mode: str = "auto") -> str:
    """``joint`` weighs the whole data error; ``css`` weighs X and Z parts apart.

    In ``css`` mode an error is as heavy as the heavier of its X part (reduced
    by the X-type group elements) and its Z part (reduced by the Z-type ones),
    which matches decoding the two halves independently.  The half of the
    same type as the logical row counts as weight 0 once it is not already
    trivial: after decoding, any such residual lies in the state's group
    (e.g. Z errors on |0>_L).  ``auto`` picks ``css`` whenever the target
    rows allow it.
    """
    if mode not in WEIGHT_MODES:
        raise ValueError(f"weight mode must be one of {WEIGHT_MODES}")
    if mode == "auto":
        return "css" if is_css_target(target) else "joint"
    if mode == "css" and not is_css_target(target):
        raise ValueError("css weight mode needs X-type and Z-type target rows only")
    return mode


def _span_elements(xs, zs):
    gx = np.zeros(1, dtype=np.uint64)
    gz = np.zeros(1, dtype=np.uint64)
    for x, z in zip(xs, zs):
        gx = np.concatenate([gx, gx ^ np.uint64(x)])
        gz = np.concatenate([gz, gz ^ np.uint64(z)])
    return gx, gz


class _GroupCache:
    """Group element arrays per (target, mode)."""

    def __init__(self):
        self._store = {}

    def get(self, target: LogicalTarget, mode: str):
        key = (id(target), mode)
        hit = self._store.get(key)
        if hit is None or hit[0] is not target:
            if mode == "joint":
                groups = [state_stabilizer_group(target)]
            else:
                xs = [int(x) for x, z in zip(target.tableau.x, target.tableau.z) if x]
                zs = [int(z) for x, z in zip(target.tableau.x, target.tableau.z) if z]
                groups = [_span_elements(xs, [0] * len(xs)), _span_elements([0] * len(zs), zs)]
            hit = self._store[key] = (target, groups)
        return hit[1]


_GROUPS = _GroupCache()


def _masks(n_data: int, n_qubits: int):
    dmask = np.uint64((1 << n_data) - 1)
    fmask = np.uint64(((1 << n_qubits) - 1) ^ ((1 << n_data) - 1))
    return dmask, fmask


def min_weight_data(ex, ez, target: LogicalTarget, n_data: int, mode: str = "auto") -> np.ndarray:
    """Minimum data-qubit weight of each error over products with the group.

    See ``resolve_weight_mode`` for how the X and Z parts are combined.
    """
    mode = resolve_weight_mode(target, mode)
    dmask = np.uint64((1 << n_data) - 1)
    ex = np.ascontiguousarray(np.asarray(ex, np.uint64) & dmask)
    ez = np.ascontiguousarray(np.asarray(ez, np.uint64) & dmask)
    groups = _GROUPS.get(target, mode)
    if mode == "joint":
        return kernels.min_weight_rows(ex, ez, *groups[0])
    zero = np.zeros_like(ex)
    free_x, free_z = _free_halves(target)
    wx = kernels.min_weight_rows(ex, zero, *groups[0])
    wz = kernels.min_weight_rows(zero, ez, *groups[1])
    # a free half can never push the error past t, but stays nonzero
    if free_x:
        wx = np.minimum(wx, 1)
    if free_z:
        wz = np.minimum(wz, 1)
    return np.maximum(wx, wz)


def _free_halves(target: LogicalTarget):
    """Which Pauli type the target's logical row carries (CSS targets)."""
    lg = target.logical
    if lg is None:
        return False, False
    return bool(lg.x) and not lg.z, bool(lg.z) and not lg.x


def flag_triggered(ex, n_data: int, n_qubits: int) -> np.ndarray:
    _, fmask = _masks(n_data, n_qubits)
    return (np.asarray(ex, np.uint64) & fmask) != 0


def classify_errors(errors: FaultErrorSet, target: LogicalTarget, n_data: int,
                    mode: str = "auto") -> np.ndarray:
    """One ``ErrorClass`` code per error in the set."""
    w = min_weight_data(errors.x, errors.z, target, n_data, mode)
    fl = flag_triggered(errors.x, n_data, errors.n)
    return _classes(w, fl, target.t)


def _classes(w, fl, t):
    out = np.full(len(w), int(ErrorClass.HARMFUL_UNFLAGGED), np.int8)
    harm = w > t
    out[harm & fl] = ErrorClass.HARMFUL_FLAGGED
    out[~harm] = ErrorClass.TOLERABLE
    out[(w == 0) & fl] = ErrorClass.TRIVIAL_FLAGGED
    return out


def f_value(errors: FaultErrorSet, target: LogicalTarget, n_data: int, mode: str = "auto") -> float:
    """Fraction of errors that are tolerable or caught by a flag (1 for no errors)."""
    if len(errors) == 0:
        return 1.0
    cls = classify_errors(errors, target, n_data, mode)
    good = (cls == ErrorClass.TOLERABLE) | (cls == ErrorClass.HARMFUL_FLAGGED)
    return float(np.count_nonzero(good)) / len(cls)


def count_harmful_unflagged(errors: FaultErrorSet, target: LogicalTarget, n_data: int,
                            mode: str = "auto") -> int:
    if len(errors) == 0:
        return 0
    cls = classify_errors(errors, target, n_data, mode)
    return int(np.count_nonzero(cls == ErrorClass.HARMFUL_UNFLAGGED))


# ---- independent verifier -------------------------------------------------


class _Span:
    """GF(2) row space of the target rows, for membership tests on bit masks."""

    def __init__(self, rows: Sequence[PauliOperator]):
        self.basis = []  # (pivot_bit_index, x, z) with pivots on the 2n-bit vector
        for p in rows:
            self.add(p.x, p.z)

    def _reduce(self, x, z):
        for piv, bx, bz in self.basis:
            if ((x | (z << 64)) >> piv) & 1:
                x ^= bx
                z ^= bz
        return x, z

    def add(self, x, z):
        x, z = self._reduce(x, z)
        v = x | (z << 64)
        if v:
            piv = (v & -v).bit_length() - 1
            self.basis = [(p, bx ^ x, bz ^ z) if ((bx | (bz << 64)) >> piv) & 1 else (p, bx, bz)
                          for p, bx, bz in self.basis]
            self.basis.append((piv, x, z))

    def contains(self, x, z) -> bool:
        x, z = self._reduce(x, z)
        return x == 0 and z == 0


def _weight_le(span: _Span, x: int, z: int, n: int, t: int, letters_set="XYZ") -> Optional[int]:
    """Smallest w <= t such that the error times some weight-w Pauli is in the span."""
    for w in range(t + 1):
        for qs in combinations(range(n), w):
            for letters in product(letters_set, repeat=w):
                cx, cz = x, z
                for q, ch in zip(qs, letters):
                    bx, bz = _BITS[ch]
                    cx ^= bx << q
                    cz ^= bz << q
                if span.contains(cx, cz):
                    return w
    return None


@dataclass
class VerificationReport:
    ft: bool
    state_ok: bool
    flags_ok: bool
    n_faults: int
    harmful: List[Tuple[int, int, PauliOperator]] = field(default_factory=list)
    flagged_harmful: int = 0
    trivial_flagged: int = 0

    def lines(self) -> List[str]:
        out = []
        if not self.state_ok:
            out.append("STATE data qubits do not hold the target state")
        if not self.flags_ok:
            out.append("STATE flag qubits are not left in +Z")
        for i, j, e in self.harmful:
            out.append(f"HARMFUL gate={i} gen={j} pauli={e.letters()}")
        out.append(f"FT={'yes' if self.ft else 'no'} errors={len(self.harmful)} "
                   f"flagged_tolerable={self.flagged_harmful}")
        return out

    def __str__(self):
        return "\n".join(self.lines())


def check_output_state(circuit: Circuit, target: LogicalTarget) -> Tuple[bool, bool]:
    """(data holds target, every flag is +Z) for the noiseless circuit."""
    if circuit.n_data != target.n:
        raise ValueError(f"circuit has {circuit.n_data} data qubits, target needs {target.n}")
    final = circuit.simulate()
    n = circuit.n_qubits
    state_ok = all(stabilizer_sign(final, p.pad(n)) == 1 for p in target.tableau.rows())
    flags_ok = all(stabilizer_sign(final, PauliOperator(n, 0, 1 << q)) == 1
                   for q in range(circuit.n_data, n))
    return state_ok, flags_ok


def _css_weight_le(spans, free, x, z, n, t):
    wx = _weight_le(spans[0], x, 0, n, t, "X")
    wz = _weight_le(spans[1], 0, z, n, t, "Z")
    if free[0]:
        wx = 0 if spans[0].contains(x, 0) else 1
    if free[1]:
        wz = 0 if spans[1].contains(0, z) else 1
    if wx is None or wz is None:
        return None
    return max(wx, wz)


def verify_fault_tolerance(circuit: Circuit, target: LogicalTarget,
                           mode: str = "auto") -> VerificationReport:
    """Check single-fault tolerance of a preparation circuit (independent route)."""
    state_ok, flags_ok = check_output_state(circuit, target)
    nd, t = circuit.n_data, target.t
    mode = resolve_weight_mode(target, mode)
    rows = target.tableau.rows()
    if mode == "joint":
        span = _Span(rows)
        weigh = lambda x, z: _weight_le(span, x, z, nd, t)
    else:
        spans = (_Span([p for p in rows if p.x]), _Span([p for p in rows if p.z]))
        free = _free_halves(target)
        weigh = lambda x, z: _css_weight_le(spans, free, x, z, nd, t)
    dmask = (1 << nd) - 1
    fmask = ((1 << circuit.n_qubits) - 1) ^ dmask
    cache = {}
    rep = VerificationReport(False, state_ok, flags_ok, 0)
    for i, j, e in per_fault_errors(circuit):
        rep.n_faults += 1
        key = (e.x & dmask, e.z & dmask)
        if key not in cache:
            cache[key] = weigh(*key)
        w = cache[key]
        flagged = bool(e.x & fmask)
        if w is None:
            if flagged:
                rep.flagged_harmful += 1
            else:
                rep.harmful.append((i, j, e))
        elif w == 0 and flagged:
            rep.trivial_flagged += 1
    rep.ft = state_ok and flags_ok and not rep.harmful
    return rep
