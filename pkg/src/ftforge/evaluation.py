"""Monte-Carlo evaluation of preparation circuits with Pauli frames.

Each gate is followed, with probability ``p``, by a uniformly random
non-identity Pauli on its qubits.  A trial is accepted when no flag qubit
reads 1 (its frame has an X component).  Accepted trials get one perfect
round of lookup-table decoding; a logical error is a corrected residual that
anticommutes with the signed logical operator of the target state.
"""

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import List, Optional, Sequence

import numpy as np

from . import kernels
from .circuit import Circuit
from .codes import LogicalTarget
from .faults import _generator_arrays, check_output_state
from .pauli import PauliOperator, commutes

CHUNK = 1 << 14
Z95 = 1.959963984540054

_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def _parity(v):
    return (np.bitwise_count(v) & 1).astype(np.int64)


@dataclass
class Decoder:
    """Lookup tables from syndrome to a minimum-weight correction (weight <= t).

    CSS codes get two tables, one per error type, indexed by the syndromes of
    the opposite-type generators; other codes get a single joint table.
    """

    n: int
    css: bool
    gen_x: np.ndarray
    gen_z: np.ndarray
    table_x: np.ndarray  # correction x bits per syndrome
    table_z: np.ndarray
    known: np.ndarray  # syndrome has a table entry
    split: int = 0  # CSS: number of Z-type generators (low syndrome bits)

    def syndromes(self, ex, ez):
        s = np.zeros(len(ex), np.int64)
        for i, (gx, gz) in enumerate(zip(self.gen_x, self.gen_z)):
            s |= (_parity(ex & gz) ^ _parity(ez & gx)) << i
        return s

    def correct(self, ex, ez):
        """Corrected residuals (x, z) and a mask of syndromes with no table entry."""
        s = self.syndromes(ex, ez)
        if not self.css:
            return ex ^ self.table_x[s], ez ^ self.table_z[s], ~self.known[s]
        lo = s & ((1 << self.split) - 1)
        hi = s >> self.split
        cx = self.table_x[lo]
        cz = self.table_z[hi]
        miss = ~(self.known[0][lo] & self.known[1][hi])
        return ex ^ cx, ez ^ cz, miss


def _low_weight(n, t, letters):
    yield 0, 0
    for w in range(1, t + 1):
        for qs in combinations(range(n), w):
            for ls in product(letters, repeat=w):
                x = z = 0
                for q, ch in zip(qs, ls):
                    bx, bz = _BITS[ch]
                    x |= bx << q
                    z |= bz << q
                yield x, z


def build_decoder(target: LogicalTarget) -> Decoder:
    code = target.code
    if code is None:
        raise ValueError("decoding needs a code target")
    gens = list(code.generators)
    n, t = code.n, code.t
    css = all(not (g.x and g.z) for g in gens)
    if css:
        zg = [g for g in gens if g.z]
        xg = [g for g in gens if g.x]
        order = zg + xg
        gx = np.array([g.x for g in order], np.uint64)
        gz = np.array([g.z for g in order], np.uint64)
        tx = np.zeros(1 << len(zg), np.uint64)
        kx = np.zeros(1 << len(zg), bool)
        for x, _ in _low_weight(n, t, "X"):
            s = sum(((x & g.z).bit_count() & 1) << i for i, g in enumerate(zg))
            if not kx[s]:
                kx[s], tx[s] = True, x
        tz = np.zeros(1 << len(xg), np.uint64)
        kz = np.zeros(1 << len(xg), bool)
        for _, z in _low_weight(n, t, "Z"):
            s = sum(((z & g.x).bit_count() & 1) << i for i, g in enumerate(xg))
            if not kz[s]:
                kz[s], tz[s] = True, z
        return Decoder(n, True, gx, gz, tx, tz, (kx, kz), len(zg))
    gx = np.array([g.x for g in gens], np.uint64)
    gz = np.array([g.z for g in gens], np.uint64)
    m = len(gens)
    tx = np.zeros(1 << m, np.uint64)
    tz = np.zeros(1 << m, np.uint64)
    known = np.zeros(1 << m, bool)
    for x, z in _low_weight(n, t, "XYZ"):
        p = PauliOperator(n, x, z)
        s = sum((0 if commutes(p, g) else 1) << i for i, g in enumerate(gens))
        if not known[s]:
            known[s], tx[s], tz[s] = True, x, z
    return Decoder(n, False, gx, gz, tx, tz, known)


def logical_failures(ex, ez, target: LogicalTarget, decoder: Decoder) -> np.ndarray:
    """Vectorized logical-failure test for data residuals (x, z arrays).

    A syndrome with no table entry counts as a failure.
    """
    ex = np.asarray(ex, np.uint64)
    ez = np.asarray(ez, np.uint64)
    rx, rz, miss = decoder.correct(ex, ez)
    lg = target.logical
    flip = (_parity(rx & np.uint64(lg.z)) ^ _parity(rz & np.uint64(lg.x))).astype(bool)
    return flip | miss


def logical_failure(residual: PauliOperator, target: LogicalTarget, decoder: Decoder) -> bool:
    rx, rz, _ = decoder.correct(np.array([residual.x], np.uint64), np.array([residual.z], np.uint64))
    r = PauliOperator(residual.n, int(rx[0]), int(rz[0]))
    if any(not commutes(r, g) for g in target.code.generators):
        return True
    return not commutes(r, target.logical)


# ---- frame simulation ---------------------------------------------------------


def sample_faults(circuit: Circuit, p: float, trials: int, rng):
    """Per gate, the (trial indices, generator indices) struck by a fault."""
    out = []
    for g in circuit.gates:
        hit = np.flatnonzero(rng.random(trials) < p)
        ng = 3 if len(g.qubits) == 1 else 15
        out.append((hit, rng.integers(0, ng, len(hit))))
    return out


def run_frames(circuit: Circuit, faults, trials: int):
    """Propagate the sampled faults; returns final frame (x, z) arrays."""
    fx = np.zeros(trials, np.uint64)
    fz = np.zeros(trials, np.uint64)
    fr = np.zeros(trials, np.uint8)
    for g, (hit, gen) in zip(circuit.gates, faults):
        b = g.qubits[1] if len(g.qubits) == 2 else -1
        kernels.conjugate_rows(fx, fz, fr, g.code, g.qubits[0], b)
        if len(hit):
            gx, gz = _generator_arrays(g)
            fx[hit] ^= gx[gen]
            fz[hit] ^= gz[gen]
    return fx, fz


def _chunk_counts(circuit, target, decoder, p, n, seed, p_index, chunk_index):
    rng = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), (p_index << 32) | chunk_index]))
    faults = sample_faults(circuit, p, n, rng)
    fx, fz = run_frames(circuit, faults, n)
    nd = circuit.n_data
    dmask = np.uint64((1 << nd) - 1)
    fmask = np.uint64(((1 << circuit.n_qubits) - 1) ^ ((1 << nd) - 1))
    acc = (fx & fmask) == 0
    fail = logical_failures(fx[acc] & dmask, fz[acc] & dmask, target, decoder)
    return int(acc.sum()), int(fail.sum())


def wilson_interval(k: int, n: int, z: float = Z95):
    if n == 0:
        return float("nan"), float("nan")
    ph = k / n
    den = 1 + z * z / n
    c = (ph + z * z / (2 * n)) / den
    h = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    lo = 0.0 if k == 0 else max(0.0, c - h)
    hi = 1.0 if k == n else min(1.0, c + h)
    return lo, hi


@dataclass
class EvalRow:
    """One p value.  Counts are expected counts (floats) for stratified runs."""

    p: float
    trials: int
    accepted: float
    logical_errors: float
    acceptance_rate: float
    logical_error_rate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_counts(cls, p, trials, accepted, errors):
        acc = accepted / trials if trials else float("nan")
        ler = errors / accepted if accepted else float("nan")
        lo, hi = wilson_interval(errors, accepted)
        return cls(p, trials, accepted, errors, acc, ler, lo, hi)

    @property
    def ci(self):
        return self.ci_low, self.ci_high


@dataclass
class EvalReport:
    rows: List[EvalRow]
    gate_count: int
    slope: float = float("nan")
    intercept: float = float("nan")
    r2: float = float("nan")
    accept_coeff: float = float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "trials", "accepted", "acceptance_rate", "logical_errors",
                    "logical_error_rate", "ler_ci_low", "ler_ci_high"])
        for r in self.rows:
            w.writerow([f"{r.p:.6g}", r.trials, _fmt(r.accepted), f"{r.acceptance_rate:.6g}",
                        _fmt(r.logical_errors), _fmt(r.logical_error_rate), _fmt(r.ci_low), _fmt(r.ci_high)])
        w.writerow(["slope", f"{self.slope:.6g}"])
        w.writerow(["intercept", f"{self.intercept:.6g}"])
        w.writerow(["r2", f"{self.r2:.6g}"])
        return buf.getvalue()


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "undefined" if math.isnan(v) else f"{v:.6g}"


def fit_loglog(ps, rates):
    """Least-squares line through (ln p, ln rate); points with rate <= 0 are dropped."""
    pts = [(math.log(p), math.log(r)) for p, r in zip(ps, rates) if r > 0 and not math.isnan(r)]
    if len(pts) < 2:
        return float("nan"), float("nan"), float("nan")
    x = np.array([a for a, _ in pts])
    y = np.array([b for _, b in pts])
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss = ((y - y.mean()) ** 2).sum()
    r2 = 1 - (resid ** 2).sum() / ss if ss > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def fit_acceptance(ps, acc, gate_count):
    """Coefficient c in acceptance ~ exp(-c * G * p), least squares through the origin."""
    x = np.array(ps) * gate_count
    y = -np.log(np.clip(np.array(acc, float), 1e-300, None))
    den = float((x * x).sum())
    return float((x * y).sum() / den) if den else float("nan")


def default_p_grid(lo=3e-4, hi=1e-2, n=8):
    return list(np.geomspace(lo, hi, n))


def _sample_exact(circuit: Circuit, k: int, trials: int, rng):
    """Faults at exactly ``k`` distinct gate locations per trial."""
    G = len(circuit)
    locs = np.argsort(rng.random((trials, G)), axis=1)[:, :k]
    hitmask = np.zeros((trials, G), bool)
    np.put_along_axis(hitmask, locs, True, axis=1)
    out = []
    for j, g in enumerate(circuit.gates):
        hit = np.flatnonzero(hitmask[:, j])
        ng = 3 if len(g.qubits) == 1 else 15
        out.append((hit, rng.integers(0, ng, len(hit))))
    return out


def _stratum_counts(circuit, target, decoder, k, n, seed, chunk_index):
    rng = np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), (1 << 63) | (k << 32) | chunk_index]))
    fx, fz = run_frames(circuit, _sample_exact(circuit, k, n, rng), n)
    nd = circuit.n_data
    dmask = np.uint64((1 << nd) - 1)
    fmask = np.uint64(((1 << circuit.n_qubits) - 1) ^ ((1 << nd) - 1))
    acc = (fx & fmask) == 0
    fail = logical_failures(fx[acc] & dmask, fz[acc] & dmask, target, decoder)
    return int(acc.sum()), int(fail.sum())


def _binom_pmf(G, p):
    k = np.arange(G + 1)
    logc = np.array([math.lgamma(G + 1) - math.lgamma(i + 1) - math.lgamma(G - i + 1) for i in k])
    with np.errstate(divide="ignore"):
        return np.exp(logc + k * math.log(p) + (G - k) * math.log1p(-p))


def _map(fn, jobs, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


def evaluate(circuit: Circuit, target: LogicalTarget, ps: Optional[Sequence[float]] = None,
             trials: int = 100_000, seed: int = 0, threads: int = 1,
             method: str = "direct", tail: float = 1e-10) -> EvalReport:
    """Acceptance and logical error rate per physical error rate ``p``.

    ``method="direct"`` samples the noise model as is.  ``"stratified"``
    spends the same total budget (``trials * len(ps)``) on runs with exactly
    k = 1..K faults and reweights by the binomial fault-count distribution;
    K is the smallest count whose upper tail at the largest p is below
    ``tail``.  Both are unbiased; the stratified one resolves small rates.
    """
    state_ok, flags_ok = check_output_state(circuit, target)
    if not (state_ok and flags_ok):
        raise ValueError("circuit does not prepare the target state with flags in |0>")
    ps = default_p_grid() if ps is None else list(ps)
    if method not in ("direct", "stratified"):
        raise ValueError("method must be 'direct' or 'stratified'")
    decoder = build_decoder(target)
    if method == "direct":
        rows = _direct(circuit, target, decoder, ps, trials, seed, threads)
    else:
        rows = _stratified(circuit, target, decoder, ps, trials, seed, threads, tail)
    rep = EvalReport(rows, len(circuit))
    rep.slope, rep.intercept, rep.r2 = fit_loglog(ps, [r.logical_error_rate for r in rows])
    rep.accept_coeff = fit_acceptance(ps, [r.acceptance_rate for r in rows], len(circuit))
    return rep


def _direct(circuit, target, decoder, ps, trials, seed, threads):
    jobs = []
    for j in range(len(ps)):
        for c, s in enumerate(range(0, trials, CHUNK)):
            jobs.append((j, c, min(CHUNK, trials - s)))
    run = lambda job: _chunk_counts(circuit, target, decoder, ps[job[0]], job[2], seed, job[0], job[1])
    counts = _map(run, jobs, threads)
    acc = [0] * len(ps)
    err = [0] * len(ps)
    for (j, _, _), (a, e) in zip(jobs, counts):
        acc[j] += a
        err[j] += e
    return [EvalRow.from_counts(p, trials, a, e) for p, a, e in zip(ps, acc, err)]


def _stratified(circuit, target, decoder, ps, trials, seed, threads, tail):
    G = len(circuit)
    if G == 0:
        return [EvalRow.from_counts(p, trials, trials, 0) for p in ps]
    pmf_max = _binom_pmf(G, max(ps))
    K = G
    for k in range(1, G + 1):
        if pmf_max[k + 1:].sum() < tail:
            K = k
            break
    per = max(1, (trials * len(ps)) // K)
    jobs = []
    for k in range(1, K + 1):
        for c, s in enumerate(range(0, per, CHUNK)):
            jobs.append((k, c, min(CHUNK, per - s)))
    run = lambda job: _stratum_counts(circuit, target, decoder, job[0], job[2], seed, job[1])
    counts = _map(run, jobs, threads)
    a_k = np.zeros(K + 1)
    e_k = np.zeros(K + 1)
    for (k, _, _), (a, e) in zip(jobs, counts):
        a_k[k] += a
        e_k[k] += e
    a_k[1:] /= per
    e_k[1:] /= per
    a_k[0] = 1.0
    rows = []
    for p in ps:
        w = _binom_pmf(G, p)[: K + 1]
        acc = float((w * a_k).sum())
        bad = float((w * e_k).sum())
        ler = bad / acc if acc > 0 else float("nan")
        # normal approximation on the per-stratum binomial estimates
        sd = math.sqrt(float((w[1:] ** 2 * e_k[1:] * (1 - e_k[1:]) / per).sum())) / acc if acc > 0 else float("nan")
        rows.append(EvalRow(p, trials, acc * trials, bad * trials, acc, ler,
                            max(0.0, ler - Z95 * sd), ler + Z95 * sd))
    return rows
