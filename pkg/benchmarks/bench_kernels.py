"""Compare the compiled and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat N]

Three workloads, one per kernel: a Pauli-frame pass of the flagged Steane
encoder over 10^5 trials, canonicalizing a batch of random 17-qubit
tableaux, and minimum-weight search of a fault set over a 2^7 group.
Results are also checked for agreement.
"""

import argparse
import time
from importlib.resources import files

import numpy as np

from ftforge import kernels
from ftforge.circuit import load_circuit
from ftforge.codes import builtin_code, make_target, state_stabilizer_group
from ftforge.gates import make_gate
from ftforge.tableau import StabilizerTableau


def _best(fn, repeat):
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        ts.append(time.perf_counter() - t0)
    return min(ts), out


def frame_pass(mod, circ, trials, seed=0):
    rng = np.random.default_rng(seed)
    x0 = rng.integers(0, 1 << circ.n_qubits, trials, dtype=np.uint64)
    z0 = rng.integers(0, 1 << circ.n_qubits, trials, dtype=np.uint64)

    def run():
        x, z, r = x0.copy(), z0.copy(), np.zeros(trials, np.uint8)
        for g in circ.gates:
            b = g.qubits[1] if len(g.qubits) == 2 else -1
            mod.conjugate_rows(x, z, r, g.code, g.qubits[0], b)
        return x, z, r
    return run


def random_tableaux(n, count, seed=0):
    rng = np.random.default_rng(seed)
    tabs = []
    qs = list(range(n))
    for _ in range(count):
        t = StabilizerTableau.zero_state(n)
        for _ in range(4 * n):
            k = rng.integers(3)
            if k == 0:
                t.apply(make_gate("H", int(rng.integers(n))))
            elif k == 1:
                t.apply(make_gate("S", int(rng.integers(n))))
            else:
                a, b = rng.choice(qs, 2, replace=False)
                t.apply(make_gate("CX", int(a), int(b)))
        tabs.append(t)
    return tabs


def canon_batch(mod, tabs):
    def run():
        out = []
        for t in tabs:
            x, z, r = t.x.copy(), t.z.copy(), t.r.copy()
            mod.canonicalize_rows(x, z, r, t.n)
            out.append((x, z, r))
        return out
    return run


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trials", type=int, default=100_000)
    args = ap.parse_args(argv)
    mods = kernels.backends()
    if "compiled" not in mods:
        print("compiled extension not built; only the python backend is available")
    fx = files("ftforge") / "fixtures"
    circ = load_circuit(fx / "steane_zero_goto_flag.circ")
    tabs = random_tableaux(17, 200)
    target = make_target(builtin_code("steane"), "0")
    gx, gz = state_stabilizer_group(target)
    rng = np.random.default_rng(1)
    ex = rng.integers(0, 1 << 7, 5000, dtype=np.uint64)
    ez = rng.integers(0, 1 << 7, 5000, dtype=np.uint64)

    work = {
        f"frame pass ({args.trials} trials, {len(circ)} gates)": lambda m: frame_pass(m, circ, args.trials),
        "canonicalize (200 x 17 qubits)": lambda m: canon_batch(m, tabs),
        "min weight (5000 errors, 2^7 group)": lambda m: (lambda: m.min_weight_rows(ex, ez, gx, gz)),
    }
    print(f"{'workload':42s} " + " ".join(f"{k:>12s}" for k in mods) + "     speedup")
    for name, mk in work.items():
        times, outs = {}, {}
        for k, m in mods.items():
            times[k], outs[k] = _best(mk(m), args.repeat)
        ref = outs["python"]
        for k, o in outs.items():
            same = all(np.array_equal(a, b) for a, b in zip(_flat(ref), _flat(o)))
            if not same:
                raise SystemExit(f"backend {k} disagrees with python on {name}")
        sp = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{name:42s} " + " ".join(f"{times[k] * 1e3:10.2f}ms" for k in mods) + f"  {sp:8.1f}x")


def _flat(o):
    if isinstance(o, np.ndarray):
        return [o]
    out = []
    for v in o:
        out += _flat(v)
    return out


if __name__ == "__main__":
    main()
