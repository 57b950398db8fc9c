import math
from collections import Counter

import numpy as np
import pytest

from ftforge.circuit import Circuit
from ftforge.codes import builtin_code, builtin_names, make_target
from ftforge.evaluation import (EvalReport, EvalRow, _sample_exact, build_decoder, evaluate, fit_acceptance,
                                fit_loglog, logical_failure, logical_failures, run_frames, sample_faults,
                                wilson_interval)
from ftforge.faults import error_generators, per_fault_errors
from ftforge.gates import make_gate
from ftforge.pauli import PauliOperator
from ftforge.tableau import StabilizerTableau, canonicalize, stabilizer_sign

from conftest import fixture


def apply_pauli(tab, x, z):
    """Conjugate a state tableau by the Pauli (x, z): flip anticommuting rows."""
    anti = (np.bitwise_count(tab.x & np.uint64(z)) + np.bitwise_count(tab.z & np.uint64(x))) & 1
    tab.r ^= (2 * anti).astype(np.uint8)
    return tab


def random_circuit(seed, n_data=4, n_flag=1, length=20):
    rng = np.random.default_rng(seed)
    n = n_data + n_flag
    c = Circuit(n_data, n_flag)
    kinds = ["H", "S", "X", "SX", "CX", "CZ"]
    for _ in range(length):
        k = kinds[rng.integers(len(kinds))]
        a, b = (int(v) for v in rng.choice(n, 2, replace=False))
        c.append(make_gate(k, a) if k in ("H", "S", "X", "SX") else make_gate(k, a, b))
    return c


@pytest.mark.parametrize("name", ["steane_zero_goto_flag", "steane_zero_goto", "random"])
def test_frames_match_full_tableau(name):
    circ = random_circuit(2) if name == "random" else fixture(name)[0]
    assert len(circ) <= 20
    n = circ.n_qubits
    trials = 5000
    rng = np.random.default_rng(11)
    faults = sample_faults(circ, 0.08, trials, rng)
    fx, fz = run_frames(circ, faults, trials)
    clean = circ.simulate()
    per_trial = [[] for _ in range(trials)]
    for gi, (hit, gen) in enumerate(faults):
        gens = error_generators(circ.gates[gi], n)
        for t, j in zip(hit.tolist(), gen.tolist()):
            per_trial[t].append((gi, gens[j]))
    for t in range(trials):
        tab = StabilizerTableau.zero_state(n)
        events = dict()
        for gi, e in per_trial[t]:
            events.setdefault(gi, []).append(e)
        for gi, g in enumerate(circ.gates):
            tab.apply(g)
            for e in events.get(gi, []):
                apply_pauli(tab, e.x, e.z)
        want = apply_pauli(clean.copy(), int(fx[t]), int(fz[t]))
        assert canonicalize(tab) == canonicalize(want)
        for q in range(circ.n_data, n):
            zf = PauliOperator(n, 0, 1 << q)
            if stabilizer_sign(clean, zf) == 1:
                flipped = stabilizer_sign(tab, zf) == -1
                assert flipped == bool((int(fx[t]) >> q) & 1)


def test_single_fault_residuals_match_enumeration():
    circ, _ = fixture("steane_zero_goto")
    G = len(circ)
    trials = 1_000_000
    rng = np.random.Generator(np.random.Philox(key=[5, 0]))
    fx, fz = run_frames(circ, _sample_exact(circ, 1, trials, rng), trials)
    got = Counter(zip(fx.tolist(), fz.tolist()))
    expect = Counter()
    for gi, j, e in per_fault_errors(circ):
        ng = 3 if len(circ.gates[gi].qubits) == 1 else 15
        expect[(e.x, e.z)] += 1.0 / (G * ng)
    assert set(got) == set(expect)
    for k, p in expect.items():
        sigma = math.sqrt(trials * p * (1 - p))
        assert abs(got[k] - trials * p) <= 3 * sigma + 1, k


def test_thread_count_does_not_change_report():
    circ, target = fixture("steane_zero_goto_flag")
    for method in ("direct", "stratified"):
        a = evaluate(circ, target, [1e-3, 1e-2], 40_000, seed=4, threads=1, method=method).to_csv()
        b = evaluate(circ, target, [1e-3, 1e-2], 40_000, seed=4, threads=3, method=method).to_csv()
        assert a == b
    c = evaluate(circ, target, [1e-2], 40_000, seed=5).to_csv()
    assert c != evaluate(circ, target, [1e-2], 40_000, seed=4).to_csv()


def test_noiseless_point():
    circ, target = fixture("steane_zero_goto_flag")
    rep = evaluate(circ, target, [0.0], 1000)
    r = rep.rows[0]
    assert r.acceptance_rate == 1.0 and r.logical_errors == 0


def test_stratified_agrees_with_direct():
    circ, target = fixture("steane_zero_goto_flag")
    ps = [0.02]
    d = evaluate(circ, target, ps, 100_000, seed=1).rows[0]
    s = evaluate(circ, target, ps, 100_000, seed=1, method="stratified", tail=1e-12).rows[0]
    assert d.ci_low <= s.logical_error_rate <= d.ci_high
    lo, hi = wilson_interval(int(d.accepted), d.trials)
    assert lo <= s.acceptance_rate <= hi


def test_rejects_wrong_circuit():
    circ, _ = fixture("steane_zero_goto")
    with pytest.raises(ValueError):
        evaluate(circ, make_target(builtin_code("steane"), "+"), [1e-3], 100)


@pytest.mark.parametrize("name", builtin_names())
def test_decoder_corrects_all_single_errors(name):
    code = builtin_code(name)
    target = make_target(code, "0")
    dec = build_decoder(target)
    n = code.n
    xs, zs = [0], [0]
    for q in range(n):
        for bx, bz in ((1, 0), (1, 1), (0, 1)):
            xs.append(bx << q)
            zs.append(bz << q)
    fail = logical_failures(np.array(xs, np.uint64), np.array(zs, np.uint64), target, dec)
    assert not fail.any()
    s = dec.syndromes(np.zeros(1, np.uint64), np.zeros(1, np.uint64))
    assert s[0] == 0


def test_decoder_scalar_and_vector_agree():
    target = make_target(builtin_code("perfect5"), "-")
    dec = build_decoder(target)
    rng = np.random.default_rng(0)
    ex = rng.integers(0, 32, 300, dtype=np.uint64)
    ez = rng.integers(0, 32, 300, dtype=np.uint64)
    vec = logical_failures(ex, ez, target, dec)
    for a, b, f in zip(ex, ez, vec):
        assert logical_failure(PauliOperator(5, int(a), int(b)), target, dec) == f


def test_weight_two_x_error_is_logical():
    target = make_target(builtin_code("steane"), "0")
    dec = build_decoder(target)
    # X on two qubits decodes to a weight-3 logical X, flipping Z_L
    assert logical_failure(PauliOperator.from_string("XXIIIII"), target, dec)
    # any Z error leaves |0>_L alone
    assert not logical_failure(PauliOperator.from_string("ZZIIIII"), target, dec)


def test_fit_exact_power_laws():
    ps = np.geomspace(1e-4, 1e-2, 6)
    s, _, r2 = fit_loglog(ps, ps ** 2)
    assert abs(s - 2.0) < 1e-9 and r2 == pytest.approx(1.0)
    s, i, _ = fit_loglog(ps, 3 * ps)
    assert abs(s - 1.0) < 1e-9 and i == pytest.approx(math.log(3))


def test_fit_noisy_quadratic():
    rng = np.random.default_rng(0)
    ps = np.geomspace(3e-4, 3e-3, 6)
    for _ in range(20):
        rates = ps ** 2 * (1 + 0.05 * rng.standard_normal(6))
        s, _, _ = fit_loglog(ps, rates)
        assert 1.9 <= s <= 2.1


def test_fit_drops_zero_points():
    s, _, _ = fit_loglog([1e-3, 2e-3, 4e-3], [0.0, 4e-6, 16e-6])
    assert s == pytest.approx(2.0)
    assert math.isnan(fit_loglog([1e-3, 2e-3], [0.0, 1e-6])[0])


def test_fit_acceptance():
    ps = np.array([1e-3, 2e-3, 5e-3])
    assert fit_acceptance(ps, np.exp(-0.7 * 20 * ps), 20) == pytest.approx(0.7)


def test_undefined_rows_in_csv():
    rows = [EvalRow.from_counts(1e-3, 100, 0, 0), EvalRow.from_counts(2e-3, 100, 90, 9)]
    text = EvalReport(rows, 10).to_csv()
    lines = text.strip().splitlines()
    assert lines[0] == ("p,trials,accepted,acceptance_rate,logical_errors,logical_error_rate,"
                        "ler_ci_low,ler_ci_high")
    assert lines[1].endswith("undefined,undefined,undefined")
    assert lines[-3].startswith("slope,") and lines[-1].startswith("r2,")


def test_wilson():
    lo, hi = wilson_interval(0, 100)
    assert lo == 0.0 and 0.03 < hi < 0.04
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and hi - 0.5 == pytest.approx(0.5 - lo)
