import numpy as np
import pytest

from ftforge.circuit import Circuit
from ftforge.codes import builtin_code, ghz_target, make_target, state_stabilizer_group
from ftforge.faults import (ErrorClass, FaultErrorSet, classify_errors, count_harmful_unflagged,
                            error_generators, f_value, min_weight_data, per_fault_errors,
                            resolve_weight_mode, verify_fault_tolerance)
from ftforge.gates import make_gate

from conftest import fixture, fixture_names

FT_FIXTURES = [n for n in fixture_names() if n != "steane_zero_goto" and n != "steane_zero_lsp"]


def test_generator_counts_and_order():
    one = error_generators(make_gate("H", 1), 3)
    assert [p.letters() for p in one] == ["IXI", "IYI", "IZI"]
    two = error_generators(make_gate("CX", 0, 2), 3)
    assert len(two) == 15
    assert [p.letters() for p in two[:4]] == ["IIX", "IIY", "IIZ", "XII"]


@pytest.mark.parametrize("name", fixture_names())
def test_extend_matches_per_fault_oracle(name):
    circ, _ = fixture(name)
    fast = FaultErrorSet.from_circuit(circ)
    slow = {(e.x, e.z) for _, _, e in per_fault_errors(circ)}
    got = list(zip(fast.x.tolist(), fast.z.tolist()))
    assert len(got) == len(set(got))
    assert set(got) == slow
    # no propagated error is ever the identity
    assert all(x or z for x, z in got)


def test_per_fault_count():
    circ, _ = fixture("steane_zero_goto")
    assert len(per_fault_errors(circ)) == 3 * 3 + 15 * 8


@pytest.mark.parametrize("name", FT_FIXTURES)
def test_reference_ft_circuits_verify(name):
    circ, target = fixture(name)
    rep = verify_fault_tolerance(circ, target)
    assert rep.state_ok and rep.flags_ok
    assert rep.ft, rep.lines()[:3]
    es = FaultErrorSet.from_circuit(circ)
    assert count_harmful_unflagged(es, target, circ.n_data) == 0


def test_goto_alone_not_ft():
    circ, target = fixture("steane_zero_goto")
    rep = verify_fault_tolerance(circ, target)
    assert rep.state_ok and not rep.ft and len(rep.harmful) >= 1
    es = FaultErrorSet.from_circuit(circ)
    assert count_harmful_unflagged(es, target, 7) >= 1
    assert rep.lines()[-1].startswith("FT=no")


def test_goto_with_flag():
    circ, target = fixture("steane_zero_goto_flag")
    rep = verify_fault_tolerance(circ, target)
    assert rep.ft and rep.flagged_harmful > 0
    es = FaultErrorSet.from_circuit(circ)
    cls = classify_errors(es, target, 7)
    assert not np.any(cls == ErrorClass.HARMFUL_UNFLAGGED)
    # an X fault on the flag after its last gate is flagged but harmless
    assert np.any(cls == ErrorClass.TRIVIAL_FLAGGED)
    assert 0.9 < f_value(es, target, 7) < 1.0


def test_wrong_state_detected():
    circ, _ = fixture("steane_zero_goto")
    rep = verify_fault_tolerance(circ, make_target(builtin_code("steane"), "1"))
    assert not rep.state_ok and not rep.ft


def test_routes_agree_on_harmful_errors():
    for name in ["steane_zero_goto", "steane_zero_lsp", "steane_zero_goto_flag", "perfect5_minus_flag2"]:
        circ, target = fixture(name)
        es = FaultErrorSet.from_circuit(circ)
        cls = classify_errors(es, target, circ.n_data)
        fast = {(int(x), int(z)) for x, z, c in zip(es.x, es.z, cls) if c == ErrorClass.HARMFUL_UNFLAGGED}
        slow = {(e.x, e.z) for _, _, e in verify_fault_tolerance(circ, target).harmful}
        assert fast == slow, name


def brute_joint_weight(x, z, target, nd):
    gx, gz = state_stabilizer_group(target)
    return min(int(((x ^ int(a)) | (z ^ int(b))) & ((1 << nd) - 1)).bit_count() for a, b in zip(gx, gz))


def test_joint_weight_vs_brute_force():
    target = make_target(builtin_code("perfect5"), "-")
    rng = np.random.default_rng(2)
    ex = rng.integers(0, 32, 200, dtype=np.uint64)
    ez = rng.integers(0, 32, 200, dtype=np.uint64)
    got = min_weight_data(ex, ez, target, 5, "joint")
    assert got.tolist() == [brute_joint_weight(int(a), int(b), target, 5) for a, b in zip(ex, ez)]


def test_css_mode_separates_halves():
    target = make_target(builtin_code("steane"), "0")
    assert resolve_weight_mode(target) == "css"
    assert resolve_weight_mode(make_target(builtin_code("perfect5"), "0")) == "joint"
    with pytest.raises(ValueError):
        resolve_weight_mode(make_target(builtin_code("perfect5"), "0"), "css")
    # X on one qubit and Z on another: joint weight 2, but each half has weight 1
    x, z = np.array([1 << 3], np.uint64), np.array([1 << 5], np.uint64)
    assert min_weight_data(x, z, target, 7, "joint")[0] == 2
    assert min_weight_data(x, z, target, 7, "css")[0] == 1
    # a weight-2 X error is harmful either way
    x2 = np.array([(1 << 0) | (1 << 1)], np.uint64)
    assert min_weight_data(x2, np.zeros(1, np.uint64), target, 7, "css")[0] == 2
    # Z errors on |0>_L never exceed weight 1 in css mode
    zz = np.array([0b0000111], np.uint64)
    assert min_weight_data(np.zeros(1, np.uint64), zz, target, 7, "css")[0] <= 1


def test_empty_error_set():
    t = ghz_target(3)
    es = FaultErrorSet(3)
    assert f_value(es, t, 3) == 1.0 and count_harmful_unflagged(es, t, 3) == 0


def test_extend_deduplicates():
    es = FaultErrorSet(2)
    es.extend(make_gate("H", 0)).extend(make_gate("H", 0))
    # X,Y,Z pushed through H become Z,Y,X which are the new faults again
    assert len(es) == 3
