from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ftforge.gates import make_gate
from ftforge.pauli import PauliOperator, commutes, conjugate, pauli_multiply, weight

from oracles import gate_matrix, matrix_to_pauli_letters, pauli_matrix

ONE_Q_GATES = ["H", "S", "X", "SX"]


def all_paulis(n):
    for letters in product("IXYZ", repeat=n):
        for ph in range(4):
            yield PauliOperator(n, *_bits("".join(letters)), ph)


def _bits(s):
    x = z = 0
    for q, c in enumerate(s):
        if c in "XY":
            x |= 1 << q
        if c in "ZY":
            z |= 1 << q
    return x, z


def test_string_round_trip():
    for s in ["+XIZY", "-YYZ", "+iXZ", "-iI", "IZX"]:
        p = PauliOperator.from_string(s)
        assert PauliOperator.from_string(str(p)) == p
    assert str(PauliOperator.from_string("-XIZ")) == "-XIZ"


def test_bits_convention():
    p = PauliOperator.from_string("-XIZYX")
    assert (p.x, p.z) == (0b11001, 0b01100)
    assert p.sign == -1


def test_bad_string():
    with pytest.raises(ValueError):
        PauliOperator.from_string("XQZ")


@pytest.mark.parametrize("n", [1, 2])
def test_product_matches_matrices_exhaustive(n):
    ps = list(all_paulis(n))
    for a in ps:
        for b in ps[::3]:
            got = pauli_matrix(pauli_multiply(a, b))
            assert np.allclose(got, pauli_matrix(a) @ pauli_matrix(b))


@pytest.mark.parametrize("kind", ONE_Q_GATES)
def test_one_qubit_conjugation_exhaustive(kind):
    g = make_gate(kind, 0)
    U = gate_matrix(g, 1)
    for p in all_paulis(1):
        want = U @ pauli_matrix(p) @ U.conj().T
        assert np.allclose(pauli_matrix(conjugate(p, g)), want), (kind, str(p))


@pytest.mark.parametrize("kind,a,b", [("CX", 0, 1), ("CX", 1, 0), ("CZ", 0, 1)])
def test_two_qubit_conjugation_exhaustive(kind, a, b):
    g = make_gate(kind, a, b)
    U = gate_matrix(g, 2)
    for p in all_paulis(2):
        want = U @ pauli_matrix(p) @ U.conj().T
        assert np.allclose(pauli_matrix(conjugate(p, g)), want), (kind, str(p))


def test_conjugation_on_larger_register():
    g = make_gate("CX", 2, 0)
    U = gate_matrix(g, 3)
    for p in list(all_paulis(3))[::5]:
        want = U @ pauli_matrix(p) @ U.conj().T
        letters, ph = matrix_to_pauli_letters(want, 3)
        q = conjugate(p, g)
        assert (q.letters(), q.phase % 4) == (letters, ph)


def test_gate_algebra_identities():
    # H^2 = S^4 = X^2 = SX^4 = CX^2 = CZ^2 = 1 and SX^2 = X up to phase
    n = 3
    rng = np.random.default_rng(5)
    gates = {"H": 2, "S": 4, "X": 2, "SX": 4}
    for _ in range(50):
        p = PauliOperator(n, int(rng.integers(8)), int(rng.integers(8)), int(rng.integers(4)))
        for k, order in gates.items():
            q = p
            for _ in range(order):
                q = conjugate(q, make_gate(k, 1))
            assert q == p
        for g in (make_gate("CX", 0, 2), make_gate("CZ", 1, 2)):
            assert conjugate(conjugate(p, g), g) == p
        sx2 = conjugate(conjugate(p, make_gate("SX", 0)), make_gate("SX", 0))
        assert sx2 == conjugate(p, make_gate("X", 0))


paulis3 = st.builds(lambda x, z, ph: PauliOperator(3, x, z, ph),
                    st.integers(0, 7), st.integers(0, 7), st.integers(0, 3))


@settings(max_examples=200, deadline=None)
@given(paulis3, paulis3, paulis3)
def test_product_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=200, deadline=None)
@given(paulis3, paulis3)
def test_commutation_matches_matrices(a, b):
    A, B = pauli_matrix(a), pauli_matrix(b)
    assert commutes(a, b) == np.allclose(A @ B, B @ A)


@settings(max_examples=100, deadline=None)
@given(paulis3, paulis3, st.sampled_from(["H", "S", "SX", "CX", "CZ"]))
def test_conjugation_is_homomorphism(a, b, kind):
    g = make_gate(kind, 0) if kind in ONE_Q_GATES else make_gate(kind, 2, 1)
    assert conjugate(a * b, g) == conjugate(a, g) * conjugate(b, g)


def test_weight():
    p = PauliOperator.from_string("XIZYI")
    assert weight(p) == 3
    assert weight(p, support=[0, 1]) == 1
