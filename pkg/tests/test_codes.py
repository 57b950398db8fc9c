from itertools import combinations, product

import pytest

from ftforge.codes import (STATES, builtin_code, builtin_names, code_distance, code_label, ghz_target,
                           load_code, logical_operator, make_target, state_stabilizer_group)
from ftforge.pauli import PauliOperator, commutes
from ftforge.tableau import canonicalize, stabilizer_sign

EXPECTED = {"perfect5": "[[5,1,3]]", "steane": "[[7,1,3]]", "shor": "[[9,1,3]]",
            "surface17": "[[9,1,3]]", "rm15": "[[15,1,3]]", "color17": "[[17,1,5]]"}


def test_six_builtin_codes():
    assert sorted(builtin_names()) == sorted(EXPECTED)
    for name, label in EXPECTED.items():
        c = builtin_code(name).validate()
        assert code_label(c) == label


def test_aliases():
    assert builtin_code("[[7,1,3]]").name == "steane"
    with pytest.raises(KeyError):
        builtin_code("nope")


@pytest.mark.parametrize("name", ["perfect5", "steane", "shor", "surface17", "rm15"])
def test_distance_brute_force(name):
    c = builtin_code(name)
    assert code_distance(c) == c.d == 3


def test_distance_color17():
    assert code_distance(builtin_code("color17")) == 5


@pytest.mark.parametrize("name", ["perfect5", "steane", "shor", "surface17"])
def test_no_weight_two_logical(name):
    c = builtin_code(name)
    from ftforge.tableau import StabilizerTableau
    grp = StabilizerTableau.from_paulis(list(c.generators))
    for w in (1, 2):
        for qs in combinations(range(c.n), w):
            for ls in product("XYZ", repeat=w):
                s = ["I"] * c.n
                for q, ch in zip(qs, ls):
                    s[q] = ch
                p = PauliOperator.from_string("".join(s))
                if all(commutes(p, g) for g in c.generators):
                    assert stabilizer_sign(grp, p) != 0


@pytest.mark.parametrize("state", STATES)
def test_targets_are_states(state):
    for name in builtin_names():
        t = make_target(builtin_code(name), state)
        assert len(t.tableau) == t.n
        canonicalize(t.tableau)


def test_logical_signs():
    c = builtin_code("steane")
    assert str(logical_operator(c, "0")) == "+ZZZZZZZ"
    assert str(logical_operator(c, "1")) == "-ZZZZZZZ"
    assert str(logical_operator(c, "-")) == "-XXXXXXX"
    # i X Z = i (-iY) per qubit, seven times -> -Y^7
    assert str(logical_operator(c, "+i")) == "-YYYYYYY"
    assert str(logical_operator(c, "-i")) == "+YYYYYYY"


def test_steane_zero_target_rows():
    t = make_target(builtin_code("steane"), "0")
    assert t.tableau.strings()[-1] == "+ZZZZZZZ"
    assert t.t == 1


def test_ghz_target():
    t = ghz_target(3)
    assert t.tableau.strings() == ["+XXX", "+ZZI", "+IZZ"]
    assert t.code is None and t.t == 0


def test_group_enumeration():
    gx, gz = state_stabilizer_group(make_target(builtin_code("perfect5"), "0"))
    assert len(gx) == 32
    assert len({(int(a), int(b)) for a, b in zip(gx, gz)}) == 32


def test_load_code_round_trip():
    text = """# five qubit code
IXZZX
XZZXI
ZZXIX
ZXIXZ
ZL: ZZZZZ
XL: XXXXX
"""
    c = load_code(text, "mine")
    assert (c.n, c.k, c.d) == (5, 1, 3)
    with pytest.raises(ValueError):
        load_code("XX\nZL: ZZ\n")
    with pytest.raises(ValueError):
        load_code("XZ\nZX\nZL: Z?\nXL: XX\n")
    with pytest.raises(ValueError):
        load_code("XXI\nZZQ\nZL: ZZZ\nXL: XXX\n")
