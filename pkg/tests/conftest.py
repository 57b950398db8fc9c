import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from importlib.resources import files

from ftforge.circuit import load_circuit
from ftforge.codes import builtin_code, make_target

FIXTURES = files("ftforge") / "fixtures"
_STATE = {"zero": "0", "one": "1", "plus": "+", "minus": "-", "xx": "+", "zz": "0"}


def fixture_names():
    return sorted(p.name[:-5] for p in FIXTURES.iterdir() if p.name.endswith(".circ"))


def fixture(name):
    """(circuit, target) for a bundled fixture named <code>_<state>_<kind>."""
    code, state = name.split("_")[:2]
    return load_circuit(FIXTURES / f"{name}.circ"), make_target(builtin_code(code), _STATE[state])

ACCEPTANCE_LINES = []


def record_acceptance(key, ok, detail):
    line = f"ACCEPT {key}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
