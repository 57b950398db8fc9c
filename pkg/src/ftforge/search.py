"""Exhaustive breadth-first search for minimum-gate preparation circuits.

States are canonical tableaux, so two gate sequences reaching the same
stabilizer state are merged.  Only practical for a handful of qubits; used
as the minimality oracle for small training targets.
"""

from collections import deque
from typing import Optional

from . import kernels
from .circuit import ActionTable, Circuit
from .codes import LogicalTarget
from .tableau import StabilizerTableau, canonicalize


def _key(tab: StabilizerTableau) -> bytes:
    return tab.x.tobytes() + tab.z.tobytes() + tab.r.tobytes()


def minimal_circuit(target: LogicalTarget, actions: ActionTable, max_depth: int = 8,
                    max_states: int = 2_000_000) -> Optional[Circuit]:
    """Shortest circuit over ``actions`` preparing ``target`` from |0...0>.

    Returns None if nothing is found within ``max_depth`` gates.  Ties are
    broken by action order, so the result is deterministic.
    """
    n = target.n
    goal = canonicalize(target.tableau)
    goal_key = _key(goal)
    start = canonicalize(StabilizerTableau.zero_state(n))
    if _key(start) == goal_key:
        return Circuit(n)
    gates = list(actions.gates)
    if any(max(g.qubits) >= n for g in gates):
        raise ValueError("action table acts outside the target register")
    parent = {_key(start): None}
    frontier = deque([(start, 0)])
    while frontier:
        tab, depth = frontier.popleft()
        if depth >= max_depth:
            continue
        k0 = _key(tab)
        for ai, g in enumerate(gates):
            nxt = tab.copy()
            b = g.qubits[1] if len(g.qubits) == 2 else -1
            kernels.conjugate_rows(nxt.x, nxt.z, nxt.r, g.code, g.qubits[0], b)
            kernels.canonicalize_rows(nxt.x, nxt.z, nxt.r, n)
            k = _key(nxt)
            if k in parent:
                continue
            parent[k] = (k0, ai)
            if k == goal_key:
                seq = []
                while parent[k] is not None:
                    k, a = parent[k]
                    seq.append(gates[a])
                return Circuit(n, 0, seq[::-1])
            if len(parent) > max_states:
                raise RuntimeError("search space exceeds max_states")
            frontier.append((nxt, depth + 1))
    return None
