"""Circuit-building environments for the three tasks.

* ``lsp``: prepare the target state from |0...0> (reward: drop in tableau
  distance).
* ``vcs``: append flag-qubit gates to a fixed preparation circuit so that every
  harmful single fault is flagged.
* ``ift``: build the whole fault-tolerant circuit from scratch.

Observations are the canonical tableau of the noiseless state flattened to
``[x | z | sign]`` rows, as float32.
"""

from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np

from . import kernels
from .circuit import ActionTable, Circuit, ConnectivityGraph, enumerate_actions
from .codes import LogicalTarget
from .faults import (ErrorClass, FaultErrorSet, classify_errors, resolve_weight_mode)
from .pauli import PauliOperator
from .tableau import StabilizerTableau, canonicalize, jaccard_distance, stabilizer_sign, to_binary_vector

TASKS = ("lsp", "vcs", "ift")


@dataclass(frozen=True)
class RewardWeights:
    mu_f: float = 0.0
    mu_d: float = 1.0
    mu_p: float = 0.0

    @classmethod
    def default(cls, kind: str, n_data: int) -> "RewardWeights":
        if kind == "lsp":
            return cls(0.0, 1.0, 0.0)
        if kind == "vcs":
            return cls(float(n_data), float(n_data // 2), 1.0)
        if kind == "ift":
            return cls(float(n_data // 2), float(n_data), 1.0)
        raise ValueError(f"task kind must be one of {TASKS}")


@dataclass
class TaskSpec:
    kind: str
    target: LogicalTarget
    n_flag: int = 0
    prep: Optional[Circuit] = None
    actions: Optional[ActionTable] = None
    weights: Optional[RewardWeights] = None
    epsilon: float = 0.9999
    max_gates: int = 50
    weight_mode: str = "auto"
    step_penalty: float = 0.0

    def __post_init__(self):
        if self.kind not in TASKS:
            raise ValueError(f"task kind must be one of {TASKS}")
        if self.kind == "lsp" and self.n_flag:
            raise ValueError("lsp tasks have no flag qubits")
        if self.kind == "vcs":
            if self.prep is None:
                raise ValueError("vcs needs a fixed preparation circuit")
            if self.prep.n_data != self.target.n:
                raise ValueError("preparation circuit does not match the target size")
        if self.kind in ("vcs", "ift") and self.target.code is None:
            raise ValueError(f"{self.kind} needs a code target")
        if self.weights is None:
            self.weights = RewardWeights.default(self.kind, self.target.n)
        self.weight_mode = resolve_weight_mode(self.target, self.weight_mode) \
            if self.kind != "lsp" else self.weight_mode
        if self.actions is None:
            self.actions = default_actions(self.kind, self.target.n, self.n_flag)
        if self.max_gates < 1:
            raise ValueError("max_gates must be positive")

    @property
    def n_data(self) -> int:
        return self.target.n

    @property
    def n_qubits(self) -> int:
        return self.target.n + self.n_flag

    @property
    def obs_dim(self) -> int:
        n = self.n_qubits
        return n * (2 * n + 1)

    def with_flags(self, n_flag: int, actions: Optional[ActionTable] = None) -> "TaskSpec":
        """Copy with a different flag count; actions are rebuilt unless given."""
        return replace(self, n_flag=n_flag, actions=actions)


def default_actions(kind: str, n_data: int, n_flag: int, gate_set=("H", "S", "CX"),
                    connectivity: Optional[ConnectivityGraph] = None) -> ActionTable:
    n = n_data + n_flag
    if kind == "vcs":
        return enumerate_actions(n, gate_set, connectivity, no_data_data=n_data)
    return enumerate_actions(n, gate_set, connectivity)


def _pad_rows_bits(tab: StabilizerTableau, n_total: int) -> np.ndarray:
    padded = StabilizerTableau(n_total, tab.x, tab.z, tab.r)
    return to_binary_vector(padded)


def energy_score(state: StabilizerTableau, terms: Sequence[PauliOperator]) -> int:
    """Expectation of ``-sum(terms)``: each term scores -1, +1 or 0."""
    n = state.n
    return -sum(stabilizer_sign(state, t.pad(n)) for t in terms)


class CircuitEnv:
    """Single environment; ``step`` takes an action index."""

    def __init__(self, task: TaskSpec):
        self.task = task
        n, nd = task.n_qubits, task.n_data
        self.n_qubits, self.n_data = n, nd
        row = 2 * n + 1
        self._row = row
        self._target_bits = _pad_rows_bits(canonicalize(task.target.tableau), n)
        flag_rows = StabilizerTableau(n, np.zeros(task.n_flag, np.uint64),
                                      [1 << q for q in range(nd, n)], np.zeros(task.n_flag, np.uint8)) \
            if task.n_flag else None
        self._flag_bits = to_binary_vector(flag_rows) if flag_rows is not None else None
        self._codes = [g.code for g in task.actions.gates]
        self._gates = list(task.actions.gates)
        self._start = None
        self.reset()

    # ---- scoring ----------------------------------------------------------

    def _bits(self) -> np.ndarray:
        return to_binary_vector(self.state)

    def d_value(self, bits=None) -> float:
        bits = self._bits() if bits is None else bits
        return jaccard_distance(bits[: self.n_data * self._row], self._target_bits)

    def p_value(self, bits=None) -> float:
        if self._flag_bits is None:
            return 1.0
        bits = self._bits() if bits is None else bits
        return 1.0 - jaccard_distance(bits[self.n_data * self._row:], self._flag_bits)

    def _fault_stats(self):
        if len(self.errors) == 0:
            return 1.0, 0
        cls = classify_errors(self.errors, self.task.target, self.n_data, self.task.weight_mode)
        good = np.count_nonzero((cls == ErrorClass.TOLERABLE) | (cls == ErrorClass.HARMFUL_FLAGGED))
        return good / len(cls), int(np.count_nonzero(cls == ErrorClass.HARMFUL_UNFLAGGED))

    def energy(self, terms: Optional[Sequence[PauliOperator]] = None) -> int:
        terms = self.task.target.tableau.rows() if terms is None else terms
        return energy_score(self.state, terms)

    # ---- episode ----------------------------------------------------------

    def reset(self) -> np.ndarray:
        task = self.task
        self.n_steps = 0
        if self._start is None:
            self.circuit = Circuit(self.n_data, task.n_flag)
            self.state = canonicalize(StabilizerTableau.zero_state(self.n_qubits))
            self.errors = FaultErrorSet(self.n_qubits)
            if task.kind == "vcs":
                for g in task.prep.gates:
                    self.circuit.append(g)
                    self.state.apply(g)
                    self.errors.extend(g)
                kernels.canonicalize_rows(self.state.x, self.state.z, self.state.r, self.n_qubits)
            bits = self._bits()
            self.d = self.d_value(bits)
            self.p = self.p_value(bits)
            if task.kind == "lsp":
                self.f, self.harmful = 1.0, 0
            else:
                self.f, self.harmful = self._fault_stats()
            self._obs = bits.astype(np.float32)
            self._start = (self.circuit.copy(), self.state.copy(), self.errors.copy(),
                           self.d, self.p, self.f, self.harmful, self._obs)
        else:
            c, st, es, self.d, self.p, self.f, self.harmful, self._obs = self._start
            self.circuit, self.state, self.errors = c.copy(), st.copy(), es.copy()
        return self._obs.copy()

    def succeeded(self) -> bool:
        eps = self.task.epsilon
        if 1.0 - self.d < eps:
            return False
        if self.task.kind == "lsp":
            return True
        return self.harmful == 0 and self.p >= eps

    def step(self, action: int):
        gate = self._gates[action]
        self.circuit.gates.append(gate)
        self.n_steps += 1
        st = self.state
        b = gate.qubits[1] if len(gate.qubits) == 2 else -1
        kernels.conjugate_rows(st.x, st.z, st.r, self._codes[action], gate.qubits[0], b)
        kernels.canonicalize_rows(st.x, st.z, st.r, self.n_qubits)
        bits = self._bits()
        d_prev = self.d
        self.d = self.d_value(bits)
        task = self.task
        if task.kind == "lsp":
            reward = d_prev - self.d
        else:
            f_prev, p_prev = self.f, self.p
            self.errors.extend(gate)
            self.f, self.harmful = self._fault_stats()
            self.p = self.p_value(bits)
            w = task.weights
            reward = w.mu_f * (self.f - f_prev) + w.mu_d * (d_prev - self.d) + w.mu_p * (self.p - p_prev)
        reward -= task.step_penalty
        success = self.succeeded()
        truncated = not success and self.n_steps >= task.max_gates
        self._obs = bits.astype(np.float32)
        info = {"success": success, "truncated": truncated}
        return self._obs, float(reward), success or truncated, info

    def added_circuit(self) -> Circuit:
        """Gates chosen by the agent (excludes a fixed preparation prefix)."""
        k = len(self.task.prep.gates) if self.task.kind == "vcs" else 0
        return Circuit(self.n_data, self.task.n_flag, self.circuit.gates[k:])
