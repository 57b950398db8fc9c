"""Multi-agent training driver.

Agents are independent (own seed stream, own parameters), so they can run in
separate processes without changing results.  Every successful circuit is
re-checked by an oracle that does not share code with the environment's
reward path: the exact tableau check for ``lsp`` and the independent
fault-tolerance verifier for ``vcs`` and ``ift``.

For ``vcs``/``ift`` the driver can escalate the flag count: train with
``n_flag`` flags, and if no agent succeeds, add one flag and try again, up
to ``max_flags``.
"""

import csv
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

from .circuit import ActionTable, Circuit
from .env import TaskSpec
from .faults import check_output_state, verify_fault_tolerance
from .ppo import PPOConfig, TrainResult, train_agent

LOG_COLUMNS = ("step", "agent", "mean_return", "min_circuit_size", "success_rate")


class OracleAccept:
    """Picklable success check used to gate every reported circuit."""

    def __init__(self, task: TaskSpec):
        self.kind = task.kind
        self.target = task.target
        self.mode = task.weight_mode

    def __call__(self, circuit: Circuit) -> bool:
        if self.kind == "lsp":
            return check_output_state(circuit, self.target)[0]
        return verify_fault_tolerance(circuit, self.target, self.mode).ft


@dataclass
class TrainOutcome:
    task: TaskSpec
    results: List[TrainResult]
    n_flag: int
    flag_counts_tried: List[int] = field(default_factory=list)

    @property
    def best(self) -> Optional[Circuit]:
        """Fewest gates, then fewest two-qubit gates, then lowest agent index."""
        cands = [(len(r.best), r.best.two_qubit_count(), i) for i, r in enumerate(self.results) if r.best]
        return self.results[min(cands)[2]].best if cands else None

    @property
    def log(self) -> List[dict]:
        return [row for r in self.results for row in r.log]

    def log_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, LOG_COLUMNS, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for row in self.log:
            w.writerow(row)
        return buf.getvalue()


def _run_one(args):
    task, cfg, seed, idx = args
    res = train_agent(task, cfg, seed, idx, accept=OracleAccept(task))
    return res


def train_agents(task: TaskSpec, cfg: PPOConfig, seed: int, threads: int = 1) -> List[TrainResult]:
    jobs = [(task, cfg, seed, i) for i in range(cfg.n_agents)]
    if threads > 1 and cfg.n_agents > 1:
        with ProcessPoolExecutor(min(threads, cfg.n_agents)) as ex:
            return list(ex.map(_run_one, jobs))
    return [_run_one(j) for j in jobs]


def train(task: TaskSpec, cfg: PPOConfig, seed: int = 0, threads: int = 1,
          max_flags: Optional[int] = None, steps_per_flag: Optional[int] = None,
          actions_for: Optional[Callable[[int], ActionTable]] = None) -> TrainOutcome:
    """Train ``cfg.n_agents`` agents, escalating flags for vcs/ift if asked.

    ``actions_for(n_flag)`` rebuilds the action table when the register
    grows; without it the task's default table for that flag count is used.
    """
    if max_flags is None or task.kind == "lsp":
        max_flags = task.n_flag
    if max_flags < task.n_flag:
        raise ValueError("max_flags is below the starting flag count")
    step_cfg = replace(cfg, total_timesteps=steps_per_flag) if steps_per_flag else cfg
    tried = []
    cur = task
    for nf in range(task.n_flag, max_flags + 1):
        if nf != task.n_flag:
            cur = task.with_flags(nf, actions_for(nf) if actions_for else None)
        tried.append(nf)
        results = train_agents(cur, step_cfg, seed, threads)
        out = TrainOutcome(cur, results, nf, tried)
        if out.best is not None:
            return out
    return out
