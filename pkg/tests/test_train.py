import pytest

from ftforge.circuit import Circuit
from ftforge.codes import ghz_target
from ftforge.env import TaskSpec, default_actions
from ftforge.faults import check_output_state
from ftforge.gates import make_gate
from ftforge.ppo import PPOConfig
from ftforge.search import minimal_circuit
from ftforge.train import OracleAccept, train

from conftest import fixture


@pytest.mark.parametrize("n,size", [(2, 2), (3, 3), (4, 4), (5, 5)])
def test_bfs_minimal_ghz(n, size):
    t = ghz_target(n)
    c = minimal_circuit(t, default_actions("lsp", n, 0))
    assert len(c) == size
    assert check_output_state(c, t)[0]


def test_bfs_depth_limit():
    assert minimal_circuit(ghz_target(4), default_actions("lsp", 4, 0), max_depth=3) is None


def test_oracle_accept():
    prep, target = fixture("steane_zero_goto")
    flagged, _ = fixture("steane_zero_goto_flag")
    vcs = OracleAccept(TaskSpec("vcs", target, n_flag=1, prep=prep))
    assert vcs(flagged)
    assert not vcs(prep.with_flags(1))
    lsp = OracleAccept(TaskSpec("lsp", target))
    assert lsp(prep)
    assert not lsp(Circuit(7, 0, [make_gate("H", 0)]))


def small_cfg(**kw):
    base = dict(n_agents=2, n_envs=4, n_steps=32, total_timesteps=3000)
    base.update(kw)
    return PPOConfig(**base)


def test_multi_agent_independent_of_threads():
    task = TaskSpec("lsp", ghz_target(3))
    a = train(task, small_cfg(), seed=3, threads=1)
    b = train(task, small_cfg(), seed=3, threads=2)
    assert a.log_csv() == b.log_csv()
    assert len(a.results) == 2
    assert a.results[0].log != a.results[1].log
    if a.best is not None:
        assert check_output_state(a.best, task.target)[0]


def test_flag_escalation():
    prep, target = fixture("steane_zero_goto")
    task = TaskSpec("vcs", target, n_flag=0, prep=prep, max_gates=4)
    out = train(task, small_cfg(n_agents=1, total_timesteps=256), seed=0, max_flags=1)
    assert out.flag_counts_tried == [0, 1]
    assert out.n_flag == 1 and out.task.n_flag == 1
    assert len(out.task.actions) == 30
    with pytest.raises(ValueError):
        train(task.with_flags(2), small_cfg(), max_flags=1)
