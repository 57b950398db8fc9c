import numpy as np
import pytest

from ftforge.circuit import enumerate_actions
from ftforge.codes import builtin_code, ghz_target, make_target
from ftforge.env import CircuitEnv, RewardWeights, TaskSpec, energy_score
from ftforge.gates import make_gate

from conftest import fixture

GHZ_PATH = [make_gate("H", 0), make_gate("CX", 0, 1), make_gate("CX", 0, 2)]


def run(env, gates):
    acts = env.task.actions
    out = []
    for g in gates:
        out.append(env.step(acts.index(g)))
    return out


def test_ghz3_trajectory_values():
    env = CircuitEnv(TaskSpec("lsp", ghz_target(3)))
    env.reset()
    comp = [1 - env.d]
    energy = [env.energy()]
    for g in GHZ_PATH:
        env.step(env.task.actions.index(g))
        comp.append(1 - env.d)
        energy.append(env.energy())
    assert comp == pytest.approx([1 / 9, 1 / 4, 1 / 2, 1.0])
    assert energy == [-2, -1, -1, -3]
    assert env.succeeded()


def test_lsp_rewards_telescope():
    env = CircuitEnv(TaskSpec("lsp", make_target(builtin_code("steane"), "0")))
    env.reset()
    d0 = env.d
    rng = np.random.default_rng(0)
    total = 0.0
    for _ in range(20):
        _, r, done, _ = env.step(int(rng.integers(len(env.task.actions))))
        total += r
        if done:
            break
    assert total == pytest.approx(d0 - env.d)


def test_lsp_fixture_reaches_target():
    circ, target = fixture("steane_zero_lsp")
    env = CircuitEnv(TaskSpec("lsp", target))
    env.reset()
    res = run(env, circ.gates)
    assert res[-1][3]["success"] and res[-1][2]
    assert all(not r[2] for r in res[:-1])


def test_observation_shape_and_reset():
    task = TaskSpec("lsp", ghz_target(3))
    env = CircuitEnv(task)
    o = env.reset()
    assert o.shape == (task.obs_dim,) == (3 * 7,) and o.dtype == np.float32
    env.step(0)
    assert np.array_equal(env.reset(), o)
    assert len(env.circuit) == 0


def test_truncation():
    env = CircuitEnv(TaskSpec("lsp", ghz_target(3), max_gates=3))
    env.reset()
    s = env.task.actions.index(make_gate("S", 0))
    res = [env.step(s) for _ in range(3)]
    assert res[-1][2] and res[-1][3]["truncated"] and not res[-1][3]["success"]


def test_vcs_goto_flag_solution():
    prep, target = fixture("steane_zero_goto")
    task = TaskSpec("vcs", target, n_flag=1, prep=prep)
    assert task.weights == RewardWeights(7.0, 3.0, 1.0)
    env = CircuitEnv(task)
    env.reset()
    assert env.harmful > 0 and env.d == 0.0
    res = run(env, [make_gate("CX", 0, 7), make_gate("CX", 6, 7), make_gate("CX", 5, 7)])
    assert res[-1][3]["success"]
    assert env.harmful == 0 and env.p == 1.0 and env.d == 0.0
    assert env.added_circuit().two_qubit_count() == 3


def test_vcs_actions_skip_data_pairs():
    prep, target = fixture("steane_zero_goto")
    task = TaskSpec("vcs", target, n_flag=1, prep=prep)
    for g in task.actions.gates:
        if g.is_two_qubit:
            assert max(g.qubits) == 7


def test_ift_weights_and_success():
    circ, target = fixture("steane_zero_goto_flag")
    task = TaskSpec("ift", target, n_flag=1)
    assert task.weights == RewardWeights(3.0, 7.0, 1.0)
    env = CircuitEnv(task)
    env.reset()
    res = run(env, circ.gates)
    assert res[-1][3]["success"]


def test_task_validation():
    t = make_target(builtin_code("steane"), "0")
    with pytest.raises(ValueError):
        TaskSpec("nope", t)
    with pytest.raises(ValueError):
        TaskSpec("vcs", t, n_flag=1)
    with pytest.raises(ValueError):
        TaskSpec("lsp", t, n_flag=1)
    with pytest.raises(ValueError):
        TaskSpec("ift", ghz_target(3), n_flag=1)


def test_energy_score():
    from ftforge.tableau import StabilizerTableau
    from ftforge.pauli import PauliOperator
    terms = [PauliOperator.from_string(s) for s in ["XX", "ZZ"]]
    bell = StabilizerTableau.from_strings(["XX", "ZZ"])
    assert energy_score(bell, terms) == -2
    assert energy_score(StabilizerTableau.from_strings(["-XX", "ZZ"]), terms) == 0
