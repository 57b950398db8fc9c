"""Proximal policy optimization in plain numpy.

Separate actor and critic MLPs (two ReLU hidden layers), orthogonal init,
hand-written backprop, Adam with a linear learning-rate anneal and global
gradient-norm clipping.  One agent trains on a batch of environments; the
driver in ``train`` runs several independent agents.
"""

import hashlib
import io
import struct
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .circuit import ActionTable, Circuit
from .env import CircuitEnv, TaskSpec


@dataclass
class PPOConfig:
    learning_rate: float = 1e-3
    anneal_lr: bool = True
    n_agents: int = 10
    n_envs: int = 16
    total_timesteps: int = 1_000_000
    n_steps: int = 128
    ent_coef: float = 0.05
    update_epochs: int = 4
    n_minibatches: int = 4
    gamma: float = 0.99
    gae_lambda: float = 0.95
    clip_eps: float = 0.2
    vf_coef: float = 0.5
    max_grad_norm: float = 0.5
    norm_adv: bool = True
    hidden: Optional[int] = None
    init_scale: float = 0.01

    def hidden_size(self, n_qubits: int) -> int:
        if self.hidden:
            return self.hidden
        return 256 if n_qubits > 10 else 128


# ---- networks ---------------------------------------------------------------


def orthogonal(shape, scale, rng):
    """Haar-distributed (semi-)orthogonal matrix times ``scale``."""
    rows, cols = shape
    a = rng.standard_normal((max(rows, cols), min(rows, cols)))
    q, r = np.linalg.qr(a)
    q *= np.sign(np.diag(r))
    if rows < cols:
        q = q.T
    return np.ascontiguousarray(scale * q[:rows, :cols])


class MLP:
    """Dense ReLU network; parameters live in ``self.params`` as [W0, b0, W1, b1, ...]."""

    def __init__(self, sizes: Sequence[int], rng=None, scale=0.01, params=None):
        self.sizes = list(sizes)
        if params is not None:
            self.params = [np.array(p, dtype=np.float64) for p in params]
            return
        self.params = []
        for a, b in zip(sizes[:-1], sizes[1:]):
            self.params.append(orthogonal((a, b), scale, rng))
            self.params.append(np.zeros(b))

    def forward(self, x):
        cache = [x]
        h = x
        n_layers = len(self.params) // 2
        for i in range(n_layers):
            h = h @ self.params[2 * i] + self.params[2 * i + 1]
            if i < n_layers - 1:
                h = np.maximum(h, 0.0)
            cache.append(h)
        return h, cache

    def __call__(self, x):
        return self.forward(x)[0]

    def backward(self, cache, grad_out):
        grads = [None] * len(self.params)
        g = grad_out
        n_layers = len(self.params) // 2
        for i in reversed(range(n_layers)):
            h_in = cache[i]
            grads[2 * i] = h_in.T @ g
            grads[2 * i + 1] = g.sum(axis=0)
            if i > 0:
                g = (g @ self.params[2 * i].T) * (cache[i] > 0)
        return grads


def log_softmax(logits):
    m = logits.max(axis=1, keepdims=True)
    z = logits - m
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


class Adam:
    def __init__(self, params, b1=0.9, b2=0.999, eps=1e-8):
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.b1, self.b2, self.eps = b1, b2, eps
        self.t = 0

    def step(self, params, grads, lr):
        self.t += 1
        b1, b2 = self.b1, self.b2
        c1 = 1 - b1 ** self.t
        c2 = 1 - b2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


# ---- agent ------------------------------------------------------------------


class Agent:
    """Actor-critic pair plus optimizer state and step counters."""

    def __init__(self, obs_dim: int, n_actions: int, hidden: int, rng=None, scale=0.01,
                 actor_params=None, critic_params=None):
        sizes = [obs_dim, hidden, hidden]
        self.actor = MLP(sizes + [n_actions], rng, scale, actor_params)
        self.critic = MLP(sizes + [1], rng, scale, critic_params)
        self.opt = Adam(self.params)
        self.steps = 0
        self.action_digest = b"\0" * 32

    @property
    def obs_dim(self):
        return self.actor.sizes[0]

    @property
    def n_actions(self):
        return self.actor.sizes[-1]

    @property
    def hidden(self):
        return self.actor.sizes[1]

    @property
    def params(self):
        return self.actor.params + self.critic.params

    def policy(self, obs, mask=None):
        logits = self.actor(obs)
        if mask is not None:
            logits = np.where(mask, logits, -np.inf)
        return logits

    def act(self, obs, rng, mask=None, greedy=False):
        """Sample actions; returns (actions, log-probs, values)."""
        logp_all = log_softmax(self.policy(obs, mask))
        if greedy:
            a = logp_all.argmax(axis=1)
        else:
            cdf = np.cumsum(np.exp(logp_all), axis=1)
            u = rng.random(len(obs))[:, None] * cdf[:, -1:]
            a = np.minimum((cdf < u).sum(axis=1), cdf.shape[1] - 1)
        value = self.critic(obs)[:, 0]
        return a, logp_all[np.arange(len(a)), a], value


def ppo_loss_and_grads(agent: Agent, batch: Dict[str, np.ndarray], cfg: PPOConfig, mask=None):
    """Clipped-surrogate PPO loss and its exact gradient w.r.t. all parameters."""
    obs, act = batch["obs"], batch["actions"]
    old_logp, adv, ret = batch["logp"], batch["advantages"], batch["returns"]
    B = len(obs)
    if cfg.norm_adv and B > 1:
        adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    logits, a_cache = agent.actor.forward(obs)
    if mask is not None:
        logits = np.where(mask, logits, -np.inf)
    logp_all = log_softmax(logits)
    p = np.exp(logp_all)
    idx = np.arange(B)
    logp = logp_all[idx, act]
    ratio = np.exp(logp - old_logp)
    clipped = np.clip(ratio, 1 - cfg.clip_eps, 1 + cfg.clip_eps)
    s1, s2 = ratio * adv, clipped * adv
    pg_loss = -np.minimum(s1, s2).mean()
    plogp = p * np.where(p > 0, logp_all, 0.0)
    entropy = -plogp.sum(axis=1)
    values, c_cache = agent.critic.forward(obs)
    values = values[:, 0]
    v_loss = 0.5 * ((values - ret) ** 2).mean()
    loss = pg_loss + cfg.vf_coef * v_loss - cfg.ent_coef * entropy.mean()

    # d loss / d logits
    g_logp = -(adv * ratio * (s1 <= s2)) / B
    onehot = np.zeros_like(p)
    onehot[idx, act] = 1.0
    g_logits = g_logp[:, None] * (onehot - p)
    # entropy: dH/dz_j = -(p_j log p_j + p_j H)
    g_logits += cfg.ent_coef / B * (plogp + p * entropy[:, None])
    g_values = (cfg.vf_coef / B) * (values - ret)
    grads = agent.actor.backward(a_cache, g_logits) + agent.critic.backward(c_cache, g_values[:, None])
    stats = {"loss": loss, "pg_loss": pg_loss, "v_loss": v_loss, "entropy": float(entropy.mean()),
             "approx_kl": float(((ratio - 1) - np.log(ratio)).mean())}
    return loss, grads, stats


def clip_grad_norm(grads, max_norm):
    total = np.sqrt(sum(float((g * g).sum()) for g in grads))
    if max_norm and total > max_norm:
        s = max_norm / (total + 1e-12)
        grads = [g * s for g in grads]
    return grads, total


def compute_gae(rewards, values, dones, last_value, gamma, lam):
    """Generalized advantage estimates over a ``(T, N)`` rollout.

    ``dones[t]`` marks that the episode ended after step ``t``; bootstrapping
    stops there.  Returns (advantages, returns).
    """
    T = len(rewards)
    adv = np.zeros_like(rewards, dtype=np.float64)
    last = np.zeros(rewards.shape[1:], dtype=np.float64)
    for t in reversed(range(T)):
        nxt = last_value if t == T - 1 else values[t + 1]
        live = 1.0 - dones[t]
        delta = rewards[t] + gamma * nxt * live - values[t]
        last = delta + gamma * lam * live * last
        adv[t] = last
    return adv, adv + values


# ---- training loop ----------------------------------------------------------


@dataclass
class EpisodeRecord:
    step: int
    length: int
    ret: float
    success: bool
    circuit: Optional[Circuit] = None


@dataclass
class TrainResult:
    agent: Agent
    best: Optional[Circuit]
    log: List[dict] = field(default_factory=list)
    successes: int = 0
    episodes: int = 0
    first_success_step: Optional[int] = None
    best_step: Optional[int] = None


def agent_rng(seed: int, agent_index: int, stream: int = 0):
    """Counter-based generator keyed by (seed, agent, stream)."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), (agent_index << 8) | stream]))


def make_agent(task: TaskSpec, cfg: PPOConfig, rng) -> Agent:
    ag = Agent(task.obs_dim, len(task.actions), cfg.hidden_size(task.n_qubits), rng, cfg.init_scale)
    ag.action_digest = task.actions.digest()
    return ag


def train_agent(task: TaskSpec, cfg: PPOConfig, seed: int, agent_index: int = 0,
                agent: Optional[Agent] = None, mask=None, accept: Optional[Callable] = None,
                log_every: int = 1, stop_when: Optional[Callable[[TrainResult], bool]] = None) -> TrainResult:
    """Train one agent for ``cfg.total_timesteps`` environment steps.

    ``accept(circuit)`` can veto successful circuits (e.g. an independent
    check); only accepted circuits compete for ``best``.  ``stop_when`` is
    polled after every update and ends training early when it returns True.
    """
    rng = agent_rng(seed, agent_index)
    if agent is None:
        agent = make_agent(task, cfg, rng)
    if agent.obs_dim != task.obs_dim or agent.n_actions != len(task.actions):
        raise ValueError("agent shape does not match the task")
    agent.action_digest = task.actions.digest()
    envs = [CircuitEnv(task) for _ in range(cfg.n_envs)]
    obs = np.stack([e.reset() for e in envs]).astype(np.float64)
    N, T = cfg.n_envs, cfg.n_steps
    batch_size = N * T
    mb_size = max(1, batch_size // cfg.n_minibatches)
    n_updates = max(1, cfg.total_timesteps // batch_size)
    ep_ret = np.zeros(N)
    res = TrainResult(agent, None)
    buf_obs = np.zeros((T, N, task.obs_dim))
    buf_act = np.zeros((T, N), np.int64)
    buf_logp = np.zeros((T, N))
    buf_val = np.zeros((T, N))
    buf_rew = np.zeros((T, N))
    buf_done = np.zeros((T, N))
    start_steps = agent.steps
    for update in range(n_updates):
        frac = 1.0 - update / n_updates
        lr = cfg.learning_rate * frac if cfg.anneal_lr else cfg.learning_rate
        recent = []
        for t in range(T):
            a, logp, val = agent.act(obs, rng, mask)
            buf_obs[t], buf_act[t], buf_logp[t], buf_val[t] = obs, a, logp, val
            for i, env in enumerate(envs):
                o, r, done, info = env.step(int(a[i]))
                buf_rew[t, i] = r
                buf_done[t, i] = done
                ep_ret[i] += r
                if done:
                    gstep = agent.steps + t * N + i + 1
                    circ = env.circuit.copy() if info["success"] else None
                    ok = info["success"] and (accept is None or accept(circ))
                    rec = EpisodeRecord(gstep, env.n_steps, ep_ret[i], ok, circ if ok else None)
                    recent.append(rec)
                    res.episodes += 1
                    if ok:
                        res.successes += 1
                        if res.first_success_step is None:
                            res.first_success_step = gstep
                        if res.best is None or len(circ) < len(res.best):
                            res.best, res.best_step = circ, gstep
                    ep_ret[i] = 0.0
                    o = env.reset()
                obs[i] = o
        last_val = agent.critic(obs)[:, 0]
        adv, ret = compute_gae(buf_rew, buf_val, buf_done, last_val, cfg.gamma, cfg.gae_lambda)
        agent.steps += batch_size
        flat = {"obs": buf_obs.reshape(batch_size, -1), "actions": buf_act.reshape(-1),
                "logp": buf_logp.reshape(-1), "advantages": adv.reshape(-1), "returns": ret.reshape(-1)}
        for _ in range(cfg.update_epochs):
            perm = rng.permutation(batch_size)
            for s in range(0, batch_size, mb_size):
                idx = perm[s:s + mb_size]
                mb = {k: v[idx] for k, v in flat.items()}
                _, grads, _ = ppo_loss_and_grads(agent, mb, cfg, mask)
                grads, _ = clip_grad_norm(grads, cfg.max_grad_norm)
                agent.opt.step(agent.params, grads, lr)
        if recent and (update % log_every == 0 or update == n_updates - 1):
            res.log.append({
                "step": agent.steps, "agent": agent_index,
                "mean_return": float(np.mean([r.ret for r in recent])),
                "min_circuit_size": len(res.best) if res.best is not None else "",
                "success_rate": sum(r.success for r in recent) / len(recent)})
        if stop_when is not None and stop_when(res):
            break
    return res


# ---- persistence and transfer -------------------------------------------------

MAGIC = b"FTAGENT\0"
VERSION = 1


def save_agent(agent: Agent, path_or_buf):
    """Binary agent file: header, shapes, little-endian float64 parameters, Adam state."""
    out = io.BytesIO()
    out.write(MAGIC)
    out.write(struct.pack("<IIIIQ", VERSION, agent.obs_dim, agent.hidden, agent.n_actions, agent.steps))
    out.write(agent.action_digest)
    out.write(struct.pack("<Q", agent.opt.t))
    for group in (agent.params, agent.opt.m, agent.opt.v):
        for p in group:
            out.write(np.ascontiguousarray(p, dtype="<f8").tobytes())
    data = out.getvalue()
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(data)
    else:
        with open(path_or_buf, "wb") as fh:
            fh.write(data)


def load_agent(path_or_buf) -> Agent:
    if hasattr(path_or_buf, "read"):
        data = path_or_buf.read()
    else:
        with open(path_or_buf, "rb") as fh:
            data = fh.read()
    if data[:8] != MAGIC:
        raise ValueError("not an agent file")
    version, obs_dim, hidden, n_actions, steps = struct.unpack_from("<IIIIQ", data, 8)
    if version != VERSION:
        raise ValueError(f"unsupported agent file version {version}")
    pos = 8 + struct.calcsize("<IIIIQ")
    digest = data[pos:pos + 32]
    pos += 32
    (opt_t,) = struct.unpack_from("<Q", data, pos)
    pos += 8
    shapes = []
    for out_dim in (n_actions, 1):
        shapes += [(obs_dim, hidden), (hidden,), (hidden, hidden), (hidden,), (hidden, out_dim), (out_dim,)]
    groups = []
    for _ in range(3):
        arrs = []
        for sh in shapes:
            k = int(np.prod(sh))
            arrs.append(np.frombuffer(data, "<f8", k, pos).reshape(sh).astype(np.float64))
            pos += 8 * k
        groups.append(arrs)
    if pos != len(data):
        raise ValueError("agent file has trailing or missing bytes")
    ag = Agent(obs_dim, n_actions, hidden, actor_params=groups[0][:6], critic_params=groups[0][6:])
    ag.opt.m, ag.opt.v, ag.opt.t = groups[1], groups[2], opt_t
    ag.steps = steps
    ag.action_digest = bytes(digest)
    return ag


def transfer_restrict(agent: Agent, old: ActionTable, new: ActionTable) -> Agent:
    """Copy of ``agent`` whose actor only scores the actions in ``new``.

    ``new`` must be a subset of ``old``; output rows of removed actions are
    deleted, everything else is kept.  Optimizer moments are reset.
    """
    if agent.action_digest != old.digest():
        raise ValueError("agent was not trained on the given action table")
    pos = {g: i for i, g in enumerate(old.gates)}
    missing = [g for g in new.gates if g not in pos]
    if missing:
        raise ValueError(f"actions not in the source table: {', '.join(map(str, missing[:5]))}")
    keep = np.array([pos[g] for g in new.gates], dtype=np.int64)
    ap = [p.copy() for p in agent.actor.params]
    ap[-2] = ap[-2][:, keep]
    ap[-1] = ap[-1][keep]
    out = Agent(agent.obs_dim, len(keep), agent.hidden, actor_params=ap,
                critic_params=[p.copy() for p in agent.critic.params])
    out.steps = agent.steps
    out.action_digest = new.digest()
    return out
