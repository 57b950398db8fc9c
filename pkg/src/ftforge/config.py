"""Run configuration: a JSON file checked against ``SCHEMA``.

Unknown keys are rejected at every level.  ``FTFORGE_SEED`` in the
environment overrides the seed in the file.
"""

import json
import os
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional

import jsonschema

from .circuit import (ActionTable, Circuit, ConnectivityGraph, connectivity_preset, enumerate_actions,
                      load_circuit)
from .codes import LogicalTarget, builtin_code, ghz_target, load_code, make_target, target_from_strings
from .env import RewardWeights, TaskSpec
from .faults import WEIGHT_MODES
from .gates import GATE_CODES
from .ppo import PPOConfig

STATE_LABELS = {"zero": "0", "one": "1", "plus": "+", "minus": "-", "plus_i": "+i", "minus_i": "-i",
                "0": "0", "1": "1", "+": "+", "-": "-", "+i": "+i", "-i": "-i"}

_num = {"type": "number"}
_posint = {"type": "integer", "minimum": 1}

_PPO_PROPS = {
    "learning_rate": {"type": "number", "exclusiveMinimum": 0},
    "anneal_lr": {"type": "boolean"},
    "n_agents": _posint,
    "n_envs": _posint,
    "total_timesteps": _posint,
    "n_steps": _posint,
    "ent_coef": _num,
    "update_epochs": _posint,
    "n_minibatches": _posint,
    "gamma": {"type": "number", "minimum": 0, "maximum": 1},
    "gae_lambda": {"type": "number", "minimum": 0, "maximum": 1},
    "clip_eps": {"type": "number", "exclusiveMinimum": 0},
    "vf_coef": _num,
    "max_grad_norm": {"type": "number", "exclusiveMinimum": 0},
    "norm_adv": {"type": "boolean"},
    "hidden": {"type": ["integer", "null"], "minimum": 1},
    "init_scale": {"type": "number", "exclusiveMinimum": 0},
}

_WEIGHTS = {
    "type": "object",
    "additionalProperties": False,
    "properties": {"mu_f": _num, "mu_d": _num, "mu_p": _num},
}

_EDGE_LIST = {
    "type": "object",
    "additionalProperties": False,
    "required": ["n", "edges"],
    "properties": {
        "n": _posint,
        "edges": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                             "minItems": 2, "maxItems": 2}},
    },
}

SCHEMA: Dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ftforge run configuration",
    "type": "object",
    "additionalProperties": False,
    "required": ["task"],
    "properties": {
        "task": {"enum": ["lsp", "vcs", "ift"]},
        "code": {"type": "string"},
        "code_file": {"type": "string"},
        "ghz": {"type": "integer", "minimum": 2},
        "target_rows": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "state": {"enum": sorted(STATE_LABELS)},
        "prep": {"type": "string"},
        "gate_set": {"type": "array", "minItems": 1, "uniqueItems": True,
                     "items": {"enum": sorted(GATE_CODES) + ["CNOT", "SQRTX"]}},
        "connectivity": {"oneOf": [{"type": "string"}, _EDGE_LIST]},
        "placement": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "n_flag": {"type": "integer", "minimum": 0},
        "max_flags": {"type": "integer", "minimum": 0},
        "steps_per_flag": _posint,
        "weights": _WEIGHTS,
        "epsilon": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "max_gates": _posint,
        "weight_mode": {"enum": list(WEIGHT_MODES)},
        "step_penalty": _num,
        "ppo": {"type": "object", "additionalProperties": False, "properties": _PPO_PROPS},
        "seed": {"type": "integer", "minimum": 0},
        "out": {"type": "string"},
        "evaluation": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "p_list": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1}, "minItems": 1},
                "trials": _posint,
                "method": {"enum": ["direct", "stratified"]},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "array", "items": _num, "minItems": 1} for k in ("mu_f", "mu_d", "mu_p")},
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    raw: Dict[str, Any]
    base_dir: str = "."

    def get(self, key, default=None):
        return self.raw.get(key, default)

    @property
    def seed(self) -> int:
        env = os.environ.get("FTFORGE_SEED")
        if env is not None and env.strip():
            try:
                return int(env)
            except ValueError:
                raise ConfigError(f"FTFORGE_SEED must be an integer, got {env!r}") from None
        return int(self.raw.get("seed", 0))

    def path(self, p: str) -> str:
        return p if os.path.isabs(p) else os.path.join(self.base_dir, p)

    def ppo(self) -> PPOConfig:
        return PPOConfig(**self.raw.get("ppo", {}))

    def target(self) -> LogicalTarget:
        srcs = [k for k in ("code", "code_file", "ghz", "target_rows") if k in self.raw]
        if len(srcs) != 1:
            raise ConfigError("give exactly one of code, code_file, ghz, target_rows")
        src = srcs[0]
        if src == "ghz":
            return ghz_target(self.raw["ghz"])
        if src == "target_rows":
            return target_from_strings(self.raw["target_rows"])
        if src == "code":
            code = builtin_code(self.raw["code"])
        else:
            with open(self.path(self.raw["code_file"])) as fh:
                code = load_code(fh.read(), name=os.path.basename(self.raw["code_file"]))
        return make_target(code, STATE_LABELS[self.raw.get("state", "zero")])

    def connectivity(self, n_qubits: int) -> Optional[ConnectivityGraph]:
        c = self.raw.get("connectivity")
        if c is None:
            return None
        g = connectivity_preset(c, n_qubits) if isinstance(c, str) else ConnectivityGraph.from_edges(c["n"], c["edges"])
        if "placement" in self.raw:
            g = g.induced(self.raw["placement"])
        return g

    def actions(self, n_data: int, n_flag: int) -> ActionTable:
        kind = self.raw["task"]
        gate_set = self.raw.get("gate_set", ["H", "S", "CX"])
        n = n_data + n_flag
        conn = self.connectivity(n)
        return enumerate_actions(n, gate_set, conn, no_data_data=n_data if kind == "vcs" else None)

    def task(self, n_flag: Optional[int] = None) -> TaskSpec:
        kind = self.raw["task"]
        target = self.target()
        nf = self.raw.get("n_flag", 1 if kind != "lsp" else 0) if n_flag is None else n_flag
        prep: Optional[Circuit] = None
        if kind == "vcs":
            if "prep" not in self.raw:
                raise ConfigError("vcs needs 'prep'")
            prep = load_circuit(self.path(self.raw["prep"]))
        elif "prep" in self.raw:
            raise ConfigError("'prep' only applies to vcs")
        w = self.raw.get("weights")
        weights = None
        if w is not None:
            base = RewardWeights.default(kind, target.n)
            weights = RewardWeights(w.get("mu_f", base.mu_f), w.get("mu_d", base.mu_d), w.get("mu_p", base.mu_p))
        try:
            return TaskSpec(kind, target, nf, prep, self.actions(target.n, nf), weights,
                            self.raw.get("epsilon", 0.9999), self.raw.get("max_gates", 50),
                            self.raw.get("weight_mode", "auto"), self.raw.get("step_penalty", 0.0))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def validate_config(raw: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config error at {where}: {exc.message}") from None


def parse_config(text: str, base_dir: str = ".") -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    validate_config(raw)
    return RunConfig(raw, base_dir)


def load_config(path: str) -> RunConfig:
    with open(path) as fh:
        return parse_config(fh.read(), os.path.dirname(os.path.abspath(path)))
