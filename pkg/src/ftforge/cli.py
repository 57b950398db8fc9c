"""``ftforge`` command line.

Exit codes: 0 success (or FT), 1 verification failure, 2 usage or parse error.
"""

import argparse
import csv
import itertools
import json
import os
import sys
from dataclasses import replace
from typing import List, Optional

from .circuit import CircuitParseError, load_circuit
from .codes import builtin_code, builtin_names, code_label, load_code, make_target
from .config import STATE_LABELS, ConfigError, RunConfig, load_config
from .env import RewardWeights
from .evaluation import default_p_grid, evaluate
from .faults import WEIGHT_MODES, check_output_state, verify_fault_tolerance
from .pauli import PauliOperator
from .ppo import load_agent, save_agent, train_agent, transfer_restrict
from .tableau import StabilizerTableau, canonicalize
from .train import OracleAccept, train

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _err(msg: str) -> None:
    print(f"ftforge: error: {msg}", file=sys.stderr)


def _seed(args, cfg: Optional[RunConfig] = None) -> int:
    if args.seed is not None:
        return args.seed
    if cfg is not None:
        return cfg.seed
    env = os.environ.get("FTFORGE_SEED")
    return int(env) if env and env.strip() else 0


def _out_dir(args, cfg: Optional[RunConfig], default: str) -> str:
    out = args.out or (cfg.get("out") if cfg else None) or default
    os.makedirs(out, exist_ok=True)
    return out


def _target_from_args(args, cfg: Optional[RunConfig]):
    if args.code or args.code_file:
        if args.code and args.code_file:
            raise UsageError("give --code or --code-file, not both")
        if args.code:
            code = builtin_code(args.code)
        else:
            with open(args.code_file) as fh:
                code = load_code(fh.read(), name=os.path.basename(args.code_file))
        state = args.state or "zero"
        if state not in STATE_LABELS:
            raise UsageError(f"unknown state {state!r}")
        return make_target(code, STATE_LABELS[state])
    if cfg is not None:
        return cfg.target()
    raise UsageError("need --code, --code-file or --config")


def _write(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


# ---- commands -----------------------------------------------------------------


def cmd_codes(args) -> int:
    for name in builtin_names():
        c = builtin_code(name)
        print(f"{name:10s} {code_label(c):12s} generators={len(c.generators)}")
    return EXIT_OK


def parse_tableau_text(text: str) -> StabilizerTableau:
    rows = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows:
        raise ValueError("no Pauli rows")
    return StabilizerTableau.from_paulis([PauliOperator.from_string(r) for r in rows])


def cmd_canon(args) -> int:
    with open(args.tableau) as fh:
        tab = parse_tableau_text(fh.read())
    for p in canonicalize(tab).rows():
        print(str(p))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = load_config(args.config) if args.config else None
    target = _target_from_args(args, cfg)
    circ = load_circuit(args.circuit)
    rep = verify_fault_tolerance(circ, target, args.weight_mode)
    print(rep)
    return EXIT_OK if rep.ft else EXIT_FAIL


def _apply_flag_overrides(cfg: RunConfig):
    return cfg.get("max_flags"), cfg.get("steps_per_flag")


def _emit_training(out: str, outcome, seed: int, kind: str, extra: Optional[dict] = None) -> dict:
    """Write per-agent best circuits, agents, log and summary; returns the summary."""
    accept = OracleAccept(outcome.task)
    _write(os.path.join(out, "train_log.csv"), outcome.log_csv())
    agents = []
    for i, r in enumerate(outcome.results):
        save_agent(r.agent, os.path.join(out, f"agent_{i}.ftagent"))
        entry = {"agent": i, "successes": r.successes, "episodes": r.episodes,
                 "first_success_step": r.first_success_step, "best_gates": None}
        if r.best is not None:
            # re-check in process before labelling anything
            ok = accept(r.best)
            label = ("verified FT" if kind != "lsp" else "verified exact") if ok else "UNVERIFIED"
            _write(os.path.join(out, f"agent_{i}_best.circ"),
                   r.best.to_text(f"agent {i}, seed {seed}, {label}"))
            entry.update(best_gates=len(r.best), best_two_qubit=r.best.two_qubit_count(), verified=ok)
        agents.append(entry)
    best = outcome.best
    summary = {"task": kind, "seed": seed, "n_flag": outcome.n_flag,
               "flag_counts_tried": outcome.flag_counts_tried, "agents": agents,
               "best_gates": len(best) if best is not None else None}
    if best is not None:
        _write(os.path.join(out, "best.circ"), best.to_text(f"best of {len(outcome.results)} agents, seed {seed}"))
    if extra:
        summary.update(extra)
    _write(os.path.join(out, "summary.json"), json.dumps(summary, indent=2) + "\n")
    return summary


def cmd_train(args) -> int:
    if not args.config:
        raise UsageError("train needs --config")
    cfg = load_config(args.config)
    seed = _seed(args, cfg)
    task = cfg.task()
    ppo = cfg.ppo()
    max_flags, spf = _apply_flag_overrides(cfg)
    outcome = train(task, ppo, seed, args.threads, max_flags, spf,
                    actions_for=lambda nf: cfg.actions(task.n_data, nf))
    out = _out_dir(args, cfg, "ftforge_out")
    summary = _emit_training(out, outcome, seed, task.kind)
    best = summary["best_gates"]
    print(f"best circuit: {best if best is not None else 'none'} gates "
          f"(flags={outcome.n_flag}); artifacts in {out}")
    return EXIT_OK if best is not None else EXIT_FAIL


def cmd_evaluate(args) -> int:
    cfg = load_config(args.config) if args.config else None
    target = _target_from_args(args, cfg)
    circ = load_circuit(args.circuit)
    ev = cfg.get("evaluation", {}) if cfg else {}
    ps = args.p or ev.get("p_list") or default_p_grid()
    trials = args.trials or ev.get("trials", 100_000)
    method = args.method or ev.get("method", "direct")
    state_ok, flags_ok = check_output_state(circ, target)
    if not (state_ok and flags_ok):
        _err("circuit does not prepare the target with flags returned to |0>")
        return EXIT_FAIL
    rep = evaluate(circ, target, ps, trials, _seed(args, cfg), args.threads, method)
    text = rep.to_csv()
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    print(f"slope={rep.slope:.4g} r2={rep.r2:.4g} acceptance_coeff={rep.accept_coeff:.4g}", file=sys.stderr)
    return EXIT_OK


def cmd_transfer(args) -> int:
    if not args.config or not args.old_config:
        raise UsageError("transfer needs --old-config (source) and --config (new)")
    old_cfg, new_cfg = load_config(args.old_config), load_config(args.config)
    old_task, new_task = old_cfg.task(), new_cfg.task()
    if old_task.obs_dim != new_task.obs_dim:
        raise UsageError("source and new tasks have different registers")
    agent = load_agent(args.agent)
    new_agent = transfer_restrict(agent, old_task.actions, new_task.actions)
    out = args.out or os.path.splitext(args.agent)[0] + "_transfer.ftagent"
    save_agent(new_agent, out)
    print(f"restricted agent: {len(old_task.actions)} -> {len(new_task.actions)} actions, saved to {out}")
    if args.fine_tune:
        ppo = new_cfg.ppo()
        ppo.total_timesteps = args.fine_tune
        res = train_agent(new_task, ppo, _seed(args, new_cfg), 0, agent=new_agent,
                          accept=OracleAccept(new_task))
        save_agent(res.agent, out)
        if res.best is not None:
            path = os.path.splitext(out)[0] + "_best.circ"
            _write(path, res.best.to_text("fine-tuned after transfer"))
            print(f"fine-tune best: {len(res.best)} gates -> {path}")
        else:
            print("fine-tune found no successful circuit")
    return EXIT_OK


SWEEP_COLUMNS = ("mu_f", "mu_d", "mu_p", "n_flag", "best_gates", "best_two_qubit", "successes",
                 "episodes", "first_success_step")


def cmd_sweep(args) -> int:
    if not args.config:
        raise UsageError("sweep needs --config")
    cfg = load_config(args.config)
    grid = cfg.get("sweep")
    if not grid:
        raise UsageError("config has no 'sweep' section")
    seed = _seed(args, cfg)
    base = cfg.task()
    ppo = cfg.ppo()
    d = RewardWeights.default(base.kind, base.n_data) if cfg.get("weights") is None else base.weights
    axes = [grid.get(k, [getattr(d, k)]) for k in ("mu_f", "mu_d", "mu_p")]
    max_flags, spf = _apply_flag_overrides(cfg)
    out = _out_dir(args, cfg, "ftforge_sweep")
    rows = []
    for mf, md, mp in itertools.product(*axes):
        task = replace(base, weights=RewardWeights(mf, md, mp))
        oc = train(task, ppo, seed, args.threads, max_flags, spf,
                   actions_for=lambda nf: cfg.actions(task.n_data, nf))
        best = oc.best
        rows.append({"mu_f": mf, "mu_d": md, "mu_p": mp, "n_flag": oc.n_flag,
                     "best_gates": len(best) if best is not None else "",
                     "best_two_qubit": best.two_qubit_count() if best is not None else "",
                     "successes": sum(r.successes for r in oc.results),
                     "episodes": sum(r.episodes for r in oc.results),
                     "first_success_step": min((r.first_success_step for r in oc.results
                                                if r.first_success_step is not None), default="")})
        sub = os.path.join(out, f"mu_{mf:g}_{md:g}_{mp:g}")
        os.makedirs(sub, exist_ok=True)
        _emit_training(sub, oc, seed, task.kind, {"weights": [mf, md, mp]})
    with open(os.path.join(out, "sweep.csv"), "w", newline="") as fh:
        w = csv.DictWriter(fh, SWEEP_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    print(f"{len(rows)} sweep points written to {os.path.join(out, 'sweep.csv')}")
    return EXIT_OK


# ---- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help="overrides config and FTFORGE_SEED")
    common.add_argument("--threads", type=int, default=1, help="worker count (results do not depend on it)")
    common.add_argument("--out", help="output file or directory")

    target = argparse.ArgumentParser(add_help=False)
    target.add_argument("--code", help=f"built-in code ({', '.join(builtin_names())})")
    target.add_argument("--code-file", help="custom code file")
    target.add_argument("--state", help="zero, one, plus, minus, plus_i or minus_i")

    p = argparse.ArgumentParser(prog="ftforge", description="Fault-tolerant state preparation toolkit.")
    sub = p.add_subparsers(dest="command", required=True)
    s = sub.add_parser("codes", parents=[common], help="list built-in codes")
    s.set_defaults(func=cmd_codes)
    s = sub.add_parser("canon", parents=[common], help="canonical form of a tableau file")
    s.add_argument("tableau")
    s.set_defaults(func=cmd_canon)
    s = sub.add_parser("verify", parents=[common, target], help="check single-fault tolerance")
    s.add_argument("circuit")
    s.add_argument("--weight-mode", choices=WEIGHT_MODES, default="auto")
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("train", parents=[common], help="train agents from a config")
    s.set_defaults(func=cmd_train)
    s = sub.add_parser("evaluate", parents=[common, target], help="Monte-Carlo noise evaluation")
    s.add_argument("circuit")
    s.add_argument("--p", type=float, nargs="+", help="physical error rates")
    s.add_argument("--trials", type=int)
    s.add_argument("--method", choices=("direct", "stratified"))
    s.set_defaults(func=cmd_evaluate)
    s = sub.add_parser("transfer", parents=[common], help="restrict an agent to a new action set")
    s.add_argument("agent")
    s.add_argument("--old-config", help="config the agent was trained with")
    s.add_argument("--fine-tune", type=int, metavar="STEPS", help="continue training for STEPS steps")
    s.set_defaults(func=cmd_transfer)
    s = sub.add_parser("sweep", parents=[common], help="reward-weight grid from the config 'sweep' section")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.threads < 1:
        _err("--threads must be at least 1")
        return EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError, CircuitParseError, FileNotFoundError, IsADirectoryError) as exc:
        _err(str(exc))
        return EXIT_USAGE
    except ValueError as exc:
        _err(str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
