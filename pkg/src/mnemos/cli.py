"""Command-line harness for the four experiments.

Subcommands
-----------
stone-vs-ets   budget-limited QA over a generated corpus, both engines
bandit         replay vs. epsilon-greedy on the three-arm bandit
sharing        K sharing agents vs. one solo agent on rule-tagged tasks
minimality     randomized raw-vs-extracted store size comparison

Every run is fully determined by (config, seed): output files are
byte-identical across repeated invocations. The seed comes from
--seed, else the config file, else the MNEMOS_SEED environment
variable, else 0. Config files are JSON objects whose keys match the
long flag names (underscored); flags override file values, file values
override defaults, and unknown keys are rejected.

Output formats
--------------
csv: comment header lines (schema version, experiment, compact config
echo) followed by a fixed-column table. Column orders are frozen:

  stone-vs-ets: engine,question_index,q_id,correct,cumulative_correct,
                retrievals,budget_remaining,store_size_units
  bandit:       step,mean_reward_replay,mean_reward_epsgreedy
  sharing:      series,x,success_rate   (x = round for shared, question
                count for solo; both 1-based)
  minimality:   case_index,size_stone,size_ets,holds,strict,overlapping

json: a versioned envelope {schema_version, experiment, config, series,
summary} with series as columnar lists.

Corpus dump format (--dump-corpus on stone-vs-ets): line-oriented text,
one record per line:

  doc <doc_id> <fact_id>:<tok|tok|...> ...
  question <q_id> <target_fact_id> <tok|tok|...>

with token sets sorted. Writes are atomic (temp file then rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .insight import run_bandit
from .minimality import check_minimality
from .paradigms import RunMetrics, run_ets, run_stone
from .rng import substream
from .sharing import SharingParams, questions_to_rate, replicate, run_shared, run_solo
from .simenv import Arm, BanditEnv, Corpus, default_bandit_env, gen_corpus

SCHEMA_VERSION = 1

# Per-experiment parameter names, defaults, and validators. A validator
# returns an error string or None.
def _ge(minimum):
    return lambda v: None if v >= minimum else f"must be >= {minimum}"


def _prob(v):
    return None if 0.0 <= v <= 1.0 else "must be in [0, 1]"


_PARAM_SPECS: dict[str, dict[str, tuple[object, object]]] = {
    "stone-vs-ets": {
        "docs": (50, _ge(1)),
        "facts": (10, _ge(1)),
        "questions": (10, _ge(1)),
        "budget": (100, _ge(0)),
        "strict_budget": (False, None),
    },
    "bandit": {
        "horizon": (1000, _ge(1)),
        "trials": (10, _ge(1)),
        "epsilon": (0.1, _prob),
        "arms": (None, None),
    },
    "sharing": {
        "agents": (10, _ge(1)),
        "questions": (50, _ge(1)),
        "p_base": (0.3, _prob),
        "p_boost": (0.9, _prob),
        "rules": (25, _ge(1)),
        "replications": (8, _ge(1)),
        "share_failures": (False, None),
        "pooled_rate": (False, None),
        "target_rate": (0.5, _prob),
    },
    "minimality": {
        "cases": (1000, _ge(1)),
    },
}


@dataclass
class RunConfig:
    experiment: str
    seed: int
    params: dict
    output: Path | None
    fmt: str
    dump_corpus: Path | None = None


@dataclass
class MetricsEnvelope:
    experiment: str
    config: dict
    series: dict
    summary: dict
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> str:
        payload = {
            "schema_version": self.schema_version,
            "experiment": self.experiment,
            "config": self.config,
            "series": self.series,
            "summary": self.summary,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def to_csv(self) -> str:
        head = [
            f"# mnemos-schema {self.schema_version}",
            f"# experiment={self.experiment}",
            f"# config={json.dumps(self.config, sort_keys=True)}",
        ]
        return "\n".join(head + _csv_rows(self.experiment, self.series)) + "\n"


def _csv_rows(experiment: str, series: dict) -> list[str]:
    rows = []
    if experiment == "stone-vs-ets":
        cols = (
            "question_index,q_id,correct,cumulative_correct,"
            "retrievals,budget_remaining,store_size_units"
        )
        rows.append("engine," + cols)
        for engine in ("stone", "ets"):
            table = series[engine]
            for i in range(len(table["q_id"])):
                rows.append(
                    f"{engine},{table['question_index'][i]},{table['q_id'][i]},"
                    f"{table['correct'][i]},{table['cumulative_correct'][i]},"
                    f"{table['retrievals'][i]},{table['budget_remaining'][i]},"
                    f"{table['store_size_units'][i]}"
                )
    elif experiment == "bandit":
        rows.append("step,mean_reward_replay,mean_reward_epsgreedy")
        for i in range(len(series["step"])):
            rows.append(
                f"{series['step'][i]},{series['mean_reward_replay'][i]!r},"
                f"{series['mean_reward_epsgreedy'][i]!r}"
            )
    elif experiment == "sharing":
        rows.append("series,x,success_rate")
        for label in ("shared", "solo"):
            table = series[label]
            for x, rate in zip(table["x"], table["success_rate"]):
                rows.append(f"{label},{x},{rate!r}")
    elif experiment == "minimality":
        rows.append("case_index,size_stone,size_ets,holds,strict,overlapping")
        table = series["cases"]
        for i in range(len(table["case_index"])):
            rows.append(
                f"{table['case_index'][i]},{table['size_stone'][i]},"
                f"{table['size_ets'][i]},{table['holds'][i]},"
                f"{table['strict'][i]},{table['overlapping'][i]}"
            )
    else:
        raise ValueError(f"no CSV writer for experiment {experiment!r}")
    return rows


def corpus_to_lines(corpus: Corpus) -> list[str]:
    """Line-oriented corpus dump; format documented in the module docstring."""
    lines = []
    for doc in corpus.docs:
        cells = " ".join(
            f"{fact.id}:{'|'.join(sorted(fact.tokens))}" for fact in doc.facts
        )
        lines.append(f"doc {doc.doc_id} {cells}")
    for q in corpus.questions:
        lines.append(
            f"question {q.q_id} {q.target} {'|'.join(sorted(q.query_tokens))}"
        )
    return lines


def _parse_arms(text: str) -> tuple[Arm, ...]:
    arms = []
    for piece in text.split(","):
        try:
            p, r = piece.split(":")
            arm = Arm(success_prob=float(p), reward=float(r))
        except ValueError:
            raise ValueError(f"bad arm {piece!r}; expected prob:reward") from None
        if not 0.0 <= arm.success_prob <= 1.0 or arm.reward <= 0:
            raise ValueError(f"bad arm {piece!r}; need prob in [0,1], reward > 0")
        arms.append(arm)
    if len(arms) < 2:
        raise ValueError("need at least 2 arms")
    return tuple(arms)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mnemos",
        description="Deterministic experience-memory experiments",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--config", type=Path, default=None, help="JSON config file")
        p.add_argument("--output", type=Path, default=None, help="default: stdout")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("stone-vs-ets", help="budget-limited QA, both engines")
    common(p)
    p.add_argument("--docs", type=int, default=None)
    p.add_argument("--facts", type=int, default=None, help="facts per document")
    p.add_argument("--questions", type=int, default=None, help="questions per document")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--strict-budget", action="store_true", default=None)
    p.add_argument("--dump-corpus", type=Path, default=None)

    p = sub.add_parser("bandit", help="replay vs. epsilon-greedy")
    common(p)
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--arms", type=str, default=None, help="p:r,p:r,... (default 3-arm config)")

    p = sub.add_parser("sharing", help="memory-sharing agents vs. solo agent")
    common(p)
    p.add_argument("--agents", type=int, default=None)
    p.add_argument("--questions", type=int, default=None, help="questions per agent")
    p.add_argument("--p-base", type=float, default=None)
    p.add_argument("--p-boost", type=float, default=None)
    p.add_argument("--rules", type=int, default=None, help="rule universe size")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--share-failures", action="store_true", default=None)
    p.add_argument("--pooled-rate", action="store_true", default=None)
    p.add_argument("--target-rate", type=float, default=None)

    p = sub.add_parser("minimality", help="store-size comparison over random cases")
    common(p)
    p.add_argument("--cases", type=int, default=None)

    return parser


def parse_config(argv: list[str]) -> RunConfig:
    """Resolve flags, config file and defaults into a validated RunConfig."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    spec = _PARAM_SPECS[args.experiment]

    file_cfg = {}
    if args.config is not None:
        try:
            file_cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as e:
            parser.error(f"cannot read config file {args.config}: {e}")
        if not isinstance(file_cfg, dict):
            parser.error(f"config file {args.config} must hold a JSON object")
        allowed = set(spec) | {"seed", "output", "format"}
        unknown = sorted(set(file_cfg) - allowed)
        if unknown:
            parser.error(f"unknown config keys for {args.experiment}: {unknown}")

    def resolve(key, flag_value):
        if flag_value is not None:
            return flag_value
        if key in file_cfg:
            return file_cfg[key]
        return spec[key][0] if key in spec else None

    params = {}
    for key, (_default, validator) in spec.items():
        value = resolve(key, getattr(args, key))
        if key == "arms" and isinstance(value, str):
            try:
                value = _parse_arms(value)
            except ValueError as e:
                parser.error(f"invalid value for --arms: {e}")
        if validator is not None and value is not None:
            problem = validator(value)
            if problem:
                parser.error(f"invalid value for --{key.replace('_', '-')}: {problem}")
        params[key] = value

    seed = args.seed
    if seed is None:
        seed = file_cfg.get("seed")
    if seed is None:
        seed = int(os.environ.get("MNEMOS_SEED", "0"))

    output = args.output if args.output is not None else file_cfg.get("output")
    if output is not None:
        output = Path(output)
    fmt = args.format or file_cfg.get("format")
    if fmt is None:
        fmt = "json" if args.experiment == "minimality" else "csv"
    if fmt not in ("csv", "json"):
        parser.error(f"invalid value for --format: {fmt!r}")

    return RunConfig(
        experiment=args.experiment,
        seed=int(seed),
        params=params,
        output=output,
        fmt=fmt,
        dump_corpus=getattr(args, "dump_corpus", None),
    )


def _metrics_table(metrics: RunMetrics) -> dict:
    cum = 0
    table = {
        "question_index": [],
        "q_id": [],
        "correct": [],
        "cumulative_correct": [],
        "retrievals": [],
        "budget_remaining": [],
        "store_size_units": [],
    }
    for i, rec in enumerate(metrics.records):
        cum += rec.correct
        table["question_index"].append(i)
        table["q_id"].append(rec.q_id)
        table["correct"].append(int(rec.correct))
        table["cumulative_correct"].append(cum)
        table["retrievals"].append(rec.retrievals_so_far)
        table["budget_remaining"].append(rec.budget_after)
        table["store_size_units"].append(rec.store_size_units)
    return table


def _run_stone_vs_ets(config: RunConfig) -> MetricsEnvelope:
    p = config.params
    corpus = gen_corpus(p["docs"], p["facts"], p["questions"], config.seed)
    if config.dump_corpus is not None:
        _atomic_write(config.dump_corpus, "\n".join(corpus_to_lines(corpus)) + "\n")
    order = list(corpus.questions)
    substream(config.seed, "order").shuffle(order)
    strict = bool(p["strict_budget"])
    results = {
        "stone": run_stone(corpus, order, p["budget"], strict),
        "ets": run_ets(corpus, order, p["budget"], strict),
    }
    series = {name: _metrics_table(m) for name, m in results.items()}
    summary = {
        name: {
            "final_cumulative_correct": int(m.total_correct),
            "retrievals_used": int(m.total_retrievals),
            "final_budget_remaining": m.records[-1].budget_after if m.records else p["budget"],
            "final_store_size_units": m.records[-1].store_size_units if m.records else 0,
        }
        for name, m in results.items()
    }
    return MetricsEnvelope("stone-vs-ets", _echo(config), series, summary)


def _run_bandit_cmd(config: RunConfig) -> MetricsEnvelope:
    p = config.params
    if p["arms"] is not None:
        arms = p["arms"] if not isinstance(p["arms"], str) else _parse_arms(p["arms"])
        env = BanditEnv(arms=tuple(arms), rng_seed=config.seed)
    else:
        env = default_bandit_env(config.seed)
    replay = run_bandit(env, "replay", p["horizon"], p["trials"], config.seed)
    greedy = run_bandit(
        env, "eps-greedy", p["horizon"], p["trials"], config.seed, epsilon=p["epsilon"]
    )
    half = p["horizon"] // 2
    series = {
        "step": list(range(p["horizon"])),
        "mean_reward_replay": [float(x) for x in replay.mean_reward_per_step],
        "mean_reward_epsgreedy": [float(x) for x in greedy.mean_reward_per_step],
    }
    summary = {
        "replay_mean_reward": replay.mean_reward(),
        "epsgreedy_mean_reward": greedy.mean_reward(),
        "replay_mean_reward_late": replay.mean_reward(half),
        "epsgreedy_mean_reward_late": greedy.mean_reward(half),
    }
    return MetricsEnvelope("bandit", _echo(config), series, summary)


def _replication_seeds(seed: int, count: int) -> list[int]:
    return [int(substream(seed, "replications", i).integers(2**63)) for i in range(count)]


def _run_sharing_cmd(config: RunConfig) -> MetricsEnvelope:
    p = config.params
    params = SharingParams(
        p_base=p["p_base"],
        p_boost=p["p_boost"],
        rule_universe=p["rules"],
        share_failures=bool(p["share_failures"]),
    )
    k, n, reps = p["agents"], p["questions"], p["replications"]
    seeds = _replication_seeds(config.seed, reps)
    shared_mean = replicate(lambda s: run_shared(k, n, params, s).series, reps, seeds)
    solo_mean = replicate(lambda s: run_solo(k, n, params, s).series, reps, seeds)
    series = {
        "shared": {
            "x": list(range(1, n + 1)),
            "success_rate": [float(v) for v in shared_mean],
        },
        "solo": {
            "x": list(range(1, k * n + 1)),
            "success_rate": [float(v) for v in solo_mean],
        },
    }
    if p["pooled_rate"]:
        pooled = replicate(
            lambda s: run_shared(k, n, params, s, track_pooled_rate=True).pooled_series,
            reps,
            seeds,
        )
        series["shared_pooled"] = {
            "x": list(range(1, n + 1)),
            "success_rate": [float(v) for v in pooled],
        }
    target = p["target_rate"]
    summary = {
        "target_rate": target,
        "shared_final_rate": float(shared_mean[-1]),
        "solo_final_rate": float(solo_mean[-1]),
        "shared_questions_to_target": questions_to_rate(shared_mean, target),
        "solo_questions_to_target": questions_to_rate(solo_mean, target),
    }
    return MetricsEnvelope("sharing", _echo(config), series, summary)


def _run_minimality_cmd(config: RunConfig) -> MetricsEnvelope:
    reports = check_minimality(config.params["cases"], config.seed)
    series = {
        "cases": {
            "case_index": [r.case_index for r in reports],
            "size_stone": [r.size_stone for r in reports],
            "size_ets": [r.size_ets for r in reports],
            "holds": [int(r.holds) for r in reports],
            "strict": [int(r.strict) for r in reports],
            "overlapping": [int(r.overlapping) for r in reports],
        }
    }
    summary = {
        "cases": len(reports),
        "holds_count": sum(r.holds for r in reports),
        "strict_count": sum(r.strict for r in reports),
        "equality_count": sum(not r.strict for r in reports),
        "counterexamples": [],
    }
    return MetricsEnvelope("minimality", _echo(config), series, summary)


def _echo(config: RunConfig) -> dict:
    """Config echo: experiment parameters and seed, nothing delivery-specific.

    Output path and format are excluded so identical runs to different
    destinations produce identical bytes.
    """
    echoed = {"seed": config.seed}
    for key, value in sorted(config.params.items()):
        if key == "arms" and value is not None:
            echoed[key] = [[a.success_prob, a.reward] for a in value]
        else:
            echoed[key] = value
    return echoed


_DISPATCH = {
    "stone-vs-ets": _run_stone_vs_ets,
    "bandit": _run_bandit_cmd,
    "sharing": _run_sharing_cmd,
    "minimality": _run_minimality_cmd,
}


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    try:
        tmp.write_text(text)
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink(missing_ok=True)


def execute(config: RunConfig) -> tuple[MetricsEnvelope | None, int]:
    """Run the configured experiment and emit its metrics.

    Returns the envelope and an exit code: 0 on success, 1 on an
    invariant violation during the run or an output failure.
    """
    try:
        envelope = _DISPATCH[config.experiment](config)
        text = envelope.to_json() if config.fmt == "json" else envelope.to_csv()
    except (AssertionError, RuntimeError, ValueError) as e:
        print(f"mnemos: run failed: {e}", file=sys.stderr)
        return None, 1
    try:
        if config.output is None:
            sys.stdout.write(text)
        else:
            _atomic_write(config.output, text)
    except OSError as e:
        print(f"mnemos: cannot write {config.output}: {e}", file=sys.stderr)
        return envelope, 1
    return envelope, 0


def main(argv: list[str] | None = None) -> int:
    config = parse_config(sys.argv[1:] if argv is None else argv)
    _, code = execute(config)
    return code


if __name__ == "__main__":
    sys.exit(main())
