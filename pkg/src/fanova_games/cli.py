"""Command-line runner.

A run is described by one JSON document::

    {
      "model": "2*x1 + 2*x2 + x1*x2",
      "d": 2,
      "distribution": {"gaussian": {"mu": [0, 0], "rho": 0.5}},
      "imputer": {"kind": "c", "mc_samples": 512, "seed": 0, "mode": "auto"},
      "game": {"local": {"x0": [1, 1]}},
      "effects": [{"effect": "partial", "type": "individual"}, "pfi"],
      "output": {"path": "out.json", "format": "json"}
    }

``distribution`` may instead be ``{"dataset": "data.csv"}``; ``game`` may be
``{"sensitivity": {"n": 500}}`` or ``{"risk": {"loss": "squared", "n": 500}}``.
Every field can be overridden with a flag of the same dotted name, e.g.
``--imputer.kind m`` or ``--game.sensitivity.n 1000``.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import numpy as np

from .aliases import UnknownAliasError, alias_table, get_alias
from .coalitions import GameTensor, PreconditionError, bits_to_features, popcount
from .experiments import EXPERIMENTS, N_REPETITIONS, reproduce
from .games import Game, local_game, risk_game, sensitivity_game
from .gaussian import Dataset, DatasetError, GaussianSpec, NotCovarianceError, load_dataset
from .influence import (
    EffectRequest,
    evaluate_request,
    h_statistic,
)
from .model import ModelResourceError, ModelSyntaxError, parse_model
from .synthetic import NOISE_VARIANCE, synthetic_dataset
from .value_functions import ImputerConfig, ImputerConfigError, ValueFunction

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
DEFAULT_POINTS = 500


class ConfigError(ValueError):
    """Invalid run configuration; ``field`` is the dotted path of the offending entry."""

    def __init__(self, field_path: str, message: str):
        self.field = field_path
        super().__init__(f"{field_path}: {message}")


class NumericError(RuntimeError):
    """A run produced non-finite or degenerate numbers."""


# --- configuration -------------------------------------------------------------


def _set_dotted(cfg: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = cfg
    for k in keys[:-1]:
        if not isinstance(node.get(k), dict):
            node[k] = {}
        node = node[k]
    node[keys[-1]] = value


def _parse_scalar(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated numbers, got {text!r}") from None


def _parse_targets(text: str) -> list[list[int]]:
    try:
        return [[int(i) for i in part.split("+")] for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError("targets", f"expected coalitions like '1,2+3', got {text!r}") from None


def _split_overrides(extra: list[str]) -> list[tuple[str, str]]:
    pairs = []
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--"):
            raise ConfigError(tok, "unexpected argument")
        name = tok[2:]
        if "=" in name:
            name, value = name.split("=", 1)
            i += 1
        else:
            if i + 1 >= len(extra):
                raise ConfigError(name, "missing value")
            value = extra[i + 1]
            i += 2
        pairs.append((name, value))
    return pairs


def build_config(args: argparse.Namespace, extra: list[str]) -> dict:
    """Merge the config file, the named flags and dotted overrides (in that order)."""
    cfg: dict = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from None
        if not isinstance(cfg, dict):
            raise ConfigError("config", "top level must be an object")
    cfg = copy.deepcopy(cfg)

    if args.model is not None:
        cfg["model"] = args.model
    if args.d is not None:
        cfg["d"] = args.d
    if args.rho is not None:
        gauss = cfg.setdefault("distribution", {}).setdefault("gaussian", {})
        gauss.pop("sigma", None)
        gauss["rho"] = args.rho
        cfg["distribution"].pop("dataset", None)
    if args.dataset is not None:
        cfg["distribution"] = {"dataset": args.dataset}
    imp = cfg.setdefault("imputer", {})
    if args.imputer is not None:
        imp["kind"] = args.imputer
    if args.baseline is not None:
        imp["baseline"] = _floats(args.baseline, "baseline")
    if args.samples is not None:
        imp["mc_samples"] = args.samples
    if args.seed is not None:
        imp["seed"] = args.seed
    if args.mode is not None:
        imp["mode"] = args.mode
    if args.game is not None:
        old = cfg.get("game") or {}
        cfg["game"] = {args.game: old.get(args.game, {})}
    if args.x0 is not None:
        game = cfg.setdefault("game", {"local": {}})
        kind = next(iter(game), "local")
        game.setdefault(kind, {})["x0"] = _floats(args.x0, "x0")
    if args.effect is not None or args.type is not None:
        req = {"effect": args.effect or "partial", "type": args.type or "individual"}
        if args.order is not None:
            req["order"] = args.order
        if args.targets is not None:
            req["targets"] = _parse_targets(args.targets)
        cfg["effects"] = [req]
    elif args.order is not None or args.targets is not None:
        for req in cfg.get("effects", []):
            if isinstance(req, dict):
                if args.order is not None:
                    req["order"] = args.order
                if args.targets is not None:
                    req["targets"] = _parse_targets(args.targets)
    if args.alias:
        cfg.setdefault("effects", [])
        cfg["effects"] = [e for e in cfg["effects"]] + list(args.alias)
    out = cfg.setdefault("output", {})
    if args.output is not None:
        out["path"] = args.output
    if args.format is not None:
        out["format"] = args.format

    for name, value in _split_overrides(extra):
        _set_dotted(cfg, name, _parse_scalar(value))
    return cfg


@dataclass
class EffectItem:
    request: EffectRequest
    game_kind: str
    imputer_kind: str
    alias: Optional[str] = None
    post: Optional[str] = None


@dataclass
class RunConfig:
    """Validated run description."""

    model_text: str
    d: int
    spec: Optional[GaussianSpec]
    dataset: Optional[Dataset]
    imputer: dict
    game_kind: str
    game_params: dict
    effects: list[EffectItem]
    output_path: Optional[str]
    output_format: str
    raw: dict = field(default_factory=dict)


def _require(cfg: dict, key: str, path: str):
    if key not in cfg or cfg[key] is None:
        raise ConfigError(path, "is required")
    return cfg[key]


def _vector(value, d: int, path: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(path, "expected a list of numbers") from None
    if arr.shape != (d,):
        raise ConfigError(path, f"expected {d} values, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ConfigError(path, "values must be finite")
    return arr


_IMPUTER_NAMES = {"b": "baseline", "m": "marginal", "c": "conditional",
                  "baseline": "baseline", "marginal": "marginal", "conditional": "conditional"}


def _effect_item(entry, idx: int, cfg_game: str, cfg_imputer: str, d: int) -> EffectItem:
    path = f"effects[{idx}]"
    if isinstance(entry, str):
        entry = {"alias": entry}
    if not isinstance(entry, dict):
        raise ConfigError(path, "expected an object or an alias name")
    if "alias" in entry:
        try:
            a = get_alias(entry["alias"])
        except UnknownAliasError as exc:
            raise ConfigError(f"{path}.alias", str(exc)) from None
        imputer = entry.get("imputer", a.template.imputer)
        imputer = _IMPUTER_NAMES.get(imputer, imputer)
        allowed = (a.template.imputer,) + a.template.imputer_alternatives
        if imputer not in allowed:
            raise ConfigError(f"{path}.imputer", f"{a.name} uses one of {allowed}")
        try:
            req = EffectRequest(a.effect, entry.get("type", a.influence_type),
                                entry.get("order", a.order), entry.get("targets"))
        except PreconditionError as exc:
            raise ConfigError(path, str(exc)) from None
        return EffectItem(req, a.template.game, imputer, a.name, a.template.post)
    try:
        req = EffectRequest(_require(entry, "effect", f"{path}.effect"),
                            entry.get("type", entry.get("influence_type", "individual")),
                            entry.get("order"), entry.get("targets"))
    except PreconditionError as exc:
        raise ConfigError(path, str(exc)) from None
    if req.order is not None and not 1 <= req.order <= d:
        raise ConfigError(f"{path}.order", f"must be in 1..{d}")
    if req.targets is not None:
        for t in req.targets:
            if not t or any(not 1 <= i <= d for i in t):
                raise ConfigError(f"{path}.targets", f"coalition {list(t)} is not a non-empty subset of 1..{d}")
    return EffectItem(req, cfg_game, cfg_imputer)


def validate_config(cfg: dict) -> RunConfig:
    """Check a merged config and resolve it into a :class:`RunConfig`."""
    text = _require(cfg, "model", "model")
    if not isinstance(text, str):
        raise ConfigError("model", "expected an expression string")
    d = _require(cfg, "d", "d")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ConfigError("d", f"expected a positive integer, got {d!r}")
    try:
        parse_model(text, d)
    except ModelSyntaxError as exc:
        raise ConfigError("model", str(exc)) from None

    imp = dict(cfg.get("imputer") or {})
    kind = imp.get("kind")
    if kind is None:
        raise ConfigError("imputer.kind", "is required (b, m or c)")
    if kind not in _IMPUTER_NAMES:
        raise ConfigError("imputer.kind", f"unknown imputer {kind!r}; expected b, m or c")
    imp["kind"] = _IMPUTER_NAMES[kind]
    for key in ("mc_samples", "seed"):
        if key in imp and (not isinstance(imp[key], int) or isinstance(imp[key], bool)):
            raise ConfigError(f"imputer.{key}", "expected an integer")
    if imp.get("mc_samples", 1) < 1:
        raise ConfigError("imputer.mc_samples", "must be positive")
    if imp.get("seed", 0) < 0:
        raise ConfigError("imputer.seed", "must be non-negative")
    if imp.get("mode", "auto") not in ("auto", "monte_carlo", "exact_moments"):
        raise ConfigError("imputer.mode", "expected auto, monte_carlo or exact_moments")
    if imp.get("baseline") is not None:
        imp["baseline"] = _vector(imp["baseline"], d, "imputer.baseline")

    dist = _require(cfg, "distribution", "distribution")
    if not isinstance(dist, dict) or len(dist) != 1 or next(iter(dist)) not in ("gaussian", "dataset"):
        raise ConfigError("distribution", "expected exactly one of {'gaussian': ...} or {'dataset': path}")
    spec = dataset = None
    if "gaussian" in dist:
        g = dist["gaussian"] or {}
        mu = _vector(g.get("mu", [0.0] * d), d, "distribution.gaussian.mu")
        if "sigma" in g and "rho" in g:
            raise ConfigError("distribution.gaussian", "give either sigma or rho, not both")
        try:
            if "sigma" in g:
                sigma = np.asarray(g["sigma"], dtype=float)
                if sigma.shape != (d, d):
                    raise ConfigError("distribution.gaussian.sigma", f"expected a {d}x{d} matrix")
                spec = GaussianSpec(mu, sigma)
            else:
                spec = GaussianSpec.equicorrelated(d, float(g.get("rho", 0.0)), mu)
        except NotCovarianceError as exc:
            raise ConfigError("distribution.gaussian", str(exc)) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError("distribution.gaussian", str(exc)) from None
    else:
        try:
            dataset = load_dataset(dist["dataset"])
        except (OSError, DatasetError) as exc:
            raise ConfigError("distribution.dataset", str(exc)) from None
        if dataset.d != d:
            raise ConfigError("distribution.dataset", f"has {dataset.d} feature columns, d is {d}")

    game = _require(cfg, "game", "game")
    if not isinstance(game, dict) or len(game) != 1:
        raise ConfigError("game", "expected exactly one of local, sensitivity or risk")
    game_kind, params = next(iter(game.items()))
    if game_kind not in ("local", "sensitivity", "risk"):
        raise ConfigError("game", f"unknown game {game_kind!r}; expected local, sensitivity or risk")
    params = dict(params or {})
    if "x0" in params:
        params["x0"] = _vector(params["x0"], d, f"game.{game_kind}.x0")
    if game_kind == "local" and "x0" not in params:
        raise ConfigError("game.local.x0", "is required for a local game")
    if "n" in params and (not isinstance(params["n"], int) or params["n"] < 2):
        raise ConfigError(f"game.{game_kind}.n", "expected an integer >= 2")
    if game_kind == "risk" and params.get("loss", "squared") not in ("squared", "log"):
        raise ConfigError("game.risk.loss", "expected squared or log")

    effects = cfg.get("effects")
    if not effects:
        raise ConfigError("effects", "at least one effect request is required")
    if not isinstance(effects, list):
        effects = [effects]
    items = [_effect_item(e, i, game_kind, imp["kind"], d) for i, e in enumerate(effects)]
    for i, item in enumerate(items):
        if item.imputer_kind == "baseline" and imp.get("baseline") is None and spec is None:
            raise ConfigError("imputer.baseline", "baseline imputation needs a baseline vector")
        if item.imputer_kind == "conditional" and spec is None:
            raise ConfigError(f"effects[{i}]", "conditional imputation needs a gaussian distribution")
        if item.game_kind == "local" and item.game_kind != game_kind and "x0" not in params:
            raise ConfigError("game.local.x0", f"effects[{i}] needs a local game with x0")

    out = cfg.get("output") or {}
    fmt = out.get("format", "json")
    if fmt not in ("json", "csv"):
        raise ConfigError("output.format", f"expected csv or json, got {fmt!r}")
    return RunConfig(text, d, spec, dataset, imp, game_kind, params, items, out.get("path"), fmt, cfg)


# --- execution -------------------------------------------------------------------


class _CountingView:
    """Records the coalitions one effect computation touches."""

    def __init__(self, game: Game):
        self._game = game
        self.d = game.d
        self.kind = game.kind
        self.touched: set[int] = set()

    def value(self, bits: int) -> float:
        self.touched.add(bits)
        return self._game.value(bits)

    def to_tensor(self) -> GameTensor:
        self.touched.update(range(1 << self.d))
        return self._game.to_tensor()


class Runner:
    """Builds value functions and games on demand and evaluates effect requests."""

    def __init__(self, config: RunConfig):
        self.config = config
        self.F = parse_model(config.model_text, config.d)
        self._vfs: dict[str, ValueFunction] = {}
        self._games: dict[tuple[str, str], Game] = {}
        self._labelled: Optional[Dataset] = None

    def seed(self) -> int:
        return int(self.config.imputer.get("seed", 0))

    def value_function(self, kind: str) -> ValueFunction:
        if kind not in self._vfs:
            imp, cfg = self.config.imputer, self.config
            background = cfg.spec if cfg.spec is not None else cfg.dataset
            baseline = imp.get("baseline")
            if kind == "baseline" and baseline is None:
                baseline = cfg.spec.mu if cfg.spec is not None else cfg.dataset.x.mean(axis=0)
            ic = ImputerConfig(kind, baseline=baseline,
                               background=None if kind == "baseline" else background,
                               mc_samples=imp.get("mc_samples", 512), seed=self.seed(),
                               mode=imp.get("mode", "auto"))
            self._vfs[kind] = ValueFunction(self.F, ic)
        return self._vfs[kind]

    def points(self):
        cfg = self.config
        if cfg.dataset is not None:
            return cfg.dataset
        n = cfg.game_params.get("n", DEFAULT_POINTS)
        return (cfg.spec, n, self.seed())

    def labelled_data(self) -> Dataset:
        cfg = self.config
        if cfg.dataset is not None:
            if cfg.dataset.y is None:
                raise ConfigError("distribution.dataset", "risk game needs a final column named y")
            return cfg.dataset
        if self._labelled is None:
            n = cfg.game_params.get("n", DEFAULT_POINTS)
            noise = float(cfg.game_params.get("noise_variance", NOISE_VARIANCE))
            self._labelled = synthetic_dataset(self.F, cfg.spec, n, self.seed(), noise)
        return self._labelled

    def game(self, game_kind: str, imputer_kind: str) -> Game:
        key = (game_kind, imputer_kind)
        if key not in self._games:
            vf = self.value_function(imputer_kind)
            params = self.config.game_params
            if game_kind == "local":
                self._games[key] = local_game(vf, params["x0"], lazy=True)
            elif game_kind == "sensitivity":
                self._games[key] = sensitivity_game(vf, self.points(), lazy=True)
            else:
                self._games[key] = risk_game(vf, self.labelled_data(), params.get("loss", "squared"),
                                             lazy=True)
        return self._games[key]

    def evaluate(self, item: EffectItem) -> tuple[list[dict], dict]:
        vf = self.value_function(item.imputer_kind)
        calls_before = vf.model_calls
        rows = []
        flags: list[str] = []
        if item.post == "h_statistic":
            d = self.config.d
            targets = item.request.targets or [(i, j) for i in range(1, d + 1) for j in range(i + 1, d + 1)]
            touched = 0
            for t in targets:
                if len(t) != 2:
                    raise ConfigError("effects", "h_statistic targets must be pairs")
                res = h_statistic(vf, self.points(), t[0], t[1])
                if res.degenerate:
                    flags.append(f"degenerate:{t[0]}+{t[1]}")
                rows.append((tuple(t), res.value))
                touched += 4
            evaluations = touched
        else:
            view = _CountingView(self.game(item.game_kind, item.imputer_kind))
            rows = evaluate_request(view, item.request)
            evaluations = len(view.touched)
        out = []
        for coalition, value in rows:
            if not np.isfinite(value):
                raise NumericError(f"non-finite value for coalition {list(coalition)}")
            row = {
                "effect": item.request.effect,
                "type": item.request.influence_type,
                "coalition": [int(i) for i in coalition],
                "value": float(value),
                "stderr": None,
            }
            if item.alias:
                row["alias"] = item.alias
            out.append(row)
        cost = {
            "alias": item.alias,
            "game": item.game_kind,
            "imputer": item.imputer_kind,
            "effect": item.request.effect,
            "type": item.request.influence_type,
            "game_evaluations": evaluations,
            "model_calls": vf.model_calls - calls_before,
        }
        if flags:
            cost["flags"] = flags
        return out, cost


def run_config(config: RunConfig) -> dict:
    """Evaluate every effect request; returns the JSON-ready result document."""
    runner = Runner(config)
    effects, costs = [], []
    for item in config.effects:
        rows, cost = runner.evaluate(item)
        effects.extend(rows)
        costs.append(cost)
    degenerate = sorted({
        "+".join(map(str, bits_to_features(b)))
        for vf in runner._vfs.values() for b in vf.degenerate_coalitions
    })
    imp = config.imputer
    modes = {k: vf.mode for k, vf in sorted(runner._vfs.items())}
    return {
        "game": {"kind": config.game_kind,
                 **{k: (v.tolist() if isinstance(v, np.ndarray) else v)
                    for k, v in sorted(config.game_params.items())}},
        "imputer": {
            "kind": imp["kind"],
            "mode": imp.get("mode", "auto"),
            "resolved_modes": modes,
            "baseline": None if imp.get("baseline") is None else imp["baseline"].tolist(),
        },
        "effects": effects,
        "meta": {
            "seed": runner.seed(),
            "mc_samples": imp.get("mc_samples", 512),
            "model": config.model_text,
            "d": config.d,
            "seed_varies": "imputer randomness (background and conditional draws)",
            "degenerate_coalitions": degenerate,
            "cost": {
                "model_calls": int(sum(vf.model_calls for vf in runner._vfs.values())),
                "game_evaluations": int(sum(g.evaluations for g in runner._games.values())),
                "per_request": costs,
            },
        },
    }


def format_csv(result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["effect", "type", "coalition", "value", "stderr"])
    for row in result["effects"]:
        se = "" if row["stderr"] is None else repr(row["stderr"])
        w.writerow([row["effect"], row["type"], "+".join(map(str, row["coalition"])),
                    repr(row["value"]), se])
    return buf.getvalue()


def format_json(result: dict) -> str:
    return json.dumps(result, indent=2, sort_keys=True) + "\n"


def write_result(result: dict, path: Optional[str], fmt: str) -> None:
    text = format_csv(result) if fmt == "csv" else format_json(result)
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


# --- argparse ------------------------------------------------------------------------


def _run_parser(sub) -> argparse.ArgumentParser:
    p = sub.add_parser("run", help="compute effects for one configuration")
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--model", help="model expression, e.g. '2*x1 + x1*x2'")
    p.add_argument("--d", type=int, help="number of features")
    p.add_argument("--rho", type=float, help="equicorrelated Gaussian with unit variances")
    p.add_argument("--dataset", help="CSV with a header row; a final column named y holds labels")
    p.add_argument("--imputer", help="b, m or c")
    p.add_argument("--baseline", help="comma-separated baseline vector")
    p.add_argument("--mode", help="auto, monte_carlo or exact_moments")
    p.add_argument("--game", choices=("local", "sensitivity", "risk"))
    p.add_argument("--x0", help="comma-separated instance for the local game")
    p.add_argument("--effect", choices=("pure", "partial", "full"))
    p.add_argument("--type", choices=("individual", "joint", "interaction"))
    p.add_argument("--order", type=int, help="coalition size for joint/interaction requests")
    p.add_argument("--targets", help="coalitions such as '1,2+3'")
    p.add_argument("--alias", action="append", help="add a named method (repeatable)")
    p.add_argument("--samples", type=int, help="Monte Carlo samples per evaluation")
    p.add_argument("--seed", type=int)
    p.add_argument("--output", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"))
    return p


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fanova-games",
                                     description="Feature attributions from fANOVA explanation games.")
    sub = parser.add_subparsers(dest="command", required=True)
    _run_parser(sub)
    rp = sub.add_parser("reproduce", help="rerun a synthetic experiment")
    rp.add_argument("experiment", help=f"one of {', '.join(EXPERIMENTS)}")
    rp.add_argument("--seed", type=int, default=0)
    rp.add_argument("--out-dir", default=".")
    rp.add_argument("--mode", default="exact_moments", help="exact_moments or monte_carlo")
    rp.add_argument("--repetitions", type=int, default=N_REPETITIONS)
    rp.add_argument("--samples", type=int, default=512)
    sub.add_parser("aliases", help="list the named methods and their cells")
    return parser


def _report(result: dict, stream) -> None:
    cost = result["meta"]["cost"]
    print(f"model calls: {cost['model_calls']}  game evaluations: {cost['game_evaluations']}",
          file=stream)
    for c in cost["per_request"]:
        label = c["alias"] or f"{c['effect']}/{c['type']}"
        print(f"  {label:<22} {c['game']:<11} {c['imputer']:<11} "
              f"evaluations={c['game_evaluations']} model_calls={c['model_calls']}", file=stream)
    if result["meta"]["degenerate_coalitions"]:
        print("warning: singular conditioning for coalitions "
              + ", ".join(result["meta"]["degenerate_coalitions"]), file=stream)


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        if args.command == "aliases":
            if extra:
                raise ConfigError(extra[0], "unexpected argument")
            for row in alias_table():
                print(f"{row['name']:<20} {row['game']:<12} {row['imputer']:<22} "
                      f"{row['effect']:<8} {row['type']:<12} {row['summary']}")
            return EXIT_OK
        if args.command == "reproduce":
            if extra:
                raise ConfigError(extra[0], "unexpected argument")
            summary = reproduce(args.experiment, args.seed, args.out_dir, args.mode,
                                args.repetitions, args.samples)
            for f in summary["files"]:
                print(Path(args.out_dir) / f)
            if "max_abs_deviation" in summary:
                print(f"max abs deviation: {summary['max_abs_deviation']:.3e}")
            return EXIT_OK
        config = validate_config(build_config(args, extra))
        result = run_config(config)
        write_result(result, config.output_path, config.output_format)
        _report(result, sys.stderr)
        return EXIT_OK
    except (ConfigError, ImputerConfigError, PreconditionError, UnknownAliasError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericError, np.linalg.LinAlgError, FloatingPointError, ZeroDivisionError,
            ModelResourceError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
