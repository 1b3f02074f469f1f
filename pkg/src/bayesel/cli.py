"""Command line runner.

``bayesel run`` samples a posterior and writes CSV/JSON output;
``bayesel synth-fertility`` writes a synthetic binary (x, y) dataset.

Exit codes: 0 success, 2 configuration error, 3 infeasible initial value,
4 data error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .diagnostics import summarize
from .el import SolverSettings
from .hmc import HMCConfig, InfeasibleStartError, run_chain
from .io import load_csv, write_csv, write_json
from .models import (
    FERTILITY_RATE,
    DataError,
    constrained_logistic_model,
    fertility_intercept,
    mean_model,
    synthetic_fertility_data,
)
from .posterior import flat_prior, normal_prior

log = logging.getLogger("bayesel")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_DATA = 4

OUTPUT_ENV = "BAYESEL_OUTPUT_DIR"
MODELS = ("mean", "logistic-constrained")
STAGE_KEYS = ("n_samples", "lf_steps", "epsilon", "p_variance", "burn_in", "detailed")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    data_path: str
    initial: list
    model: str = "mean"
    rate: float = FERTILITY_RATE
    prior: str = "normal:0,1"
    n_samples: int = 1000
    lf_steps: int = 10
    epsilon: float | list = 0.05
    p_variance: float = 1.0
    tol: float = 1e-8
    seed: int = 0
    detailed: bool = False
    burn_in: int = 0
    output_dir: str | None = None
    stages: list = field(default_factory=list)
    chains: int = 1

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**raw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def stage_settings(self) -> list[dict]:
        base = {k: getattr(self, k) for k in STAGE_KEYS}
        out = [] if self.stages else [base]
        for st in self.stages:
            bad = set(st) - set(STAGE_KEYS)
            if bad:
                raise ConfigError(f"unknown stage keys: {sorted(bad)}")
            out.append({**base, **st})
        for st in out:
            if not 0 <= int(st["burn_in"]) < int(st["n_samples"]):
                raise ConfigError(f"burn_in must lie in [0, n_samples), got {st['burn_in']}")
        return out


def parse_prior(spec: str, d: int):
    """``normal:MEAN,VARIANCE`` or ``flat``."""
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "flat":
        if args:
            raise ConfigError("flat prior takes no options")
        return flat_prior()
    if name == "normal":
        try:
            vals = [float(v) for v in args.split(",")] if args else [0.0, 1.0]
        except ValueError:
            raise ConfigError(f"bad prior options {args!r}") from None
        if len(vals) != 2:
            raise ConfigError("normal prior needs MEAN,VARIANCE")
        try:
            return normal_prior(np.full(d, vals[0]), np.full(d, vals[1]))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown prior {spec!r}; use normal:MEAN,VAR or flat")


def build_model(cfg: RunConfig, data: np.ndarray):
    if cfg.model == "mean":
        return mean_model(data.shape[1])
    if cfg.model == "logistic-constrained":
        if data.shape[1] != 2:
            raise DataError("logistic-constrained model needs two data columns (x, y)")
        try:
            return constrained_logistic_model(cfg.rate)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown model {cfg.model!r}; choose from {', '.join(MODELS)}")


def derive_seed(seed: int, chain: int, stage: int) -> int:
    return int(np.random.SeedSequence([seed, chain, stage]).generate_state(1, np.uint32)[0])


def _hmc_config(st: dict, seed: int) -> HMCConfig:
    eps = st["epsilon"]
    eps = tuple(eps) if isinstance(eps, (list, tuple)) else float(eps)
    try:
        return HMCConfig(
            n_samples=int(st["n_samples"]),
            lf_steps=int(st["lf_steps"]),
            epsilon=eps,
            p_variance=float(st["p_variance"]),
            seed=seed,
            detailed=bool(st["detailed"]),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _write_stage(out: Path, chain, st: dict, call: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    d = chain.samples.shape[1]
    header = [f"theta_{j + 1}" for j in range(d)]
    burn_in = int(st["burn_in"])
    write_csv(out / "samples.csv", chain.samples[burn_in:], header)
    summary = summarize(chain, burn_in)
    lags = summary.acf.shape[1]
    write_csv(out / "acf.csv", np.column_stack([np.arange(lags), summary.acf.T]), ["lag"] + header)
    write_json(out / "summary.json", {"call": {**call, **chain.call}, "summary": summary.as_dict()})
    if chain.trajectories is not None:
        write_csv(out / "proposed.csv", chain.proposed, header)
        write_csv(out / "acceptance.csv", chain.acceptance.astype(int), ["accepted"])
        for kind, idx in (("q", 0), ("p", 1)):
            rows = [
                np.column_stack([np.full(len(t[idx]), k + 1), np.arange(len(t[idx])), t[idx]])
                for k, t in enumerate(chain.trajectories)
            ]
            write_csv(out / f"trajectory_{kind}.csv", np.vstack(rows), ["update", "step"] + header)


def _run_one_chain(cfg: RunConfig, chain_index: int, out: Path) -> None:
    data = load_csv(cfg.data_path)
    model = build_model(cfg, data)
    prior = parse_prior(cfg.prior, model.d)
    settings = SolverSettings(tol=cfg.tol)
    stages = cfg.stage_settings()
    initial = np.asarray(cfg.initial, dtype=float)
    if initial.shape != (model.d,):
        raise ConfigError(f"initial must have {model.d} entries, got {initial.size}")
    for s, st in enumerate(stages, start=1):
        seed = derive_seed(cfg.seed, chain_index, s)
        hcfg = _hmc_config(st, seed)
        log.info("chain %d stage %d: %d samples from %s", chain_index, s, hcfg.n_samples, initial.tolist())
        chain = run_chain(initial, model, prior, data, hcfg, settings)
        stage_dir = out / f"stage_{s}" if len(stages) > 1 else out
        call = {"config": asdict(cfg), "chain": chain_index, "stage": s, "stage_settings": st}
        _write_stage(stage_dir, chain, st, call)
        initial = chain.samples[-1]


def run(cfg: RunConfig) -> int:
    """Execute a run; returns a process exit code."""
    out = Path(cfg.output_dir or os.environ.get(OUTPUT_ENV, "bayesel_out"))
    try:
        if cfg.chains < 1:
            raise ConfigError("chains must be >= 1")
        cfg.stage_settings()
        if cfg.chains == 1:
            _run_one_chain(cfg, 0, out)
        else:
            with ProcessPoolExecutor(max_workers=min(cfg.chains, os.cpu_count() or 1)) as pool:
                futures = [
                    pool.submit(_run_one_chain, cfg, c, out / f"chain_{c + 1}")
                    for c in range(cfg.chains)
                ]
                for fut in futures:
                    fut.result()
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except InfeasibleStartError as exc:
        log.error("%s", exc)
        return EXIT_INFEASIBLE
    except DataError as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    return EXIT_OK


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}") from None


def _stage(text: str) -> dict:
    out = {}
    for item in (t for t in text.split(",") if t.strip()):
        key, sep, val = item.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in STAGE_KEYS:
            raise argparse.ArgumentTypeError(f"bad stage item {item!r}; keys: {', '.join(STAGE_KEYS)}")
        if key == "epsilon":
            vals = _floats(val.replace("|", ","))
            out[key] = vals[0] if len(vals) == 1 else vals
        elif key == "detailed":
            out[key] = val.strip().lower() in ("1", "true", "yes")
        elif key in ("n_samples", "lf_steps", "burn_in"):
            out[key] = int(val)
        else:
            out[key] = float(val)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bayesel", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="sample a BayesEL posterior with HMC")
    r.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    r.add_argument("--data", dest="data_path")
    r.add_argument("--model", choices=MODELS)
    r.add_argument("--rate", type=float)
    r.add_argument("--prior", help="normal:MEAN,VAR or flat")
    r.add_argument("--initial", type=_floats)
    r.add_argument("--n-samples", type=int)
    r.add_argument("--lf-steps", type=int)
    r.add_argument("--epsilon", type=_floats, help="scalar or per-coordinate list")
    r.add_argument("--p-variance", type=float)
    r.add_argument("--tol", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--detailed", action="store_true", default=None)
    r.add_argument("--burn-in", type=int)
    r.add_argument("--output", dest="output_dir")
    r.add_argument(
        "--stage",
        dest="stages",
        action="append",
        type=_stage,
        help="stage override, e.g. n_samples=50,lf_steps=15,epsilon=0.001,p_variance=0.2; repeat per stage",
    )
    r.add_argument("--chains", type=int)

    s = sub.add_parser("synth-fertility", help="write a synthetic (x, y) binary dataset")
    s.add_argument("--n", type=int, default=1000)
    s.add_argument("--beta1", type=float, default=2.5)
    s.add_argument("--beta0", type=float, help="default: solved so that P(y=1) equals --rate")
    s.add_argument("--x-rate", type=float, default=0.5)
    s.add_argument("--rate", type=float, default=FERTILITY_RATE)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--output", required=True)
    return parser


def _config_from_args(args) -> RunConfig:
    raw = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            raw[f.name] = val
    if isinstance(raw.get("epsilon"), list) and len(raw["epsilon"]) == 1:
        raw["epsilon"] = raw["epsilon"][0]
    for key in ("data_path", "initial"):
        if key not in raw:
            raise ConfigError(f"missing required setting {key!r}")
    return RunConfig.from_dict(raw)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    if args.command == "synth-fertility":
        try:
            beta0 = args.beta0 if args.beta0 is not None else fertility_intercept(args.beta1, args.x_rate, args.rate)
            data = synthetic_fertility_data(args.n, [beta0, args.beta1], args.x_rate, seed=args.seed)
        except ValueError as exc:
            log.error("configuration error: %s", exc)
            return EXIT_CONFIG
        write_csv(args.output, data, ["x", "y"])
        return EXIT_OK
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
