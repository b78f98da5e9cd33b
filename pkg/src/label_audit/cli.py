"""Command-line front end.

Subcommands wire the generators, mechanisms, audits, bounds, and the
training sweep into reproducible runs:

    gen-data      write a synthetic dataset CSV
    audit         additive + multiplicative advantage report for a mechanism
    scatter       (prior, posterior) samples over repeated runs
    cdf           empirical CDFs of the advantage measures
    tradeoff      privacy-vs-utility table over mechanism grids
    bounds-check  evaluate every theoretical bound against empirical values

Every command takes --seed (default 0) and emits CSV (with a `#` config
header line) or JSON (config as a top-level field).  Output is
byte-reproducible from the flags plus the seed.  Exit codes: 0 success,
1 bound/assertion failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import advantage as adv
from . import bounds as bnd
from .data import EtaDataset, gen_beta, gen_independent, gen_uniform, knn_eta_estimate, load_csv, save_csv
from .learner import TrainConfig, tradeoff_sweep
from .mechanisms import Mechanism, PrivacyParams
from .rng import substream

USAGE_ERROR = 2
CHECK_FAILED = 1

DEFAULT_EPSILONS = [2.0**e for e in range(-4, 6)]
DEFAULT_BAG_SIZES = [2**e for e in range(10)]
DEFAULT_LEARNING_RATES = [1e-6, 5e-6, 1e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2]


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _jsonable(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else repr(value)
    return value


def write_table(path: str, fmt: str, config: dict, columns: list[str], rows: list[list]) -> None:
    config = {k: _jsonable(v) for k, v in sorted(config.items())}
    if fmt == "csv":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# " + json.dumps(config, sort_keys=True) + "\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_cell(v) for v in row) + "\n")
    else:
        payload = {
            "config": config,
            "columns": columns,
            "rows": [[_jsonable(v) for v in row] for row in rows],
        }
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, sort_keys=True, indent=1)
            fh.write("\n")


def _fail_usage(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return USAGE_ERROR


def _parse_mech(args) -> PrivacyParams:
    mech = Mechanism(args.mechanism)
    eps = math.inf if args.epsilon is None else args.epsilon
    k = 1 if args.bag_size is None else args.bag_size
    if mech in (Mechanism.RR, Mechanism.LLP_LAP, Mechanism.LLP_GEOM) and args.epsilon is None:
        raise ValueError(f"--epsilon is required for mechanism {mech.value}")
    if mech in (Mechanism.LLP, Mechanism.LLP_LAP, Mechanism.LLP_GEOM) and args.bag_size is None:
        raise ValueError(f"--bag-size is required for mechanism {mech.value}")
    return PrivacyParams(mechanism=mech, epsilon=eps, bag_size=k)


def _load_dataset(args) -> EtaDataset:
    ds = load_csv(args.dataset)
    if not ds.has_etas:
        if args.knn is None:
            raise ValueError(
                "dataset has no eta column; pass --knn K to estimate priors first"
            )
        ds = ds.with_etas(knn_eta_estimate(ds, ds.features, args.knn))
    return ds


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen_data(args) -> int:
    if args.dist == "beta":
        ds = gen_beta(args.a, args.b, args.m, args.d_distractors, args.seed)
    elif args.dist == "uniform":
        ds = gen_uniform(args.m, args.d_distractors, args.seed)
    else:
        ds = gen_independent(args.p, args.m, args.seed)
    config = {
        "command": "gen-data", "dist": args.dist, "a": args.a, "b": args.b, "p": args.p,
        "m": args.m, "d_distractors": args.d_distractors, "seed": args.seed,
    }
    save_csv(ds, args.out, header_comment=json.dumps(config, sort_keys=True))
    return 0


def _mult_summary(samples: list) -> tuple[float, float, float, float]:
    abs_mult = [abs(s.mult_adv) for s in samples]
    p50 = adv.percentile(abs_mult, 0.5)
    p90 = adv.percentile(abs_mult, 0.9)
    p98 = adv.percentile(abs_mult, 0.98)
    frac_inf = float(np.mean([math.isinf(v) for v in abs_mult]))
    return p50, p90, p98, frac_inf


def _dataset_sampler(etas: np.ndarray):
    def sampler(rng, shape):
        return etas[rng.integers(0, etas.size, size=shape)]

    return sampler


def cmd_audit(args) -> int:
    ds = _load_dataset(args)
    params = _parse_mech(args)
    etas = ds.etas
    if params.mechanism is Mechanism.NULL:
        additive = adv.AdvantageEstimate(0.0, 0.0, trials=1, exact=True)
    elif params.mechanism is Mechanism.RR:
        gaps = np.array([adv.additive_iadv_rr(e, params.epsilon).value for e in etas])
        additive = adv.AdvantageEstimate(float(gaps.mean()), 0.0, trials=etas.size, exact=True)
    else:
        additive = adv.additive_adv(
            _dataset_sampler(etas), params, args.trials, substream(args.seed, 10)
        )
    records = []
    for run in range(args.runs):
        records.extend(adv.scatter_samples(ds, params, 1, substream(args.seed, 11, run)))
    samples, degenerate = adv.make_samples(records)
    p50, p90, p98, frac_inf = _mult_summary(samples)
    config = _common_config(args, "audit", params)
    columns = [
        "mechanism", "epsilon", "bag_size", "n_examples", "additive_adv",
        "additive_stderr", "additive_exact", "additive_trials", "mult_p50",
        "mult_p90", "mult_p98", "frac_infinite", "n_mult_samples", "degenerate_priors",
    ]
    row = [
        params.mechanism.value, params.epsilon, params.bag_size, len(ds),
        additive.value, additive.stderr, additive.exact, additive.trials,
        p50, p90, p98, frac_inf, len(samples), degenerate,
    ]
    write_table(args.out, args.format, config, columns, [row])
    return 0


def cmd_scatter(args) -> int:
    ds = _load_dataset(args)
    params = _parse_mech(args)
    columns = ["mechanism", "epsilon", "bag_size", "run", "prior", "posterior", "outcome"]
    rows = []
    for run in range(args.runs):
        for rec in adv.scatter_samples(ds, params, 1, substream(args.seed, 11, run)):
            rows.append([
                params.mechanism.value, params.epsilon, params.bag_size, run,
                rec.prior, rec.posterior, rec.outcome,
            ])
    write_table(args.out, args.format, _common_config(args, "scatter", params), columns, rows)
    return 0


def cmd_cdf(args) -> int:
    ds = _load_dataset(args)
    params = _parse_mech(args)
    records = []
    for run in range(args.runs):
        records.extend(adv.scatter_samples(ds, params, 1, substream(args.seed, 11, run)))
    samples, degenerate = adv.make_samples(records)
    columns = ["mechanism", "epsilon", "bag_size", "measure", "value", "cdf", "infinite_mass"]
    rows = []
    for measure, values in (
        ("mult", [abs(s.mult_adv) for s in samples]),
        ("add", [s.additive_gap for s in samples]),
    ):
        mass = float(np.mean([math.isinf(v) for v in values]))
        for value, cum in adv.empirical_cdf(values):
            rows.append([
                params.mechanism.value, params.epsilon, params.bag_size,
                measure, value, cum, mass,
            ])
    config = _common_config(args, "cdf", params)
    config["degenerate_priors"] = degenerate
    write_table(args.out, args.format, config, columns, rows)
    return 0


def cmd_tradeoff(args) -> int:
    ds = _load_dataset(args)
    mechanisms = [Mechanism(name.strip()) for name in args.mechanisms.split(",") if name.strip()]
    grid: list[PrivacyParams] = []
    for mech in mechanisms:
        if mech is Mechanism.NULL:
            grid.append(PrivacyParams(mech))
        elif mech is Mechanism.RR:
            grid.extend(PrivacyParams(mech, epsilon=e) for e in args.epsilons)
        elif mech is Mechanism.LLP:
            grid.extend(PrivacyParams(mech, bag_size=k) for k in args.bag_sizes)
        else:
            grid.extend(
                PrivacyParams(mech, epsilon=e, bag_size=k)
                for k in args.bag_sizes
                for e in args.epsilons
            )
    config_train = TrainConfig(
        epochs=args.epochs,
        examples_per_batch=args.examples_per_batch,
        bags_per_batch=args.bags_per_batch,
    )
    results = tradeoff_sweep(
        ds, grid, args.learning_rates, config_train,
        eval_frac=args.eval_frac, runs=args.runs, adv_trials=args.adv_trials,
        scatter_runs=args.scatter_runs, seed=args.seed,
    )
    order = sorted(
        range(len(results)),
        key=lambda i: (results[i].params.mechanism.value, results[i].params.bag_size,
                       results[i].params.epsilon),
    )
    columns = [
        "mechanism", "bag_size", "epsilon", "auc_mean", "auc_stderr", "stderr_ok",
        "best_learning_rate", "additive_adv", "additive_stderr", "mult_p98", "frac_infinite",
    ]
    rows = []
    for i in order:
        r = results[i]
        rows.append([
            r.params.mechanism.value, r.params.bag_size, r.params.epsilon,
            r.auc_mean, r.auc_stderr, r.auc_stderr <= args.max_auc_stderr,
            r.best_learning_rate, r.additive.value, r.additive.stderr,
            r.mult_p98, r.frac_infinite,
        ])
    config = {
        "command": "tradeoff", "dataset": args.dataset, "mechanisms": args.mechanisms,
        "epsilons": args.epsilons, "bag_sizes": args.bag_sizes,
        "learning_rates": args.learning_rates, "runs": args.runs, "epochs": args.epochs,
        "eval_frac": args.eval_frac, "adv_trials": args.adv_trials,
        "scatter_runs": args.scatter_runs, "max_auc_stderr": args.max_auc_stderr,
        "seed": args.seed,
    }
    write_table(args.out, args.format, config, columns, rows)
    return 0


def _bounds_rows(args) -> list[bnd.BoundReport]:
    reports: list[bnd.BoundReport] = []
    for p in args.p_grid:
        mu = p * (1.0 - p)

        def const_sampler(rng, shape, _p=p):
            return np.full(shape, _p)

        for k in args.k_grid:
            mc = adv.additive_adv(
                const_sampler, PrivacyParams(Mechanism.LLP, bag_size=k),
                args.trials, substream(args.seed, 20, int(p * 1000), k),
            )
            base = {"p": p, "mu": mu, "k": k}
            reports.append(bnd.BoundReport(
                "thm1_upper", bnd.thm1_upper(p, k), mc.value, mc.stderr, dict(base)))
            reports.append(bnd.BoundReport(
                "thm1_exact", bnd.thm1_exact(p, k), mc.value, mc.stderr, dict(base)))
            if k >= 2:
                reports.append(bnd.BoundReport(
                    "lemmaA1", bnd.lemmaA1_bound(p, mu, k), mc.value, mc.stderr, dict(base)))
                beta = (k - 1) * mu / 2.0
                threshold, tail = bnd.truebound(mu, k, beta)
                hp = adv.hpadv_estimate(
                    const_sampler, k, min(1.0, threshold), args.trials,
                    substream(args.seed, 21, int(p * 1000), k),
                )
                reports.append(bnd.BoundReport(
                    "truebound", tail, hp.value, hp.stderr,
                    {**base, "beta": beta, "threshold": threshold}))
            if k >= 2.0 / mu * math.log(1.0 / mu):
                _, iadv_bound = bnd.thm2_thm3_bound_shape(p, mu, mu, k)
                exact = adv.additive_iadv_llp(np.full(k, p), 0)
                reports.append(bnd.BoundReport(
                    "thm3_iadv", iadv_bound, exact.value, 0.0, {**base, "mu_i": mu}))
    # RR worst case at eps=1 against the closed form over an eta grid
    eta_grid = np.linspace(0.0, 1.0, 201)
    worst = max(adv.additive_iadv_rr(e, 1.0).value for e in eta_grid)
    reports.append(bnd.BoundReport(
        "rr_worstcase", bnd.rr_worstcase_adv(1.0), worst, 0.0, {"epsilon": 1.0}))
    # multiplicative tail bound on binomial bags
    p, k, delta = 0.5, args.confbased_k, args.delta
    i_bound = bnd.confbased_bound(p, k, delta)
    rng = substream(args.seed, 22)
    sums = rng.binomial(k, p, size=args.trials)
    z = sums / k
    with np.errstate(divide="ignore"):
        i_vals = np.abs(np.log(z / (1.0 - z)) - math.log(p / (1.0 - p)))
    frac = float((i_vals > i_bound).mean())
    stderr = math.sqrt(max(frac * (1.0 - frac), 1e-12) / args.trials)
    reports.append(bnd.BoundReport(
        "confbased", delta, frac, stderr,
        {"p": p, "k": k, "delta": delta, "i_bound": i_bound}))
    return reports


def cmd_bounds_check(args) -> int:
    reports = _bounds_rows(args)
    overrides = {}
    for item in args.empirical_override or []:
        name, _, value = item.partition("=")
        if not value:
            raise ValueError(f"--empirical-override expects NAME=VALUE, got {item!r}")
        overrides[name] = float(value)
    if overrides:
        reports = [
            bnd.BoundReport(r.bound_name, r.bound_value,
                            overrides.get(r.bound_name, r.empirical_value),
                            r.empirical_stderr, r.params)
            for r in reports
        ]
    columns = [
        "bound_name", "p", "mu", "mu_i", "k", "epsilon", "delta", "beta",
        "threshold", "i_bound", "bound_value", "empirical_value",
        "empirical_stderr", "satisfied",
    ]
    rows = []
    for r in reports:
        g = r.params.get
        rows.append([
            r.bound_name, g("p", ""), g("mu", ""), g("mu_i", ""), g("k", ""),
            g("epsilon", ""), g("delta", ""), g("beta", ""), g("threshold", ""),
            g("i_bound", ""), r.bound_value, r.empirical_value,
            r.empirical_stderr, r.satisfied,
        ])
    config = {
        "command": "bounds-check", "p_grid": args.p_grid, "k_grid": args.k_grid,
        "trials": args.trials, "delta": args.delta, "confbased_k": args.confbased_k,
        "seed": args.seed, "empirical_override": args.empirical_override or [],
    }
    write_table(args.out, args.format, config, columns, rows)
    violations = [r for r in reports if not r.satisfied]
    for r in violations:
        print(f"BOUND VIOLATED: {r.bound_name} {r.params} "
              f"empirical={r.empirical_value} bound={r.bound_value}", file=sys.stderr)
    return CHECK_FAILED if violations else 0


def _common_config(args, command: str, params: PrivacyParams) -> dict:
    return {
        "command": command, "dataset": args.dataset,
        "mechanism": params.mechanism.value, "epsilon": params.epsilon,
        "bag_size": params.bag_size, "runs": args.runs,
        "trials": getattr(args, "trials", None), "knn": args.knn, "seed": args.seed,
    }


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _add_common(sp, with_mechanism=True):
    sp.add_argument("--dataset", required=True, help="input dataset CSV")
    if with_mechanism:
        sp.add_argument("--mechanism", required=True,
                        choices=[m.value for m in Mechanism])
        sp.add_argument("--epsilon", type=float, default=None)
        sp.add_argument("--bag-size", type=int, default=None)
    sp.add_argument("--knn", type=int, nargs="?", const=200, default=None,
                    help="estimate missing priors with k-nearest neighbors "
                         "(bare flag uses 200 neighbors)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="label-audit",
        description="Audit label privatization mechanisms via reconstruction advantage.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen-data", help="generate a synthetic dataset CSV")
    sp.add_argument("--dist", required=True, choices=["beta", "uniform", "independent"])
    sp.add_argument("--a", type=float, default=2.0)
    sp.add_argument("--b", type=float, default=30.0)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--d-distractors", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_gen_data)

    sp = sub.add_parser("audit", help="advantage report for one mechanism")
    _add_common(sp)
    sp.add_argument("--trials", type=int, default=2000, help="bags for the additive estimate")
    sp.add_argument("--runs", type=int, default=1, help="privatization runs for mult samples")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("scatter", help="(prior, posterior) sample table")
    _add_common(sp)
    sp.add_argument("--runs", type=int, default=1)
    sp.set_defaults(func=cmd_scatter)

    sp = sub.add_parser("cdf", help="empirical CDFs of the advantage measures")
    _add_common(sp)
    sp.add_argument("--runs", type=int, default=1)
    sp.set_defaults(func=cmd_cdf)

    sp = sub.add_parser("tradeoff", help="privacy vs utility sweep")
    _add_common(sp, with_mechanism=False)
    sp.add_argument("--mechanisms", default="null,rr,llp,llp-geom")
    sp.add_argument("--epsilons", type=_float_list, default=DEFAULT_EPSILONS)
    sp.add_argument("--bag-sizes", type=_int_list, default=DEFAULT_BAG_SIZES)
    sp.add_argument("--learning-rates", type=_float_list, default=DEFAULT_LEARNING_RATES)
    sp.add_argument("--runs", type=int, default=10)
    sp.add_argument("--epochs", type=int, default=5)
    sp.add_argument("--examples-per-batch", type=int, default=64)
    sp.add_argument("--bags-per-batch", type=int, default=8)
    sp.add_argument("--eval-frac", type=float, default=0.2)
    sp.add_argument("--adv-trials", type=int, default=2000)
    sp.add_argument("--scatter-runs", type=int, default=1)
    sp.add_argument("--max-auc-stderr", type=float, default=0.0076)
    sp.set_defaults(func=cmd_tradeoff)

    sp = sub.add_parser("bounds-check", help="evaluate theoretical bounds")
    sp.add_argument("--p-grid", type=_float_list, default=[0.1, 0.5])
    sp.add_argument("--k-grid", type=_int_list, default=[16, 64])
    sp.add_argument("--trials", type=int, default=2000)
    sp.add_argument("--delta", type=float, default=0.1)
    sp.add_argument("--confbased-k", type=int, default=4096)
    sp.add_argument("--empirical-override", action="append", default=None,
                    metavar="NAME=VALUE")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")
    sp.set_defaults(func=cmd_bounds_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
