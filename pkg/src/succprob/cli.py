"""Command-line front end.

Five subcommands cover the analytic and simulation surfaces:

    pos        design-stage probability of success
    succ-ia    interim success measures (CP and PPoS) for one endpoint
    betabinom  exact beta-binomial PPoS for binary endpoints
    curves     measure-vs-estimate sweep plus the predictive density table
    mc-se      simulated spread of log(KM median) over an (N, D) grid

Flag names transliterate the R-style argument names (null.value becomes
--null-value) so calls published in that notation map one-to-one.  A JSON
--config file can carry any parameter set; explicit flags override it.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

from .betabinom import (
    ArmInterim,
    BetaPrior,
    SuccessIndicator,
    ppos_one_arm,
    ppos_two_arm,
)
from .endpoints import (
    BinaryOneArm,
    BinaryTwoArm,
    ContinuousOneArm,
    ContinuousTwoArm,
    DesignSpec,
    SurvivalOneArm,
    SurvivalTwoArm,
    curve,
    density_table,
    design_pos,
    evaluate,
)
from .errors import DomainError, NumericalError
from .mcval import SeResult, SimConfig, empirical_se_log_median
from .numerics import std_normal_cdf

# flag families per (endpoint type, arm count): interim estimate, expected
# effect, prior location.  Values are argparse dests.
_FAMILY = {
    ("cont", 2): ("meandiff_ia", "meandiff_exp", "meandiff_prior"),
    ("cont", 1): ("mean_ia", "mean_exp", "mean_prior"),
    ("bin", 2): ("propdiff_ia", "propdiff_exp", "propdiff_prior"),
    ("bin", 1): ("prop_ia", "prop_exp", "prop_prior"),
    ("surv", 2): ("hr_ia", "hr_exp", "hr_prior"),
    ("surv", 1): ("median_ia", "median_exp", "median_prior"),
}
_ENDPOINT = {"cont": "continuous", "bin": "binary", "surv": "survival"}


class UsageError(Exception):
    pass


def _positive_int_list(raw: str) -> list[int]:
    try:
        vals = [int(p) for p in raw.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated integer list, got {raw!r}")
    if not vals or any(v < 1 for v in vals):
        raise UsageError(f"list entries must be positive integers, got {raw!r}")
    return vals


def _float_list(raw: str) -> list[float]:
    try:
        vals = [float(p) for p in raw.split(",") if p.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated number list, got {raw!r}")
    if not vals:
        raise UsageError("empty list")
    return vals


# --- output ------------------------------------------------------------------


def _fmt4(v):
    if isinstance(v, bool) or v is None:
        return "" if v is None else str(v).lower()
    if isinstance(v, float):
        return f"{v:.4f}"
    return str(v)


def _flatten(payload: dict, prefix: str = "") -> list[tuple[str, object]]:
    out = []
    for key, val in payload.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.extend(_flatten(val, name + "."))
        else:
            out.append((name, val))
    return out


def _write(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _csv_cell(v) -> str:
    s = _fmt4(v)
    if any(ch in s for ch in ',"\n'):
        s = '"' + s.replace('"', '""') + '"'
    return s


def _emit_scalar(payload: dict, args) -> None:
    """One record: table and csv flatten nested dicts to dotted keys."""
    if args.format == "json":
        _write(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
        return
    pairs = [(k, v) for k, v in _flatten(payload) if not isinstance(v, list)]
    if args.format == "csv":
        head = ",".join(_csv_cell(k) for k, _ in pairs)
        row = ",".join(_csv_cell(v) for _, v in pairs)
        _write(f"{head}\r\n{row}\r\n", args.out)
        return
    width = max(len(k) for k, _ in pairs)
    lines = [f"{k:<{width}}  {_fmt4(v)}" for k, v in pairs]
    _write("\n".join(lines) + "\n", args.out)


def _emit_rows(columns: list[str], rows: list[list], fmt: str,
               out_path: str | None, meta: dict | None = None) -> None:
    if fmt == "json":
        payload = dict(meta or {})
        payload["columns"] = columns
        payload["rows"] = rows
        _write(json.dumps(payload, sort_keys=True, indent=2) + "\n", out_path)
    elif fmt == "csv":
        lines = [",".join(_csv_cell(c) for c in columns)]
        lines += [",".join(_csv_cell(v) for v in row) for row in rows]
        _write("\r\n".join(lines) + "\r\n", out_path)
    else:
        widths = [max(len(c), 10) for c in columns]
        lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
        for row in rows:
            lines.append("  ".join(_fmt4(v).ljust(w)
                                   for v, w in zip(row, widths)))
        _write("\n".join(lines) + "\n", out_path)


# --- config file -------------------------------------------------------------


def _merge_config(argv: list[str]) -> list[str]:
    """Splice --config values in front of explicit flags (flags win)."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise UsageError("--config needs a file path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    try:
        with open(path, encoding="utf-8") as fh:
            loaded = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}")
    if not isinstance(loaded, dict):
        raise UsageError("config file must hold a JSON object")
    injected: list[str] = []
    sub = rest[0] if rest else None
    for key, val in loaded.items():
        flag = str(key).replace(".", "-").replace("_", "-")
        if flag == "subcommand":
            if val != sub:
                raise UsageError(
                    f"config is for subcommand {val!r}, not {sub!r}")
            continue
        # scenario files carry a schema version; only v1 exists
        if flag == "v":
            if val != 1:
                raise UsageError(f"config schema version {val!r} is not supported")
            continue
        if val is None or val is False:
            continue
        if val is True:
            injected.append(f"--{flag}")
        else:
            injected.extend([f"--{flag}", str(val)])
    # subcommand first, then config-derived flags, then explicit flags
    return rest[:1] + injected + rest[1:]


# --- shared flag groups ------------------------------------------------------


def _add_family_flags(p: argparse.ArgumentParser, with_interim: bool) -> None:
    p.add_argument("--type", required=True, choices=("cont", "bin", "surv"))
    p.add_argument("--nsamples", type=int, required=True, choices=(1, 2))
    p.add_argument("--null-value", type=float, default=None)
    p.add_argument("--alternative", default="greater",
                   choices=("greater", "less"))
    p.add_argument("--a", type=float, default=1.0,
                   help="treatment:control allocation ratio a:1")
    p.add_argument("--succ-crit", default="trial",
                   choices=("trial", "clinical"))
    p.add_argument("--Z-crit-final", type=float, default=None)
    p.add_argument("--clin-succ-threshold", type=float, default=None)
    p.add_argument("--sd-prior", type=float, default=None)
    p.add_argument("--D-prior", type=int, default=None)
    for _, dests in sorted(_FAMILY.items()):
        names = dests if with_interim else dests[1:]
        for dest in names:
            flag = "--" + dest.replace("_", "-")
            if flag not in p._option_string_actions:
                p.add_argument(flag, type=float, default=None)
    if with_interim:
        p.add_argument("--N", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--D", type=int, default=None)
        p.add_argument("--d", type=int, default=None)
        p.add_argument("--sd-ia", type=float, default=None)
        p.add_argument("--stderr-ia", type=float, default=None)
        p.add_argument("--p-trt", type=float, default=None)
        p.add_argument("--n-trt", type=int, default=None)
        p.add_argument("--p-con", type=float, default=None)
        p.add_argument("--n-con", type=int, default=None)
        p.add_argument("--xi", type=float, default=1.0)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", default="table",
                   choices=("table", "json", "csv"))
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--config", default=None,
                   help="JSON file of parameters; explicit flags override")


def _reject_foreign_family(args) -> None:
    mine = set(_FAMILY[(args.type, args.nsamples)])
    for dests in _FAMILY.values():
        for dest in dests:
            if dest not in mine and getattr(args, dest, None) is not None:
                flag = "--" + dest.replace("_", "-")
                raise UsageError(
                    f"{flag} does not apply to type={args.type} "
                    f"nsamples={args.nsamples}")


def _prior_kwargs(args) -> dict:
    _, _, prior_dest = _FAMILY[(args.type, args.nsamples)]
    loc = getattr(args, prior_dest)
    if loc is None:
        if args.sd_prior is not None or args.D_prior is not None:
            flag = "--" + prior_dest.replace("_", "-")
            raise UsageError(f"prior spread given without {flag}")
        return {}
    if args.type == "surv":
        if args.D_prior is None:
            raise UsageError("survival priors need --D-prior (prior events)")
        return {"prior_location": loc, "prior_events": args.D_prior}
    if args.sd_prior is None:
        raise UsageError("continuous/binary priors need --sd-prior")
    return {"prior_location": loc, "prior_sd": args.sd_prior}


def _interim_cell(args):
    """Build the endpoint cell from interim flags, validating completeness."""
    _reject_foreign_family(args)
    ia_dest = _FAMILY[(args.type, args.nsamples)][0]
    ia = getattr(args, ia_dest)
    counts_mode = any(v is not None
                      for v in (args.p_trt, args.n_trt, args.p_con, args.n_con))

    def need(cond: bool, what: str):
        if not cond:
            raise UsageError(f"type={args.type} nsamples={args.nsamples} "
                             f"needs {what}")

    if args.type == "surv":
        need(args.D is not None and args.d is not None, "--D and --d")
        need(ia is not None, f"--{ia_dest.replace('_', '-')}")
        null = 1.0 if args.null_value is None else args.null_value
        if args.nsamples == 1:
            need(args.null_value is not None, "--null-value (null median)")
            return SurvivalOneArm(median=ia, d=args.d, D=args.D,
                                  null_value=null, xi=args.xi)
        return SurvivalTwoArm(hr=ia, d=args.d, D=args.D, a=args.a,
                              null_value=null)
    null = 0.0 if args.null_value is None else args.null_value
    need(args.N is not None, "--N")
    if args.type == "cont":
        need(ia is not None and args.sd_ia is not None,
             f"--{ia_dest.replace('_', '-')} and --sd-ia")
        need(args.n is not None, "--n")
        if args.nsamples == 1:
            return ContinuousOneArm(xbar=ia, s=args.sd_ia, n=args.n,
                                    N=args.N, null_value=null)
        return ContinuousTwoArm(delta=ia, s=args.sd_ia, n=args.n, N=args.N,
                                a=args.a, null_value=null)
    if args.nsamples == 1:
        need(ia is not None and args.n is not None, "--prop-ia and --n")
        return BinaryOneArm(p=ia, n=args.n, N=args.N, null_value=null)
    if counts_mode:
        if ia is not None or args.stderr_ia is not None:
            raise UsageError("give either per-arm counts or "
                             "--propdiff-ia/--stderr-ia, not both")
        need(None not in (args.p_trt, args.n_trt, args.p_con, args.n_con),
             "--p-trt --n-trt --p-con --n-con")
        return BinaryTwoArm(N=args.N, a=args.a, null_value=null,
                            p_t=args.p_trt, n_t=args.n_trt,
                            p_c=args.p_con, n_c=args.n_con)
    need(ia is not None and args.stderr_ia is not None and args.n is not None,
         "--propdiff-ia, --stderr-ia and --n")
    return BinaryTwoArm(N=args.N, a=args.a, null_value=null,
                        delta=ia, stderr=args.stderr_ia, n=args.n)


def _crit_kwargs(args) -> dict:
    return {"succ_crit": args.succ_crit, "z_crit_final": args.Z_crit_final,
            "clinical_threshold": args.clin_succ_threshold}


def _at_final(args) -> bool:
    if args.type == "surv":
        return args.d is not None and args.D is not None and args.d == args.D
    if args.n is not None and args.N is not None and args.n == args.N:
        return True
    return (args.n_trt is not None and args.n_con is not None
            and args.N is not None and args.n_trt + args.n_con == args.N)


def _final_verdict(args) -> dict:
    """The information fraction is 1: report the observed verdict, not a
    forecast."""
    d = 1.0 if args.alternative == "greater" else -1.0
    if args.type == "cont":
        ia = args.mean_ia if args.nsamples == 1 else args.meandiff_ia
        if ia is None or args.sd_ia is None:
            raise UsageError("final-data verdict needs the estimate and SD")
        null = 0.0 if args.null_value is None else args.null_value
        r = 1.0 if args.nsamples == 1 else math.sqrt((args.a + 1) ** 2 / args.a)
        theta, k = d * (ia - null), r * args.sd_ia / math.sqrt(args.N)
    elif args.type == "bin":
        null = 0.0 if args.null_value is None else args.null_value
        if args.nsamples == 1:
            if args.prop_ia is None:
                raise UsageError("final-data verdict needs --prop-ia")
            theta = d * (args.prop_ia - null)
            k = math.sqrt(args.prop_ia * (1 - args.prop_ia) / args.N)
        elif args.p_trt is not None:
            theta = d * (args.p_trt - args.p_con - null)
            k = math.sqrt(args.p_trt * (1 - args.p_trt) / args.n_trt
                          + args.p_con * (1 - args.p_con) / args.n_con)
        else:
            if args.propdiff_ia is None or args.stderr_ia is None:
                raise UsageError("final-data verdict needs --propdiff-ia "
                                 "and --stderr-ia")
            theta, k = d * (args.propdiff_ia - null), args.stderr_ia
    else:
        ia = args.median_ia if args.nsamples == 1 else args.hr_ia
        if ia is None:
            raise UsageError("final-data verdict needs the estimate")
        null = 1.0 if args.null_value is None else args.null_value
        theta = d * math.log(ia / null)
        scale = args.xi if args.nsamples == 1 else math.sqrt(
            (args.a + 1) ** 2 / args.a)
        k = scale / math.sqrt(args.D)
    if args.succ_crit == "trial":
        if args.Z_crit_final is None:
            raise UsageError("trial success needs --Z-crit-final")
        gamma = args.Z_crit_final
    else:
        if args.clin_succ_threshold is None:
            raise UsageError("clinical success needs --clin-succ-threshold")
        thr = args.clin_succ_threshold
        theta_min = (d * math.log(thr / null) if args.type == "surv"
                     else d * (thr - null))
        gamma = theta_min / k
    return {"deterministic": True, "t": 1.0, "theta_hat": theta, "k": k,
            "gamma": gamma, "success": bool(theta > gamma * k)}


# --- subcommands -------------------------------------------------------------


def _design_spec(args) -> DesignSpec:
    _reject_foreign_family(args)
    prior = _prior_kwargs(args)
    if not prior:
        raise UsageError("pos needs a prior (location plus spread)")
    return DesignSpec(
        endpoint=_ENDPOINT[args.type], arms=args.nsamples,
        alternative=args.alternative, null_value=args.null_value,
        N=args.N, D=args.D, a=args.a, sd_exp=args.sd_exp,
        prop_exp=args.prop_exp, prop_t_exp=args.prop_trt_exp,
        prop_c_exp=args.prop_con_exp, xi=args.xi, se_exp=args.se_exp,
        succ_crit=args.succ_crit, z_crit_final=args.Z_crit_final,
        clinical_threshold=args.clin_succ_threshold,
        prior_location=prior["prior_location"],
        prior_sd=prior.get("prior_sd"), prior_events=prior.get("prior_events"))


def cmd_pos(args) -> int:
    spec = _design_spec(args)
    result = design_pos(spec)
    payload = result.as_dict()
    payload["inputs"] = {
        "type": args.type, "nsamples": args.nsamples,
        "null_value": spec.null_value, "alternative": args.alternative,
        "succ_crit": args.succ_crit,
    }
    _emit_scalar(payload, args)
    return 0


def cmd_succ_ia(args) -> int:
    if _at_final(args):
        _reject_foreign_family(args)
        _emit_scalar(_final_verdict(args), args)
        return 0
    cell = _interim_cell(args)
    _, exp_dest, _ = _FAMILY[(args.type, args.nsamples)]
    bundle = evaluate(cell, alternative=args.alternative,
                      expected=getattr(args, exp_dest),
                      **_crit_kwargs(args), **_prior_kwargs(args))
    _emit_scalar(bundle.as_dict(), args)
    return 0


def _indicator(args) -> SuccessIndicator:
    if args.level is not None and args.Z_crit_final is not None:
        raise UsageError("give --level or --Z-crit-final, not both")
    level = args.level
    if level is None and args.Z_crit_final is not None:
        level = float(std_normal_cdf(-args.Z_crit_final))
    if args.test in ("z", "fisher", "exact") and level is None:
        raise UsageError(f"test={args.test} needs --level or --Z-crit-final")
    if args.test == "z":
        return SuccessIndicator.z_test(level=level, tail=args.alternative,
                                       pooled=args.pooled,
                                       continuity=not args.no_continuity)
    if args.test == "fisher":
        return SuccessIndicator.fisher_exact(level=level,
                                             tail=args.alternative)
    if args.test == "exact":
        if args.p0 is None:
            raise UsageError("test=exact needs --p0")
        return SuccessIndicator.exact_binomial(level=level, p0=args.p0,
                                               tail=args.alternative)
    return SuccessIndicator.clinical_threshold(pi_min=args.pi_min,
                                               delta_min=args.delta_min,
                                               tail=args.alternative)


def cmd_betabinom(args) -> int:
    two_arm = any(v is not None
                  for v in (args.N_con, args.n_con, args.x_con))
    ind = _indicator(args)
    arm_t = ArmInterim(n=args.n_trt, x=args.x_trt, N=args.N_trt)
    prior_t = BetaPrior(args.a_trt, args.b_trt)
    if two_arm:
        if None in (args.N_con, args.n_con, args.x_con):
            raise UsageError("two-arm runs need --N-con, --n-con and --x-con")
        arm_c = ArmInterim(n=args.n_con, x=args.x_con, N=args.N_con)
        prior_c = BetaPrior(args.a_con, args.b_con)
        res = ppos_two_arm(prior_t, prior_c, arm_t, arm_c, ind)
    else:
        res = ppos_one_arm(prior_t, arm_t, ind)
    payload = {
        "ppos": float(res),
        "test": args.test,
        "tail": args.alternative,
        "cells": res.cells,
        "zero_variance_cells": res.zero_variance_cells,
    }
    _emit_scalar(payload, args)
    return 0


def cmd_curves(args) -> int:
    cell = _interim_cell(args)
    prior = _prior_kwargs(args)
    tab = curve(cell, alternative=args.alternative, **_crit_kwargs(args),
                **prior, lo=args.lo, hi=args.hi, points=args.points)
    dens = density_table(cell, alternative=args.alternative, **prior,
                         points=args.density_points, span=args.span)

    mcols = ["estimate", "cp_trend", "ppos_no_prior"]
    mrows = [[e, c, p] for e, c, p in
             zip(tab.estimate, tab.cp_trend, tab.ppos_no_prior)]
    if tab.ppos_with_prior is not None:
        mcols.append("ppos_with_prior")
        for row, v in zip(mrows, tab.ppos_with_prior):
            row.append(v)
    mmeta = {"crossing": tab.crossing, "observed": tab.observed,
             "gamma": tab.gamma}

    dcols = ["x", "no_prior"]
    drows = [[x, v] for x, v in zip(dens.x, dens.no_prior)]
    if dens.with_prior is not None:
        dcols.append("with_prior")
        for row, v in zip(drows, dens.with_prior):
            row.append(v)
    dmeta = {"observed": dens.observed}

    if args.out_prefix is not None:
        ext = {"table": "txt", "json": "json", "csv": "csv"}[args.format]
        _emit_rows(mcols, mrows, args.format,
                   f"{args.out_prefix}-measures.{ext}", mmeta)
        _emit_rows(dcols, drows, args.format,
                   f"{args.out_prefix}-density.{ext}", dmeta)
        return 0
    if args.what == "density":
        _emit_rows(dcols, drows, args.format, args.out, dmeta)
    else:
        _emit_rows(mcols, mrows, args.format, args.out, mmeta)
    return 0


def cmd_mc_se(args) -> int:
    if (args.N is None) == (args.inflation is None):
        raise UsageError("give exactly one of --N or --inflation")
    ds = _positive_int_list(args.D)
    if args.N is not None:
        ns = _positive_int_list(args.N)
        if len(ns) not in (1, len(ds)):
            raise UsageError("--N must list one value or one per --D entry")
        if len(ns) == 1:
            ns = ns * len(ds)
        grid = list(zip(ns, ds))
    else:
        grid = [(round(d * f), d)
                for d in ds for f in _float_list(args.inflation)]
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    cfgs = [SimConfig(N=n, D=d, median=args.med, ltfu_rate=args.ltfu_rate,
                      M=args.M, seed=args.seed) for n, d in grid]
    if args.threads == 1:
        results = [empirical_se_log_median(c) for c in cfgs]
    else:
        # rows are independent; per-replicate substreams make the output
        # identical for any worker count
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(empirical_se_log_median, cfgs))
    if args.format == "json":
        payload = {"columns": SeResult.CSV_HEADER.split(","),
                   "rows": [[r.N, r.D, r.med, r.sd_obs, r.sd_1_over_sqrtd,
                             r.sd_log2, r.ltfu_rate, r.M] for r in results],
                   "dropped": [r.dropped for r in results],
                   "unreliable": [r.unreliable for r in results]}
        _write(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        # the csv artifact keeps full precision: it feeds plots, not eyes
        lines = [SeResult.CSV_HEADER] + [r.csv_row() for r in results]
        _write("\r\n".join(lines) + "\r\n" if args.format == "csv"
               else "\n".join(lines) + "\n", args.out)
    return 0


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="succprob",
        description="Success probabilities for clinical trials: conditional "
                    "power, predictive probability, and design-stage "
                    "probability of success.")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("pos", help="design-stage probability of success")
    _add_family_flags(p, with_interim=False)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--D", type=int, default=None)
    p.add_argument("--se-exp", type=float, default=None,
                   help="anticipated SE of the final estimate (overrides "
                        "the derived value)")
    p.add_argument("--sd-exp", type=float, default=None)
    p.add_argument("--prop-trt-exp", type=float, default=None)
    p.add_argument("--prop-con-exp", type=float, default=None)
    p.add_argument("--xi", type=float, default=1.0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_pos)

    p = sub.add_parser("succ-ia", help="interim success measures")
    _add_family_flags(p, with_interim=True)
    _add_output_flags(p)
    p.set_defaults(func=cmd_succ_ia)

    p = sub.add_parser("betabinom", help="exact beta-binomial PPoS")
    p.add_argument("--N-trt", type=int, required=True)
    p.add_argument("--n-trt", type=int, required=True)
    p.add_argument("--x-trt", type=int, required=True)
    p.add_argument("--N-con", type=int, default=None)
    p.add_argument("--n-con", type=int, default=None)
    p.add_argument("--x-con", type=int, default=None)
    p.add_argument("--a-trt", type=float, default=1.0)
    p.add_argument("--b-trt", type=float, default=1.0)
    p.add_argument("--a-con", type=float, default=1.0)
    p.add_argument("--b-con", type=float, default=1.0)
    p.add_argument("--alternative", default="greater",
                   choices=("greater", "less"))
    p.add_argument("--test", default="z",
                   choices=("z", "fisher", "exact", "threshold"))
    p.add_argument("--succ-crit", default="trial", choices=("trial",),
                   help="accepted for call-compatibility; the success "
                        "definition itself comes from --test")
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--Z-crit-final", type=float, default=None)
    p.add_argument("--pooled", action="store_true")
    p.add_argument("--no-continuity", action="store_true")
    p.add_argument("--p0", type=float, default=None)
    p.add_argument("--pi-min", type=float, default=None)
    p.add_argument("--delta-min", type=float, default=None)
    _add_output_flags(p)
    p.set_defaults(func=cmd_betabinom)

    p = sub.add_parser("curves",
                       help="measure sweep and predictive density tables")
    _add_family_flags(p, with_interim=True)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--density-points", type=int, default=401)
    p.add_argument("--span", type=float, default=6.0)
    p.add_argument("--what", default="measures",
                   choices=("measures", "density"),
                   help="which table goes to stdout when no --out-prefix")
    p.add_argument("--out-prefix", default=None,
                   help="write <prefix>-measures and <prefix>-density files")
    _add_output_flags(p)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("mc-se",
                       help="simulated SD of log(KM median) on an (N,D) grid")
    p.add_argument("--N", default=None,
                   help="comma list of sample sizes (or use --inflation)")
    p.add_argument("--D", required=True, help="comma list of event targets")
    p.add_argument("--inflation", default=None,
                   help="comma list of N/D ratios, N = round(D * ratio)")
    p.add_argument("--med", type=float, required=True)
    p.add_argument("--ltfu-rate", type=float, default=0.0)
    p.add_argument("--M", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    _add_output_flags(p)
    p.set_defaults(func=cmd_mc_se)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _merge_config(argv)
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error [{exc.code}]: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure [{exc.code}]: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
