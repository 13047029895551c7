"""Stateless JSON facade over the analytic engine.

Four POST endpoints wrap the same computations the CLI exposes:

    POST /api/v1/pos        design-stage probability of success
    POST /api/v1/succ-ia    interim success measures
    POST /api/v1/betabinom  exact beta-binomial PPoS
    POST /api/v1/curves     measure sweep plus predictive density arrays
    GET  /healthz           liveness probe with the build version

Request bodies use the same field names as CLI --config files (dotted,
dashed, or underscored spellings all accepted), so a scenario saved from a
client round-trips through `succprob <cmd> --config file.json` unchanged.
The schema is derived from the CLI parser itself rather than written twice;
the two surfaces cannot drift apart.

Responses are canonical JSON (sorted keys) with a fixed envelope::

    {"v": 1, "kind": ..., "result": ..., "echo": ..., "warnings": [...]}

`echo` reports the resolved internals (theta_hat, k, t, gamma, psi) so a
client can display how its inputs mapped onto the scale the engine works
in.  Schema violations return 400, domain errors 422, both as
{"v": 1, "error": {"code", "message"}}.  Monte Carlo runs are CLI-only:
every request here answers in milliseconds.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from dataclasses import dataclass, replace

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__, cli
from .betabinom import ArmInterim, BetaPrior, ppos_one_arm, ppos_two_arm
from .endpoints import curve, density_table, design_pos, evaluate
from .errors import DomainError, NumericalError

_log = logging.getLogger("succprob.service")


@dataclass(frozen=True)
class ServiceConfig:
    cors_origins: tuple[str, ...] = ()
    betabinom_cap: int = 4_000_000
    max_body_bytes: int = 1_000_000

    @classmethod
    def from_env(cls) -> "ServiceConfig":
        origins = tuple(o for o in
                        os.environ.get("SUCCPROB_CORS_ORIGIN", "").split(",")
                        if o.strip())
        cap = int(os.environ.get("SUCCPROB_BETABINOM_CAP", 4_000_000))
        return cls(cors_origins=origins, betabinom_cap=cap)


class RequestRejected(Exception):
    """Pre-computation rejection; carries the HTTP status and error code."""

    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


def _schema_error(code: str, message: str) -> RequestRejected:
    return RequestRejected(400, code, message)


# --- request schema, derived from the CLI parser -------------------------------


@dataclass(frozen=True)
class Field:
    dest: str
    kind: str  # int | float | str | bool
    required: bool
    choices: tuple | None


# CLI-only plumbing flags that have no meaning over HTTP
_NOT_API = {"help", "format", "out", "config", "what", "out_prefix"}


def _parser_schema(name: str) -> tuple[dict[str, Field], dict]:
    parser = cli.build_parser()
    subs = next(a.choices for a in parser._actions
                if isinstance(getattr(a, "choices", None), dict))
    fields: dict[str, Field] = {}
    defaults: dict = {}
    for action in subs[name]._actions:
        if action.dest in _NOT_API:
            continue
        if action.nargs == 0:
            kind = "bool"
        elif action.type is int:
            kind = "int"
        elif action.type is float:
            kind = "float"
        else:
            kind = "str"
        fields[action.dest] = Field(
            action.dest, kind, bool(action.required),
            tuple(action.choices) if action.choices else None)
        defaults[action.dest] = action.default
    return fields, defaults


_ENDPOINTS = ("pos", "succ-ia", "betabinom", "curves")
_SCHEMAS = {name: _parser_schema(name) for name in _ENDPOINTS}


def _cast(field: Field, key: str, value):
    if field.kind == "bool":
        if not isinstance(value, bool):
            raise _schema_error("bad_type", f"{key!r} must be a boolean")
        return value
    if isinstance(value, bool):
        raise _schema_error("bad_type", f"{key!r} must not be a boolean")
    if field.kind == "int":
        if not isinstance(value, int):
            raise _schema_error("bad_type", f"{key!r} must be an integer")
    elif field.kind == "float":
        if not isinstance(value, (int, float)):
            raise _schema_error("bad_type", f"{key!r} must be a number")
        value = float(value)
    else:
        if not isinstance(value, str):
            raise _schema_error("bad_type", f"{key!r} must be a string")
    if field.choices is not None and value not in field.choices:
        raise _schema_error(
            "bad_value", f"{key!r} must be one of {sorted(field.choices)!r}")
    return value


def _namespace(kind: str, body) -> argparse.Namespace:
    if not isinstance(body, dict):
        raise _schema_error("bad_body", "request body must be a JSON object")
    fields, defaults = _SCHEMAS[kind]
    values = {}
    for raw_key, value in body.items():
        dest = str(raw_key).replace(".", "_").replace("-", "_")
        if dest not in fields:
            raise _schema_error(
                "unknown_field", f"{raw_key!r} is not a {kind} field")
        values[dest] = _cast(fields[dest], str(raw_key), value)
    for field in fields.values():
        if field.required and field.dest not in values:
            raise _schema_error(
                "missing_field", f"{kind} requires {field.dest!r}")
    return argparse.Namespace(**{**defaults, **values})


# --- handlers ------------------------------------------------------------------

# the internals every normal-approximation response reports back
_ECHO_KEYS = ("theta_hat", "k", "t", "z", "b", "gamma", "psi")


def _run_pos(ns, cfg):
    result = design_pos(cli._design_spec(ns)).as_dict()
    echo = {"theta_hat": None, "k": result["k_tilde"], "t": None,
            "gamma": result["gamma"], "psi": None}
    return result, echo, []


def _run_succ_ia(ns, cfg):
    # no final-data verdicts over HTTP: t >= 1 fails the cell's count check
    cell = cli._interim_cell(ns)
    _, exp_dest, _ = cli._FAMILY[(ns.type, ns.nsamples)]
    bundle = evaluate(cell, alternative=ns.alternative,
                      expected=getattr(ns, exp_dest),
                      **cli._crit_kwargs(ns), **cli._prior_kwargs(ns))
    result = bundle.as_dict()
    echo = {key: result.pop(key) for key in _ECHO_KEYS}
    if ns.succ_crit == "clinical":
        result["gamma_clinical"] = echo["gamma"]
    return result, echo, []


def _run_betabinom(ns, cfg):
    two_arm = any(v is not None for v in (ns.N_con, ns.n_con, ns.x_con))
    cells = ns.N_trt - ns.n_trt + 1
    if two_arm:
        if None in (ns.N_con, ns.n_con, ns.x_con):
            raise _schema_error(
                "missing_field", "two-arm runs need N-con, n-con and x-con")
        cells *= ns.N_con - ns.n_con + 1
    if cells > cfg.betabinom_cap:
        raise DomainError(
            "cap_exceeded",
            f"{cells} indicator cells exceed the configured cap of "
            f"{cfg.betabinom_cap}")
    indicator = cli._indicator(ns)
    arm_t = ArmInterim(n=ns.n_trt, x=ns.x_trt, N=ns.N_trt)
    if two_arm:
        res = ppos_two_arm(BetaPrior(ns.a_trt, ns.b_trt),
                           BetaPrior(ns.a_con, ns.b_con),
                           arm_t, ArmInterim(n=ns.n_con, x=ns.x_con, N=ns.N_con),
                           indicator)
    else:
        res = ppos_one_arm(BetaPrior(ns.a_trt, ns.b_trt), arm_t, indicator)
    result = {"ppos": float(res)}
    echo = {"cells": res.cells, "zero_variance_cells": res.zero_variance_cells,
            "test": ns.test, "tail": ns.alternative}
    warnings = []
    if res.zero_variance_cells:
        warnings.append(
            f"{res.zero_variance_cells} future-data cells had a zero-variance "
            f"test statistic and were decided by the exact-test fallback")
    return result, echo, warnings


def _run_curves(ns, cfg):
    cell = cli._interim_cell(ns)
    prior = cli._prior_kwargs(ns)
    crit = cli._crit_kwargs(ns)
    tab = curve(cell, alternative=ns.alternative, **crit, **prior,
                lo=ns.lo, hi=ns.hi, points=ns.points)
    dens = density_table(cell, alternative=ns.alternative, **prior,
                         points=ns.density_points, span=ns.span)
    measures = {"estimate": tab.estimate, "cp_trend": tab.cp_trend,
                "ppos_no_prior": tab.ppos_no_prior}
    if tab.ppos_with_prior is not None:
        measures["ppos_with_prior"] = tab.ppos_with_prior
    density = {"x": dens.x, "no_prior": dens.no_prior}
    if dens.with_prior is not None:
        density["with_prior"] = dens.with_prior
    result = {"measures": measures, "density": density,
              "reference": {"observed": tab.observed, "power": 0.5,
                            "crossing": tab.crossing, "gamma": tab.gamma}}
    full = evaluate(cell, alternative=ns.alternative, **crit,
                    **prior).as_dict()
    echo = {key: full[key] for key in _ECHO_KEYS}
    return result, echo, []


_RUNNERS = {"pos": _run_pos, "succ-ia": _run_succ_ia,
            "betabinom": _run_betabinom, "curves": _run_curves}


# --- app -----------------------------------------------------------------------


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _json_response(payload: dict, status: int = 200) -> Response:
    return Response(content=_canonical(payload), status_code=status,
                    media_type="application/json")


def _error(status: int, code: str, message: str) -> Response:
    return _json_response(
        {"v": 1, "error": {"code": code, "message": message}}, status)


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    cfg = config if config is not None else ServiceConfig.from_env()
    app = FastAPI(title="succprob", version=__version__)
    if cfg.cors_origins:
        app.add_middleware(CORSMiddleware, allow_origins=list(cfg.cors_origins),
                           allow_methods=["*"], allow_headers=["*"])

    async def _body(request: Request):
        raw = await request.body()
        if len(raw) > cfg.max_body_bytes:
            raise RequestRejected(
                413, "body_too_large",
                f"request body exceeds {cfg.max_body_bytes} bytes")
        try:
            return json.loads(raw)
        except json.JSONDecodeError as exc:
            raise _schema_error("bad_json",
                                f"request body is not valid JSON: {exc}")

    def _dispatch(kind: str, body) -> Response:
        ns = _namespace(kind, body)
        try:
            result, echo, warnings = _RUNNERS[kind](ns, cfg)
        except cli.UsageError as exc:
            # shared helpers phrase problems as CLI flags; drop the dashes
            raise _schema_error("invalid_body",
                                re.sub(r"--(?=[a-zA-Z])", "", str(exc)))
        return _json_response({"v": 1, "kind": kind, "result": result,
                               "echo": echo, "warnings": warnings})

    @app.post("/api/v1/pos")
    async def pos(request: Request):
        return _dispatch("pos", await _body(request))

    @app.post("/api/v1/succ-ia")
    async def succ_ia(request: Request):
        return _dispatch("succ-ia", await _body(request))

    @app.post("/api/v1/betabinom")
    async def betabinom(request: Request):
        return _dispatch("betabinom", await _body(request))

    @app.post("/api/v1/curves")
    async def curves(request: Request):
        return _dispatch("curves", await _body(request))

    @app.get("/healthz")
    async def healthz():
        return _json_response({"status": "ok", "version": __version__})

    @app.exception_handler(RequestRejected)
    async def _rejected(request, exc: RequestRejected):
        return _error(exc.status, exc.code, str(exc))

    @app.exception_handler(DomainError)
    async def _domain(request, exc: DomainError):
        return _error(422, exc.code, str(exc))

    @app.exception_handler(NumericalError)
    async def _numerical(request, exc: NumericalError):
        return _error(500, exc.code, str(exc))

    @app.middleware("http")
    async def _access_log(request: Request, call_next):
        start = time.perf_counter()
        response = await call_next(request)
        _log.info("%s", json.dumps(
            {"method": request.method, "path": request.url.path,
             "status": response.status_code,
             "ms": round((time.perf_counter() - start) * 1e3, 3)},
            sort_keys=True))
        return response

    return app


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="succprob-service",
        description="JSON service for interim and design-stage success "
                    "probabilities")
    parser.add_argument("--host",
                        default=os.environ.get("SUCCPROB_BIND", "127.0.0.1"))
    parser.add_argument("--port", type=int,
                        default=int(os.environ.get("SUCCPROB_PORT", 8742)))
    parser.add_argument("--cors-origin", action="append", default=None,
                        help="allowed origin, repeatable")
    parser.add_argument("--betabinom-cap", type=int, default=None)
    args = parser.parse_args(argv)

    cfg = ServiceConfig.from_env()
    if args.cors_origin:
        cfg = replace(cfg, cors_origins=tuple(args.cors_origin))
    if args.betabinom_cap is not None:
        cfg = replace(cfg, betabinom_cap=args.betabinom_cap)

    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(message)s")
    import uvicorn

    uvicorn.run(create_app(cfg), host=args.host, port=args.port,
                log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
