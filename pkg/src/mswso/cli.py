"""Command-line interface.

::

    mswso spectrum --config model.json
    mswso classify --config model.json --lambda-re 1.5
    mswso scan     --config model.json --phases 16
    mswso verify   --config model.json --modulus 1.5 --truncations 50,100,200,400
    mswso graph    --config model.json --lambda 1.5
    mswso orbit    --config model.json --point 0.2,0.7

Exit codes: 0 success, 1 invalid input, 2 disagreement between the
classifiers or with the numerical oracle, 3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import cmath
import copy
import hashlib
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import jsonschema
import numpy as np

from . import __version__
from . import expr as _expr
from .classifier import (ClassifierDisagreement, annulus, block_verdict, circles, classify_full,
                         reduced_coefficient, spectral_radius_estimate)
from .discrete import DEFAULT_TRUNCATIONS, verify_block
from .dynamics import (BlackBoxModel, SimplexModel, as_coefficient, block_point, coeff_sequence,
                       fixed_points, limits, make_interval_map, orbit, residence_bound,
                       sample_points)
from .errors import NoConvergence, ValidationError
from .graph import decompose, discover_edges, simplex_graph, to_dot
from .verdicts import STATUS_CODES, Status


EXIT_OK, EXIT_INVALID, EXIT_DISAGREE, EXIT_NOCONV = 0, 1, 2, 3

DEFAULT_SEED = 42
DEFAULT_EDGE_SAMPLES = 10_000
DEFAULT_ORBIT_SAMPLES = 200
DEFAULT_RESIDENCE_SAMPLES = 2_000
DEFAULT_WINDOW = 200
DEFAULT_K = 60
DEFAULT_RADIUS = 0.1

_POS_INT = {"type": "integer", "minimum": 1}
_NUMBER_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}

_SIMPLEX = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type", "m", "gamma"],
    "properties": {
        "type": {"const": "simplex"},
        "m": _POS_INT,
        "gamma": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "family": {"enum": ["mobius"]},
                "c": {"type": "number", "exclusiveMinimum": 1},
                "formula": {"type": "string", "minLength": 1},
            },
            "oneOf": [{"required": ["family", "c"]}, {"required": ["formula"]}],
        },
    },
}

_BLACKBOX = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type", "forward", "inverse", "fixed_points"],
    "properties": {
        "type": {"const": "blackbox"},
        "forward": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "inverse": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "fixed_points": {"type": "array", "items": _NUMBER_LIST, "minItems": 1},
        "box": {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2},
        "density_flag": {"type": "boolean"},
    },
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "model": {
            "type": "object",
            "required": ["type"],
            "properties": {"type": {"enum": ["simplex", "blackbox"]}},
            "allOf": [
                {"if": {"properties": {"type": {"const": "simplex"}}}, "then": _SIMPLEX},
                {"if": {"properties": {"type": {"const": "blackbox"}}}, "then": _BLACKBOX},
            ],
        },
        "a0": {"type": "string", "minLength": 1},
        # Treat a0 as the reduced coefficient itself (skip the measure density).
        "a0_is_reduced": {"type": "boolean"},
        "weights": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 1},
        "measure": {"enum": ["lebesgue"]},
        "sampling": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "seed": {"type": "integer", "minimum": 0},
                "window": _POS_INT,
                "counts": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "edges": {"type": "integer", "minimum": 0},
                        "orbits": _POS_INT,
                        "residence": _POS_INT,
                    },
                },
            },
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "circle_tol": {"type": "number", "exclusiveMinimum": 0},
                "limit_tol": {"type": "number", "exclusiveMinimum": 0},
            },
        },
        "scan": {
            "type": "object",
            "additionalProperties": False,
            "required": ["modulus"],
            "properties": {
                "modulus": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["min", "max", "steps"],
                    "properties": {
                        "min": {"type": "number", "minimum": 0},
                        "max": {"type": "number", "minimum": 0},
                        "steps": _POS_INT,
                    },
                },
                "phases": _POS_INT,
            },
        },
        "verify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "K": _POS_INT,
                "radius": {"type": "number", "exclusiveMinimum": 0},
                "truncations": {"type": "array", "items": {"type": "integer", "minimum": 4}, "minItems": 2},
            },
        },
    },
}


class ConfigError(ValidationError):
    """Invalid configuration; ``pointer`` is a JSON pointer into the document."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer
        super().__init__(f"config {pointer or '/'}: {message}")


def _pointer(path) -> str:
    return "".join(f"/{p}" for p in path)


def validate_config(cfg) -> dict:
    """Schema and cross-field checks; returns ``cfg`` unchanged."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    err = jsonschema.exceptions.best_match(validator.iter_errors(cfg))
    if err is not None:
        raise ConfigError(_pointer(err.absolute_path), err.message)
    if ("a0" in cfg) == ("weights" in cfg):
        raise ConfigError("", "exactly one of 'a0' or 'weights' is required")
    model = cfg.get("model")
    if "a0" in cfg and model is None:
        raise ConfigError("/a0", "an a0 expression needs a model")
    if model is None and len(cfg["weights"]) < 2:
        raise ConfigError("/weights", "without a model at least two weights are needed (m >= 1)")
    if model is not None and model["type"] == "blackbox":
        fps = model["fixed_points"]
        dim = len(fps[0])
        for i, f in enumerate(fps):
            if len(f) != dim:
                raise ConfigError(f"/model/fixed_points/{i}", f"expected {dim} coordinates")
        for key in ("forward", "inverse"):
            if len(model[key]) != dim:
                raise ConfigError(f"/model/{key}", f"expected {dim} component formulas")
        if "a0" in cfg and not cfg.get("a0_is_reduced", False):
            raise ConfigError("/a0_is_reduced", "black-box models need a0_is_reduced=true "
                                                "(no measure density is available)")
    if model is not None and "weights" in cfg:
        n = model["m"] + 1 if model["type"] == "simplex" else len(model["fixed_points"])
        if len(cfg["weights"]) != n:
            raise ConfigError("/weights", f"expected {n} weights, got {len(cfg['weights'])}")
    scan = cfg.get("scan")
    if scan and scan["modulus"]["min"] > scan["modulus"]["max"]:
        raise ConfigError("/scan/modulus", "min exceeds max")
    return cfg


def config_hash(cfg: dict) -> str:
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _parse_at(pointer: str, source: str, arity: int) -> _expr.Expr:
    try:
        return _expr.parse(source, arity)
    except _expr.ExprError as exc:
        raise ConfigError(pointer, str(exc)) from exc


def _blackbox(model: dict) -> BlackBoxModel:
    fps = tuple(tuple(float(c) for c in f) for f in model["fixed_points"])
    dim = len(fps[0])
    fwd = [_parse_at(f"/model/forward/{i}", s, dim) for i, s in enumerate(model["forward"])]
    inv = [_parse_at(f"/model/inverse/{i}", s, dim) for i, s in enumerate(model["inverse"])]
    lo, hi = model.get("box", [0.0, 1.0])

    def apply(exprs):
        def f(x):
            x = np.asarray(x, dtype=float)
            cols = [x[..., i] for i in range(dim)]
            return np.stack([np.broadcast_to(_expr.evaluate(e, cols), x.shape[:-1]) for e in exprs], axis=-1)
        return f

    def sampler(rng, n):
        return rng.uniform(lo, hi, size=(n, dim))

    return BlackBoxModel(apply(fwd), apply(inv), fps, sampler, lambda x: np.clip(x, lo, hi))


@dataclass
class Context:
    config: dict
    hash: str
    seed: int
    model: object
    coefficient: object
    weights: list
    graph: object
    circle_tol: float

    def meta(self) -> dict:
        return {"config_hash": self.hash, "seed": self.seed, "version": __version__}

    def count(self, name: str, default: int) -> int:
        return int(self.config.get("sampling", {}).get("counts", {}).get(name, default))

    def rng(self, salt: int = 0) -> np.random.Generator:
        return np.random.default_rng([self.seed, salt])


def build_context(cfg: dict, seed: int | None = None) -> Context:
    """Validate ``cfg`` and assemble the model, coefficient, weights and graph."""
    cfg = copy.deepcopy(validate_config(cfg))
    sampling = cfg.setdefault("sampling", {})
    if seed is not None:
        sampling["seed"] = int(seed)
    seed = int(sampling.setdefault("seed", DEFAULT_SEED))
    tol = float(cfg.get("tolerances", {}).get("circle_tol", 1e-12))
    spec = cfg.get("model")

    model = None
    if spec is not None and spec["type"] == "simplex":
        g = spec["gamma"]
        try:
            gamma = make_interval_map("mobius", c=g["c"]) if "family" in g else make_interval_map(g["formula"])
        except (_expr.ExprError, ValidationError) as exc:
            raise ConfigError("/model/gamma", str(exc)) from exc
        model = SimplexModel(spec["m"], gamma)
    elif spec is not None:
        model = _blackbox(spec)

    coef = None
    if "a0" in cfg:
        a0 = _parse_at("/a0", cfg["a0"], model.dim)
        coef = as_coefficient(a0) if cfg.get("a0_is_reduced") else reduced_coefficient(a0, model)
        F = np.array(model.declared_fixed_points())
        try:
            weights = [float(v) for v in np.abs(np.asarray(coef(F), dtype=float))]
        except (_expr.ExprDomainError, ValidationError) as exc:
            raise ConfigError("/a0", f"cannot evaluate the coefficient at the fixed points: {exc}") from exc
        for k, w in enumerate(weights):
            if not (w > 0 and math.isfinite(w)):
                raise ConfigError("/a0", f"coefficient modulus at fixed point {k} is {w}; must be positive")
    else:
        weights = [float(w) for w in cfg["weights"]]

    if model is None or isinstance(model, SimplexModel):
        m = len(weights) - 1 if model is None else model.m
        graph = simplex_graph(m, weights)
    else:
        fps = fixed_points(model, np.random.default_rng([seed, 1]))
        found = discover_edges(model, fps, cfg["sampling"].get("counts", {}).get("edges", DEFAULT_EDGE_SAMPLES),
                               np.random.default_rng([seed, 2]))
        graph = replace(found.with_weights(weights), density_flag=bool(spec.get("density_flag", False)))
    return Context(cfg, config_hash(cfg), seed, model, coef, weights, graph, tol)


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config {path} is not valid JSON: {exc}") from exc


# -- formatting ----------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _csv(tag: str, ctx: Context, columns: list[str], rows) -> str:
    out = io.StringIO()
    out.write(f"# mswso-{tag} v1 config_hash={ctx.hash} seed={ctx.seed} version={__version__}\n")
    out.write(",".join(columns) + "\n")
    for row in rows:
        out.write(",".join(_cell(v) for v in row) + "\n")
    return out.getvalue()


def _cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _pool_map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))  # map keeps input order


# -- commands ------------------------------------------------------------------

def cmd_spectrum(ctx: Context, window: int | None = None) -> dict:
    ring = annulus(ctx.weights)
    out = {**ctx.meta(), "weights": ctx.weights, "annulus": ring.to_dict(), "circles": circles(ctx.weights)}
    if ctx.coefficient is not None:
        n = window or int(ctx.config["sampling"].get("window", DEFAULT_WINDOW))
        est = spectral_radius_estimate(ctx.model, ctx.coefficient, n,
                                       ctx.count("orbits", DEFAULT_ORBIT_SAMPLES), ctx.rng(3))
        out["spectral_radius"] = {"window": n, "estimate": est, "R": ring.R,
                                  "relative_error": abs(est - ring.R) / ring.R}
    return out


def cmd_classify(ctx: Context, lam: complex) -> dict:
    record = classify_full(ctx.graph, lam, ctx.circle_tol).to_dict()
    record["config_hash"] = ctx.hash
    return record


def scan_lambdas(ctx: Context, phases: int | None = None) -> list[complex]:
    scan = ctx.config.get("scan")
    if scan is None:
        raise ConfigError("/scan", "the scan command needs a 'scan' section")
    mod = scan["modulus"]
    moduli = np.linspace(mod["min"], mod["max"], mod["steps"]) if mod["steps"] > 1 else np.array([mod["min"]])
    if phases is None:
        return [complex(float(r), 0.0) for r in moduli]
    return [float(r) * cmath.exp(2j * math.pi * j / phases) for r in moduli for j in range(phases)]


def cmd_scan(ctx: Context, phases: int | None = None, jobs: int = 1) -> list[dict]:
    phases = phases if phases is not None else ctx.config["scan"].get("phases") if "scan" in ctx.config else None
    lams = scan_lambdas(ctx, phases)
    return _pool_map(lambda lam: cmd_classify(ctx, lam), lams, jobs)


def _sample_tau(ctx: Context, edge, rng):
    j, k = edge
    if isinstance(ctx.model, SimplexModel):
        return block_point(ctx.model, j, k, rng.uniform(0.05, 0.95, size=k - j))
    X = sample_points(ctx.model, ctx.count("edges", DEFAULT_EDGE_SAMPLES), rng)
    F = ctx.model.declared_fixed_points()
    bwd, fwd = limits(ctx.model, X, -1, F), limits(ctx.model, X, +1, F)
    ids = [v.id for v in ctx.graph.vertices]
    for x, b, f in zip(X, bwd, fwd):
        if (ids[b], ids[f]) == (j, k):
            return x
    return None


def cmd_verify(ctx: Context, lam: complex, truncations=None, jobs: int = 1) -> dict:
    """Run the finite-section oracle on one orbit block per graph edge."""
    if ctx.model is None or ctx.coefficient is None:
        raise ValidationError("verify needs a model and an 'a0' coefficient; weights alone carry no orbits")
    vcfg = ctx.config.get("verify", {})
    truncations = sorted(truncations or vcfg.get("truncations") or DEFAULT_TRUNCATIONS)
    cls = classify_full(ctx.graph, lam, ctx.circle_tol)
    diagnostics = []

    radius = float(vcfg.get("radius", DEFAULT_RADIUS))
    res = residence_bound(ctx.model, radius,
                          sample_points(ctx.model, ctx.count("residence", DEFAULT_RESIDENCE_SAMPLES), ctx.rng(4)))
    K = int(vcfg.get("K", DEFAULT_K))
    if K <= res.N:
        msg = f"truncation K={K} is below the residence bound {res.N}; raised to {res.N + 1}"
        diagnostics.append(msg)
        K = res.N + 1

    w = ctx.graph.weights
    edges = ctx.graph.sorted_edges()
    rng = ctx.rng(5)
    taus = [_sample_tau(ctx, e, rng) for e in edges]

    def run(item):
        idx, (edge, tau) = item
        j, k = edge
        predicted = block_verdict(w[j], w[k], lam, ctx.circle_tol)
        entry = {"edge": [j, k], "predicted": predicted.value, "K": K}
        if tau is None:
            entry.update(tau=None, agreement=False, error="no sample point found on this block")
            return entry
        seq = coeff_sequence(ctx.model, ctx.coefficient, tau, K)
        report = verify_block(seq, lam, predicted, truncations, seed=ctx.seed + idx)
        entry.update(tau=[float(t) for t in tau], agreement=report.agreement, report=report.to_dict())
        return entry

    blocks = _pool_map(run, list(enumerate(zip(edges, taus))), jobs)
    agreement = all(b["agreement"] for b in blocks)
    return {**ctx.meta(), "lambda": {"re": complex(lam).real, "im": complex(lam).imag},
            "classification": cls.to_dict(), "residence_bound": res.N, "K": K,
            "truncations": truncations, "blocks": blocks, "agreement": agreement,
            "diagnostics": diagnostics}


def cmd_graph(ctx: Context, lam: complex | None = None, discover: bool = False):
    graph = ctx.graph
    if discover:
        if ctx.model is None:
            raise ValidationError("--discover needs a model")
        fps = fixed_points(ctx.model, ctx.rng(1))
        found = discover_edges(ctx.model, fps, ctx.count("edges", DEFAULT_EDGE_SAMPLES), ctx.rng(2))
        graph = replace(found.with_weights(ctx.weights), density_flag=graph.density_flag)
    dec = decompose(graph, abs(lam), ctx.circle_tol) if lam is not None else None
    return graph, dec


def cmd_orbit(ctx: Context, point, lo: int, hi: int) -> dict:
    if ctx.model is None:
        raise ValidationError("orbit needs a model")
    x = np.asarray(point, dtype=float)
    if x.shape != (ctx.model.dim,):
        raise ValidationError(f"point needs {ctx.model.dim} coordinates")
    if not ctx.model.contains(x):
        raise ValidationError(f"point {list(x)} is outside the domain")
    pts = orbit(ctx.model, x, lo, hi)
    F = ctx.model.declared_fixed_points()
    ids = [v.id for v in ctx.graph.vertices]
    avals = (np.abs(np.asarray(ctx.coefficient(pts), dtype=float)) if ctx.coefficient is not None
             else [None] * len(pts))
    return {**ctx.meta(), "point": [float(c) for c in x],
            "orbit": [{"k": lo + i, "x": [float(c) for c in p], "a": None if v is None else float(v)}
                      for i, (p, v) in enumerate(zip(pts, avals))],
            "backward_limit": ids[int(limits(ctx.model, x[None, :], -1, F)[0])],
            "forward_limit": ids[int(limits(ctx.model, x[None, :], +1, F)[0])]}


# -- argument handling ---------------------------------------------------------

def _lambda_from(args) -> complex:
    if args.modulus is not None:
        if args.lambda_re is not None or args.lambda_im is not None:
            raise ValidationError("give either --modulus or --lambda-re/--lambda-im, not both")
        return complex(args.modulus, 0.0)
    if args.lambda_re is None and args.lambda_im is None:
        raise ValidationError("lambda is required (--lambda-re/--lambda-im or --modulus)")
    return complex(args.lambda_re or 0.0, args.lambda_im or 0.0)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if len(vals) < 2 or min(vals) < 4:
        raise argparse.ArgumentTypeError("need at least two truncations, each >= 4")
    return vals


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON configuration file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override sampling seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write output to PATH")
    common.add_argument("--format", choices=["json", "csv", "dot"], default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS, help="worker threads")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="mswso", parents=[common],
                                     description="Spectral classification of weighted shift operators.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def lam_args(p):
        p.add_argument("--lambda-re", type=float, default=None)
        p.add_argument("--lambda-im", type=float, default=None)
        p.add_argument("--modulus", type=float, default=None)

    p = sub.add_parser("spectrum", parents=[common], help="annulus, circles, spectral radius estimate")
    p.add_argument("--window", type=int, default=None)
    p = sub.add_parser("classify", parents=[common], help="verdict for one lambda")
    lam_args(p)
    p = sub.add_parser("scan", parents=[common], help="verdicts over a modulus grid")
    p.add_argument("--phases", type=int, default=None, help="emit (re, im, status_code) for P phases")
    p = sub.add_parser("verify", parents=[common], help="check blocks with the finite-section oracle")
    lam_args(p)
    p.add_argument("--truncations", type=_int_list, default=None)
    p = sub.add_parser("graph", parents=[common], help="fixed-point graph as DOT")
    p.add_argument("--discover", action="store_true")
    p.add_argument("--lambda", dest="lam", type=_complex, default=None)
    p = sub.add_parser("orbit", parents=[common], help="orbit of a point and its limits")
    p.add_argument("--point", type=_float_list, required=True)
    p.add_argument("--lo", type=int, default=-10)
    p.add_argument("--hi", type=int, default=10)
    return parser


_DEFAULT_FORMAT = {"spectrum": "json", "classify": "json", "scan": "csv", "verify": "json",
                   "graph": "dot", "orbit": "json"}
_FORMATS = {"spectrum": {"json", "csv"}, "classify": {"json", "csv"}, "scan": {"json", "csv"},
            "verify": {"json", "csv"}, "graph": {"json", "dot"}, "orbit": {"json", "csv"}}


def _render(args, ctx: Context, fmt: str, stderr=None) -> tuple[str, int]:
    cmd = args.command
    jobs = max(1, getattr(args, "jobs", 1))
    if cmd == "spectrum":
        rep = cmd_spectrum(ctx, args.window)
        if fmt == "json":
            return _dumps(rep), EXIT_OK
        rows = [("r", rep["annulus"]["r"]), ("R", rep["annulus"]["R"])]
        rows += [("circle", c) for c in rep["circles"]]
        if "spectral_radius" in rep:
            rows.append(("spectral_radius_estimate", rep["spectral_radius"]["estimate"]))
        return _csv("spectrum", ctx, ["quantity", "value"], rows), EXIT_OK
    if cmd == "classify":
        rec = cmd_classify(ctx, _lambda_from(args))
        if fmt == "json":
            return _dumps({**ctx.meta(), "classification": rec}), EXIT_OK
        cols = ["re", "im", "modulus", "status", "kernel", "range", "provenance", "circle_hits"]
        row = [rec["lambda"]["re"], rec["lambda"]["im"], rec["modulus"], rec["status"], rec["kernel"],
               rec["range"], rec["provenance"], " ".join(map(str, rec["circle_hits"]))]
        return _csv("classify", ctx, cols, [row]), EXIT_OK
    if cmd == "scan":
        phases = args.phases if args.phases is not None else ctx.config.get("scan", {}).get("phases")
        if phases is not None and phases < 1:
            raise ValidationError("--phases must be >= 1")
        recs = cmd_scan(ctx, phases, jobs)
        if fmt == "json":
            return _dumps({**ctx.meta(), "records": recs}), EXIT_OK
        if phases is not None:
            rows = [(r["lambda"]["re"], r["lambda"]["im"], STATUS_CODES[Status(r["status"])]) for r in recs]
            return _csv("phases", ctx, ["re", "im", "status_code"], rows), EXIT_OK
        rows = [(r["modulus"], r["status"], r["kernel"], r["range"]) for r in recs]
        return _csv("scan", ctx, ["modulus", "status", "kernel", "range"], rows), EXIT_OK
    if cmd == "verify":
        rep = cmd_verify(ctx, _lambda_from(args), args.truncations, jobs)
        for msg in rep["diagnostics"]:
            print(f"warning: {msg}", file=sys.stderr if stderr is None else stderr)
        code = EXIT_OK if rep["agreement"] else EXIT_DISAGREE
        if fmt == "json":
            return _dumps(rep), code
        rows = []
        for b in rep["blocks"]:
            observed = (b.get("report") or {}).get("observed", {})
            for rung in observed.get("sigma_min", []):
                rows.append((b["edge"][0], b["edge"][1], rung["N"], rung["sigma_min"], rung["second_smallest"]))
        return _csv("verify-ladder", ctx, ["source", "sink", "N", "sigma_min", "second_smallest"], rows), code
    if cmd == "graph":
        graph, dec = cmd_graph(ctx, args.lam, args.discover)
        if fmt == "dot":
            return to_dot(graph, dec), EXIT_OK
        return _dumps({**ctx.meta(), "graph": graph.to_dict()}), EXIT_OK
    if cmd == "orbit":
        rep = cmd_orbit(ctx, args.point, args.lo, args.hi)
        if fmt == "json":
            return _dumps(rep), EXIT_OK
        cols = ["k"] + [f"x{i + 1}" for i in range(len(rep["point"]))] + ["a_value"]
        rows = [[p["k"], *p["x"], "" if p["a"] is None else p["a"]] for p in rep["orbit"]]
        return _csv("orbit", ctx, cols, rows), EXIT_OK
    raise AssertionError(cmd)


def run(argv=None, stdout=None, stderr=None) -> int:
    """Entry point returning the exit code (``main`` wraps it for the console script)."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=stderr)
    try:
        if not hasattr(args, "config"):
            raise ValidationError("--config PATH is required")
        fmt = getattr(args, "format", None) or _DEFAULT_FORMAT[args.command]
        if fmt not in _FORMATS[args.command]:
            raise ValidationError(f"{args.command} does not support --format {fmt}")
        ctx = build_context(load_config(args.config), getattr(args, "seed", None))
        text, code = _render(args, ctx, fmt, stderr)
    except ClassifierDisagreement as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_DISAGREE
    except NoConvergence as exc:
        print(f"error: numerical non-convergence: {exc}", file=stderr)
        return EXIT_NOCONV
    except (ValidationError, _expr.ExprError, _expr.ExprDomainError) as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_INVALID
    if hasattr(args, "out"):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    if code == EXIT_DISAGREE:
        print("error: the numerical oracle disagrees with the predicted verdicts", file=stderr)
    return code


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
