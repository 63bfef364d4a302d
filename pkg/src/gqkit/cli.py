"""Command-line entry point.

    gqkit <command> INPUT [--cutoff K] [--tol T] [--format json|csv] [--out PATH]
                          [--seed-v JSON] [--orders JSON]

INPUT is a path, ``-`` for standard input, or inline JSON. Exit status is
0 on success (an unsolvable system is a result, not an error), 2 when the
input does not match the command's schema or a precondition, 3 when a
solver fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field

import jsonschema
import mpmath
import numpy as np

from . import cohomeq, foliation, numberlab, prequantum, quantize
from .errors import GQKitError
from .serialize import dumps, write_csv

COMMANDS = ("cf", "bs-scan", "solve-mv", "quantize-fibration", "quantize-torus", "liouville-demo", "tangency")
DEFAULT_TOL = 1e-9

# ---------------------------------------------------------------------------
# schemas

_number = {"type": "number"}
_pair = {"type": "array", "items": _number, "minItems": 2, "maxItems": 2}

SLOPE = {
    "type": "object",
    "oneOf": [
        {"required": ["cf"]},
        {"required": ["value_decimal"]},
        {"required": ["preset"]},
    ],
    "properties": {
        "cf": {"type": "array", "items": {"type": "integer"}, "minItems": 1},
        "value_decimal": {"type": "string", "pattern": r"^\s*[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?\s*$"},
        "depth": {"type": "integer", "minimum": 1},
        "prec": {"type": "integer", "minimum": 53},
        "preset": {"enum": ["golden", "sqrt2", "liouville"]},
        "order": {"type": "integer", "minimum": 2},
    },
}

FOURIER = {
    "type": "object",
    "required": ["entries"],
    "properties": {
        "cutoff": {"type": "integer", "minimum": 0},
        "entries": {"type": "array", "items": {"type": "array", "prefixItems": [{"type": "integer"}, _number, _number],
                                               "minItems": 3, "maxItems": 3}},
    },
}

MODE = {"oneOf": [{"const": "foliated"},
                  {"type": "object", "required": ["prequantum"], "additionalProperties": False,
                   "properties": {"prequantum": {"type": "integer", "minimum": 1}}}]}

CHART = {
    "type": "object",
    "oneOf": [{"required": ["preset"]}, {"required": ["grid"]}],
    "properties": {
        "preset": {"enum": ["linear", "torus"]},
        "c": _number,
        "p": {"type": "integer", "minimum": 1},
        "domain": _pair,
        "area_p": {"type": "integer", "minimum": 0},
        "orientation": {"enum": [1, -1]},
        "samples": {"type": "integer", "minimum": 2},
        "grid": {
            "type": "object",
            "required": ["values"],
            "properties": {"nx": {"type": "integer", "minimum": 4}, "ntheta": {"type": "integer", "minimum": 4},
                           "values": {"type": "array"}, "includes_endpoint": {"type": "boolean"}},
        },
    },
}

INTERVAL = {
    "type": "object",
    "required": ["lo", "hi"],
    "properties": {"lo": _number, "hi": _number, "lo_open": {"type": "boolean"}, "hi_open": {"type": "boolean"}},
}

LEAF = {
    "type": "object",
    "required": ["lambda"],
    "properties": {"lambda": {"type": "number", "not": {"const": 0}}, "bs": {"type": "boolean"},
                   "phase": _pair, "crossing": _pair},
}

SCHEMAS = {
    "cf": SLOPE,
    "bs-scan": CHART,
    "solve-mv": {
        "type": "object",
        "required": ["eta", "w_hat", "w"],
        "properties": {"eta": SLOPE, "mode": MODE, "w_hat": FOURIER, "w": FOURIER},
    },
    "quantize-fibration": {
        "type": "object",
        "required": ["intervals"],
        "properties": {"intervals": {"type": "array", "items": INTERVAL, "minItems": 1}},
    },
    "quantize-torus": {
        "type": "object",
        "oneOf": [
            {"required": ["variant", "leaves"], "properties": {"variant": {"const": "generic"}}},
            {"required": ["variant", "eta"], "properties": {"variant": {"const": "irrational"}}},
        ],
        "properties": {"variant": {"enum": ["generic", "irrational"]},
                       "leaves": {"type": "array", "items": LEAF, "minItems": 1},
                       "eta": SLOPE, "mode": MODE},
    },
    "liouville-demo": {
        "type": "object",
        "properties": {"order": {"type": "integer", "minimum": 2}, "bump": {"type": "integer", "minimum": 2}},
    },
    "tangency": {
        "type": "object",
        "required": ["f", "field"],
        "properties": {
            "f": {"type": "array", "items": _number, "minItems": 8},
            "field": {"oneOf": [_pair, {"type": "array", "items": _pair, "minItems": 8}]},
        },
    },
}

# output schemas: every emitted JSON document re-validates against these
_SUMMARY = {"type": "object", "required": ["degrees"],
            "properties": {"degrees": {"type": "object", "minProperties": 1}}}
OUTPUT_SCHEMAS = {
    "cf": {"type": "object", "required": ["slope", "convergents"],
           "properties": {"slope": {"type": "object", "required": ["cf", "value_decimal"]}}},
    "bs-scan": {"type": "object", "required": ["chart", "bs_points"], "properties": {"chart": CHART}},
    "solve-mv": {"type": "object", "required": ["status"],
                 "properties": {"status": {"enum": ["solved", "no-solution", "solved-with-growth"]},
                                "u": FOURIER, "v": FOURIER}},
    "quantize-fibration": _SUMMARY,
    "quantize-torus": _SUMMARY,
    "liouville-demo": {"type": "object", "required": ["witness", "result", "report"],
                       "properties": {"w": FOURIER}},
    "tangency": {"type": "object", "required": ["mu_plus", "mu_minus"]},
    "error": {"type": "object", "required": ["error", "where", "message"]},
}


class InputError(Exception):
    def __init__(self, message: str, where: str):
        super().__init__(message)
        self.where = where


# ---------------------------------------------------------------------------
# config

@dataclass
class RunConfig:
    command: str
    input_path: str
    cutoff: int | None = None
    tol: float = DEFAULT_TOL
    output_format: str = "json"
    output_path: str | None = None
    seed_v: list | None = None
    orders: list = field(default_factory=lambda: list(cohomeq.DEFAULT_ORDERS))

    def validate(self):
        if self.seed_v is not None and not isinstance(self.seed_v, list):
            raise InputError("--seed-v must be a JSON array", "cli.run")
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}", "cli.run")
        if not self.tol > 0:
            raise InputError("tol must be > 0", "cli.run")
        if self.command in ("solve-mv", "liouville-demo") and self.cutoff is not None and self.cutoff < 32:
            raise InputError("cutoff must be >= 32", f"cli.{self.command}")
        if self.output_format not in ("json", "csv"):
            raise InputError("format must be json or csv", "cli.run")
        if not isinstance(self.orders, list) or not self.orders or any((not isinstance(s, int)) or s < 0 for s in self.orders):
            raise InputError("orders must be a nonempty list of nonnegative integers", "cli.run")


def _read_input(source: str):
    text = sys.stdin.read() if source == "-" else None
    if text is None:
        stripped = source.lstrip()
        if stripped.startswith("{") or stripped.startswith("["):
            text = source
        else:
            try:
                with open(source, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise InputError(f"cannot read input: {exc}", "cli.input") from exc
    try:
        # numbers as floats for the schema; the exact text is reparsed where precision matters
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}", "cli.input") from exc


def _validate(command: str, data) -> None:
    try:
        jsonschema.validate(data, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path)
        raise InputError(f"{exc.message}" + (f" at /{path}" if path else ""), f"cli.{command}") from exc


# ---------------------------------------------------------------------------
# input conversion

def _slope(data: dict, depth_default: int = 40) -> numberlab.SlopeNumber:
    return numberlab.slope_from_json(data, depth=depth_default)


def _fourier(data: dict, cutoff: int | None) -> cohomeq.FourierVector:
    K = cutoff if cutoff is not None else data.get("cutoff")
    if K is None:
        K = cohomeq.DEFAULT_CUTOFF
    if "cutoff" in data and cutoff is not None and int(data["cutoff"]) != cutoff:
        # an explicit --cutoff re-truncates the data
        data = {"cutoff": cutoff, "entries": [e for e in data["entries"] if abs(int(e[0])) <= cutoff]}
    try:
        return cohomeq.FourierVector.from_json({"cutoff": int(K), "entries": data["entries"]})
    except ValueError as exc:
        raise InputError(str(exc), "cli.solve-mv") from exc


# ---------------------------------------------------------------------------
# commands: each returns (json document, csv header, csv rows)

def _cmd_cf(data, cfg):
    s = _slope(data, depth_default=20)
    conv = numberlab.convergents(s)
    out = {"slope": s.to_json(), "rational": s.rational, "depth": s.depth,
           "convergents": [[c.p, c.q] for c in conv]}
    if not s.rational and s.depth >= 4:
        out["estimate"] = numberlab.estimate_irrationality_exponent(s).to_json()
    rows = [(c.index, c.p, c.q) for c in conv]
    return out, ["n", "p", "q"], rows


def _cmd_bs_scan(data, cfg):
    try:
        chart = prequantum.chart_from_json(data)
    except ValueError as exc:
        raise InputError(str(exc), "cli.bs-scan") from exc
    samples = int(data.get("samples", 257))
    pts = prequantum.bs_scan(chart, samples, tol=cfg.tol)
    out = {"chart": chart.to_json(), "bs_points": [rep.to_json() for _, rep in pts]}
    return out, ["x", "action"], prequantum.action_table(chart, samples)


def _cmd_solve_mv(data, cfg):
    eta = _slope(data["eta"])
    mode = data.get("mode", "foliated")
    w_hat = _fourier(data["w_hat"], cfg.cutoff)
    w = _fourier(data["w"], cfg.cutoff)
    if w_hat.cutoff != w.cutoff:
        raise InputError("w_hat and w cutoffs differ", "cli.solve-mv")
    kind, p = cohomeq._parse_mode(mode)
    seeds = cfg.seed_v
    if kind == "foliated":
        v0 = 0
        if seeds:
            if len(seeds) != 1:
                raise InputError("foliated mode takes one free parameter (v0)", "cli.solve-mv")
            v0 = _complex(seeds[0])
        res = cohomeq.solve_foliated(eta, w_hat, w, v0=v0, growth_orders=cfg.orders)
    else:
        seeds = [_complex(z) for z in seeds] if seeds else None
        res = cohomeq.solve_prequantum(eta, p, w_hat, w, seeds)
    out = res.to_json()
    if res.status != "no-solution" and res.u.cutoff >= cohomeq.MIN_CUTOFF:
        out["decay"] = {"u": cohomeq.classify_decay(res.u, cfg.orders).to_json(),
                        "v": cohomeq.classify_decay(res.v, cfg.orders).to_json()}
    rows = cohomeq.mode_table(res, eta, "v") if res.status != "no-solution" else []
    return out, ["k", "re", "im", "abs", "divisor"], rows


def _complex(z):
    if isinstance(z, (list, tuple)) and len(z) == 2:
        return mpmath.mpc(z[0], z[1])
    if isinstance(z, (int, float)):
        return mpmath.mpc(z)
    raise InputError(f"bad seed value {z!r}; use a number or [re, im]", "cli.seed-v")


def _cmd_fibration(data, cfg):
    try:
        box = quantize.ActionBox.from_json(data)
    except ValueError as exc:
        raise InputError(str(exc), "cli.quantize-fibration") from exc
    k = quantize.count_bs_fibers(box)
    summary = quantize.sniatycki_quantize(box.n, k)
    rows = [pt for pt in box.lattice_points()]
    return summary.to_json(), [f"f{i + 1}" for i in range(box.n)], rows


def _cmd_torus(data, cfg):
    try:
        model = foliation.model_from_json(data)
    except ValueError as exc:
        raise InputError(str(exc), "cli.quantize-torus") from exc
    summary, trace = foliation.torus_cohomology(model, tol=max(cfg.tol, foliation.PHASE_TOL))
    out = summary.to_json()
    if trace:
        out["trace"] = trace
    rows = [(t["step"], t["h0"], t["finite_part"], t["infinite_components"], int(t["exact"])) for t in trace]
    return out, ["step", "h0", "finite_part", "infinite_components", "exact"], rows


def _cmd_liouville(data, cfg):
    order = int(data.get("order", 6))
    wit = numberlab.build_liouville_number(order)
    K = cfg.cutoff
    w, res, rep = cohomeq.liouville_witness_run(wit, K, bump=data.get("bump"), orders=cfg.orders)
    out = {
        "witness": {"order": order, "verified": wit.verify(),
                    "pairs": [{"s": s, "k_digits": len(str(k)) - 1} for s, (_, k) in zip(wit.orders, wit.pairs)]},
        "w": w,
        "w_decay": cohomeq.classify_decay(w, cfg.orders).to_json(),
        "result": {"status": res.status, "residual": res.residual,
                   "witness_moduli": res.extras["witness_moduli"]},
        "report": rep.to_json(),
    }
    rows = cohomeq.mode_table(res, wit.eta, "v")
    return out, ["k", "re", "im", "abs", "divisor"], rows


def _cmd_tangency(data, cfg):
    f = np.asarray(data["f"], dtype=float)
    n = len(f)
    t = np.arange(n) / n
    fld = np.asarray(data["field"], dtype=float)
    if fld.ndim == 1:
        fld = np.tile(fld, (n, 1))
    elif len(fld) != n:
        raise InputError("field needs one vector per curve sample", "cli.tangency")
    rep = foliation.tangency_count(t, f, fld)
    rows = list(zip(rep.locations, rep.signs))
    return rep.to_json(), ["t", "sign"], rows


HANDLERS = {
    "cf": _cmd_cf,
    "bs-scan": _cmd_bs_scan,
    "solve-mv": _cmd_solve_mv,
    "quantize-fibration": _cmd_fibration,
    "quantize-torus": _cmd_torus,
    "liouville-demo": _cmd_liouville,
    "tangency": _cmd_tangency,
}


# ---------------------------------------------------------------------------
# driver

def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(kind: str, where: str, message: str, path: str | None) -> None:
    _emit(dumps({"error": kind, "where": where, "message": message}) + "\n", path)


def run(cfg: RunConfig) -> int:
    try:
        cfg.validate()
        raw, _ = _read_input(cfg.input_path)
        _validate(cfg.command, raw)
        doc, header, rows = HANDLERS[cfg.command](raw, cfg)
    except InputError as exc:
        _error("schema", exc.where, str(exc), cfg.output_path)
        return 2
    except GQKitError as exc:
        _error(type(exc).__name__, exc.where, str(exc), cfg.output_path)
        # precondition errors (bad cutoffs, seed counts, domains) are input problems
        return 2 if isinstance(exc, ValueError) else 3
    except ValueError as exc:
        _error("schema", f"cli.{cfg.command}", str(exc), cfg.output_path)
        return 2
    except Exception as exc:  # noqa: BLE001 - surface anything else as a solver failure
        _error(type(exc).__name__, f"cli.{cfg.command}", str(exc), cfg.output_path)
        return 3
    if cfg.output_format == "csv":
        _emit(write_csv(header, rows), cfg.output_path)
    else:
        _emit(dumps(doc) + "\n", cfg.output_path)
    return 0


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise argparse.ArgumentTypeError(f"not valid JSON: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gqkit", description="Quantization and foliated cohomology computations.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", help="input file, '-' for stdin, or inline JSON")
    p.add_argument("--cutoff", type=int, default=None, help="Fourier cutoff K (default: from input, else 4096)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="root and phase tolerance")
    p.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    p.add_argument("--out", dest="output_path", default=None)
    p.add_argument("--seed-v", dest="seed_v", type=_json_arg, default=None,
                   help="free parameters as a JSON array (v0, or one seed per residue class)")
    p.add_argument("--orders", type=_json_arg, default=list(cohomeq.DEFAULT_ORDERS),
                   help="decay test orders as a JSON array")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(args.command, args.input, args.cutoff, args.tol, args.output_format,
                    args.output_path, args.seed_v, args.orders)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
