"""Command-line front end: ``malcev [globals] COMMAND ...``.

Exit codes: 0 success, 1 violation or inconsistency, 2 usage or parse
error, 3 resource cap.  Settings are resolved as defaults, then the JSON
``--config`` file, then ``MNW_*`` environment variables, then flags.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from typing import Any

from . import cyclicalg as ca
from .coeffield import Field, FieldMismatch, TwistSpec, coeff_to_json
from .expr import ParseError, parse_word
from .freegroup import (
    DEFAULT_BALL_BUDGET,
    MagnusCapExceeded,
    ResourceCapExceeded,
    Word,
    compare,
    format_word,
)
from .mnseries import (
    DEFAULT_DEPTH,
    IndeterminateValuation,
    Series,
    SeriesRing,
    ZeroSeriesError,
    format_series,
    invert,
    mul,
    self_invariance_probe,
    valuation,
)
from .subnormal import chain_report

SCHEMA = "malcev-report/1"

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass
class SessionConfig:
    rank: int = 2
    field_d: int | None = None
    twist: tuple[str, ...] | None = None
    depth: int = DEFAULT_DEPTH
    ball_budget: int = DEFAULT_BALL_BUDGET
    seed: int = 0
    format: str = "text"
    algebra: dict | None = None  # custom cyclic algebra: minpoly, sigma_image, a

    def validate(self) -> None:
        if self.rank < 2:
            raise UsageError("rank must be >= 2 (the free group is non-cyclic)")
        if self.format not in ("text", "structured"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.depth < 0:
            raise UsageError("depth must be non-negative")

    def ring(self) -> SeriesRing:
        field = Field(self.field_d)
        twist = TwistSpec.from_names(self.twist) if self.twist else None
        return SeriesRing(field, twist, self.rank, self.depth)


_ENV = {
    "MNW_RANK": ("rank", int),
    "MNW_FIELD_D": ("field_d", int),
    "MNW_TWIST": ("twist", lambda s: tuple(p.strip() for p in s.split(","))),
    "MNW_DEPTH": ("depth", int),
    "MNW_BALL_BUDGET": ("ball_budget", int),
    "MNW_SEED": ("seed", int),
    "MNW_FORMAT": ("format", str),
}


def load_config(path: str | None, env: dict[str, str], flags: dict[str, Any]) -> SessionConfig:
    cfg = SessionConfig()
    known = {f.name for f in fields(SessionConfig)}
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        for k, v in data.items():
            setattr(cfg, k, tuple(v) if k == "twist" and v is not None else v)
    for var, (key, conv) in _ENV.items():
        if var in env:
            try:
                setattr(cfg, key, conv(env[var]))
            except ValueError as exc:
                raise UsageError(f"bad value for {var}: {exc}") from exc
    for k, v in flags.items():
        if v is not None:
            setattr(cfg, k, v)
    cfg.validate()
    return cfg


# Serialization -----------------------------------------------------------------

def series_json(a: Series) -> dict:
    return {
        "text": format_series(a),
        "terms": [[format_word(w), coeff_to_json(c)] for w, c in a.terms],
        "precision": None if a.prec is None else format_word(a.prec),
    }


def render_text(report: dict) -> str:
    lines = [report["verdict"]]
    for key, value in _flatten(report.get("result", {})):
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k in sorted(obj):
            yield from _flatten(obj[k], f"{prefix}.{k}" if prefix else k)
    elif isinstance(obj, list) and any(isinstance(x, dict) for x in obj):
        for i, x in enumerate(obj):
            yield from _flatten(x, f"{prefix}[{i}]")
    else:
        yield prefix, obj if isinstance(obj, str) else json.dumps(obj, sort_keys=True)


def render(report: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    return render_text(report)


# Commands ----------------------------------------------------------------------

def _word(text: str, rank: int) -> Word:
    w = parse_word(text, rank)
    if w.max_generator > rank:
        raise UsageError(f"{text!r} uses a generator outside rank {rank}")
    return w


def cmd_order(args, cfg: SessionConfig):
    u, w = _word(args.u, cfg.rank), _word(args.w, cfg.rank)
    res = compare(u, w)
    return EXIT_OK, res.name, {"u": format_word(u), "w": format_word(w)}, {}


def cmd_eval(args, cfg: SessionConfig):
    if args.depth is not None:
        cfg.depth = args.depth
    ring = cfg.ring()
    a = ring.parse(args.expr)
    result = {"series": series_json(a)}
    if not a.is_zero and a.terms:
        result["valuation"] = format_word(valuation(a))
    return EXIT_OK, format_series(a), {"expr": args.expr, "depth": cfg.depth}, result


def cmd_invert(args, cfg: SessionConfig):
    if args.depth is not None:
        cfg.depth = args.depth
    ring = cfg.ring()
    a = ring.parse(args.expr)
    inv = invert(a, cfg.depth)
    check = mul(a, inv) - ring.one
    result = {
        "inverse": series_json(inv),
        "check_matches_one": not check.terms,
    }
    status = EXIT_OK if not check.terms else EXIT_VIOLATION
    return status, format_series(inv), {"expr": args.expr, "depth": cfg.depth}, result


def cmd_probe(args, cfg: SessionConfig):
    ring = cfg.ring()
    h = _word(args.h, cfg.rank)
    gamma = ring.parse(args.gamma)
    if args.lmin > args.lmax:
        raise UsageError("--lmin must not exceed --lmax")
    tr = self_invariance_probe(gamma, h, range(args.lmin, args.lmax + 1), cfg.depth)
    result = {
        "case": tr.case_tag,
        "violation": tr.violation,
        "ell": tr.ell,
        "tried": tr.tried,
        "delta": series_json(tr.delta),
        "epsilon": series_json(tr.epsilon),
        "lambda": None if tr.lam is None else series_json(tr.lam),
        "witness": None if tr.witness is None else format_word(tr.witness),
        "v_eps_h_ell": None if tr.left is None else format_word(tr.left),
        "v_lambda_eps": None if tr.right is None else format_word(tr.right),
    }
    if tr.violation:
        verdict = (
            f"violation at ell={tr.ell}: gamma h^ell gamma^-1 has term "
            f"{format_word(tr.witness)} outside <{format_word(h)}> ({tr.case_tag})"
        )
    else:
        verdict = "no violation in range (inconclusive)"
    inputs = {"h": format_word(h), "gamma": args.gamma, "lmin": args.lmin, "lmax": args.lmax}
    return EXIT_OK, verdict, inputs, result


def cmd_chain(args, cfg: SessionConfig):
    g = _word(args.g, cfg.rank)
    rep = chain_report(
        g,
        args.depth,
        args.ball,
        args.samples,
        ring=cfg.ring(),
        seed=cfg.seed,
        depth=min(cfg.depth, 4),
        budget=cfg.ball_budget,
    )
    data = rep.to_json()
    verdict = "chain evidence consistent" if rep.passed else "chain counterexample found"
    inputs = {"g": format_word(g), "depth": args.depth, "ball": args.ball, "samples": args.samples}
    return (EXIT_OK if rep.passed else EXIT_VIOLATION), verdict, inputs, data


def _algebra(args, cfg: SessionConfig) -> ca.CyclicAlgebra:
    if args.preset:
        return ca.preset(args.preset)
    if cfg.algebra:
        spec = cfg.algebra
        try:
            return ca.build_algebra(
                spec["minpoly"], spec["sigma_image"], spec["a"],
                name=spec.get("name", "custom"), division=bool(spec.get("division", False)),
            )
        except KeyError as exc:
            raise UsageError(f"algebra config lacks {exc}") from exc
    raise UsageError("give --preset NAME or an 'algebra' entry in the config")


def cmd_cyclic(args, cfg: SessionConfig):
    alg = _algebra(args, cfg)
    inputs = {"algebra": alg.to_json(), "action": args.action}
    if args.action == "report":
        subs = {
            name: ca.self_invariance_report(K, seed=cfg.seed).to_json()
            for name, K in ca.standard_subfields(alg).items()
        }
        zd = ca.zero_divisor_witness(alg, limit=2000)
        result = {
            "dim_F": alg.dim,
            "center_dim": ca.centralizer(alg, alg.basis())[0],
            "subfields": subs,
            "zero_divisor": None if zd is None else [str(zd[0]), str(zd[1])],
        }
        status = EXIT_OK
        if zd is not None and alg.division:
            status = EXIT_VIOLATION
        return status, f"cyclic algebra of dimension {alg.dim}", inputs, result
    gen = alg.parse(args.gen)
    inputs["gen"] = str(gen)
    K = ca.Subfield(gen)
    if args.action == "selfinv":
        rep = ca.self_invariance_report(K, seed=cfg.seed)
        data = rep.to_json()
        if rep.self_invariant:
            verdict = "self-invariant"
        elif not rep.is_maximal:
            verdict = "not maximal, hence not self-invariant"
        else:
            w = next(x for _, x in rep.normalizer_witnesses if x is not None)
            verdict = f"not self-invariant; witness {w}"
        return EXIT_OK, verdict, inputs, data
    if args.action == "span":
        x = alg.parse(args.xelt)
        inputs["x"] = str(x)
        try:
            sc = ca.span_closure(K.basis, x, seed=cfg.seed)
        except ca.NormalizationError as exc:
            return EXIT_VIOLATION, f"x does not normalize K; witness {exc.witness}", inputs, {
                "witness": str(exc.witness)
            }
        data = sc.to_json()
        ok = sc.closed and sc.division_check
        verdict = f"L has dim_F {sc.dim_F}, dim_K {sc.dim_K}" + ("" if ok else " (closure check failed)")
        return (EXIT_OK if ok else EXIT_VIOLATION), verdict, inputs, data
    # autocomm: every nontrivial Galois root of K
    roots = [q for q in ca.galois_roots(K) if q != [0, 1]]
    found = []
    status = EXIT_OK
    for q in roots:
        w = ca.autocommutator_probe(K, q)
        if isinstance(w, str):
            status = EXIT_VIOLATION
            found.append({"root": ca.poly_str(q, "e"), "witness": None})
        else:
            ac = w.inverse() * K.element(ca.poly_compose(_coords_in_k(K, w), q, K.min_poly))
            found.append({"root": ca.poly_str(q, "e"), "witness": str(w), "autocommutator": str(ac)})
    if not roots:
        verdict = "no nontrivial Galois root"
    elif status == EXIT_OK:
        verdict = "witness " + ", ".join(f["witness"] for f in found)
    else:
        verdict = "search exhausted"
    return status, verdict, inputs, {"probes": found}


def _coords_in_k(K: ca.Subfield, x: ca.AlgebraElement) -> list:
    from . import linalg

    sol = linalg.solve(linalg.transpose([b.coords for b in K.basis]), x.coords)
    return sol


COMMANDS = {
    "order": cmd_order,
    "eval": cmd_eval,
    "invert": cmd_invert,
    "probe-selfinv": cmd_probe,
    "chain": cmd_chain,
    "cyclic": cmd_cyclic,
}


def _globals_parser(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--format", choices=("text", "structured"), default=d)
    p.add_argument("--seed", type=int, default=d)
    p.add_argument("--config", default=d, help="JSON file with session settings")
    p.add_argument("--rank", type=int, default=d)
    p.add_argument("--field-d", dest="field_d", type=int, default=d, help="work over Q(sqrt d)")
    p.add_argument(
        "--twist", default=d, help="comma-separated generator images, each 'id' or 'conj'"
    )
    return p


def build_parser() -> argparse.ArgumentParser:
    sub_globals = _globals_parser(suppress=True)
    p = argparse.ArgumentParser(
        prog="malcev",
        description="Exact Mal'cev-Neumann series and cyclic algebra workbench.",
        parents=[_globals_parser(suppress=False)],
    )
    sp = p.add_subparsers(dest="command", required=True)

    s = sp.add_parser("order", parents=[sub_globals], help="compare two words in the Magnus order")
    s.add_argument("u")
    s.add_argument("w")

    for name, help_ in (("eval", "evaluate a series expression"), ("invert", "invert a series")):
        s = sp.add_parser(name, parents=[sub_globals], help=help_)
        s.add_argument("expr")
        s.add_argument("--depth", type=int)

    s = sp.add_parser("probe-selfinv", parents=[sub_globals], help="self-invariance probe")
    s.add_argument("--h", required=True)
    s.add_argument("--gamma", required=True)
    s.add_argument("--lmin", type=int, default=-3)
    s.add_argument("--lmax", type=int, default=3)

    s = sp.add_parser("chain", parents=[sub_globals], help="subnormal chain evidence")
    s.add_argument("--g", required=True)
    s.add_argument("--depth", type=int, required=True)
    s.add_argument("--ball", type=int, required=True)
    s.add_argument("--samples", type=int, default=200)

    s = sp.add_parser("cyclic", parents=[sub_globals], help="cyclic algebra reports")
    s.add_argument("--preset", choices=sorted(ca.PRESETS))
    acts = s.add_subparsers(dest="action", required=True)
    acts.add_parser("report", parents=[sub_globals])
    for name in ("selfinv", "autocomm"):
        a = acts.add_parser(name, parents=[sub_globals])
        a.add_argument("gen")
    a = acts.add_parser("span", parents=[sub_globals])
    a.add_argument("gen")
    a.add_argument("xelt")
    return p


def run(argv: list[str] | None = None, env: dict[str, str] | None = None) -> tuple[int, str, str]:
    """Run one command; returns ``(exit code, stdout, stderr)``."""
    env = dict(os.environ) if env is None else env
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_USAGE if exc.code else EXIT_OK), "", ""
    flags = {
        "format": getattr(args, "format", None),
        "seed": getattr(args, "seed", None),
        "rank": getattr(args, "rank", None),
        "field_d": getattr(args, "field_d", None),
        "twist": tuple(args.twist.split(",")) if getattr(args, "twist", None) else None,
    }
    try:
        cfg = load_config(getattr(args, "config", None), env, flags)
        status, verdict, inputs, result = COMMANDS[args.command](args, cfg)
    except (UsageError, ParseError, ZeroSeriesError, IndeterminateValuation, FieldMismatch) as exc:
        return EXIT_USAGE, "", f"error: {exc}\n"
    except ValueError as exc:
        return EXIT_USAGE, "", f"error: {exc}\n"
    except (MagnusCapExceeded, ResourceCapExceeded, ca.GaloisSearchExhausted) as exc:
        return EXIT_CAP, "", f"resource cap: {exc}\n"
    except (AssertionError, ca.NotInvertible) as exc:
        return EXIT_VIOLATION, "", f"inconsistency: {exc}\n"
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "config": _config_json(cfg),
        "input": inputs,
        "verdict": verdict,
        "exit_code": status,
        "result": result,
    }
    return status, render(report, cfg.format), ""


def _config_json(cfg: SessionConfig) -> dict:
    d = asdict(cfg)
    d.pop("format")
    d["twist"] = list(cfg.twist) if cfg.twist else None
    return d


def main(argv: list[str] | None = None) -> int:
    status, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return status


if __name__ == "__main__":
    sys.exit(main())
