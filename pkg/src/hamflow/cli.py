"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 validation, 3 verification failure, 4 I/O.
Machine-readable results go to stdout; the fully resolved configuration and
logs go to stderr.  An optional plain-text config file ("key = value" per
line, keys matching flag names) supplies defaults that flags override.
"""

from __future__ import annotations

import argparse
import json
import sys

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_VERIFY = 3
EXIT_IO = 4


class _CliParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_config(path) -> dict:
    cfg = {}
    with open(path, encoding="utf-8") as f:
        for ln in f:
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise ValueError(f"bad config line: {ln!r}")
            key, val = (part.strip() for part in ln.split("=", 1))
            cfg[key.replace("-", "_")] = val
    return cfg


# defaults per subcommand; arguments themselves are declared with SUPPRESS so
# the merge order is: defaults < config file < explicit flags.
_DEFAULTS = {
    "card": {"basis": "b2", "delta": "d3", "trig": False},
    "enum": {"basis": "b2", "delta": "d3", "trig": False, "lo": 0, "hi": None},
    "field": {"ham": None, "json": False},
    "render": {"ham": None, "out": "render_out", "cloud": 0, "seed": 0,
               "resolution": 128, "png": True},
    "gen": {"basis": "b2", "delta": "d3", "trig": False, "seed": 0,
            "out": None, "limit": None, "shard": "0/1", "resolution": 128,
            "png": False, "workers": 1},
    "verify": {"dataset": None, "fraction": 0.05, "workers": 1},
    "dist": {"a": None, "b": None, "metric": "euclid"},
    "vocab": {"basis": "b2", "delta": "d3", "trig": False, "out": None},
    "score": {"dataset": None, "predictions": None},
}

_COERCE = {
    "trig": lambda v: str(v).lower() in ("1", "true", "yes"),
    "json": lambda v: str(v).lower() in ("1", "true", "yes"),
    "png": lambda v: str(v).lower() in ("1", "true", "yes"),
    "lo": int, "hi": lambda v: None if v in (None, "none") else int(v),
    "seed": int, "cloud": int, "resolution": int, "workers": int,
    "limit": lambda v: None if v in (None, "none") else int(v),
    "fraction": float,
}


def _build_parser() -> _CliParser:
    p = _CliParser(prog="hamflow", description=__doc__.splitlines()[0])
    p.add_argument("--config", help="plain-text key = value config file")
    sub = p.add_subparsers(dest="command", required=True)

    def sp(name, help_):
        s = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        return s

    s = sp("card", "print corpus cardinality")
    _basis_flags(s)

    s = sp("enum", "stream canonical strings for an index range")
    _basis_flags(s)
    s.add_argument("--lo", type=int)
    s.add_argument("--hi", type=int)

    s = sp("field", "print the Hamiltonian vector field of an expression")
    s.add_argument("--ham", required=True)
    s.add_argument("--json", action="store_true")

    s = sp("render", "render one Hamiltonian over a chosen cloud")
    s.add_argument("--ham", required=True)
    s.add_argument("--out")
    s.add_argument("--cloud", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--resolution", type=int)
    s.add_argument("--no-png", dest="png", action="store_false")

    s = sp("gen", "generate a dataset")
    _basis_flags(s)
    s.add_argument("--seed", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--limit", type=int)
    s.add_argument("--shard", help="k/m index-range shard")
    s.add_argument("--resolution", type=int)
    s.add_argument("--png", action="store_true")
    s.add_argument("--workers", type=int)

    s = sp("verify", "re-derive and byte-compare a dataset")
    s.add_argument("--dataset", required=True)
    s.add_argument("--fraction", type=float)
    s.add_argument("--workers", type=int)

    s = sp("dist", "distance between two corpus functions")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--metric", choices=["euclid", "jaccard", "levenshtein"])

    s = sp("vocab", "write the token vocabulary as JSON")
    _basis_flags(s)
    s.add_argument("--out")

    s = sp("score", "score a predictions file against a dataset")
    s.add_argument("--dataset", required=True)
    s.add_argument("--predictions", required=True)
    return p


def _basis_flags(s):
    s.add_argument("--basis", help="b1..b5")
    s.add_argument("--delta", help="d3|d5|d7|d9")
    s.add_argument("--trig", action="store_true")


def _resolve(args) -> dict:
    cmd = args.command
    cfg = dict(_DEFAULTS[cmd])
    if getattr(args, "config", None):
        file_cfg = _read_config(args.config)
        for k, v in file_cfg.items():
            if k in cfg:
                cfg[k] = _COERCE.get(k, str)(v)
    for k, v in vars(args).items():
        if k in ("command", "config"):
            continue
        cfg[k] = v
    print(f"config: {cmd} {json.dumps(cfg, default=str)}", file=sys.stderr)
    return cfg


def _spec(cfg):
    from .corpus import BasisSpec
    return BasisSpec.from_names(cfg["basis"], cfg["delta"], cfg["trig"])


def _cmd_card(cfg):
    from .corpus import cardinality
    print(cardinality(_spec(cfg)))
    return EXIT_OK


def _cmd_enum(cfg):
    from .corpus import cardinality, enumerate_range
    spec = _spec(cfg)
    hi = cfg["hi"] if cfg["hi"] is not None else cardinality(spec)
    for f in enumerate_range(spec, cfg["lo"], hi):
        print(f)
    return EXIT_OK


def _cmd_field(cfg):
    from .expr import parse_expr, print_expr
    from .field import hamiltonian_field
    X = hamiltonian_field(parse_expr(cfg["ham"]))
    if cfg["json"]:
        print(json.dumps({"dx": print_expr(X.dx), "dy": print_expr(X.dy)}))
    else:
        print(f"dx: {print_expr(X.dx)}")
        print(f"dy: {print_expr(X.dy)}")
    return EXIT_OK


def _cmd_render(cfg):
    from .cloud import canonical_cloud, random_cloud
    from .expr import parse_expr
    from .field import eval_field, hamiltonian_field
    from .raster import RenderConfig, export_png, export_tensor, render
    X = hamiltonian_field(parse_expr(cfg["ham"]))
    cloud = (canonical_cloud() if cfg["cloud"] == 0
             else random_cloud(cfg["seed"], cfg["cloud"]))
    raster = render(eval_field(X, cloud), X,
                    RenderConfig(resolution=cfg["resolution"]))
    export_tensor(raster, f"{cfg['out']}.symf")
    written = [f"{cfg['out']}.symf"]
    if cfg["png"]:
        written += export_png(raster, cfg["out"])
    print(json.dumps({"written": written}))
    return EXIT_OK


def _cmd_gen(cfg):
    from .datakit import GenerateOptions, generate
    k, m = (int(part) for part in str(cfg["shard"]).split("/"))
    opts = GenerateOptions(limit=cfg["limit"], shard=(k, m),
                           resolution=cfg["resolution"], png=cfg["png"],
                           workers=cfg["workers"])
    meta = generate(_spec(cfg), cfg["seed"], cfg["out"], opts)
    print(json.dumps(meta["counts"]))
    return EXIT_OK


def _cmd_verify(cfg):
    from .datakit import verify
    report = verify(cfg["dataset"], cfg["fraction"])
    print(json.dumps({"ok": report.ok, "records": report.n_records,
                      "checked": report.n_checked, "errors": report.errors}))
    return EXIT_OK if report.ok else EXIT_VERIFY


def _cmd_dist(cfg):
    import math
    from .expr import parse_ham, parse_term_sequence
    from .tokens import distance_jaccard, distance_levenshtein
    if cfg["metric"] == "levenshtein":
        # order-sensitive: tokens in the order written
        print(distance_levenshtein(parse_term_sequence(cfg["a"]),
                                   parse_term_sequence(cfg["b"])))
        return EXIT_OK
    fa = parse_ham(cfg["a"])
    fb = parse_ham(cfg["b"])
    if cfg["metric"] == "euclid":
        # multi-hot euclid distance is vocabulary independent:
        # sqrt(|symmetric difference of token sets|)
        print(repr(math.sqrt(len(set(fa.terms) ^ set(fb.terms)))))
    else:
        print(repr(distance_jaccard(fa.terms, fb.terms)))
    return EXIT_OK


def _cmd_vocab(cfg):
    from .tokens import build_vocab
    vocab = build_vocab(_spec(cfg))
    if cfg["out"]:
        vocab.save(cfg["out"])
        print(json.dumps({"written": cfg["out"], "size": vocab.size}))
    else:
        print(json.dumps(vocab.to_json()))
    return EXIT_OK


def _cmd_score(cfg):
    from .datakit import score_predictions
    print(json.dumps(score_predictions(cfg["dataset"], cfg["predictions"])))
    return EXIT_OK


_HANDLERS = {
    "card": _cmd_card, "enum": _cmd_enum, "field": _cmd_field,
    "render": _cmd_render, "gen": _cmd_gen, "verify": _cmd_verify,
    "dist": _cmd_dist, "vocab": _cmd_vocab, "score": _cmd_score,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        return _HANDLERS[args.command](cfg)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, IndexError, KeyError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
