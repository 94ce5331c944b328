"""Command-line interface.

Usage:
    bigramsey degrees --class linear-order --max-size 4
    bigramsey types --class rado -n 2
    bigramsey tree --class g3 --depth 6 --prefix random
    bigramsey lab --theorem ramsey --params N=6,k=2,r=2,target=3
    bigramsey verify --quick

Exit codes: 0 success, 1 configuration error, 2 unsupported or flagged
result, 3 inconclusive (budget or witness search).
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field

import click

from . import __version__
from .errors import BigRamseyError, DomainError, Unsupported
from .structures import NAMED_CLASSES, ClassSpec, class_from_dict, class_name, class_to_dict

EXIT_OK, EXIT_CONFIG, EXIT_FLAGGED, EXIT_INCONCLUSIVE = 0, 1, 2, 3

CONFIG_KEYS = {"class", "format", "seed", "budget", "depth", "max_size", "n", "quick", "jobs"}
FORMATS = ("csv", "json", "text")


class ConfigError(click.ClickException):
    exit_code = EXIT_CONFIG


@dataclass
class RunConfig:
    spec: ClassSpec | None = None
    format: str = "text"
    seed: int = 0
    budget: int | None = None
    depth: int | None = None
    max_size: int | None = None
    n: int | None = None
    quick: bool = False
    jobs: int = 1
    source: dict = field(default_factory=dict)

    def digest(self) -> str:
        doc = {k: v for k, v in self.source.items() if v is not None}
        raw = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(raw.encode()).hexdigest()[:12]


def _fail(where: str, msg: str):
    raise ConfigError(f"{where}: {msg}")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        _fail(path, f"cannot read ({exc.strerror})")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        _fail(f"{path}:{exc.lineno}:{exc.colno}", exc.msg)
    if not isinstance(doc, dict):
        _fail(path, "top level must be an object")
    for key in sorted(doc):
        if key not in CONFIG_KEYS:
            _fail(f"{path}: key '{key}'", "unknown key")
    return doc


def resolve(config_path: str | None, cli: dict) -> RunConfig:
    """Merge the config document with command-line values (the latter win)."""
    doc = load_config(config_path)
    where = config_path or "command line"
    merged = dict(doc)
    for k, v in cli.items():
        if v is not None:
            merged[k] = v
    cfg = RunConfig()
    cls = merged.get("class")
    if cls is not None:
        try:
            if isinstance(cls, str):
                if cls not in NAMED_CLASSES:
                    _fail(f"{where}: key 'class'", f"unknown class {cls!r} (known: {', '.join(NAMED_CLASSES)})")
                cfg.spec = NAMED_CLASSES[cls]()
            elif isinstance(cls, dict):
                cfg.spec = class_from_dict(cls)
            else:
                _fail(f"{where}: key 'class'", "expected a name or an object")
        except (BigRamseyError, KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, click.ClickException):
                raise
            _fail(f"{where}: key 'class'", str(exc))
    for key, typ in (("seed", int), ("budget", int), ("depth", int), ("max_size", int),
                     ("n", int), ("jobs", int)):
        if key in merged and merged[key] is not None:
            if not isinstance(merged[key], int) or isinstance(merged[key], bool):
                _fail(f"{where}: key '{key}'", "expected an integer")
            setattr(cfg, key, merged[key])
    if "format" in merged:
        if merged["format"] not in FORMATS:
            _fail(f"{where}: key 'format'", f"expected one of {', '.join(FORMATS)}")
        cfg.format = merged["format"]
    if "quick" in merged:
        if not isinstance(merged["quick"], bool):
            _fail(f"{where}: key 'quick'", "expected true or false")
        cfg.quick = merged["quick"]
    if cfg.jobs < 1:
        _fail(f"{where}: key 'jobs'", "must be at least 1")
    src = dict(merged)
    if cfg.spec is not None:
        src["class"] = class_to_dict(cfg.spec)
    cfg.source = src
    return cfg


def header(cfg: RunConfig, command: str, **extra) -> dict:
    out = {"tool": "bigramsey", "version": __version__, "command": command,
           "config": cfg.digest(), "seed": cfg.seed}
    if cfg.spec is not None:
        out["class"] = class_name(cfg.spec)
    out.update({k: v for k, v in extra.items() if v is not None})
    return out


def header_lines(h: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in h.items())


def emit(cfg: RunConfig, h: dict, text: str, payload=None) -> None:
    if cfg.format == "json":
        doc = {"header": h, "data": payload if payload is not None else text.splitlines()}
        click.echo(json.dumps(doc, indent=2, sort_keys=True))
    else:
        click.echo(header_lines(h) + text, nl=False)


def _need_spec(cfg: RunConfig) -> ClassSpec:
    if cfg.spec is None:
        raise ConfigError("no class given: use --class NAME or a config with a 'class' key")
    return cfg.spec


common = [
    click.option("--class", "class_", help="Named class: " + ", ".join(NAMED_CLASSES)),
    click.option("--config", "config", type=click.Path(dir_okay=False), help="JSON run configuration."),
    click.option("--format", "fmt", type=click.Choice(FORMATS), default=None),
    click.option("--seed", type=int, default=None),
]


def with_common(fn):
    for opt in reversed(common):
        fn = opt(fn)
    return fn


@click.group()
@click.version_option(__version__, prog_name="bigramsey")
def cli():
    """Big Ramsey degrees of small homogeneous structures."""


@cli.command()
@with_common
@click.option("--max-size", type=int, default=None)
@click.option("--quick", is_flag=True, default=None, help="Skip scans deeper than 8.")
@click.option("--jobs", type=int, default=None, help="Worker processes (default 1).")
def degrees(class_, config, fmt, seed, max_size, quick, jobs):
    """Degree table for every target up to --max-size."""
    from .degrees import degree_table
    cfg = resolve(config, {"class": class_, "format": fmt, "seed": seed, "max_size": max_size,
                           "quick": quick or None, "jobs": jobs})
    spec = _need_spec(cfg)
    size = cfg.max_size if cfg.max_size is not None else 2
    table = degree_table([spec], size, quick=cfg.quick, jobs=cfg.jobs)
    h = header(cfg, "degrees", max_size=size, quick=cfg.quick)
    if cfg.format == "json":
        emit(cfg, h, "", json.loads(table.to_json()))
    else:
        emit(cfg, h, table.to_csv() if cfg.format == "csv" else table.to_text())
    return {"ok": EXIT_OK, "inconclusive": EXIT_INCONCLUSIVE}.get(table.status, EXIT_FLAGGED)


@cli.command()
@with_common
@click.option("-n", "n", type=int, default=None, help="Number of coded vertices.")
def types(class_, config, fmt, seed, n):
    """Catalog of similarity types for every target with n vertices."""
    from .similarity import enumerate_types
    from .structures import iso_classes
    cfg = resolve(config, {"class": class_, "format": fmt, "seed": seed, "n": n})
    spec = _need_spec(cfg)
    n = cfg.n if cfg.n is not None else 2
    if n < 1:
        raise ConfigError("n must be at least 1")
    lines, payload, inconclusive = [], [], False
    try:
        for target in iso_classes(spec.members(n)):
            cat = enumerate_types(spec, target)
            inconclusive |= bool(cat.inconclusive)
            for e in cat.entries:
                lines.append(e.line())
                payload.append(e.line().split("\t"))
    except Unsupported as exc:
        click.echo(f"unsupported: {exc}", err=True)
        return EXIT_FLAGGED
    emit(cfg, header(cfg, "types", n=n), "".join(l + "\n" for l in lines), payload)
    return EXIT_INCONCLUSIVE if inconclusive else EXIT_OK


@cli.command()
@with_common
@click.option("--depth", type=int, default=None)
@click.option("--prefix", "prefix_kind", type=click.Choice(["reference", "kronecker", "random"]),
              default="reference", show_default=True)
def tree(class_, config, fmt, seed, depth, prefix_kind):
    """Dump the coding tree of 1-types of a prefix."""
    from .limit import build_prefix, kronecker_prefix, random_prefix
    from .structures import LinearOrder
    from .trees import build_coding_tree
    cfg = resolve(config, {"class": class_, "format": fmt, "seed": seed, "depth": depth})
    spec = _need_spec(cfg)
    d = cfg.depth if cfg.depth is not None else 5
    if d < 0:
        raise ConfigError("depth must be non-negative")
    if prefix_kind == "kronecker":
        if not isinstance(spec, LinearOrder):
            raise ConfigError("the kronecker prefix is only defined for linear-order")
        prefix = kronecker_prefix(d + 1)
    elif prefix_kind == "random":
        prefix = random_prefix(spec, d + 1, cfg.seed)
    else:
        prefix = build_prefix(spec, d + 1)
    dump = build_coding_tree(prefix, d).dump()
    emit(cfg, header(cfg, "tree", depth=d, prefix=prefix_kind), dump)
    return EXIT_OK


def _parse_params(text: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ConfigError(f"--params: expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            raise ConfigError(f"--params: {k.strip()} is not an integer") from None
    return out


LAB_PARAMS = {
    "ramsey": ("N", "k", "r", "target"),
    "hl": ("m", "r", "N"),
    "milliken": ("k", "r", "N", "height"),
}


@cli.command()
@click.option("--theorem", type=click.Choice(sorted(LAB_PARAMS)), required=True)
@click.option("--params", default="", help="Comma separated key=value integers.")
@click.option("--budget", type=int, default=None, help="Search node budget (env BIGDEG_BUDGET).")
@click.option("--emit-witness", type=click.Path(dir_okay=False), default=None)
@click.option("--config", "config", type=click.Path(dir_okay=False), default=None)
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None)
def lab(theorem, params, budget, emit_witness, config, fmt):
    """Exhaustive finite instances of the partition theorems."""
    from . import lab as L
    cfg = resolve(config, {"budget": budget, "format": fmt})
    p = _parse_params(params)
    allowed = LAB_PARAMS[theorem]
    for k in p:
        if k not in allowed:
            raise ConfigError(f"--params: unknown key {k!r} for {theorem} (expected {', '.join(allowed)})")
    try:
        if theorem == "ramsey":
            rep = L.ramsey_check(p.get("N", 6), p.get("k", 2), p.get("r", 2), p.get("target", 3), cfg.budget)
        elif theorem == "hl":
            rep = L.hl_finite(p.get("m", 2), p.get("r", 2), p.get("N", 3), cfg.budget)
        else:
            rep = L.milliken_finite(p.get("k", 1), p.get("r", 2), p.get("N", 2), p.get("height"), cfg.budget)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    h = header(cfg, "lab", theorem=theorem, budget=cfg.budget)
    h.pop("seed")
    doc = rep.to_dict()
    if emit_witness and rep.coloring is not None:
        with open(emit_witness, "w", encoding="utf-8") as fh:
            fh.write(rep.to_json())
    if cfg.format == "json":
        emit(cfg, h, "", doc)
    else:
        stats = " ".join(f"{k}={v}" for k, v in sorted(rep.stats.items()))
        emit(cfg, h, f"{rep.verdict}\n{stats}\n")
    return EXIT_INCONCLUSIVE if rep.verdict == L.INCONCLUSIVE else EXIT_OK


@cli.command()
@click.option("--quick", is_flag=True, help="Skip scans deeper than 8.")
@click.option("--inject-fault", type=click.Choice(["c5"]), default=None,
              help="Perturb c_5 to check that failures are reported.")
@click.option("--seed", type=int, default=None)
@click.option("--config", "config", type=click.Path(dir_okay=False), default=None)
def verify(quick, inject_fault, seed, config):
    """Run the cross-check suite."""
    from .checks import FAIL, run_checks
    cfg = resolve(config, {"seed": seed, "quick": quick or None})
    results = run_checks(quick=cfg.quick, fault=inject_fault, seed=cfg.seed)
    h = header(cfg, "verify", quick=cfg.quick, fault=inject_fault)
    emit(cfg, h, "".join(r.line() + "\n" for r in results))
    return EXIT_FLAGGED if any(r.status == FAIL for r in results) else EXIT_OK


def main(argv=None) -> int:
    try:
        rv = cli.main(args=argv, prog_name="bigramsey", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_CONFIG
    except click.ClickException as exc:
        exc.show()
        return EXIT_CONFIG
    except Unsupported as exc:
        click.echo(f"unsupported: {exc}", err=True)
        return EXIT_FLAGGED
    except DomainError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_CONFIG
    return rv if isinstance(rv, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
