"""Command-line driver: kronhall classify | check | table | calibrate | interpolate."""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import calibrate as cal
from . import kronrep as kr
from . import verify
from .cache import HallNumberStore
from .exactfield import SUPPORTED_PRIMES
from .expr import ExpressionError, builder, evaluate
from .hall import DEFAULT_CONVENTION, TwistConvention
from .kronrep import KronRep, MAX_TOTAL_DIM, PLUS

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    q_list: tuple
    max_dim: int
    convention: TwistConvention
    cache_dir: Path | None
    fmt: str
    jobs: int


def _parse_q(text: str) -> tuple:
    try:
        qs = tuple(sorted({int(x) for x in text.split(",") if x.strip()}))
    except ValueError:
        raise click.BadParameter(f"not a comma-separated list of primes: {text!r}")
    bad = [x for x in qs if x not in SUPPORTED_PRIMES]
    if bad or not qs:
        raise click.BadParameter(f"q must be drawn from {sorted(SUPPORTED_PRIMES)}")
    return qs


def _load_convention(choice: str, cache_dir) -> TwistConvention:
    if choice == "default":
        return DEFAULT_CONVENTION
    if choice == "calibrate":
        res = cal.load_calibration(cache_dir) if cache_dir else None
        if res is None:
            res = cal.calibrate((2, 3), cache_dir=cache_dir)
        return cal.select(res)
    path = Path(choice)
    if not path.exists():
        raise click.BadParameter(f"convention must be 'default', 'calibrate' or a JSON file: {choice!r}")
    obj = json.loads(path.read_text())
    if "conventions" in obj:
        obj = obj["conventions"][0]
    return TwistConvention.from_json(obj)


def _emit(cfg: RunConfig, payload, table_lines=None):
    if cfg.fmt == "json" or table_lines is None:
        click.echo(json.dumps(payload, indent=1, sort_keys=True))
    else:
        for line in table_lines:
            click.echo(line)


def _run_options(group: bool):
    """The run options, accepted both before and after the subcommand name."""
    def deco(fn):
        opts = [
            click.option("--q", "q_text", default="2" if group else None, show_default=group,
                         help="Comma-separated field sizes."),
            click.option("--max-dim", "--max", "max_dim", default=8 if group else None, show_default=group,
                         type=int, help="Bound on d0 + d1."),
            click.option("--convention", "conv_spec", default="default" if group else None, show_default=group,
                         help="'default', 'calibrate', or a TwistConvention JSON file."),
            click.option("--cache-dir", type=click.Path(file_okay=False), default=None,
                         help="Directory for Hall numbers and calibration results."),
            click.option("--format", "fmt", type=click.Choice(["json", "table"]),
                         default="json" if group else None, show_default=group),
            click.option("--jobs", default=1 if group else None, show_default=group, type=int,
                         help="Worker processes for check suites."),
        ]
        for opt in reversed(opts):
            fn = opt(fn)
        return fn
    return deco


@click.group()
@_run_options(group=True)
@click.pass_context
def main(ctx, **opts):
    """Exact computations in the Hall algebra of the Kronecker quiver."""
    ctx.obj = opts


def _config(ctx, overrides: dict) -> RunConfig:
    """Merge group-level options with those given after the subcommand."""
    opts = dict(ctx.obj or {})
    opts.update({k: v for k, v in overrides.items() if v is not None})
    max_dim = opts["max_dim"]
    if max_dim > MAX_TOTAL_DIM or max_dim < 1:
        raise click.BadParameter(f"--max-dim must lie in [1, {MAX_TOTAL_DIM}]")
    cache_dir = Path(opts["cache_dir"]) if opts["cache_dir"] else None
    if cache_dir:
        verify.set_store(HallNumberStore(cache_dir / "hall"))
    convention = _load_convention(opts["conv_spec"], cache_dir)
    return RunConfig(_parse_q(opts["q_text"]), max_dim, convention, cache_dir, opts["fmt"], opts["jobs"])


def _flush():
    if verify._STORE is not None:
        verify._STORE.flush()


# classify

def _read_rep(path: str) -> KronRep:
    try:
        obj = json.loads(Path(path).read_text())
        q = int(obj["q"])
        d0, d1 = (int(x) for x in obj["dims"])
        orientation = obj.get("orientation", PLUS)
        return KronRep.make(q, (d0, d1), obj["x1"], obj["x2"], orientation)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise click.UsageError(f"cannot read representation from {path}: {exc}")


@main.command()
@click.argument("matrices", type=click.Path(dir_okay=False))
@_run_options(group=False)
@click.pass_context
def classify(ctx, matrices, **opts):
    """Isomorphism class of the pair of matrices in MATRICES (JSON: q, dims, x1, x2)."""
    cfg = _config(ctx, opts)
    x = _read_rep(matrices)
    c = kr.classify(x)
    _emit(cfg, c.to_json(), [repr(c)])


# check

CHECKS = {
    "serre": (("i",), lambda a, q, conv: verify.check_serre(a["i"], q, conv)),
    "relation": (("n",), lambda a, q, conv: verify.check_relation(a["n"], q, conv)),
    "ptilde": (("n",), lambda a, q, conv: verify.check_ptilde(a["n"], q, conv)),
    "pseries": (("n",), lambda a, q, conv: verify.check_pseries(a["n"], q, conv)),
    "corollary4": (("k", "l"), lambda a, q, conv: verify.check_corollary4(a["k"], a["l"], q, conv)),
    "lemma_comm": (("r", "s"), lambda a, q, conv: verify.check_lemma_comm(a["r"], a["s"], q, conv)),
    "drinfeld": (("rel", "r", "s"), lambda a, q, conv: verify.check_drinfeld(
        a["rel"], (a["s"], a["r"]) if a["rel"] in (1, 2) else (a["r"], a["s"]), q, conv)),
    "q_identity": (("m",), lambda a, q, conv: verify.check_q_identity(a["m"], q)),
    "kostka": (("lambda",), lambda a, q, conv: verify.check_kostka(a["lambda"], q, conv)),
    "coproduct_rho": (("k",), lambda a, q, conv: verify.check_coproduct_rho(a["k"], q, conv)),
    "projection": (("n",), lambda a, q, conv: verify.check_projection(a["n"], q, conv)),
    "regular_expressibility": (("n",), lambda a, q, conv: verify.check_regular_expressibility(a["n"], q, conv)),
    "tau": (("k",), lambda a, q, conv: verify.check_tau_invariance(a["k"], q, conv)),
    "counting": (("n",), lambda a, q, conv: verify.check_counting(a["n"], q)),
    "homs": ((), lambda a, q, conv: verify.check_hom_vanishing(q)),
    "exts": ((), lambda a, q, conv: verify.check_ext_vanishing(q)),
}


def _report_line(rep: verify.CheckReport) -> str:
    params = " ".join(f"{k}={v}" for k, v in rep.params.items())
    status = "PASS" if rep.passed else "FAIL"
    tail = f"  ({rep.note})" if rep.note else ""
    return f"{status}  {rep.id:<24} q={rep.q} {params}{tail}"


@main.command()
@click.argument("suite_id", required=False)
@click.option("--suite", "suite_opt", default=None, help="Same as the positional SUITE_ID.")
@click.option("--n", type=int)
@click.option("--k", type=int)
@click.option("--l", type=int)
@click.option("--r", type=int)
@click.option("--s", type=int)
@click.option("--m", type=int)
@click.option("--i", type=int)
@click.option("--rel", type=int)
@click.option("--lambda", "lam", default=None, help="Partition, e.g. 2,1.")
@_run_options(group=False)
@click.pass_context
def check(ctx, suite_id, suite_opt, n, k, l, r, s, m, i, rel, lam, **opts):
    """Run one identity check (e.g. `check relation --n 3`) or the whole suite (`check all`)."""
    cfg = _config(ctx, opts)
    params = dict(n=n, k=k, l=l, r=r, s=s, m=m, i=i, rel=rel, lam=lam)
    sid = suite_id or suite_opt
    if sid is None:
        raise click.UsageError("name a check or 'all'")
    if sid == "all":
        half = cfg.max_dim // 2
        jobs = verify.suite(cfg.q_list, max_grade=(half, half), convention=cfg.convention)
        reports = verify.run_jobs(jobs, cfg.jobs)
    else:
        if sid not in CHECKS:
            raise click.UsageError(f"unknown check {sid!r}; choose from all, {', '.join(sorted(CHECKS))}")
        needed, fn = CHECKS[sid]
        args = dict(params)
        if params.get("lam"):
            try:
                args["lambda"] = tuple(int(x) for x in params["lam"].split(","))
            except ValueError:
                raise click.UsageError(f"bad partition {params['lam']!r}")
        missing = [p for p in needed if args.get(p) is None]
        if missing:
            raise click.UsageError(f"check {sid} needs --{' --'.join(missing)}")
        try:
            reports = [fn(args, q, cfg.convention) for q in cfg.q_list]
        except ValueError as exc:
            raise click.UsageError(str(exc))
    _flush()
    payload = [r.to_json() for r in reports]
    _emit(cfg, payload, [_report_line(r) for r in reports])
    sys.exit(EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL)


# table / interpolate

def _expression(text: str):
    try:
        return builder(text)
    except ExpressionError as exc:
        raise click.UsageError(str(exc))


@main.command()
@click.argument("expression", nargs=-1, required=True)
@_run_options(group=False)
@click.pass_context
def table(ctx, expression, **opts):
    """Class/coefficient table of an element expression, e.g. `table rho 2`."""
    cfg = _config(ctx, opts)
    text = " ".join(expression)
    _expression(text)
    payload, lines = [], []
    for q in cfg.q_list:
        g = verify.context(q, cfg.convention)
        try:
            f = evaluate(text, g)
        except ExpressionError as exc:
            raise click.UsageError(str(exc))
        rows = [{"class": c.to_json(), "coefficient": f.coeffs[c].to_json()} for c in f.support()]
        payload.append({"q": q, "expression": text, "convention": cfg.convention.hash, "rows": rows})
        lines.append(f"# {text}  q={q}")
        lines += [f"{c!r:<48} {f.coeffs[c]!r}" for c in f.support()]
    _flush()
    _emit(cfg, payload, lines)


@main.command()
@click.argument("expression", nargs=-1, required=True)
@click.option("--degree", default=12, show_default=True, type=int, help="Bound on |exponent of q|.")
@_run_options(group=False)
@click.pass_context
def interpolate(ctx, expression, degree, **opts):
    """Fit each coefficient of an expression as a Laurent polynomial in v across --q."""
    cfg = _config(ctx, opts)
    text = " ".join(expression)
    build = _expression(text)
    try:
        res = verify.interpolate_constants(build, cfg.q_list, degree, cfg.convention)
    except ExpressionError as exc:
        raise click.UsageError(str(exc))
    _flush()
    lines = [f"{verify._type_json(t)}  ->  {f}" for t, f in res.fits.items()]
    lines += [f"{verify._type_json(t)}  ->  FAILED: {why}" for t, why in res.failures.items()]
    _emit(cfg, res.to_json() | {"expression": text}, lines)
    sys.exit(EXIT_OK if res.ok else EXIT_FAIL)


@main.command(name="calibrate")
@click.option("--anchors", default=",".join(cal.DEFAULT_ANCHORS), show_default=True)
@click.option("--no-coproduct", is_flag=True, help="Skip the coproduct twist search.")
@_run_options(group=False)
@click.pass_context
def calibrate_cmd(ctx, anchors, no_coproduct, **opts):
    """Search the convention space against the anchor identities."""
    cfg = _config(ctx, dict(opts, conv_spec=None))
    names = tuple(a.strip() for a in anchors.split(",") if a.strip())
    try:
        res = cal.calibrate(cfg.q_list, names, cfg.cache_dir, with_coproduct=not no_coproduct)
    except cal.NoConventionFound as exc:
        _emit(cfg, {"error": str(exc), "report": exc.report})
        sys.exit(EXIT_FAIL)
    except ValueError as exc:
        raise click.UsageError(str(exc))
    lines = [f"{c.hash}  {json.dumps(c.to_json(), sort_keys=True)}" for c in res.conventions]
    _emit(cfg, res.to_json(), lines)


if __name__ == "__main__":  # pragma: no cover
    main()
