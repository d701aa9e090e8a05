"""Command-line runner: ``python -m riesz_bounds run config.json``.

Exit codes: 0 all checks pass, 1 input error, 2 an inequality is violated.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import bounds as bd
from . import geometry as geo
from . import spectra as sp
from . import verify as vf
from .riesz import riesz_mean

OUT_ENV = "RIESZ_BOUNDS_OUT"

JOB_KINDS = ("spectrum", "bound", "harness", "figure1", "appendix", "geometry")
TOP_FIELDS = {"job", "domain", "sigma", "lambda", "bounds", "params", "eval", "output", "spectrum", "label"}
LAMBDA_FIELDS = {"min", "max", "count", "spacing"}
SPECTRUM_FIELDS = {"lambda_max", "h", "count"}
PARAM_FIELDS = {"u", "R", "c_sq", "m_d"}
EVAL_FIELDS = {f.name for f in fields(geo.EvalConfig)}


class ConfigError(ValueError):
    def __init__(self, field, message):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


# ---------------------------------------------------------------------------
# Output helpers


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def emit_svg(series, path=None, title: str = "") -> str:
    """Line plot of (x, y) pairs as a standalone SVG (800x500 viewBox).

    Returns the document; writes it to ``path`` when given.  Output bytes
    depend only on the input.
    """
    W, H, ml, mr, mt, mb = 800, 500, 70, 20, 30, 50
    pts = [(float(x), float(y)) for x, y in series]
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<line x1="{ml}" y1="{H - mb}" x2="{W - mr}" y2="{H - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{H - mb}" stroke="black"/>',
    ]
    if title:
        lines.append(f'<text x="{W / 2:.0f}" y="20" text-anchor="middle" font-size="14">{title}</text>')
    if pts:
        xs = np.array([p[0] for p in pts])
        ys = np.array([p[1] for p in pts])
        x0, x1 = float(xs.min()), float(xs.max())
        y0, y1 = float(min(ys.min(), 0.0)), float(ys.max())
        x1 = x1 if x1 > x0 else x0 + 1.0
        y1 = y1 if y1 > y0 else y0 + 1.0
        sx = lambda x: ml + (x - x0) / (x1 - x0) * (W - ml - mr)
        sy = lambda y: H - mb - (y - y0) / (y1 - y0) * (H - mt - mb)
        poly = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
        lines.append(f'<polyline fill="none" stroke="#1f4e9c" stroke-width="1" points="{poly}"/>')
        for label, x, y in ((f"x = {x0:.6g}", x0, y0), (f"x = {x1:.6g}", x1, y0)):
            lines.append(f'<text x="{sx(x):.2f}" y="{H - mb + 18}" text-anchor="middle" font-size="12">{label}</text>')
        for label, y in ((f"{y0:.6g}", y0), (f"{y1:.6g}", y1)):
            lines.append(f'<text x="{ml - 6}" y="{sy(y) + 4:.2f}" text-anchor="end" font-size="12">{label}</text>')
        i_min, i_max = int(np.argmin(ys)), int(np.argmax(ys))
        for tag, i, color in (("min", i_min, "#b22222"), ("max", i_max, "#228b22")):
            cx, cy = sx(xs[i]), sy(ys[i])
            lines.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="{color}"/>')
            lines.append(f'<text x="{cx + 5:.2f}" y="{cy - 5:.2f}" font-size="11" fill="{color}">'
                         f'{tag} {ys[i]:.6g} at {xs[i]:.6g}</text>')
    lines.append("</svg>")
    doc = "\n".join(lines) + "\n"
    if path is not None:
        _atomic_write(Path(path), doc)
    return doc


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# ---------------------------------------------------------------------------
# Config parsing


def _reject_unknown(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(where, "must be a JSON object")
    extra = sorted(set(obj) - allowed)
    if extra:
        raise ConfigError(f"{where}.{extra[0]}" if where else extra[0], "unknown field")


def _number(obj, key, where, positive=False, integer=False):
    if key not in obj:
        raise ConfigError(f"{where}.{key}", "missing")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"{where}.{key}", f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(f"{where}.{key}", f"expected an integer, got {v!r}")
    if positive and not v > 0:
        raise ConfigError(f"{where}.{key}", f"must be positive, got {v!r}")
    return int(v) if integer else float(v)


def parse_config(cfg: dict, seed=None):
    _reject_unknown(cfg, TOP_FIELDS, "")
    job = cfg.get("job")
    if job not in JOB_KINDS:
        raise ConfigError("job", f"must be one of {', '.join(JOB_KINDS)}")
    out = {"job": job, "output": cfg.get("output", ""), "label": cfg.get("label", "")}
    if not isinstance(out["output"], str):
        raise ConfigError("output", "must be a string prefix")

    ev = dict(cfg.get("eval", {}))
    _reject_unknown(ev, EVAL_FIELDS, "eval")
    if seed is not None:
        ev["seed"] = seed
    try:
        out["eval"] = geo.EvalConfig(**ev)
    except (TypeError, ValueError) as exc:
        raise ConfigError("eval", str(exc)) from None

    if "domain" in cfg:
        try:
            out["domain"] = geo.domain_from_json(cfg["domain"])
        except (geo.DomainError, TypeError, ValueError) as exc:
            raise ConfigError("domain", str(exc)) from None
    elif job in ("spectrum", "bound", "harness", "geometry"):
        raise ConfigError("domain", "missing")

    sig = cfg.get("sigma", [1.5])
    sig = sig if isinstance(sig, list) else [sig]
    for s in sig:
        if isinstance(s, bool) or not isinstance(s, (int, float)) or s < 0:
            raise ConfigError("sigma", f"expected nonnegative numbers, got {s!r}")
    out["sigma"] = [float(s) for s in sig]

    if "lambda" in cfg:
        lg = cfg["lambda"]
        _reject_unknown(lg, LAMBDA_FIELDS, "lambda")
        lo = _number(lg, "min", "lambda", positive=True)
        hi = _number(lg, "max", "lambda", positive=True)
        count = _number(lg, "count", "lambda", positive=True, integer=True)
        spacing = lg.get("spacing", "log")
        if spacing not in ("log", "linear"):
            raise ConfigError("lambda.spacing", "must be 'log' or 'linear'")
        if hi < lo:
            raise ConfigError("lambda.max", "must be >= lambda.min")
        out["lambdas"] = vf.lambda_grid(lo, hi, count, spacing)
    elif job in ("bound", "harness"):
        raise ConfigError("lambda", "missing")

    params = cfg.get("params", {})
    _reject_unknown(params, PARAM_FIELDS, "params")
    out["params"] = params

    if job in ("bound", "harness"):
        dom = out["domain"]
        ids = cfg.get("bounds", vf.applicable_bounds(dom))
        if not isinstance(ids, list) or not ids:
            raise ConfigError("bounds", "must be a nonempty list of bound ids")
        for b in ids:
            if b not in bd.SIGMA_MIN:
                raise ConfigError("bounds", f"unknown bound id {b!r}")
            for s in out["sigma"]:
                try:
                    bd._need_sigma(b, s)
                except bd.SigmaError as exc:
                    raise ConfigError("sigma", str(exc)) from None
        out["bounds"] = ids
    elif "bounds" in cfg:
        raise ConfigError("bounds", f"not used by job {job!r}")

    if job == "spectrum":
        spec = cfg.get("spectrum", {})
        _reject_unknown(spec, SPECTRUM_FIELDS, "spectrum")
        dom = out["domain"]
        if isinstance(dom, geo.Polygon):
            out["h"] = _number(spec, "h", "spectrum", positive=True)
            out["count"] = _number(spec, "count", "spectrum", positive=True, integer=True)
        else:
            out["lambda_max"] = _number(spec, "lambda_max", "spectrum", positive=True)
    return out


# ---------------------------------------------------------------------------
# Jobs


def _harness_cases(job):
    dom = job["domain"]
    label = job["label"] or geo.domain_to_json(dom)["kind"]
    return [vf.HarnessCase(dom, b, s, tuple(job["lambdas"]), dict(job["params"]), label)
            for b in job["bounds"] for s in job["sigma"]]


def _lhs_spectrum(dom, lam_max):
    try:
        return sp.spectrum_for(dom, lam_max)
    except ValueError:
        return None


def run_job(job, jobs: int = 1):
    """Compute a job; returns ({filename: text}, exit_code, message)."""
    kind = job["job"]
    files = {}
    if kind == "spectrum":
        dom = job["domain"]
        if isinstance(dom, geo.Polygon):
            spec = sp.fd_spectrum(dom, job["h"], job["count"])
        else:
            spec = sp.spectrum_for(dom, job["lambda_max"])
        files["spectrum.csv"] = spec.to_csv()
        return files, 0, f"{len(spec)} eigenvalues"

    if kind == "figure1":
        s = vf.figure1()
        rep = vf.check_figure1()
        files["figure1.csv"] = "lambda,f\n" + "".join(f"{_fmt(x)},{_fmt(y)}\n" for x, y in zip(s.lam, s.f))
        files["figure1.svg"] = emit_svg(zip(s.lam, s.f), title="f(Lambda) on (0, pi), sigma = 1")
        files["figure1.json"] = json.dumps({"figure1": {"pass": rep.passed, "worst_margin": s.min_value,
                                                        "minima": [float(m) for m in s.minima]}},
                                           indent=2, sort_keys=True) + "\n"
        return files, 0 if rep.passed else 2, rep.line() + " " + rep.notes

    if kind == "appendix":
        reps = [vf.check_lemma_elementary()] + [vf.check_lemma_asympt(c) for c in (0.25, 1.0, 1 / 16)]
        summary = {r.check_id: {"pass": r.passed, "observed": r.observed, "expected": r.expected} for r in reps}
        files["appendix.json"] = json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n"
        ok = all(r.passed for r in reps)
        return files, 0 if ok else 2, "\n".join(r.line() for r in reps)

    if kind == "geometry":
        dom, cfg = job["domain"], job["eval"]
        g = geo.geom_stats(dom, cfg)
        doc = {"domain": geo.domain_to_json(dom), "volume": g.volume, "perimeter": g.perimeter,
               "width": g.width, "width_exact": g.width_exact, "second_moment": g.second_moment,
               "inradius": g.inradius}
        if "lambdas" in job:
            doc["m_lambda"] = [{"lambda": lam, "mean": m.mean, "stderr": m.stderr}
                               for lam in map(float, job["lambdas"])
                               for m in [geo.m_lambda(dom, lam, cfg)]]
        files["geometry.json"] = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        return files, 0, "geometry computed"

    if kind == "bound":
        dom, cfg = job["domain"], job["eval"]
        lam = job["lambdas"]
        spec = _lhs_spectrum(dom, float(max(lam)))
        ctx = vf._Context(cfg)
        reports = []
        for case in _harness_cases(job):
            for L in lam:
                rhs, err = vf._rhs(case, float(L), ctx)
                lhs = riesz_mean(spec, case.sigma, float(L)) if spec is not None else float("nan")
                reports.append(bd.BoundReport(case.bound_id, case.sigma, float(L), lhs, rhs, err))
        files["bounds.csv"] = vf.reports_to_csv(reports)
        return files, 0, f"{len(reports)} bound evaluations"

    # harness
    results = vf.run_harness(_harness_cases(job), job["eval"], jobs=jobs)
    reports = [r for _, rs in results for r in rs]
    summary = vf.harness_summary(results)
    files["harness.csv"] = vf.reports_to_csv(reports)
    files["summary.json"] = json.dumps(summary, indent=2, sort_keys=True) + "\n"
    ok = all(v["pass"] for v in summary.values())
    lines = [f"{'PASS' if v['pass'] else 'FAIL'} {k} worst_margin={v['worst_margin']:.6g}" for k, v in summary.items()]
    return files, 0 if ok else 2, "\n".join(lines)


def run(config_path, seed=None, out=None, jobs: int = 1) -> int:
    """Run one config file; returns the exit code."""
    try:
        with open(config_path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config {config_path}: {exc}", file=sys.stderr)
        return 1
    try:
        job = parse_config(raw, seed)
        files, code, message = run_job(job, jobs)
    except (ConfigError, vf.HarnessError, geo.DomainError, bd.SigmaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    out_dir = Path(out or os.environ.get(OUT_ENV) or ".")
    for name, text in files.items():
        _atomic_write(out_dir / f"{job['output']}{name}", text)
    print(message)
    return code


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="riesz_bounds", description="Riesz-mean bounds on Dirichlet spectra")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run a JSON job config")
    r.add_argument("config")
    r.add_argument("--seed", type=int, default=None, help="override eval.seed")
    r.add_argument("--out", default=None, help=f"output directory (default ${OUT_ENV} or .)")
    r.add_argument("--jobs", type=int, default=1, help="parallelism cap for harness jobs")
    args = ap.parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 1
    return run(args.config, args.seed, args.out, args.jobs)
