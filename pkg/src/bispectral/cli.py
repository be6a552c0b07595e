"""Command-line front end.

    bispectral pair     --example 9.3
    bispectral verify   --pair saved.json
    bispectral involute b --example 9.8 --nu 1/3 --a 2 --lambda 1
    bispectral spectral --spec conditions.json --max-order 12

Exit codes: 0 success, 2 invalid input or pipeline error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .darboux import (
    BispectralPair,
    DarbouxPlane,
    build_plane,
    complete_pair,
    involution_a,
    involution_b,
    involution_s,
    minimal_L,
    one_point_laws,
    rank_of,
    spectral_algebra,
)
from .diffop import op_to_latex, poly_to_json, poly_to_latex
from .errors import BispectralError, IdentityFailed, InvalidParameter, NotFound
from .examples import EXAMPLES, example_conditions, shipped_examples
from .field import qstr
from .kernelspace import ConditionSet
from .verify import verify_pair

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 2, 3

EXAMPLE_PARAMS = ("a", "b", "lambda", "nu", "alpha0", "alpha2", "N", "beta", "t", "t0", "t1", "s0", "s1",
                  "a0", "a1", "a2")


def threads() -> int:
    """Worker cap from DARBOUX_THREADS (default 1)."""
    raw = os.environ.get("DARBOUX_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidParameter("DARBOUX_THREADS must be an integer", value=raw)


# ---------------------------------------------------------------------------
# job description

@dataclass
class JobSpec:
    command: str
    spec: Optional[dict] = None
    spec_path: Optional[str] = None
    pair_path: Optional[str] = None
    plane_path: Optional[str] = None
    example: Optional[str] = None
    params: Dict[str, str] = field(default_factory=dict)
    which: Optional[str] = None
    format: str = "json"
    K: int = 12
    max_order: int = 10
    max_deg: int = 8
    rank_only: bool = False
    series: bool = True
    ab_bas: bool = True

    FIELDS = ("command", "spec", "spec_path", "pair_path", "plane_path", "example", "params", "which",
              "format", "K", "max_order", "max_deg", "rank_only", "series", "ab_bas")

    @classmethod
    def from_json(cls, obj: dict) -> "JobSpec":
        if not isinstance(obj, dict):
            raise InvalidParameter("job must be a JSON object")
        extra = set(obj) - set(cls.FIELDS) - {"schema"}
        if extra:
            raise InvalidParameter(f"unknown field(s) in job: {sorted(extra)}")
        if "command" not in obj:
            raise InvalidParameter("job needs a command")
        job = cls(**{k: v for k, v in obj.items() if k != "schema"})
        job.validate()
        return job

    def validate(self):
        if self.command not in ("pair", "verify", "involute", "spectral"):
            raise InvalidParameter("unknown command", command=self.command)
        if self.format not in ("json", "latex", "text"):
            raise InvalidParameter("format must be json, latex or text", format=self.format)
        if self.command == "involute" and self.which not in ("a", "s", "b"):
            raise InvalidParameter("involute needs a, s or b", which=self.which)
        sources = [x for x in (self.spec, self.spec_path, self.pair_path, self.plane_path, self.example) if x]
        if len(sources) != 1:
            raise InvalidParameter("give exactly one input: --spec, --example, --pair or --plane")
        if self.K < 0 or self.max_order < 0 or self.max_deg < 1:
            raise InvalidParameter("K, max-order and max-deg must be non-negative")


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidParameter(f"cannot read {path}: {exc.strerror}")
    except json.JSONDecodeError as exc:
        raise InvalidParameter(f"{path} is not valid JSON: {exc.msg}")


def load_conditions(job: JobSpec) -> ConditionSet:
    if job.example:
        return example_conditions(job.example, **job.params)
    obj = job.spec if job.spec is not None else _read_json(job.spec_path)
    return ConditionSet.from_json(obj)


def load_plane(job: JobSpec) -> DarbouxPlane:
    if job.plane_path:
        return DarbouxPlane.from_json(_read_json(job.plane_path))
    if job.pair_path:
        return BispectralPair.from_json(_read_json(job.pair_path)).plane
    return build_plane(load_conditions(job))


def load_pair(job: JobSpec) -> BispectralPair:
    if job.pair_path:
        return BispectralPair.from_json(_read_json(job.pair_path))
    return complete_pair(load_plane(job))


# ---------------------------------------------------------------------------
# rendering

def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _latex_pair(pair: BispectralPair) -> str:
    lines = [
        r"\begin{align*}",
        r"P &= " + op_to_latex(pair.P) + r" \\",
        r"Q &= " + op_to_latex(pair.Q) + r" \\",
        r"L &= " + op_to_latex(pair.L) + r" \\",
        r"\Lambda &= " + op_to_latex(pair.Lam) + r" \\",
        r"\Theta(x) &= " + poly_to_latex(pair.Theta) + r" \\",
        r"g(z) &= " + poly_to_latex(pair.g) + r", \quad h(t) = " + poly_to_latex(pair.h),
        r"\end{align*}",
    ]
    return "\n".join(lines) + "\n"


def _text_pair(pair: BispectralPair) -> str:
    rows = [
        ("P", pair.P.to_str()), ("Q", pair.Q.to_str()), ("g", pair.g.to_str()), ("f", pair.f.to_str()),
        ("h", pair.h.to_str()), ("P_b", pair.P_b.to_str()), ("Q_b", pair.Q_b.to_str()),
        ("g_b", pair.g_b.to_str()), ("f_b", pair.f_b.to_str()), ("L", pair.L.to_str()),
        ("Lambda", pair.Lam.to_str()), ("Theta", pair.Theta.to_str()),
    ]
    return "".join(f"{k} = {v}\n" for k, v in rows)


def _spectral_json(plane: DarbouxPlane, max_order: int, max_deg: int) -> dict:
    found = spectral_algebra(plane, max_order)
    out = {
        "schema": "spectral-algebra/1",
        "max_order": max_order,
        "elements": [{"u": poly_to_json(u), "order": o} for u, o in found],
        "orders": [o for _, o in found],
        "rank": rank_of([o for _, o in found]) if found else None,
    }
    try:
        u, Lmin = minimal_L(plane, max_deg)
        out["minimal"] = {"u": poly_to_json(u), "order": Lmin.order, "L": Lmin.to_json()}
    except NotFound:
        out["minimal"] = None
    return out


# ---------------------------------------------------------------------------
# commands

def cmd_pair(job: JobSpec):
    pair = load_pair(job)
    if job.format == "latex":
        return _latex_pair(pair), EXIT_OK
    if job.format == "text":
        orders = [o for _, o in spectral_algebra(pair.plane, job.max_order)]
        return _text_pair(pair) + f"orders = {orders}\n", EXIT_OK
    out = pair.to_json()
    out["spectral"] = _spectral_json(pair.plane, job.max_order, job.max_deg)
    return dumps(out), EXIT_OK


def cmd_verify(job: JobSpec):
    pair = load_pair(job)
    if job.rank_only:
        orders = [o for _, o in spectral_algebra(pair.plane, job.max_order)]
        rank = rank_of(orders) if orders else None
        if job.format == "json":
            return dumps({"schema": "rank/1", "orders": orders, "rank": rank}), EXIT_OK
        return f"rank = {rank}\n", EXIT_OK
    report = verify_pair(pair, K=job.K, max_order=job.max_order, with_ab_bas=job.ab_bas, with_series=job.series)
    code = EXIT_OK if report.passed else EXIT_FAILED
    if code == EXIT_FAILED:
        sys.stderr.write(dumps(IdentityFailed("verification failed", failed=", ".join(failures(report.to_json()))).to_dict()))
    if job.format == "json":
        return dumps(report.to_json()), code
    return _text_report(report.to_json()), code


def failures(rep: dict) -> List[str]:
    """Names of the failed checks in a verification report."""
    out = [r["name"] for r in rep["identities"] if not r["passed"]]
    if rep["series"] is not None and not rep["series"]["passed"]:
        out.append("wave series: " + rep["series"]["detail"])
    out += [k for k, v in rep["checks"].items() if not v]
    if rep["rank"] != rep["expected_rank"]:
        out.append(f"rank {rep['rank']} != {rep['expected_rank']}")
    if rep["b_rank"] != rep["expected_rank"]:
        out.append(f"b-image rank {rep['b_rank']} != {rep['expected_rank']}")
    if rep["ab_bas"] is False:
        out.append("ab = bas")
    return out


def _text_report(rep: dict) -> str:
    lines = [f"family: {rep['family']}"]
    for r in rep["identities"]:
        lines.append(f"{'PASS' if r['passed'] else 'FAIL'}  {r['name']}")
    if rep["series"] is not None:
        s = rep["series"]
        lines.append(f"{'PASS' if s['passed'] else 'FAIL'}  wave series (margin {s['margin']}) {s['detail']}".rstrip())
    for k, v in rep["checks"].items():
        lines.append(f"{'PASS' if v else 'FAIL'}  {k}")
    lines.append(f"orders {rep['orders']} rank {rep['rank']}; b-image orders {rep['b_orders']} rank {rep['b_rank']}")
    if rep["ab_bas"] is not None:
        lines.append(f"{'PASS' if rep['ab_bas'] else 'FAIL'}  ab = bas")
    lines.append("verified" if rep["passed"] else "FAILED")
    return "\n".join(lines) + "\n"


def _one_point_report(plane: DarbouxPlane) -> Optional[dict]:
    if plane.cs is None or len(plane.cs.conditions) != 1 or plane.cs.zero_conditions():
        return None
    c = plane.cs.conditions[0]
    if len(c.coeffs) != 2 or c.coeffs[0] != 1:
        return None
    laws = one_point_laws(plane)
    return {k: (qstr(v) if not isinstance(v, (bool, str)) else v) for k, v in laws.items()}


def cmd_involute(job: JobSpec):
    plane = load_plane(job)
    fn = {"a": involution_a, "s": involution_s, "b": involution_b}[job.which]
    image = fn(plane)
    laws = _one_point_report(plane) if job.which == "b" else None
    if job.format == "json":
        out = image.to_json()
        if laws is not None:
            out["laws"] = laws
        return dumps(out), EXIT_OK
    if job.format == "latex":
        text = r"P &= " + op_to_latex(image.P) + "\n" + r"g(z) &= " + poly_to_latex(image.g) + "\n"
    else:
        text = f"P = {image.P.to_str()}\ng = {image.g.to_str()}\n"
    if laws is not None:
        text += "".join(f"{k}: {v}\n" for k, v in laws.items())
    return text, EXIT_OK


def cmd_spectral(job: JobSpec):
    plane = load_plane(job)
    out = _spectral_json(plane, job.max_order, job.max_deg)
    if job.format == "json":
        return dumps(out), EXIT_OK
    lines = [f"orders {out['orders']} rank {out['rank']}"]
    for e in out["elements"]:
        lines.append(f"  order {e['order']}: u = {e['u']}")
    return "\n".join(lines) + "\n", EXIT_OK


COMMANDS = {"pair": cmd_pair, "verify": cmd_verify, "involute": cmd_involute, "spectral": cmd_spectral}


def _run_example(args):
    name, job_fields = args
    job = JobSpec(**dict(job_fields, example=name))
    try:
        text, code = COMMANDS[job.command](job)
    except BispectralError as exc:
        return name, dumps(exc.to_dict()), EXIT_ERROR
    return name, text, code


def run_corpus(job: JobSpec):
    """Run one command on every shipped example, in parallel up to DARBOUX_THREADS."""
    fields = {k: getattr(job, k) for k in JobSpec.FIELDS if k not in ("example", "params")}
    tasks = [(name, fields) for name in shipped_examples()]
    n = threads()
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_run_example, tasks))
    else:
        results = [_run_example(t) for t in tasks]
    code = max(c for _, _, c in results)
    if job.format == "json":
        merged = {"schema": "corpus/1", "results": {n: json.loads(t) for n, t, _ in results}}
        return dumps(merged), code
    return "".join(f"== {n}\n{t}" for n, t, _ in results), code


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bispectral", description="Bispectral Darboux transformations")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        src = p.add_argument_group("input")
        src.add_argument("--spec", help="condition set JSON file")
        src.add_argument("--example", help="built-in example id (or 'all')")
        src.add_argument("--job", help="job description JSON file")
        p.add_argument("--format", choices=["json", "latex", "text"], default="json")
        p.add_argument("--out", help="write output to this file")
        p.add_argument("--K", type=int, default=12, help="wave-series truncation depth")
        p.add_argument("--max-order", type=int, default=10, dest="max_order")
        p.add_argument("--max-deg", type=int, default=8, dest="max_deg")
        ex = p.add_argument_group("example parameters")
        for name in EXAMPLE_PARAMS:
            ex.add_argument(f"--{name}", dest=f"p_{name}")

    p = sub.add_parser("pair", help="build a plane and its bispectral pair")
    common(p)
    p = sub.add_parser("verify", help="verify a pair symbolically and by series")
    common(p)
    p.add_argument("--pair", help="saved pair JSON")
    p.add_argument("--rank-only", action="store_true", dest="rank_only")
    p.add_argument("--no-series", action="store_false", dest="series")
    p.add_argument("--no-ab-bas", action="store_false", dest="ab_bas")
    p = sub.add_parser("involute", help="apply the involution a, s or b")
    p.add_argument("which", choices=["a", "s", "b"])
    common(p)
    p.add_argument("--plane", help="saved plane JSON")
    p.add_argument("--pair", help="saved pair JSON")
    p = sub.add_parser("spectral", help="spectral algebra orders and minimal L")
    common(p)
    p.add_argument("--plane", help="saved plane JSON")
    p.add_argument("--pair", help="saved pair JSON")
    return ap


def job_from_args(ns: argparse.Namespace) -> JobSpec:
    if ns.job:
        obj = _read_json(ns.job)
        if isinstance(obj, dict):
            obj.setdefault("command", ns.command)
        return JobSpec.from_json(obj)
    params = {name: getattr(ns, f"p_{name}") for name in EXAMPLE_PARAMS if getattr(ns, f"p_{name}") is not None}
    if params and not ns.example:
        raise InvalidParameter("example parameters need --example")
    job = JobSpec(
        command=ns.command,
        spec_path=ns.spec,
        pair_path=getattr(ns, "pair", None),
        plane_path=getattr(ns, "plane", None),
        example=ns.example,
        params=params,
        which=getattr(ns, "which", None),
        format=ns.format,
        K=ns.K,
        max_order=ns.max_order,
        max_deg=ns.max_deg,
        rank_only=getattr(ns, "rank_only", False),
        series=getattr(ns, "series", True),
        ab_bas=getattr(ns, "ab_bas", True),
    )
    if job.example != "all":
        job.validate()
    return job


def main(argv: List[str] = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    out_path = ns.out
    try:
        job = job_from_args(ns)
        if job.example == "all":
            text, code = run_corpus(job)
        else:
            if job.example and job.example not in EXAMPLES:
                raise InvalidParameter("unknown example", example=job.example, known=sorted(EXAMPLES))
            text, code = COMMANDS[job.command](job)
    except BispectralError as exc:
        sys.stderr.write(dumps(exc.to_dict()))
        return EXIT_ERROR
    except (ValueError, ArithmeticError, KeyError, TypeError) as exc:
        sys.stderr.write(dumps({"error": "InvalidInput", "message": f"{type(exc).__name__}: {exc}"}))
        return EXIT_ERROR
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
