"""Command-line front end.

Single runs print JSON (or CSV with ``--format csv``); sweeps print CSV.
Every JSON report embeds the manifest it was produced from, and
``cantor-cvt replay REPORT`` re-runs it.

Exit codes: 0 success (an empty CVT set included), 1 usage or validation
error, 2 no CVT found up to ``--m-max``, 3 internal invariant violation.
"""

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

from .cvt_search import (
    SearchConfig,
    best_cvt,
    enumerate_cvts,
    find_cvts,
    gap_condition,
)
from .errors import CantorCVTError, NoCvtFoundUpToMMax
from .generalized import (
    GeneralizedIfsSpec,
    build_table_generalized,
    find_cvts_generalized,
)
from .ifs_model import build_table, validate_params
from .oracle import (
    discretize,
    dp_optimal_blocks,
    lloyd_restarts,
    moments_by_truncation,
)

EXIT_OK, EXIT_USAGE, EXIT_NO_CVT, EXIT_INVARIANT = 0, 1, 2, 3
SIG_DIGITS = 12
SWEEP_COLUMNS = ["r", "m", "n", "boundary_1", "distortion", "is_optimal", "blocks"]


class InvariantViolation(Exception):
    pass


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    """Everything needed to reproduce a run. Parameters stay as typed strings."""

    command: str
    r1: str = None
    r2: str = None
    p1: str = None
    spec: dict = None
    n: int = None
    m: int = None
    m_start: int = None
    m_max: int = None
    numeric: str = "float"
    tolerance: float = None
    symmetry_pruning: bool = False
    allow_degenerate_gaps: bool = False
    continue_levels: bool = False
    r_min: str = None
    r_max: str = None
    step: str = None
    M: int = None
    restarts: int = None
    seed: int = None
    parallel: bool = False
    format: str = "json"
    out: str = None

    def to_dict(self):
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown manifest fields: {sorted(unknown)}")
        return cls(**data)

    @property
    def rational(self):
        return self.numeric == "rational"

    def model(self, r=None):
        r1 = r if r is not None else self.r1
        r2 = r if r is not None else self.r2
        if r1 is None or r2 is None:
            raise UsageError("model parameters missing: give --r or --r1/--r2")
        p1 = self.p1 if self.p1 is not None else "1/2"
        return validate_params(
            r1, r2, p1, allow_degenerate_gaps=self.allow_degenerate_gaps, rational=self.rational
        )

    def config(self, **over):
        kw = dict(
            tolerance=self.tolerance,
            symmetry_pruning=self.symmetry_pruning,
            parallel=self.parallel,
        )
        if self.m_start is not None:
            kw["m_start"] = self.m_start
        if self.m_max is not None:
            kw["m_max"] = self.m_max
        kw.update(over)
        return SearchConfig(**kw)

    def generalized_spec(self):
        if self.spec is None:
            raise UsageError("--spec is required")
        return GeneralizedIfsSpec.from_dict(self.spec, rational=self.rational)


# --- formatting ----------------------------------------------------------------


def num(x):
    """Round to 12 significant digits; deterministic JSON/CSV text."""
    return float(f"{float(x):.{SIG_DIGITS}g}")


def fmt(x):
    return f"{float(x):.{SIG_DIGITS}g}"


def cvt_record(res):
    rec = {
        "blocks": [list(b) for b in res.blocks],
        "boundaries": list(res.boundaries),
        "centroids": [num(c) for c in res.centroids],
        "boundary_points": [num(b) for b in res.boundary_points],
        "distortion": num(res.distortion),
    }
    if isinstance(res.distortion, Fraction):
        rec["centroids_exact"] = [str(c) for c in res.centroids]
        rec["distortion_exact"] = str(res.distortion)
    return rec


def model_record(model):
    rec = {
        "r1": num(model.r1),
        "r2": num(model.r2),
        "p1": num(model.p1),
        "mean": num(model.mean),
        "second_moment": num(model.second_moment),
        "variance": num(model.variance),
    }
    if model.exact:
        rec["exact"] = {
            k: str(getattr(model, k)) for k in ("r1", "r2", "p1", "mean", "second_moment", "variance")
        }
    return rec


def verify(table, results, eps):
    """Re-derive centroids and gap conditions of every result."""
    for res in results:
        for k, (i, j) in enumerate(res.blocks):
            if res.centroids[k] != table.centroid(i, j):
                raise InvariantViolation(f"centroid mismatch in {res.partition}")
        for k, b in enumerate(res.boundaries):
            if not gap_condition(table, res.centroids[k], res.centroids[k + 1], b, eps):
                raise InvariantViolation(f"gap condition fails at cut {b} of {res.partition}")


def level_report(table, results, cfg):
    verify(table, results, cfg.eps_for(table))
    best = best_cvt(results) if results else None
    return {
        "level": table.level,
        "size": table.size,
        "count": len(results),
        "min_distortion": num(best.distortion) if best else None,
        "best": cvt_record(best) if best else None,
        "cvts": [cvt_record(r) for r in results],
    }


def cvt_rows(report):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["m", "n", "blocks", "centroids", "boundary_points", "distortion"])
    for rec in report["cvts"]:
        w.writerow(
            [
                report["level"],
                len(rec["centroids"]),
                ";".join(f"{a}-{b}" for a, b in rec["blocks"]),
                ";".join(fmt(c) for c in rec["centroids"]),
                ";".join(fmt(c) for c in rec["boundary_points"]),
                fmt(rec["distortion"]),
            ]
        )
    return out.getvalue()


# --- commands ------------------------------------------------------------------


def cmd_cvt(man):
    if man.m is None or man.n is None:
        raise UsageError("cvt needs --n and --m")
    if man.spec is not None:
        table = build_table_generalized(man.generalized_spec(), man.m)
        head = {"spec": man.spec}
    else:
        model = man.model()
        table = build_table(model, man.m)
        head = {"model": model_record(model)}
    cfg = man.config()
    results = enumerate_cvts(table, man.n, cfg)
    return {"manifest": man.to_dict(), **head, "n": man.n, **level_report(table, results, cfg)}


def _optimal(man, make_table, find):
    if man.n is None:
        raise UsageError("optimal needs --n")
    cfg = man.config()
    m_found, results = find(cfg)
    table = make_table(m_found)
    report = {"n": man.n, "m_found": m_found, **level_report(table, results, cfg)}
    if man.continue_levels:
        levels = [{k: report[k] for k in ("level", "count", "min_distortion")}]
        levels[0]["best_blocks"] = report["best"]["blocks"]
        overall = best_cvt(results)
        for m in range(m_found + 1, cfg.m_max + 1):
            t = make_table(m)
            res = enumerate_cvts(t, man.n, cfg)
            verify(t, res, cfg.eps_for(t))
            b = best_cvt(res) if res else None
            if b is not None and b.distortion < overall.distortion - cfg.eps_for(t):
                overall = b
            levels.append(
                {
                    "level": m,
                    "count": len(res),
                    "min_distortion": num(b.distortion) if b else None,
                    "best_blocks": [list(x) for x in b.blocks] if b else None,
                }
            )
        report["levels"] = levels
        report["overall_best"] = {"level": overall.partition.level, **cvt_record(overall)}
    return report


def cmd_optimal(man):
    model = man.model()
    report = _optimal(
        man,
        lambda m: build_table(model, m),
        lambda cfg: find_cvts(model, man.n, cfg),
    )
    return {"manifest": man.to_dict(), "model": model_record(model), **report}


def cmd_generalized(man, action):
    spec = man.generalized_spec()
    if action == "cvt":
        return cmd_cvt(man)
    report = _optimal(
        man,
        lambda m: build_table_generalized(spec, m),
        lambda cfg: find_cvts_generalized(spec, man.n, cfg),
    )
    return {"manifest": man.to_dict(), "spec": man.spec, **report}


def sweep_grid(r_min, r_max, step, rational=False):
    """Grid ``r_min + k*step`` up to ``r_max`` (inclusive within 1e-9 steps)."""
    lo, hi, st = (Fraction(str(x)) for x in (r_min, r_max, step))
    if st <= 0 or lo <= 0 or hi < lo or hi > Fraction(1, 2):
        raise UsageError("sweep grid needs 0 < r_min <= r_max <= 1/2 and step > 0")
    k_max = int((hi - lo) / st)
    grid = [lo + k * st for k in range(k_max + 1)]
    return [str(r) for r in grid] if rational else [fmt(r) for r in grid]


def _sweep_one(args):
    man, r = args
    model = man.model(r=r)
    table = build_table(model, man.m)
    cfg = man.config(parallel=False)
    results = enumerate_cvts(table, man.n, cfg)
    verify(table, results, cfg.eps_for(table))
    if not results:
        return []
    low = min(x.distortion for x in results)
    tol = cfg.eps_for(table)
    rows = []
    for res in results:
        b1 = res.boundary_points[0] if res.boundary_points else None
        rows.append(
            [
                fmt(model.r1),
                man.m,
                man.n,
                fmt(b1) if b1 is not None else "",
                fmt(res.distortion),
                int(res.distortion <= low + tol),
                ";".join(str(b) for b in res.boundaries),
            ]
        )
    return rows


def cmd_sweep(man):
    if man.m is None or man.n is None:
        raise UsageError("sweep needs --n and --m")
    grid = sweep_grid(man.r_min, man.r_max, man.step, man.rational)
    jobs = [(man, r) for r in grid]
    if man.parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as pool:
            blocks = list(pool.map(_sweep_one, jobs))
    else:
        blocks = [_sweep_one(j) for j in jobs]
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for rows in blocks:
        w.writerows(rows)
    return out.getvalue()


def cmd_oracle(man, which):
    model = man.model()
    head = {"manifest": man.to_dict(), "model": model_record(model), "oracle": which}
    if which == "moments":
        M = man.M if man.M is not None else 20
        e, m2, v = moments_by_truncation(model, M)
        bound = 2 * float(max(model.r1, model.r2)) ** M
        return {
            **head,
            "M": M,
            "mean": {"oracle": num(e), "analytic": num(model.mean), "diff": abs(e - float(model.mean))},
            "second_moment": {
                "oracle": num(m2),
                "analytic": num(model.second_moment),
                "diff": abs(m2 - float(model.second_moment)),
            },
            "variance": {
                "oracle": num(v),
                "analytic": num(model.variance),
                "diff": abs(v - float(model.variance)),
            },
            "bound": bound,
        }
    if man.n is None:
        raise UsageError(f"oracle {which} needs --n")
    if which == "dp":
        if man.m is None:
            raise UsageError("oracle dp needs --m")
        table = build_table(model, man.m)
        part, cost = dp_optimal_blocks(table, man.n)
        cfg = man.config()
        results = enumerate_cvts(table, man.n, cfg)
        best = best_cvt(results) if results else None
        cents = [table.centroid(i, j) for i, j in part.blocks]
        is_cvt = all(
            gap_condition(table, cents[k], cents[k + 1], b, cfg.eps_for(table))
            for k, b in enumerate(part.boundaries)
        )
        return {
            **head,
            "level": man.m,
            "n": man.n,
            "dp": {"blocks": [list(b) for b in part.blocks], "cost": num(cost), "is_cvt": is_cvt},
            "best_cvt": cvt_record(best) if best else None,
            "diff": abs(float(best.distortion) - float(cost)) if best else None,
        }
    M = man.M if man.M is not None else 10
    atoms = discretize(model, M)
    restarts = man.restarts if man.restarts is not None else 8
    seed = man.seed if man.seed is not None else 0
    res = lloyd_restarts(atoms, man.n, restarts=restarts, seed=seed)
    report = {
        **head,
        "M": M,
        "n": man.n,
        "lloyd": {
            "centroids": [num(c) for c in res.centroids],
            "cost": num(res.cost),
            "iterations": res.iterations,
            "converged": res.converged,
        }
        if res
        else None,
    }
    if M <= 16:
        results = enumerate_cvts(build_table(model, M), man.n, man.config())
        if results:
            best = best_cvt(results)
            report["best_cvt"] = cvt_record(best)
            report["diff"] = abs(float(best.distortion) - res.cost) if res else None
    return report


def run(man, action=None):
    """Dispatch a manifest; returns the report as text."""
    if man.command == "sweep":
        return cmd_sweep(man)
    if man.command == "cvt":
        report = cmd_cvt(man)
    elif man.command == "optimal":
        report = cmd_optimal(man)
    elif man.command.startswith("oracle-"):
        report = cmd_oracle(man, man.command.split("-", 1)[1])
    elif man.command.startswith("generalized-"):
        report = cmd_generalized(man, man.command.split("-", 1)[1])
    else:
        raise UsageError(f"unknown command {man.command!r}")
    if man.format == "csv" and "cvts" in report:
        return cvt_rows(report)
    return json.dumps(report, indent=2) + "\n"


# --- argument parsing ------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model_args(p):
    p.add_argument("--r", help="symmetric ratio r1 = r2 = r (p1 defaults to 1/2)")
    p.add_argument("--r1")
    p.add_argument("--r2")
    p.add_argument("--p1", default="1/2")


def _search_args(p):
    p.add_argument("--n", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--rational", action="store_true", help="exact Fraction arithmetic")
    p.add_argument("--symmetry-pruning", action="store_true")
    p.add_argument("--allow-degenerate-gaps", action="store_true")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser():
    ap = _Parser(prog="cantor-cvt", description="CVTs of self-similar Cantor measures")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cvt", help="all CVTs at one level")
    _model_args(p)
    _search_args(p)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("optimal", help="escalate the level and report the best CVT")
    _model_args(p)
    _search_args(p)
    p.add_argument("--m-start", type=int, default=1)
    p.add_argument("--m-max", type=int, default=16)
    p.add_argument("--continue", dest="continue_levels", action="store_true",
                   help="keep going to --m-max and record the best CVT per level")

    p = sub.add_parser("sweep", help="symmetric-family sweep over r, CSV output")
    _search_args(p)
    p.add_argument("--r-min", default="0.30")
    p.add_argument("--r-max", default="0.50")
    p.add_argument("--step", default="0.005")
    p.add_argument("--m", type=int, default=12)

    p = sub.add_parser("oracle", help="independent cross-checks")
    osub = p.add_subparsers(dest="which", required=True, parser_class=_Parser)
    for name in ("lloyd", "dp", "moments"):
        q = osub.add_parser(name)
        _model_args(q)
        _search_args(q)
        q.add_argument("--m", type=int)
        q.add_argument("--M", type=int)
        q.add_argument("--restarts", type=int)
        q.add_argument("--seed", type=int)

    p = sub.add_parser("generalized", help="level-dependent map families from a spec file")
    gsub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name in ("cvt", "optimal"):
        q = gsub.add_parser(name)
        q.add_argument("--spec", required=True, help="JSON document with preamble/period levels")
        _search_args(q)
        q.add_argument("--m", type=int)
        q.add_argument("--m-start", type=int, default=1)
        q.add_argument("--m-max", type=int, default=16)
        q.add_argument("--continue", dest="continue_levels", action="store_true")

    p = sub.add_parser("replay", help="re-run the manifest embedded in a JSON report")
    p.add_argument("report")
    p.add_argument("--out")
    return ap


def manifest_from_args(args):
    cmd = args.command
    if cmd == "oracle":
        cmd = f"oracle-{args.which}"
    elif cmd == "generalized":
        cmd = f"generalized-{args.action}"
    man = RunManifest(command=cmd)
    g = vars(args)
    if g.get("r") is not None:
        man.r1 = man.r2 = g["r"]
    for key in ("r1", "r2"):
        if g.get(key) is not None:
            setattr(man, key, g[key])
    for key in (
        "p1", "n", "m", "m_start", "m_max", "tolerance", "symmetry_pruning",
        "allow_degenerate_gaps", "continue_levels", "r_min", "r_max", "step",
        "M", "restarts", "seed", "parallel", "format", "out",
    ):
        if g.get(key) is not None:
            setattr(man, key, g[key])
    if g.get("rational"):
        man.numeric = "rational"
    if cmd == "sweep":
        man.p1 = "1/2"
        man.format = "csv"
    if g.get("spec"):
        with open(g["spec"]) as fh:
            try:
                man.spec = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"{g['spec']}: {exc}") from None
        man.p1 = None
    return man


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "replay":
            with open(args.report) as fh:
                man = RunManifest.from_dict(json.load(fh)["manifest"])
        else:
            man = manifest_from_args(args)
        text = run(man)
    except NoCvtFoundUpToMMax as exc:
        print(f"cantor-cvt: {exc}", file=sys.stderr)
        return EXIT_NO_CVT
    except (InvariantViolation, AssertionError) as exc:
        print(f"cantor-cvt: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (CantorCVTError, UsageError, ValueError, OSError, KeyError) as exc:
        print(f"cantor-cvt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
