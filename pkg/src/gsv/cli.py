"""``gsv`` command line: JSON certificates and text reports.

Exit codes: 0 OK, 1 FAILED, 2 BUDGET_EXCEEDED, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass
from math import comb
from pathlib import Path

from . import __version__
from .atlas import certify_canonical_trivial, numeric_cross_check
from .errors import BudgetExceeded, GSVError, InvalidSpec, NotOnVariety, ShapeMismatch
from .repthy import (
    base_point,
    base_point_is_weight_vector,
    canonical_weight,
    orbit_witness,
    pairing_ok,
    random_orbit_point,
    sigma_weight_check,
    tangent_weights,
    act,
)
from .variety import (
    GSVSpec,
    Point,
    chart_atlas,
    chart_identity_holds,
    dimension,
    jacobian_rank_at,
    residual,
)

log = logging.getLogger("gsv")

EXIT_OK, EXIT_FAILED, EXIT_BUDGET, EXIT_USAGE = 0, 1, 2, 64

MAX_CHARTS = 15
MAX_DIMENSION = 24
DEFAULT_TIME_BUDGET = 600

ERRATA = (
    {
        "id": "dimension-stated-as-codimension",
        "detail": "rs + r(s-r) = 2rs - r^2 is the dimension of GSV(r,s); its codimension in C^(2rs) is r^2",
    },
    {
        "id": "tangent-weight-count",
        "detail": "g/h carries 2rs - r^2 = rs + r(s-r) weights, not rs + s(s-r); the same exponent applies to the top wedge power",
    },
)


@dataclass
class RunConfig:
    command: str
    r: int = 1
    s: int = 2
    pair_scope: str = "all"
    random_seed: int = 0
    sample_count: int = 20
    time_budget_seconds: int = DEFAULT_TIME_BUDGET
    output_path: str | None = None
    point_file: str | None = None
    as_json: bool = False
    timing: bool = False

    def __post_init__(self):
        if self.sample_count < 1:
            raise InvalidSpec("--samples must be at least 1")
        if self.time_budget_seconds < 1:
            raise InvalidSpec("time budget must be a positive number of seconds")


class Deadline:
    def __init__(self, seconds: int):
        self.seconds = seconds
        self.start = time.monotonic()

    def check(self, what: str = "") -> None:
        if time.monotonic() - self.start > self.seconds:
            raise BudgetExceeded(f"time budget of {self.seconds}s exceeded {what}".strip())

    def elapsed_ms(self) -> int:
        return int((time.monotonic() - self.start) * 1000)


@dataclass
class Report:
    command: str
    spec: dict
    verdict: str
    payload: dict
    elapsed_ms: int | None = None
    tool_version: str = __version__

    def to_json(self) -> dict:
        return {
            "toolVersion": self.tool_version,
            "spec": self.spec,
            "command": self.command,
            "verdict": self.verdict,
            "payload": self.payload,
            "elapsedMs": self.elapsed_ms,
            "paperErrata": [dict(e) for e in ERRATA],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @property
    def exit_code(self) -> int:
        return {"OK": EXIT_OK, "FAILED": EXIT_FAILED, "BUDGET_EXCEEDED": EXIT_BUDGET}[self.verdict]


def check_size_budget(spec: GSVSpec) -> None:
    charts = comb(spec.s, spec.r)
    if charts > MAX_CHARTS or dimension(spec) > MAX_DIMENSION:
        raise BudgetExceeded(
            f"GSV({spec.r},{spec.s}) has {charts} charts and dimension {dimension(spec)}; "
            f"limits are {MAX_CHARTS} charts and dimension {MAX_DIMENSION}"
        )


# -- command bodies ------------------------------------------------------


def canonical_payload(spec: GSVSpec, config: RunConfig, deadline: Deadline) -> tuple[bool, dict]:
    check_size_budget(spec)
    cert = certify_canonical_trivial(spec, config.pair_scope, progress=lambda: deadline.check("during certification"))
    rng = random.Random(config.random_seed)
    checked = 0
    numeric_ok = True
    for pair in cert.pairs:
        deadline.check("during numeric cross-check")
        ok, n = numeric_cross_check(spec, pair.I, pair.J, rng, config.sample_count)
        numeric_ok &= ok
        checked += n
    payload = cert.to_json()
    payload["pairScope"] = config.pair_scope
    payload["signPattern"] = [
        {"I": list(c.I), "J": list(c.J), "epsilon": c.gluing} for c in cert.pairs
    ]
    payload["signCocycleOk"] = cert.sign_cocycle_ok
    payload["numericCrossCheck"] = {"seed": config.random_seed, "points": checked, "ok": numeric_ok}
    return cert.verdict == "CANONICAL_TRIVIAL" and numeric_ok, payload


def weights_payload(spec: GSVSpec) -> tuple[bool, dict]:
    tw = tangent_weights(spec)
    try:
        cw = canonical_weight(spec)
        sigma_ok = sigma_weight_check(spec)
        ok = sigma_ok and tw.count() == dimension(spec)
    except GSVError as exc:
        log.error("%s", exc)
        cw, ok, sigma_ok = tw.total(), False, False
    multiset = sorted(
        ({"alpha": list(w.alpha), "delta": list(w.delta), "multiplicity": m}
         for w, m in tw.multiset().items()),
        key=lambda d: (d["alpha"], d["delta"]),
    )
    payload = {
        "spec": spec.to_json(),
        "tangentWeightCount": tw.count(),
        "canonicalWeight": cw.as_list(),
        "pairing": "RECIPROCAL_PAIRS_OK" if pairing_ok(tw) else "PAIRING_FAILED",
        "verdict": "THEOREM1_OK" if ok else "FAILED",
        "sigmaWeightZero": sigma_ok,
        "decomposition": {
            "glR": len(tw.gl_r),
            "upperBlock": len(tw.upper),
            "lowerBlock": len(tw.lower),
        },
        "weights": multiset,
        "basePointIsWeightVector": base_point_is_weight_vector(spec),
    }
    return ok, payload


def orbit_payload(spec: GSVSpec, point: Point) -> tuple[bool, dict]:
    res = residual(spec, point)
    bad = [(i, k, v) for i, row in enumerate(res) for k, v in enumerate(row) if v != 0]
    if bad:
        i, k, v = bad[0]
        return False, {
            "onVariety": False,
            "violatedEntry": [i + 1, k + 1],
            "residual": f"{v.numerator}/{v.denominator}",
        }
    g = orbit_witness(spec, point)
    return True, {
        "onVariety": True,
        "jacobianRank": jacobian_rank_at(spec, point),
        "dimension": dimension(spec),
        "witness": g.to_json(),
        "roundTrip": act(g, base_point(spec)) == point,
    }


def homogeneity_payload(spec: GSVSpec, config: RunConfig) -> tuple[bool, dict]:
    rng = random.Random(config.random_seed)
    ok = True
    for _ in range(config.sample_count):
        p = random_orbit_point(spec, rng)
        ok &= act(orbit_witness(spec, p), base_point(spec)) == p
        ok &= jacobian_rank_at(spec, p) == spec.r ** 2
    return ok, {"seed": config.random_seed, "points": config.sample_count, "ok": ok}


def atlas_payload(spec: GSVSpec) -> tuple[bool, dict]:
    charts = []
    ok = True
    for chart in chart_atlas(spec):
        holds = chart_identity_holds(chart)
        ok &= holds
        charts.append({
            "I": list(chart.index_set),
            "freeCoords": [str(v) for v in chart.free_coords],
            "solved": [
                {
                    "variable": str(v),
                    "numerator": str(e.numerator),
                    "denominator": [{"I": list(k), "power": p} for k, p in e.den],
                }
                for v, e in chart.solved.items()
            ],
            "identityHolds": holds,
        })
    return ok, {"chartCount": len(charts), "dimension": dimension(spec), "charts": charts}


# -- commands ------------------------------------------------------------


def _run(config: RunConfig, body) -> Report:
    deadline = Deadline(config.time_budget_seconds)
    spec_json = {"r": config.r, "s": config.s}
    try:
        ok, payload = body(deadline)
        verdict = "OK" if ok else "FAILED"
    except BudgetExceeded as exc:
        verdict, payload = "BUDGET_EXCEEDED", {"reason": str(exc)}
    return Report(config.command, spec_json, verdict, payload,
                  deadline.elapsed_ms() if config.timing else None)


def cmd_canonical(config: RunConfig) -> Report:
    spec = GSVSpec(config.r, config.s)
    return _run(config, lambda d: canonical_payload(spec, config, d))


def cmd_weights(config: RunConfig) -> Report:
    spec = GSVSpec(config.r, config.s)
    return _run(config, lambda d: weights_payload(spec))


def cmd_orbit(config: RunConfig, point: Point | None = None) -> Report:
    spec = GSVSpec(config.r, config.s)
    if point is None:
        if config.point_file is None:
            raise InvalidSpec("orbit needs --point FILE")
        point = Point.loads(Path(config.point_file).read_text())
    if (point.r, point.s) != (spec.r, spec.s):
        raise ShapeMismatch(f"point is for GSV({point.r},{point.s}), not GSV({spec.r},{spec.s})")
    return _run(config, lambda d: orbit_payload(spec, point))


def cmd_atlas(config: RunConfig) -> Report:
    spec = GSVSpec(config.r, config.s)

    def body(deadline):
        check_size_budget(spec)
        return atlas_payload(spec)

    return _run(config, body)


def cmd_sweep(config: RunConfig) -> Report:
    """Every 1 <= r <= s <= config.s; stops at the first failure."""
    bound = config.s

    def body(deadline):
        results = []
        for s in range(1, bound + 1):
            for r in range(1, s + 1):
                spec = GSVSpec(r, s)
                deadline.check(f"before GSV({r},{s})")
                c_ok, c_pay = canonical_payload(spec, config, deadline)
                w_ok, w_pay = weights_payload(spec)
                h_ok, h_pay = homogeneity_payload(spec, config)
                entry = {
                    "spec": spec.to_json(),
                    "canonical": {
                        "verdict": c_pay["verdict"],
                        "pairs": len(c_pay["pairs"]),
                        "signs": [p["gluing"] for p in c_pay["pairs"]],
                        "cocycleTriplesChecked": c_pay["cocycleTriplesChecked"],
                    },
                    "weights": {
                        "verdict": w_pay["verdict"],
                        "tangentWeightCount": w_pay["tangentWeightCount"],
                        "canonicalWeight": w_pay["canonicalWeight"],
                    },
                    "homogeneity": h_pay,
                    "ok": c_ok and w_ok and h_ok,
                }
                results.append(entry)
                if not entry["ok"]:
                    return False, {"bound": bound, "results": results, "firstFailure": spec.to_json()}
        return True, {"bound": bound, "results": results}

    report = _run(config, body)
    report.spec = {"maxS": bound}
    return report


COMMANDS = {
    "canonical": cmd_canonical,
    "weights": cmd_weights,
    "orbit": cmd_orbit,
    "sweep": cmd_sweep,
    "atlas": cmd_atlas,
}


# -- argument parsing ----------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gsv", description="Certificates for the generalised affine Stiefel variety GSV(r,s).")
    parser.add_argument("--version", action="version", version=f"gsv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--r", type=int, default=1)
        p.add_argument("--s", type=int, default=3 if name == "sweep" else 2,
                       help="upper bound for s when sweeping" if name == "sweep" else None)
        p.add_argument("--pairs", choices=["adjacent", "all"], default="all")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=20)
        p.add_argument("--json", action="store_true", help="print JSON instead of text")
        p.add_argument("--out", metavar="FILE", help="also write the JSON report here")
        p.add_argument("--timing", action="store_true", help="record elapsed time in the report")
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "orbit":
            p.add_argument("--point", metavar="FILE", required=True, help="point JSON file")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    budget = int(os.environ.get("GSV_TIME_BUDGET", DEFAULT_TIME_BUDGET))
    if not -2**63 <= args.seed < 2**63:
        raise InvalidSpec("--seed must fit in 64 bits")
    return RunConfig(
        command=args.command,
        r=args.r,
        s=args.s,
        pair_scope=args.pairs,
        random_seed=args.seed,
        sample_count=args.samples,
        time_budget_seconds=budget,
        output_path=args.out,
        point_file=getattr(args, "point", None),
        as_json=args.json,
        timing=args.timing,
    )


def format_text(report: Report) -> str:
    lines = [f"gsv {report.command} {report.spec}: {report.verdict}"]
    p = report.payload
    if "reason" in p:
        lines.append(f"  {p['reason']}")
    if report.command == "canonical" and "pairs" in p:
        for c in p["pairs"]:
            lines.append(f"  sigma_{c['J']} = {c['gluing']:+d} * sigma_{c['I']}"
                         f"  (det formula {'matched' if c['detFormulaMatched'] else 'NOT matched'})")
        lines.append(f"  cocycle triples checked: {p['cocycleTriplesChecked']}; certificate: {p['verdict']}")
    elif report.command == "weights" and "tangentWeightCount" in p:
        lines.append(f"  {p['tangentWeightCount']} tangent weights, sum {p['canonicalWeight']}, "
                     f"{p['pairing']}, {p['verdict']}")
    elif report.command == "orbit":
        if p.get("onVariety"):
            lines.append(f"  Jacobian rank {p['jacobianRank']}, dimension {p['dimension']}")
            lines.append(f"  witness A = {p['witness']['A']}")
            lines.append(f"  witness B = {p['witness']['B']}")
        elif "violatedEntry" in p:
            lines.append(f"  not on the variety: XY - I has entry {tuple(p['violatedEntry'])} = {p['residual']}")
    elif report.command == "atlas" and "charts" in p:
        for c in p["charts"]:
            lines.append(f"  chart {c['I']}: {len(c['freeCoords'])} coordinates, identity "
                         f"{'holds' if c['identityHolds'] else 'FAILS'}")
    elif report.command == "sweep" and "results" in p:
        for e in p["results"]:
            lines.append(f"  GSV({e['spec']['r']},{e['spec']['s']}): {'ok' if e['ok'] else 'FAILED'}")
    for e in ERRATA:
        lines.append(f"  erratum [{e['id']}]: {e['detail']}")
    if report.elapsed_ms is not None:
        lines.append(f"  elapsed: {report.elapsed_ms} ms")
    return "\n".join(lines) + "\n"


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        config = config_from_args(args)
        report = COMMANDS[config.command](config)
    except (UsageError, InvalidSpec, ShapeMismatch, ValueError, OSError) as exc:
        print(f"gsv: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotOnVariety as exc:
        print(f"gsv: {exc}", file=sys.stderr)
        return EXIT_FAILED
    text = report.dumps()
    if config.output_path:
        Path(config.output_path).write_text(text)
    sys.stdout.write(text if config.as_json else format_text(report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
