"""Run reports and deterministic output: canonical JSON, trace CSV, SVG
heatmaps.

All numeric output is printed with 17 significant digits so that parsing a
report back reproduces every float bit for bit; two runs over the same input
emit byte-identical documents apart from the timing field.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

from .fixpoint import FixpointCertificate, IterationTrace, PreflightReport
from .games import (CondensingDiagnostic, Game, GameHypotheses,
                    IntersectReport, SaddleReport)
from .noncompact import CondensingReport, MeasureValue
from .setmaps import MonotoneContinuityReport, OrderViolation
from .spaces import OrderedSpace, Point, SandwichReport

OUTCOMES = (
    "saddle-found", "fixed-point-found", "no-convergence",
    "hypotheses-not-satisfied", "precondition-violation", "vacuous",
    # extensions for runs that only compute or only check:
    "computed", "checks-passed",
)


def fmt_float(value: float) -> str:
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite float {value!r}")
    return format(value, ".17g")


def _emit(obj, out: list[str], indent: int) -> None:
    pad = "  " * indent
    if obj is None or isinstance(obj, bool):
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(fmt_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (list, tuple)):
        if not obj:
            out.append("[]")
            return
        out.append("[\n")
        for i, item in enumerate(obj):
            out.append(pad + "  ")
            _emit(item, out, indent + 1)
            out.append(",\n" if i + 1 < len(obj) else "\n")
        out.append(pad + "]")
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        items = list(obj.items())
        for i, (key, value) in enumerate(items):
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            out.append(pad + "  " + json.dumps(key) + ": ")
            _emit(value, out, indent + 1)
            out.append(",\n" if i + 1 < len(items) else "\n")
        out.append(pad + "}")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def canonical_json(obj) -> str:
    """Serialize nested dicts/lists with 17-significant-digit floats and a
    fixed layout; byte deterministic for equal input."""
    out: list[str] = []
    _emit(obj, out, 0)
    out.append("\n")
    return "".join(out)


# ---------------------------------------------------------------------------
# Converters from domain objects to plain data


def point_data(p: Point) -> list[float]:
    return list(p.coords)


def measure_data(m: MeasureValue) -> dict:
    return {name: value for name, value in m.entries}


def violation_data(v: OrderViolation) -> dict:
    return {
        "relation": v.relation,
        "detail": v.detail,
        "sample": None if v.sample is None else point_data(v.sample),
        "left": [point_data(q) for q in v.left.points],
        "right": [point_data(q) for q in v.right.points],
        "witness": [point_data(q) for q in v.witness],
    }


def certificate_data(c: FixpointCertificate) -> dict:
    return {
        "point": point_data(c.point),
        "residual_S": measure_data(c.residual_s),
        "residual_T": measure_data(c.residual_t),
        "iterations": c.iterations,
        "monotone": c.monotone,
        "tol": c.tol,
        "accepted": c.accepted,
    }


def preflight_data(r: PreflightReport) -> dict:
    return {
        "seminorm": r.seminorm,
        "budget": r.budget,
        "status": r.status,
        "heuristic": r.heuristic,
        "rounds": [
            {
                "set_size": e.set_size,
                "alpha_set": e.alpha_set,
                "alpha_S_image": e.alpha_s_image,
                "alpha_T_image": e.alpha_t_image,
                "heuristic": e.heuristic,
            }
            for e in r.rounds
        ],
    }


def trace_data(t: IterationTrace) -> dict:
    data = {
        "status": t.status,
        "direction": t.direction,
        "start": point_data(t.start),
        "steps": len(t.steps),
        "monotone": t.monotone,
        "order_audit_failures": [st.index for st in t.steps if not st.order_ok],
        "final_point": point_data(t.last_point()),
    }
    if t.preflight:
        data["preflight"] = {name: preflight_data(rep)
                             for name, rep in sorted(t.preflight.items())}
    return data


def condensing_data(r: CondensingReport) -> dict:
    return {
        "map": r.map_name,
        "seminorm": r.seminorm,
        "budget": r.budget,
        "strict": r.strict,
        "alpha_domain": r.alpha_domain,
        "alpha_image": r.alpha_image,
        "heuristic": r.heuristic,
        "status": r.status,
        "domain_size": r.domain_size,
        "image_size": r.image_size,
    }


def diagnostic_data(d: CondensingDiagnostic) -> dict:
    return {
        "name": d.name,
        "alpha_in": d.alpha_in,
        "alpha_out": d.alpha_out,
        "strict_holds": d.strict_holds,
        "nonstrict_holds": d.nonstrict_holds,
    }


def hypotheses_data(h: GameHypotheses) -> dict:
    return {
        "satisfied": h.satisfied,
        "samples_checked": h.samples_checked,
        "isotone_violations": len(h.isotone_violations),
        "hypothesis3_violations": len(h.hypothesis3_violations),
        "isotone_examples": [violation_data(v)
                             for v in h.isotone_violations[:3]],
        "hypothesis3_examples": [violation_data(v)
                                 for v in h.hypothesis3_violations[:3]],
        "condensing": [diagnostic_data(d) for d in h.condensing],
    }


def saddle_report_data(r: SaddleReport) -> dict:
    return {
        "outcome": r.outcome,
        "value": r.value,
        "saddle": None if r.saddle is None else list(r.saddle),
        "saddle_point": None if r.saddle_point is None else
            [point_data(r.saddle_point[0]), point_data(r.saddle_point[1])],
        "maxmin": r.maxmin,
        "minmax": r.minmax,
        "oracle_saddles": [list(ij) for ij in r.oracle_saddles],
        "grid_shape": list(r.grid_shape),
        "tie_eps": r.tie_eps,
        "start": [point_data(r.start[0]), point_data(r.start[1])],
        "iteration": None if r.trace is None else trace_data(r.trace),
        "certificate": None if r.certificate is None
            else certificate_data(r.certificate),
    }


def intersect_report_data(r: IntersectReport) -> dict:
    return {
        "outcome": r.outcome,
        "point": None if r.point is None else
            [point_data(r.point[0]), point_data(r.point[1])],
        "indices": None if r.indices is None else list(r.indices),
        "in_Q": r.in_q,
        "in_Qprime": r.in_qprime,
        "empty_sections": list(r.empty_sections),
        "hypothesis3_violations": len(r.hypothesis3_violations),
        "iteration": None if r.trace is None else trace_data(r.trace),
        "certificate": None if r.certificate is None
            else certificate_data(r.certificate),
    }


def continuity_data(r: MonotoneContinuityReport) -> dict:
    return {
        "passed": r.passed,
        "sequences": [
            {
                "index": e.index,
                "direction": e.direction,
                "final_distance": e.final_distance,
                "tail_max": e.tail_max,
                "passed": e.passed,
            }
            for e in r.entries
        ],
    }


def sandwich_data(r: SandwichReport) -> dict:
    return {
        "passed": r.passed,
        "violations": [{"index": v.index, "reason": v.reason}
                       for v in r.violations],
        "xs_tail_max": r.xs_tail_max,
        "ys_tail_max": r.ys_tail_max,
        "xs_converged": r.xs_converged,
        "ys_converged": r.ys_converged,
    }


# ---------------------------------------------------------------------------
# Run reports


@dataclass
class RunReport:
    subcommand: str
    input_digest: str
    outcome: str
    results: dict
    hypotheses: dict | None
    timing_seconds: float
    version: str
    seed: int | None

    def __post_init__(self):
        if self.outcome not in OUTCOMES:
            raise ValueError(f"unknown outcome {self.outcome!r}")

    def to_data(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "input_digest": self.input_digest,
            "outcome": self.outcome,
            "results": self.results,
            "hypotheses": self.hypotheses,
            "timing_seconds": self.timing_seconds,
            "version": self.version,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return canonical_json(self.to_data())


# ---------------------------------------------------------------------------
# Trace CSV export


def write_trace_csv(trace: IterationTrace, space: OrderedSpace, path) -> None:
    """One row per step: index, map, selected coordinates, per-seminorm step
    size and the order audit flag."""
    header = (["index", "map"]
              + [f"coord_{i}" for i in range(space.dimension)]
              + [f"step_{p.name}" for p in space.seminorms]
              + ["order_ok"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for st in trace.steps:
            sizes = dict(st.step_sizes)
            writer.writerow(
                [st.index, st.map_name]
                + [fmt_float(c) for c in st.selected.coords]
                + [fmt_float(sizes[p.name]) for p in space.seminorms]
                + ["true" if st.order_ok else "false"])


# ---------------------------------------------------------------------------
# Heatmap


def heatmap_svg(game: Game, saddles) -> str:
    """An |A| x |B| cell grid, blue at the payoff minimum, red at the
    maximum, with saddle cells outlined. Byte deterministic."""
    cell = 24
    na, nb = game.shape
    width, height = nb * cell, na * cell
    kmin = float(game.payoff.min())
    kmax = float(game.payoff.max())
    span = kmax - kmin
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
    ]
    for i in range(na):
        for j in range(nb):
            t = 0.5 if span == 0.0 else (float(game.payoff[i, j]) - kmin) / span
            r = round(255 * t)
            b = round(255 * (1.0 - t))
            lines.append(
                f'<rect x="{j * cell}" y="{i * cell}" width="{cell}" '
                f'height="{cell}" fill="#{r:02x}00{b:02x}"/>')
    for i, j in sorted(saddles):
        lines.append(
            f'<rect x="{j * cell + 1}" y="{i * cell + 1}" width="{cell - 2}" '
            f'height="{cell - 2}" fill="none" stroke="#000000" '
            f'stroke-width="2"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_heatmap(game: Game, saddles, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(heatmap_svg(game, saddles))
