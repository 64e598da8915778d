"""Executable well-posedness map for the advection-diffusion problem.

A query point carries the dimension and the reciprocals (1/alpha, 1/p, 1/q)
of the time integrability of b, the space integrability of b and the
integrability of the initial datum.  ``classify`` answers which
existence/uniqueness/regularity statements apply there, which nonuniqueness
constructions are known, and which open questions govern the remaining gap;
``emit_region_map`` rasterizes a (1/p, 1/q) square into region labels.

Conventions: all inequalities are non-strict on the closed regions; every
tag and question is attached only where the product u*b is defined, since
the equation has no meaning otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

__all__ = [
    "RegimeQuery",
    "RegimeReport",
    "RegionMap",
    "classify",
    "classify_exponents",
    "emit_region_map",
    "region_map_csv",
    "region_map_svg",
    "STATEMENTS",
    "FLAG_NAMES",
    "NONUNIQUENESS_TAGS",
    "OPEN_QUESTIONS",
]

FLAG_NAMES = (
    "product_defined",
    "distributional_exists",
    "parabolic_exists",
    "parabolic_unique",
    "all_distributional_parabolic",
)
NONUNIQUENESS_TAGS = ("CIH1", "DISTR", "P2Q2")
OPEN_QUESTIONS = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6")

# Statement registry: stable ids with formula-level anchors.  These strings
# are snapshot-tested; change them only deliberately.
STATEMENTS: dict[str, str] = {
    "product_defined": "1/p + 1/q <= 1: the product u b is integrable, so the weak formulation makes sense",
    "distributional_exists": "b in L^1_t L^p_x divergence-free, u0 in L^q, 1/p + 1/q <= 1: a distributional solution exists",
    "parabolic_exists": "p >= 2 and q >= 2: at least one parabolic solution (finite dissipation) exists",
    "parabolic_unique": "min(alpha, p, q) >= 2: at most one parabolic solution",
    "all_distributional_parabolic": "alpha >= 2 and 1/p + 1/q <= 1/2: every distributional solution is parabolic and obeys the exact energy balance",
    "CIH1": "p < 2d/(d+2): infinitely many solutions in C_t H^1_x are known",
    "DISTR": "d > 2, 1/p + 1/q = 1, p < d: distributional solutions are known to be nonunique",
    "P2Q2": "d > 2, p = q = 2: infinitely many distributional solutions although the parabolic one is unique",
    "Q1": "open: behaviour of parabolic uniqueness for 2d/(d+2) <= p < 2",
    "Q2": "open: nonuniqueness in L^2_t H^1_x for fields merely L^2 in time",
    "Q3": "open: uniqueness of parabolic solutions for b in L^r_t L^2_x with 1 <= r < 2",
    "Q4": "open: parabolic regularity of distributional solutions when b is L^r in time, r < 2, and 1/p + 1/q <= 1/2",
    "Q5": "open: a distributional non-parabolic solution in dimension 2 with p = q = 2 (also for autonomous b)",
    "Q6": "open: distributional non-parabolic solutions in the window 1/2 < 1/p + 1/q < 1",
}


@dataclass(frozen=True)
class RegimeQuery:
    """Query point (d, 1/alpha, 1/p, 1/q); reciprocals lie in [0,1] (exponents in [1,inf])."""

    d: int
    inv_alpha: float
    inv_p: float
    inv_q: float

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError("dimension must be >= 1")
        for name in ("inv_alpha", "inv_p", "inv_q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0,1], got {v}")


@dataclass(frozen=True)
class RegimeReport:
    """Flags, nonuniqueness tags, open questions and their citations at one query point."""

    product_defined: bool
    distributional_exists: bool
    parabolic_exists: bool
    parabolic_unique: bool
    all_distributional_parabolic: bool
    known_nonuniqueness: tuple[str, ...]
    open_questions: tuple[str, ...]
    citations: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        chain = (
            self.parabolic_unique <= self.parabolic_exists
            and self.parabolic_exists <= self.distributional_exists
            and self.distributional_exists <= self.product_defined
            and self.all_distributional_parabolic <= self.parabolic_unique
        )
        if not chain:
            raise AssertionError("regime report violates the implication chain")

    @property
    def flags(self) -> tuple[bool, ...]:
        return tuple(getattr(self, name) for name in FLAG_NAMES)

    def as_dict(self) -> dict:
        return {
            **{name: getattr(self, name) for name in FLAG_NAMES},
            "known_nonuniqueness": list(self.known_nonuniqueness),
            "open_questions": list(self.open_questions),
            "citations": [list(c) for c in self.citations],
        }


def classify(q: RegimeQuery) -> RegimeReport:
    """Apply every encoded statement to the query point."""
    d = q.d
    sum_pq = q.inv_p + q.inv_q
    product_defined = sum_pq <= 1.0
    distributional_exists = product_defined  # existence needs only L^1 in time
    parabolic_exists = product_defined and q.inv_p <= 0.5 and q.inv_q <= 0.5
    parabolic_unique = parabolic_exists and q.inv_alpha <= 0.5
    all_distributional_parabolic = q.inv_alpha <= 0.5 and sum_pq <= 0.5

    tags: list[str] = []
    questions: list[str] = []
    if product_defined:
        cih1_threshold = (d + 2.0) / (2.0 * d)
        if q.inv_p > cih1_threshold:
            tags.append("CIH1")
        if d > 2 and sum_pq == 1.0 and q.inv_p > 1.0 / d:
            tags.append("DISTR")
        if d > 2 and q.inv_p == 0.5 and q.inv_q == 0.5:
            tags.append("P2Q2")

        if 0.5 < q.inv_p <= cih1_threshold:
            questions.append("Q1")
        if q.inv_alpha > 0.5 and q.inv_p <= 0.5:
            questions.extend(("Q2", "Q3"))
        if q.inv_alpha > 0.5 and sum_pq <= 0.5:
            questions.append("Q4")
        if d == 2 and q.inv_p == 0.5 and q.inv_q == 0.5:
            questions.append("Q5")
        if 0.5 < sum_pq < 1.0:
            questions.append("Q6")

    flags = {
        "product_defined": product_defined,
        "distributional_exists": distributional_exists,
        "parabolic_exists": parabolic_exists,
        "parabolic_unique": parabolic_unique,
        "all_distributional_parabolic": all_distributional_parabolic,
    }
    cited = ["product_defined"]
    cited += [name for name in FLAG_NAMES if flags[name] and name != "product_defined"]
    cited += tags + questions
    citations = tuple((sid, STATEMENTS[sid]) for sid in cited)

    return RegimeReport(
        known_nonuniqueness=tuple(tags),
        open_questions=tuple(questions),
        citations=citations,
        **flags,
    )


def _reciprocal(exponent) -> float:
    if exponent in ("inf", "infinity", math.inf):
        return 0.0
    value = float(exponent)
    if math.isinf(value):
        return 0.0
    if value < 1.0:
        raise ValueError(f"exponents must be >= 1 or inf, got {value}")
    return 1.0 / value


def classify_exponents(d: int, alpha, p, q) -> RegimeReport:
    """classify() with exponents given directly (numbers or "inf")."""
    return classify(RegimeQuery(d=d, inv_alpha=_reciprocal(alpha), inv_p=_reciprocal(p), inv_q=_reciprocal(q)))


@dataclass(frozen=True)
class RegionMap:
    """Rasterized (1/p, 1/q) square at one (d, 1/alpha) slice; cell centers are sampled."""

    d: int
    inv_alpha: float
    resolution: int
    reports: tuple[tuple[RegimeReport, ...], ...]  # indexed [i][j] for (inv_p, inv_q)

    def cell_center(self, i: int, j: int) -> tuple[float, float]:
        return ((i + 0.5) / self.resolution, (j + 0.5) / self.resolution)


def emit_region_map(d: int, inv_alpha: float, resolution: int) -> RegionMap:
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    rows = []
    for i in range(resolution):
        row = []
        for j in range(resolution):
            inv_p = (i + 0.5) / resolution
            inv_q = (j + 0.5) / resolution
            row.append(classify(RegimeQuery(d=d, inv_alpha=inv_alpha, inv_p=inv_p, inv_q=inv_q)))
        rows.append(tuple(row))
    return RegionMap(d=d, inv_alpha=inv_alpha, resolution=resolution, reports=tuple(rows))


def _cell_label(report: RegimeReport) -> str:
    bits = "".join("1" if f else "0" for f in report.flags)
    tags = "+".join(report.known_nonuniqueness) or "-"
    qs = "+".join(report.open_questions) or "-"
    return f"{bits}|{tags}|{qs}"


def region_map_csv(rm: RegionMap) -> str:
    lines = ["inv_p,inv_q," + ",".join(FLAG_NAMES) + ",nonuniqueness,open_questions"]
    for i in range(rm.resolution):
        for j in range(rm.resolution):
            rep = rm.reports[i][j]
            inv_p, inv_q = rm.cell_center(i, j)
            flags = ",".join(str(int(f)) for f in rep.flags)
            lines.append(
                f"{inv_p:.17g},{inv_q:.17g},{flags},"
                f"{'+'.join(rep.known_nonuniqueness) or '-'},{'+'.join(rep.open_questions) or '-'}"
            )
    return "\n".join(lines) + "\n"


_PALETTE = (
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee", "#aa3377",
    "#bbbbbb", "#cc3311", "#009988", "#ee3377", "#0077bb", "#ddaa33",
    "#555555", "#99ddff", "#44bb99", "#eedd88",
)


def region_map_svg(rm: RegionMap) -> str:
    """One fill per distinct flag/tag/question combination plus a citation legend."""
    plot = 480.0
    x0, y0 = 70.0, 40.0
    cell = plot / rm.resolution
    labels: dict[str, str] = {}
    used_statements: list[str] = []

    body = []
    for i in range(rm.resolution):
        for j in range(rm.resolution):
            rep = rm.reports[i][j]
            label = _cell_label(rep)
            if label not in labels:
                labels[label] = _PALETTE[len(labels) % len(_PALETTE)]
                for sid, _ in rep.citations:
                    if sid not in used_statements:
                        used_statements.append(sid)
            x = x0 + i * cell
            y = y0 + (rm.resolution - 1 - j) * cell
            body.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell:.2f}" height="{cell:.2f}" '
                f'fill="{labels[label]}"/>'
            )

    axes = [
        f'<rect x="{x0}" y="{y0}" width="{plot}" height="{plot}" fill="none" stroke="black"/>',
        f'<text x="{x0 + plot / 2:.1f}" y="{y0 + plot + 32:.1f}" text-anchor="middle">1/p</text>',
        f'<text x="{x0 - 40:.1f}" y="{y0 + plot / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 {x0 - 40:.1f} {y0 + plot / 2:.1f})">1/q</text>',
        f'<text x="{x0 + plot / 2:.1f}" y="{y0 - 14:.1f}" text-anchor="middle">'
        f"d={rm.d}, 1/alpha={rm.inv_alpha:g}</text>",
    ]
    for frac in (0.0, 0.5, 1.0):
        axes.append(f'<text x="{x0 + frac * plot:.1f}" y="{y0 + plot + 16:.1f}" text-anchor="middle">{frac:g}</text>')
        axes.append(
            f'<text x="{x0 - 8:.1f}" y="{y0 + (1 - frac) * plot + 4:.1f}" text-anchor="end">{frac:g}</text>'
        )

    legend = []
    ly = y0
    lx = x0 + plot + 30
    legend.append(f'<text x="{lx}" y="{ly - 14}" font-weight="bold">flags|nonuniqueness|questions</text>')
    for label, color in labels.items():
        legend.append(f'<rect x="{lx}" y="{ly:.1f}" width="14" height="14" fill="{color}"/>')
        legend.append(f'<text x="{lx + 20}" y="{ly + 12:.1f}">{escape(label)}</text>')
        ly += 20
    ly += 16
    legend.append(f'<text x="{lx}" y="{ly:.1f}" font-weight="bold">statements</text>')
    ly += 20
    for sid in used_statements:
        legend.append(f'<text x="{lx}" y="{ly:.1f}" font-size="10">{sid}: {escape(STATEMENTS[sid])}</text>')
        ly += 16

    height = max(y0 + plot + 60.0, ly + 20.0)
    width = lx + 620.0
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
        f'font-family="monospace" font-size="12">\n'
        + "\n".join(body + axes + legend)
        + "\n</svg>\n"
    )
