"""Transport-mollification commutators and their convergence studies.

The commutator r^delta = b . grad(w * rho^delta) - (b . grad w) * rho^delta
measures how far smoothing fails to commute with transport.  Its decay in
L^1 over space-time (Lipschitz-type velocities) or in L^2_t H^-1_x (merely
integrable velocities paired with bounded data) is what the uniqueness and
regularity mechanisms run on; this module measures those norms on dyadic
kernel schedules and fits empirical rates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .grid import ScalarField, TorusGrid, VectorField, h_norm, lp_norm
from .library import FieldSpec, instantiate
from .mollify import MIN_DELTA_FACTOR, Mollifier, mollify
from .solver import Trajectory
from .spectral import divergence, gradient, _derivative_square_modulus

__all__ = [
    "L1_SPACETIME",
    "L2_HMINUS1",
    "NORM_TYPES",
    "CommutatorStudyConfig",
    "DecayStudy",
    "CouplingRecord",
    "commutator",
    "commutator_divform",
    "commutator_divb_correction",
    "convergence_study",
    "summarize_decay",
    "mollified_energy_coupling",
]

L1_SPACETIME = "L1_spacetime"
L2_HMINUS1 = "L2_Hminus1"
NORM_TYPES = (L1_SPACETIME, L2_HMINUS1)

EXACT_FLOOR = 1e-12
NO_DECAY_SLACK = 1.2  # a level may exceed its predecessor by at most 20%


def _check_grids(b: VectorField, w: ScalarField) -> None:
    if b.grid != w.grid:
        raise ValueError("velocity and scalar live on different grids")


def commutator(b: VectorField, w: ScalarField, m: Mollifier) -> ScalarField:
    """r^delta = b . grad(w * rho^delta) - (b . grad w) * rho^delta."""
    _check_grids(b, w)
    smooth = mollify(w, m)
    first = np.zeros(w.grid.shape)
    for bj, gj in zip(b.components, gradient(smooth).components):
        first = first + bj.values * gj.values
    advected = np.zeros(w.grid.shape)
    for bj, gj in zip(b.components, gradient(w).components):
        advected = advected + bj.values * gj.values
    second = mollify(ScalarField(w.grid, advected), m)
    return ScalarField(w.grid, first - second.values)


def commutator_divform(b: VectorField, w: ScalarField, m: Mollifier) -> ScalarField:
    """div[ b (w * rho^delta) - (b w) * rho^delta ]; equals the direct form when div b = 0."""
    _check_grids(b, w)
    smooth = mollify(w, m)
    comps = []
    for bj in b.components:
        flux_direct = bj.values * smooth.values
        flux_mollified = mollify(ScalarField(w.grid, bj.values * w.values), m)
        comps.append(flux_direct - flux_mollified.values)
    return divergence(VectorField.from_arrays(w.grid, comps))


def commutator_divb_correction(b: VectorField, w: ScalarField, m: Mollifier) -> ScalarField:
    """(w * rho^delta) div b - (w div b) * rho^delta, the bounded-divergence remainder."""
    _check_grids(b, w)
    db = divergence(b)
    smooth = mollify(w, m)
    first = smooth.values * db.values
    second = mollify(ScalarField(w.grid, w.values * db.values), m)
    return ScalarField(w.grid, first - second.values)


@dataclass(frozen=True)
class CommutatorStudyConfig:
    """A decay study: fixed (b, w), a strictly decreasing kernel schedule, one norm.

    ``w_source`` is either an explicit ScalarField or a solver Trajectory,
    in which case the time quadrature runs over its recorded snapshots.
    """

    b_source: object  # FieldSpec | VectorField
    w_source: object  # ScalarField | Trajectory
    delta_schedule: tuple[float, ...]
    mollifier_profile: str = "gaussian_periodized"
    norm: str = L1_SPACETIME
    t_final: float = 1.0
    time_samples: int = 1

    def __post_init__(self) -> None:
        sched = tuple(float(d) for d in self.delta_schedule)
        if len(sched) < 2:
            raise ValueError("schedule needs at least two levels")
        if any(d <= 0.0 for d in sched):
            raise ValueError("kernel scales must be positive")
        if any(later >= earlier for earlier, later in zip(sched, sched[1:])):
            raise ValueError("delta schedule must be strictly decreasing")
        if self.norm not in NORM_TYPES:
            raise ValueError(f"norm must be one of {NORM_TYPES}")
        if not isinstance(self.b_source, (FieldSpec, VectorField)):
            raise TypeError("b_source must be a FieldSpec or a VectorField")
        if not isinstance(self.w_source, (ScalarField, Trajectory)):
            raise TypeError("w_source must be a ScalarField or a Trajectory")
        if self.time_samples < 1:
            raise ValueError("time_samples must be >= 1")
        if not self.t_final > 0.0:
            raise ValueError("t_final must be positive")
        object.__setattr__(self, "delta_schedule", sched)

    @property
    def grid(self) -> TorusGrid:
        return self.w_source.grid

    def validate_resolvable(self) -> None:
        floor = MIN_DELTA_FACTOR * self.grid.spacing
        bad = [d for d in self.delta_schedule if d < floor]
        if bad:
            raise ValueError(f"kernel scales {bad} are not resolvable at N={self.grid.points_per_axis}")

    def validate_time_sampling(self) -> None:
        b = self.b_source
        if isinstance(b, FieldSpec) and b.time_dependent and isinstance(self.w_source, Trajectory):
            times = self.w_source.times
            if len(times) < 2:
                raise ValueError("trajectory must carry at least two snapshots")
            spacing = float(np.max(np.diff(times)))
            period = b.param("period")
            if spacing > 0.5 * period:
                raise ValueError(
                    f"snapshot spacing {spacing:.3g} too coarse for field period {period:.3g};"
                    " record at least twice per switch"
                )


@dataclass(frozen=True)
class DecayStudy:
    """Norm-per-level table with consecutive ratios and the fitted log-log rate."""

    deltas: tuple[float, ...]
    norms: tuple[float, ...]
    ratios: tuple[float, ...]
    fitted_rate: float | None
    verdict: str  # "decay" | "no-decay" | "exact"
    norm_type: str


def _time_nodes(cfg: CommutatorStudyConfig):
    """(times, weights, states or None) for the rectangle rule in time."""
    if isinstance(cfg.w_source, Trajectory):
        times = np.asarray(cfg.w_source.times, dtype=np.float64)
        weights = np.diff(times)
        return times[:-1], weights, cfg.w_source.states[:-1]
    b = cfg.b_source
    time_dependent = isinstance(b, FieldSpec) and b.time_dependent
    if not time_dependent:
        return np.asarray([0.0]), np.asarray([cfg.t_final]), None
    m = cfg.time_samples
    times = (np.arange(m) + 0.5) * cfg.t_final / m
    weights = np.full(m, cfg.t_final / m)
    return times, weights, None


def _b_at(cfg: CommutatorStudyConfig, grid: TorusGrid, t: float) -> VectorField:
    b = cfg.b_source
    if isinstance(b, VectorField):
        return b
    return instantiate(b, grid, t)


def _level_norm(cfg: CommutatorStudyConfig, delta: float) -> float:
    grid = cfg.grid
    m = Mollifier(cfg.mollifier_profile, delta)
    times, weights, states = _time_nodes(cfg)
    acc = 0.0
    for i, (t, wt) in enumerate(zip(times, weights)):
        w = states[i] if states is not None else cfg.w_source
        r = commutator(_b_at(cfg, grid, float(t)), w, m)
        if cfg.norm == L1_SPACETIME:
            acc += lp_norm(r, 1.0) * wt
        else:
            acc += h_norm(r, -1) ** 2 * wt
    return acc if cfg.norm == L1_SPACETIME else math.sqrt(acc)


def summarize_decay(deltas, norms, norm_type: str) -> DecayStudy:
    """Classify a norm sequence: "exact" at the roundoff floor, "no-decay" if
    any level rises beyond 20% slack, otherwise "decay" with a least-squares
    log-log rate.  The first level is excluded from the fit when five or
    more levels exist (pre-asymptotic transient)."""
    deltas = tuple(float(d) for d in deltas)
    norms = tuple(float(n) for n in norms)
    ratios = tuple(b / a if a > 0.0 else math.nan for a, b in zip(norms, norms[1:]))
    if max(norms) <= EXACT_FLOOR:
        return DecayStudy(deltas, norms, ratios, None, "exact", norm_type)
    if any(later > NO_DECAY_SLACK * earlier for earlier, later in zip(norms, norms[1:])):
        return DecayStudy(deltas, norms, ratios, None, "no-decay", norm_type)
    start = 1 if len(deltas) >= 5 else 0
    safe = np.maximum(np.asarray(norms[start:]), 1e-300)
    slope = float(np.polyfit(np.log(deltas[start:]), np.log(safe), 1)[0])
    return DecayStudy(deltas, norms, ratios, slope, "decay", norm_type)


def convergence_study(cfg: CommutatorStudyConfig, threads: int = 1) -> DecayStudy:
    """Evaluate the configured space-time norm along the schedule and fit a rate.

    Levels are independent pure computations; ``threads`` fans them out.
    The table is assembled in schedule order regardless of worker timing.
    """
    cfg.validate_resolvable()
    cfg.validate_time_sampling()
    deltas = cfg.delta_schedule
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            norms = tuple(pool.map(lambda d: _level_norm(cfg, d), deltas))
    else:
        norms = tuple(_level_norm(cfg, d) for d in deltas)
    return summarize_decay(deltas, norms, cfg.norm)


@dataclass(frozen=True)
class CouplingRecord:
    delta: float
    energy_residual: float
    coupling_integral: float

    @property
    def gap(self) -> float:
        return abs(self.energy_residual - self.coupling_integral)


def mollified_energy_coupling(traj: Trajectory, b, profile: str, deltas) -> tuple[CouplingRecord, ...]:
    """Check that the mollified energy budget is exactly the commutator pairing.

    For u^delta = u * rho^delta the budget
    0.5||u^delta(T)||^2 + int ||grad u^delta||^2 - 0.5||u^delta(0)||^2
    equals the space-time pairing of r^delta with u^delta up to quadrature;
    both shrink together as delta -> 0.  Requires densely recorded snapshots.
    """
    grid = traj.grid
    if len(traj.states) < 5:
        raise ValueError("trajectory must carry densely recorded snapshots")
    b_field = b if isinstance(b, VectorField) else instantiate(b, grid, 0.0)
    times = np.asarray(traj.times, dtype=np.float64)
    cell = grid.cell_volume
    grad_sym = 4.0 * np.pi**2 * _derivative_square_modulus(grid)
    size = grid.size

    out = []
    for delta in deltas:
        m = Mollifier(profile, float(delta))
        smooth = [mollify(s, m) for s in traj.states]
        grad_sq = []
        pairing = []
        for state, us in zip(traj.states, smooth):
            uh = np.fft.fftn(us.values)
            grad_sq.append(float(np.sum(grad_sym * (uh.real**2 + uh.imag**2))) / size**2)
            r = commutator(b_field, state, m)
            pairing.append(float(np.sum(r.values * us.values)) * cell)
        half_start = 0.5 * lp_norm(smooth[0], 2.0) ** 2
        half_end = 0.5 * lp_norm(smooth[-1], 2.0) ** 2
        residual = half_end + float(simpson(np.asarray(grad_sq), x=times)) - half_start
        coupling = float(simpson(np.asarray(pairing), x=times))
        out.append(CouplingRecord(float(delta), residual, coupling))
    return tuple(out)
