"""Numeric verification of the quantitative ingredients behind the
existence argument for the periodic orbit.

Each check integrates something and reduces it to a single worst-case
violation number; a check passes iff that number is at or below its
tolerance.  Sign checks use tolerance 0 with the convention that negative
worst_violation means "safely on the right side".
"""

from __future__ import annotations

import math
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

from . import dynamics
from .dynamics import ProblemSpec, State
from .errors import NoRest
from .integrator import EventKind, IntegratorSettings, integrate, integrate_inverted
from .shooting import default_grid, shoot

# Deceleration bound: inside the Hill region at E=-1 both |x| and y are at
# most 7/2, so x'' <= -8*gamma*x with gamma = (49/4 + 49/4)^(-3/2); a
# harmonic oscillator with that stiffness rests at pi/(2*sqrt(8*gamma)).
GAMMA = (49.0 / 4.0 + 49.0 / 4.0) ** -1.5
T_MAX = math.pi / (2.0 * math.sqrt(8.0 * GAMMA))


@dataclass(frozen=True)
class CheckReport:
    name: str
    passed: bool
    worst_violation: float
    tolerance: float
    details: dict

    @staticmethod
    def from_violation(name, worst, tol, details):
        return CheckReport(
            name=name,
            passed=worst <= tol,
            worst_violation=worst,
            tolerance=tol,
            details=details,
        )


def check_initial_acceleration(
    h_samples: Optional[Sequence[float]] = None,
) -> CheckReport:
    """Vertical force at the launch point (0, h) equals -7/h^2 exactly."""
    if h_samples is None:
        rng = random.Random(20210703)
        h_samples = [rng.uniform(1e-3, 100.0) for _ in range(1000)]
    worst = 0.0
    worst_h = None
    for h in h_samples:
        _, ay = dynamics.acceleration(0.0, h)
        err = abs(ay + 7.0 / (h * h))
        if err > worst:
            worst, worst_h = err, h
    return CheckReport.from_violation(
        "initial_acceleration",
        worst,
        1e-12,
        {"n_samples": len(h_samples), "worst_h": worst_h},
    )


def check_tmax_bound(
    h_grid: Optional[Sequence[float]] = None,
    settings: IntegratorSettings = IntegratorSettings(),
) -> CheckReport:
    """Every first x-rest at E=-1 happens no later than T_MAX."""
    if h_grid is None:
        h_grid = default_grid()
    worst = -math.inf
    times = {}
    failures = []
    for h in h_grid:
        try:
            res = shoot(-1.0, h, settings)
        except NoRest as exc:
            failures.append((h, str(exc)))
            continue
        times[h] = res.t_h
        worst = max(worst, res.t_h - T_MAX)
    margin = min((T_MAX - t) / T_MAX for t in times.values()) if times else None
    return CheckReport.from_violation(
        "tmax_bound",
        worst,
        0.0,
        {
            "t_max": T_MAX,
            "gamma": GAMMA,
            "n_ok": len(times),
            "no_rest": failures,
            "min_relative_margin": margin,
        },
    )


def check_magical_prefix(
    h_grid: Optional[Sequence[float]] = None,
    settings: IntegratorSettings = IntegratorSettings(),
) -> CheckReport:
    """Until its first crossing of the vanishing-vertical-force line the
    trajectory keeps moving downward (vy < 0 on (0, first crossing])."""
    if h_grid is None:
        h_grid = default_grid()
    settings = replace(settings, substeps=10)
    worst = -math.inf
    vacuous = []
    checked = 0
    for h in h_grid:
        s0 = dynamics.initial_state(ProblemSpec(E=-1.0, h=h))
        traj = integrate(
            s0,
            settings,
            watch={EventKind.MAGICAL_LINE_CROSS, EventKind.X_VELOCITY_ZERO},
            stop_on={EventKind.X_VELOCITY_ZERO},
        )
        cross = traj.first_event(EventKind.MAGICAL_LINE_CROSS)
        if cross is None:
            vacuous.append(h)
            continue
        checked += 1
        worst = max(worst, cross.state.vy)
        for s in traj.samples:
            if 0.0 < s.t <= cross.t:
                worst = max(worst, s.vy)
    return CheckReport.from_violation(
        "magical_prefix",
        worst,
        0.0,
        {"n_checked": checked, "no_crossing": vacuous},
    )


def check_zero_energy_monotone(
    t_end: float = 50.0,
    settings: IntegratorSettings = IntegratorSettings(),
) -> CheckReport:
    """On the zero-energy run the distance from the nucleus grows
    monotonically (r' > 0 for t >= 0.01) and the orbit stays inside the
    unbounded zero-energy Hill region y >= |x|/sqrt(63)."""
    if not (t_end > 0.0):
        raise ValueError(f"t_end must be positive, got {t_end}")
    settings = replace(settings, t_limit=t_end, substeps=10)
    s0 = dynamics.initial_state(ProblemSpec(E=0.0, h=1.0))
    traj = integrate(s0, settings)
    min_rdot = math.inf
    hill_worst = -math.inf
    y_above_one = 0  # diagnostic only; see details
    for s in traj.samples:
        if s.t >= 0.01:
            min_rdot = min(min_rdot, dynamics.radial_velocity(s))
        hill_worst = max(hill_worst, abs(s.x) / math.sqrt(63.0) - s.y)
        if s.t > 0.0 and s.y > 1.0:
            y_above_one += 1
    worst = max(-min_rdot, hill_worst)
    return CheckReport.from_violation(
        "zero_energy_monotone",
        worst,
        0.0,
        {
            "t_end": t_end,
            "min_radial_velocity": min_rdot,
            "hill_worst": hill_worst,
            "n_samples": len(traj.samples),
            "max_energy_drift": traj.max_energy_drift,
            # descent of the zero-energy orbit (y <= 1 after launch) is a
            # diagnostic, not a gate
            "samples_with_y_above_1": y_above_one,
        },
    )


def _nonuniform_derivative(tm, t0, tp, fm, f0, fp) -> float:
    """First derivative at t0 from three non-equidistant samples."""
    hm = t0 - tm
    hp = tp - t0
    return (
        -hp / (hm * (hm + hp)) * fm
        + (hp - hm) / (hm * hp) * f0
        + hm / (hp * (hm + hp)) * fp
    )


def check_inverted_concavity(
    t_end: float = 0.3,
    settings: IntegratorSettings = IntegratorSettings(),
) -> CheckReport:
    """In the inverted chart the radius is strictly concave: the closed form
    r'' = (2/r)(-3 p_r^2 - p_phi^2/r^2) is negative everywhere and must
    agree with a finite-difference estimate from the sampled r'."""
    if not (t_end > 0.0):
        raise ValueError(f"t_end must be positive, got {t_end}")
    settings = replace(settings, t_limit=t_end, h_max=1e-3)
    s0 = dynamics.invert_state(
        dynamics.initial_state(ProblemSpec(E=0.0, h=1.0))
    )
    traj = integrate_inverted(s0, settings)
    polar = [dynamics.to_polar(s) for s in traj.samples]
    concavity_worst = -math.inf
    fd_worst = -math.inf
    pr_worst = -math.inf
    for i, ps in enumerate(polar):
        rdd = (2.0 / ps.r) * (-3.0 * ps.pr**2 - ps.pphi**2 / ps.r**2)
        concavity_worst = max(concavity_worst, rdd)
        if ps.t > 0.0:
            pr_worst = max(pr_worst, ps.pr)
        if 0 < i < len(polar) - 1:
            pm, pp = polar[i - 1], polar[i + 1]
            rdd_fd = _nonuniform_derivative(
                pm.t, ps.t, pp.t, 2.0 * pm.pr, 2.0 * ps.pr, 2.0 * pp.pr
            )
            fd_worst = max(
                fd_worst,
                abs(rdd - rdd_fd) - max(1e-6, 1e-3 * abs(rdd)),
            )
    worst = max(concavity_worst, fd_worst)
    return CheckReport.from_violation(
        "inverted_concavity",
        worst,
        0.0,
        {
            "t_end": t_end,
            "max_closed_form_rdd": concavity_worst,
            "fd_mismatch_worst": fd_worst,
            "max_pr_after_start": pr_worst,
            "initial_pr": polar[0].pr,
            "max_energy_drift": traj.max_energy_drift,
            "final_r": polar[-1].r,
            "termination": traj.termination.value,
        },
    )


def check_tau_growth(
    h_sequence: Sequence[float] = (0.5, 0.2, 0.1, 0.05),
    settings: IntegratorSettings = IntegratorSettings(),
) -> CheckReport:
    """First x-rest times of the fixed-height-1 problems at energies -h grow
    strictly as h decreases towards ionization."""
    taus = []
    for h in h_sequence:
        if not (h > 0.0):
            raise ValueError("h_sequence must be positive")
        st = replace(settings, t_limit=max(settings.t_limit, 20.0 * h**-1.5))
        s0 = dynamics.initial_state(ProblemSpec(E=-h, h=1.0))
        traj = integrate(
            s0,
            st,
            watch={EventKind.X_VELOCITY_ZERO},
            stop_on={EventKind.X_VELOCITY_ZERO},
        )
        if traj.termination is not EventKind.X_VELOCITY_ZERO:
            raise NoRest(1, traj.termination.value)
        taus.append(traj.first_event(EventKind.X_VELOCITY_ZERO).t)
    worst = max(
        (a - b for a, b in zip(taus, taus[1:])), default=-math.inf
    )
    return CheckReport.from_violation(
        "tau_growth",
        worst,
        0.0,
        {"h_sequence": list(h_sequence), "tau": taus},
    )


def check_energy_drift(
    h_grid: Sequence[float] = (0.5, 1.0, 1.398, 3.0),
    settings: IntegratorSettings = IntegratorSettings(),
) -> CheckReport:
    """Relative energy drift of E=-1 shooting runs stays within 1e-8."""
    worst = 0.0
    drifts = {}
    for h in h_grid:
        res = shoot(-1.0, h, settings)
        drifts[h] = res.energy_drift
        worst = max(worst, res.energy_drift)
    return CheckReport.from_violation(
        "energy_drift", worst, 1e-8, {"drift_by_h": drifts}
    )


_ALL_CHECKS = (
    check_energy_drift,
    check_initial_acceleration,
    check_inverted_concavity,
    check_magical_prefix,
    check_tau_growth,
    check_tmax_bound,
    check_zero_energy_monotone,
)


def run_all_checks(
    settings: IntegratorSettings = IntegratorSettings(),
    max_workers: Optional[int] = None,
) -> list[CheckReport]:
    """Execute the whole suite concurrently; reports sorted by name."""

    def call(fn):
        if fn is check_initial_acceleration:
            return fn()
        return fn(settings=settings)

    cap = os.environ.get("LANGMUIR_LAB_THREADS")
    workers = max_workers or (int(cap) if cap else (os.cpu_count() or 1))
    if workers <= 1:
        reports = [call(fn) for fn in _ALL_CHECKS]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(call, _ALL_CHECKS))
    return sorted(reports, key=lambda r: r.name)
