"""Shooting functional and periodic-orbit search.

The shooting functional alpha(h) is the vertical velocity at the first time
the horizontal velocity vanishes; its zeros are heights whose trajectory
comes to a full stop on the Hill boundary and therefore closes into a
periodic orbit of period 4T by time reversal and x-reflection.  A
generalized alpha_k (vertical velocity at the k-th x-rest) captures the
second, multi-reflection orbit.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

from . import dynamics
from .dynamics import ProblemSpec, State
from .errors import BadBracket, ClosureFailure, NoConvergence, NoRest
from .integrator import (
    Event,
    EventKind,
    IntegratorSettings,
    Trajectory,
    integrate,
)

ALPHA_TOL = 1e-8
TOUCH_SPEED_TOL = 1e-6
DEFAULT_BRACKET = (0.5, 3.0)
DEFAULT_BRAKE_BRACKET = (0.3, 0.8)
DEFAULT_GRID_RANGE = (0.05, 3.45)
DEFAULT_GRID_SIZE = 50


@dataclass(frozen=True)
class ShootResult:
    h: float
    t_h: float
    alpha: float
    state_at_th: State
    n_magical_crossings: int
    energy_drift: float
    status: str = "ok"


@dataclass(frozen=True)
class OrbitRecord:
    E: float
    h_star: float
    quarter_period: float
    touch_state: State
    alpha_residual: float
    kind: str  # "Langmuir" or "Brake-<k>"
    solver_trace: tuple[tuple[float, float], ...]

    def reflection_count(self) -> int:
        if self.kind == "Langmuir":
            return 1
        return int(self.kind.split("-", 1)[1])


def _worker_count() -> int:
    cap = os.environ.get("LANGMUIR_LAB_THREADS")
    if cap:
        return max(1, int(cap))
    return os.cpu_count() or 1


def shoot(
    E: float,
    h: float,
    settings: IntegratorSettings = IntegratorSettings(),
) -> ShootResult:
    """Integrate the horizontal-launch problem to its first x-rest."""
    s0 = dynamics.initial_state(ProblemSpec(E=E, h=h))
    traj = integrate(
        s0,
        settings,
        watch={EventKind.X_VELOCITY_ZERO, EventKind.MAGICAL_LINE_CROSS},
        stop_on={EventKind.X_VELOCITY_ZERO},
    )
    if traj.termination is not EventKind.X_VELOCITY_ZERO:
        raise NoRest(1, traj.termination.value)
    ev = traj.first_event(EventKind.X_VELOCITY_ZERO)
    crossings = sum(
        1 for e in traj.events if e.kind is EventKind.MAGICAL_LINE_CROSS
    )
    return ShootResult(
        h=h,
        t_h=ev.t,
        alpha=ev.state.vy,
        state_at_th=ev.state,
        n_magical_crossings=crossings,
        energy_drift=traj.max_energy_drift,
    )


def _rest_event(
    E: float, h: float, k: int, settings: IntegratorSettings
) -> Event:
    s0 = dynamics.initial_state(ProblemSpec(E=E, h=h))
    traj = integrate(
        s0,
        settings,
        watch={EventKind.X_VELOCITY_ZERO},
        stop_after=(EventKind.X_VELOCITY_ZERO, k),
    )
    rests = [e for e in traj.events if e.kind is EventKind.X_VELOCITY_ZERO]
    if len(rests) < k:
        raise NoRest(k, traj.termination.value)
    return rests[k - 1]


def alpha_k(
    E: float,
    h: float,
    k: int,
    settings: IntegratorSettings = IntegratorSettings(),
) -> float:
    """Vertical velocity at the k-th x-rest; alpha_1 is shoot(...).alpha."""
    if k < 1:
        raise ValueError(f"rest count must be >= 1, got {k}")
    return _rest_event(E, h, k, settings).state.vy


def _solve_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol_f: float,
    max_iter: int,
    trace: list[tuple[float, float]],
) -> tuple[float, float]:
    """Bisection with secant acceleration; secant steps leaving the bracket
    fall back to the midpoint."""
    fa, fb = f(lo), f(hi)
    trace += [(lo, fa), (hi, fb)]
    if abs(fa) <= tol_f:
        return lo, fa
    if abs(fb) <= tol_f:
        return hi, fb
    if (fa > 0.0) == (fb > 0.0):
        raise BadBracket(
            f"no sign change on [{lo}, {hi}]: f(lo)={fa}, f(hi)={fb}"
        )
    a, b = lo, hi
    x_prev, f_prev, x, fx = a, fa, b, fb
    for _ in range(max_iter):
        if fx != f_prev:
            cand = x - fx * (x - x_prev) / (fx - f_prev)
        else:
            cand = 0.5 * (a + b)
        if not (a < cand < b):
            cand = 0.5 * (a + b)
        fc = f(cand)
        trace.append((cand, fc))
        if abs(fc) <= tol_f:
            return cand, fc
        if (fc > 0.0) == (fa > 0.0):
            a, fa = cand, fc
        else:
            b, fb = cand, fc
        x_prev, f_prev, x, fx = x, fx, cand, fc
    raise NoConvergence(
        f"|residual| > {tol_f} after {max_iter} iterations on [{lo}, {hi}]"
    )


def _find_orbit(
    E: float,
    bracket: tuple[float, float],
    k: int,
    kind: str,
    settings: IntegratorSettings,
    max_iter: int,
) -> OrbitRecord:
    trace: list[tuple[float, float]] = []

    def f(h: float) -> float:
        return _rest_event(E, h, k, settings).state.vy

    h_star, residual = _solve_bracketed(
        f, bracket[0], bracket[1], ALPHA_TOL, max_iter, trace
    )
    touch = _rest_event(E, h_star, k, settings)
    speed = math.sqrt(touch.state.speed2())
    if speed > TOUCH_SPEED_TOL:
        raise NoConvergence(
            f"touch speed {speed} exceeds {TOUCH_SPEED_TOL} at h={h_star}"
        )
    return OrbitRecord(
        E=E,
        h_star=h_star,
        quarter_period=touch.t,
        touch_state=touch.state,
        alpha_residual=residual,
        kind=kind,
        solver_trace=tuple(trace),
    )


def find_langmuir_orbit(
    E: float,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    settings: IntegratorSettings = IntegratorSettings(),
    max_iter: int = 200,
) -> OrbitRecord:
    """Root of alpha on the bracket: the simple back-and-forth orbit."""
    if not (E < 0.0):
        raise ValueError(f"orbit search requires E < 0, got {E}")
    return _find_orbit(E, bracket, 1, "Langmuir", settings, max_iter)


def find_brake_orbit(
    E: float,
    bracket: tuple[float, float] = DEFAULT_BRAKE_BRACKET,
    k: Optional[int] = None,
    settings: IntegratorSettings = IntegratorSettings(),
    max_iter: int = 200,
) -> OrbitRecord:
    """Root of alpha_k on the bracket: the multi-reflection orbit.  When k
    is not given it is chosen by classify_reflection_count."""
    if not (E < 0.0):
        raise ValueError(f"orbit search requires E < 0, got {E}")
    if k is None:
        k = classify_reflection_count(E, bracket, settings)
    return _find_orbit(E, bracket, k, f"Brake-{k}", settings, max_iter)


def classify_reflection_count(
    E: float,
    bracket: tuple[float, float] = DEFAULT_BRAKE_BRACKET,
    settings: IntegratorSettings = IntegratorSettings(),
    k_max: int = 8,
) -> int:
    """Smallest rest count k at which alpha_k differs in sign between the
    bracket endpoints (the trajectory end is reflected on opposite sides)."""
    for k in range(1, k_max + 1):
        try:
            a = alpha_k(E, bracket[0], k, settings)
            b = alpha_k(E, bracket[1], k, settings)
        except NoRest:
            continue
        if (a > 0.0) != (b > 0.0):
            return k
    raise BadBracket(
        f"no rest count up to {k_max} separates the bracket {bracket}"
    )


def scan_alpha(
    E: float,
    h_grid: Sequence[float],
    settings: IntegratorSettings = IntegratorSettings(),
    max_workers: Optional[int] = None,
) -> list[ShootResult]:
    """shoot() over a grid; failures become status='NoRest' placeholders.
    Runs are independent and execute on a worker pool, results in grid
    order."""

    def one(h: float) -> ShootResult:
        try:
            return shoot(E, h, settings)
        except NoRest as exc:
            return ShootResult(
                h=h,
                t_h=math.nan,
                alpha=math.nan,
                state_at_th=dynamics.initial_state(ProblemSpec(E=E, h=h)),
                n_magical_crossings=0,
                energy_drift=math.nan,
                status=f"NoRest({exc.termination})",
            )

    workers = max_workers or _worker_count()
    if workers <= 1 or len(h_grid) <= 1:
        return [one(h) for h in h_grid]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, h_grid))


def default_grid(
    lo: float = DEFAULT_GRID_RANGE[0],
    hi: float = DEFAULT_GRID_RANGE[1],
    n: int = DEFAULT_GRID_SIZE,
) -> list[float]:
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def sign_change_brackets(results: Sequence[ShootResult]) -> list[tuple[float, float]]:
    """Adjacent grid pairs with opposite alpha signs (NoRest points skipped)."""
    ok = [r for r in results if r.status == "ok"]
    out = []
    for a, b in zip(ok, ok[1:]):
        if (a.alpha > 0.0) != (b.alpha > 0.0):
            out.append((a.h, b.h))
    return out


def assemble_periodic_orbit(
    rec: OrbitRecord,
    settings: IntegratorSettings = IntegratorSettings(),
    closure_tol: float = 1e-6,
) -> Trajectory:
    """Close the quarter arc into the full period-4T orbit.

    [0, T]   the integrated quarter arc,
    [T, 2T]  its time reversal (velocities negated),
    [2T, 4T] the x-reflection of the first half.

    Before assembling, the quarter is re-integrated backwards from the
    touch point with negated velocities and must retrace the forward arc
    within closure_tol, else ClosureFailure.
    """
    k = rec.reflection_count()
    s0 = dynamics.initial_state(ProblemSpec(E=rec.E, h=rec.h_star))
    quarter = integrate(
        s0,
        settings,
        watch={EventKind.X_VELOCITY_ZERO},
        stop_after=(EventKind.X_VELOCITY_ZERO, k),
    )
    if quarter.termination is not EventKind.X_VELOCITY_ZERO:
        raise ClosureFailure(
            f"quarter arc terminated by {quarter.termination.value}"
        )
    T = quarter.samples[-1].t

    touch = quarter.samples[-1]
    back_start = State(t=0.0, x=touch.x, y=touch.y, vx=-touch.vx, vy=-touch.vy)
    fwd = quarter.samples
    back_times = [T - s.t for s in reversed(fwd[:-1])]
    back = integrate(
        back_start, replace(settings, t_limit=T), sample_times=back_times
    )
    by_time = {round(s.t, 12): s for s in back.samples}
    worst = 0.0
    for s in fwd[:-1]:
        mirror = by_time.get(round(T - s.t, 12))
        if mirror is None:
            continue
        worst = max(
            worst,
            abs(mirror.x - s.x),
            abs(mirror.y - s.y),
            abs(mirror.vx + s.vx),
            abs(mirror.vy + s.vy),
        )
    if worst > closure_tol:
        raise ClosureFailure(
            f"reversed arc deviates from the forward arc by {worst}"
        )

    samples: list[State] = list(fwd)
    # time reversal: t in (T, 2T]
    for s in reversed(fwd[:-1]):
        samples.append(
            State(t=2.0 * T - s.t, x=s.x, y=s.y, vx=-s.vx, vy=-s.vy)
        )
    # x-reflection of the first half: t in (2T, 4T]
    for s in list(samples[1:]):
        samples.append(
            State(t=2.0 * T + s.t, x=-s.x, y=s.y, vx=-s.vx, vy=s.vy)
        )
    return Trajectory(
        samples=tuple(samples),
        events=quarter.events,
        max_energy_drift=quarter.max_energy_drift,
        termination=quarter.termination,
    )
