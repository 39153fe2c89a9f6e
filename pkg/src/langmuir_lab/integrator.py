"""Adaptive embedded Runge-Kutta integration with event detection.

The stepper is a Dormand-Prince 5(4) pair with PI step-size control.  Events
are localized by bisecting the sign of a residual in time; the candidate
state at an interior time is produced by a single fifth-order step from the
accepted step's start state (a re-integration, not a low-order interpolant).

Two vector fields are integrated with the same machinery: the planar
two-electron field (second-order form, state (x, y, vx, vy)) and its
circle-inverted counterpart used for the zero-energy analysis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import dynamics
from .dynamics import State
from .errors import DomainError, NoSignChange, StepUnderflow

Vec = tuple[float, float, float, float]
Rhs = Callable[[float, Vec], Vec]


class EventKind(str, enum.Enum):
    X_VELOCITY_ZERO = "XVelocityZero"
    Y_VELOCITY_ZERO = "YVelocityZero"
    MAGICAL_LINE_CROSS = "MagicalLineCross"
    BRAKE_POINT = "BrakePoint"
    COLLISION_PROXIMITY = "CollisionProximity"
    HILL_BOUNDARY_TOUCH = "HillBoundaryTouch"
    TIME_LIMIT = "TimeLimit"


# A brake point is numerically the same thing as a touch of the Hill
# boundary (speed-zero point); the integrator emits BRAKE_POINT.
_ALWAYS_STOP = (EventKind.COLLISION_PROXIMITY, EventKind.TIME_LIMIT)


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_min: float = 1e-14
    h_max: float = 0.1
    y_collision: float = 1e-6
    r_collision: float = 1e-6
    t_limit: float = 100.0
    event_tol: float = 1e-12
    brake_speed2: float = 1e-12  # speed^2 below which a speed minimum counts
    substeps: int = 0  # forced interior samples per accepted step

    def __post_init__(self):
        for name in (
            "rel_tol", "abs_tol", "h_min", "h_max", "y_collision",
            "r_collision", "t_limit", "event_tol", "brake_speed2",
        ):
            if not (getattr(self, name) > 0.0):
                raise DomainError(f"{name} must be positive")
        if not self.h_min < self.h_max:
            raise DomainError("h_min must be smaller than h_max")
        if self.event_tol > self.rel_tol:
            raise DomainError("event_tol must not exceed rel_tol")
        if self.substeps < 0:
            raise DomainError("substeps must be non-negative")


@dataclass(frozen=True)
class Event:
    kind: EventKind
    t: float
    state: State


@dataclass(frozen=True)
class Trajectory:
    samples: tuple[State, ...]
    events: tuple[Event, ...]
    max_energy_drift: float
    termination: EventKind

    def first_event(self, kind: EventKind) -> Optional[Event]:
        for ev in self.events:
            if ev.kind is kind:
                return ev
        return None


# Dormand-Prince 5(4) tableau.  The 7th stage is FSAL: its input equals the
# fifth-order solution, so b (order 5) is the last row of A.
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200,
       187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_A[6] + (0.0,), _B4))


def _stages(rhs: Rhs, t: float, y: Vec, h: float, k1: Vec):
    """All seven stages; returns (y5, ks)."""
    n = len(y)
    ks = [k1]
    yi = y
    for i in range(1, 7):
        ai = _A[i]
        yi = tuple(
            y[j] + h * sum(ai[m] * ks[m][j] for m in range(i))
            for j in range(n)
        )
        ks.append(rhs(t + _C[i] * h, yi))
    return yi, ks  # yi after the loop is the 5th-order solution


def _advance(rhs: Rhs, t: float, y: Vec, h: float, k1: Vec) -> Vec:
    """Single fifth-order step of size h (used for event localization and
    forced sub-samples)."""
    if h == 0.0:
        return y
    y5, _ = _stages(rhs, t, y, h, k1)
    return y5


def _error_ratio(y: Vec, y5: Vec, ks, h: float, st: IntegratorSettings) -> float:
    worst = 0.0
    for j in range(len(y)):
        err = h * math.fsum(_E[m] * ks[m][j] for m in range(7))
        scale = st.abs_tol + st.rel_tol * max(abs(y[j]), abs(y5[j]))
        worst = max(worst, abs(err) / scale)
    return worst


class _Run:
    """One adaptive integration; collects samples and events."""

    def __init__(
        self,
        rhs: Rhs,
        energy_fn: Callable[[Vec], float],
        y0: Vec,
        t0: float,
        settings: IntegratorSettings,
        residuals: dict[EventKind, Callable[[float, Vec], float]],
        stop_kinds: frozenset[EventKind],
        stop_after: Optional[tuple[EventKind, int]],
        sample_times: Sequence[float],
    ):
        self.rhs = rhs
        self.energy_fn = energy_fn
        self.st = settings
        self.residuals = residuals
        self.stop_kinds = stop_kinds
        self.stop_after = stop_after
        self.t = t0
        self.y = y0
        self.samples: list[tuple[float, Vec]] = [(t0, y0)]
        self.events: list[tuple[EventKind, float, Vec]] = []
        self.counts: dict[EventKind, int] = {}
        self.e0 = energy_fn(y0)
        self.drift = 0.0
        self.sample_times = [s for s in sorted(sample_times) if s > t0]
        self.termination: Optional[EventKind] = None

    def _record_drift(self, y: Vec):
        e = self.energy_fn(y)
        d = abs(e - self.e0)
        if self.e0 != 0.0:
            d /= abs(self.e0)
        if d > self.drift:
            self.drift = d

    def _is_stop(self, kind: EventKind) -> bool:
        if kind in _ALWAYS_STOP or kind in self.stop_kinds:
            return True
        if self.stop_after is not None and kind is self.stop_after[0]:
            return self.counts.get(kind, 0) >= self.stop_after[1]
        return False

    def _localize(self, f, t0, y0, k1, h_acc, r_lo) -> tuple[float, Vec]:
        """Bisect the residual sign change inside the accepted step."""
        lo, hi = 0.0, h_acc
        sign_lo = r_lo > 0.0
        while hi - lo > self.st.event_tol:
            mid = 0.5 * (lo + hi)
            r_mid = f(t0 + mid, _advance(self.rhs, t0, y0, mid, k1))
            if (r_mid > 0.0) == sign_lo and r_mid != 0.0:
                lo = mid
            else:
                hi = mid
        tau = 0.5 * (lo + hi)
        return t0 + tau, _advance(self.rhs, t0, y0, tau, k1)

    def _scan_events(self, t0, y0, k1, h_acc, y_new, res_prev) -> list:
        t_new = t0 + h_acc
        found = []
        for kind, f in self.residuals.items():
            r0 = res_prev[kind]
            r1 = f(t_new, y_new)
            crossed = (r0 > 0.0 and r1 <= 0.0) or (r0 < 0.0 and r1 >= 0.0)
            if not crossed:
                continue
            if r1 == 0.0:
                t_ev, y_ev = t_new, y_new
            else:
                t_ev, y_ev = self._localize(f, t0, y0, k1, h_acc, r0)
            if kind is EventKind.BRAKE_POINT:
                # residual is d(speed^2)/dt; only minima below the
                # threshold count as actual boundary touches
                if not (r0 < 0.0 <= r1):
                    continue
                if y_ev[2] ** 2 + y_ev[3] ** 2 > self.st.brake_speed2:
                    continue
            found.append((t_ev, kind, y_ev))
        found.sort(key=lambda item: item[0])
        return found

    def run(self):
        st = self.st
        rhs = self.rhs
        k1 = rhs(self.t, self.y)
        res_prev = {k: f(self.t, self.y) for k, f in self.residuals.items()}
        h = min(st.h_max, 1e-3)
        err_old = 1.0
        while True:
            if st.t_limit - self.t < st.h_min:
                self._finish_time_limit()
                return
            h = min(h, st.h_max, st.t_limit - self.t)
            while self.sample_times and self.sample_times[0] <= self.t:
                self.sample_times.pop(0)
            if self.sample_times:
                gap = self.sample_times[0] - self.t
                if gap < h:
                    h = gap
            if h < st.h_min:
                raise StepUnderflow(self.t, _vec_to_state(self.t, self.y))

            y5, ks = _stages(rhs, self.t, self.y, h, k1)
            ratio = _error_ratio(self.y, y5, ks, h, st)
            if not math.isfinite(ratio) or ratio > 1.0:
                if not math.isfinite(ratio):
                    h *= 0.2
                else:
                    h *= max(0.1, 0.9 * ratio ** -0.2)
                if h < st.h_min:
                    raise StepUnderflow(self.t, _vec_to_state(self.t, self.y))
                continue

            # accepted
            t0, y0, h_acc = self.t, self.y, h
            t_new, y_new = t0 + h, y5
            stepped = self._scan_events(t0, y0, k1, h_acc, y_new, res_prev)
            stopped = False
            for t_ev, kind, y_ev in stepped:
                self.counts[kind] = self.counts.get(kind, 0) + 1
                self.events.append((kind, t_ev, y_ev))
                if self._is_stop(kind):
                    self._append_substeps(t0, y0, k1, t_ev - t0)
                    self.samples.append((t_ev, y_ev))
                    self._record_drift(y_ev)
                    self.termination = kind
                    stopped = True
                    break
            if stopped:
                return

            self._append_substeps(t0, y0, k1, h_acc)
            self.samples.append((t_new, y_new))
            self._record_drift(y_new)
            for kind, f in self.residuals.items():
                res_prev[kind] = f(t_new, y_new)
            self.t, self.y, k1 = t_new, y_new, ks[6]

            # PI controller (accepted step)
            e = max(ratio, 1e-10)
            fac = 0.9 * e ** -0.14 * err_old ** 0.08
            err_old = e
            h = h_acc * min(5.0, max(0.2, fac))

    def _append_substeps(self, t0, y0, k1, h_span):
        n = self.st.substeps
        if n <= 0 or h_span <= 0.0:
            return
        for j in range(1, n + 1):
            tau = h_span * j / (n + 1)
            y_sub = _advance(self.rhs, t0, y0, tau, k1)
            self.samples.append((t0 + tau, y_sub))
            self._record_drift(y_sub)

    def _finish_time_limit(self):
        kind = EventKind.TIME_LIMIT
        self.events.append((kind, self.t, self.y))
        self.termination = kind


def _vec_to_state(t: float, y: Vec) -> State:
    return State(t=t, x=y[0], y=y[1], vx=y[2], vy=y[3])


def _langmuir_rhs(t: float, y: Vec) -> Vec:
    ax, ay = dynamics.acceleration(y[0], y[1])
    return (y[2], y[3], ax, ay)


def _inverted_rhs(t: float, y: Vec) -> Vec:
    ax, ay = dynamics.inverted_acceleration(y[0], y[1])
    return (y[2], y[3], ax, ay)


def _langmuir_energy(y: Vec) -> float:
    return dynamics.energy(_vec_to_state(0.0, y))


def _inverted_energy(y: Vec) -> float:
    return dynamics.inverted_energy(_vec_to_state(0.0, y))


def _residual_map(settings: IntegratorSettings, rhs: Rhs):
    """Defining residuals for each locatable event kind."""

    def brake(t, y):
        k = rhs(t, y)
        return 2.0 * (y[2] * k[2] + y[3] * k[3])

    return {
        EventKind.X_VELOCITY_ZERO: lambda t, y: y[2],
        EventKind.Y_VELOCITY_ZERO: lambda t, y: y[3],
        EventKind.MAGICAL_LINE_CROSS:
            lambda t, y: dynamics.SQRT3 * y[1] - abs(y[0]),
        EventKind.BRAKE_POINT: brake,
        EventKind.COLLISION_PROXIMITY:
            lambda t, y: min(y[1] - settings.y_collision,
                             math.hypot(y[0], y[1]) - settings.r_collision),
    }


def _build_trajectory(run: _Run) -> Trajectory:
    samples = tuple(_vec_to_state(t, y) for t, y in run.samples)
    events = tuple(
        Event(kind=k, t=t, state=_vec_to_state(t, y))
        for k, t, y in run.events
    )
    return Trajectory(
        samples=samples,
        events=events,
        max_energy_drift=run.drift,
        termination=run.termination,
    )


def _integrate_chart(
    rhs: Rhs,
    energy_fn,
    s0: State,
    settings: IntegratorSettings,
    watch: Iterable[EventKind],
    stop_on: Iterable[EventKind],
    stop_after: Optional[tuple[EventKind, int]],
    sample_times: Sequence[float],
) -> Trajectory:
    if s0.y <= 0.0:
        raise DomainError(f"initial state must have y > 0, got y={s0.y}")
    watch = set(watch)
    stop_on = frozenset(stop_on)
    if not stop_on <= (watch | set(_ALWAYS_STOP)):
        raise DomainError("stop_on must be a subset of watch plus the "
                          "collision/time-limit stops")
    if stop_after is not None:
        watch.add(stop_after[0])
    all_res = _residual_map(settings, rhs)
    residuals = {k: all_res[k] for k in watch if k in all_res}
    residuals[EventKind.COLLISION_PROXIMITY] = \
        all_res[EventKind.COLLISION_PROXIMITY]
    run = _Run(
        rhs, energy_fn, (s0.x, s0.y, s0.vx, s0.vy), s0.t, settings,
        residuals, stop_on, stop_after, sample_times,
    )
    run.run()
    return _build_trajectory(run)


def integrate(
    s0: State,
    settings: IntegratorSettings = IntegratorSettings(),
    watch: Iterable[EventKind] = (),
    stop_on: Iterable[EventKind] = (),
    stop_after: Optional[tuple[EventKind, int]] = None,
    sample_times: Sequence[float] = (),
) -> Trajectory:
    """Integrate the planar two-electron field forward from s0 until the
    first stopping event (or the n-th occurrence given by stop_after),
    recording all watched events.  Collision proximity and the time limit
    always stop the run."""
    return _integrate_chart(
        _langmuir_rhs, _langmuir_energy, s0, settings, watch, stop_on,
        stop_after, sample_times,
    )


def integrate_inverted(
    s0: State,
    settings: IntegratorSettings = IntegratorSettings(),
    sample_times: Sequence[float] = (),
) -> Trajectory:
    """Integrate the circle-inverted chart (used for zero-energy runs);
    s0 must already live in that chart, e.g. invert_state(initial_state(...))."""
    return _integrate_chart(
        _inverted_rhs, _inverted_energy, s0, settings, (), (), None,
        sample_times,
    )


def locate_event(
    bracket: tuple[State, State],
    residual,
    settings: IntegratorSettings = IntegratorSettings(),
) -> Event:
    """Bisect an event inside a bracket of two states on the same solution.

    `residual` is an EventKind (its defining residual is used) or a callable
    State -> float.  The bracket endpoints must straddle a sign change.
    The returned state is produced by re-integration from the left endpoint.
    """
    s_lo, s_hi = bracket
    rhs = _langmuir_rhs
    if isinstance(residual, EventKind):
        f_vec = _residual_map(settings, rhs)[residual]
        kind = residual
    else:
        f_vec = lambda t, y: residual(_vec_to_state(t, y))  # noqa: E731
        kind = None
    span = s_hi.t - s_lo.t
    if span <= 0.0:
        raise NoSignChange("bracket must have increasing time")
    y0 = (s_lo.x, s_lo.y, s_lo.vx, s_lo.vy)
    k1 = rhs(s_lo.t, y0)
    r_lo = f_vec(s_lo.t, y0)
    r_hi = f_vec(s_hi.t, (s_hi.x, s_hi.y, s_hi.vx, s_hi.vy))
    if r_lo == 0.0:
        return Event(kind=kind, t=s_lo.t, state=s_lo)
    if not ((r_lo > 0.0) != (r_hi > 0.0) or r_hi == 0.0):
        raise NoSignChange(
            f"residual does not change sign over the bracket "
            f"({r_lo} .. {r_hi})"
        )
    lo, hi = 0.0, span
    sign_lo = r_lo > 0.0
    while hi - lo > settings.event_tol:
        mid = 0.5 * (lo + hi)
        r_mid = f_vec(s_lo.t + mid, _advance(rhs, s_lo.t, y0, mid, k1))
        if (r_mid > 0.0) == sign_lo and r_mid != 0.0:
            lo = mid
        else:
            hi = mid
    tau = 0.5 * (lo + hi)
    y_ev = _advance(rhs, s_lo.t, y0, tau, k1)
    return Event(kind=kind, t=s_lo.t + tau, state=_vec_to_state(s_lo.t + tau, y_ev))
