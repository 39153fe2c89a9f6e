"""Shared oracles for the test suite.

The fixed-step classical RK4 propagator below is deliberately independent
of the package's adaptive integrator: it hard-codes the vector field and
the Runge-Kutta arithmetic so that agreement between the two is a real
cross-check, not a tautology.
"""

from __future__ import annotations

import math

import pytest


def rk4_fixed(x, y, vx, vy, t_end, dt):
    """Classical 4th-order fixed-step integration of the planar
    two-electron field from t=0; returns (x, y, vx, vy) at t_end."""

    def acc(px, py):
        r3 = (px * px + py * py) ** 1.5
        return -8.0 * px / r3, -8.0 * py / r3 + 1.0 / (py * py)

    n = int(round(t_end / dt))
    t = 0.0
    for _ in range(n):
        ax1, ay1 = acc(x, y)
        k1 = (vx, vy, ax1, ay1)

        x2 = x + 0.5 * dt * k1[0]
        y2 = y + 0.5 * dt * k1[1]
        ax2, ay2 = acc(x2, y2)
        k2 = (vx + 0.5 * dt * k1[2], vy + 0.5 * dt * k1[3], ax2, ay2)

        x3 = x + 0.5 * dt * k2[0]
        y3 = y + 0.5 * dt * k2[1]
        ax3, ay3 = acc(x3, y3)
        k3 = (vx + 0.5 * dt * k2[2], vy + 0.5 * dt * k2[3], ax3, ay3)

        x4 = x + dt * k3[0]
        y4 = y + dt * k3[1]
        ax4, ay4 = acc(x4, y4)
        k4 = (vx + dt * k3[2], vy + dt * k3[3], ax4, ay4)

        x += dt * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
        y += dt * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
        vx += dt * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]) / 6.0
        vy += dt * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3]) / 6.0
        t += dt
    return x, y, vx, vy


def ulps(a: float, b: float) -> float:
    """|a - b| measured in units of the last place of the larger magnitude."""
    if a == b:
        return 0.0
    return abs(a - b) / math.ulp(max(abs(a), abs(b)))


@pytest.fixture
def rng():
    import random

    return random.Random(987654321)
