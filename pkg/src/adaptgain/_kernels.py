"""Compiled inner loops for the ODE integrator and the agent-based simulator.

The integrator advances ``z = logit(x)`` and ``ln g`` rather than ``(x, g)``.
In these coordinates the replicator field becomes the payoff difference and
the gain field becomes ``phi(x)``, both bounded on the invariant domain, so a
fixed-step RK4 stays stable when the gain grows large and the boundaries
``x = 0``, ``x = 1``, ``g = 0`` are preserved exactly (they map to infinities
that RK4 carries unchanged).
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_NONFINITE = 1
STATUS_OVERFLOW = 2
STATUS_RATE = 3


@njit(cache=True)
def expit(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(cache=True)
def log_share(z):
    """ln x for x = expit(z)."""
    if z >= 0.0:
        return -math.log1p(math.exp(-z))
    return z - math.log1p(math.exp(z))


@njit(cache=True)
def bracket(p, x, g):
    a, b, c, d = p[0], p[1], p[2], p[3]
    u = p[4] - p[6]
    v = p[5] - p[7]
    return (a + d - b - c) * x + b - d + u * g * x + v * g * (1.0 - x)


@njit(cache=True)
def adapt_rate(p, z, x):
    fam = p[8]
    if fam == 1.0:
        return p[9] * (x - p[10])
    if fam == 2.0:
        return p[9] * math.exp(p[10] * log_share(z))
    return 0.0


@njit(cache=True)
def rk4_increment(p, z, g, dt):
    """RK4 increments (dz, d ln g) over one step from (z, g)."""
    x = expit(z)
    k1z = bracket(p, x, g)
    k1w = adapt_rate(p, z, x)

    z2 = z + 0.5 * dt * k1z
    g2 = g * math.exp(0.5 * dt * k1w)
    x2 = expit(z2)
    k2z = bracket(p, x2, g2)
    k2w = adapt_rate(p, z2, x2)

    z3 = z + 0.5 * dt * k2z
    g3 = g * math.exp(0.5 * dt * k2w)
    x3 = expit(z3)
    k3z = bracket(p, x3, g3)
    k3w = adapt_rate(p, z3, x3)

    z4 = z + dt * k3z
    g4 = g * math.exp(dt * k3w)
    x4 = expit(z4)
    k4z = bracket(p, x4, g4)
    k4w = adapt_rate(p, z4, x4)

    dz = dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    dw = dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
    return dz, dw


@njit(cache=True)
def rk4_step(p, z, g, dt):
    dz, dw = rk4_increment(p, z, g, dt)
    return z + dz, g * math.exp(dw)


@njit(cache=True)
def _kahan(total, comp, inc):
    # compensated accumulation; infinities (boundary states) pass through untouched
    if math.isinf(total):
        return total, comp
    y = inc - comp
    t = total + y
    return t, (t - total) - y


@njit(cache=True)
def rk4_run(p, z0, g0, dt, n_steps, record_every, g_max):
    """Returns (times, z, g, status, failing step).

    ``z`` and ``ln(g / g0)`` are accumulated with compensated summation so that
    very small steps are not swamped by rounding.
    """
    n_rec = n_steps // record_every + 1
    if n_steps % record_every != 0:
        n_rec += 1
    times = np.empty(n_rec)
    zs = np.empty(n_rec)
    gs = np.empty(n_rec)
    times[0] = 0.0
    zs[0] = z0
    gs[0] = g0
    z = z0
    cz = 0.0
    w = 0.0
    cw = 0.0
    g = g0
    j = 1
    for i in range(1, n_steps + 1):
        dz, dw = rk4_increment(p, z, g, dt)
        z, cz = _kahan(z, cz, dz)
        w, cw = _kahan(w, cw, dw)
        g = g0 * math.exp(w)
        if math.isnan(z) or not math.isfinite(g):
            return times[:j], zs[:j], gs[:j], STATUS_NONFINITE, i
        if g > g_max:
            return times[:j], zs[:j], gs[:j], STATUS_OVERFLOW, i
        if i % record_every == 0 or i == n_steps:
            times[j] = i * dt
            zs[j] = z
            gs[j] = g
            j += 1
    return times[:j], zs[:j], gs[:j], STATUS_OK, n_steps


@njit(cache=True)
def euler_run(p, x0, g0, dt, n_steps):
    """Explicit Euler directly in (x, g); used only as a test reference."""
    x = x0
    g = g0
    for _ in range(n_steps):
        dx = x * (1.0 - x) * bracket(p, x, g)
        fam = p[8]
        if fam == 1.0:
            rate = p[9] * (x - p[10])
        elif fam == 2.0:
            rate = p[9] * x ** p[10]
        else:
            rate = 0.0
        x, g = x + dt * dx, g + dt * rate * g
    return x, g


@njit(cache=True)
def abm_run(p, n_agents, n1, g0, rate_scale, t_end, record_dt, seed):
    """Pairwise-imitation Monte Carlo on the count of action-1 agents.

    Every agent revises at rate ``rate_scale`` (ODE time units): it draws a
    uniformly random other agent and copies its action with probability
    ``max(0, r_model - r_focal) / rate_scale``. Between events the gain follows
    its own ODE exactly, since x is constant there.
    Returns (record times, counts, gains, status, events).
    """
    np.random.seed(seed)
    n_rec = int(math.floor(t_end / record_dt + 1e-9)) + 1
    times = np.empty(n_rec)
    counts = np.empty(n_rec, dtype=np.int64)
    gains = np.empty(n_rec)
    for j in range(n_rec):
        times[j] = j * record_dt
    total_rate = n_agents * rate_scale
    t = 0.0
    g = g0
    j = 0
    events = 0
    a, b, c, d = p[0], p[1], p[2], p[3]
    while True:
        dt = np.random.exponential(1.0 / total_rate)
        x = n1 / n_agents
        # record grid points passed before the next event, gain advanced exactly
        while j < n_rec and times[j] <= t + dt:
            counts[j] = n1
            gains[j] = g * math.exp(adapt_rate_x(p, x) * (times[j] - t))
            j += 1
        if j >= n_rec:
            break
        g = g * math.exp(adapt_rate_x(p, x) * dt)
        t += dt
        events += 1
        if not math.isfinite(g):
            return times[:j], counts[:j], gains[:j], STATUS_NONFINITE, events
        focal_one = np.random.random() < x
        others_one = n1 - 1 if focal_one else n1
        model_one = np.random.random() * (n_agents - 1) < others_one
        if focal_one == model_one:
            continue
        r1 = (a + p[4] * g) * x + (b + p[5] * g) * (1.0 - x)
        r2 = (c + p[6] * g) * x + (d + p[7] * g) * (1.0 - x)
        diff = r1 - r2 if model_one else r2 - r1
        if abs(diff) > rate_scale * (1.0 + 1e-12):
            return times[:j], counts[:j], gains[:j], STATUS_RATE, events
        if diff > 0.0 and np.random.random() * rate_scale < diff:
            n1 += 1 if model_one else -1
    return times, counts, gains, STATUS_OK, events


@njit(cache=True)
def adapt_rate_x(p, x):
    fam = p[8]
    if fam == 1.0:
        return p[9] * (x - p[10])
    if fam == 2.0:
        if x == 0.0:
            return 0.0
        return p[9] * math.exp(p[10] * math.log(x))
    return 0.0
