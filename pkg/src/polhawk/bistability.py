"""Homogeneous pump response of the driven cavity.

A plane-wave drive at wavevector k_p holds the steady density n on the
cubic ((g n - delta)^2 + gamma^2/4) n = |F|^2 with delta the effective
detuning at k_p.  The response is S-shaped (bistable) whenever
delta > sqrt(3) gamma / 2; the negative-slope branch is modulationally
unstable and never realized.
"""

from dataclasses import dataclass

import numpy as np


class InvalidDetuning(ValueError):
    pass


@dataclass
class TurningPoints:
    """Knees of the S-curve.  F1 ends the lower branch (upward jump),
    F2 ends the upper branch (downward jump); F2 < F1.  n_minus/n_plus
    are the densities at the respective knees."""

    F1: float
    F2: float
    n_minus: float
    n_plus: float


@dataclass
class SonicPoint:
    """Upper-branch working point with g n = delta, where the flow at
    k_p runs exactly at the local sound speed."""

    n: float
    F: float


def effective_detuning(params, k_p):
    """Drive detuning reduced by the pump's kinetic energy,
    omega_p - omega_0 - (hbar/2m*) k_p^2."""
    return params.delta_p(k_p)


def drive_for_density(n, delta_p, params):
    """|F| holding each density n: the single-valued inverse of the
    multivalued n(|F|) response, used for plots and scan oracles."""
    n = np.asarray(n, float)
    return np.sqrt(((params.g * n - delta_p) ** 2 + params.gamma**2 / 4.0) * n)


def density_response(F_abs, delta_p, params):
    """All steady densities at drive amplitude F_abs >= 0.

    Returns a list of (n, stable) pairs in ascending n; 1 or 3 entries
    (a knee tangency is reported once).  stable is False on the
    negative-slope branch.  Cubic solved in the scaled variable
    y = g n / delta for conditioning, companion-matrix roots polished
    by a Newton step on the unscaled cubic.
    """
    gamma = params.gamma
    g = params.g
    if F_abs < 0:
        raise ValueError("drive amplitude must be >= 0")
    if F_abs == 0.0:
        return [(0.0, True)]

    if delta_p > 0:
        q = gamma**2 / (4 * delta_p**2)
        r = F_abs**2 * g / delta_p**3
        roots = np.roots([1.0, -2.0, 1.0 + q, -r]) * (delta_p / g)
    else:
        roots = np.roots(
            [g**2, -2 * g * delta_p, delta_p**2 + gamma**2 / 4, -(F_abs**2)]
        )

    real = [max(z.real, 0.0) for z in roots
            if abs(z.imag) <= 1e-8 * max(1.0, abs(z))]
    n = np.unique(np.asarray(real, float))

    for _ in range(2):
        u = g * n - delta_p
        P = (u**2 + gamma**2 / 4) * n - F_abs**2
        dP = 3 * g**2 * n**2 - 4 * g * delta_p * n + delta_p**2 + gamma**2 / 4
        n = n - np.where(dP != 0.0, P / np.where(dP == 0.0, 1.0, dP), 0.0)
    n = np.maximum(n, 0.0)
    n.sort()

    # collapse near-degenerate knee roots
    kept = [n[0]]
    for val in n[1:]:
        if val - kept[-1] > 1e-9 * max(1.0, val):
            kept.append(val)

    out = []
    for val in kept:
        slope = (3 * g**2 * val**2 - 4 * g * delta_p * val
                 + delta_p**2 + gamma**2 / 4)
        out.append((float(val), bool(slope > 0)))
    return out


def turning_points(delta_p, params):
    """Knees of the S-curve, or None when the response is single-valued
    (delta_p <= sqrt(3) gamma / 2).  Stationary points of |F|^2(n),
    i.e. roots of 3g^2 n^2 - 4 g delta n + delta^2 + gamma^2/4."""
    gamma = params.gamma
    g = params.g
    disc = delta_p**2 - 3 * gamma**2 / 4
    if delta_p <= 0 or disc <= 0:
        return None
    root = np.sqrt(disc)
    n_minus = (2 * delta_p - root) / (3 * g)
    n_plus = (2 * delta_p + root) / (3 * g)
    return TurningPoints(
        F1=float(drive_for_density(n_minus, delta_p, params)),
        F2=float(drive_for_density(n_plus, delta_p, params)),
        n_minus=n_minus,
        n_plus=n_plus,
    )


def sonic_point(delta_p, params):
    """Density where interaction energy matches the effective detuning
    (n_C = delta/g) and the drive F_C that holds it."""
    if delta_p <= 0:
        raise InvalidDetuning("sonic point needs positive effective detuning")
    n = delta_p / params.g
    return SonicPoint(n=n, F=float(np.sqrt(params.gamma**2 / 4 * n)))


def response_table(delta_p, params, n_grid):
    """Columns (F, n, c_B, stable) along a density grid, for export."""
    n_grid = np.asarray(n_grid, float)
    F = drive_for_density(n_grid, delta_p, params)
    c = params.sound_speed(n_grid)
    slope = (3 * params.g**2 * n_grid**2 - 4 * params.g * delta_p * n_grid
             + delta_p**2 + params.gamma**2 / 4)
    return F, n_grid, c, slope > 0


@dataclass
class ConstraintViolation:
    name: str
    value: float
    bound: float
    detail: str


def _waterfall_segments(config):
    segs = sorted(
        (s for s in config.pump.segments if s.amplitude > 0),
        key=lambda s: s.x_start,
    )
    if not segs:
        raise ValueError("config drives no segment")
    return segs[0], segs[-1]


def waterfall_checks(config):
    """Operability checks for a two-step drive meant to host a
    sub-to-supersonic interface.  Returns (name, ok, value, bound,
    detail) tuples; see validate_waterfall_config."""
    params = config.params
    up, down = _waterfall_segments(config)
    c2 = params.kinetic
    gamma = params.gamma
    det = params.detuning
    checks = []

    # upstream flow must stay below the sonic-point sound speed
    bound_a = 3 * c2 * up.k_p**2
    checks.append((
        "upstream_sonic_operability", det > bound_a, det, bound_a,
        "bare detuning must exceed 3 (hbar/2m*) k_up^2 so the upstream "
        "fluid can sit subsonic at its own sonic density",
    ))

    delta_dn = params.delta_p(down.k_p)
    bound_b = gamma * np.sqrt(3.0) / 2.0
    checks.append((
        "downstream_bistability_exists", delta_dn > bound_b, delta_dn,
        bound_b,
        "downstream effective detuning must exceed sqrt(3) gamma / 2",
    ))

    width = (4 * delta_dn**2 / 9 - gamma**2 / 2) * delta_dn / (3 * params.g)
    checks.append((
        "bistable_interval_width", width > 0, width, 0.0,
        "drive-intensity window |F1|^2 - |F2|^2 holding the upper branch",
    ))

    roots = density_response(down.amplitude, delta_dn, params)
    n_top = roots[-1][0]
    c_d = params.sound_speed(n_top)
    c_crit = np.sqrt(max(2 * c2 * delta_dn, 0.0))
    checks.append((
        "upper_branch_reached", c_d > c_crit, c_d, c_crit,
        "sound speed on the selected downstream branch must exceed the "
        "sonic-point value, i.e. g n must exceed the detuning",
    ))
    return checks


def validate_waterfall_config(config):
    """Violated operability constraints of a waterfall config (empty
    list means operable)."""
    return [
        ConstraintViolation(name=name, value=value, bound=bound, detail=detail)
        for name, ok, value, bound, detail in waterfall_checks(config)
        if not ok
    ]
