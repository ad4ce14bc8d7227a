"""Mean-field steady states of the driven fluid and their hydrodynamic
reading: density/phase decomposition, local flow and sound speeds, the
acoustic metric, and sonic-horizon location.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .core import AbsorbingMask
from .engine import SplitStepEngine


class NotConverged(RuntimeError):
    """Relaxation hit t_max before the change criterion was met.  The
    partial solution is attached as .solution."""

    def __init__(self, msg, solution=None):
        super().__init__(msg)
        self.solution = solution


@dataclass
class Horizon:
    x: float
    kind: str  # 'sub_to_super' or 'super_to_sub' along +x
    index: int


@dataclass
class MeanFieldSolution:
    grid: object
    params: object
    psi: np.ndarray
    pump: object
    potential: object
    mask: object
    t_final: float
    converged: bool
    residual: float
    change_rate: float
    n_floor: float = 1e-12
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def density(self):
        if "n" not in self._cache:
            self._cache["n"] = np.abs(self.psi) ** 2
        return self._cache["n"]

    @property
    def velocity(self):
        if "v" not in self._cache:
            self._cache["v"] = flow_velocity(
                self.psi, self.grid, self.params, self.n_floor
            )
        return self._cache["v"]

    @property
    def sound_speed(self):
        if "c" not in self._cache:
            self._cache["c"] = self.params.sound_speed(self.density)
        return self._cache["c"]

    def madelung(self):
        return madelung(self.psi, self.n_floor)

    def acoustic_metric(self):
        return acoustic_metric(
            self.density, self.velocity, self.sound_speed, self.n_floor
        )

    def horizons(self, density_floor_rel=1e-6):
        return find_horizons(
            self.grid.x,
            self.velocity,
            self.sound_speed,
            self.density,
            density_floor_rel,
        )


def make_engine(grid, params, pump, potential, dt, mask=None,
                density_offset=0.0):
    """Build the split-step engine from profile objects (or raw arrays)."""
    F = pump.evaluate(grid) if hasattr(pump, "evaluate") else pump
    V = potential.evaluate(grid) if hasattr(potential, "evaluate") else potential
    M = mask.evaluate(grid) if hasattr(mask, "evaluate") else mask
    return SplitStepEngine(
        grid, params, F, V, dt, mask_profile=M, density_offset=density_offset
    )


def step_ddgpe(psi, grid, params, pump, potential, dt, mask=None):
    """One symmetric split step.  For long runs build the engine once via
    make_engine and call step()/run() on it."""
    eng = make_engine(grid, params, pump, potential, dt, mask)
    return eng.step(psi)


def relax_to_steady(grid, params, pump, potential, mask=None, dt=None,
                    safety=0.5, tol=1e-6, t_max=800.0, check_interval=1.0,
                    prepare="direct", psi0=None, boost=1.1,
                    t_hold=150.0, t_ramp=150.0):
    """Evolve to the driven steady state.

    Stops when the relative field change over one check_interval drops
    below tol; raises NotConverged at t_max (partial attached).

    prepare='upper' first holds the drive rescaled so every driven
    segment sits above its upper turning point, then ramps linearly back
    to the target.  This walks the fluid onto the high-density branch of
    the bistability loop wherever one exists; 'direct' starts at the
    target amplitude straight away.
    """
    from .bistability import turning_points

    if dt is None:
        dt = grid.dt_stable(params, safety)
    eng = make_engine(grid, params, pump, potential, dt, mask)
    psi = (
        np.zeros(grid.n, dtype=np.complex128)
        if psi0 is None
        else np.asarray(psi0, dtype=np.complex128).copy()
    )
    chunk = max(1, int(round(check_interval / dt)))
    t = 0.0

    if prepare == "upper":
        scale = 1.0
        if hasattr(pump, "segments"):
            for seg in pump.segments:
                if seg.amplitude <= 0:
                    continue
                tp = turning_points(params.delta_p(seg.k_p), params)
                if tp is None:
                    continue
                scale = max(scale, boost * tp.F1 / seg.amplitude)
        if scale > 1.0:
            eng.set_pump_scale(scale)
            n_hold = int(round(t_hold / dt))
            psi = eng.run(psi, n_hold)
            t += n_hold * dt
            n_ramp_chunks = max(1, int(round(t_ramp / check_interval)))
            for j in range(n_ramp_chunks):
                s = scale + (1.0 - scale) * (j + 1) / n_ramp_chunks
                eng.set_pump_scale(s)
                psi = eng.run(psi, chunk)
                t += chunk * dt
            eng.set_pump_scale(1.0)
    elif prepare != "direct":
        raise ValueError(f"unknown preparation {prepare!r}")

    converged = False
    change = np.inf
    while t < t_max:
        prev = psi.copy()
        psi = eng.run(psi, chunk)
        t += chunk * dt
        if not np.all(np.isfinite(psi)):
            raise FloatingPointError("field lost finiteness during relaxation")
        ref = np.linalg.norm(psi)
        change = np.linalg.norm(psi - prev) / ref if ref > 0 else 0.0
        if change < tol:
            converged = True
            break

    sol = MeanFieldSolution(
        grid=grid,
        params=params,
        psi=psi,
        pump=pump,
        potential=potential,
        mask=mask if mask is not None else AbsorbingMask.none(),
        t_final=t,
        converged=converged,
        residual=eng.rhs_norm(psi),
        change_rate=change / check_interval,
    )
    if not converged:
        raise NotConverged(
            f"no steady state within t_max={t_max} ps "
            f"(last change rate {change:.3e}/ps, tol {tol})",
            solution=sol,
        )
    return sol


def madelung(psi, n_floor=1e-12):
    """Density/phase split.  Returns (n, theta, ok) where ok flags points
    dense enough for the phase to mean anything; theta is unwrapped over
    the flagged points and linearly interpolated across gaps."""
    psi = np.asarray(psi)
    n = np.abs(psi) ** 2
    ok = n >= n_floor
    theta = np.zeros_like(n)
    if ok.any():
        idx = np.nonzero(ok)[0]
        theta_ok = np.unwrap(np.angle(psi[idx]))
        theta = np.interp(np.arange(n.size), idx, theta_ok)
    return n, theta, ok


def flow_velocity(psi, grid, params, n_floor=1e-12):
    """v = (hbar/m*) Im(psi* dpsi/dx)/|psi|^2 with a spectral derivative;
    zero where the density is below n_floor.  Agrees with the gradient of
    the unwrapped phase wherever the phase is defined."""
    psi = np.asarray(psi, dtype=np.complex128)
    dpsi = sfft.ifft(1j * grid.k * sfft.fft(psi))
    n = np.abs(psi) ** 2
    v = np.zeros(grid.n)
    ok = n >= n_floor
    v[ok] = params.hbar_over_m * np.imag(np.conj(psi[ok]) * dpsi[ok]) / n[ok]
    return v


@dataclass
class AcousticMetric:
    g_tt: np.ndarray
    g_tx: np.ndarray
    g_xx: np.ndarray
    valid: np.ndarray


def acoustic_metric(n, v, c, n_floor=1e-12):
    """Line element the long-wavelength density waves see:
    (n/c^2) [ -(c^2 - v^2) dt^2 - 2 v dt dx + dx^2 ].  Points with
    density at or below n_floor are degenerate and flagged invalid."""
    n = np.asarray(n, float)
    v = np.asarray(v, float)
    c = np.asarray(c, float)
    valid = (n > n_floor) & (c > 0)
    g_tt = np.full(n.shape, np.nan)
    g_tx = np.full(n.shape, np.nan)
    g_xx = np.full(n.shape, np.nan)
    w = n[valid] / c[valid] ** 2
    g_tt[valid] = -w * (c[valid] ** 2 - v[valid] ** 2)
    g_tx[valid] = -w * v[valid]
    g_xx[valid] = w
    return AcousticMetric(g_tt, g_tx, g_xx, valid)


def find_horizons(x, v, c, n, density_floor_rel=1e-6):
    """Sonic horizons: zero crossings of v - c where the fluid is dense
    enough to carry sound.  Crossing positions are linearly interpolated;
    kind records the direction along +x.  A run of exact zeros flanked
    by opposite signs counts as one horizon at the run's centre; a
    grazing touch that retreats to the same sign counts as none."""
    x = np.asarray(x)
    s = np.asarray(v) - np.asarray(c)
    n = np.asarray(n)
    nmax = n.max() if n.size else 0.0
    ok = n > density_floor_rel * nmax if nmax > 0 else np.zeros(n.shape, bool)
    out = []
    i = 0
    last = len(x) - 1
    while i < last:
        if not (ok[i] and ok[i + 1]):
            i += 1
            continue
        a, b = s[i], s[i + 1]
        if a == 0.0:
            i += 1
            continue
        if a * b < 0.0:
            xh = x[i] + (x[i + 1] - x[i]) * (-a) / (b - a)
            kind = "sub_to_super" if a < 0 else "super_to_sub"
            out.append(Horizon(x=float(xh), kind=kind, index=i))
            i += 1
            continue
        if b == 0.0:
            j = i + 1
            while j <= last and ok[j] and s[j] == 0.0:
                j += 1
            if j <= last and ok[j] and s[j] * a < 0.0:
                xh = 0.5 * (x[i + 1] + x[j - 1])
                kind = "sub_to_super" if a < 0 else "super_to_sub"
                out.append(Horizon(x=float(xh), kind=kind, index=i))
            i = j
            continue
        i += 1
    return out
