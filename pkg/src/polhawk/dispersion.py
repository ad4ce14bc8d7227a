"""Collective-excitation spectra on homogeneous driven or ballistic
backgrounds: closed-form branches, fixed-frequency mode finding with
norm classification, instability windows, and the frequency band over
which upstream and downstream regions can exchange correlated pairs.

All frequencies are lab-frame angular frequencies in 1/ps and include
the uniform -i gamma/2 lifetime shift; wavevectors are in 1/µm.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar


class EmptyBand(RuntimeError):
    """No frequency window supports correlated upstream/downstream pairs."""


class RootResidualTooLarge(RuntimeError):
    """Mode polishing failed; typically a near-degenerate root at a band
    edge."""


@dataclass
class BranchParams:
    """Homogeneous region hosting excitations.

    region 'pumped': phase-locked to a drive at k_ref = k_p, where the
    spectrum depends on the effective detuning delta_p.  region
    'ballistic': drive-free flow at k_ref = m* v / hbar, the
    delta_p = g n limit of the pumped form.
    """

    region: str
    n: float
    v: float
    k_ref: float
    params: object
    delta_p: float = None

    def __post_init__(self):
        if self.region not in ("pumped", "ballistic"):
            raise ValueError(f"unknown region {self.region!r}")
        if self.n < 0:
            raise ValueError("density must be >= 0")
        if self.region == "pumped" and self.delta_p is None:
            raise ValueError("pumped region needs delta_p")
        if self.region == "ballistic" and self.delta_p is not None:
            raise ValueError("ballistic region takes no delta_p")

    @classmethod
    def pumped(cls, params, n, k_p):
        return cls(
            region="pumped",
            n=n,
            v=params.flow_velocity(k_p),
            k_ref=k_p,
            params=params,
            delta_p=params.delta_p(k_p),
        )

    @classmethod
    def ballistic(cls, params, n, v):
        return cls(
            region="ballistic",
            n=n,
            v=v,
            k_ref=v / params.hbar_over_m,
            params=params,
        )

    @property
    def u_eff(self):
        """Coefficient of the fluid-frame radicand (x + u)^2 - (gn)^2
        with x the kinetic term: 2gn - delta_p when pumped, gn when
        ballistic."""
        gn = self.params.g * self.n
        if self.region == "pumped":
            return 2 * gn - self.delta_p
        return gn

    @property
    def sound_speed(self):
        return self.params.sound_speed(self.n)


def _radical(y, u, gn):
    """(y + u)^2 - (gn)^2 in the factored form (y + u - gn)(y + u + gn).
    The expanded form cancels catastrophically near the sonic point
    (u -> gn, y -> 0) and would put a ~1e-8 floor under the gap."""
    return (y + (u - gn)) * (y + (u + gn))


def _branch_pair(dk, u, gn, v, gamma, kinetic):
    y = kinetic * np.asarray(dk) ** 2
    S = np.sqrt(_radical(y, u, gn) + 0j)
    base = v * np.asarray(dk) - 0.5j * gamma
    return base + S, base - S


def omega_sonic(k, n, params):
    """Fluid-frame branches at the gapless working point delta_p = g n:
    +-sqrt(e_k (e_k + 2 g n)) - i gamma/2 with e_k the kinetic energy."""
    return _branch_pair(k, params.g * n, params.g * n, 0.0, params.gamma,
                        params.kinetic)


def omega_lab_pumped(k, branch):
    """Lab-frame branches on a driven background,
    +-sqrt((e_dk + 2gn - delta_p)^2 - (gn)^2) + v dk - i gamma/2 with
    dk = k - k_p.  Principal square root: a negative radicand moves
    weight into the imaginary part (dynamical-instability indicator)."""
    dk = np.asarray(k) - branch.k_ref
    return _branch_pair(dk, branch.u_eff, branch.params.g * branch.n,
                        branch.v, branch.params.gamma, branch.params.kinetic)


def omega_lab_ballistic(k, branch):
    """Lab-frame branches on a free-flowing background,
    +-sqrt(e_dk (e_dk + 2gn)) + v dk - i gamma/2 with dk = k - k0."""
    dk = np.asarray(k) - branch.k_ref
    return _branch_pair(dk, branch.params.g * branch.n,
                        branch.params.g * branch.n, branch.v,
                        branch.params.gamma, branch.params.kinetic)


def omega_lab(k, branch):
    if branch.region == "pumped":
        return omega_lab_pumped(k, branch)
    return omega_lab_ballistic(k, branch)


def omega_fluid_frame_general(k, n, delta_p, params):
    """Fluid-frame branches at arbitrary working point,
    +-sqrt((e_k + 2gn - delta_p)^2 - (gn)^2) - i gamma/2."""
    return _branch_pair(k, 2 * params.g * n - delta_p, params.g * n, 0.0,
                        params.gamma, params.kinetic)


def instability_window(n, delta_p, params):
    """k interval with negative fluid-frame radicand (complex-frequency
    pair), or None.  Nonempty exactly when delta_p > g n:
    delta_p - 3gn < e_k < delta_p - gn."""
    gn = params.g * n
    if delta_p <= gn:
        return None
    k_hi = np.sqrt((delta_p - gn) / params.kinetic)
    k_lo = np.sqrt(max(delta_p - 3 * gn, 0.0) / params.kinetic)
    return (k_lo, k_hi)


@dataclass
class ModeRoot:
    k: complex
    kind: str  # 'propagating' | 'evanescent_growing' | 'evanescent_decaying'
    norm_sign: int
    v_g: float  # NaN for evanescent roots
    residual: float


@dataclass
class ModeSet:
    omega: float
    branch: BranchParams
    roots: list

    @property
    def propagating(self):
        return [r for r in self.roots if r.kind == "propagating"]

    @property
    def negative_norm(self):
        return [r for r in self.roots if r.kind == "propagating"
                and r.norm_sign < 0]


def local_modes(omega, branch, k_im_tol=1e-6, residual_tol=1e-9):
    """All four wavevector roots at real lab frequency omega.

    The mode ansatz exp(i(kx - omega t) - gamma t / 2) turns either
    branch relation into one real-coefficient quartic in dk = k - k_ref:
        kin^2 dk^4 + (2 kin u - v^2) dk^2 + 2 omega v dk
            + u^2 - (gn)^2 - omega^2 = 0.
    Companion-matrix roots are assigned to the +/- branch by unsquared
    residual, polished with two Newton steps on that branch, and
    classified: propagating when |Im k| < k_im_tol (norm sign = branch
    sign, group velocity from the analytic derivative), otherwise an
    evanescent growing/decaying conjugate pair.  residual is
    |omega_branch(k) - omega + i gamma/2| / |omega - i gamma/2|; raises
    RootResidualTooLarge past residual_tol (near-degenerate band edge).
    """
    p = branch.params
    c2 = p.kinetic
    u = branch.u_eff
    gn = p.g * branch.n
    v = branch.v
    w = float(omega)

    coeffs = [c2**2, 0.0, 2 * c2 * u - v**2, 2 * w * v, u**2 - gn**2 - w**2]
    raw = np.roots(coeffs)
    scale = abs(w - 0.5j * p.gamma)

    roots = []
    for dk in raw:
        S = np.sqrt(_radical(c2 * dk**2, u, gn) + 0j)
        lin = v * dk - w
        s = 1 if abs(lin + S) <= abs(lin - S) else -1
        for _ in range(2):
            S = np.sqrt(_radical(c2 * dk**2, u, gn) + 0j)
            f = v * dk + s * S - w
            if abs(S) < 1e-14 * max(scale, 1.0):
                break
            df = v + s * 2 * c2 * dk * (c2 * dk**2 + u) / S
            if df == 0:
                break
            dk = dk - f / df
        S = np.sqrt(_radical(c2 * dk**2, u, gn) + 0j)
        res = abs(v * dk + s * S - w) / scale

        if abs(dk.imag) < k_im_tol:
            dkr = dk.real
            rad = _radical(c2 * dkr**2, u, gn)
            Sr = np.sqrt(max(rad, 0.0))
            vg = (
                v + s * 2 * c2 * dkr * (c2 * dkr**2 + u) / Sr
                if Sr > 0
                else np.nan
            )
            roots.append(ModeRoot(
                k=complex(branch.k_ref + dkr, 0.0),
                kind="propagating",
                norm_sign=s,
                v_g=float(vg),
                residual=float(res),
            ))
        else:
            kind = "evanescent_decaying" if dk.imag > 0 else \
                "evanescent_growing"
            roots.append(ModeRoot(
                k=branch.k_ref + dk,
                kind=kind,
                norm_sign=s,
                v_g=np.nan,
                residual=float(res),
            ))

    bad = [r for r in roots if r.residual > residual_tol]
    if bad:
        raise RootResidualTooLarge(
            f"{len(bad)} root(s) at omega={w:.6g} exceed residual "
            f"{residual_tol:g}; worst {max(r.residual for r in bad):.3g}"
        )
    roots.sort(key=lambda r: (r.k.real, r.k.imag))
    return ModeSet(omega=w, branch=branch, roots=roots)


def _scan_extremum(branch, sign, n_scan=4001):
    """Extremum of sign * Re omega_sign-branch over real k, by dense
    scan plus bounded minimization.  sign=+1: min of Re omega+;
    sign=-1: max of Re omega- (returned as the max value)."""
    p = branch.params
    c2 = p.kinetic
    u = branch.u_eff
    gn = p.g * branch.n
    v = branch.v

    def f(dk):
        rad = _radical(c2 * dk**2, u, gn)
        re_sqrt = np.sqrt(np.maximum(rad, 0.0))
        return sign * (v * dk + sign * re_sqrt)

    span = 4.0 * np.sqrt(
        (abs(u) + 2 * gn + v**2 / (2 * c2) + p.gamma) / c2
    )
    for _ in range(4):
        dk = np.linspace(-span, span, n_scan)
        vals = f(dk)
        i = int(np.argmin(vals))
        if 0 < i < n_scan - 1:
            break
        span *= 2.0
    lo, hi = dk[max(i - 1, 0)], dk[min(i + 1, n_scan - 1)]
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    best = min(float(vals[i]), float(res.fun))
    return sign * best


def scattering_band(upstream, downstream, n_scan=4001):
    """Frequency window [omega_min, omega_max] over which an upstream
    positive-norm mode can pair with a downstream negative-norm one.

    omega_min: minimum over real k of the upstream Re omega+ branch
    (zero exactly at the gapless sonic working point).  omega_max:
    maximum over real k of the downstream Re omega- branch clipped to
    positive lab frequencies (zero for subsonic downstream flow).
    Raises EmptyBand when omega_min >= omega_max.
    """
    omega_min = _scan_extremum(upstream, +1, n_scan)
    omega_max = max(0.0, _scan_extremum(downstream, -1, n_scan))
    if omega_min >= omega_max:
        raise EmptyBand(
            f"omega_min={omega_min:.6g} >= omega_max={omega_max:.6g}"
        )
    return omega_min, omega_max


def dispersion_table(branch, k_values):
    """Columns (k, Re w+, Im w+, Re w-, Im w-) for export."""
    wp, wm = omega_lab(k_values, branch)
    return (np.asarray(k_values, float), wp.real, wp.imag, wm.real, wm.imag)
