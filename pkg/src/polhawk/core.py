"""Unit system, cavity parameters, grid, and drive/potential profiles.

Internal units everywhere: length in micrometres, time in picoseconds,
energies expressed as angular frequencies in 1/ps.  Conversion from meV
uses hbar in meV ps.  Densities are 1D (polaritons per micrometre), so
the interaction constant g carries units of (1/ps) um.
"""

import numpy as np

# hbar = h/2pi with h = 6.62607015e-34 J s (exact), expressed in meV ps
HBAR_MEV_PS = 0.6582119569509066

# hbar^2/(2 m_e) in meV um^2, from CODATA 2018 electron mass
HBAR2_OVER_2ME_MEV_UM2 = 3.809982116154860e-05


def mev_to_angfreq(e_mev):
    """Convert an energy in meV to an angular frequency in 1/ps."""
    return e_mev / HBAR_MEV_PS


def angfreq_to_mev(w):
    """Convert an angular frequency in 1/ps back to meV."""
    return w * HBAR_MEV_PS


class CavityParams:
    """Lower-polariton cavity parameters in internal units.

    gamma      : loss rate, 1/ps
    g          : interaction constant, (1/ps) um
    mass_ratio : effective mass in units of the free-electron mass
    omega0     : bottom of the lower-polariton branch, 1/ps
    omega_p    : drive laser frequency, 1/ps

    Only the detuning omega_p - omega0 enters the rotating-frame dynamics,
    but both fields are kept so configs stay explicit.
    """

    def __init__(self, gamma, g, mass_ratio, omega0=0.0, omega_p=0.0):
        if gamma < 0:
            raise ValueError("gamma must be >= 0")
        if g < 0:
            raise ValueError("g must be >= 0")
        if mass_ratio <= 0:
            raise ValueError("mass_ratio must be > 0")
        self.gamma = float(gamma)
        self.g = float(g)
        self.mass_ratio = float(mass_ratio)
        self.omega0 = float(omega0)
        self.omega_p = float(omega_p)

    @classmethod
    def default(cls):
        """Microcavity-scale defaults: hbar*gamma = 0.047 meV, hbar*g =
        0.0003 meV um, m* = 3e-5 m_e, drive 0.49 meV above the branch
        bottom."""
        return cls(
            gamma=mev_to_angfreq(0.047),
            g=mev_to_angfreq(0.0003),
            mass_ratio=3e-5,
            omega0=0.0,
            omega_p=mev_to_angfreq(0.49),
        )

    @property
    def kinetic(self):
        """hbar/(2 m*) in um^2/ps; the Laplacian prefactor."""
        return HBAR2_OVER_2ME_MEV_UM2 / self.mass_ratio / HBAR_MEV_PS

    @property
    def hbar_over_m(self):
        """hbar/m* in um^2/ps; velocity = hbar_over_m * wavevector."""
        return 2.0 * self.kinetic

    @property
    def detuning(self):
        """omega_p - omega0 in 1/ps."""
        return self.omega_p - self.omega0

    def delta_p(self, k_p):
        """Effective drive detuning at pump wavevector k_p:
        omega_p - omega0 - hbar k_p^2 / (2 m*)."""
        return self.detuning - self.kinetic * k_p ** 2

    def flow_velocity(self, k_p):
        """Flow speed hbar k_p / m* imprinted by a pump at k_p."""
        return self.hbar_over_m * k_p

    def sound_speed(self, n):
        """Bogoliubov speed sqrt(hbar g n / m*) for density n (1/um)."""
        return np.sqrt(self.hbar_over_m * self.g * np.asarray(n))

    def replace(self, **kw):
        d = dict(
            gamma=self.gamma,
            g=self.g,
            mass_ratio=self.mass_ratio,
            omega0=self.omega0,
            omega_p=self.omega_p,
        )
        d.update(kw)
        return CavityParams(**d)

    def __repr__(self):
        return (
            f"CavityParams(gamma={self.gamma!r}, g={self.g!r}, "
            f"mass_ratio={self.mass_ratio!r}, omega0={self.omega0!r}, "
            f"omega_p={self.omega_p!r})"
        )


class Grid:
    """Uniform periodic 1D grid.

    n must be a power of two.  Wavenumbers follow the FFT layout.  The
    stability bound for the split-step integrator ties dt to the largest
    resolved wavenumber: dt <= safety / (k_max^2 * kinetic).
    """

    def __init__(self, x_min, x_max, n):
        n = int(n)
        if n < 2 or (n & (n - 1)) != 0:
            raise ValueError("grid size must be a power of two")
        if not x_max > x_min:
            raise ValueError("need x_max > x_min")
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.n = n
        self.length = self.x_max - self.x_min
        self.dx = self.length / n
        self.x = self.x_min + self.dx * np.arange(n)
        self.k = 2.0 * np.pi * np.fft.fftfreq(n, d=self.dx)
        self.k_max = np.pi / self.dx

    @classmethod
    def default(cls, n=2048):
        """Domain [-100, +220] um; long enough for a ~100 um ballistic
        tail downstream of a defect near x = 0 plus absorbing margins."""
        return cls(-100.0, 220.0, n)

    def dt_stable(self, params, safety=0.5):
        """Largest allowed time step for a given safety factor <= 1."""
        if not 0 < safety <= 1.0:
            raise ValueError("safety must be in (0, 1]")
        return safety / (self.k_max ** 2 * params.kinetic)

    def commensurate(self, k):
        """Nearest wavevector that fits the periodic box exactly."""
        dk = 2.0 * np.pi / self.length
        return round(k / dk) * dk

    def index_of(self, x):
        """Index of the grid point closest to position x."""
        return int(round((x - self.x_min) / self.dx)) % self.n

    def __eq__(self, other):
        return (
            isinstance(other, Grid)
            and self.n == other.n
            and self.x_min == other.x_min
            and self.x_max == other.x_max
        )

    def __repr__(self):
        return f"Grid(x_min={self.x_min}, x_max={self.x_max}, n={self.n})"


class PumpSegment:
    """One coherently driven interval: amplitude and pump wavevector on
    [x_start, x_end]."""

    def __init__(self, x_start, x_end, amplitude, k_p):
        if not x_end > x_start:
            raise ValueError("segment needs x_end > x_start")
        if amplitude < 0:
            raise ValueError("segment amplitude must be >= 0")
        self.x_start = float(x_start)
        self.x_end = float(x_end)
        self.amplitude = float(amplitude)
        self.k_p = float(k_p)

    def __repr__(self):
        return (
            f"PumpSegment({self.x_start}, {self.x_end}, "
            f"amplitude={self.amplitude}, k_p={self.k_p})"
        )


class PumpProfile:
    """Piecewise pump field F(x) = sum of segments, each amp * e^(i k_p x)
    with smoothed edges.

    smoothing is the edge length scale in um; 0 gives hard steps.  A
    segment spanning the whole periodic box must carry a wavevector
    commensurate with the box, otherwise the wrapped phase jumps.
    """

    def __init__(self, segments, smoothing=1.0):
        self.segments = list(segments)
        if smoothing < 0:
            raise ValueError("smoothing must be >= 0")
        self.smoothing = float(smoothing)

    @classmethod
    def homogeneous(cls, amplitude, k_p):
        """Pump filling the entire box; window evaluates to exactly 1."""
        seg = PumpSegment(-np.inf, np.inf, amplitude, k_p)
        return cls([seg], smoothing=0.0)

    def window(self, seg, x):
        if not np.isfinite(seg.x_start):
            return np.ones_like(x)
        if self.smoothing == 0.0:
            return ((x >= seg.x_start) & (x < seg.x_end)).astype(float)
        a = (x - seg.x_start) / self.smoothing
        b = (x - seg.x_end) / self.smoothing
        return 0.5 * (np.tanh(a) - np.tanh(b))

    def evaluate(self, grid):
        """Complex pump field on the grid."""
        F = np.zeros(grid.n, dtype=np.complex128)
        for seg in self.segments:
            if not np.isfinite(seg.x_start):
                if abs(seg.k_p - grid.commensurate(seg.k_p)) > 1e-12:
                    raise ValueError(
                        "full-box pump wavevector must be commensurate "
                        "with the periodic domain"
                    )
            F += (
                seg.amplitude
                * self.window(seg, grid.x)
                * np.exp(1j * seg.k_p * grid.x)
            )
        return F

    def max_amplitude(self):
        return max((s.amplitude for s in self.segments), default=0.0)

    def __repr__(self):
        return f"PumpProfile({self.segments!r}, smoothing={self.smoothing})"


class PotentialProfile:
    """External potential V(x): a Gaussian defect and/or a custom term.

    depth is in 1/ps (negative = attractive).  Positions in um.
    """

    def __init__(self, center=0.0, depth=0.0, sigma=0.5, custom=None):
        if sigma <= 0:
            raise ValueError("sigma must be > 0")
        self.center = float(center)
        self.depth = float(depth)
        self.sigma = float(sigma)
        self.custom = custom

    @classmethod
    def none(cls):
        return cls(depth=0.0)

    @classmethod
    def gaussian_defect(cls, depth_mev, center=0.0, sigma=0.5):
        """Defect specified by its depth in meV.  Negative = attractive
        (a local broadening of the cavity), positive = repulsive."""
        return cls(center=center, depth=mev_to_angfreq(depth_mev), sigma=sigma)

    def evaluate(self, grid):
        V = np.zeros(grid.n)
        if self.depth != 0.0:
            V = self.depth * np.exp(
                -0.5 * ((grid.x - self.center) / self.sigma) ** 2
            )
        if self.custom is not None:
            V = V + np.asarray(self.custom(grid.x), dtype=float)
        return V

    def __repr__(self):
        return (
            f"PotentialProfile(center={self.center}, depth={self.depth}, "
            f"sigma={self.sigma})"
        )


class AbsorbingMask:
    """Extra loss ramped up over the outer edges of the box so the
    ballistic tail is absorbed instead of wrapping around.

    fraction: part of the box length masked at EACH edge.
    strength: peak extra loss rate in 1/ps.
    """

    def __init__(self, fraction=0.05, strength=2.0):
        if not 0 <= fraction < 0.5:
            raise ValueError("fraction must be in [0, 0.5)")
        if strength < 0:
            raise ValueError("strength must be >= 0")
        self.fraction = float(fraction)
        self.strength = float(strength)

    @classmethod
    def none(cls):
        return cls(fraction=0.0, strength=0.0)

    def evaluate(self, grid):
        """Extra loss rate profile (1/ps), smooth at the inner edge."""
        prof = np.zeros(grid.n)
        width = self.fraction * grid.length
        if width == 0.0 or self.strength == 0.0:
            return prof
        lo = grid.x_min + width
        hi = grid.x_max - width
        left = grid.x < lo
        right = grid.x > hi
        u_l = (lo - grid.x[left]) / width
        u_r = (grid.x[right] - hi) / width
        prof[left] = self.strength * np.sin(0.5 * np.pi * u_l) ** 2
        prof[right] = self.strength * np.sin(0.5 * np.pi * u_r) ** 2
        return prof

    def __repr__(self):
        return f"AbsorbingMask(fraction={self.fraction}, strength={self.strength})"
