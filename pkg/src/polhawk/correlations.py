"""Streaming moment accumulation and normalized two-point maps.

Wigner averages over an ensemble of field snapshots are collected as
compensated sums of n(x) and n(x)n(x') (upper triangle, row-major,
diagonal included).  Normal ordering subtracts the half-quantum
counterterms:

    G1(x)    = <Psi* Psi>_W - 1/(2 dx)
    G2(x,x') = <n n'>_W - (1/(2 dx)) (1 + delta_xx')
               (<n>_W(x) + <n>_W(x') - 1/(2 dx))

and g2 = G2 / (G1 G1') by default (the Wigner-density normalization
<n>_W<n'>_W is available as an option; the two differ by the vacuum
counterterm in the denominator).

Sums are kept per block of realizations: blocks reduce in index order
for deterministic output and double as the resampling unit for
bootstrap error bars.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels


class GridMismatch(ValueError):
    pass


class InsufficientSamples(RuntimeError):
    pass


def tri_size(n):
    return n * (n + 1) // 2


def tri_index(n, i, j):
    """Flat index of unordered pair (i, j) in the row-major
    diagonal-included upper triangle."""
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    return lo * n - lo * (lo + 1) // 2 + hi


def tri_expand(n, tri):
    """Symmetric (n, n) matrix from its packed upper triangle."""
    out = np.empty((n, n), dtype=tri.dtype)
    iu, ju = np.triu_indices(n)
    out[iu, ju] = tri
    out[ju, iu] = tri
    return out


class CorrelationAccumulator:
    """Blockwise compensated sums of one- and two-point densities.

    accumulate() routes a snapshot into one block; merge_from() adds
    another accumulator blockwise (associative up to floating-point
    reassociation); totals() reduces blocks in index order.
    """

    def __init__(self, grid, n_blocks=1):
        if n_blocks < 1:
            raise ValueError("need at least one block")
        self.grid = grid
        self.n_blocks = n_blocks
        n = grid.n
        m = tri_size(n)
        self.count = np.zeros(n_blocks, dtype=np.int64)
        self.sum_n = np.zeros((n_blocks, n))
        self.comp_n = np.zeros((n_blocks, n))
        self.sum_nn = np.zeros((n_blocks, m))
        self.comp_nn = np.zeros((n_blocks, m))

    @property
    def n_samples(self):
        return int(self.count.sum())

    def accumulate(self, psi, block=0):
        psi = np.asarray(psi)
        if psi.shape != (self.grid.n,):
            raise GridMismatch(
                f"sample shape {psi.shape} does not match grid "
                f"({self.grid.n},)"
            )
        if not 0 <= block < self.n_blocks:
            raise ValueError(f"block {block} out of range")
        nvec = np.ascontiguousarray(np.abs(psi) ** 2, dtype=np.float64)
        _kernels.accumulate_tri(
            nvec, self.sum_n[block], self.comp_n[block],
            self.sum_nn[block], self.comp_nn[block],
        )
        self.count[block] += 1

    def merge_from(self, other):
        if other.grid != self.grid or other.n_blocks != self.n_blocks:
            raise GridMismatch("accumulators bound to different layouts")
        self.count += other.count
        self.sum_n += other.sum_n + other.comp_n
        self.sum_nn += other.sum_nn + other.comp_nn
        return self

    def totals(self):
        """(count, total n sums, total nn sums), blocks reduced in index
        order with their compensations folded in."""
        tot_n = np.zeros(self.grid.n)
        tot_nn = np.zeros(tri_size(self.grid.n))
        for b in range(self.n_blocks):
            tot_n += self.sum_n[b] + self.comp_n[b]
            tot_nn += self.sum_nn[b] + self.comp_nn[b]
        return int(self.count.sum()), tot_n, tot_nn

    def state_arrays(self):
        return {
            "count": self.count.copy(),
            "sum_n": self.sum_n.copy(),
            "comp_n": self.comp_n.copy(),
            "sum_nn": self.sum_nn.copy(),
            "comp_nn": self.comp_nn.copy(),
        }

    def load_state(self, arrays):
        for name in ("count", "sum_n", "comp_n", "sum_nn", "comp_nn"):
            mine = getattr(self, name)
            theirs = np.asarray(arrays[name])
            if theirs.shape != mine.shape:
                raise GridMismatch(f"stored {name} has shape "
                                   f"{theirs.shape}, expected {mine.shape}")
            mine[...] = theirs
        return self


def merge(a, b):
    """New accumulator holding a + b."""
    out = CorrelationAccumulator(a.grid, n_blocks=a.n_blocks)
    out.merge_from(a)
    out.merge_from(b)
    return out


def accumulate(acc, psi_sample, block=0):
    acc.accumulate(psi_sample, block=block)
    return acc


def wigner_density(acc):
    """<Psi* Psi>_W per point, half quantum included."""
    count, tot_n, _ = acc.totals()
    if count < 1:
        raise InsufficientSamples("no samples accumulated")
    return tot_n / count


def g1(acc):
    """Normally ordered density <a+ a> per point."""
    return wigner_density(acc) - 1.0 / (2.0 * acc.grid.dx)


def normal_order_G2(acc):
    """Normally ordered pair density <a+ a+' a' a> as a symmetric
    matrix; the diagonal carries the extra Bose factor (1 + delta)."""
    count, tot_n, tot_nn = acc.totals()
    if count < 2:
        raise InsufficientSamples("pair moments need at least 2 samples")
    n = acc.grid.n
    half = 1.0 / (2.0 * acc.grid.dx)
    w1 = tot_n / count
    wnn = tri_expand(n, tot_nn / count)
    bose = 1.0 + np.eye(n)
    return wnn - half * bose * (w1[:, None] + w1[None, :] - half)


@dataclass
class CorrelationMap:
    x_min: float
    dx: float
    n: int
    g2: np.ndarray
    G1: np.ndarray
    n_samples: int
    normalization: str = "normal_ordered"

    @property
    def x(self):
        return self.x_min + self.dx * np.arange(self.n)

    def __post_init__(self):
        self.g2 = np.asarray(self.g2, dtype=np.float64)
        self.G1 = np.asarray(self.G1, dtype=np.float64)
        if self.g2.shape != (self.n, self.n) or self.G1.shape != (self.n,):
            raise ValueError("array shapes inconsistent with n")


def g2_map(acc, normalization="normal_ordered", g1_floor=1e-9):
    """Normalized map g2 = G2 / (D(x) D(x')), with D = G1 by default or
    the raw Wigner density under normalization='wigner_density'.  Cells
    where either factor is at or below g1_floor are NaN-masked."""
    G2 = normal_order_G2(acc)
    w1 = wigner_density(acc)
    G1 = w1 - 1.0 / (2.0 * acc.grid.dx)
    if normalization == "normal_ordered":
        D = G1
    elif normalization == "wigner_density":
        D = w1
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    denom = np.outer(D, D)
    ok = np.outer(D > g1_floor, D > g1_floor)
    g2 = np.where(ok, G2 / np.where(ok, denom, 1.0), np.nan)
    return CorrelationMap(
        x_min=float(acc.grid.x[0]),
        dx=float(acc.grid.dx),
        n=acc.grid.n,
        g2=g2,
        G1=G1,
        n_samples=acc.n_samples,
        normalization=normalization,
    )


@dataclass
class BandSpec:
    """Geometry of the report bands, all lengths in µm.

    moustache: pairs with x a distance offset_lo..offset_hi upstream of
    the horizon and x' between slope_lo and slope_hi times that distance
    downstream of it.  diagonal: |x - x'| <= diag_halfwidth restricted
    to the same upstream window.  fringe: |x - fringe_x| <=
    fringe_halfwidth with the partner |x'| in fringe_partner (probes
    correlations pinned to the defect rather than to paired emission).
    """

    moustache_offsets: tuple = (6.0, 25.0)
    moustache_slopes: tuple = (1.6, 2.4)
    diag_halfwidth: float = 1.9
    fringe_x: float = 0.0
    fringe_halfwidth: float = 1.5
    fringe_partner: tuple = (6.0, 30.0)


@dataclass
class BandStat:
    mean: float
    se: float
    n_cells: int


@dataclass
class QuadrantStatistics:
    horizon_x: float
    quadrants: dict
    moustache: BandStat
    diagonal: BandStat
    fringe: BandStat
    bands: BandSpec = field(default_factory=BandSpec)


def _band_masks(x, horizon_x, bands, window):
    X, Xp = np.meshgrid(x, x, indexing="ij")
    inside = np.ones_like(X, dtype=bool)
    if window is not None:
        lo, hi = window
        inside &= (X >= lo) & (X <= hi) & (Xp >= lo) & (Xp <= hi)

    h = horizon_x
    masks = {
        "SW": inside & (X < h) & (Xp < h),
        "SE": inside & (X > h) & (Xp < h),
        "NW": inside & (X < h) & (Xp > h),
        "NE": inside & (X > h) & (Xp > h),
    }

    d_up = h - X  # distance upstream of the horizon
    d_dn = Xp - h
    o_lo, o_hi = bands.moustache_offsets
    s_lo, s_hi = bands.moustache_slopes
    masks["moustache"] = (
        inside & (d_up >= o_lo) & (d_up <= o_hi)
        & (d_dn >= s_lo * d_up) & (d_dn <= s_hi * d_up)
    )
    masks["diagonal"] = (
        inside & (np.abs(X - Xp) <= bands.diag_halfwidth)
        & (d_up >= o_lo) & (d_up <= o_hi)
    )
    p_lo, p_hi = bands.fringe_partner
    masks["fringe"] = (
        inside & (np.abs(X - bands.fringe_x) <= bands.fringe_halfwidth)
        & (np.abs(Xp) >= p_lo) & (np.abs(Xp) <= p_hi)
    )
    return masks


def _bootstrap_band_se(acc, cells_ij, normalization, g1_floor, n_boot,
                       seed):
    """Standard error of the band mean of g2 - 1 by resampling blocks
    with replacement.  The band's cell set is frozen to the full-sample
    one, so only statistical weight varies across resamples."""
    nb = acc.n_blocks
    occupied = np.nonzero(acc.count > 0)[0]
    if occupied.size < 2:
        return float("nan")
    i_arr, j_arr = cells_ij
    tri = tri_index(acc.grid.n, i_arr, j_arr)

    count_b = acc.count.astype(np.float64)
    sum_n_b = acc.sum_n + acc.comp_n
    band_nn_b = acc.sum_nn[:, tri] + acc.comp_nn[:, tri]
    half = 1.0 / (2.0 * acc.grid.dx)

    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    means = np.empty(n_boot)
    for t in range(n_boot):
        picks = rng.integers(0, occupied.size, size=occupied.size)
        w = np.bincount(occupied[picks], minlength=nb).astype(np.float64)
        cnt = w @ count_b
        if cnt < 2:
            means[t] = np.nan
            continue
        w1 = (w @ sum_n_b) / cnt
        wnn = (w @ band_nn_b) / cnt
        bose = np.where(i_arr == j_arr, 2.0, 1.0)
        G2 = wnn - half * bose * (w1[i_arr] + w1[j_arr] - half)
        if normalization == "normal_ordered":
            Di, Dj = w1[i_arr] - half, w1[j_arr] - half
        else:
            Di, Dj = w1[i_arr], w1[j_arr]
        ok = (Di > g1_floor) & (Dj > g1_floor)
        if not ok.any():
            means[t] = np.nan
            continue
        means[t] = np.mean(G2[ok] / (Di[ok] * Dj[ok]) - 1.0)
    means = means[np.isfinite(means)]
    if means.size < 2:
        return float("nan")
    return float(np.std(means, ddof=1))


def quadrant_statistics(cmap, horizon_x, acc=None, bands=None, window=None,
                        g1_floor=1e-9, n_boot=200, boot_seed=7):
    """Region statistics of g2 - 1 around a horizon at horizon_x.

    Quadrants split the (x, x') plane at the horizon; the moustache,
    diagonal, and fringe bands are defined by `bands` (see BandSpec).
    Each statistic is the mean over finite cells, with a block-bootstrap
    standard error when the accumulator is supplied (n_boot resamples of
    the realization blocks); without it the SE is NaN.
    """
    if bands is None:
        bands = BandSpec()
    x = cmap.x
    if not (x[0] <= horizon_x <= x[-1]):
        raise ValueError("horizon_x outside the stored grid")
    dev = cmap.g2 - 1.0
    masks = _band_masks(x, horizon_x, bands, window)

    def stat(name):
        m = masks[name] & np.isfinite(dev)
        cells = np.nonzero(m)
        n_cells = cells[0].size
        if n_cells == 0:
            return BandStat(mean=float("nan"), se=float("nan"), n_cells=0)
        mean = float(dev[m].mean())
        se = float("nan")
        if acc is not None:
            se = _bootstrap_band_se(
                acc, cells, cmap.normalization, g1_floor, n_boot, boot_seed
            )
        return BandStat(mean=mean, se=se, n_cells=n_cells)

    return QuadrantStatistics(
        horizon_x=float(horizon_x),
        quadrants={q: stat(q) for q in ("SW", "SE", "NW", "NE")},
        moustache=stat("moustache"),
        diagonal=stat("diagonal"),
        fringe=stat("fringe"),
        bands=bands,
    )
