"""Stochastic Wigner evolution of the driven field.

Each realization integrates

    i dPsi = (w0 - w_p - (hbar/2m*) d2x + V + g(|Psi|^2 - 1/dx)
              - i gamma_loc/2) Psi dt + F_p dt + sqrt(gamma_loc/(4 dx)) dW

with dW complex Gaussian per grid point, E[dW]=0, E[dW^2]=0 and
E[|dW|^2]=2dt to leading order, so a lossy empty cavity settles at the
half-quantum Wigner occupation 1/(2 dx) per point.  The discrete scheme
matches the noise to the decay it actually applies: one update is the
deterministic step (amplitude factor e^(-gamma_loc dt / 2) pointwise)
followed by an injection of per-quadrature variance
(1 - e^(-gamma_loc dt)) / (4 dx), which makes the uniform half-quantum
field an exact fixed point of the map at any step size instead of one
with an O(gamma dt) occupation bias.  gamma_loc includes the
absorbing-mask extra loss, with noise matched to it, which keeps the
boundary region at vacuum occupation instead of draining below it.

Realizations are seeded individually from a counter-based generator, so
any worker layout reproduces the same ensemble bit for bit.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from .core import AbsorbingMask, PotentialProfile
from .correlations import CorrelationAccumulator
from .engine import SplitStepEngine
from .meanfield import make_engine, relax_to_steady

DECORRELATION_FLOOR_GAMMAS = 2.0  # sample_interval >= this / gamma


class NonFinite(FloatingPointError):
    def __init__(self, msg, realization=None):
        super().__init__(msg)
        self.realization = realization


@dataclass
class TwaConfig:
    """Full input bundle for an ensemble run: the mean-field problem
    (grid, params, pump, potential, mask, dt) plus ensemble controls.

    burn_in defaults to 10/gamma; sample_interval is floored at 2/gamma
    so snapshots from one trajectory are effectively independent.
    n_blocks fixed-realization blocks are the determinism and bootstrap
    unit: block b covers a contiguous realization range, is accumulated
    by exactly one worker, and reduces in block order.
    """

    grid: object
    params: object
    pump: object
    potential: object = None
    mask: object = None
    dt: float = None
    seed: int = 0
    n_realizations: int = 0
    burn_in: float = None
    sample_interval: float = None
    samples_per_realization: int = 1
    batch_size: int = 64
    n_blocks: int = 100

    def __post_init__(self):
        if self.potential is None:
            self.potential = PotentialProfile.none()
        if self.mask is None:
            self.mask = AbsorbingMask.none()
        if self.dt is None:
            self.dt = self.grid.dt_stable(self.params, 0.5)
        floor = DECORRELATION_FLOOR_GAMMAS / self.params.gamma
        if self.burn_in is None:
            self.burn_in = 10.0 / self.params.gamma
        if self.sample_interval is None:
            self.sample_interval = floor
        if self.sample_interval < floor * (1 - 1e-12):
            raise ValueError(
                f"sample_interval {self.sample_interval} below the "
                f"decorrelation floor {floor:.4g}"
            )
        if self.n_realizations < 0:
            raise ValueError("n_realizations must be >= 0")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")
        if self.samples_per_realization < 1:
            raise ValueError("need at least one sample per realization")
        if self.batch_size < 1 or self.n_blocks < 1:
            raise ValueError("batch_size and n_blocks must be >= 1")

    def block_range(self, b):
        """Contiguous realization range [lo, hi) of block b."""
        R, NB = self.n_realizations, self.n_blocks
        return (b * R) // NB, ((b + 1) * R) // NB


class NoiseStream:
    """Per-realization noise source.

    A counter-based generator keyed by (seed, realization) is consumed
    in a fixed order: 2N standard normals for the initial vacuum fill,
    then 2N per step.  Consecutive normals pair into complex deviates
    (even index real, odd imaginary), so the draw for a given (seed,
    realization, step, grid point) never depends on scheduling or on
    how many steps are drawn per chunk.
    """

    def __init__(self, seed, realization, n_points):
        self.realization = realization
        self.n = n_points
        self.rng = np.random.Generator(
            np.random.Philox(key=[int(seed), int(realization)])
        )

    def vacuum_field(self, dx):
        """Initial half-quantum fill: complex Gaussian of total variance
        1/(2 dx) per point."""
        eta = self.rng.standard_normal(2 * self.n)
        z = eta.view(np.complex128)
        return z * np.sqrt(1.0 / (4.0 * dx))

    def fill_steps(self, out):
        """Fill out (k_steps, 2N floats viewed as k_steps x N complex)
        with unit normals for k_steps consecutive steps."""
        self.rng.standard_normal(out=out)
        return out.view(np.complex128)


def noise_amplitude(grid, params, mask, dt):
    """Per-quadrature noise std for one step,
    sqrt((1 - e^(-gamma_loc dt)) / (4 dx)), with gamma_loc the local
    total loss rate including the absorbing mask.  Matching the injected
    variance to the decay the discrete step applies (rather than its
    gamma_loc dt limit) keeps the empty-cavity occupation at exactly
    1/(2 dx) for any step size."""
    extra = mask.evaluate(grid) if mask is not None else 0.0
    gloc = params.gamma + extra
    return np.sqrt(-np.expm1(-gloc * dt) / (4.0 * grid.dx))


def make_stochastic_engine(config):
    """Engine for the Wigner drift: the deterministic kernel with the
    -1/dx density counterterm in the nonlinearity."""
    return make_engine(
        config.grid, config.params, config.pump, config.potential,
        config.dt, config.mask, density_offset=1.0 / config.grid.dx,
    )


def evolve_stochastic(psi, grid, params, pump, potential, dt, noise,
                      mask=None, engine=None):
    """One stochastic step: the symmetric deterministic step (with the
    Wigner density counterterm) followed by the additive noise increment
    drawn from the stream.  Matches the deterministic step bit for bit
    when gamma and the mask vanish."""
    if engine is None:
        F = pump.evaluate(grid) if hasattr(pump, "evaluate") else pump
        V = (potential.evaluate(grid)
             if hasattr(potential, "evaluate") else potential)
        M = mask.evaluate(grid) if hasattr(mask, "evaluate") else mask
        engine = SplitStepEngine(grid, params, F, V, dt, mask_profile=M,
                                 density_offset=1.0 / grid.dx)
    psi = engine.step(psi)
    if not np.all(np.isfinite(psi)):
        raise NonFinite("field lost finiteness in stochastic step")
    amp = noise_amplitude(grid, params, mask, dt)
    buf = np.empty((1, 2 * grid.n))
    eta = noise.fill_steps(buf)[0]
    if np.any(amp > 0):
        psi = psi + amp * eta
    return psi


@dataclass
class EnsembleReport:
    n_realizations: int
    n_completed: int
    aborted: list
    samples_accumulated: int
    wall_time_s: float
    seed: int
    blocks_done: list = field(default_factory=list)


def _run_block(config, psi_mf, block, acc):
    """Integrate every realization of one block and accumulate its
    snapshots.  Realizations are batched for vector width; results do
    not depend on batch_size because rows never mix and snapshots are
    pushed in realization order after each row finishes finite."""
    grid, params = config.grid, config.params
    dt = config.dt
    eng = make_stochastic_engine(config)
    amp = noise_amplitude(grid, params, config.mask, dt)
    n_burn = max(1, int(round(config.burn_in / dt)))
    n_gap = max(1, int(round(config.sample_interval / dt)))
    S = config.samples_per_realization
    N = grid.n
    chunk = 32

    lo, hi = config.block_range(block)
    aborted = []
    pushed = 0
    for r0 in range(lo, hi, config.batch_size):
        rows = list(range(r0, min(r0 + config.batch_size, hi)))
        B = len(rows)
        streams = [NoiseStream(config.seed, r, N) for r in rows]
        psi = np.tile(psi_mf, (B, 1))
        for b in range(B):
            psi[b] += streams[b].vacuum_field(grid.dx)

        snaps = np.empty((B, S, N), dtype=np.complex128)
        slab = np.empty((B, chunk, 2 * N))
        zchunk = np.empty((chunk, B, N), dtype=np.complex128)
        tmp = np.empty((B, N), dtype=np.complex128)
        segments = [n_burn] + [n_gap] * (S - 1)
        with np.errstate(over="ignore", invalid="ignore"):
            for si, seg in enumerate(segments):
                done = 0
                while done < seg:
                    k = min(chunk, seg - done)
                    for b in range(B):
                        streams[b].fill_steps(slab[b, :k])
                    # step-major layout so each step reads one
                    # contiguous (B, N) plane
                    np.copyto(zchunk[:k],
                              slab.view(np.complex128)[:, :k].transpose(1, 0, 2))
                    for j in range(k):
                        psi = eng.step(psi)
                        np.multiply(zchunk[j], amp, out=tmp)
                        psi += tmp
                    done += k
                snaps[:, si, :] = psi

        for b, r in enumerate(rows):
            if np.all(np.isfinite(snaps[b])):
                for si in range(S):
                    acc.accumulate(snaps[b, si], block=block)
                pushed += S
            else:
                aborted.append(r)
    return pushed, aborted


def prepare_mean_field(config, **relax_kw):
    """Deterministic steady state shared by all realizations, prepared
    on the upper branch by drive ramping wherever a segment is bistable.
    An undriven config skips the relaxation."""
    if (not hasattr(config.pump, "segments")
            or config.pump.max_amplitude() == 0.0):
        return np.zeros(config.grid.n, dtype=np.complex128)
    kw = dict(dt=config.dt, prepare="upper")
    kw.update(relax_kw)
    sol = relax_to_steady(
        config.grid, config.params, config.pump, config.potential,
        config.mask, **kw,
    )
    return sol.psi


def _worker(payload):
    config, psi_mf, blocks = payload
    acc = CorrelationAccumulator(config.grid, n_blocks=config.n_blocks)
    pushed = 0
    aborted = []
    for b in blocks:
        p, a = _run_block(config, psi_mf, b, acc)
        pushed += p
        aborted.extend(a)
    return blocks, acc.state_arrays(), pushed, aborted


def run_ensemble(config, sink=None, n_workers=1, psi_mf=None,
                 checkpoint_path=None, resume_state=None, progress=None):
    """Run the full ensemble into a correlation accumulator.

    The block list is split contiguously over workers; each block is
    accumulated by exactly one worker and merged back in block order, so
    the final accumulator is a pure function of (config, seed) whatever
    n_workers is.  A non-finite realization is dropped (with its index
    reported), never the ensemble.  checkpoint_path, when given, stores
    completed blocks after each flush so a run can resume.
    """
    t0 = time.perf_counter()
    if sink is None:
        sink = CorrelationAccumulator(config.grid, n_blocks=config.n_blocks)
    if config.n_realizations == 0:
        return sink, EnsembleReport(0, 0, [], 0, 0.0, config.seed)
    if psi_mf is None:
        psi_mf = prepare_mean_field(config)
    psi_mf = np.asarray(psi_mf, dtype=np.complex128)

    done_blocks = set()
    if resume_state is not None:
        sink.load_state(resume_state["arrays"])
        done_blocks = set(int(b) for b in resume_state["blocks_done"])

    todo = [b for b in range(config.n_blocks)
            if b not in done_blocks and config.block_range(b)[0]
            < config.block_range(b)[1]]
    pushed = 0
    aborted = []

    if n_workers <= 1:
        for b in todo:
            p, a = _run_block(config, psi_mf, b, sink)
            pushed += p
            aborted.extend(a)
            done_blocks.add(b)
            if checkpoint_path is not None:
                _write_checkpoint(checkpoint_path, config, sink, done_blocks)
            if progress is not None:
                progress(b, config.n_blocks)
    else:
        import multiprocessing as mp

        shares = [todo[i::n_workers] for i in range(n_workers)]
        payloads = [(config, psi_mf, s) for s in shares if s]
        ctx = mp.get_context("spawn")
        with ctx.Pool(processes=len(payloads)) as pool:
            results = pool.map(_worker, payloads)
        # merge worker partials in block order: each block lives in
        # exactly one partial, so ordering is just bookkeeping
        for blocks, arrays, p, a in results:
            part = CorrelationAccumulator(config.grid,
                                          n_blocks=config.n_blocks)
            part.load_state(arrays)
            sink.merge_from(part)
            pushed += p
            aborted.extend(a)
            done_blocks.update(blocks)
        if checkpoint_path is not None:
            _write_checkpoint(checkpoint_path, config, sink, done_blocks)

    aborted.sort()
    report = EnsembleReport(
        n_realizations=config.n_realizations,
        n_completed=config.n_realizations - len(aborted),
        aborted=aborted,
        samples_accumulated=pushed,
        wall_time_s=time.perf_counter() - t0,
        seed=config.seed,
        blocks_done=sorted(done_blocks),
    )
    return sink, report


def _write_checkpoint(path, config, acc, done_blocks):
    import os
    import tempfile

    arrays = acc.state_arrays()
    meta = np.array([config.seed, config.n_realizations], dtype=np.uint64)
    done = np.zeros(config.n_blocks, dtype=bool)
    for b in done_blocks:
        done[b] = True
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path))
                               or ".", suffix=".tmp")
    os.close(fd)
    try:
        with open(tmp, "wb") as fh:
            np.savez(fh, meta=meta, blocks_done=done, **arrays)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def load_checkpoint(path, config):
    """Read a checkpoint back; refuses one written for a different seed
    or realization count."""
    with np.load(path) as data:
        meta = data["meta"]
        if int(meta[0]) != int(config.seed) or int(meta[1]) != int(
                config.n_realizations):
            raise ValueError(
                "checkpoint belongs to a different run "
                f"(seed {int(meta[0])}, R {int(meta[1])})"
            )
        arrays = {k: data[k] for k in data.files
                  if k not in ("meta", "blocks_done")}
        blocks_done = np.nonzero(data["blocks_done"])[0].tolist()
    return {"arrays": arrays, "blocks_done": blocks_done}
