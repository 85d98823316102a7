"""Monte Carlo sampling of (X_t, V_t) from the alternating renewal construction.

Paths are generated in fixed-size blocks.  Block ``i`` draws from its own
Philox stream keyed by ``(seed, i)``, so an ensemble is bit-identical for a
given seed whatever the number of worker threads.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .law import InitialVelocity

BLOCK_SIZE = 1 << 16


def block_rng(seed, block):
    """Generator for one block of paths, derived from (seed, block index)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy=seed, spawn_key=(block,))))


def gamma_variates(shape, rate, rng):
    """Gamma draws (density rate^a x^(a-1) e^(-rate x) / Gamma(a)), one per entry of ``shape``.

    Marsaglia-Tsang squeeze rejection; shapes below one are boosted to
    ``shape + 1`` and scaled by ``U ** (1 / shape)``.
    """
    shape = np.asarray(shape, dtype=float)
    rate = np.broadcast_to(np.asarray(rate, dtype=float), shape.shape)
    if np.any(shape <= 0) or np.any(rate <= 0):
        raise DomainError("gamma shape and rate must be positive")
    boosted = shape < 1
    a = np.where(boosted, shape + 1.0, shape)
    d = a - 1.0 / 3.0
    cc = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(shape.shape)
    todo = np.arange(shape.size)
    while todo.size:
        x = rng.standard_normal(todo.size)
        u = rng.random(todo.size)
        v = (1.0 + cc[todo] * x) ** 3
        ok = v > 0
        vs = np.where(ok, v, 1.0)
        accept = ok & (
            (u < 1.0 - 0.0331 * x**4) | (np.log(u) < 0.5 * x * x + d[todo] * (1.0 - vs + np.log(vs)))
        )
        out.flat[todo[accept]] = d[todo[accept]] * vs[accept]
        todo = todo[~accept]
    if np.any(boosted):
        idx = np.flatnonzero(boosted)
        u = rng.random(idx.size)
        out.flat[idx] *= u ** (1.0 / shape.flat[idx])
    return out / rate


def sample_gamma(shape, rate, rng):
    """A single gamma draw with the given shape and rate."""
    if not (shape > 0 and rate > 0):
        raise DomainError(f"gamma shape and rate must be positive, got {shape!r}, {rate!r}")
    return float(gamma_variates(np.array([shape]), rate, rng)[0])


@dataclass(frozen=True)
class PathSample:
    position: float
    velocity: float
    renewal_count: int
    hit_boundary: bool


def _check(t):
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t!r}")


def sample_path(params, t, v0, rng):
    """One realisation of (X_t, V_t, N_t) for a path started with velocity ``v0``."""
    _check(t)
    forward = InitialVelocity.parse(v0) is InitialVelocity.FORWARD
    elapsed = 0.0
    position = 0.0
    count = 0
    while True:
        if forward:
            velocity, sojourn = params.c, sample_gamma(params.alpha, params.lam, rng)
        else:
            velocity, sojourn = -params.v, sample_gamma(params.beta, params.mu, rng)
        if elapsed + sojourn >= t:
            position += velocity * (t - elapsed)
            return PathSample(position, velocity, count, count == 0)
        position += velocity * sojourn
        elapsed += sojourn
        count += 1
        forward = not forward


def sample_paths(params, t, v0, n, rng):
    """Vectorised ``sample_path`` over ``n`` paths.

    Returns ``(positions, forward_now, renewal_counts)``.
    """
    _check(t)
    forward = np.full(n, InitialVelocity.parse(v0) is InitialVelocity.FORWARD)
    elapsed = np.zeros(n)
    position = np.zeros(n)
    count = np.zeros(n, dtype=np.int64)
    active = np.arange(n)
    shapes = np.array([params.beta, params.alpha])
    rates = np.array([params.mu, params.lam])
    speeds = np.array([-params.v, params.c])
    while active.size:
        fwd = forward[active].astype(np.intp)
        sojourn = gamma_variates(shapes[fwd], rates[fwd], rng)
        velocity = speeds[fwd]
        done = elapsed[active] + sojourn >= t
        fin = active[done]
        position[fin] += velocity[done] * (t - elapsed[fin])
        go = active[~done]
        position[go] += velocity[~done] * sojourn[~done]
        elapsed[go] += sojourn[~done]
        count[go] += 1
        forward[go] = ~forward[go]
        active = go
    return position, forward, count


@dataclass(frozen=True)
class EmpiricalLaw:
    atom_frequency: float
    bin_edges: np.ndarray
    bin_masses: np.ndarray
    sample_count: int
    atom_count: int
    bin_counts: np.ndarray
    forward_count: int
    position_mean: float
    position_std: float

    @property
    def bin_centers(self):
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def densities(self):
        """Interior density estimate per bin (mass / width)."""
        return self.bin_masses / np.diff(self.bin_edges)


def _run_block(params, t, v0, seed, block, size, edges):
    position, forward, count = sample_paths(params, t, v0, size, block_rng(seed, block))
    interior = count > 0
    hist, _ = np.histogram(position[interior], bins=edges)
    return (
        int(size - interior.sum()),
        hist.astype(np.int64),
        int(forward.sum()),
        float(position.sum()),
        float(np.square(position).sum()),
    )


def ensemble(params, t, v0, n_samples, n_bins, seed, workers=1):
    """Simulate ``n_samples`` paths and summarise the law of X_t."""
    _check(t)
    if n_samples < 1 or n_bins < 1:
        raise DomainError("n_samples and n_bins must be at least 1")
    edges = np.linspace(-params.v * t, params.c * t, n_bins + 1)
    sizes = [min(BLOCK_SIZE, n_samples - start) for start in range(0, n_samples, BLOCK_SIZE)]
    jobs = [(params, t, v0, seed, i, size, edges) for i, size in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda job: _run_block(*job), jobs))
    else:
        results = [_run_block(*job) for job in jobs]
    # reduce in block order so float sums do not depend on scheduling
    atom = sum(r[0] for r in results)
    counts = np.sum([r[1] for r in results], axis=0)
    forward = sum(r[2] for r in results)
    total = math.fsum(r[3] for r in results)
    total_sq = math.fsum(r[4] for r in results)
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    std = math.sqrt(var * n_samples / (n_samples - 1)) if n_samples > 1 else 0.0
    return EmpiricalLaw(
        atom_frequency=atom / n_samples,
        bin_edges=edges,
        bin_masses=counts / n_samples,
        sample_count=n_samples,
        atom_count=atom,
        bin_counts=counts,
        forward_count=forward,
        position_mean=mean,
        position_std=std,
    )
