import math

import numpy as np
import pytest

from gammatelegraph.errors import DomainError
from gammatelegraph.harness import bin_masses, integrate_component
from gammatelegraph.law import InitialVelocity, MotionParams, atom_probability, density
from gammatelegraph.moments import SymmetricGammaParams, mean_conditional
from gammatelegraph.simulate import (
    BLOCK_SIZE,
    block_rng,
    ensemble,
    gamma_variates,
    sample_gamma,
    sample_path,
    sample_paths,
)
from gammatelegraph.specfun import reg_lower_gamma

FORWARD, BACKWARD = InitialVelocity.FORWARD, InitialVelocity.BACKWARD


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.mark.parametrize("shape, rate", [(1.0, 2.0), (0.5, 1.0), (0.15, 3.0), (2.5, 0.7), (40.0, 5.0)])
def test_gamma_moments(shape, rate, rng):
    n = 1_000_000
    x = gamma_variates(np.full(n, shape), rate, rng)
    assert np.all(x > 0)
    mean, var = shape / rate, shape / rate**2
    assert abs(x.mean() - mean) <= 4 * math.sqrt(var / n)
    # variance of the sample variance uses the fourth central moment 3a(a+2)/rate^4
    mu4 = 3 * shape * (shape + 2) / rate**4
    assert abs(x.var() - var) <= 4 * math.sqrt((mu4 - var**2) / n)


def test_gamma_cdf_point(rng):
    n = 1_000_000
    x = gamma_variates(np.full(n, 0.5), 1.0, rng)
    q = reg_lower_gamma(0.5, 1.0)
    assert q == pytest.approx(0.8427, abs=1e-4)
    assert abs((x <= 1).mean() - q) <= 4 * math.sqrt(q * (1 - q) / n)


def test_gamma_mixed_shapes(rng):
    shapes = np.tile([0.3, 3.0], 200_000)
    x = gamma_variates(shapes, np.tile([1.0, 2.0], 200_000), rng)
    assert abs(x[0::2].mean() - 0.3) < 4 * math.sqrt(0.3 / 200_000)
    assert abs(x[1::2].mean() - 1.5) < 4 * math.sqrt(0.75 / 200_000)


def test_sample_gamma_scalar(rng):
    assert sample_gamma(2.0, 1.0, rng) > 0
    with pytest.raises(DomainError):
        sample_gamma(0.0, 1.0, rng)
    with pytest.raises(DomainError):
        sample_gamma(1.0, -1.0, rng)


@pytest.mark.parametrize("v0", [FORWARD, BACKWARD])
def test_sample_path_invariants(v0, rng):
    p = MotionParams(1.5, 0.5, 2.0, 0.6, 1.0, 1.7)
    t = 2.0
    start = p.c if v0 is FORWARD else -p.v
    for _ in range(3000):
        s = sample_path(p, t, v0, rng)
        assert -p.v * t <= s.position <= p.c * t
        # velocity bookkeeping equals the parity formula
        parity = (p.c - p.v) / 2 + v0.sign * (p.c + p.v) / 2 * (-1) ** s.renewal_count
        assert s.velocity == pytest.approx(parity, abs=1e-15)
        assert s.hit_boundary == (s.renewal_count == 0)
        if s.hit_boundary:
            assert s.position == start * t


def test_sample_path_atom_frequency(rng):
    p = MotionParams(1, 1, 1, 1, 1, 1)
    n = 1_000_000
    pos, fwd, count = sample_paths(p, 1.0, FORWARD, n, rng)
    q = math.exp(-1)
    freq = (count == 0).mean()
    assert abs(freq - q) <= 4 * math.sqrt(q * (1 - q) / n)
    assert np.all(pos[count == 0] == 1.0)
    # positions equal to -v t never occur for a forward start
    assert not np.any(pos == -1.0)
    assert np.all(fwd == (count % 2 == 0))


def test_vectorised_matches_scalar_in_law(rng):
    p = MotionParams(1, 2, 1.5, 0.8, 0.7, 1.3)
    n = 20_000
    scalar = np.array([sample_path(p, 1.5, BACKWARD, rng).position for _ in range(n)])
    vec, _, _ = sample_paths(p, 1.5, BACKWARD, n, rng)
    sd = math.sqrt((scalar.var() + vec.var()) / n)
    assert abs(scalar.mean() - vec.mean()) < 4 * sd


def test_ensemble_single_path_at_boundary():
    # shape 50 with tiny t: a reversal is essentially impossible
    p = MotionParams(1, 1, 1, 50.0, 1, 1)
    emp = ensemble(p, 0.01, FORWARD, 1, 10, seed=0)
    assert emp.atom_frequency == 1.0
    assert np.all(emp.bin_masses == 0)


def test_ensemble_partition_and_reproducibility():
    p = MotionParams(1, 1, 1, 0.5, 1, 1.5)
    n = BLOCK_SIZE * 2 + 1234
    a = ensemble(p, 2.0, FORWARD, n, 37, seed=9)
    b = ensemble(p, 2.0, FORWARD, n, 37, seed=9, workers=3)
    c = ensemble(p, 2.0, FORWARD, n, 37, seed=10)
    assert a.atom_count + int(a.bin_counts.sum()) == n
    assert a.atom_frequency + a.bin_masses.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(a.bin_counts, b.bin_counts)
    assert (a.atom_count, a.forward_count, a.position_mean, a.position_std) == (b.atom_count, b.forward_count, b.position_mean, b.position_std)
    assert not np.array_equal(a.bin_counts, c.bin_counts)
    assert a.bin_edges[0] == -2.0 and a.bin_edges[-1] == 2.0


def test_block_streams_differ():
    x = block_rng(1, 0).random(4)
    y = block_rng(1, 1).random(4)
    assert not np.array_equal(x, y)
    assert np.array_equal(x, block_rng(1, 0).random(4))


def test_ensemble_domain():
    p = MotionParams(1, 1, 1, 1, 1, 1)
    with pytest.raises(DomainError):
        ensemble(p, 1.0, FORWARD, 0, 10, 0)
    with pytest.raises(DomainError):
        ensemble(p, 0.0, FORWARD, 10, 10, 0)


@pytest.mark.parametrize("v0", [FORWARD, BACKWARD])
def test_atom_and_velocity_parity(v0):
    p = MotionParams(1.2, 0.8, 1.0, 0.7, 1.4, 1.6)
    n, t = 400_000, 1.5
    emp = ensemble(p, t, v0, n, 20, seed=21)
    q = atom_probability(p, t, v0)
    assert abs(emp.atom_frequency - q) <= 4 * math.sqrt(q * (1 - q) / n)
    # P(V_t = c) = atom (forward start only) + integral of f
    prob_fwd = integrate_component(p, t, v0, "f") + (q if v0 is FORWARD else 0.0)
    assert abs(emp.forward_count / n - prob_fwd) <= 3 * math.sqrt(prob_fwd * (1 - prob_fwd) / n)


@pytest.mark.parametrize("alpha", [0.5, 2.0])
@pytest.mark.parametrize("v0", [FORWARD, BACKWARD])
def test_mean_matches_series(alpha, v0):
    sym = SymmetricGammaParams(1.5, 0.5, 1.3, alpha)
    n = 300_000
    emp = ensemble(sym.motion(), 2.0, v0, n, 10, seed=5)
    exact = mean_conditional(sym, 2.0, v0)
    assert abs(emp.position_mean - exact) <= 4 * emp.position_std / math.sqrt(n)


def _component_bin_frequency(params, t, x_lo, x_hi, n, seed, forward_moving):
    hits = 0
    blocks = (n + BLOCK_SIZE - 1) // BLOCK_SIZE
    for i in range(blocks):
        size = min(BLOCK_SIZE, n - i * BLOCK_SIZE)
        pos, fwd, count = sample_paths(params, t, FORWARD, size, block_rng(seed, i))
        sel = (count > 0) & (pos >= x_lo) & (pos < x_hi) & (fwd == forward_moving)
        hits += int(sel.sum())
    return hits / n


@pytest.mark.slow
def test_forward_density_at_origin_by_simulation():
    p = MotionParams(1, 1, 1, 0.5, 1, 0.5)
    n, width = 4_000_000, 0.01
    freq = _component_bin_frequency(p, 1.0, -width / 2, width / 2, n, 77, True)
    f0 = density(p, 0.0, 1.0).forward_density
    mass = f0 * width  # density is smooth at 0; bin curvature error ~1e-6 relative
    assert abs(freq - mass) <= 4 * math.sqrt(mass * (1 - mass) / n)


@pytest.mark.slow
def test_backward_density_by_simulation():
    p = MotionParams(1, 1, 1, 1.5, 1, 1.5)
    n, width = 4_000_000, 0.01
    freq = _component_bin_frequency(p, 2.0, 0.5 - width / 2, 0.5 + width / 2, n, 78, False)
    mass = density(p, 0.5, 2.0).backward_density * width
    assert abs(freq - mass) <= 4 * math.sqrt(mass * (1 - mass) / n)


def test_histogram_coverage_backward_start():
    p = MotionParams(1, 1.5, 1, 1.5, 2, 0.8)
    n, t = 300_000, 2.0
    emp = ensemble(p, t, BACKWARD, n, 40, seed=3)
    expected = bin_masses(p, t, BACKWARD, emp.bin_edges)
    sd = np.sqrt(n * expected * (1 - expected))
    within = np.abs(emp.bin_counts - n * expected) <= 3 * sd
    assert within.mean() >= 0.95
