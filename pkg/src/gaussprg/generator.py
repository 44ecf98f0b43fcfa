"""Blended-design pseudorandom generator for polynomial threshold functions.

The output law is a geometrically weighted average of ell independent
moment designs,

    Y = sum_{i=1..ell} w_i Y_i,   w_i ∝ (sqrt(1 - delta^2))^(i-1),

normalized so sum w_i^2 = 1, which makes every coordinate have unit
variance (up to the designs' statistical-distance slack). Each Y_i is an
n-dimensional design built from a k-wise independent family mapped onto
Gauss-Hermite atoms; all ell designs share one sampler description but
consume disjoint ranges of the master bitstream.

Parameter plan for accuracy target eps and exponent k against degree-d
threshold functions: delta = eps^(1/3), ell = ceil(delta^-2 * ln(eps^-k(2d+1))),
design order 10*d*(3k+3), per-design statistical budget eps^k/(n*ell).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from ._bits import derive_key, extract_blocks_from_words, stream_bytes, stream_words
from .designs import (
    DesignSampler,
    build_sampler,
    design_sample_batch,
    design_sample_batch_f64,
    sampler_to_json,
    seed_bits,
    symbols_from_bytes,
)

__all__ = [
    "BlendWeights",
    "GeneratorConfig",
    "blend_weights",
    "plan",
    "total_seed_bits",
    "seed_breakdown",
    "sample",
    "sample_batch",
    "prop9_coefficients",
    "prop9_hybrid_sample",
    "config_to_json",
]

_MAX_ELL = 2**62


@dataclass(frozen=True)
class BlendWeights:
    """Unit-norm geometric blend weights: w_i ∝ (1-eps^2)^((i-1)/2)."""

    epsilon: float
    ell: int
    w: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "w", np.asarray(self.w, dtype=np.float64))


def blend_weights(epsilon: float, ell: int) -> BlendWeights:
    """Normalized averaging weights; sum of squares is exactly 1.

    Built by cumulative products so consecutive ratios equal
    sqrt(1 - eps^2) to the last ulp.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if ell < 1:
        raise ValueError("ell must be >= 1")
    beta = math.sqrt(1.0 - epsilon * epsilon)
    raw = np.cumprod(np.concatenate(([1.0], np.full(ell - 1, beta))))
    z = math.sqrt(float(np.sum(raw * raw)))
    return BlendWeights(epsilon, ell, raw / z)


@dataclass(frozen=True)
class GeneratorConfig:
    """Fully planned generator: dimensions, blend schedule, shared sampler."""

    n: int
    d: int
    k: int
    epsilon: float
    delta: float
    ell: int
    ell_formula: int
    truncated: bool
    design_order: int
    quad_points: int
    tv_budget: float
    sampler: DesignSampler
    ell_cap: int | None = None

    @property
    def q(self) -> int:
        return self.sampler.q

    @property
    def kwise_order(self) -> int:
        return self.sampler.family.k

    @property
    def block_bits(self) -> int:
        return self.sampler.block_bits

    @property
    def design_offsets(self) -> list[int]:
        """Bit offset of each design's seed range in the master stream."""
        per = seed_bits(self.sampler)
        return [i * per for i in range(self.ell)]


def plan(n: int, d: int, k: int, epsilon: float, ell_cap: int | None = None) -> GeneratorConfig:
    """Derive all generator parameters for (n, d, k, epsilon).

    Raises if the chain length overflows without a cap or if the
    statistical budget needs a modulus beyond 2^62.
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if d < 1 or k < 1 or n < 1:
        raise ValueError("need n, d, k >= 1")
    delta = epsilon ** (1.0 / 3.0)
    log_term = k * (2 * d + 1) * math.log(1.0 / epsilon)
    raw_ell = delta**-2 * log_term
    if not math.isfinite(raw_ell) or raw_ell > _MAX_ELL:
        if ell_cap is None:
            raise ValueError("chain length overflows; supply ell_cap")
        ell_formula = _MAX_ELL
    else:
        ell_formula = max(1, math.ceil(raw_ell))
    truncated = ell_cap is not None and ell_cap < ell_formula
    ell = min(ell_formula, ell_cap) if ell_cap is not None else ell_formula
    if ell < 1:
        raise ValueError("ell_cap must be >= 1")
    design_order = 10 * d * (3 * k + 3)
    quad_points = (design_order + 2) // 2  # minimal M with 2M-1 >= order
    tv_budget = epsilon**k / (n * ell)
    sampler = build_sampler(quad_points, design_order, n, tv_budget)
    return GeneratorConfig(
        n=n,
        d=d,
        k=k,
        epsilon=epsilon,
        delta=delta,
        ell=ell,
        ell_formula=ell_formula,
        truncated=truncated,
        design_order=design_order,
        quad_points=quad_points,
        tv_budget=tv_budget,
        sampler=sampler,
        ell_cap=ell_cap,
    )


def total_seed_bits(config: GeneratorConfig) -> int:
    """Master bits per output vector: ell * K * (ceil(log2 q) + 16)."""
    return config.ell * seed_bits(config.sampler)


def seed_breakdown(config: GeneratorConfig) -> dict:
    """Exact bit count plus the factors behind it."""
    return {
        "ell": config.ell,
        "K": config.kwise_order,
        "q": config.q,
        "field_bits": config.sampler.field_bits,
        "block_bits": config.block_bits,
        "bits_per_design": seed_bits(config.sampler),
        "total_seed_bits": total_seed_bits(config),
    }


def _blend(config: GeneratorConfig, design_vals: np.ndarray) -> np.ndarray:
    """(B, ell, n) design draws -> (B, n) blended output, accumulated in
    chain order so results do not depend on BLAS reduction order."""
    w = blend_weights(config.delta, config.ell).w
    out = np.zeros((design_vals.shape[0], design_vals.shape[2]))
    for i in range(config.ell):
        out += w[i] * design_vals[:, i, :]
    return out


def _samples_from_symbols(config: GeneratorConfig, symbols: np.ndarray) -> np.ndarray:
    sampler = config.sampler
    K = config.kwise_order
    seeds = symbols.reshape(-1, K)
    if seeds.dtype == np.float64:
        vals = design_sample_batch_f64(sampler, seeds)
    else:
        vals = design_sample_batch(sampler, seeds)
    vals = vals.reshape(symbols.shape[0], config.ell, config.n)
    return _blend(config, vals)


def _samples_from_words(config: GeneratorConfig, words: np.ndarray) -> np.ndarray:
    sampler = config.sampler
    blocks = extract_blocks_from_words(words, config.ell * config.kwise_order, sampler.block_bits)
    np.mod(blocks, np.uint64(sampler.q), out=blocks)
    fam = sampler.family
    if fam.k * (fam.q - 1) ** 2 < 2**53:
        return _samples_from_symbols(config, blocks.astype(np.float64))
    return _samples_from_symbols(config, blocks.astype(np.int64))


class _SlabWorkspace:
    """Reusable buffers for the word-level sampling fast path; avoids
    reallocating ~100 MB of temporaries per slab on a bandwidth-bound host."""

    def __init__(self, config: GeneratorConfig, capacity: int):
        sampler = config.sampler
        m = config.ell * config.kwise_order
        bb = sampler.block_bits
        offsets = np.arange(m, dtype=np.int64) * bb
        self.wi = offsets >> 6
        self.r = (offsets & 63).astype(np.uint64)
        self.shift_in = np.uint64(63) - self.r
        self.shift_out = np.uint64(64 - bb)
        self.q_u64 = np.uint64(sampler.q)
        self.hi = np.empty((capacity, m), dtype=np.uint64)
        self.lo = np.empty((capacity, m), dtype=np.uint64)
        self.seeds_f = np.empty((capacity * config.ell, config.kwise_order))
        self.prods = np.empty((capacity * config.ell, config.n))
        from .designs import _power_table  # local: private helper

        self.powers_f = _power_table(sampler.family).astype(np.float64)
        self.thr_f = sampler.thresholds.astype(np.float64)
        self.nodes = sampler.quadrature.nodes
        self.w = blend_weights(config.delta, config.ell).w
        self.nwords_needed = int(self.wi[-1]) + 2

    def run(self, config: GeneratorConfig, words: np.ndarray, out: np.ndarray) -> None:
        cnt = words.shape[0]
        if words.shape[1] < self.nwords_needed:
            ext = np.zeros((cnt, self.nwords_needed), dtype=np.uint64)
            ext[:, : words.shape[1]] = words
            words = ext
        hi = self.hi[:cnt]
        lo = self.lo[:cnt]
        np.take(words, self.wi, axis=1, out=hi)
        np.take(words, self.wi + 1, axis=1, out=lo)
        np.left_shift(hi, self.r, out=hi)
        np.right_shift(lo, np.uint64(1), out=lo)
        np.right_shift(lo, self.shift_in, out=lo)
        np.bitwise_or(hi, lo, out=hi)
        np.right_shift(hi, self.shift_out, out=hi)
        np.mod(hi, self.q_u64, out=hi)
        ell, K, n = config.ell, config.kwise_order, config.n
        seeds_f = self.seeds_f[: cnt * ell]
        np.copyto(seeds_f, hi.reshape(cnt * ell, K), casting="unsafe")
        prods = self.prods[: cnt * ell]
        np.matmul(seeds_f, self.powers_f, out=prods)
        np.mod(prods, float(config.q), out=prods)
        atoms = np.searchsorted(self.thr_f, prods, side="right")
        vals = self.nodes[atoms].reshape(cnt, ell, n)
        out.fill(0.0)
        for i in range(ell):
            out += self.w[i] * vals[:, i, :]


def _samples_from_bytes(config: GeneratorConfig, data: np.ndarray) -> np.ndarray:
    symbols = symbols_from_bytes(config.sampler, data, config.ell * config.kwise_order)
    return _samples_from_symbols(config, symbols)


def sample(config: GeneratorConfig, seed_bits_data: bytes) -> np.ndarray:
    """One output vector from an explicit bitstream.

    Consumes exactly total_seed_bits(config) bits; design i reads the block
    range [i*K*block_bits, (i+1)*K*block_bits).
    """
    need = total_seed_bits(config)
    if len(seed_bits_data) * 8 < need:
        raise ValueError(f"need {need} seed bits, got {len(seed_bits_data) * 8}")
    data = np.frombuffer(seed_bits_data, dtype=np.uint8)[None, :]
    return _samples_from_bytes(config, data)[0]


def sample_batch(
    config: GeneratorConfig, master_seed: str, count: int, start: int = 0
) -> np.ndarray:
    """Outputs for seed indices [start, start+count) under a hex master seed.

    Sample i is a pure function of (master_seed, i): batching and worker
    layout never change the stream.
    """
    key = derive_key(master_seed, "generator", config.n, config.d, config.k, config.epsilon, config.ell)
    total = total_seed_bits(config)
    out = np.empty((count, config.n))
    n_symbols = config.ell * config.kwise_order
    fam = config.sampler.family
    if config.block_bits <= 57 and fam.k * (fam.q - 1) ** 2 < 2**53:
        nwords = -(-total // 64)
        # slabs sized so intermediates stay near cache (~16 MB of words)
        step = max(1, min(count, 2**21 // max(nwords, 1)))
        ws = _SlabWorkspace(config, step)
        for lo in range(0, count, step):
            hi = min(lo + step, count)
            words = stream_words(key, start + lo, hi - lo, nwords)
            ws.run(config, words, out[lo:hi])
    elif config.block_bits <= 57:
        nwords = -(-total // 64)
        step = max(1, 2**22 // max(nwords, 1))
        for lo in range(0, count, step):
            hi = min(lo + step, count)
            words = stream_words(key, start + lo, hi - lo, nwords)
            out[lo:hi] = _samples_from_words(config, words)
    else:
        nbytes = -(-total // 8)
        step = max(1, 2**26 // max(nbytes, 1))
        for lo in range(0, count, step):
            hi = min(lo + step, count)
            data = stream_bytes(key, start + lo, hi - lo, nbytes)
            out[lo:hi] = _samples_from_bytes(config, data)
    return out


def prop9_coefficients(epsilon: float, ell: int) -> tuple[np.ndarray, float]:
    """Deterministic mixture coefficients eps*(sqrt(1-eps^2))^(i-1) for the
    ell design terms plus (sqrt(1-eps^2))^ell for the Gaussian remainder;
    the squared coefficients sum to 1 identically."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("epsilon must lie in (0, 1)")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    beta = math.sqrt(1.0 - epsilon * epsilon)
    coefs = epsilon * np.cumprod(np.concatenate(([1.0], np.full(max(ell - 1, 0), beta))))[:ell]
    return coefs, beta**ell


def prop9_hybrid_sample(
    epsilon: float,
    ell: int,
    sampler: DesignSampler,
    rng: np.random.Generator,
) -> np.ndarray:
    """One draw of the design/Gaussian mixture with a true-Gaussian tail.

    Experiment-grade only: design seeds and the Gaussian remainder both
    come from the supplied conventional RNG, which is not charged to any
    seed-length accounting.
    """
    coefs, gauss_coef = prop9_coefficients(epsilon, ell)
    out = gauss_coef * rng.standard_normal(sampler.n)
    if ell:
        seeds = rng.integers(0, sampler.q, size=(ell, sampler.family.k), dtype=np.int64)
        vals = design_sample_batch(sampler, seeds)
        for i in range(ell):
            out += coefs[i] * vals[i]
    return out


def config_to_json(config: GeneratorConfig) -> str:
    obj = {
        "n": config.n,
        "d": config.d,
        "k": config.k,
        "epsilon": config.epsilon,
        "delta": config.delta,
        "ell": config.ell,
        "ell_formula": config.ell_formula,
        "ell_cap": config.ell_cap,
        "truncated": config.truncated,
        "design_order": config.design_order,
        "quad_points": config.quad_points,
        "tv_budget": config.tv_budget,
        "seed": seed_breakdown(config),
        "sampler": json.loads(sampler_to_json(config.sampler)),
    }
    return json.dumps(obj, sort_keys=True)
