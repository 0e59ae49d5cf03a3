"""Finite-statistics layer: sampling the readout circuits, unbiased witness
estimators with their analytic variances, minimum sample sizes, and the full
simulated experiment with noisy copies.

Reproducibility: all randomness flows through counter-based Philox generators
derived from a master seed and integer stream keys (one stream per
repetition), so results are bitwise independent of batching or worker count.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from . import circuits
from .criteria import optimal_threshold
from .errors import DomainError
from .states import LossyNOONParams, NOONParams

__all__ = [
    "NoiseEntry",
    "NoiseSpec",
    "SamplingPlan",
    "EstimatorResult",
    "SimulationPoint",
    "rng_stream",
    "sample_pn",
    "estimate_pn",
    "witness_estimators",
    "witness_variances",
    "min_samples",
    "noisy_copy_draw",
    "noon1_moments",
    "full_simulation",
    "DEFAULT_K_GRID",
]

DEFAULT_K_GRID = (10, 32, 100, 316, 1000, 3162)


@dataclass(frozen=True)
class NoiseEntry:
    """Gaussian fluctuation of one parameter, clamped to its validity range."""

    name: str
    mean: float
    std: float
    lo: float
    hi: float

    def __post_init__(self):
        if self.std < 0:
            raise DomainError(f"std must be >= 0, got {self.std}")
        if self.mean != 0 and self.std > abs(self.mean) / 10.0:
            warnings.warn(f"noise on {self.name!r} exceeds a tenth of its mean; "
                          "the narrow-fluctuation model may not apply", stacklevel=3)


@dataclass(frozen=True)
class NoiseSpec:
    """Per-parameter fluctuation model for noisy state copies."""

    alpha: NoiseEntry
    tau: NoiseEntry

    @classmethod
    def for_noon(cls, alpha: float, tau: float, alpha_rel_std: float = 0.05,
                 tau_std: float = 0.05) -> "NoiseSpec":
        """Default model of the simulated experiment: relative noise on the
        phase alpha, absolute noise on the transmissivity tau."""
        return cls(NoiseEntry("alpha", alpha, alpha_rel_std * alpha, 0.0, 1.0),
                   NoiseEntry("tau", tau, tau_std, 0.0, 1.0))


@dataclass(frozen=True)
class SamplingPlan:
    """Samples per estimate, outer repetitions, and the master seed."""

    k: int
    repetitions: int
    master_seed: int

    def __post_init__(self):
        if self.k < 2:
            raise DomainError("k must be >= 2 (the quadratic estimator divides by k-1)")
        if self.repetitions < 1:
            raise DomainError("repetitions must be >= 1")


@dataclass(frozen=True)
class EstimatorResult:
    """Mean and spread of a witness or moment estimate over repetitions."""

    mean: float
    variance: float
    std_error: float
    k: int
    repetitions: int


@dataclass(frozen=True)
class SimulationPoint:
    """One sample-budget point of the simulated experiment."""

    k: int
    estimate: EstimatorResult
    analytic_witness: float
    band_low: float
    band_high: float
    clamped_draws: int


def rng_stream(master_seed: int, *key: int) -> np.random.Generator:
    """Philox generator on the stream identified by the integer key tuple."""
    seq = np.random.SeedSequence(master_seed, spawn_key=tuple(int(x) for x in key))
    return np.random.Generator(np.random.Philox(seq))


# ---------------------------------------------------------------------------
# Sampling a fixed outcome distribution
# ---------------------------------------------------------------------------

def sample_pn(dist: circuits.OutcomeDistribution, n: int, k: int,
              rng: np.random.Generator) -> complex:
    """Average of k i.i.d. root-of-unity readout values drawn from ``dist``.

    The expectation of the returned (complex) estimate is p_n.
    """
    if n != dist.n_copies:
        raise ValueError(f"distribution is for n={dist.n_copies}, asked n={n}")
    _, probs = dist.as_arrays()
    _, vals = circuits.outcome_weights(dist)
    idx = rng.choice(probs.size, size=k, p=probs / probs.sum())
    return complex(vals[idx].mean())


def estimate_pn(dist: circuits.OutcomeDistribution, n: int, k: int, repetitions: int,
                rng: np.random.Generator) -> EstimatorResult:
    """Repeat sample_pn and summarize; variance is the complex sample variance
    of the repetition estimates."""
    _, probs = dist.as_arrays()
    _, vals = circuits.outcome_weights(dist)
    idx = rng.choice(probs.size, size=(repetitions, k), p=probs / probs.sum())
    est = vals[idx].mean(axis=1)
    return _summarize(est, k)


def _summarize(estimates: np.ndarray, k: int) -> EstimatorResult:
    reps = estimates.size
    mean = complex(estimates.mean())
    if reps > 1:
        var = float(np.sum(np.abs(estimates - mean) ** 2) / (reps - 1))
        std_err = math.sqrt(var / reps)
    else:
        var = float("nan")
        std_err = float("nan")
    return EstimatorResult(mean=float(mean.real), variance=var, std_error=std_err,
                           k=k, repetitions=reps)


# ---------------------------------------------------------------------------
# Witness estimators and their analytic variances
# ---------------------------------------------------------------------------

def witness_estimators(p2_k: complex, p3_k: complex, k: int) -> tuple[complex, complex]:
    """Unbiased estimators of the linear and quadratic witnesses from
    independent k-sample estimates of p2 and p3.

    The quadratic one subtracts (k p2_k^2 - 1)/(k - 1) rather than p2_k^2,
    which removes the O(1/k) bias of squaring a sample mean.
    """
    if k < 2:
        raise DomainError("quadratic estimator needs k >= 2")
    w_l = p3_k - (3.0 * p2_k - 1.0) / 2.0
    w_q = p3_k - (k * p2_k ** 2 - 1.0) / (k - 1.0)
    return w_l, w_q


def witness_variances(p2: float, p3: float, k: int) -> tuple[float, float]:
    """Analytic variances of the two witness estimators at sample size k."""
    if k < 2:
        raise DomainError("variances are defined for k >= 2")
    var_l = (1.0 - p3 ** 2) / k + 2.25 * (1.0 - p2 ** 2) / k
    var_q = ((1.0 - p3 ** 2) / k
             + 2.0 * (1.0 - p2 ** 2) * (1.0 + (2 * k - 3) * p2 ** 2) / (k * (k - 1)))
    return var_l, var_q


def min_samples(p2: float, p3: float, criterion: str = "quadratic") -> float:
    """Smallest k at which the witness mean plus one standard deviation is
    negative; math.inf when the witness itself is non-negative."""
    if criterion == "quadratic":
        mean = p3 - p2 ** 2
        var = lambda k: witness_variances(p2, p3, k)[1]
    elif criterion == "linear":
        mean = p3 - (3.0 * p2 - 1.0) / 2.0
        var = lambda k: witness_variances(p2, p3, k)[0]
    else:
        raise ValueError(f"criterion must be 'linear' or 'quadratic', got {criterion!r}")
    if mean >= 0:
        return math.inf
    k = 2
    while mean + math.sqrt(var(k)) >= 0:
        k *= 2
        if k > 10 ** 12:
            return math.inf
    lo, hi = max(k // 2, 2), k
    while lo + 1 < hi:
        mid = (lo + hi) // 2
        if mean + math.sqrt(var(mid)) < 0:
            hi = mid
        else:
            lo = mid
    if mean + math.sqrt(var(lo)) < 0:
        return lo
    return hi


# ---------------------------------------------------------------------------
# Noisy copies
# ---------------------------------------------------------------------------

def _draw_clamped(rng: np.random.Generator, entry: NoiseEntry, shape) -> tuple[np.ndarray, int]:
    raw = rng.normal(entry.mean, entry.std, size=shape) if entry.std > 0 \
        else np.full(shape, entry.mean)
    clipped = np.clip(raw, entry.lo, entry.hi)
    return clipped, int(np.count_nonzero(clipped != raw))


def noisy_copy_draw(base: LossyNOONParams, spec: NoiseSpec, rng: np.random.Generator,
                    n_copies: int) -> list[LossyNOONParams]:
    """Independent per-copy parameter draws for one experimental run.

    alpha is drawn, clamped to [0, 1] and renormalized against beta; tau is
    drawn and clamped to [0, 1], shared by both modes of a copy.
    """
    alphas, _ = _draw_clamped(rng, spec.alpha, n_copies)
    taus, _ = _draw_clamped(rng, spec.tau, n_copies)
    out = []
    for a, t in zip(alphas, taus):
        beta = math.sqrt(max(1.0 - a ** 2, 0.0))
        out.append(LossyNOONParams(NOONParams(base.noon.N, a, beta), t, t))
    return out


# ---------------------------------------------------------------------------
# Fast exact N=1 readout with per-run copy parameters
#
# Each lossy N=1 copy is (1 - tau)|00><00| + tau |psi><psi| with
# psi = alpha|10> + beta|01>, so every pure component feeds Fock basis states
# into the interferometers.  The evolution of those basis inputs is
# precomputed once with the generic circuit engine; per-run work reduces to a
# coefficient contraction, batched over runs.
# ---------------------------------------------------------------------------

@lru_cache(maxsize=4)
def _noon1_tables(n: int):
    d_out = n + 1
    rest = d_out ** (n - 1)
    f = circuits.dft(n)
    basis = [np.array([1.0, 0.0], dtype=complex), np.array([0.0, 1.0], dtype=complex)]
    patterns = list(product((0, 1), repeat=n))
    evolved = {}
    for pat in patterns:
        vecs = [basis[b] for b in pat]
        evolved[pat] = circuits._evolved_product(vecs, f, d_out).reshape(d_out, rest)
    # g[p, q][r] = sum_m1 E_p(m1, r) conj(E_q(m1, r)): mode-1 marginal overlap
    g = {(p, q): np.einsum("mr,mr->r", evolved[p], evolved[q].conj())
         for p in patterns for q in patterns}

    terms = []  # (mask, bra A-photons, ket A-photons)
    rows = []
    for mask in patterns:
        occupied = [c for c in range(n) if mask[c]]
        for bits in product(*([(0, 1)] * len(occupied))):
            for bits2 in product(*([(0, 1)] * len(occupied))):
                pa = [0] * n
                pb = [0] * n
                pa2 = [0] * n
                pb2 = [0] * n
                for c, b1 in zip(occupied, bits):
                    pa[c], pb[c] = (1, 0) if b1 else (0, 1)
                for c, b2 in zip(occupied, bits2):
                    pa2[c], pb2[c] = (1, 0) if b2 else (0, 1)
                go = np.multiply.outer(g[(tuple(pa), tuple(pa2))],
                                       g[(tuple(pb), tuple(pb2))]).reshape(-1)
                terms.append((mask, dict(zip(occupied, bits)), dict(zip(occupied, bits2))))
                rows.append(go.real)  # coefficients are real for real alpha
    go_matrix = np.array(rows)

    # Root-of-unity readout value per joint rest-outcome.
    w = np.exp(-2j * np.pi / n)
    levels = np.stack(np.unravel_index(np.arange(rest), (d_out,) * (n - 1)))
    mode_weights = np.arange(1, n)
    expo = mode_weights @ levels
    values = (w ** np.subtract.outer(expo, expo)).reshape(-1)
    return terms, go_matrix, values


def _noon1_coefficients(n: int, alphas: np.ndarray, betas: np.ndarray,
                        taus: np.ndarray) -> np.ndarray:
    """Coefficient matrix (runs, terms) for the precomputed term list."""
    terms, _, _ = _noon1_tables(n)
    coefs = np.empty((alphas.shape[0], len(terms)))
    for t_idx, (mask, bits, bits2) in enumerate(terms):
        c = np.ones(alphas.shape[0])
        for copy in range(n):
            if mask[copy]:
                c = c * taus[:, copy]
                c = c * (alphas[:, copy] if bits[copy] else betas[:, copy])
                c = c * (alphas[:, copy] if bits2[copy] else betas[:, copy])
            else:
                c = c * (1.0 - taus[:, copy])
        coefs[:, t_idx] = c
    return coefs


def _noon1_distributions(n: int, alphas: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Exact outcome probabilities, one row per run. alphas/taus: (runs, n)."""
    alphas = np.asarray(alphas, dtype=float)
    betas = np.sqrt(np.clip(1.0 - alphas ** 2, 0.0, 1.0))
    _, go_matrix, _ = _noon1_tables(n)
    return _noon1_coefficients(n, alphas, betas, np.asarray(taus, dtype=float)) @ go_matrix


def noon1_moments(n: int, alphas, taus) -> np.ndarray:
    """Exact p_n of the readout for runs of n possibly different lossy N=1
    copies; alphas/taus have shape (runs, n).  Complex array of length runs."""
    _, _, values = _noon1_tables(n)
    return _noon1_distributions(n, alphas, taus) @ values


def _sample_values(n: int, alphas: np.ndarray, taus: np.ndarray,
                   uniforms: np.ndarray) -> np.ndarray:
    """One readout value per run, drawn from each run's own distribution."""
    _, _, values = _noon1_tables(n)
    probs = _noon1_distributions(n, alphas, taus)
    cum = np.cumsum(probs, axis=1)
    targets = uniforms * cum[:, -1]
    idx = (cum < targets[:, None]).sum(axis=1)
    return values[np.minimum(idx, values.size - 1)]


# ---------------------------------------------------------------------------
# Full simulated experiment
# ---------------------------------------------------------------------------

def _optimal_witness_from_estimates(p2_k: np.ndarray, p3_k: np.ndarray) -> np.ndarray:
    p2_clip = np.clip(p2_k.real, 1e-9, 1.0)
    thr = np.array([optimal_threshold(v) for v in p2_clip])
    return p3_k.real - thr


def full_simulation(params: LossyNOONParams, plan: SamplingPlan,
                    noise: NoiseSpec | None = None, k_values=None,
                    max_batch_runs: int = 32768) -> list[SimulationPoint]:
    """Simulated experiment on noisy lossy N=1 copies.

    For every sample of both circuits, each copy's alpha and tau are drawn
    afresh from the noise model; per sample-budget k, the optimal witness is
    formed from the two circuit estimates and summarized over the plan's
    repetitions.  The analytic band is the perfect-copy witness plus/minus
    one standard deviation of the linear model.
    """
    if params.noon.N != 1:
        raise DomainError("the simulated experiment is defined for N=1 copies")
    if params.tau_a != params.tau_b:
        raise DomainError("the noise model draws one tau per copy; use tau_a == tau_b")
    if noise is None:
        noise = NoiseSpec.for_noon(abs(params.noon.alpha), params.tau_a)
    if k_values is None:
        k_values = DEFAULT_K_GRID

    from .states import lossy_noon_pt_moments
    p2_exact, p3_exact = lossy_noon_pt_moments(params)
    analytic = p3_exact - optimal_threshold(p2_exact)

    points = []
    for k in k_values:
        if k < 2:
            raise DomainError("k must be >= 2")
        witnesses = np.empty(plan.repetitions)
        clamped = 0
        rep = 0
        chunk = max(1, min(plan.repetitions, max_batch_runs // k))
        while rep < plan.repetitions:
            reps_now = min(chunk, plan.repetitions - rep)
            blocks = {2: [], 3: []}
            unis = {2: [], 3: []}
            for r in range(rep, rep + reps_now):
                rng = rng_stream(plan.master_seed, k, r)
                for n in (2, 3):
                    a, ca = _draw_clamped(rng, noise.alpha, (k, n))
                    t, ct = _draw_clamped(rng, noise.tau, (k, n))
                    clamped += ca + ct
                    blocks[n].append((a, t))
                    unis[n].append(rng.random(k))
            ests = {}
            for n in (2, 3):
                a = np.concatenate([b[0] for b in blocks[n]])
                t = np.concatenate([b[1] for b in blocks[n]])
                u = np.concatenate(unis[n])
                vals = _sample_values(n, a, t, u).reshape(reps_now, k)
                ests[n] = vals.mean(axis=1)
            witnesses[rep:rep + reps_now] = _optimal_witness_from_estimates(ests[2], ests[3])
            rep += reps_now
        var_l = witness_variances(p2_exact, p3_exact, k)[0]
        result = _summarize(witnesses.astype(complex), k)
        points.append(SimulationPoint(
            k=k, estimate=result, analytic_witness=analytic,
            band_low=analytic - math.sqrt(var_l), band_high=analytic + math.sqrt(var_l),
            clamped_draws=clamped))
    return points
