"""Expected-length bounds, exact and empirical length measurements, and the
statistical checks used to audit the schemes.

All logarithms in the closed-form bounds are base 2, matching lengths
measured in bits.  Bounds take the tail certificate (c, lambda) of the
source law and return a guaranteed ceiling on the expected codeword length
in bits; their growth in n is sublinear, which the benchmark harness checks
empirically via log-log slopes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import chi2 as _chi2

from . import dyadic_codec, halfline_codec, integer_codec
from .bitcodes import SCHEME_UNIT, gamma_length, read_container, shifted_gamma_length
from .distributions import IntegerDistribution, MonotonePdf, pareto_flat
from .dyadic_codec import DEFAULT_KMAX, rect_area
from .rng import RandomSource

__all__ = [
    "thm1_bound",
    "thm2_bound",
    "thm3_bound",
    "thm4_bound",
    "paper_gamma_accounting",
    "Majorant",
    "check_majorization",
    "exact_expected_length_unit",
    "EmpiricalLength",
    "simulate_any",
    "desimulate_any",
    "empirical_length",
    "reference_bound",
    "ks_two_sample",
    "chi_square",
    "chi_square_vs_pmf",
    "integer_cells",
    "verify_trial",
    "loglog_slope",
]


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


def thm1_bound(c: float, lam: float, n: int) -> float:
    """Length ceiling for the integer scheme under a power tail certificate:
    50 c lam n**(1/lam) log2(sqrt(n) + 1) / (lam - 1)."""
    _require(c > 1.0, "power certificate needs c > 1")
    _require(lam > 1.0, "power certificate needs lambda > 1")
    _require(n >= 1, "n must be >= 1")
    return 50.0 * c * lam * n ** (1.0 / lam) * math.log2(math.sqrt(n) + 1.0) / (lam - 1.0)


def thm2_bound(c: float, lam: float, n: int) -> float:
    """Length ceiling for the integer scheme under an exponential tail
    certificate: 13 (2 lam + 1) (c / lam) log2(n + 1)**2."""
    _require(c > 1.0, "exponential certificate needs c > 1")
    _require(lam > 0.0, "exponential certificate needs lambda > 0")
    _require(n >= 1, "n must be >= 1")
    return 13.0 * (2.0 * lam + 1.0) * (c / lam) * math.log2(n + 1.0) ** 2


def thm3_bound(f0: float, n: int) -> float:
    """Length ceiling for the unit scheme: 92 sqrt(n f0) log2(sqrt(n f0) + 1),
    where f0 is the density's value at zero (its maximum)."""
    _require(f0 >= 0.0, "f0 must be >= 0")
    _require(n >= 1, "n must be >= 1")
    root = math.sqrt(n * f0)
    return 92.0 * root * math.log2(root + 1.0)


def thm4_bound(c: float, lam: float, f0: float, n: int) -> float:
    """Length ceiling for the half-line scheme under a power tail certificate:
    418 c (lam + 1) max(n**(1/lam), sqrt(n)) max(sqrt(f0), 1)
    / min(lam - 1, 1) * log2(sqrt(n max(f0, 1)) + 1)."""
    _require(c > 1.0, "power certificate needs c > 1")
    _require(lam > 1.0, "power certificate needs lambda > 1")
    _require(f0 >= 0.0, "f0 must be >= 0")
    _require(n >= 1, "n must be >= 1")
    growth = max(n ** (1.0 / lam), math.sqrt(n))
    return (418.0 * c * (lam + 1.0) * growth * max(math.sqrt(f0), 1.0)
            / min(lam - 1.0, 1.0) * math.log2(math.sqrt(n * max(f0, 1.0)) + 1.0))


def paper_gamma_accounting(z: int) -> int:
    """The accounting form floor(2 log2 Z + 1), computed exactly in integers.

    This is the figure used when codeword lengths are summed by formula; it
    exceeds the constructed gamma length 2 floor(log2 Z) + 1 by one bit
    whenever frac(log2 Z) >= 1/2.
    """
    z = int(z)
    _require(z >= 1, "Z must be >= 1")
    return (z * z).bit_length()


class Majorant:
    """The least non-increasing density consistent with a power certificate.

    Flat at level c lam t0**-(lam+1) on [0, t0], t0 = (c (lam+1))**(1/lam),
    then exactly c lam x**-(lam+1).  Any density whose tail obeys the
    certificate majorizes this one, so bounds derived for the majorant
    transfer to the original law.
    """

    __slots__ = ("c", "lam", "t0", "_handle")

    def __init__(self, c: float, lam: float):
        self._handle = pareto_flat(c, lam)
        self.c = float(c)
        self.lam = float(lam)
        self.t0 = self._handle.params["t0"]

    def eval(self, x):
        return self._handle.pdf(x)

    pdf = eval

    def cdf(self, x):
        return self._handle.cdf(x)

    def __repr__(self) -> str:
        return f"Majorant(c={self.c:g}, lam={self.lam:g})"


def check_majorization(f: MonotonePdf, majorant: Majorant, grid, tol: float = 1e-9) -> bool:
    """True iff the head mass of f dominates the majorant's on the grid:
    integral of f over [0, x] >= integral of the majorant, for every grid x.

    f's integral comes from quadrature of its density, so the check does not
    assume f's cdf and pdf agree; the majorant's integral is closed form.
    """
    grid = np.asarray(grid, dtype=float)
    _require(grid.size > 0, "grid must be nonempty")
    _require(bool(np.all(grid > 0.0)), "grid points must be positive")
    kinks = [majorant.t0]
    if "t0" in f.params:
        kinks.append(float(f.params["t0"]))
    for x in grid:
        pts = sorted(p for p in kinks if 0.0 < p < x) or None
        head, _ = quad(f.pdf, 0.0, float(x), points=pts, limit=200, epsabs=1e-12, epsrel=1e-10)
        if head < float(majorant.cdf(x)) - tol:
            return False
    return True


def _mean_gamma_length_binomial(n: int, p: float) -> float:
    """E[gamma_length(M); M >= 1] for M ~ Binomial(n, p).

    The pmf is walked outward from its mode by the stable ratio recurrence;
    terms below 1e-14 of the peak are dropped, truncating relative mass far
    below any tolerance used downstream.
    """
    if p >= 1.0:
        return float(gamma_length(n))
    if p <= 0.0:
        return 0.0
    mode = min(max(int((n + 1) * p), 0), n)
    log_pmf = (math.lgamma(n + 1) - math.lgamma(mode + 1) - math.lgamma(n - mode + 1)
               + mode * math.log(p) + (n - mode) * math.log1p(-p))
    p_mode = math.exp(log_pmf)
    ratio = p / (1.0 - p)
    cut = p_mode * 1e-14
    total = p_mode * gamma_length(mode) if mode >= 1 else 0.0
    prob, m = p_mode, mode
    while m < n:
        prob *= ratio * (n - m) / (m + 1)
        m += 1
        if prob < cut:
            break
        total += prob * gamma_length(m)
    prob, m = p_mode, mode
    while m > 1:
        prob *= (m / (n - m + 1)) / ratio
        m -= 1
        if prob < cut:
            break
        total += prob * gamma_length(m)
    return total


def exact_expected_length_unit(f: MonotonePdf, n: int, k_max: int = 8) -> float:
    """Exact expected payload bits of the unit scheme, truncated to depth k_max.

    Sums, over every rectangle of positive area A: the index header cost
    times the probability the rectangle is occupied, 1 - (1 - A)**n, plus
    the expected gamma length of its occupancy count.  Rectangles deeper
    than k_max are excluded; empirical comparisons must restrict to the same
    depths, since the excluded tail is cheap per sample but not zero.
    """
    if f.support != "unit":
        raise ValueError("the unit-scheme enumerator needs a density on [0, 1]")
    _require(n >= 1, "n must be >= 1")
    total = 0.0
    for k in range(k_max + 1):
        head_k = shifted_gamma_length(k)
        for a in range(1 if k == 0 else 2 ** (k - 1)):
            area = rect_area(k, a, f)
            if area <= 0.0:
                continue
            head = head_k + shifted_gamma_length(a)
            if area >= 1.0:
                occupied = 1.0
            else:
                occupied = -math.expm1(n * math.log1p(-area))
            total += head * occupied + _mean_gamma_length_binomial(n, area)
    return total


def truncated_payload_bits(data: bytes, k_max: int = 8) -> int:
    """Bits spent by a unit-scheme container on rectangles of depth <= k_max.

    This is the empirical counterpart of exact_expected_length_unit: the
    enumerator ignores rectangles deeper than k_max, so a fair comparison
    must drop their codeword bits too.
    """
    header, source = read_container(data)
    if header.scheme != SCHEME_UNIT:
        raise ValueError("depth truncation applies to unit-scheme containers")
    kept = 0
    for k, a, count in dyadic_codec.decode_triples(source, header.n):
        if k <= k_max:
            kept += shifted_gamma_length(k) + shifted_gamma_length(a) + gamma_length(count)
    return kept


@dataclass(frozen=True)
class EmpiricalLength:
    scheme: str
    dist_name: str
    n: int
    trials: int
    mean: float
    stderr: float
    lengths: tuple[int, ...]


def simulate_any(scheme: str, dist, n: int, rng: RandomSource) -> bytes:
    """Run the named scheme's encoder, checking the handle matches it."""
    if scheme == "int":
        if not isinstance(dist, IntegerDistribution):
            raise ValueError(f"scheme 'int' needs an integer distribution, got {dist!r}")
        return integer_codec.simulate(dist, n, rng)[0]
    if scheme == "unit":
        if not (isinstance(dist, MonotonePdf) and dist.support == "unit"):
            raise ValueError(f"scheme 'unit' needs a density on [0, 1], got {dist!r}")
        return dyadic_codec.simulate(dist, n, rng)
    if scheme == "halfline":
        if not (isinstance(dist, MonotonePdf) and dist.support == "halfline"):
            raise ValueError(f"scheme 'halfline' needs a density on [0, inf), got {dist!r}")
        return halfline_codec.simulate(dist, n, rng)
    raise ValueError(f"unknown scheme {scheme!r}; choices: int, unit, halfline")


def desimulate_any(scheme: str, data: bytes, rng: RandomSource) -> np.ndarray:
    if scheme == "int":
        return integer_codec.desimulate(data, rng)
    if scheme == "unit":
        return dyadic_codec.desimulate(data, rng)
    if scheme == "halfline":
        return halfline_codec.desimulate(data, rng)
    raise ValueError(f"unknown scheme {scheme!r}; choices: int, unit, halfline")


def empirical_length(scheme: str, dist, n: int, trials: int, seed: int) -> EmpiricalLength:
    """Mean payload bits over independent simulate runs, with standard error.

    Trial t draws from the substream (seed, t), so results are reproducible
    and trials can be extended without disturbing earlier ones.
    """
    _require(trials >= 1, "trials must be >= 1")
    root = RandomSource.from_seed(seed)
    lengths = np.empty(trials, dtype=np.int64)
    for t in range(trials):
        data = simulate_any(scheme, dist, n, root.child("trial", t))
        lengths[t] = read_container(data)[0].payload_bits
    mean = float(lengths.mean())
    stderr = float(lengths.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return EmpiricalLength(scheme, getattr(dist, "name", str(dist)), n, trials,
                           mean, stderr, tuple(int(v) for v in lengths))


def reference_bound(scheme: str, dist, n: int) -> float | None:
    """The closed-form ceiling matching a scheme and the handle's certificate."""
    if scheme == "int":
        cert = dist.tail_params
        if cert is None:
            return None
        if cert.kind == "exponential":
            return thm2_bound(cert.c, cert.lam, n)
        return thm1_bound(cert.c, cert.lam, n)
    if scheme == "unit":
        return thm3_bound(dist.f0, n)
    if scheme == "halfline":
        cert = dist.tail_params
        if cert is None or cert.kind != "power":
            return None
        return thm4_bound(cert.c, cert.lam, dist.f0, n)
    raise ValueError(f"unknown scheme {scheme!r}; choices: int, unit, halfline")


_KS_COEFF = {0.01: 1.628, 0.05: 1.358, 0.10: 1.224}


def ks_two_sample(a, b, alpha: float = 0.01) -> tuple[float, bool]:
    """Two-sample Kolmogorov-Smirnov statistic and accept/reject at alpha.

    The critical value is c(alpha) sqrt((m + n) / (m n)) with the standard
    large-sample coefficients; alpha must be one of 0.01, 0.05, 0.10.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    m, n = a.size, b.size
    _require(m > 0 and n > 0, "both samples must be nonempty")
    coeff = _KS_COEFF.get(alpha)
    if coeff is None:
        raise ValueError(f"alpha must be one of {sorted(_KS_COEFF)}")
    pooled = np.concatenate([a, b])
    gap = (np.searchsorted(a, pooled, side="right") / m
           - np.searchsorted(b, pooled, side="right") / n)
    stat = float(np.abs(gap).max())
    return stat, stat <= coeff * math.sqrt((m + n) / (m * n))


def chi_square(counts, probs, alpha: float = 0.01) -> tuple[float, bool]:
    """Pearson chi-square statistic against cell probabilities, and the
    accept/reject outcome at level alpha with len(counts) - 1 degrees."""
    counts = np.asarray(counts, dtype=float)
    probs = np.asarray(probs, dtype=float)
    _require(counts.shape == probs.shape and counts.ndim == 1, "counts and probs must be matching vectors")
    _require(counts.size >= 2, "need at least two cells")
    _require(bool(np.all(probs > 0.0)), "cell probabilities must be positive")
    _require(abs(float(probs.sum()) - 1.0) < 1e-6, "cell probabilities must sum to 1")
    _require(0.0 < alpha < 1.0, "alpha must be in (0, 1)")
    expected = counts.sum() * probs
    stat = float(((counts - expected) ** 2 / expected).sum())
    critical = float(_chi2.ppf(1.0 - alpha, counts.size - 1))
    return stat, stat <= critical


def integer_cells(dist: IntegerDistribution, n_draws: int, min_expected: float = 10.0) -> tuple[int, np.ndarray]:
    """Cut points for a chi-square test: cells {1}, ..., {K}, {> K} chosen so
    every expected count is at least min_expected.  Returns (K, probs)."""
    _require(n_draws >= 1, "n_draws must be >= 1")
    k = 1
    while k < 64 and n_draws * float(dist.pmf(k + 1)) >= min_expected:
        k += 1
    while k > 1 and n_draws * float(dist.tail(k)) < min_expected:
        k -= 1
    probs = np.append(dist.pmf(np.arange(1, k + 1)), float(dist.tail(k)))
    return k, probs


def chi_square_vs_pmf(samples, dist: IntegerDistribution, alpha: float = 0.01) -> tuple[float, bool]:
    """Chi-square goodness of fit of integer samples against the handle's pmf."""
    samples = np.asarray(samples)
    k, probs = integer_cells(dist, samples.size)
    counts = np.bincount(np.minimum(samples, k + 1), minlength=k + 2)[1:]
    return chi_square(counts, probs, alpha)


def verify_trial(scheme: str, dist, n: int, rng: RandomSource, alpha: float = 0.01) -> tuple[str, float, bool]:
    """One encode/decode round trip plus a distribution test on the output.

    Integer outputs face a chi-square test against the declared pmf; real
    outputs face a two-sample KS test against a fresh direct sample.
    Returns (test name, statistic, accepted).
    """
    data = simulate_any(scheme, dist, n, rng.child("sim"))
    out = desimulate_any(scheme, data, rng.child("dec"))
    if scheme == "int":
        stat, ok = chi_square_vs_pmf(out, dist, alpha)
        return "chi_square", stat, ok
    reference = dist.sample(rng.child("ref"), n)
    stat, ok = ks_two_sample(out, reference, alpha)
    return "ks", stat, ok


def loglog_slope(points) -> float:
    """Least-squares slope of log(mean bits) against log(n)."""
    pts = [(float(n), float(y)) for n, y in points]
    _require(len(pts) >= 2, "need at least two (n, mean) points")
    _require(all(n > 0 and y > 0 for n, y in pts), "points must be positive")
    _require(len({n for n, _ in pts}) >= 2, "need at least two distinct n")
    xs = np.log([n for n, _ in pts])
    ys = np.log([y for _, y in pts])
    return float(np.polyfit(xs, ys, 1)[0])
