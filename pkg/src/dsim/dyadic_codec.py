"""Dyadic rectangle codec for laws with a non-increasing density on [0, 1].

The region under the density (its hypograph) is tiled, up to measure zero,
by half-open rectangles indexed by a depth k >= 0 and an offset a.  R(k, a)
spans x in [2**(1-k) * a, 2**-k * (2a + 1)) and y in
[f(2**(1-k) * (a + 1)), f(2**-k * (2a + 1))); at depth k the admissible
offsets are 0 <= a <= max(2**(k-1) - 1, 0).  Crucially the x-interval of a
rectangle is determined by (k, a) alone, so a decoder that knows only the
indices can regenerate points with the correct law: a uniform point of the
hypograph projects to an f-distributed x, and conditioned on its rectangle
the x-coordinate is uniform on that rectangle's x-interval.

The codeword lists the occupied rectangles in lexicographic (k, a) order,
each as shifted-gamma(k), shifted-gamma(a), gamma(count).
"""

from __future__ import annotations

import numpy as np

from .bitcodes import (
    SCHEME_UNIT,
    BitSink,
    BitSource,
    FormatError,
    gamma_decode,
    gamma_encode,
    read_container,
    shifted_gamma_decode,
    shifted_gamma_encode,
    write_container,
)
from .rng import RandomSource

__all__ = [
    "DEFAULT_KMAX",
    "RETRY_BUDGET",
    "DepthExceededError",
    "rect_bounds",
    "rect_area",
    "locate",
    "locate_batch",
    "encode_points",
    "decode_triples",
    "points_from_triples",
    "simulate",
    "desimulate",
]

DEFAULT_KMAX = 60
RETRY_BUDGET = 100


class DepthExceededError(RuntimeError):
    """No rectangle with depth k <= k_max contains the point."""


def _offset_in_range(k: int, a: int) -> bool:
    if k < 0 or a < 0:
        return False
    if k > 63:  # every offset a gamma codeword can deliver fits at such depths
        return True
    return a <= ((1 << (k - 1)) - 1 if k else 0)


def _check_index(k: int, a: int) -> None:
    if not _offset_in_range(k, a):
        raise ValueError(f"offset a={a} out of range at depth k={k}")


def rect_bounds(k: int, a: int, f) -> tuple[float, float, float, float]:
    """Corners (x_lo, x_hi, y_lo, y_hi) of rectangle R(k, a)."""
    _check_index(k, a)
    x_lo = a * 2.0 ** (1 - k)
    x_hi = (2 * a + 1) * 2.0 ** -k
    y_lo = f.pdf((a + 1) * 2.0 ** (1 - k))
    y_hi = f.pdf((2 * a + 1) * 2.0 ** -k)
    return x_lo, x_hi, y_lo, y_hi


def rect_area(k: int, a: int, f) -> float:
    x_lo, x_hi, y_lo, y_hi = rect_bounds(k, a, f)
    return (x_hi - x_lo) * max(y_hi - y_lo, 0.0)


def locate(x: float, y: float, f, k_max: int = DEFAULT_KMAX) -> tuple[int, int]:
    """Indices (k, a) of the rectangle containing hypograph point (x, y).

    The offset is tracked by doubling x one bit at a time, which is exact in
    binary floating point, so the result agrees with direct membership tests
    against rect_bounds.  Raises DepthExceededError when every depth up to
    k_max misses; callers with a randomness source may resample the point.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError("x must lie in [0, 1)")
    if not 0.0 <= y < f.pdf(x):
        raise ValueError("point is not inside the density hypograph")
    if f.pdf(2.0) <= y < f.pdf(1.0):
        return 0, 0
    t = x
    a = 0
    for k in range(1, k_max + 1):
        if k > 1:
            t *= 2.0
            a <<= 1
            if t >= 1.0:
                t -= 1.0
                a |= 1
        if t < 0.5:
            y_lo = f.pdf((a + 1) * 2.0 ** (1 - k))
            y_hi = f.pdf((2 * a + 1) * 2.0 ** -k)
            if y_lo <= y < y_hi:
                return k, a
    raise DepthExceededError(f"no rectangle up to depth {k_max} contains the point")


def locate_batch(xs: np.ndarray, ys: np.ndarray, f, k_max: int = DEFAULT_KMAX):
    """Vectorized locate.  Returns (ks, offsets, unresolved_mask).

    Points that no rectangle up to k_max catches are flagged in the mask
    rather than raising, so callers can resample just those.
    """
    if k_max > 62:
        raise ValueError("offsets are tracked in int64, so k_max must be <= 62")
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = xs.size
    ks = np.full(n, -1, dtype=np.int64)
    offs = np.zeros(n, dtype=np.int64)
    hit0 = (ys >= f.pdf(2.0)) & (ys < f.pdf(1.0))
    ks[hit0] = 0
    active = ~hit0
    t = xs.copy()
    a = np.zeros(n, dtype=np.int64)
    for k in range(1, k_max + 1):
        if k > 1:
            t *= 2.0
            wrap = t >= 1.0
            t[wrap] -= 1.0
            a <<= 1
            a[wrap] |= 1
        cand = np.flatnonzero(active & (t < 0.5))
        if cand.size:
            scale = 2.0 ** -k
            y_lo = f.pdf((a[cand] + 1) * (2.0 * scale))
            y_hi = f.pdf((2 * a[cand] + 1) * scale)
            hit = cand[(ys[cand] >= y_lo) & (ys[cand] < y_hi)]
            ks[hit] = k
            offs[hit] = a[hit]
            active[hit] = False
        if not active.any():
            break
    return ks, offs, active


def _hypograph_draw(f, gen, size: int):
    xs = f.cdf_inverse(gen.random(size))
    ys = gen.random(size) * f.pdf(xs)
    return xs, ys


def collect_triples(xs, ys, f, retry_rng: RandomSource | None = None,
                    k_max: int = DEFAULT_KMAX) -> list[tuple[int, int, int]]:
    """Sorted (k, a, count) triples covering the given hypograph points.

    With a retry source, points that exhaust the depth budget are replaced
    by fresh hypograph draws (up to RETRY_BUDGET rounds), which leaves the
    encoded law unchanged; without one, DepthExceededError propagates.
    """
    ks, offs, bad = locate_batch(xs, ys, f, k_max)
    rounds = 0
    while bad.any():
        if retry_rng is None:
            raise DepthExceededError(f"no rectangle up to depth {k_max} contains a point")
        rounds += 1
        if rounds > RETRY_BUDGET:
            raise DepthExceededError(f"depth budget still exhausted after {RETRY_BUDGET} resamples")
        idx = np.flatnonzero(bad)
        rx, ry = _hypograph_draw(f, retry_rng.gen, idx.size)
        rks, roffs, rbad = locate_batch(rx, ry, f, k_max)
        ks[idx] = rks
        offs[idx] = roffs
        bad[idx] = rbad
    pairs = np.stack([ks, offs], axis=1)
    uniq, counts = np.unique(pairs, axis=0, return_counts=True)
    return [(int(k), int(a), int(c)) for (k, a), c in zip(uniq, counts)]


def encode_points(xs, ys, f, sink: BitSink | None = None, k_max: int = DEFAULT_KMAX) -> BitSink:
    """Append the codeword for a nonempty batch of hypograph points."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.size == 0 or xs.shape != ys.shape:
        raise ValueError("need matching nonempty coordinate arrays")
    if sink is None:
        sink = BitSink()
    for k, a, count in collect_triples(xs, ys, f, None, k_max):
        shifted_gamma_encode(k, sink)
        shifted_gamma_encode(a, sink)
        gamma_encode(count, sink)
    return sink


def decode_triples(source: BitSource, n: int) -> list[tuple[int, int, int]]:
    """Read (k, a, count) triples until their counts sum to n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    out = []
    total = 0
    while total < n:
        k = shifted_gamma_decode(source)
        a = shifted_gamma_decode(source)
        if not _offset_in_range(k, a):
            raise FormatError(f"offset a={a} out of range at depth k={k}")
        count = gamma_decode(source)
        total += count
        if total > n:
            raise FormatError("triple counts overshoot the declared total")
        out.append((k, a, count))
    return out


def points_from_triples(triples, gen) -> np.ndarray:
    """Fresh uniforms on each triple's x-interval, concatenated in triple order."""
    chunks = []
    for k, a, count in triples:
        _check_index(k, a)
        width = 2.0 ** -k
        lo = a * (2.0 * width)
        seg = lo + gen.random(count) * width
        # rounding may graze the open right endpoint; pull it back inside
        np.minimum(seg, np.nextafter(lo + width, lo), out=seg)
        chunks.append(seg)
    if not chunks:
        return np.empty(0, dtype=float)
    return np.concatenate(chunks)


def simulate(f, n: int, rng: RandomSource, k_max: int = DEFAULT_KMAX) -> bytes:
    """Draw n i.i.d. points of f's hypograph and encode their rectangles."""
    if f.support != "unit":
        raise ValueError("the dyadic scheme needs a density supported on [0, 1]")
    if n < 0:
        raise ValueError("n must be >= 0")
    sink = BitSink()
    if n == 0:
        return write_container(SCHEME_UNIT, 0, sink)
    xs, ys = _hypograph_draw(f, rng.child("points").gen, n)
    for k, a, count in collect_triples(xs, ys, f, rng.child("retry"), k_max):
        shifted_gamma_encode(k, sink)
        shifted_gamma_encode(a, sink)
        gamma_encode(count, sink)
    return write_container(SCHEME_UNIT, n, sink)


def desimulate(data: bytes, rng: RandomSource) -> np.ndarray:
    """Regenerate n i.i.d. samples from an encoded rectangle list."""
    header, source = read_container(data)
    if header.scheme != SCHEME_UNIT:
        raise FormatError(f"expected a unit-scheme container, got scheme {header.scheme:#x}")
    if header.n == 0:
        return np.empty(0, dtype=float)
    triples = decode_triples(source, header.n)
    if source.bits_remaining:
        raise FormatError(f"{source.bits_remaining} unread payload bits after the triples")
    out = points_from_triples(triples, rng.child("points").gen)
    rng.child("order").gen.shuffle(out)
    return out
