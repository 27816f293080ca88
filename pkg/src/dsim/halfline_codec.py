"""Sampling scheme for laws with a non-increasing density on [0, inf).

Each draw X lands in the unit bin [i - 1, i) with index i = floor(X) + 1.
The multiset of bin indices goes through the integer codec, then for every
occupied bin (ascending) the fractional positions are encoded with the
dyadic codec against that bin's renormalized density restriction.  The
fractional parts of the encoder's own draws already have the restricted law
conditioned on the bin, so they are reused as hypograph x-coordinates and
only the heights are drawn fresh.

The decoder never evaluates the density: bin counts come from the integer
payload and within-bin positions from the rectangle indices alone.
"""

from __future__ import annotations

import numpy as np

from .bitcodes import (
    SCHEME_HALFLINE,
    BitSink,
    FormatError,
    gamma_encode,
    read_container,
    shifted_gamma_encode,
    write_container,
)
from .distributions import MonotonePdf
from .dyadic_codec import (
    DEFAULT_KMAX,
    collect_triples,
    decode_triples,
    points_from_triples,
)
from .integer_codec import decode_multiset, encode_multiset
from .rng import RandomSource

__all__ = ["restrict_to_bin", "simulate", "desimulate"]


def restrict_to_bin(f: MonotonePdf, i: int) -> MonotonePdf:
    """The law of X - (i - 1) given X in [i - 1, i), as a unit-support handle.

    Mass is computed from survival-function differences, which stays
    accurate deep in the tail where cdf values saturate at 1.
    """
    if f.support != "halfline":
        raise ValueError("restriction is defined for half-line densities")
    i = int(i)
    if i < 1:
        raise ValueError("bin index must be >= 1")
    shift = float(i - 1)
    mass = f.tail(shift) - f.tail(float(i))
    if not mass > 0.0:
        raise ValueError(f"bin {i} carries no probability mass")
    top = f.tail(shift)

    def pdf(x):
        return np.where((x >= 0.0) & (x <= 1.0), f.pdf(x + shift) / mass, 0.0)

    def cdf(x):
        xc = np.clip(x, 0.0, 1.0)
        return np.clip((top - f.tail(xc + shift)) / mass, 0.0, 1.0)

    def cdf_inverse(u):
        out = f.cdf_inverse(np.minimum(f.cdf(shift) + u * mass, np.nextafter(1.0, 0.0))) - shift
        return np.clip(out, 0.0, np.nextafter(1.0, 0.0))

    return MonotonePdf(f"{f.name}[bin {i}]", "unit", pdf, cdf, cdf_inverse,
                       f0=f.pdf(shift) / mass, params={"bin": i, "mass": mass})


def simulate(f: MonotonePdf, n: int, rng: RandomSource, k_max: int = DEFAULT_KMAX) -> bytes:
    """Draw n i.i.d. values of f and encode bins plus within-bin rectangles."""
    if f.support != "halfline":
        raise ValueError("the half-line scheme needs a density supported on [0, inf)")
    if n < 0:
        raise ValueError("n must be >= 0")
    sink = BitSink()
    if n == 0:
        return write_container(SCHEME_HALFLINE, 0, sink)
    values = f.sample(rng.child("values"), n)
    bins = np.floor(values).astype(np.int64) + 1
    encode_multiset(bins, sink)
    heights = rng.child("heights").gen
    retry = rng.child("retry")
    uniq, inverse = np.unique(bins, return_inverse=True)
    for j, i in enumerate(uniq):
        i = int(i)
        xs = values[inverse == j] - (i - 1)
        restricted = restrict_to_bin(f, i)
        ys = heights.random(xs.size) * restricted.pdf(xs)
        for k, a, count in collect_triples(xs, ys, restricted, retry.child(i), k_max):
            shifted_gamma_encode(k, sink)
            shifted_gamma_encode(a, sink)
            gamma_encode(count, sink)
    return write_container(SCHEME_HALFLINE, n, sink)


def desimulate(data: bytes, rng: RandomSource) -> np.ndarray:
    """Regenerate n i.i.d. samples; needs only the codeword, never the density."""
    header, source = read_container(data)
    if header.scheme != SCHEME_HALFLINE:
        raise FormatError(f"expected a half-line container, got scheme {header.scheme:#x}")
    if header.n == 0:
        return np.empty(0, dtype=float)
    bins = decode_multiset(source, header.n)
    uniq, counts = np.unique(bins, return_counts=True)
    points = rng.child("points").gen
    chunks = []
    for i, count in zip(uniq, counts):
        triples = decode_triples(source, int(count))
        chunks.append(points_from_triples(triples, points) + (float(i) - 1.0))
    if source.bits_remaining:
        raise FormatError(f"{source.bits_remaining} unread payload bits after the last bin")
    out = np.concatenate(chunks)
    rng.child("order").gen.shuffle(out)
    return out
