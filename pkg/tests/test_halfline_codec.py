"""Bin restriction and the half-line sampling scheme."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from dsim.bitcodes import SCHEME_HALFLINE, read_container
from dsim.distributions import exponential, pareto_flat, triangular
from dsim.halfline_codec import desimulate, restrict_to_bin, simulate
from dsim.integer_codec import decode_multiset
from dsim.rng import RandomSource

EXP1 = exponential(1.0)


class TestRestriction:
    def test_exp_first_bin_density_at_zero(self):
        f1 = restrict_to_bin(EXP1, 1)
        assert f1.support == "unit"
        assert f1.f0 == pytest.approx(1.5819767068693265, rel=1e-14)
        assert f1.pdf(0.0) == pytest.approx(f1.f0, rel=1e-14)

    def test_mass_normalizes(self):
        for i in (1, 2, 7, 40):
            fi = restrict_to_bin(EXP1, i)
            total = quad(fi.pdf, 0.0, 1.0)[0]
            assert total == pytest.approx(1.0, rel=1e-10)

    def test_memorylessness_of_exp_restrictions(self):
        # every bin of an exponential looks identical after renormalization
        f1, f9 = restrict_to_bin(EXP1, 1), restrict_to_bin(EXP1, 9)
        xs = np.linspace(0.0, 1.0, 50)
        assert np.allclose(f1.pdf(xs), f9.pdf(xs), rtol=1e-9)

    def test_deep_bin_stays_accurate(self):
        # survival-function differences avoid the cdf's saturation at 1
        f40 = restrict_to_bin(EXP1, 40)
        assert f40.params["mass"] == pytest.approx(math.exp(-39) * -math.expm1(-1.0), rel=1e-12)
        assert f40.pdf(0.0) == pytest.approx(1.5819767068693265, rel=1e-9)

    def test_cdf_endpoints_and_inverse(self):
        fi = restrict_to_bin(pareto_flat(2.0, 2.0), 3)
        assert fi.cdf(0.0) == 0.0
        assert fi.cdf(1.0) == pytest.approx(1.0, abs=1e-12)
        us = np.linspace(0.0, 0.999, 200)
        assert np.allclose(fi.cdf(fi.cdf_inverse(us)), us, atol=1e-9)
        assert np.all(fi.cdf_inverse(us) < 1.0)

    def test_pdf_is_conditional_density(self):
        fi = restrict_to_bin(pareto_flat(2.0, 2.0), 2)
        mass = fi.params["mass"]
        parent = pareto_flat(2.0, 2.0)
        for x in (0.0, 0.25, 0.8):
            assert fi.pdf(x) == pytest.approx(parent.pdf(x + 1.0) / mass, rel=1e-12)
        assert fi.pdf(1.5) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            restrict_to_bin(triangular(), 1)
        with pytest.raises(ValueError):
            restrict_to_bin(EXP1, 0)
        with pytest.raises(ValueError):
            restrict_to_bin(EXP1, 10**6)  # mass underflows to zero


class TestScheme:
    def test_round_trip_shape(self):
        data = simulate(EXP1, 3000, RandomSource.from_seed(21))
        header = read_container(data)[0]
        assert header.scheme == SCHEME_HALFLINE
        assert header.n == 3000
        out = desimulate(data, RandomSource.from_seed(22))
        assert out.size == 3000
        assert np.all(out >= 0.0)

    def test_bin_counts_preserved(self):
        # the decoded values land in exactly the bins the encoder transmitted
        data = simulate(EXP1, 2000, RandomSource.from_seed(30))
        header, source = read_container(data)
        sent_bins = decode_multiset(source, header.n)
        out = desimulate(data, RandomSource.from_seed(31))
        got_bins = np.sort(np.floor(out).astype(np.int64) + 1)
        assert np.array_equal(got_bins, sent_bins)

    def test_deterministic(self):
        a = simulate(EXP1, 800, RandomSource.from_seed(5))
        b = simulate(EXP1, 800, RandomSource.from_seed(5))
        assert a == b
        x = desimulate(a, RandomSource.from_seed(6))
        y = desimulate(a, RandomSource.from_seed(6))
        assert np.array_equal(x, y)

    def test_empty(self):
        data = simulate(EXP1, 0, RandomSource.from_seed(1))
        assert desimulate(data, RandomSource.from_seed(2)).size == 0

    def test_pareto_flat_round_trip(self):
        pf = pareto_flat(2.0, 2.0)
        data = simulate(pf, 2000, RandomSource.from_seed(40))
        out = desimulate(data, RandomSource.from_seed(41))
        assert out.size == 2000
        assert np.all(out >= 0.0)

    def test_rejects_unit_density(self):
        with pytest.raises(ValueError):
            simulate(triangular(), 10, RandomSource.from_seed(1))

    def test_rejects_wrong_scheme_container(self):
        from dsim.bitcodes import BitSink, FormatError, write_container, SCHEME_UNIT

        data = write_container(SCHEME_UNIT, 0, BitSink())
        with pytest.raises(FormatError):
            desimulate(data, RandomSource.from_seed(1))

    def test_output_law_single_seed(self):
        from dsim.bounds_analysis import ks_two_sample

        n = 10**4
        data = simulate(EXP1, n, RandomSource.from_seed(77))
        out = desimulate(data, RandomSource.from_seed(78))
        ref = EXP1.sample(RandomSource.from_seed(79), n)
        stat, ok = ks_two_sample(out, ref, alpha=0.01)
        assert ok, f"KS={stat:.4f}"
