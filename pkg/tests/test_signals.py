"""Sparse signal construction and its log-scale parameterizations."""

import math

import numpy as np
import pytest
from scipy import stats

from distilled_sensing import (
    ParameterError,
    SignalParams,
    SparseSignal,
    amplitude_from_r,
    generate_sparse_signal,
    r_from_amplitude,
    sparsity_from_beta,
)


class TestSignalParams:
    def test_valid_params_accepted(self):
        params = SignalParams(p=100, num_nonzero=5, amplitude=2.5)
        assert params.p == 100
        assert params.num_nonzero == 5
        assert params.amplitude == 2.5

    def test_zero_support_and_zero_amplitude_allowed(self):
        SignalParams(p=10, num_nonzero=0, amplitude=0.0)
        SignalParams(p=10, num_nonzero=10, amplitude=0.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(p=0, num_nonzero=0, amplitude=1.0),
            dict(p=10, num_nonzero=-1, amplitude=1.0),
            dict(p=10, num_nonzero=11, amplitude=1.0),
            dict(p=10, num_nonzero=1, amplitude=-0.5),
            dict(p=10, num_nonzero=1, amplitude=float("inf")),
            dict(p=10, num_nonzero=1, amplitude=float("nan")),
        ],
    )
    def test_invalid_params_rejected(self, kwargs):
        with pytest.raises(ParameterError):
            SignalParams(**kwargs)


class TestSparseSignal:
    def test_properties(self):
        sig = SparseSignal(values=np.array([0.0, 3.0, 0.0]), support=np.array([1]))
        assert sig.p == 3
        assert sig.num_nonzero == 1
        assert sig.values.dtype == np.float64
        assert sig.support.dtype == np.int64

    def test_null_signal(self):
        sig = SparseSignal(values=np.zeros(4), support=np.empty(0, dtype=np.int64))
        assert sig.num_nonzero == 0


class TestSparsityFromBeta:
    def test_known_values(self):
        assert sparsity_from_beta(2**14, 0.5) == 128
        assert sparsity_from_beta(2**20, 0.5) == 1024
        assert sparsity_from_beta(2**14, 0.25) == 1448

    def test_monotone_in_beta(self):
        """Sparser exponent means a smaller support."""
        sizes = [sparsity_from_beta(2**16, b) for b in (0.2, 0.4, 0.6, 0.8)]
        assert sizes == sorted(sizes, reverse=True)

    @pytest.mark.parametrize("beta", [0.0, 1.0, -0.1, 1.5])
    def test_exponent_outside_open_interval_rejected(self, beta):
        with pytest.raises(ParameterError):
            sparsity_from_beta(2**14, beta)

    def test_tiny_dimension_rejected(self):
        with pytest.raises(ParameterError):
            sparsity_from_beta(1, 0.5)


class TestAmplitudeConversions:
    def test_known_value(self):
        assert amplitude_from_r(2**14, 1.0) == pytest.approx(
            math.sqrt(2.0 * math.log(2**14)), rel=1e-12
        )
        assert amplitude_from_r(2**14, 1.0) == pytest.approx(4.4054649080066985)

    def test_round_trip(self):
        for r in (0.1, 0.5, 1.0, 2.0):
            mu = amplitude_from_r(2**16, r)
            assert r_from_amplitude(2**16, mu) == pytest.approx(r, rel=1e-12)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ParameterError):
            amplitude_from_r(2**14, 0.0)
        with pytest.raises(ParameterError):
            amplitude_from_r(1, 1.0)
        with pytest.raises(ParameterError):
            r_from_amplitude(2**14, -1.0)


class TestGenerateSparseSignal:
    def test_structure(self):
        params = SignalParams(p=50, num_nonzero=7, amplitude=3.0)
        sig = generate_sparse_signal(params, np.random.default_rng(0))
        assert sig.p == 50
        assert sig.num_nonzero == 7
        assert np.all(np.diff(sig.support) > 0)  # sorted, no repeats
        assert np.all(sig.values[sig.support] == 3.0)
        off = np.setdiff1d(np.arange(50), sig.support)
        assert np.all(sig.values[off] == 0.0)

    def test_empty_and_full_support(self):
        empty = generate_sparse_signal(SignalParams(8, 0, 1.0), np.random.default_rng(1))
        assert empty.num_nonzero == 0
        assert np.all(empty.values == 0.0)
        full = generate_sparse_signal(SignalParams(8, 8, 1.5), np.random.default_rng(1))
        assert np.array_equal(full.support, np.arange(8))
        assert np.all(full.values == 1.5)

    def test_deterministic_given_seed(self):
        params = SignalParams(p=1000, num_nonzero=30, amplitude=1.0)
        a = generate_sparse_signal(params, np.random.default_rng(7))
        b = generate_sparse_signal(params, np.random.default_rng(7))
        c = generate_sparse_signal(params, np.random.default_rng(8))
        assert np.array_equal(a.support, b.support)
        assert not np.array_equal(a.support, c.support)

    def test_support_uniform_over_coordinates(self):
        """Chi-square goodness of fit on inclusion counts.

        Support draws are without replacement, so counts are negatively
        correlated and the classic statistic is shrunk by 1 - s/p.
        """
        p, s, reps = 10_000, 100, 4000
        rng = np.random.default_rng(42)
        counts = np.zeros(p)
        params = SignalParams(p, s, 1.0)
        for _ in range(reps):
            counts[generate_sparse_signal(params, rng).support] += 1
        expected = reps * s / p
        stat = ((counts - expected) ** 2 / expected).sum() / (1 - s / p)
        assert stat < stats.chi2.ppf(0.99, df=p - 1)
