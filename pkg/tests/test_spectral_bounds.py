"""Metric Fourier-coefficient series, FFT cross-check, and the decay bound."""

import numpy as np
import pytest
from scipy.integrate import dblquad

from curvedflow import spectral_bounds as sb


def test_a00_against_quadrature_oracle():
    val, err = dblquad(
        lambda y, x: np.exp(1.8 * np.sin(x) * np.sin(y)),
        0.0,
        2 * np.pi,
        0.0,
        2 * np.pi,
        epsabs=1e-11,
    )
    a00 = sb.series_coefficient(1.8, 0, 0)
    assert a00 == pytest.approx(val / (4 * np.pi**2), rel=1e-9)
    assert a00 == pytest.approx(1.47133, rel=1e-5)


def test_alpha_zero_degenerate_table():
    tab = sb.coeffs_by_series(0.0, 4)
    assert tab.get(0, 0) == 1.0
    assert np.count_nonzero(tab.a) == 1


def test_parity_forbidden_entries_are_exact_zeros():
    tab = sb.coeffs_by_series(1.8, 6)
    assert tab.get(1, 2) == 0.0
    assert np.count_nonzero(tab.a[tab.parity_forbidden_mask()]) == 0


def test_series_fft_cross_check():
    series = sb.coeffs_by_series(1.8, 40)
    fft = sb.coeffs_by_fft(1.8, 40)
    assert np.max(np.abs(series.a - fft.a)) < 1e-12
    assert np.max(np.abs(fft.a[fft.parity_forbidden_mask()])) < 1e-14


def test_inverse_metric_table_is_alpha_negated():
    inv = sb.coeffs_by_series(1.8, 8, target="g_inverse")
    neg = sb.coeffs_by_series(-1.8, 8)
    assert np.array_equal(inv.a, neg.a)
    fft_inv = sb.coeffs_by_fft(1.8, 8, target="g_inverse")
    assert np.max(np.abs(inv.a - fft_inv.a)) < 1e-13


def test_certification_error_when_capped():
    with pytest.raises(sb.CertificationError):
        sb.series_coefficient(1.8, 0, 0, n_terms=2)


def test_exact_ratio_matches_term_quotients():
    terms = sb.series_terms(1.8, 3, 5, 8)
    for j in range(7):
        assert abs(terms[j + 1] / terms[j]) == pytest.approx(
            sb.exact_term_ratio(1.8, 3, 5, j), rel=1e-12
        )


def test_decay_bound_scan():
    tab = sb.coeffs_by_series(1.8, 60)
    report = sb.verify_bound(tab, (10, 60))
    assert report.holds
    # the spec's example constant C = 4 covers the scanned smallest constant
    assert report.c_observed <= 4.0
    # the observed constant is non-increasing as the lower end grows
    prev = None
    for lo in (10, 20, 30, 40):
        c = sb.verify_bound(tab, (lo, 60)).c_observed
        if prev is not None:
            assert c <= prev + 1e-15
        prev = c


def test_ratio_inequality_tail_behaviour():
    """The printed bound alpha^2/(8(L+3)) does hold for late terms; the
    early-term violations are asserted (red) in the acceptance suite."""
    for k, l in ((2, 2), (6, 0), (10, 4)):
        big_l = max(k, l)
        bound = sb.printed_ratio_bound(1.8, big_l)
        late = [sb.exact_term_ratio(1.8, k, l, j) for j in range(6, 12)]
        assert all(r <= bound for r in late)


def test_wallis_envelope():
    assert sb.wallis_envelope_holds(400)
