import math
from math import comb

import numpy as np
import pytest

from aquadenoise.wavelet import (
    SUPPORTED_BASES,
    FilterBankError,
    WaveletFilterBank,
    check_filter_bank,
    get_filter_bank,
)

ORTHO = [b for b in SUPPORTED_BASES if get_filter_bank(b).family == "orthogonal"]
BIOR = [b for b in SUPPORTED_BASES if get_filter_bank(b).family == "biorthogonal"]


def daubechies_oracle(n: int) -> np.ndarray:
    """Minimum-phase spectral factor of the Daubechies halfband polynomial."""
    P = np.polynomial.polynomial
    poly = np.zeros(1)
    for k in range(n):
        # y = -(z - 1)^2 / (4 z), multiplied through by (4 z)^(n - 1)
        term = comb(n - 1 + k, k) * (-1) ** k * P.polypow([1, -2, 1], k)
        poly = P.polyadd(poly, P.polymul(term, P.polypow([0, 4], n - 1 - k)))
    roots = P.polyroots(poly)
    h = np.array([1.0])
    for _ in range(n):
        h = np.convolve(h, [1, 1])
    for r in roots[np.abs(roots) < 1]:
        h = np.convolve(h, [1, -r])
    h = np.real(h)
    return h * math.sqrt(2) / h.sum()


def test_haar():
    bank = get_filter_bank("haar")
    np.testing.assert_allclose(bank.analysis_lo, [1 / math.sqrt(2)] * 2, rtol=0, atol=1e-15)
    assert get_filter_bank("db1") == bank
    assert get_filter_bank("HAAR") == bank


def test_unknown_basis():
    with pytest.raises(FilterBankError, match="unknown basis"):
        get_filter_bank("bior9.9")


def test_db5_length_and_sum():
    bank = get_filter_bank("db5")
    assert bank.length == 10
    assert abs(sum(bank.analysis_lo) - math.sqrt(2)) < 1e-10


def test_db2_closed_form():
    r3 = math.sqrt(3)
    expected = np.array([1 + r3, 3 + r3, 3 - r3, 1 - r3]) / (4 * math.sqrt(2))
    np.testing.assert_allclose(get_filter_bank("db2").synthesis_lo, expected, rtol=0, atol=1e-15)


def test_db3_closed_form():
    a, b = math.sqrt(10), math.sqrt(5 + 2 * math.sqrt(10))
    expected = np.array([1 + a + b, 5 + a + 3 * b, 10 - 2 * a + 2 * b, 10 - 2 * a - 2 * b, 5 + a - 3 * b, 1 + a - b])
    expected /= 16 * math.sqrt(2)
    np.testing.assert_allclose(get_filter_bank("db3").synthesis_lo, expected, rtol=0, atol=1e-15)


@pytest.mark.parametrize("n", range(2, 11))
def test_daubechies_tables_match_factorization(n):
    np.testing.assert_allclose(get_filter_bank(f"db{n}").synthesis_lo, daubechies_oracle(n), rtol=0, atol=1e-10)


@pytest.mark.parametrize("name", ORTHO)
def test_orthogonal_bank_algebra(name):
    lo = np.array(get_filter_bank(name).analysis_lo)
    assert abs(lo.sum() - math.sqrt(2)) < 1e-10
    assert abs(lo @ lo - 1) < 1e-10
    for k in range(1, len(lo) // 2):
        assert abs(lo[2 * k :] @ lo[: -2 * k]) < 1e-10


@pytest.mark.parametrize("name", SUPPORTED_BASES)
def test_every_bank_passes_its_own_check(name):
    check_filter_bank(get_filter_bank(name))


@pytest.mark.parametrize("name", BIOR)
def test_biorthogonal_duality(name):
    # sum_n lo[n] slo[n + 2k] = delta_k (analysis/synthesis low-pass pair)
    bank = get_filter_bank(name)
    lo, _, slo, _ = bank.arrays()
    rev = lo[::-1]
    full = np.correlate(slo, rev, mode="full")
    centre = len(rev) - 1
    # Even lags around the alignment that pairs the filters for reconstruction.
    offsets = [c for c in range(len(full)) if abs(full[c] - 1.0) < 1e-12]
    assert offsets, "no unit tap in the cross-correlation"
    c0 = offsets[0]
    for c in range(c0 % 2, len(full), 2):
        assert abs(full[c] - (1.0 if c == c0 else 0.0)) < 1e-12, (c, centre)


@pytest.mark.parametrize(
    "name, moments",
    [("haar", 1), ("db2", 2), ("db5", 5), ("db10", 10), ("sym4", 4), ("sym8", 8), ("bior1.3", 1), ("bior2.2", 2), ("bior3.5", 3)],
)
def test_vanishing_moments(name, moments):
    assert get_filter_bank(name).vanishing_moments == moments


def test_broken_bank_detected():
    good = get_filter_bank("db2")
    lo = list(good.analysis_lo)
    lo[0] += 1e-6
    bad = WaveletFilterBank(
        name="broken",
        family="orthogonal",
        analysis_lo=tuple(lo),
        analysis_hi=good.analysis_hi,
        synthesis_lo=good.synthesis_lo,
        synthesis_hi=good.synthesis_hi,
    )
    with pytest.raises(FilterBankError):
        check_filter_bank(bad)


@pytest.mark.parametrize("name", SUPPORTED_BASES)
def test_tables_match_pywavelets(name):
    pywt = pytest.importorskip("pywt")
    ref = pywt.Wavelet(name)
    bank = get_filter_bank(name)
    for mine, theirs in [
        (bank.analysis_lo, ref.dec_lo),
        (bank.analysis_hi, ref.dec_hi),
        (bank.synthesis_lo, ref.rec_lo),
        (bank.synthesis_hi, ref.rec_hi),
    ]:
        np.testing.assert_allclose(mine, theirs, rtol=0, atol=1e-10)
