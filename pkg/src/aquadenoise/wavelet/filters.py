"""Wavelet filter banks.

Orthogonal families (Haar, Daubechies, symlets) are stored as their scaling
filter ``h`` (the synthesis low-pass filter, normalised so that ``sum(h) ==
sqrt(2)``). The values are the standard double-precision tables distributed
with common wavelet toolboxes (Daubechies, *Ten Lectures on Wavelets*, 1992,
for ``dbN``; the least-asymmetric variants for ``symN``). The symlet entries were
polished with ``tools/refine_filters.py``: the commonly circulated tables are
only orthogonal to about 1e-12, which is visible in multi-level round trips.

Biorthogonal spline (Cohen-Daubechies-Feauveau) families are stored as exact
rationals times ``sqrt(2)``. Both filters are zero-padded to a common even
length so that a single alignment convention gives perfect reconstruction.

The remaining filters follow from the quadrature relations::

    analysis_hi[n]  = (-1)**(n + 1) * synthesis_lo[n]
    synthesis_hi[n] = (-1)**n * analysis_lo[n]

Every bank is checked against its algebraic invariants the first time it is
requested, so a transcription error fails loudly instead of silently
degrading reconstructions.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WaveletFilterBank",
    "FilterBankError",
    "SUPPORTED_BASES",
    "get_filter_bank",
    "check_filter_bank",
]

_R2 = math.sqrt(2.0)

# Scaling filters h[n], n = 0..2N-1.
_ORTHOGONAL: dict[str, tuple[float, ...]] = {
    "haar": (
        0.7071067811865476,
        0.7071067811865476,
    ),
    "db2": (
        0.48296291314453416,
        0.8365163037378079,
        0.2241438680420134,
        -0.12940952255126037,
    ),
    "db3": (
        0.33267055295008263,
        0.8068915093110925,
        0.45987750211849154,
        -0.13501102001025458,
        -0.08544127388202666,
        0.03522629188570953,
    ),
    "db4": (
        0.2303778133088965,
        0.7148465705529157,
        0.6308807679298589,
        -0.027983769416859854,
        -0.18703481171909309,
        0.030841381835560764,
        0.0328830116668852,
        -0.010597401785069032,
    ),
    "db5": (
        0.16010239797419293,
        0.6038292697971896,
        0.7243085284377729,
        0.13842814590132074,
        -0.24229488706638203,
        -0.032244869584638375,
        0.07757149384004572,
        -0.006241490212798274,
        -0.012580751999081999,
        0.0033357252854737712,
    ),
    "db6": (
        0.11154074335010947,
        0.49462389039845306,
        0.7511339080210954,
        0.31525035170919763,
        -0.22626469396543983,
        -0.12976686756726194,
        0.09750160558732304,
        0.027522865530305727,
        -0.03158203931748603,
        0.0005538422011614961,
        0.004777257510945511,
        -0.0010773010853084796,
    ),
    "db7": (
        0.07785205408500918,
        0.3965393194819173,
        0.7291320908462351,
        0.4697822874051931,
        -0.14390600392856498,
        -0.22403618499387498,
        0.07130921926683026,
        0.08061260915108308,
        -0.03802993693501441,
        -0.01657454163066688,
        0.01255099855609984,
        0.0004295779729213665,
        -0.0018016407040474908,
        0.00035371379997452024,
    ),
    "db8": (
        0.05441584224310401,
        0.31287159091429995,
        0.6756307362972898,
        0.5853546836542067,
        -0.015829105256349306,
        -0.2840155429615469,
        0.0004724845739132828,
        0.12874742662047847,
        -0.017369301001807547,
        -0.044088253930794755,
        0.013981027917398282,
        0.008746094047405777,
        -0.004870352993451574,
        -0.00039174037337694705,
        0.0006754494064505693,
        -0.00011747678412476953,
    ),
    "db9": (
        0.038077947363878345,
        0.24383467461259034,
        0.6048231236901112,
        0.6572880780513005,
        0.13319738582500756,
        -0.2932737832791749,
        -0.09684078322297646,
        0.14854074933810638,
        0.03072568147933338,
        -0.06763282906132997,
        0.00025094711483145197,
        0.022361662123679096,
        -0.004723204757751397,
        -0.00428150368246343,
        0.0018476468830562265,
        0.00023038576352319597,
        -0.0002519631889427101,
        3.93473203162716e-05,
    ),
    "db10": (
        0.026670057900555554,
        0.1881768000776915,
        0.5272011889317256,
        0.6884590394536035,
        0.2811723436605775,
        -0.24984642432731538,
        -0.19594627437737705,
        0.12736934033579325,
        0.09305736460357235,
        -0.07139414716639708,
        -0.029457536821875813,
        0.033212674059341,
        0.0036065535669561697,
        -0.010733175483330575,
        0.001395351747052901,
        0.001992405295185056,
        -0.0006858566949597116,
        -0.00011646685512928545,
        9.358867032006959e-05,
        -1.3264202894521244e-05,
    ),
    "sym2": (
        0.48296291314453416,
        0.8365163037378079,
        0.2241438680420134,
        -0.12940952255126037,
    ),
    "sym3": (
        0.33267055295008263,
        0.8068915093110925,
        0.45987750211849154,
        -0.13501102001025458,
        -0.08544127388202666,
        0.03522629188570953,
    ),
    "sym4": (
        0.032223100604051466,
        -0.012603967262031304,
        -0.09921954357663353,
        0.29785779560530606,
        0.8037387518051321,
        0.497618667632775,
        -0.029635527646002493,
        -0.07576571478950221,
    ),
    "sym5": (
        0.019538882735249827,
        -0.021101834024689042,
        -0.17532808990805623,
        0.01660210576451085,
        0.633978963456792,
        0.7234076904040407,
        0.19939753397685558,
        -0.039134249302313844,
        0.02951949092570626,
        0.027333068344998768,
    ),
    "sym6": (
        -0.00780070832503238,
        0.0017677118642540077,
        0.04472490177078139,
        -0.02106029251237085,
        -0.07263752278637658,
        0.3379294217281658,
        0.787641141028651,
        0.49105594192797375,
        -0.04831174258569806,
        -0.11799011114852002,
        0.0034907120842221626,
        0.015404109327044824,
    ),
    "sym7": (
        0.010268176708464817,
        0.0040102448715223955,
        -0.10780823770328972,
        -0.14004724044293365,
        0.2886296317506479,
        0.7677643170048829,
        0.5361019170905692,
        0.017441255086835708,
        -0.04955283493704283,
        0.06789269350122057,
        0.030515513165877885,
        -0.012636303403240567,
        -0.001047384888679738,
        0.002681814568260147,
    ),
    "sym8": (
        0.001889950332767689,
        -0.0003029205147241331,
        -0.014952258337062199,
        0.0038087520138944896,
        0.04913717967373029,
        -0.027219029917103486,
        -0.0519458381078818,
        0.36444189483617895,
        0.777185751699628,
        0.4813596512590534,
        -0.061273359067811076,
        -0.14329423835127267,
        0.007607487324976609,
        0.03169508781152599,
        -0.0005421323318000107,
        -0.0033824159510050028,
    ),
}


def _spline(num: tuple[int, ...], den: int) -> tuple[float, ...]:
    return tuple(_R2 * k / den for k in num)


# name -> (analysis_lo, synthesis_lo)
_BIORTHOGONAL: dict[str, tuple[tuple[float, ...], tuple[float, ...]]] = {
    "bior1.1": (_spline((1, 1), 2), _spline((1, 1), 2)),
    "bior1.3": (
        _spline((-1, 1, 8, 8, 1, -1), 16),
        _spline((0, 0, 1, 1, 0, 0), 2),
    ),
    "bior1.5": (
        _spline((3, -3, -22, 22, 128, 128, 22, -22, -3, 3), 256),
        _spline((0, 0, 0, 0, 1, 1, 0, 0, 0, 0), 2),
    ),
    "bior2.2": (
        _spline((0, -1, 2, 6, 2, -1), 8),
        _spline((0, 1, 2, 1, 0, 0), 4),
    ),
    "bior3.5": (
        _spline((-5, 15, 19, -97, -26, 350, 350, -26, -97, 19, 15, -5), 512),
        _spline((0, 0, 0, 0, 1, 3, 3, 1, 0, 0, 0, 0), 8),
    ),
}

_ALIASES = {"db1": "haar"}

SUPPORTED_BASES: tuple[str, ...] = (
    ("haar", "db1")
    + tuple(f"db{k}" for k in range(2, 11))
    + tuple(f"sym{k}" for k in range(2, 9))
    + tuple(_BIORTHOGONAL)
)


class FilterBankError(ValueError):
    """Raised for unknown basis names or banks that fail their invariants."""


@dataclass(frozen=True)
class WaveletFilterBank:
    """Analysis/synthesis low- and high-pass filters of one wavelet basis.

    Filters are stored in convolution order. The transform in
    :mod:`aquadenoise.wavelet.transform` correlates the signal with the
    time-reversed analysis filters and convolves with the synthesis filters.
    """

    name: str
    family: str  # "orthogonal" or "biorthogonal"
    analysis_lo: tuple[float, ...]
    analysis_hi: tuple[float, ...]
    synthesis_lo: tuple[float, ...]
    synthesis_hi: tuple[float, ...]

    @property
    def length(self) -> int:
        return len(self.analysis_lo)

    @property
    def vanishing_moments(self) -> int:
        """Number of vanishing moments of the analysis high-pass filter."""
        g = np.asarray(self.analysis_hi)
        n = np.arange(len(g), dtype=float)
        count = 0
        # Moments grow like len**p, so compare against a scaled tolerance.
        while count < len(g):
            moment = np.sum(g * n**count)
            scale = np.sum(np.abs(g) * n**count) + 1.0
            if abs(moment) > 1e-9 * scale:
                break
            count += 1
        return count

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """The four filters as float64 arrays (analysis lo/hi, synthesis lo/hi)."""
        return (
            np.array(self.analysis_lo),
            np.array(self.analysis_hi),
            np.array(self.synthesis_lo),
            np.array(self.synthesis_hi),
        )


def _quadrature(analysis_lo, synthesis_lo):
    analysis_hi = tuple((-1) ** (n + 1) * v for n, v in enumerate(synthesis_lo))
    synthesis_hi = tuple((-1) ** n * v for n, v in enumerate(analysis_lo))
    return analysis_hi, synthesis_hi


def _build(name: str) -> WaveletFilterBank:
    if name in _ORTHOGONAL:
        h = _ORTHOGONAL[name]
        analysis_lo = tuple(reversed(h))
        synthesis_lo = tuple(h)
        family = "orthogonal"
    else:
        analysis_lo, synthesis_lo = _BIORTHOGONAL[name]
        family = "biorthogonal"
    analysis_hi, synthesis_hi = _quadrature(analysis_lo, synthesis_lo)
    return WaveletFilterBank(
        name=name,
        family=family,
        analysis_lo=analysis_lo,
        analysis_hi=analysis_hi,
        synthesis_lo=synthesis_lo,
        synthesis_hi=synthesis_hi,
    )


def _reconstruction_error(bank: WaveletFilterBank) -> float:
    # Local import: transform imports this module.
    from aquadenoise.wavelet.transform import dwt1d, idwt1d

    n = 2 * max(8, bank.length)
    x = np.cos(0.37 * np.arange(n) ** 1.3) + np.arange(n) % 5
    a, d = dwt1d(x, bank)
    return float(np.max(np.abs(idwt1d(a, d, bank) - x)))


def check_filter_bank(bank: WaveletFilterBank, tol: float = 1e-10) -> None:
    """Raise :class:`FilterBankError` if ``bank`` violates its invariants."""
    lo, hi, slo, shi = bank.arrays()
    problems = []
    if bank.family == "orthogonal":
        if not np.allclose(slo, lo[::-1], rtol=0, atol=tol):
            problems.append("synthesis_lo is not the time-reverse of analysis_lo")
        if abs(lo.sum() - _R2) > tol:
            problems.append(f"sum(analysis_lo) = {lo.sum()!r}, expected sqrt(2)")
        if abs(np.dot(lo, lo) - 1.0) > tol:
            problems.append(f"energy of analysis_lo = {np.dot(lo, lo)!r}, expected 1")
        for k in range(1, len(lo) // 2):
            shifted = np.dot(lo[2 * k :], lo[: -2 * k])
            if abs(shifted) > tol:
                problems.append(f"double-shift product at k={k} is {shifted!r}")
    else:
        if abs(lo.sum() * slo.sum() - 2.0) > tol:
            problems.append("sum(analysis_lo) * sum(synthesis_lo) != 2")
    ahi, shi_expected = _quadrature(bank.analysis_lo, bank.synthesis_lo)
    if not (np.array_equal(hi, ahi) and np.array_equal(shi, shi_expected)):
        problems.append("high-pass filters break the quadrature relation")
    if not problems:
        err = _reconstruction_error(bank)
        if err > 1e3 * tol:
            problems.append(f"perfect-reconstruction error {err:.3g}")
    if problems:
        raise FilterBankError(f"filter bank {bank.name!r}: " + "; ".join(problems))


@functools.lru_cache(maxsize=None)
def get_filter_bank(name: str) -> WaveletFilterBank:
    """Return the validated filter bank for ``name``.

    Parameters
    ----------
    name : str
        Basis identifier, case-insensitive (``"sym4"``, ``"db5"``,
        ``"bior1.3"``...). ``"db1"`` is an alias of ``"haar"``.

    Raises
    ------
    FilterBankError
        If the basis is unknown.
    """
    if isinstance(name, WaveletFilterBank):
        return name
    key = str(name).strip().lower()
    key = _ALIASES.get(key, key)
    if key not in _ORTHOGONAL and key not in _BIORTHOGONAL:
        raise FilterBankError(
            f"unknown basis {name!r}; supported bases: {', '.join(SUPPORTED_BASES)}"
        )
    bank = _build(key)
    check_filter_bank(bank)
    return bank
