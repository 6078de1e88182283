"""Spectral feature extraction from multichannel time series.

Signals are cut into fixed-length overlapping windows, each window is
reduced to per-band spectral powers via a plain periodogram, and the
resulting table of absolute (and optionally relative) powers is the
feature input of the learners.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureTable

__all__ = [
    "BandSpec",
    "SegmentSpec",
    "NormStats",
    "FeatureError",
    "BAND_PRESETS",
    "segment",
    "band_power",
    "extract_band_features",
    "normalize_fit",
    "normalize_apply",
]


class FeatureError(ValueError):
    pass


@dataclass(frozen=True)
class BandSpec:
    name: str
    lo: float
    hi: float

    def __post_init__(self):
        if not 0 <= self.lo < self.hi:
            raise FeatureError(f"band {self.name}: need 0 <= lo < hi")


@dataclass(frozen=True)
class SegmentSpec:
    window_s: float
    step_s: float
    sample_rate_hz: float

    def __post_init__(self):
        if not self.window_s > 0:
            raise FeatureError("window_s must be > 0")
        if not 0 < self.step_s <= self.window_s:
            raise FeatureError("step_s must be in (0, window_s]")
        if self.window_samples < 2:
            raise FeatureError("window must span at least 2 samples")

    @property
    def window_samples(self) -> int:
        return int(round(self.window_s * self.sample_rate_hz))

    @property
    def step_samples(self) -> int:
        return max(1, int(round(self.step_s * self.sample_rate_hz)))


@dataclass(frozen=True)
class NormStats:
    feature_names: tuple
    mean: np.ndarray
    std: np.ndarray


# The two extraction recipes used throughout: four classic bands over
# 19 channels, and six neonatal bands over C3/C4.
BAND_PRESETS = {
    "alz4": (
        BandSpec("Delta", 0.0, 4.0),
        BandSpec("Theta", 4.0, 8.0),
        BandSpec("Alpha", 8.0, 14.0),
        BandSpec("Beta", 14.0, 20.0),
    ),
    "neo6": (
        BandSpec("Subdelta", 0.0, 1.5),
        BandSpec("Delta", 1.5, 3.5),
        BandSpec("Theta", 3.5, 7.5),
        BandSpec("Alpha", 7.5, 13.5),
        BandSpec("Beta1", 13.5, 19.5),
        BandSpec("Beta2", 19.5, 25.0),
    ),
}


def _check_bands(bands) -> tuple:
    bands = tuple(bands)
    if not bands:
        raise FeatureError("need at least one band")
    ordered = sorted(bands, key=lambda b: b.lo)
    for a, b in zip(ordered, ordered[1:]):
        if b.lo < a.hi:
            raise FeatureError(f"bands {a.name} and {b.name} overlap")
    return bands


def segment(signal, spec: SegmentSpec) -> list:
    """Cut a 1-D signal into windows starting at multiples of the step."""
    signal = np.asarray(signal, dtype=float)
    win = spec.window_samples
    step = spec.step_samples
    if len(signal) < win:
        raise FeatureError(
            f"signal of {len(signal)} samples shorter than one {win}-sample window"
        )
    count = (len(signal) - win) // step + 1
    return [signal[k * step : k * step + win] for k in range(count)]


def _periodogram(window: np.ndarray, rate: float, taper: str = "rect"):
    n = len(window)
    if taper == "hann":
        window = window * np.hanning(n)
    elif taper != "rect":
        raise FeatureError(f"unknown taper {taper!r}")
    spectrum = np.fft.rfft(window)
    power = (spectrum.real**2 + spectrum.imag**2) / n
    freqs = np.fft.rfftfreq(n, d=1.0 / rate)
    return freqs, power


def band_power(window, rate: float, band: BandSpec, taper: str = "rect") -> float:
    """Periodogram power within [band.lo, band.hi).

    Squared rfft magnitudes normalized by window length, summed over the
    bins whose frequency falls in the half-open band interval.  A bin
    sitting exactly at Nyquist is credited to the band whose upper edge
    is Nyquist, so a partition of [0, Nyquist] conserves total power.
    """
    window = np.asarray(window, dtype=float)
    if len(window) == 0:
        raise FeatureError("empty window")
    nyquist = rate / 2.0
    if band.hi > nyquist:
        raise FeatureError(f"band {band.name} upper edge {band.hi} exceeds Nyquist {nyquist}")
    freqs, power = _periodogram(window, rate, taper)
    mask = (freqs >= band.lo) & (freqs < band.hi)
    if band.hi == nyquist:
        mask |= freqs == nyquist
    return float(np.sum(power[mask]))


def extract_band_features(
    channels: dict,
    bands,
    spec: SegmentSpec,
    mode: str = "absolute",
    derived_sum_channels: list | None = None,
    label: float | None = None,
    taper: str = "rect",
) -> tuple[FeatureTable, list]:
    """Build the per-segment band-power feature table.

    ``channels`` maps channel name to a 1-D signal; ``derived_sum_channels``
    lists names like ``"C3+C4"`` whose sample-wise sum is analyzed as an
    extra channel (named columns carry no channel suffix).  Column order is
    band-major: for each band all absolute powers across channels, then
    (in ``absolute+relative`` mode) the same layout of relative powers.

    Returns the table plus the indices of segments flagged for zero total
    power (their relative powers are NaN, never silently 0).
    """
    if mode not in ("absolute", "absolute+relative"):
        raise FeatureError(f"unknown mode {mode!r}")
    bands = _check_bands(bands)
    names = list(channels)
    if not names:
        raise FeatureError("no channels given")
    lengths = {len(np.asarray(v)) for v in channels.values()}
    if len(lengths) != 1:
        raise FeatureError("channels must all have the same length")

    signals = {name: np.asarray(channels[name], dtype=float) for name in names}
    sum_cols = []  # (column suffix, signal)
    for pair in derived_sum_channels or []:
        parts = pair.split("+")
        if len(parts) != 2 or any(p not in signals for p in parts):
            raise FeatureError(f"sum channel {pair!r} references unknown channels")
        sum_cols.append(("", sum(signals[p] for p in parts)))

    all_signals = [(name, signals[name]) for name in names] + sum_cols
    windows = {suffix: segment(sig, spec) for suffix, sig in all_signals}
    n_seg = len(next(iter(windows.values())))

    abs_cols = [
        f"AbsPow{band.name}{suffix}" for band in bands for suffix, _ in all_signals
    ]
    rel_cols = (
        [f"RelPow{band.name}{suffix}" for band in bands for suffix, _ in all_signals]
        if mode == "absolute+relative"
        else []
    )
    col_names = abs_cols + rel_cols

    rows = np.empty((n_seg, len(col_names)))
    flagged = []
    for k in range(n_seg):
        powers = {
            suffix: [band_power(windows[suffix][k], spec.sample_rate_hz, b, taper) for b in bands]
            for suffix, _ in all_signals
        }
        row = [powers[suffix][bi] for bi, _ in enumerate(bands) for suffix, _ in all_signals]
        if mode == "absolute+relative":
            rel = []
            zero_total = False
            for bi, _ in enumerate(bands):
                for suffix, _ in all_signals:
                    total = sum(powers[suffix])
                    if total == 0.0:
                        zero_total = True
                        rel.append(np.nan)
                    else:
                        rel.append(powers[suffix][bi] / total)
            if zero_total:
                flagged.append(k)
            row += rel
        rows[k] = row

    y = np.full(n_seg, float(label)) if label is not None else None
    return FeatureTable(feature_names=col_names, X=rows, y=y), flagged


def normalize_fit(table: FeatureTable) -> NormStats:
    """Per-column mean/std (sample, n-1) fitted on the given rows."""
    if table.n < 2:
        raise FeatureError("need at least 2 rows to fit normalization")
    mean = table.X.mean(axis=0)
    std = table.X.std(axis=0, ddof=1)
    zero = np.flatnonzero(std == 0.0)
    if len(zero):
        bad = ", ".join(table.feature_names[i] for i in zero[:5])
        raise FeatureError(f"zero-variance column(s) at fit time: {bad}")
    return NormStats(
        feature_names=tuple(table.feature_names), mean=mean, std=std
    )


def normalize_apply(table: FeatureTable, stats: NormStats) -> FeatureTable:
    if tuple(table.feature_names) != stats.feature_names:
        raise FeatureError("column sets do not match normalization stats")
    return FeatureTable(
        feature_names=list(table.feature_names),
        X=(table.X - stats.mean) / stats.std,
        y=None if table.y is None else table.y.copy(),
    )
