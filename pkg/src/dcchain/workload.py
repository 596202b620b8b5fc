"""Server-load trace ingest, scaling, resampling, and synthesis.

Measured cluster workloads arrive as two-column CSV files (time in seconds,
power in arbitrary units) at coarse resolution, typically 100 ms. This module
parses and validates them, maps them affinely into per-unit, resamples them
onto a uniform grid as simulator inputs, and can synthesize a deterministic
bursty profile with the same texture for self-contained runs.
"""

import csv
from dataclasses import dataclass, field

import numpy as np

from .timedomain import InputSignal

CSV_HEADER = ("t_seconds", "p_load_pu")


@dataclass
class LoadTrace:
    """Validated load samples: strictly increasing times, finite power >= 0."""
    t: np.ndarray
    p: np.ndarray
    source: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.t.size == 0:
            raise ValueError("empty trace: no samples")
        if self.t.size != self.p.size:
            raise ValueError("trace has %d times but %d samples"
                             % (self.t.size, self.p.size))
        if self.t.size < 2 or self.t[-1] <= self.t[0]:
            raise ValueError("trace duration must be positive")
        if np.any(np.diff(self.t) <= 0):
            k = int(np.argmax(np.diff(self.t) <= 0))
            raise ValueError("non-monotone time at row %d (t=%g after t=%g)"
                             % (k + 1, self.t[k + 1], self.t[k]))
        if not np.all(np.isfinite(self.p)):
            raise ValueError("trace contains non-finite power samples")
        if np.any(self.p < 0):
            raise ValueError("negative power after scaling (min %g)"
                             % self.p.min())

    @property
    def duration(self):
        return float(self.t[-1] - self.t[0])

    @property
    def n_samples(self):
        return int(self.t.size)

    def stats(self):
        return {"mean": float(self.p.mean()), "min": float(self.p.min()),
                "max": float(self.p.max()), "duration": self.duration,
                "n_samples": self.n_samples}


def _affine_coeffs(p, scale):
    """(gain, offset) for the requested scaling of raw samples p."""
    if not scale:
        return 1.0, 0.0
    keys = set(scale)
    if keys <= {"offset", "gain"}:
        return float(scale.get("gain", 1.0)), float(scale.get("offset", 0.0))
    if keys <= {"target_mean", "target_peak"}:
        mean, peak = float(np.mean(p)), float(np.max(p))
        if "target_mean" in keys and "target_peak" in keys:
            if peak == mean:
                raise ValueError("constant trace cannot meet distinct "
                                 "mean and peak targets")
            gain = (scale["target_peak"] - scale["target_mean"]) / (peak - mean)
            return gain, float(scale["target_mean"]) - gain * mean
        if "target_mean" in keys:
            if mean == 0.0:
                raise ValueError("zero-mean trace cannot be gain-scaled "
                                 "to a nonzero mean")
            return float(scale["target_mean"]) / mean, 0.0
        if peak == 0.0:
            raise ValueError("zero-peak trace cannot be gain-scaled "
                             "to a nonzero peak")
        return float(scale["target_peak"]) / peak, 0.0
    raise ValueError("scale keys must be {offset, gain} or "
                     "{target_mean, target_peak}, got %s" % sorted(keys))


def scale_samples(p, scale):
    """Apply an affine per-unit mapping to raw power samples."""
    gain, offset = _affine_coeffs(p, scale)
    return gain * np.asarray(p, dtype=float) + offset


def ingest_csv(path, scale=None):
    """Parse a two-column load CSV into a scaled LoadTrace.

    Expected layout: optional comment lines starting with '#', an optional
    header row (t_seconds, p_load_pu), then numeric rows t,power. scale maps
    the raw power column into per-unit, either directly ({offset, gain},
    p = gain*raw + offset) or by targets ({target_mean} and/or {target_peak}
    met by an affine map). Raises ValueError naming the problem for an empty
    file, non-monotone time, or negative power after scaling.
    """
    t, p = [], []
    with open(path, newline="") as fh:
        for row_no, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            try:
                vals = [float(c) for c in cells]
            except ValueError:
                if not t:
                    continue
                raise ValueError("non-numeric row %d in %s: %r"
                                 % (row_no, path, row))
            if len(vals) != 2:
                raise ValueError("row %d in %s has %d columns, expected 2"
                                 % (row_no, path, len(vals)))
            t.append(vals[0])
            p.append(vals[1])
    if not t:
        raise ValueError("empty file: no samples in %s" % path)
    return LoadTrace(np.array(t), scale_samples(np.array(p), scale),
                     source=str(path), meta={"scale": dict(scale or {})})


def export_csv(trace, path):
    """Write a LoadTrace back out in the ingest layout, full precision."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(CSV_HEADER)
        for tk, pk in zip(trace.t, trace.p):
            wr.writerow([repr(float(tk)), repr(float(pk))])


def resample(trace, dt):
    """Uniform-grid input signal by linear interpolation, endpoints held.

    The grid runs from the first to the last timestamp at spacing dt; the
    resampled arrays stay reachable on the returned signal as .t and .v.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round(trace.duration / dt))
    if abs(n * dt - trace.duration) > 1e-9 * max(1.0, trace.duration):
        n = int(np.floor(trace.duration / dt))
    t_u = trace.t[0] + dt * np.arange(n + 1)
    v_u = np.interp(t_u, trace.t, trace.p)
    sig = InputSignal.trace(t_u, v_u)
    sig.t = t_u
    sig.v = v_u
    sig.description = "resampled trace (%d samples, dt=%gs)" % (n + 1, dt)
    return sig


def synthetic_gpu_trace(duration=100.0, dt=0.1, mean=0.5, peak=0.85, seed=0):
    """Deterministic bursty load profile resembling accelerator clusters.

    Compute bursts alternate with synchronization stalls at a jittered
    cadence in the low-Hz band, riding on a slow utilization drift plus a
    small noise floor; an affine map then pins the sample mean and peak to
    the requested targets. Same seed, same trace.
    """
    rng = np.random.default_rng(seed)
    n = int(round(duration / dt)) + 1
    t = dt * np.arange(n)

    # burst cadence: piecewise-constant frequency in 1-2 Hz, redrawn every
    # ~10 s, integrated to a continuous phase
    freq = np.empty(n)
    k = 0
    while k < n:
        span = int(round(rng.uniform(8.0, 12.0) / dt))
        freq[k:k + span] = rng.uniform(1.0, 2.0)
        k += span
    phase = 2.0 * np.pi * np.cumsum(freq) * dt
    duty = 0.35 + 0.2 * np.sin(2.0 * np.pi * t / duration)
    burst = (np.sin(phase) > np.cos(np.pi * duty)).astype(float)

    drift = np.cumsum(rng.standard_normal(n))
    win = max(1, int(round(5.0 / dt)))
    drift = np.convolve(drift, np.ones(win) / win, mode="same")
    drift = (drift - drift.min()) / max(float(np.ptp(drift)), 1e-12)

    raw = 0.55 * burst + 0.3 * drift + 0.05 * rng.standard_normal(n) + 0.3
    raw = np.maximum(raw, 0.0)
    p = scale_samples(raw, {"target_mean": mean, "target_peak": peak})
    p = np.maximum(p, 0.0)
    return LoadTrace(t, p, source="synthetic(seed=%d)" % seed,
                     meta={"seed": seed, "mean": mean, "peak": peak})
