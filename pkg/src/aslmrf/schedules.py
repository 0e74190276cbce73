"""Labeling-schedule construction.

Candidate schedules are described by 5 labeling durations placed at equally
spaced frame positions and linearly interpolated across the scan, then scaled
so the total scan duration (labeling plus fixed per-frame overheads) hits a
target.  Label/control/silence orders are pseudo-random with counts as equal
as possible.  Two suboptimal generators (i.i.d. uniform durations, linearly
decreasing durations) provide the comparison schedules.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    DEFAULT_NFRAMES,
    DEFAULT_TOTAL_DURATION,
    FRAME_OVERHEAD,
    PulseType,
    ScanFrame,
    ScanSchedule,
)

N_CONTROL_POINTS = 5


@dataclass(frozen=True)
class ControlPoints:
    """The 5 labeling durations anchoring an interpolated schedule."""

    durations: tuple

    def __post_init__(self):
        d = tuple(float(v) for v in self.durations)
        if len(d) != N_CONTROL_POINTS:
            raise ValueError(f"expected {N_CONTROL_POINTS} control durations, got {len(d)}")
        if any(v < 0 or not np.isfinite(v) for v in d):
            raise ValueError("control durations must be finite and >= 0")
        if not any(v > 0 for v in d):
            raise ValueError("at least one control duration must be > 0")
        object.__setattr__(self, "durations", d)


@dataclass(frozen=True)
class DurationGrid:
    """Ascending candidate labeling durations for the exhaustive search."""

    values: tuple = (0.1, 0.3, 0.6, 1.0, 1.5, 2.2)

    def __post_init__(self):
        v = tuple(float(x) for x in self.values)
        if not v:
            raise ValueError("duration grid must be nonempty")
        if any(x < 0 for x in v):
            raise ValueError("durations must be >= 0")
        if any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("durations must be strictly ascending")
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


def interpolate_durations(cp: ControlPoints, nframes: int) -> np.ndarray:
    """Per-frame labeling durations from linear interpolation of the control
    points, which sit at frame positions equally spaced from the first to the
    last frame."""
    if nframes < N_CONTROL_POINTS:
        raise ValueError(f"nframes must be >= {N_CONTROL_POINTS}, got {nframes}")
    positions = np.linspace(0.0, nframes - 1.0, N_CONTROL_POINTS)
    return np.interp(np.arange(nframes, dtype=float), positions, cp.durations)


def scale_to_total(durations, overhead_per_frame: float, total: float) -> np.ndarray:
    """Rescale labeling durations so labeling plus overhead sums to total."""
    durations = np.asarray(durations, dtype=float)
    budget = total - durations.size * overhead_per_frame
    if budget <= 0:
        raise ValueError(
            f"no labeling time left: total {total}s <= overhead "
            f"{durations.size * overhead_per_frame}s")
    s = durations.sum()
    if s <= 0:
        raise ValueError("durations must sum to > 0")
    return durations * (budget / s)


def random_label_order(nframes: int, seed: int) -> np.ndarray:
    """Seeded pseudo-random order of label/control/silence pulses with counts
    floor(nframes/3) each and the remainder going to label first, then
    control."""
    if nframes < 3:
        raise ValueError(f"nframes must be >= 3, got {nframes}")
    base, rem = divmod(nframes, 3)
    counts = [base + (1 if i < rem else 0) for i in range(3)]
    codes = np.repeat(np.array([0, 1, 2], dtype=np.int8), counts)
    rng = np.random.default_rng(seed)
    return rng.permutation(codes)


def assemble_schedule(durations, order, t_delay: float | None = None,
                      t_aq: float | None = None, t_adjust: float | None = None,
                      meta: dict | None = None) -> ScanSchedule:
    """Zip per-frame labeling durations with a pulse order into a schedule."""
    durations = np.asarray(durations, dtype=float)
    order = np.asarray(order)
    if durations.shape != order.shape:
        raise ValueError(
            f"durations and order lengths differ: {durations.size} vs {order.size}")
    kwargs = {}
    if t_delay is not None:
        kwargs["t_delay"] = t_delay
    if t_aq is not None:
        kwargs["t_aq"] = t_aq
    if t_adjust is not None:
        kwargs["t_adjust"] = t_adjust
    frames = [ScanFrame(PulseType(int(p)), float(d), **kwargs)
              for d, p in zip(durations, order)]
    return ScanSchedule(frames, meta=meta)


def make_suboptimal_1(nframes: int = DEFAULT_NFRAMES,
                      total: float = DEFAULT_TOTAL_DURATION,
                      seed: int = 0,
                      duration_range: tuple = (0.05, 1.5)) -> ScanSchedule:
    """Suboptimal comparison schedule 1: i.i.d. uniform labeling durations,
    rescaled to the fixed total scan time."""
    rng = np.random.default_rng(seed)
    lo, hi = duration_range
    raw = rng.uniform(lo, hi, nframes)
    durations = scale_to_total(raw, FRAME_OVERHEAD, total)
    order = random_label_order(nframes, seed)
    return assemble_schedule(durations, order,
                             meta={"generator": "suboptimal1", "seed": seed,
                                   "nframes": nframes, "total_s": total})


def make_suboptimal_2(nframes: int = DEFAULT_NFRAMES,
                      total: float = DEFAULT_TOTAL_DURATION,
                      seed: int = 0,
                      d_max: float = 1.5, d_min: float = 0.05) -> ScanSchedule:
    """Suboptimal comparison schedule 2: labeling durations decreasing
    linearly with the frame index, rescaled to the fixed total scan time."""
    if d_max <= d_min:
        raise ValueError("d_max must exceed d_min")
    raw = np.linspace(d_max, d_min, nframes)
    durations = scale_to_total(raw, FRAME_OVERHEAD, total)
    order = random_label_order(nframes, seed)
    return assemble_schedule(durations, order,
                             meta={"generator": "suboptimal2", "seed": seed,
                                   "nframes": nframes, "total_s": total})


def make_interpolated(cp: ControlPoints, nframes: int = DEFAULT_NFRAMES,
                      total: float = DEFAULT_TOTAL_DURATION,
                      order_seed: int = 0,
                      meta: dict | None = None) -> ScanSchedule:
    """Interpolate control points, scale to the fixed total and attach a
    seeded pseudo-random label order."""
    durations = scale_to_total(interpolate_durations(cp, nframes), FRAME_OVERHEAD, total)
    order = random_label_order(nframes, order_seed)
    base = {"generator": "interpolated", "seed": order_seed,
            "nframes": nframes, "total_s": total}
    base.update(meta or {})
    return assemble_schedule(durations, order, meta=base)
