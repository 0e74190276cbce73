"""Two-compartment ASL signal model: parameter types, scan schedule types and
the fingerprint simulator.

The tissue compartment evolves as

    dM_tis/dt = (M0 - M_tis)/T1_tis + f' * M_art(t) - (f'/lam) * M_tis - K_m * M_tis

with f' the perfusion rate converted from mL/100g/min to 1/s (divide by 6000,
tissue density 1 g/mL), K_m the magnetization-transfer rate (a continuous
exchange with the bound pool, so it acts throughout the scan and is only
weakly separable from 1/T1_tis), and the arterial magnetization (per unit
equilibrium magnetization)

    M_art(t) = 1 - 2 * alpha * c_label(t - bat) * exp(-bat / T1_art)

where c_label(u) = 1 iff u falls inside a label frame's tag window: the bolus
inverted during labeling arrives one bolus-arrival time later, decayed
accordingly.  The voxel signal sampled at the start of each frame's
acquisition window is

    s = (CBVa * M0 * M_art + (1 - CBVa) * M_tis) * sin(flip)

after which the excitation saturates the tissue compartment,
M_tis <- M_tis * cos(flip).  The arterial compartment is treated as
continuously refreshed by inflow and is not saturated.

All coefficients are piecewise constant between events (label tag windows
shifted by the bolus arrival time, acquisition instants), so the simulator
advances with exact exponential updates segment by segment.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DegenerateSignalError
from . import kernels

PARAM_NAMES = ("f", "cbva", "bat", "mtr", "t1_tis", "flip")

#: Perfusion unit conversion mL/100g/min -> 1/s assuming 1 g/mL tissue density.
F_UNIT_SCALE = 6000.0


class PulseType(enum.IntEnum):
    """Per-frame RF pulse type.

    Label inverts inflowing blood, Control plays MT-matched non-inverting RF,
    Silence plays no labeling RF at all.  Acquisition excitation happens in
    every frame regardless of type.
    """

    LABEL = 0
    CONTROL = 1
    SILENCE = 2

    @property
    def letter(self) -> str:
        return "LCS"[int(self)]

    @classmethod
    def from_letter(cls, letter: str) -> "PulseType":
        try:
            return cls("LCS".index(letter))
        except ValueError:
            raise ValueError(f"unknown pulse letter {letter!r}") from None


@dataclass(frozen=True)
class HemodynamicParams:
    """The six unknowns of the signal model.

    f : perfusion, mL/100g/min
    cbva : arterial blood volume fraction (dimensionless)
    bat : bolus arrival time, s
    mtr : magnetization transfer rate, 1/s
    t1_tis : tissue longitudinal relaxation time, s
    flip : excitation flip angle, degrees
    """

    f: float
    cbva: float
    bat: float
    mtr: float
    t1_tis: float
    flip: float

    def __post_init__(self):
        validate_params(self.to_array())

    def to_array(self) -> np.ndarray:
        return np.array([self.f, self.cbva, self.bat, self.mtr, self.t1_tis, self.flip])

    @classmethod
    def from_array(cls, theta) -> "HemodynamicParams":
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (6,):
            raise ValueError(f"expected 6 parameters, got shape {theta.shape}")
        return cls(*theta)


def validate_params(theta: np.ndarray) -> None:
    """Raise ValueError if a parameter vector violates the model invariants."""
    f, cbva, bat, mtr, t1, flip = theta
    if not np.all(np.isfinite(theta)):
        raise ValueError("parameters must be finite")
    if f < 0:
        raise ValueError(f"perfusion must be >= 0, got {f}")
    if not 0.0 <= cbva <= 1.0:
        raise ValueError(f"cbva must be in [0, 1], got {cbva}")
    if bat <= 0:
        raise ValueError(f"bolus arrival time must be > 0, got {bat}")
    if mtr < 0:
        raise ValueError(f"magnetization transfer rate must be >= 0, got {mtr}")
    if t1 <= 0:
        raise ValueError(f"t1_tis must be > 0, got {t1}")
    if not 0.0 < flip < 180.0:
        raise ValueError(f"flip angle must be in (0, 180) degrees, got {flip}")


@dataclass(frozen=True)
class ModelConstants:
    """Fixed model constants.

    lam and alpha defaults follow the usual ASL convention (0.9 blood-brain
    partition coefficient, 85% inversion efficiency).  t1_art is a 3 T
    literature value.  noise_sigma is the standard deviation of the real
    additive white Gaussian noise on magnitude samples.
    """

    lam: float = 0.9
    alpha: float = 0.85
    t1_art: float = 1.65
    m0_tis: float = 1.0
    noise_sigma: float = 0.01

    def __post_init__(self):
        if self.t1_art <= 0:
            raise ValueError("t1_art must be > 0")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")


#: Fixed per-frame overheads, seconds.
DEFAULT_T_DELAY = 0.055
DEFAULT_T_AQ = 0.0324
DEFAULT_T_ADJUST = 0.050
#: Sum of the fixed per-frame overheads.
FRAME_OVERHEAD = DEFAULT_T_DELAY + DEFAULT_T_AQ + DEFAULT_T_ADJUST

DEFAULT_NFRAMES = 700
DEFAULT_TOTAL_DURATION = 600.0


def canonical_duration(seconds: float) -> float:
    """Nudge a duration (at most 1 ulp) onto a value that survives the
    seconds -> milliseconds -> seconds unit round trip of the schedule CSV
    format exactly.  The map is idempotent."""
    return (seconds * 1000.0) / 1000.0


@dataclass(frozen=True)
class ScanFrame:
    """One repetition: labeling period, delay, acquisition and adjustment.

    Durations are stored ms-canonical (see canonical_duration) so written
    schedules parse back bit-identically.
    """

    pulse: PulseType
    t_tag: float
    t_delay: float = DEFAULT_T_DELAY
    t_aq: float = DEFAULT_T_AQ
    t_adjust: float = DEFAULT_T_ADJUST

    def __post_init__(self):
        for name in ("t_tag", "t_delay", "t_aq", "t_adjust"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, canonical_duration(v))

    @property
    def tr(self) -> float:
        return self.t_tag + self.t_delay + self.t_aq + self.t_adjust


class ScanSchedule:
    """Ordered list of scan frames with derived timing arrays.

    Acquisition instants are the start of each frame's t_aq window.  The
    timing arrays are cached because the simulation kernels consume them
    directly.
    """

    def __init__(self, frames, meta: dict | None = None):
        frames = tuple(frames)
        if not frames:
            raise ValueError("schedule must contain at least one frame")
        self.frames = frames
        self.meta = dict(meta or {})
        self.pulses = np.array([int(fr.pulse) for fr in frames], dtype=np.int8)
        self.t_tag = np.array([fr.t_tag for fr in frames])
        self.t_delay = np.array([fr.t_delay for fr in frames])
        self.t_aq = np.array([fr.t_aq for fr in frames])
        self.t_adjust = np.array([fr.t_adjust for fr in frames])
        self._events = None

    @property
    def nframes(self) -> int:
        return len(self.frames)

    @property
    def total_duration(self) -> float:
        return float(np.sum(self.t_tag + self.t_delay + self.t_aq + self.t_adjust))

    @property
    def frame_starts(self) -> np.ndarray:
        trs = self.t_tag + self.t_delay + self.t_aq + self.t_adjust
        starts = np.zeros(self.nframes)
        np.cumsum(trs[:-1], out=starts[1:])
        return starts

    @property
    def acquisition_times(self) -> np.ndarray:
        return self.frame_starts + self.t_tag + self.t_delay

    def counts(self) -> dict[PulseType, int]:
        return {pt: int(np.sum(self.pulses == int(pt))) for pt in PulseType}

    def events(self):
        """(km_edges, label_edges, acq_times) event tables for the kernels."""
        if self._events is None:
            self._events = kernels.schedule_events(
                self.pulses, self.t_tag, self.t_delay, self.t_aq, self.t_adjust
            )
        return self._events

    def with_pulses(self, pulses) -> "ScanSchedule":
        """Same timing, different label order."""
        pulses = list(pulses)
        if len(pulses) != self.nframes:
            raise ValueError("pulse list length must match frame count")
        frames = [replace(fr, pulse=PulseType(int(p))) for fr, p in zip(self.frames, pulses)]
        return ScanSchedule(frames, meta=self.meta)

    def __len__(self) -> int:
        return self.nframes

    def __eq__(self, other) -> bool:
        if not isinstance(other, ScanSchedule):
            return NotImplemented
        return self.frames == other.frames

    def __repr__(self) -> str:
        c = self.counts()
        return (
            f"ScanSchedule({self.nframes} frames, {self.total_duration:.3f}s, "
            f"L/C/S={c[PulseType.LABEL]}/{c[PulseType.CONTROL]}/{c[PulseType.SILENCE]})"
        )


@dataclass
class Fingerprint:
    """Vector of acquired magnitude samples, one per frame."""

    samples: np.ndarray
    schedule_id: str = ""
    normalized: bool = False
    filtered: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.ndim != 1:
            raise ValueError("fingerprint samples must be a 1-D vector")

    def __len__(self) -> int:
        return self.samples.size


def arterial_magnetization(t: float, p: HemodynamicParams, c: ModelConstants,
                           sched: ScanSchedule) -> float:
    """Arterial magnetization per unit M0 at time t.

    The labeled bolus created during a label tag window arrives a bolus
    arrival time later, decayed by exp(-bat/T1_art); outside of (shifted)
    label windows the compartment holds fully relaxed blood.
    """
    u = t - p.bat
    starts = sched.frame_starts
    inp = 0.0
    for i in range(sched.nframes):
        if sched.pulses[i] == int(PulseType.LABEL):
            if starts[i] <= u < starts[i] + sched.t_tag[i]:
                inp = 1.0
                break
    return 1.0 - 2.0 * c.alpha * inp * math.exp(-p.bat / c.t1_art)


def simulate_fingerprint(p: HemodynamicParams, c: ModelConstants,
                         sched: ScanSchedule) -> Fingerprint:
    """Simulate the noiseless fingerprint for one parameter vector.

    Deterministic: identical inputs give bit-identical outputs.
    """
    samples = simulate_samples(p.to_array(), c, sched)
    return Fingerprint(samples, schedule_id=str(sched.meta.get("generator", "")))


def simulate_samples(theta: np.ndarray, c: ModelConstants, sched: ScanSchedule) -> np.ndarray:
    """Array-level simulator entry point (theta ordered as PARAM_NAMES)."""
    validate_params(theta)
    km_t, lab_t, acq_t = sched.events()
    out = np.empty(sched.nframes)
    scratch = np.empty((2, sched.nframes))
    kernels.simulate_core(km_t, lab_t, acq_t, np.asarray(theta, dtype=float),
                          c.lam, c.alpha, c.t1_art, c.m0_tis, out,
                          scratch[0], scratch[1])
    return out


def simulate_samples_detail(theta: np.ndarray, c: ModelConstants, sched: ScanSchedule):
    """Like simulate_samples but also returns the tissue magnetization just
    before each excitation and the arterial magnetization (per unit M0) at
    each acquisition instant."""
    validate_params(theta)
    km_t, lab_t, acq_t = sched.events()
    out = np.empty(sched.nframes)
    mtis = np.empty(sched.nframes)
    mart = np.empty(sched.nframes)
    kernels.simulate_core(km_t, lab_t, acq_t, np.asarray(theta, dtype=float),
                          c.lam, c.alpha, c.t1_art, c.m0_tis, out, mtis, mart)
    return out, mtis, mart


def add_noise(fp: Fingerprint, sigma: float, seed: int) -> Fingerprint:
    """Add i.i.d. real Gaussian noise N(0, sigma^2) to every sample."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    rng = np.random.default_rng(seed)
    noisy = fp.samples + sigma * rng.standard_normal(fp.samples.size)
    return Fingerprint(noisy, schedule_id=fp.schedule_id,
                       normalized=fp.normalized, filtered=fp.filtered)


#: Below this first-frame magnitude an acquisition is considered degenerate.
NORMALIZE_FLOOR = 1e-9


def normalize_first_frame(fp: Fingerprint, floor: float = NORMALIZE_FLOOR) -> Fingerprint:
    """Divide every sample by the first one, so samples[0] == 1."""
    first = fp.samples[0]
    if abs(first) < floor:
        raise DegenerateSignalError(
            f"first-frame magnitude {first!r} below floor {floor!r}")
    return Fingerprint(fp.samples / first, schedule_id=fp.schedule_id,
                       normalized=True, filtered=fp.filtered)
