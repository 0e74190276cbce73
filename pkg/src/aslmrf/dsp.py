"""High-pass preconditioning of fingerprints.

Scanner drift and physiological nuisance land in the low frequencies while
the labeling scheme modulates perfusion information into the high bands, so
fingerprints fed to the perfusion/CBVa/BAT/MTR regressors are high-pass
filtered.  Default design: 4th-order Butterworth, 0.05 Hz cutoff, treating
the fingerprint as sampled at 1 Hz regardless of the true variable TR.
Application is zero-phase (forward-backward with odd-reflection padding of
length 3*max(len(b), len(a))) so features are not shifted against the
schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal

from .model import Fingerprint

DEFAULT_ORDER = 4
DEFAULT_CUTOFF_HZ = 0.05
DEFAULT_FS_HZ = 1.0


@dataclass(frozen=True)
class IIRFilter:
    """Digital IIR filter coefficients plus design metadata."""

    b: np.ndarray
    a: np.ndarray
    order: int
    cutoff_hz: float
    fs_hz: float

    def __post_init__(self):
        b = np.asarray(self.b, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if a[0] != 1.0:
            raise ValueError("denominator must be monic (a[0] == 1)")
        poles = np.roots(a)
        if poles.size and np.max(np.abs(poles)) >= 1.0:
            raise ValueError("unstable filter: pole on or outside the unit circle")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "a", a)

    @property
    def padlen(self) -> int:
        return 3 * max(len(self.b), len(self.a))

    def response(self, freqs_hz) -> np.ndarray:
        """Complex one-pass frequency response at the given frequencies."""
        _, h = signal.freqz(self.b, self.a, worN=np.atleast_1d(freqs_hz), fs=self.fs_hz)
        return h


def design_butterworth_highpass(order: int = DEFAULT_ORDER,
                                cutoff_hz: float = DEFAULT_CUTOFF_HZ,
                                fs_hz: float = DEFAULT_FS_HZ) -> IIRFilter:
    """Digital Butterworth high-pass via the analog prototype and bilinear
    transform with prewarped cutoff."""
    if order < 1:
        raise ValueError("order must be >= 1")
    if not 0 < cutoff_hz < fs_hz / 2:
        raise ValueError(
            f"cutoff must lie in (0, fs/2) = (0, {fs_hz / 2}), got {cutoff_hz}")
    b, a = signal.butter(order, cutoff_hz, btype="highpass", fs=fs_hz)
    return IIRFilter(b=b, a=a, order=order, cutoff_hz=cutoff_hz, fs_hz=fs_hz)


def filtfilt_reflect(filt: IIRFilter, x: np.ndarray) -> np.ndarray:
    """Zero-phase forward-backward filtering along the last axis."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] <= filt.padlen:
        raise ValueError(
            f"signal length {x.shape[-1]} too short for padding {filt.padlen}")
    return signal.filtfilt(filt.b, filt.a, x, axis=-1, padtype="odd",
                           padlen=filt.padlen)


def apply_zero_phase(filt: IIRFilter, fp: Fingerprint) -> Fingerprint:
    """Zero-phase high-pass of one fingerprint (length preserved)."""
    return Fingerprint(filtfilt_reflect(filt, fp.samples),
                       schedule_id=fp.schedule_id,
                       normalized=fp.normalized, filtered=True)
