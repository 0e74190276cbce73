"""Fisher information, the weighted normalized-CRLB design cost and the
exhaustive labeling-schedule search.

The information matrix for one parameter vector is F = J'J / sigma^2 with J
the Jacobian of the noiseless samples.  The design cost of a schedule is the
average over a representative parameter set of the weighted, parameter-
normalized CRLB standard deviations (in percent):

    cost = mean_theta sum_i  w_i^2 * 100 * sqrt([F^-1]_ii) / theta_i

Perfusion carries twice the effective weight (w_f^2 = 2) by default, all
other parameters weight 1, so the cost equals the weighted sum of the
predicted normalized standard deviations reported per parameter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model import HemodynamicParams, ModelConstants, ScanSchedule, validate_params
from .schedules import (
    ControlPoints,
    DurationGrid,
    assemble_schedule,
    interpolate_durations,
    random_label_order,
    scale_to_total,
)
from .model import FRAME_OVERHEAD

N_PARAMS = 6

#: Relative finite-difference step; per-parameter absolute floors.
FD_REL_STEP = 1e-4
FD_MIN_STEPS = np.array([1e-2, 1e-6, 1e-5, 1e-7, 1e-5, 1e-3])

#: Candidates whose information matrix exceeds this condition number are
#: scored +inf (uninformative schedule).
COND_CAP = 1e12

#: Theta-set sizes used during schedule search, label-order refinement and
#: final evaluation.
N_THETA_SEARCH = 50
N_THETA_ORDER = 75
N_THETA_EVAL = 250


@dataclass(frozen=True)
class ParameterSpace:
    """Per-parameter (min, max) boxes.

    Defaults are the scan-design ranges; the network training ranges are the
    separate TRAINING_SPACE constant.
    """

    f: tuple = (12.0, 90.0)
    cbva: tuple = (0.002, 0.03)
    bat: tuple = (0.36, 1.7)
    mtr: tuple = (0.01, 0.03)
    t1_tis: tuple = (0.3, 3.3)
    flip: tuple = (54.0, 112.0)

    def __post_init__(self):
        for lo, hi in self.bounds():
            if not lo < hi:
                raise ValueError(f"each range needs min < max, got ({lo}, {hi})")

    def bounds(self) -> np.ndarray:
        return np.array([self.f, self.cbva, self.bat, self.mtr, self.t1_tis, self.flip])

    def sample(self, n: int, seed: int, method: str = "uniform") -> np.ndarray:
        """(n, 6) parameter draws, i.i.d. uniform per dimension by default;
        method='halton' swaps in a deterministic low-discrepancy sequence."""
        if n < 1:
            raise ValueError("n must be >= 1")
        b = self.bounds()
        if method == "uniform":
            u = np.random.default_rng(seed).random((n, N_PARAMS))
        elif method == "halton":
            from scipy.stats import qmc
            u = qmc.Halton(d=N_PARAMS, seed=seed).random(n)
        else:
            raise ValueError(f"unknown sampling method {method!r}")
        return b[:, 0] + u * (b[:, 1] - b[:, 0])

    def contains(self, theta) -> bool:
        b = self.bounds()
        theta = np.asarray(theta)
        return bool(np.all(theta >= b[:, 0]) and np.all(theta <= b[:, 1]))


DESIGN_SPACE = ParameterSpace()
TRAINING_SPACE = ParameterSpace(f=(0.0, 90.0), cbva=(0.0, 0.015), bat=(0.3, 3.0),
                                mtr=(0.0, 0.03), t1_tis=(0.33, 3.33), flip=(48.0, 112.0))


@dataclass(frozen=True)
class DesignWeights:
    """Per-parameter priority weights; the cost applies them squared, so the
    default gives perfusion an effective weight of 2 and the rest 1."""

    w: tuple = (np.sqrt(2.0), 1.0, 1.0, 1.0, 1.0, 1.0)

    def __post_init__(self):
        w = tuple(float(v) for v in self.w)
        if len(w) != N_PARAMS or any(v < 0 for v in w):
            raise ValueError("need 6 nonnegative weights")
        object.__setattr__(self, "w", w)

    @property
    def effective(self) -> np.ndarray:
        return np.asarray(self.w) ** 2


def thetas_to_array(thetas) -> np.ndarray:
    """Accept a list of HemodynamicParams or an (n, 6) array."""
    if isinstance(thetas, np.ndarray):
        arr = np.atleast_2d(np.asarray(thetas, dtype=float))
    else:
        arr = np.array([t.to_array() if isinstance(t, HemodynamicParams) else t
                        for t in thetas], dtype=float)
    if arr.ndim != 2 or arr.shape[1] != N_PARAMS:
        raise ValueError(f"theta set must be (n, {N_PARAMS}), got {arr.shape}")
    return arr


def sample_theta_set(space: ParameterSpace, n: int, seed: int,
                     method: str = "uniform") -> list[HemodynamicParams]:
    """Seeded parameter draws used to average the design cost."""
    return [HemodynamicParams.from_array(row) for row in space.sample(n, seed, method)]


def _fd_steps(theta: np.ndarray, rel_step: float, min_steps: np.ndarray) -> np.ndarray:
    return np.maximum(rel_step * np.abs(theta), min_steps)


def numerical_jacobian(p, c: ModelConstants, sched: ScanSchedule,
                       rel_step: float = FD_REL_STEP,
                       min_steps: np.ndarray = FD_MIN_STEPS) -> np.ndarray:
    """Central-difference Jacobian of the noiseless samples, (nframes, 6).

    Steps are max(rel_step*|theta_i|, min_steps[i]); both perturbed points
    must satisfy the model invariants.
    """
    theta = p.to_array() if isinstance(p, HemodynamicParams) else np.asarray(p, dtype=float)
    steps = _fd_steps(theta, rel_step, np.asarray(min_steps, dtype=float))
    for j in range(N_PARAMS):
        for s in (+1, -1):
            pert = theta.copy()
            pert[j] += s * steps[j]
            validate_params(pert)
    km_t, lab_t, acq_t = sched.events()
    jac = np.empty((sched.nframes, N_PARAMS))
    kernels.jacobian_core(km_t, lab_t, acq_t, theta, steps,
                          c.lam, c.alpha, c.t1_art, c.m0_tis, jac)
    return jac


def fisher_matrix(jac: np.ndarray, sigma: float) -> np.ndarray:
    """F = J'J / sigma^2 for real AWGN of standard deviation sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    jac = np.asarray(jac, dtype=float)
    return jac.T @ jac / sigma**2


def _cost_arrays(sched: ScanSchedule, thetas, w, c: ModelConstants,
                 cond_cap: float, rel_step: float, min_steps) -> tuple:
    if c.noise_sigma <= 0:
        raise ValueError("design cost needs noise_sigma > 0")
    arr = thetas_to_array(thetas)
    for row in arr:
        validate_params(row)
    km_t, lab_t, acq_t = sched.events()
    return kernels.cost_over_thetas(
        km_t, lab_t, acq_t, arr, w.effective, c.noise_sigma, cond_cap,
        rel_step, np.asarray(min_steps, dtype=float),
        c.lam, c.alpha, c.t1_art, c.m0_tis)


def design_cost(sched: ScanSchedule, thetas, w: DesignWeights, c: ModelConstants,
                cond_cap: float = COND_CAP, rel_step: float = FD_REL_STEP,
                min_steps=FD_MIN_STEPS, full_output: bool = False):
    """Weighted normalized-CRLB cost of a schedule over a theta set.

    Near-singular information (condition number above cond_cap) makes the
    candidate score +inf.  With full_output=True also returns the
    per-parameter mean normalized stds in percent.
    """
    cost, stds = _cost_arrays(sched, thetas, w, c, cond_cap, rel_step, min_steps)
    return (cost, stds) if full_output else cost


def predicted_normalized_std(sched: ScanSchedule, thetas, c: ModelConstants,
                             cond_cap: float = COND_CAP) -> np.ndarray:
    """Per-parameter mean of 100*sqrt(CRLB_ii)/theta_i over the theta set."""
    _, stds = _cost_arrays(sched, thetas, DesignWeights(), c,
                           cond_cap, FD_REL_STEP, FD_MIN_STEPS)
    return stds


def candidate_tuples(grid: DurationGrid) -> np.ndarray:
    """All 5-point control tuples from the grid, lexicographic order."""
    return np.array(list(itertools.product(grid.values, repeat=5)))


def optimize_labeling(grid: DurationGrid, nframes: int, total: float,
                      thetas, w: DesignWeights, c: ModelConstants,
                      reference_order_seed: int = 0,
                      cond_cap: float = COND_CAP,
                      chunk: int = 512, progress=None,
                      full_output: bool = False):
    """Exhaustive search over all control-point 5-tuples from the grid.

    Every candidate is interpolated, scaled to the fixed total duration and
    scored with a shared reference label order; ties go to the
    lexicographically smallest tuple.  Returns (ControlPoints, ScanSchedule,
    cost); full_output adds an (ncand, 12) report array of control points,
    cost and per-parameter normalized stds.
    """
    tuples = candidate_tuples(grid)
    ncand = tuples.shape[0]
    tag_matrix = np.empty((ncand, nframes))
    for i, tup in enumerate(tuples):
        tag_matrix[i] = scale_to_total(
            interpolate_durations(ControlPoints(tuple(tup)), nframes),
            FRAME_OVERHEAD, total)
    order = random_label_order(nframes, reference_order_seed)
    ref = assemble_schedule(tag_matrix[0], order)
    arr = thetas_to_array(thetas)

    costs = np.empty(ncand)
    stds = np.empty((ncand, N_PARAMS))
    for lo in range(0, ncand, chunk):
        hi = min(lo + chunk, ncand)
        costs[lo:hi], stds[lo:hi] = kernels.search_costs(
            tag_matrix[lo:hi], ref.pulses, ref.t_delay, ref.t_aq, ref.t_adjust,
            arr, w.effective, c.noise_sigma, cond_cap,
            FD_REL_STEP, FD_MIN_STEPS,
            c.lam, c.alpha, c.t1_art, c.m0_tis)
        if progress is not None:
            progress(hi, ncand)

    best = int(np.argmin(costs))  # first occurrence = lexicographically smallest
    cp = ControlPoints(tuple(tuples[best]))
    sched = assemble_schedule(
        tag_matrix[best], order,
        meta={"generator": "optimized", "seed": reference_order_seed,
              "nframes": nframes, "total_s": total,
              "control_points": list(cp.durations)})
    if full_output:
        report = np.column_stack([tuples, costs, stds])
        return cp, sched, float(costs[best]), report
    return cp, sched, float(costs[best])


def optimize_label_order(sched: ScanSchedule, n_orders: int, thetas,
                         w: DesignWeights, c: ModelConstants, seed: int,
                         cond_cap: float = COND_CAP, full_output: bool = False):
    """Score the incumbent label order plus n_orders seeded random orders on
    the given timing and return the best (order, cost)."""
    if n_orders < 1:
        raise ValueError("n_orders must be >= 1")
    orders = [sched.pulses]
    orders += [random_label_order(sched.nframes, seed + i) for i in range(n_orders)]
    costs = np.empty(len(orders))
    for i, order in enumerate(orders):
        costs[i] = design_cost(sched.with_pulses(order), thetas, w, c,
                               cond_cap=cond_cap)
    best = int(np.argmin(costs))
    if full_output:
        return orders[best], float(costs[best]), costs
    return orders[best], float(costs[best])
