"""Numba kernels for fingerprint simulation, Fisher information and the
schedule search.

The tissue ODE coefficients are piecewise constant between events (label tag
windows shifted by the bolus arrival time, and acquisition instants), so a
single exact exponential update advances the tissue magnetization across each
segment.  Event tables are built once per schedule; the label-window shift by
the per-voxel bolus arrival time is applied on the fly.
"""

import numpy as np
from numba import njit, prange

_FAR = 1e300

PULSE_LABEL = 0
PULSE_CONTROL = 1
PULSE_SILENCE = 2


@njit(cache=True)
def schedule_events(pulses, t_tag, t_delay, t_aq, t_adjust):
    """Static event tables for a schedule.

    Returns (label_edges, acq_times): alternating start/end edges of the
    label tag windows and the acquisition instants, both in seconds from scan
    start.  Zero-length windows are dropped.
    """
    nf = pulses.shape[0]
    lab = np.empty(2 * nf)
    acq = np.empty(nf)
    nlab = 0
    t = 0.0
    for i in range(nf):
        tag = t_tag[i]
        if tag > 0.0 and pulses[i] == PULSE_LABEL:
            lab[nlab] = t
            lab[nlab + 1] = t + tag
            nlab += 2
        acq[i] = t + tag + t_delay[i]
        t += tag + t_delay[i] + t_aq[i] + t_adjust[i]
    return lab[:nlab].copy(), acq


@njit(cache=True)
def simulate_core(lab_t, acq_t, theta, lam, alpha, t1_art, m0,
                  out, out_mtis, out_mart):
    """Simulate one fingerprint; fills out (samples), out_mtis (tissue
    magnetization just before each excitation) and out_mart (arterial
    magnetization per unit M0 at each acquisition)."""
    f = theta[0]
    cbva = theta[1]
    bat = theta[2]
    mtr = theta[3]
    t1 = theta[4]
    flip = theta[5]

    fprime = f / 6000.0
    b = 1.0 / t1 + fprime / lam + mtr
    art_label = 1.0 - 2.0 * alpha * np.exp(-bat / t1_art)
    a_relaxed = m0 * (1.0 / t1 + fprime)
    a_label = m0 * (1.0 / t1 + fprime * art_label)
    flip_rad = flip * np.pi / 180.0
    sinb = np.sin(flip_rad)
    cosb = np.cos(flip_rad)

    nlab = lab_t.shape[0]
    ilab = 0
    art_on = False
    m = m0
    t = 0.0
    for iaq in range(acq_t.shape[0]):
        ta = acq_t[iaq]
        while True:
            t_lab = lab_t[ilab] + bat if ilab < nlab else _FAR
            t_stop = t_lab if t_lab < ta else ta
            if t_stop > t:
                a = a_label if art_on else a_relaxed
                minf = a / b
                m = minf + (m - minf) * np.exp(-b * (t_stop - t))
                t = t_stop
            if t_lab > ta:
                break
            art_on = not art_on
            ilab += 1
        mart = art_label if art_on else 1.0
        out_mtis[iaq] = m
        out_mart[iaq] = mart
        out[iaq] = (cbva * m0 * mart + (1.0 - cbva) * m) * sinb
        m *= cosb
    return out


@njit(cache=True)
def simulate_batch(lab_t, acq_t, thetas, lam, alpha, t1_art, m0, out):
    """Simulate one fingerprint per row of thetas into out (n, nframes)."""
    nf = acq_t.shape[0]
    mtis = np.empty(nf)
    mart = np.empty(nf)
    for r in range(thetas.shape[0]):
        simulate_core(lab_t, acq_t, thetas[r], lam, alpha, t1_art, m0,
                      out[r], mtis, mart)
    return out


@njit(cache=True)
def jacobian_core(lab_t, acq_t, theta, steps, lam, alpha, t1_art, m0, jac):
    """Central finite differences of the samples w.r.t. all six parameters."""
    nf = acq_t.shape[0]
    sp = np.empty(nf)
    sm = np.empty(nf)
    mtis = np.empty(nf)
    mart = np.empty(nf)
    tp = theta.copy()
    for j in range(6):
        h = steps[j]
        tj = theta[j]
        tp[j] = tj + h
        simulate_core(lab_t, acq_t, tp, lam, alpha, t1_art, m0, sp, mtis, mart)
        tp[j] = tj - h
        simulate_core(lab_t, acq_t, tp, lam, alpha, t1_art, m0, sm, mtis, mart)
        tp[j] = tj
        inv2h = 0.5 / h
        for i in range(nf):
            jac[i, j] = (sp[i] - sm[i]) * inv2h
    return jac


@njit(cache=True)
def fd_steps(theta, rel_step, min_steps, steps):
    for j in range(6):
        h = rel_step * abs(theta[j])
        steps[j] = h if h > min_steps[j] else min_steps[j]
    return steps


@njit(cache=True)
def crlb_normalized_std(jac, theta, sigma, cond_cap, out):
    """Per-parameter sqrt(CRLB)/theta for one Jacobian.

    Fills out with +inf when the information matrix is singular or has a
    condition number above cond_cap.
    """
    g = np.zeros((6, 6))
    nf = jac.shape[0]
    for i in range(nf):
        for a in range(6):
            ja = jac[i, a]
            for b in range(a, 6):
                g[a, b] += ja * jac[i, b]
    for a in range(6):
        for b in range(a):
            g[a, b] = g[b, a]
    g /= sigma * sigma
    w, v = np.linalg.eigh(g)
    if w[0] <= 0.0 or w[5] > cond_cap * w[0]:
        for i in range(6):
            out[i] = np.inf
        return out
    for i in range(6):
        s = 0.0
        for k in range(6):
            s += v[i, k] * v[i, k] / w[k]
        out[i] = np.sqrt(s) / theta[i]
    return out


@njit(cache=True)
def cost_over_thetas(lab_t, acq_t, thetas, w2, sigma, cond_cap,
                     rel_step, min_steps, lam, alpha, t1_art, m0):
    """Design cost and per-parameter normalized stds (percent) over a theta
    set.  Cost = sum_i w2_i * mean_theta(100 * sqrt(CRLB_ii) / theta_i)."""
    n = thetas.shape[0]
    nf = acq_t.shape[0]
    jac = np.empty((nf, 6))
    steps = np.empty(6)
    nstd = np.empty(6)
    acc = np.zeros(6)
    for k in range(n):
        theta = thetas[k]
        fd_steps(theta, rel_step, min_steps, steps)
        jacobian_core(lab_t, acq_t, theta, steps, lam, alpha, t1_art, m0, jac)
        crlb_normalized_std(jac, theta, sigma, cond_cap, nstd)
        for i in range(6):
            acc[i] += nstd[i]
    stds = acc * (100.0 / n)
    cost = 0.0
    for i in range(6):
        cost += w2[i] * stds[i]
    return cost, stds


@njit(cache=True, parallel=True)
def search_costs(tag_matrix, pulses, t_delay, t_aq, t_adjust, thetas, w2,
                 sigma, cond_cap, rel_step, min_steps, lam, alpha, t1_art, m0):
    """Score every candidate labeling-duration row against a shared theta
    set.  Per-candidate results land in independent slots, so the output is
    identical for any thread count."""
    ncand = tag_matrix.shape[0]
    costs = np.empty(ncand)
    stds = np.empty((ncand, 6))
    for ci in prange(ncand):
        lab_t, acq_t = schedule_events(pulses, tag_matrix[ci],
                                       t_delay, t_aq, t_adjust)
        cost, s6 = cost_over_thetas(lab_t, acq_t, thetas, w2, sigma,
                                    cond_cap, rel_step, min_steps,
                                    lam, alpha, t1_art, m0)
        costs[ci] = cost
        for i in range(6):
            stds[ci, i] = s6[i]
    return costs, stds
