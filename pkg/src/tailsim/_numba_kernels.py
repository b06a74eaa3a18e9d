"""numba-compiled kernels; same contracts as :mod:`tailsim._numpy_kernels`."""

import math

import numpy as np
from numba import njit

from ._numpy_kernels import _A, _B, _C, _D, _E, _F


# module-level tuples are frozen into the compiled code as constants
_TA, _TB, _TC, _TD, _TE, _TF = (tuple(float(v) for v in c) for c in (_A, _B, _C, _D, _E, _F))


@njit(nogil=True, cache=True, inline="always")
def _poly8(c, x):
    return c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * (c[4] + x * (c[5] + x * (c[6] + x * c[7]))))))


@njit(nogil=True, cache=True)
def _ndtri_upper_scalar(p):
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return -q * _poly8(_TA, r) / _poly8(_TB, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        z = _poly8(_TC, r) / _poly8(_TD, r)
    else:
        r -= 5.0
        z = _poly8(_TE, r) / _poly8(_TF, r)
    return z if q < 0.0 else -z


@njit(nogil=True, cache=True)
def _ndtri_upper(p):
    out = np.empty(p.shape[0])
    for i in range(p.shape[0]):
        out[i] = _ndtri_upper_scalar(p[i])
    return out


def ndtri_upper(p):
    p = np.ascontiguousarray(p, dtype=np.float64)
    return _ndtri_upper(p.reshape(-1)).reshape(p.shape)


@njit(nogil=True, cache=True)
def event_pairs(q, k, mu, sigma):
    n = q.shape[0]
    losses = np.empty(n)
    log_w = np.empty(n)
    log_k = math.log(k)
    for i in range(n):
        if k == 1.0:
            losses[i] = math.exp(mu + sigma * _ndtri_upper_scalar(q[i]))
            log_w[i] = 0.0
        else:
            lq = math.log(q[i])
            losses[i] = math.exp(mu + sigma * _ndtri_upper_scalar(math.exp(k * lq)))
            log_w[i] = log_k + (k - 1.0) * lq
    return losses, log_w


@njit(nogil=True, cache=True)
def year_chunk(counts, losses, log_weights, occ_att, occ_lim, agg_att, agg_lim):
    n = counts.shape[0]
    m = occ_att.shape[0]
    net = np.empty((m, n))
    trial_weight = np.empty(n)
    acc = np.empty(m)
    e = 0
    for t in range(n):
        lw = 0.0
        for j in range(m):
            acc[j] = 0.0
        for _ in range(counts[t]):
            x = losses[e]
            lw += log_weights[e]
            for j in range(m):
                acc[j] += min(max(0.0, x - occ_att[j]), occ_lim[j])
            e += 1
        trial_weight[t] = math.exp(lw)
        for j in range(m):
            net[j, t] = min(max(0.0, acc[j] - agg_att[j]), agg_lim[j])
    return net, trial_weight


@njit(nogil=True, cache=True)
def _neumaier_add(s, c, x):
    t = s + x
    if abs(s) >= abs(x):
        c += (s - t) + x
    else:
        c += (x - t) + s
    return t, c


@njit(nogil=True, cache=True)
def moment_sums(net, trial_weight):
    m, n = net.shape
    sums = np.empty((m, 3))
    for j in range(m):
        s0 = s1 = s2 = 0.0
        c0 = c1 = c2 = 0.0
        for t in range(n):
            sw = net[j, t] * trial_weight[t]
            s0, c0 = _neumaier_add(s0, c0, sw)
            s1, c1 = _neumaier_add(s1, c1, net[j, t] * sw)
            s2, c2 = _neumaier_add(s2, c2, sw * sw)
        sums[j, 0] = s0 + c0
        sums[j, 1] = s1 + c1
        sums[j, 2] = s2 + c2
    w0 = w1 = 0.0
    d0 = d1 = 0.0
    for t in range(n):
        w = trial_weight[t]
        w0, d0 = _neumaier_add(w0, d0, w)
        w1, d1 = _neumaier_add(w1, d1, w * w)
    wsums = np.empty(2)
    wsums[0] = w0 + d0
    wsums[1] = w1 + d1
    return sums, wsums
