"""Vectorised numpy kernels. Reference path and fallback for the numba ones."""

import numpy as np

# Wichura (1988) AS241 PPND16 coefficients, ascending powers.
_A = np.array([
    3.3871328727963666080e0, 1.3314166789178437745e2,
    1.9715909503065514427e3, 1.3731693765509461125e4,
    4.5921953931549871457e4, 6.7265770927008700853e4,
    3.3430575583588128105e4, 2.5090809287301226727e3,
])
_B = np.array([
    1.0, 4.2313330701600911252e1,
    6.8718700749205790830e2, 5.3941960214247511077e3,
    2.1213794301586595867e4, 3.9307895800092710610e4,
    2.8729085735721942674e4, 5.2264952788528545610e3,
])
_C = np.array([
    1.42343711074968357734e0, 4.63033784615654529590e0,
    5.76949722146069140550e0, 3.64784832476320460504e0,
    1.27045825245236838258e0, 2.41780725177450611770e-1,
    2.27238449892691845833e-2, 7.74545014278341407640e-4,
])
_D = np.array([
    1.0, 2.05319162663775882187e0,
    1.67638483018380384940e0, 6.89767334985100004550e-1,
    1.48103976427480074590e-1, 1.51986665636164571966e-2,
    5.47593808499534494600e-4, 1.05075007164441684324e-9,
])
_E = np.array([
    6.65790464350110377720e0, 5.46378491116411436990e0,
    1.78482653991729133580e0, 2.96560571828504891230e-1,
    2.65321895265761230930e-2, 1.24266094738807843860e-3,
    2.71155556874348757815e-5, 2.01033439929228813265e-7,
])
_F = np.array([
    1.0, 5.99832206555887937690e-1,
    1.36929880922735805310e-1, 1.48753612908506148525e-2,
    7.86869131145613259100e-4, 1.84631831751005468180e-5,
    1.42151175831644588870e-7, 2.04426310338993978564e-15,
])


def _poly(coef, x):
    out = np.full_like(x, coef[-1])
    for c in coef[-2::-1]:
        out = out * x + c
    return out


def ndtri_upper(p):
    """Upper-tail standard normal quantile: z with P(Z > z) = p, elementwise."""
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    z = np.empty_like(p)

    central = np.abs(q) <= 0.425
    if central.any():
        qc = q[central]
        r = 0.180625 - qc * qc
        z[central] = qc * _poly(_A, r) / _poly(_B, r)

    tail = ~central
    if tail.any():
        qt = q[tail]
        # 1 - p is exact for p >= 0.5
        r = np.where(qt < 0.0, p[tail], 1.0 - p[tail])
        r = np.sqrt(-np.log(r))
        near = r <= 5.0
        zt = np.empty_like(r)
        rn = r[near] - 1.6
        zt[near] = _poly(_C, rn) / _poly(_D, rn)
        rf = r[~near] - 5.0
        zt[~near] = _poly(_E, rf) / _poly(_F, rf)
        z[tail] = np.where(qt < 0.0, -zt, zt)

    # lower quantile at p is minus the upper quantile
    return -z


def event_pairs(q, k, mu, sigma):
    """Gross losses at tail level ``q**k`` and log importance weights ``log(k q**(k-1))``."""
    if k == 1.0:
        return np.exp(mu + sigma * ndtri_upper(q)), np.zeros_like(q)
    log_q = np.log(q)
    losses = np.exp(mu + sigma * ndtri_upper(np.exp(k * log_q)))
    return losses, np.log(k) + (k - 1.0) * log_q


def year_chunk(counts, losses, log_weights, occ_att, occ_lim, agg_att, agg_lim):
    """Net annual loss per contract and trial weight for a block of trials.

    ``counts[t]`` consecutive events belong to trial ``t``. Returns
    ``(net, trial_weight)`` with ``net`` shaped ``(n_contracts, n_trials)``.
    """
    n = counts.shape[0]
    m = occ_att.shape[0]
    annual = np.zeros((m, n))
    log_tw = np.zeros(n)
    nonempty = np.flatnonzero(counts)
    if nonempty.size:
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))[nonempty]
        layered = np.clip(losses[None, :] - occ_att[:, None], 0.0, occ_lim[:, None])
        annual[:, nonempty] = np.add.reduceat(layered, starts, axis=1)
        log_tw[nonempty] = np.add.reduceat(log_weights, starts)
    net = np.clip(annual - agg_att[:, None], 0.0, agg_lim[:, None])
    return net, np.exp(log_tw)


def moment_sums(net, trial_weight):
    """Per-contract sums of S*W, S^2*W and (S*W)^2, plus sums of W and W^2."""
    sw = net * trial_weight
    sums = np.empty((net.shape[0], 3))
    sums[:, 0] = sw.sum(axis=1)
    sums[:, 1] = (net * sw).sum(axis=1)
    sums[:, 2] = (sw * sw).sum(axis=1)
    wsums = np.array([trial_weight.sum(), (trial_weight * trial_weight).sum()])
    return sums, wsums
