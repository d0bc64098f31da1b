"""Hot numeric kernels with an optional numba-compiled fast path.

Every kernel is written once as a plain numpy/math function. When numba is
available (and not disabled via the ``EXPGI_DISABLE_NUMBA=1`` environment
variable) the module-level names are the ``@njit``-compiled versions;
otherwise they are the pure-Python originals. Both paths execute the same
statements in the same order, so results are bit-identical.

The uncompiled originals stay importable as ``*_py`` for the benchmark
suite and for fallback-equivalence tests.
"""

import math
import os

import numpy as np

_FPMIN = 1e-300
_CF_EPS = 1e-14
_CF_MAX_ITER = 500


def _betacf_py(a, b, x):
    """Continued fraction for the incomplete beta function (modified Lentz).

    Returns nan if the fraction fails to converge within the iteration cap.
    """
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return math.nan


def _make_reg_inc_beta(betacf):
    def _reg_inc_beta(x, a, b):
        """Regularized incomplete beta I_x(a, b) for 0 <= x <= 1, a, b > 0.

        Uses the symmetry switch at x = (a+1)/(a+b+2) so the continued
        fraction always converges quickly. Returns nan on non-convergence.
        """
        if x <= 0.0:
            return 0.0
        if x >= 1.0:
            return 1.0
        ln_bt = (
            math.lgamma(a + b)
            - math.lgamma(a)
            - math.lgamma(b)
            + a * math.log(x)
            + b * math.log(1.0 - x)
        )
        bt = math.exp(ln_bt)
        if x < (a + 1.0) / (a + b + 2.0):
            return bt * betacf(a, b, x) / a
        return 1.0 - bt * betacf(b, a, 1.0 - x) / b

    return _reg_inc_beta


def _simulate_trial_py(n_total, means, policy_code, k, mu_prior, vtab, u_sel, u_out):
    """Allocate n_total participants one at a time and sample their outcomes.

    policy_code 0 = equal randomisation, 1 = constrained GI. ``vtab`` maps a
    pseudo-observation count to the normalized index value for the active
    discount (entries 0 and 1 unused). ``u_sel[t]`` drives arm selection and
    tie-breaks at step t; ``u_out[t]`` drives the outcome draw. Indexed
    access keeps stream consumption independent of the decision path.

    Returns (counts, real outcome sums) per arm.
    """
    n_arms = means.shape[0]
    counts = np.zeros(n_arms, dtype=np.int64)
    sums = np.zeros(n_arms, dtype=np.float64)
    totals = np.empty(n_arms, dtype=np.float64)  # outcome sums incl. prior
    gi = np.empty(n_arms, dtype=np.float64)
    prior_sum = 2.0 * mu_prior
    for m in range(n_arms):
        totals[m] = prior_sum
        gi[m] = mu_prior * vtab[2]

    for t in range(n_total):
        if policy_code == 0:
            arm = int(u_sel[t] * n_arms)
        else:
            c_min = counts[0]
            for m in range(1, n_arms):
                if counts[m] < c_min:
                    c_min = counts[m]
            if c_min < t // k:
                # catch-up: pick among the least-allocated arms
                n_cand = 0
                for m in range(n_arms):
                    if counts[m] == c_min:
                        n_cand += 1
                pick = int(u_sel[t] * n_cand)
                arm = 0
                seen = 0
                for m in range(n_arms):
                    if counts[m] == c_min:
                        if seen == pick:
                            arm = m
                            break
                        seen += 1
            else:
                g_max = gi[0]
                for m in range(1, n_arms):
                    if gi[m] > g_max:
                        g_max = gi[m]
                n_cand = 0
                for m in range(n_arms):
                    if gi[m] == g_max:
                        n_cand += 1
                pick = int(u_sel[t] * n_cand)
                arm = 0
                seen = 0
                for m in range(n_arms):
                    if gi[m] == g_max:
                        if seen == pick:
                            arm = m
                            break
                        seen += 1

        outcome = -means[arm] * math.log1p(-u_out[t])
        counts[arm] += 1
        sums[arm] += outcome
        if policy_code == 1:
            totals[arm] += outcome
            pseudo_n = counts[arm] + 2
            gi[arm] = (totals[arm] / pseudo_n) * vtab[pseudo_n]

    return counts, sums


def _oracle_continuation_py(lam, d, n0, x0, dx, npts, pad, zbar, shifts):
    """Continuation value of the root state in the retirement-option DP.

    The state grid is x = log(pseudo-sum), uniform with spacing dx, core
    length npts starting at the root x0, plus ``pad`` analytic cells above.
    ``zbar[k, j]`` is the j-th equal-probability stratum's conditional mean
    of the unit-scale predictive outcome at depth k (pseudo-count n0 + k);
    ``shifts[k, j]`` is the log-state increment log1p(zbar[k, j]). Beyond
    the core grid, and at the truncation depth, the value is approximated
    by the better of retiring and playing forever at the current predictive
    mean (the predictive-mean process is a martingale, so playing forever
    is worth exactly mean/(1-d)).

    Returns the expected value of pulling once at x0 and then continuing
    optimally, to be compared against retiring at rate lam forever.
    """
    depth = zbar.shape[0]
    n_strata = zbar.shape[1]
    total = npts + pad
    inv1md = 1.0 / (1.0 - d)
    w = 1.0 / n_strata

    ex = np.exp(x0 + dx * np.arange(total))
    ex_core = ex[:npts]

    m_term = 1.0 / (n0 + depth - 1.0)
    value = np.maximum(lam, ex * m_term) * inv1md
    nxt = np.empty(total, dtype=np.float64)
    root_cont = 0.0
    for kk in range(depth - 1, -1, -1):
        acc = np.zeros(npts, dtype=np.float64)
        for j in range(n_strata):
            off = shifts[kk, j] / dx
            i0 = int(off)
            fr = off - i0
            seg0 = value[i0 : i0 + npts]
            seg1 = value[i0 + 1 : i0 + npts + 1]
            acc += w * (ex_core * zbar[kk, j] + d * ((1.0 - fr) * seg0 + fr * seg1))
        if kk == 0:
            root_cont = acc[0]
            break
        m_here = 1.0 / (n0 + kk - 1.0)  # predictive mean per unit sum at depth kk
        nxt[:npts] = np.maximum(lam * inv1md, acc)
        nxt[npts:] = np.maximum(lam, ex[npts:] * m_here) * inv1md
        tmp = value
        value = nxt
        nxt = tmp
    return root_cont


_DISABLED = os.environ.get("EXPGI_DISABLE_NUMBA", "").strip().lower() in (
    "1",
    "true",
    "yes",
)

NUMBA_ENABLED = False
if not _DISABLED:
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        NUMBA_ENABLED = False

_reg_inc_beta_py = _make_reg_inc_beta(_betacf_py)

if NUMBA_ENABLED:
    _betacf = njit(cache=True)(_betacf_py)
    reg_inc_beta = njit(cache=True)(_make_reg_inc_beta(_betacf))
    simulate_trial = njit(cache=True)(_simulate_trial_py)
    oracle_continuation = njit(cache=True)(_oracle_continuation_py)
else:
    _betacf = _betacf_py
    reg_inc_beta = _reg_inc_beta_py
    simulate_trial = _simulate_trial_py
    oracle_continuation = _oracle_continuation_py
