"""Compiled scalar and batch sampling kernels.

The random source is a counter-mode SplitMix64 (the SplittableRandom mixing
function of Steele, Lea & Flood): output i of a stream with root state s is
mix64(s + (i+1)*GOLDEN).  Pure 64-bit integer arithmetic makes the uniform
stream bit-identical across platforms and independent of how work is split
across threads, so parallel batch generation reproduces the scalar path
exactly.  Batch kernels give item i its own substream derived from the batch
stream state, then draw sequentially within the item; results therefore do
not depend on the number of worker threads.

Scalar kernels take (state, counter) and return (value, new_counter); the
Python-level samplers call the very same compiled routines, which keeps the
scalar API and the batch kernels bit-consistent.
"""

from __future__ import annotations

import warnings

import numpy as np

with warnings.catch_warnings():
    # the image's TBB is older than numba wants; the omp/workqueue layer is fine
    warnings.simplefilter("ignore")
    import numba
    from numba import njit, prange

warnings.filterwarnings("ignore", message=".*TBB.*", category=numba.NumbaWarning)

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)  # 2^64 / golden ratio, the SplitMix64 increment
SUBSTREAM_SALT = U64(0xD1B54A32D192ED03)
MASK64 = 0xFFFFFFFFFFFFFFFF
_TWO_NEG53 = 2.0**-53
_INV_E = 0.36787944117144233


def mix64_py(z: int) -> int:
    """Pure-Python SplitMix64 finalizer (reference for stream setup)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_state(seed: int, stream_id: int) -> int:
    """Root state for (seed, stream_id): two chained finalizer rounds."""
    s = mix64_py((seed & MASK64) + 0x9E3779B97F4A7C15)
    return mix64_py(s ^ mix64_py((stream_id & MASK64) + 0xD1B54A32D192ED03))


def substream_state_py(state: int, index: int) -> int:
    """Independent child stream for batch item ``index``."""
    return mix64_py((state + ((index + 1) & MASK64) * 0xD1B54A32D192ED03) & MASK64)


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
    return z ^ (z >> U64(31))


@njit(cache=True, inline="always")
def _uniform_at(state, i):
    # top 53 bits + 1/2, scaled to (0,1): never exactly 0 or 1
    z = _mix64(state + (i + U64(1)) * GOLDEN)
    return (np.float64(z >> U64(11)) + 0.5) * _TWO_NEG53


@njit(cache=True, inline="always")
def _substream(state, index):
    return _mix64(state + (U64(index) + U64(1)) * SUBSTREAM_SALT)


@njit(cache=True)
def draw_uniform(state, ctr):
    return _uniform_at(state, ctr), ctr + U64(1)


@njit(cache=True)
def draw_exponential(state, ctr):
    # inverse CDF: -ln(u); one uniform
    u = _uniform_at(state, ctr)
    return -np.log(u), ctr + U64(1)


@njit(cache=True)
def draw_rademacher(state, ctr):
    # one uniform; u < 1/2 has probability exactly 1/2 on the 53-bit lattice
    u = _uniform_at(state, ctr)
    if u < 0.5:
        return 1.0, ctr + U64(1)
    return -1.0, ctr + U64(1)


@njit(cache=True)
def draw_normal(state, ctr):
    # Marsaglia polar method; two uniforms per trial, the second component of
    # an accepted pair is discarded so draws stay a pure function of counters
    while True:
        u = 2.0 * _uniform_at(state, ctr) - 1.0
        v = 2.0 * _uniform_at(state, ctr + U64(1)) - 1.0
        ctr += U64(2)
        s = u * u + v * v
        if 0.0 < s < 1.0:
            return u * np.sqrt(-2.0 * np.log(s) / s), ctr


@njit(cache=True, inline="always")
def _ipow(base, k):
    # base**k by squaring for integer k >= 0
    r = 1.0
    b = base
    while k > 0:
        if k & 1:
            r *= b
        b *= b
        k >>= 1
    return r


@njit(cache=True)
def draw_gamma_inv_k(state, ctr, k):
    # Gamma(1/k, 1), integer k >= 1, by the Ahrens-Dieter GS rejection with
    # the exponential-power envelope on (0,1] + exp tail.  Since the shape is
    # 1/k, p**(1/a) = p**k and the tail test v <= x^{a-1} becomes
    # v^k x^{k-1} <= 1: integer powers, no transcendentals.  The accept test
    # against e^{-x} is squeezed with 1-x <= e^{-x} <= 1-x+x^2/2.
    a = 1.0 / k
    b = 1.0 + a * _INV_E
    while True:
        u = _uniform_at(state, ctr)
        v = _uniform_at(state, ctr + U64(1))
        ctr += U64(2)
        p = b * u
        if p <= 1.0:
            x = _ipow(p, k)
            if v <= 1.0 - x:
                return x, ctr
            if v > 1.0 - x + 0.5 * x * x:
                continue
            if v <= np.exp(-x):
                return x, ctr
        else:
            x = -np.log((b - p) / a)
            if k <= 16:
                if _ipow(v, k) * _ipow(x, k - 1) <= 1.0:
                    return x, ctr
            else:
                if k * np.log(v) + (k - 1.0) * np.log(x) <= 0.0:
                    return x, ctr


@njit(cache=True)
def draw_gamma_real(state, ctr, a):
    # Ahrens-Dieter GS for arbitrary shape 0 < a <= 1
    b = 1.0 + a * _INV_E
    inv_a = 1.0 / a
    while True:
        u = _uniform_at(state, ctr)
        v = _uniform_at(state, ctr + U64(1))
        ctr += U64(2)
        p = b * u
        if p <= 1.0:
            x = p**inv_a
            if v <= np.exp(-x):
                return x, ctr
        else:
            x = -np.log((b - p) / a)
            if v <= x ** (a - 1.0):
                return x, ctr


@njit(cache=True)
def draw_expnormal_direct(state, ctr):
    z, ctr = draw_normal(state, ctr)
    return np.log(np.abs(z)), ctr


@njit(cache=True)
def draw_expnormal_series(state, ctr, J, tail_sd, raw_form, c_main, c_adjust):
    """One draw of the J-truncated ln|Z| series.

    Consumption order: E_0, then E_1..E_J, then one normal if tail_sd > 0.
    Centered form: c_main - (E_0 - 1) - sum (E_j - 1)/(2j+1)  (c_main is the
    series mean).  Raw form: c_main - E_0 - sum [E_j/(2j+1) - log(1+1/j)/2]
    + c_adjust (the deterministic mean of the dropped raw tail); both forms
    are the same number up to rounding.
    """
    e0, ctr = draw_exponential(state, ctr)
    if raw_form:
        acc = c_main - e0
    else:
        acc = c_main - (e0 - 1.0)
    for j in range(1, J + 1):
        e, ctr = draw_exponential(state, ctr)
        w = 1.0 / (2.0 * j + 1.0)
        if raw_form:
            acc -= e * w - 0.5 * np.log1p(1.0 / j)
        else:
            acc -= (e - 1.0) * w
    if raw_form:
        acc += c_adjust
    if tail_sd > 0.0:
        z, ctr = draw_normal(state, ctr)
        acc += tail_sd * z
    return acc, ctr


@njit(cache=True)
def draw_root_factor(state, ctr, k, J, tail_sd, raw_form, c_main, c_adjust):
    """One signed draw of the J-truncated k-th root factor of Z.

    Consumption order: G_0, then G_1..G_J (each Gamma(1/k,1)), then one
    normal if tail_sd > 0, then the Rademacher sign.  The magnitude-log
    follows the same raw/centered arithmetic as the ln|Z| series with the
    per-term log coefficient 1/(2k) and block mean 1/k.
    """
    a = 1.0 / k
    g0, ctr = draw_gamma_inv_k(state, ctr, k)
    if raw_form:
        acc = c_main - g0
    else:
        acc = c_main - (g0 - a)
    for j in range(1, J + 1):
        g, ctr = draw_gamma_inv_k(state, ctr, k)
        w = 1.0 / (2.0 * j + 1.0)
        if raw_form:
            acc -= g * w - (0.5 / k) * np.log1p(1.0 / j)
        else:
            acc -= (g - a) * w
    if raw_form:
        acc += c_adjust
    if tail_sd > 0.0:
        z, ctr = draw_normal(state, ctr)
        acc += tail_sd * z
    sign, ctr = draw_rademacher(state, ctr)
    return sign * np.exp(acc), ctr


@njit(cache=True)
def draw_root_product(state, ctr, k, J, tail_sd, raw_form, c_main, c_adjust):
    # product of k factors drawn back to back from the same stream
    prod = 1.0
    for _ in range(k):
        w, ctr = draw_root_factor(state, ctr, k, J, tail_sd, raw_form, c_main, c_adjust)
        prod *= w
    return prod, ctr


# ---------------------------------------------------------------------------
# batch kernels: item i draws from substream(state, i), so output is
# independent of the parallel schedule
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def batch_uniform(state, n):
    out = np.empty(n)
    for i in prange(n):
        out[i] = _uniform_at(_substream(state, i), U64(0))
    return out


@njit(cache=True, parallel=True)
def batch_exponential(state, n):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_exponential(_substream(state, i), U64(0))
    return out


@njit(cache=True, parallel=True)
def batch_rademacher(state, n):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_rademacher(_substream(state, i), U64(0))
    return out


@njit(cache=True, parallel=True)
def batch_gamma_inv_k(state, n, k):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_gamma_inv_k(_substream(state, i), U64(0), k)
    return out


@njit(cache=True, parallel=True)
def batch_gamma_real(state, n, a):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_gamma_real(_substream(state, i), U64(0), a)
    return out


@njit(cache=True, parallel=True)
def batch_expnormal_direct(state, n):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_expnormal_direct(_substream(state, i), U64(0))
    return out


@njit(cache=True, parallel=True)
def batch_expnormal_series(state, n, J, tail_sd, raw_form, c_main, c_adjust):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_expnormal_series(
            _substream(state, i), U64(0), J, tail_sd, raw_form, c_main, c_adjust
        )
    return out


@njit(cache=True, parallel=True)
def batch_root_factor(state, n, k, J, tail_sd, raw_form, c_main, c_adjust):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_root_factor(
            _substream(state, i), U64(0), k, J, tail_sd, raw_form, c_main, c_adjust
        )
    return out


@njit(cache=True, parallel=True)
def batch_root_product(state, n, k, J, tail_sd, raw_form, c_main, c_adjust):
    out = np.empty(n)
    for i in prange(n):
        out[i], _ = draw_root_product(
            _substream(state, i), U64(0), k, J, tail_sd, raw_form, c_main, c_adjust
        )
    return out
