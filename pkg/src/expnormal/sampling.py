"""Reproducible random variate generation for the exp-normal construction.

Every sampler consumes exactly one :class:`RandomStream`, a counter-mode
SplitMix64 source: the same (seed, stream_id) replays the same variates
bit-for-bit on any platform, and distinct stream_ids give statistically
independent streams (the generator family is splittable by design).

Stream consumption, per draw:

* ``sample_uniform``      - 1 counter step
* ``sample_exponential``  - 1 (inverse CDF, -ln u)
* ``sample_rademacher``   - 1
* ``sample_gamma``        - 2 per rejection round (Ahrens-Dieter GS)
* ``sample_expnormal_direct`` - 2 per polar round (second normal discarded)
* ``sample_expnormal_series`` - E_0, E_1..E_J in order, then one normal when
  the gaussian tail is enabled
* ``sample_root_factor``  - G_0, G_1..G_J, optional tail normal, then sign
* ``sample_root_product`` - k factors back to back

Batches fan out item i to ``stream.substream(i)`` and draw sequentially
within the item, so batch output is independent of worker count and equals
the scalar path replayed on each substream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels, analytic
from ._kernels import GOLDEN, MASK64, U64

__all__ = [
    "RandomStream",
    "DegenerateMeanStream",
    "TruncationConfig",
    "DEFAULT_CONFIG",
    "SampleBatch",
    "sample_uniform",
    "sample_exponential",
    "sample_gamma",
    "sample_rademacher",
    "sample_normal",
    "sample_expnormal_series",
    "sample_expnormal_direct",
    "sample_root_factor",
    "sample_root_product",
    "make_batch",
    "BATCH_DISTRIBUTIONS",
]


class RandomStream:
    """Seeded, reproducible uniform source; single-owner, not thread-shared.

    Parallel work should allocate disjoint ``stream_id`` values (or
    ``substream`` children) instead of sharing one stream.
    """

    degenerate = False

    def __init__(self, seed: int, stream_id: int = 0):
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        self._state = _kernels.stream_state(self.seed, self.stream_id)
        self._counter = 0

    def __repr__(self):
        return (
            f"{type(self).__name__}(seed={self.seed}, stream_id={self.stream_id}, "
            f"position={self._counter})"
        )

    @property
    def position(self) -> int:
        """Number of uniforms consumed so far."""
        return self._counter

    def uniform(self) -> float:
        """One uniform in the open interval (0,1); advances the counter by 1."""
        u = _kernels.mix64_py((self._state + (self._counter + 1) * int(GOLDEN)) & MASK64)
        self._counter += 1
        return ((u >> 11) + 0.5) * 2.0**-53

    def uniforms(self, n: int) -> np.ndarray:
        """n uniforms, identical to n successive ``uniform()`` calls."""
        if n < 0:
            raise ValueError("n must be >= 0")
        idx = np.arange(self._counter + 1, self._counter + n + 1, dtype=np.uint64)
        z = U64(self._state) + idx * GOLDEN
        z = (z ^ (z >> U64(30))) * U64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> U64(27))) * U64(0x94D049BB133111EB)
        z ^= z >> U64(31)
        self._counter += n
        return ((z >> U64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def substream(self, index: int) -> "RandomStream":
        """Independent child stream for fan-out; child i of a given stream is
        the same on every run regardless of how many children are taken."""
        if index < 0:
            raise ValueError("substream index must be >= 0")
        child = object.__new__(type(self))
        child.seed = self.seed
        child.stream_id = self.stream_id
        child._state = _kernels.substream_state_py(self._state, index)
        child._counter = 0
        return child


class DegenerateMeanStream(RandomStream):
    """Test-only stream: every sampler returns its distribution mean.

    Used to pin the deterministic constants of the series samplers (e.g. the
    centered ln|Z| series collapses to -(gamma+ln2)/2).  Not a random source;
    never use outside tests.
    """

    degenerate = True

    def uniform(self) -> float:
        self._counter += 1
        return 0.5


@dataclass(frozen=True)
class TruncationConfig:
    """Truncation policy for the infinite series samplers.

    J is the number of retained terms (j = 1..J).  tail_mode "drop" discards
    the centered tail; "gaussian" replaces it by a normal draw with the
    tail's exact variance.  form picks the arithmetic ("raw" follows the
    uncentered series with its partial log constants, "centered" the
    mean-zero rearrangement); both produce identical values from the same
    stream, up to rounding.
    """

    J: int = 10_000
    tail_mode: str = "gaussian"
    form: str = "centered"

    def __post_init__(self):
        if self.J < 1:
            raise ValueError("J must be >= 1")
        if self.tail_mode not in ("drop", "gaussian"):
            raise ValueError(f"unknown tail_mode {self.tail_mode!r}")
        if self.form not in ("raw", "centered"):
            raise ValueError(f"unknown form {self.form!r}")


DEFAULT_CONFIG = TruncationConfig()


@dataclass
class SampleBatch:
    """An ordered batch of draws plus the provenance needed to regenerate it."""

    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1:
            raise ValueError("values must be one-dimensional")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("batch contains non-finite values")
        self.meta.setdefault("n", int(self.values.size))
        if self.meta["n"] != self.values.size:
            raise ValueError("meta n disagrees with len(values)")

    @property
    def n(self) -> int:
        return int(self.values.size)


def _take_scalar(stream: RandomStream, kernel, *args):
    value, ctr = kernel(U64(stream._state), U64(stream._counter), *args)
    stream._counter = int(ctr)
    return float(value)


def sample_uniform(stream: RandomStream) -> float:
    """One uniform draw in (0,1); never exactly 0 or 1."""
    if stream.degenerate:
        stream._counter += 1
        return 0.5
    return stream.uniform()


def sample_exponential(stream: RandomStream) -> float:
    """Standard exponential via the inverse CDF -ln(u)."""
    if stream.degenerate:
        stream._counter += 1
        return 1.0
    return _take_scalar(stream, _kernels.draw_exponential)


def sample_gamma(stream: RandomStream, a: float) -> float:
    """Gamma(a, 1) for 0 < a <= 1 by Ahrens-Dieter GS rejection.

    Only reciprocal-integer and unit shapes arise in this package; when 1/a
    is an integer the transcendental-free fast path is used.  The number of
    uniforms consumed is 2 per rejection round.
    """
    if not 0.0 < a <= 1.0:
        raise ValueError(f"shape must be in (0, 1], got {a}")
    if stream.degenerate:
        return a
    k = round(1.0 / a)
    if k >= 1 and a == 1.0 / k:
        return _take_scalar(stream, _kernels.draw_gamma_inv_k, k)
    return _take_scalar(stream, _kernels.draw_gamma_real, float(a))


def sample_rademacher(stream: RandomStream) -> int:
    """+1 or -1, each with probability exactly 1/2."""
    if stream.degenerate:
        stream._counter += 1
        return 1
    return int(_take_scalar(stream, _kernels.draw_rademacher))


def sample_normal(stream: RandomStream) -> float:
    """Standard normal via the Marsaglia polar method."""
    if stream.degenerate:
        return 0.0
    return _take_scalar(stream, _kernels.draw_normal)


def _series_params(cfg: TruncationConfig, k: int = 1):
    """(tail_sd, raw_flag, c_main, c_adjust) for the series kernels."""
    tail_sd = 0.0
    if cfg.tail_mode == "gaussian":
        tail_sd = math.sqrt(analytic.tail_variance(cfg.J) / k)
    if cfg.form == "raw":
        c_main = analytic.CONSTANTS.half_log2 / k
        c_adjust = (
            analytic.series_constant_partial(cfg.J) - analytic.series_constant_limit()
        ) / k
        return tail_sd, True, c_main, c_adjust
    return tail_sd, False, analytic.CONSTANTS.mean_expnormal / k, 0.0


def sample_expnormal_series(stream: RandomStream, cfg: TruncationConfig = DEFAULT_CONFIG) -> float:
    """One draw of the J-truncated series for ln|Z|.

    Centered form: -(gamma+ln2)/2 - (E_0-1) - sum_{j=1}^J (E_j-1)/(2j+1),
    plus an independent N(0, tail_variance(J)) draw in gaussian tail mode.
    The raw form rearranges the same draws around the uncentered series and
    its partial log constants; both forms agree up to rounding.
    """
    if not isinstance(cfg, TruncationConfig):
        raise ValueError("cfg must be a TruncationConfig")
    if stream.degenerate:
        return analytic.CONSTANTS.mean_expnormal
    tail_sd, raw, c_main, c_adjust = _series_params(cfg, 1)
    return _take_scalar(
        stream, _kernels.draw_expnormal_series, cfg.J, tail_sd, raw, c_main, c_adjust
    )


def sample_expnormal_direct(stream: RandomStream) -> float:
    """Ground-truth draw of ln|Z| from an actual standard normal."""
    if stream.degenerate:
        return analytic.CONSTANTS.mean_expnormal
    return _take_scalar(stream, _kernels.draw_expnormal_direct)


def sample_root_factor(
    stream: RandomStream, k: int, cfg: TruncationConfig = DEFAULT_CONFIG
) -> float:
    """One signed draw of the truncated k-th root factor of Z.

    The magnitude is exp of the truncated Gamma(1/k,1) series (centered
    constant -(gamma+ln2)/(2k), gaussian tail variance tail_variance(J)/k);
    the sign is an independent Rademacher draw.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not isinstance(cfg, TruncationConfig):
        raise ValueError("cfg must be a TruncationConfig")
    if stream.degenerate:
        return math.exp(analytic.CONSTANTS.mean_expnormal / k)
    tail_sd, raw, c_main, c_adjust = _series_params(cfg, k)
    return _take_scalar(
        stream, _kernels.draw_root_factor, k, cfg.J, tail_sd, raw, c_main, c_adjust
    )


def sample_root_product(
    stream: RandomStream, k: int, cfg: TruncationConfig = DEFAULT_CONFIG
) -> float:
    """Product of k independent root factors; converges in law to N(0,1) as
    J grows."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not isinstance(cfg, TruncationConfig):
        raise ValueError("cfg must be a TruncationConfig")
    if stream.degenerate:
        return 1.0
    tail_sd, raw, c_main, c_adjust = _series_params(cfg, k)
    return _take_scalar(
        stream, _kernels.draw_root_product, k, cfg.J, tail_sd, raw, c_main, c_adjust
    )


BATCH_DISTRIBUTIONS = (
    "uniform",
    "exponential",
    "gamma",
    "rademacher",
    "expnormal-series",
    "expnormal-direct",
    "root-factor",
    "root-product",
)


def make_batch(
    distribution: str,
    n: int,
    seed: int,
    stream_id: int = 0,
    *,
    k: Optional[int] = None,
    shape: Optional[float] = None,
    cfg: Optional[TruncationConfig] = None,
) -> SampleBatch:
    """Generate n draws on a dedicated stream, with full provenance metadata.

    Item i is drawn from substream i of RandomStream(seed, stream_id); the
    mapping is fixed, so results do not depend on the number of worker
    threads used internally.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if distribution not in BATCH_DISTRIBUTIONS:
        raise ValueError(f"unknown distribution {distribution!r}")
    state = U64(RandomStream(seed, stream_id)._state)
    nn = int(n)
    meta = {
        "distribution": distribution,
        "seed": int(seed),
        "stream_id": int(stream_id),
        "n": nn,
    }
    if distribution == "uniform":
        values = _kernels.batch_uniform(state, nn)
    elif distribution == "exponential":
        values = _kernels.batch_exponential(state, nn)
    elif distribution == "rademacher":
        values = _kernels.batch_rademacher(state, nn)
    elif distribution == "gamma":
        if shape is None:
            raise ValueError("gamma batch needs shape")
        if not 0.0 < shape <= 1.0:
            raise ValueError(f"shape must be in (0, 1], got {shape}")
        meta["shape"] = float(shape)
        ik = round(1.0 / shape)
        if ik >= 1 and shape == 1.0 / ik:
            values = _kernels.batch_gamma_inv_k(state, nn, ik)
        else:
            values = _kernels.batch_gamma_real(state, nn, float(shape))
    elif distribution == "expnormal-direct":
        values = _kernels.batch_expnormal_direct(state, nn)
    else:
        cfg = cfg if cfg is not None else DEFAULT_CONFIG
        if not isinstance(cfg, TruncationConfig):
            raise ValueError("cfg must be a TruncationConfig")
        meta["cfg"] = {"J": cfg.J, "tail_mode": cfg.tail_mode, "form": cfg.form}
        if distribution == "expnormal-series":
            tail_sd, raw, c_main, c_adj = _series_params(cfg, 1)
            values = _kernels.batch_expnormal_series(
                state, nn, cfg.J, tail_sd, raw, c_main, c_adj
            )
        else:
            if k is None or k < 1:
                raise ValueError(f"{distribution} batch needs k >= 1")
            meta["k"] = int(k)
            tail_sd, raw, c_main, c_adj = _series_params(cfg, k)
            kernel = (
                _kernels.batch_root_factor
                if distribution == "root-factor"
                else _kernels.batch_root_product
            )
            values = kernel(state, nn, int(k), cfg.J, tail_sd, raw, c_main, c_adj)
    return SampleBatch(values=values, meta=meta)
