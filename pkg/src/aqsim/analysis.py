"""Closed-form worst-case bounds for the phased protocol, their limits, and
an empirical growth-trend classifier for phase series.

Everything here is double-precision arithmetic on the analytical formulas;
the simulator never feeds back into these functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

CONVERGENT = "CONVERGENT"
BOUNDED = "BOUNDED"
DIVERGENT = "DIVERGENT"

_EPSILON = 0.01  # fixed dead zone around ratio 1 for the classifier


class RecurrenceDomainError(ValueError):
    """The k-sequence left its domain (some k_j <= 1, so log k_j is not positive)."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ValueError(msg)


def _check_common(r: float, b: float, d: float) -> None:
    _require(0 < r < 1, f"need 0 < r < 1, got r={r}")
    _require(b >= 1, f"need b >= 1, got b={b}")
    _require(d >= 1, f"need d >= 1, got d={d}")


def _check_phase(i: int) -> None:
    _require(isinstance(i, int) and i >= 1, f"phase index must be an integer >= 1, got {i}")


# ---- one-way line ----------------------------------------------------------


def line_phase_time_bound(i: int, r: float, b: float, d: float) -> float:
    """Steps the i-th phase can need on a line: r^(i-1)*b + sum_{j<i} r^j*d."""
    _check_phase(i)
    _check_common(r, b, d)
    return r ** (i - 1) * b + d * (1 - r**i) / (1 - r)


def line_phase_time_limit(r: float, d: float) -> float:
    """Limit of line_phase_time_bound as i grows: d/(1-r)."""
    _require(0 < r < 1, f"need 0 < r < 1, got r={r}")
    _require(d >= 1, f"need d >= 1, got d={d}")
    return d / (1 - r)


def line_delivery_bound(r: float, d: float) -> float:
    """Worst packet system time on a line under the phased protocol: 2d/(1-r)."""
    _require(0 < r < 1, f"need 0 < r < 1, got r={r}")
    _require(d >= 1, f"need d >= 1, got d={d}")
    return 2 * d / (1 - r)


# ---- in-trees ---------------------------------------------------------------


def tree_phase_time_bound(i: int, r: float, b: float, d: float) -> float:
    """Steps the i-th phase can need on a tree: r^(i-1)*b*d^i."""
    _check_phase(i)
    _check_common(r, b, d)
    return r ** (i - 1) * b * d**i


def tree_phase_time_limit(r: float, b: float, d: float) -> float:
    """0, b*d, or infinity depending on the sign of r*d - 1."""
    _check_common(r, b, d)
    if r * d < 1:
        return 0.0
    if r * d == 1:
        return float(b * d)
    return math.inf


# ---- non-forward-looking inner schedulers -----------------------------------


def nonforward_k(i: int, r: float, b: float, d: float, log_base: float = 2.0) -> float:
    """The k-sequence for phases run by a non-forward-looking scheduler:
    k_1 = b*(d-1)/log(b), k_i = k_{i-1} * r*(d-1)/log(k_{i-1}).

    Raises RecurrenceDomainError once any k_j <= 1 (its logarithm stops being
    positive and the recurrence leaves its domain).
    """
    series = nonforward_k_series(i, r, b, d, log_base)
    return series[-1]


def nonforward_k_series(
    i_max: int, r: float, b: float, d: float, log_base: float = 2.0
) -> list[float]:
    """k_1..k_{i_max}; see nonforward_k."""
    _check_phase(i_max)
    _require(0 < r < 1, f"need 0 < r < 1, got r={r}")
    _require(b >= 2, f"need b >= 2 (log b must be positive), got b={b}")
    _require(d >= 2, f"need d >= 2, got d={d}")
    _require(log_base > 1, f"log base must exceed 1, got {log_base}")
    k = b * (d - 1) / math.log(b, log_base)
    series = [k]
    for j in range(2, i_max + 1):
        if k <= 1:
            raise RecurrenceDomainError(
                f"k_{j - 1} = {k:.6g} <= 1: log k_{j - 1} is not positive"
            )
        k = k * r * (d - 1) / math.log(k, log_base)
        series.append(k)
    return series


# ---- the c1*n + c2*d + c3 scheduler family -----------------------------------


def _check_theorem(r: float, c1: float, c2: float, c3: float) -> None:
    _require(0 < r < 1, f"need 0 < r < 1, got r={r}")
    _require(0 <= c1 <= 1, f"need 0 <= c1 <= 1, got c1={c1}")
    _require(c2 >= 0, f"need c2 >= 0, got c2={c2}")
    _require(c3 >= 0, f"need c3 >= 0, got c3={c3}")


def theorem_phase_time_bound(
    i: int, r: float, b: float, d: float, c1: float, c2: float, c3: float
) -> float:
    """Steps the i-th phase can need when static routing finishes within
    c1*n + c2*d + c3: r^(i-1)*c1^i*b + (c2*d+c3)*((r*c1)^i - 1)/(r*c1 - 1)."""
    _check_phase(i)
    _check_common(r, b, d)
    _check_theorem(r, c1, c2, c3)
    rc1 = r * c1
    return r ** (i - 1) * c1**i * b + (c2 * d + c3) * (rc1**i - 1) / (rc1 - 1)


def theorem_phase_time_limit(r: float, d: float, c1: float, c2: float, c3: float) -> float:
    """Limit of theorem_phase_time_bound: (c2*d + c3)/(1 - r*c1)."""
    _require(d >= 1, f"need d >= 1, got d={d}")
    _check_theorem(r, c1, c2, c3)
    return (c2 * d + c3) / (1 - r * c1)


def theorem_phase_packet_bound(
    i: int, r: float, b: float, d: float, c1: float, c2: float, c3: float
) -> float:
    """Packets the i-th phase can hold:
    (r*c1)^(i-1)*b + sum_{j=1}^{i-1} r^j*c1^(j-1)*(c2*d+c3); closed form uses
    the geometric sum. Satisfies time_bound(i) = c1*packet_bound(i) + c2*d + c3.
    """
    _check_phase(i)
    _check_common(r, b, d)
    _check_theorem(r, c1, c2, c3)
    rc1 = r * c1
    return rc1 ** (i - 1) * b + r * (c2 * d + c3) * (rc1 ** (i - 1) - 1) / (rc1 - 1)


def theorem_phase_packet_limit(r: float, d: float, c1: float, c2: float, c3: float) -> float:
    """Limit of theorem_phase_packet_bound: r*(c2*d + c3)/(1 - r*c1)."""
    _require(d >= 1, f"need d >= 1, got d={d}")
    _check_theorem(r, c1, c2, c3)
    return r * (c2 * d + c3) / (1 - r * c1)


# ---- growth classification ---------------------------------------------------


@dataclass(frozen=True)
class GrowthLabel:
    label: str  # CONVERGENT | BOUNDED | DIVERGENT
    ratio: float  # mean successive ratio over the trailing window


def classify_growth(series: Sequence[float], window: int = 5) -> GrowthLabel:
    """Label a per-phase series by its trailing trend.

    Mean successive ratio over the last `window` terms: DIVERGENT if the
    ratio is >= 1.01 and the trailing window's max exceeds the leading
    window's max; CONVERGENT if <= 0.99; otherwise BOUNDED. An empirical
    heuristic — it flags trends, it does not decide stability.
    """
    _require(window >= 3, f"window must be >= 3, got {window}")
    _require(
        len(series) >= 2 * window,
        f"series of length {len(series)} too short for window {window}",
    )
    _require(all(v >= 0 for v in series), "series values must be non-negative")

    tail = list(series[-window:])
    head = list(series[:window])
    ratios = []
    for prev, cur in zip(tail, tail[1:]):
        if prev > 0:
            ratios.append(cur / prev)
        elif cur == 0:
            ratios.append(1.0)
        else:
            ratios.append(math.inf)
    rho = sum(ratios) / len(ratios)

    if rho >= 1 + _EPSILON and max(tail) > max(head):
        return GrowthLabel(DIVERGENT, rho)
    if rho <= 1 - _EPSILON:
        return GrowthLabel(CONVERGENT, rho)
    return GrowthLabel(BOUNDED, rho)
