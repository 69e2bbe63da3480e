"""Ratio-method estimation of the growth rate and exponent.

For counting series with s_n ~ a mu^n n^g the successive ratios behave as

    r_n = s_n / s_{n-1} = mu (1 + g/n + o(1/n)),

so plotting r_n against 1/n gives mu as the intercept and g*mu as the slope.
The estimators here refine that picture: linear intercepts
n r_n - (n-1) r_{n-1} converge to mu at O(1/n^2) for a pure power law,
(r_{n-1} - r_n) n (n-1) / mu converges to g, and quotients against a
reference series of known growth cancel most of the unknown subleading
behaviour.  All arithmetic runs at high precision since the differences
r_n - r_{n-1} lose several leading digits to cancellation.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .errors import DegenerateWindow, GammaPole, IndexMismatch
from .series import WORKING_DPS, EstimateRow, EstimateTable, Series, to_mpf


@dataclass(frozen=True)
class RatioRow:
    n: int
    r: mpf
    std_dev: mpf = mpf(0)


@dataclass
class RatioSequence:
    """Successive-coefficient ratios r_n, indexed by n."""

    rows: list

    def get(self, n: int) -> RatioRow:
        for row in self.rows:
            if row.n == n:
                return row
        raise KeyError(n)

    def indices(self) -> list:
        return [row.n for row in self.rows]

    def to_estimates(self) -> EstimateTable:
        return EstimateTable([EstimateRow(row.n, row.r, row.std_dev, 1) for row in self.rows])


@dataclass(frozen=True)
class ReferenceSeries:
    """A comparison series with known (trusted) growth rate and exponent."""

    series: Series
    mu_ref: float
    g_ref: float


@dataclass
class AsymptoticModel:
    """Fitted singularity parameters: s_n ~ a mu^n n^g, S(z) ~ A (1-mu z)^gamma."""

    mu: float
    g: float
    gamma: float
    a: float | None = None
    A: float | None = None
    delta: float | None = None

    @classmethod
    def from_mu_g(cls, mu, g, a=None) -> "AsymptoticModel":
        A = None
        if a is not None:
            A = float(a) * float(mpmath.gamma(float(g) + 1)) if _gamma_ok(g) else None
        return cls(mu=float(mu), g=float(g), gamma=-float(g) - 1, a=None if a is None else float(a), A=A)


def _gamma_ok(g) -> bool:
    gp1 = float(g) + 1
    return not (gp1 <= 0 and gp1 == int(gp1))


def ratios(s: Series) -> RatioSequence:
    """r_n = s_n / s_{n-1} over every representable index.

    Exact coefficients give exact ratios; approximate tail values carry a
    first-order propagated standard deviation.  Indices with a zero
    denominator are skipped.
    """
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for n in range(1, s.max_index + 1):
            prev, cur = s.value(n - 1), s.value(n)
            if prev == 0:
                continue
            r = to_mpf(cur) / to_mpf(prev)
            sp, sc = s.std_dev(n - 1), s.std_dev(n)
            std = mpf(0)
            if (sp or sc) and cur != 0:
                rel = (sc / to_mpf(cur)) ** 2 + (sp / to_mpf(prev)) ** 2
                std = abs(r) * mpmath.sqrt(rel)
            rows.append(RatioRow(n, r, std))
    return RatioSequence(rows)


def combined_ratios(s: Series, ratio_tail: EstimateTable | None = None) -> RatioSequence:
    """Exact ratios from the series head spliced with a predicted-ratio table.

    Predicted ratios aggregated ratio-first are preferred over ratios of
    aggregated coefficients, so when a ratio table is available it overrides
    the tail."""
    base = ratios(s)
    if ratio_tail is None:
        return base
    rows = [row for row in base.rows if row.n <= s.last_exact]
    for est in sorted(ratio_tail.rows, key=lambda r: r.n):
        if est.n > s.last_exact:
            rows.append(RatioRow(est.n, est.value, est.std_dev))
    return RatioSequence(rows)


def series_with_ratio_tail(s: Series, ratio_tail: EstimateTable) -> Series:
    """Rebuild approximate coefficient values from a predicted-ratio table.

    s_n = s_last * prod r_k for the indices past the exact head; relative
    standard deviations accumulate in quadrature."""
    with mpmath.workdps(WORKING_DPS):
        value = to_mpf(s.exact[-1])
        rel_var = mpf(0)
        tail = []
        expect = s.last_exact + 1
        for row in sorted(ratio_tail.rows, key=lambda r: r.n):
            if row.n <= s.last_exact:
                continue
            if row.n != expect + len(tail):
                raise IndexMismatch(f"ratio tail skips index {expect + len(tail)}")
            value = value * row.value
            if row.value != 0:
                rel_var += (row.std_dev / row.value) ** 2
            tail.append((value, abs(value) * mpmath.sqrt(rel_var)))
    return Series(s.name, list(s.exact), tail)


def _consecutive(r: RatioSequence):
    """Yield (prev_row, row) for consecutive indices."""
    by_n = {row.n: row for row in r.rows}
    for row in sorted(r.rows, key=lambda x: x.n):
        prev = by_n.get(row.n - 1)
        if prev is not None:
            yield prev, row


def linear_intercepts(r: RatioSequence) -> EstimateTable:
    """l_n = n r_n - (n-1) r_{n-1}; converges to mu up to O(1/n^Delta)."""
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for prev, cur in _consecutive(r):
            n = cur.n
            value = n * cur.r - (n - 1) * prev.r
            std = mpmath.sqrt((n * cur.std_dev) ** 2 + ((n - 1) * prev.std_dev) ** 2)
            rows.append(EstimateRow(n, value, std, 1))
    return EstimateTable(rows)


def gradient_estimator(r: RatioSequence, mu) -> EstimateTable:
    """g_n = (r_{n-1} - r_n) n (n-1) / mu; converges to the exponent g.

    (Since r_n = mu (1 + g/n), the forward difference r_n - r_{n-1} equals
    -g mu / (n(n-1)) to leading order; the sign here makes g_n -> g.)
    """
    if not mu > 0:
        raise ValueError("mu must be positive")
    mu = to_mpf(mu)
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for prev, cur in _consecutive(r):
            n = cur.n
            value = (prev.r - cur.r) * n * (n - 1) / mu
            std = n * (n - 1) / mu * mpmath.sqrt(cur.std_dev ** 2 + prev.std_dev ** 2)
            rows.append(EstimateRow(n, value, std, 1))
    return EstimateTable(rows)


def quotient_ratios(s: Series, ref: ReferenceSeries) -> RatioSequence:
    """Ratios of the coefficient-by-coefficient quotient q_n = s_n / ref_n.

    The quotient grows like lambda^n n^(g_s - g_ref) with
    lambda = mu_s / mu_ref, so its ratio sequence tends to lambda with slope
    lambda (g_s - g_ref) against 1/n.
    """
    lo = 1
    hi = min(s.max_index, ref.series.max_index)
    if hi - lo + 1 < 5:
        raise IndexMismatch(f"only {max(hi - lo + 1, 0)} overlapping indices, need >= 5")
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for n in range(lo, hi + 1):
            den_prev, den_cur = ref.series.value(n - 1), ref.series.value(n)
            num_prev, num_cur = s.value(n - 1), s.value(n)
            if 0 in (den_prev, den_cur, num_prev):
                continue
            q_prev = to_mpf(num_prev) / to_mpf(den_prev)
            q_cur = to_mpf(num_cur) / to_mpf(den_cur)
            r = q_cur / q_prev
            rel = mpf(0)
            for val, std in ((num_cur, s.std_dev(n)), (num_prev, s.std_dev(n - 1)),
                             (den_cur, ref.series.std_dev(n)), (den_prev, ref.series.std_dev(n - 1))):
                if std:
                    rel += (std / to_mpf(val)) ** 2
            rows.append(RatioRow(n, r, abs(r) * mpmath.sqrt(rel) if rel else mpf(0)))
    return RatioSequence(rows)


def lambda_estimator(r1: RatioSequence, r2: RatioSequence, g_d, g_p) -> EstimateTable:
    """lambda_n = n (r1(n) - r2(n)) / (g_p - g_d).

    r1 must be the quotient-ratio sequence against the reference with
    exponent g_d and r2 the one against the reference with exponent g_p;
    both tend to the same limit lambda with slopes lambda (g_s - g_ref), so
    the difference divided by (g_p - g_d) recovers lambda.
    """
    if g_d == g_p:
        raise ValueError("reference exponents must differ")
    denom = to_mpf(g_p) - to_mpf(g_d)
    shared = sorted(set(r1.indices()) & set(r2.indices()))
    if not shared:
        raise IndexMismatch("no shared indices")
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for n in shared:
            a, b = r1.get(n), r2.get(n)
            value = n * (a.r - b.r) / denom
            std = abs(n / denom) * mpmath.sqrt(a.std_dev ** 2 + b.std_dev ** 2)
            rows.append(EstimateRow(n, value, std, 1))
    return EstimateTable(rows)


def normalised_coefficients(s: Series, mu, g) -> EstimateTable:
    """v_n = s_n / (mu^n n^g); tends to the amplitude a when (mu, g) are right."""
    if not mu > 0:
        raise ValueError("mu must be positive")
    mu = to_mpf(mu)
    g = to_mpf(g)
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for n in range(1, s.max_index + 1):
            scale = mpmath.power(mu, n) * mpmath.power(n, g)
            value = to_mpf(s.value(n)) / scale
            std = s.std_dev(n) / scale
            rows.append(EstimateRow(n, value, std, 1))
    return EstimateTable(rows)


def amplitude_estimate(s: Series, mu, g, *, window: int = 15):
    """Extrapolate s_n / (mu^n n^g) against 1/n; returns (a, A).

    A = a * Gamma(g+1) converts the coefficient amplitude into the
    generating-function amplitude.  Raises GammaPole when g+1 is a
    non-positive integer.
    """
    if not _gamma_ok(g):
        raise GammaPole(f"Gamma(g+1) undefined for g = {g}")
    table = normalised_coefficients(s, mu, g)
    a, _slope = extrapolate_linear(table, window)
    with mpmath.workdps(WORKING_DPS):
        return a, a * mpmath.gamma(to_mpf(g) + 1)


def extrapolate_linear(seq: EstimateTable, window: int, abscissa_power: int = 1):
    """Least-squares line of value against 1/n^abscissa_power over the last
    `window` rows; the intercept estimates the n -> infinity limit."""
    rows = sorted(seq.rows, key=lambda r: r.n)[-window:]
    if len(rows) < 2:
        raise DegenerateWindow("need at least 2 rows")
    with mpmath.workdps(WORKING_DPS):
        xs = [mpf(1) / mpf(row.n) ** abscissa_power for row in rows]
        ys = [to_mpf(row.value) for row in rows]
        count = len(rows)
        sx = sum(xs)
        sy = sum(ys)
        sxx = sum(x * x for x in xs)
        sxy = sum(x * y for x, y in zip(xs, ys))
        det = count * sxx - sx * sx
        if det == 0:
            raise DegenerateWindow("no spread in the abscissa")
        slope = (count * sxy - sx * sy) / det
        intercept = (sy - slope * sx) / count
    return intercept, slope


def asymptotic_summary(s: Series, ratio_tail: EstimateTable | None = None, *,
                       window: int = 15, g_mode: str = "extrapolate",
                       g_abscissa_power: int = 1, g_points: int = 5) -> AsymptoticModel:
    """Run the standard pipeline: intercepts -> mu, gradient(mu) -> g, amplitude.

    mu comes from the linear intercepts extrapolated against 1/n^2 over the
    tail window (the fastest-converging estimator for a plain power law, and
    the abscissa in which the real data flattens).  g is read from the
    gradient estimator either by linear extrapolation ("extrapolate",
    abscissa exponent configurable since the true subleading exponent is
    unknown) or as the mean of the last g_points values ("trend", the honest
    choice when confluent corrections make the drift non-linear).  The
    amplitude extrapolates s_n / (mu^n n^g) over the same window, using
    coefficient values rebuilt from the ratio tail when one is supplied.
    """
    seq = combined_ratios(s, ratio_tail)
    mu_est, _ = extrapolate_linear(linear_intercepts(seq), window, abscissa_power=2)
    grad = gradient_estimator(seq, mu_est)
    if g_mode == "extrapolate":
        g_est, _ = extrapolate_linear(grad, window, abscissa_power=g_abscissa_power)
    elif g_mode == "trend":
        rows = sorted(grad.rows, key=lambda r: r.n)[-g_points:]
        if not rows:
            raise DegenerateWindow("no gradient rows")
        g_est = sum(r.value for r in rows) / len(rows)
    else:
        raise ValueError("g_mode must be 'extrapolate' or 'trend'")
    a = A = None
    if _gamma_ok(g_est):
        target = series_with_ratio_tail(s, ratio_tail) if ratio_tail is not None else s
        a, A = amplitude_estimate(target, mu_est, g_est,
                                  window=min(window, max(2, target.max_index - 1)))
    model = AsymptoticModel.from_mu_g(mu_est, g_est)
    model.a = None if a is None else float(a)
    model.A = None if A is None else float(A)
    return model
