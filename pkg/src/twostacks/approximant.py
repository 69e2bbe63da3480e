"""Series extension with differential approximants.

A differential approximant for a series F(z) = sum f_k z^k is a linear
inhomogeneous ODE with polynomial coefficients, written with the operator
D = z d/dz:

    Q_M(z) D^M F + ... + Q_1(z) D F + Q_0(z) F = P(z).

Taking the coefficient of z^k turns the relation into

    sum_i sum_j q_{i,j} (k-j)^i f_{k-j} = p_k          (p_k = 0 for k > deg P),

one linear equation per k in the polynomial coefficients.  Choosing the
degrees so that the unknown count exceeds the number of known series
coefficients by exactly one, and normalising one unknown to 1, gives a
square system solved exactly over the rationals.  The fitted relation
reproduces every known coefficient and, read as a recurrence in f_k,
extrapolates the series; a family of approximants with different degree
layouts yields an ensemble of predictions whose trimmed mean and standard
deviation we report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import EnsembleTooSmall, RecurrenceBreakdown, SingularFit
from .series import WORKING_DPS, EstimateRow, EstimateTable, Series, to_mpf

ORDERS = (2, 3, 4)
MIN_ENSEMBLE = 4


@dataclass(frozen=True)
class DAConfig:
    """Degree layout of one approximant.

    q_degrees[i] is the degree of Q_i (length order+1); p_degree is the
    degree of the inhomogeneous polynomial, -1 meaning P = 0.
    """

    order: int
    q_degrees: tuple
    p_degree: int = -1

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValueError(f"order must be one of {ORDERS}")
        if len(self.q_degrees) != self.order + 1:
            raise ValueError("need one degree per Q polynomial")
        if any(d < 0 for d in self.q_degrees) or self.p_degree < -1:
            raise ValueError("bad degrees")

    @property
    def unknowns(self) -> int:
        return sum(d + 1 for d in self.q_degrees) + self.p_degree + 1

    @property
    def coefficients_used(self) -> int:
        """Fits are exactly determined: one normalisation plus one equation
        per known coefficient."""
        return self.unknowns - 1


@dataclass
class DifferentialApproximant:
    """A fitted approximant: exact rational polynomials plus its fit range."""

    config: DAConfig
    q_polys: list       # q_polys[i][j] = Fraction coefficient of z^j in Q_i
    p_poly: list        # Fraction coefficients of P (empty when P = 0)
    coefficients: list  # the exact series values the fit used, f_0..f_fitted_upto
    fitted_upto: int

    def leading_factor(self, k: int) -> Fraction:
        """Coefficient of f_k in the recurrence: sum_i q_{i,0} k^i."""
        return sum(q[0] * k ** i for i, q in enumerate(self.q_polys))

    def relation_residual(self, k: int, values=None) -> Fraction:
        """LHS minus RHS of the ODE relation at z^k; zero for every k up to
        fitted_upto by construction."""
        values = self.coefficients if values is None else values
        acc = Fraction(0)
        for i, q in enumerate(self.q_polys):
            for j in range(min(k, len(q) - 1) + 1):
                acc += q[j] * (k - j) ** i * values[k - j]
        if k < len(self.p_poly):
            acc -= self.p_poly[k]
        return acc


def _bareiss_solve(matrix, rhs):
    """Exact solve of an integer system A x = b; returns Fractions or None.

    Fraction-free (Bareiss) elimination keeps intermediate entries integral,
    which is much faster than reducing Fractions at every step.  Columns with
    no usable pivot become free variables pinned to zero, so rank-deficient
    but consistent systems (the norm when the input series is holonomic and
    the degrees are generous) still produce a canonical exact solution; None
    means the system is inconsistent.
    """
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    m = [row[:] + [b] for row, b in zip(matrix, rhs)]
    prev = 1
    pivots = []  # (row, column)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot_row = next((i for i in range(r, rows) if m[i][c]), None)
        if pivot_row is None:
            continue  # free column; stays zero below r from here on
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pivot = m[r][c]
        for i in range(r + 1, rows):
            row = m[i]
            factor = row[c]
            for j in range(c + 1, cols + 1):
                row[j] = (row[j] * pivot - factor * m[r][j]) // prev
            row[c] = 0
        prev = pivot
        pivots.append((r, c))
        r += 1
    for i in range(r, rows):
        if m[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in reversed(pivots):
        acc = Fraction(m[i][cols])
        for j in range(c + 1, cols):
            if m[i][j]:
                acc -= m[i][j] * x[j]
        x[c] = acc / m[i][c]
    return x


def fit_da(series: Series, cfg: DAConfig) -> DifferentialApproximant:
    """Fit one approximant to the first cfg.coefficients_used coefficients.

    The constant term of Q_M is normalised to 1; if that system is singular
    the constant term of Q_{M-1} is tried instead.  Raises SingularFit when
    both normalisations fail.
    """
    used = cfg.coefficients_used
    if len(series.exact) < used:
        raise ValueError(f"config needs {used} coefficients, series has {len(series.exact)}")
    coeffs = series.exact[:used]
    n_max = used - 1
    for norm_i in (cfg.order, cfg.order - 1):
        da = _fit_normalised(coeffs, cfg, norm_i, n_max)
        if da is not None:
            return da
    raise SingularFit(f"{cfg}: singular under both normalisations")


def _fit_normalised(coeffs, cfg, norm_i, n_max):
    cols = [(i, j) for i in range(cfg.order + 1) for j in range(cfg.q_degrees[i] + 1)
            if (i, j) != (norm_i, 0)]
    matrix = []
    rhs = []
    for k in range(cfg.p_degree + 1, n_max + 1):
        row = []
        for i, j in cols:
            row.append((k - j) ** i * coeffs[k - j] if j <= k else 0)
        matrix.append(row)
        rhs.append(-(k ** norm_i) * coeffs[k])
    if len(matrix) != len(cols):
        raise ValueError("degree layout does not match the coefficient count")
    solution = _bareiss_solve(matrix, rhs)
    if solution is None:
        return None
    q_polys = [[Fraction(0)] * (d + 1) for d in cfg.q_degrees]
    q_polys[norm_i][0] = Fraction(1)
    for (i, j), value in zip(cols, solution):
        q_polys[i][j] = value
    p_poly = []
    for k in range(cfg.p_degree + 1):
        acc = Fraction(0)
        for i in range(cfg.order + 1):
            for j in range(min(k, cfg.q_degrees[i]) + 1):
                acc += q_polys[i][j] * (k - j) ** i * coeffs[k - j]
        p_poly.append(acc)
    return DifferentialApproximant(cfg, q_polys, p_poly, list(coeffs), fitted_upto=n_max)


def _extend(da: DifferentialApproximant, k: int):
    """Predict up to k terms past fitted_upto via the recurrence.

    Returns the list of predicted Fractions, stopping early (short list) if
    the leading recurrence factor vanishes.
    """
    values = [Fraction(c) for c in da.coefficients]
    out = []
    for idx in range(da.fitted_upto + 1, da.fitted_upto + 1 + k):
        lead = da.leading_factor(idx)
        if lead == 0:
            break
        acc = Fraction(da.p_poly[idx]) if idx < len(da.p_poly) else Fraction(0)
        for i, q in enumerate(da.q_polys):
            for j in range(1, len(q)):
                if q[j] and idx - j >= 0:
                    acc -= q[j] * (idx - j) ** i * values[idx - j]
        nxt = acc / lead
        values.append(nxt)
        out.append(nxt)
    return out


def predict_coefficients(da: DifferentialApproximant, k: int) -> list:
    """The k coefficients after fitted_upto, as exact rationals.

    Raises RecurrenceBreakdown if the leading factor vanishes before all k
    are produced.
    """
    preds = _extend(da, k)
    if len(preds) < k:
        raise RecurrenceBreakdown(da.fitted_upto + 1 + len(preds))
    return preds


def default_configs(n_coefficients: int, orders=ORDERS, p_degrees=range(-1, 5),
                    max_spread: int = 2) -> list:
    """Degree layouts using exactly n_coefficients series terms.

    Enumerates all Q-degree tuples whose degrees differ pairwise by at most
    max_spread, for each order and inhomogeneous degree.
    """
    configs = []
    for order in orders:
        for p_deg in p_degrees:
            total_deg = (n_coefficients + 1) - (p_deg + 1) - (order + 1)
            if total_deg < 0:
                continue
            for degs in _degree_tuples(total_deg, order + 1, max_spread):
                configs.append(DAConfig(order, degs, p_deg))
    return configs


def _degree_tuples(total, parts, spread):
    results = []

    def rec(prefix, remaining, slots):
        if slots == 0:
            if remaining == 0:
                results.append(tuple(prefix))
            return
        lo, hi = 0, remaining
        if prefix:
            lo = max(lo, max(prefix) - spread)
            hi = min(hi, min(prefix) + spread)
        for d in range(lo, hi + 1):
            rec(prefix + [d], remaining - d, slots - 1)

    rec([], total, parts)
    return results


def _surviving_predictions(series: Series, cfgs, k: int):
    """Fit every config and extend; returns a list of per-DA prediction lists
    (exact Fractions, possibly shorter than k after a recurrence breakdown)."""
    fits = 0
    predictions = []
    for cfg in sorted(cfgs, key=lambda c: (c.order, c.q_degrees, c.p_degree)):
        try:
            da = fit_da(series, cfg)
        except SingularFit:
            continue
        fits += 1
        predictions.append(_extend(da, k))
    if fits < MIN_ENSEMBLE:
        raise EnsembleTooSmall(f"only {fits} of {len(list(cfgs))} configs fitted")
    return predictions


def _trimmed(values, trim):
    """Trimmed mean and sample standard deviation of mpf values."""
    ordered = sorted(values)
    drop = -(-len(ordered) * trim // 1)  # ceil
    drop = int(drop)
    if drop:
        ordered = ordered[drop:-drop]
    count = len(ordered)
    mean = sum(ordered) / count
    if count > 1:
        var = sum((v - mean) ** 2 for v in ordered) / (count - 1)
        std = mpmath.sqrt(var)
    else:
        std = mpf(0)
    return mean, std, count


def predict_ensemble(series: Series, cfgs, k: int, trim: float = 0.10) -> EstimateTable:
    """Trimmed-mean coefficient predictions for the k indices past the series.

    Every surviving approximant contributes one prediction per index; the
    extreme ceil(trim * count) values on each side are discarded before the
    mean and standard deviation are taken.
    """
    if not 0 <= trim < 0.5:
        raise ValueError("trim must lie in [0, 0.5)")
    predictions = _surviving_predictions(series, cfgs, k)
    base = series.last_exact
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for offset in range(k):
            sample = [to_mpf(p[offset]) for p in predictions if len(p) > offset]
            if len(sample) < MIN_ENSEMBLE:
                raise EnsembleTooSmall(f"only {len(sample)} survivors at offset {offset + 1}")
            mean, std, count = _trimmed(sample, trim)
            rows.append(EstimateRow(base + 1 + offset, mean, std, count))
    return EstimateTable(rows)


def predict_ratios_ensemble(series: Series, cfgs, k: int, trim: float = 0.10) -> EstimateTable:
    """Trimmed-mean predictions of the ratios r_n = s_n / s_{n-1}.

    Each approximant's own coefficient chain is turned into ratios first and
    the ensemble statistics are taken over those ratio sequences; this is
    more accurate than forming ratios of the aggregated coefficients.
    """
    if not 0 <= trim < 0.5:
        raise ValueError("trim must lie in [0, 0.5)")
    predictions = _surviving_predictions(series, cfgs, k)
    base = series.last_exact
    last_exact = Fraction(series.exact[base])
    rows = []
    with mpmath.workdps(WORKING_DPS):
        for offset in range(k):
            sample = []
            for p in predictions:
                if len(p) <= offset:
                    continue
                prev = last_exact if offset == 0 else p[offset - 1]
                if prev == 0:
                    continue
                sample.append(to_mpf(p[offset] / prev))
            if len(sample) < MIN_ENSEMBLE:
                raise EnsembleTooSmall(f"only {len(sample)} survivors at offset {offset + 1}")
            mean, std, count = _trimmed(sample, trim)
            rows.append(EstimateRow(base + 1 + offset, mean, std, count))
    return EstimateTable(rows)
