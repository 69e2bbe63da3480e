"""Coefficient series, estimate tables, and their file formats.

Two formats are shared by every tool in the package:

    series file     one exact coefficient per line, decimal integer,
                    line index = n starting at 0; '#' lines are comments.
    estimate CSV    header 'n,value,std_dev,samples'; values in scientific
                    notation with 16 significant digits; '#' lines (manifest
                    headers and notes) precede the CSV header.

Float work is done with mpmath at `WORKING_DPS` significant digits: ensemble
spreads reach relative 1e-10 and the ratio analyses subtract nearly equal
numbers, so double precision is too tight to be comfortable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
from mpmath import mpf

from .errors import SeriesFormatError

WORKING_DPS = 50


def to_mpf(x) -> mpf:
    """Convert int/Fraction/str/float to mpf at working precision."""
    with mpmath.workdps(WORKING_DPS):
        if isinstance(x, Fraction):
            return mpf(x.numerator) / mpf(x.denominator)
        return mpf(x)


def sci(x, digits: int = 16) -> str:
    """Render a number in scientific notation with the given significant digits."""
    with mpmath.workdps(max(digits + 5, 25)):
        # empty fixed-point interval forces exponential form
        return mpmath.nstr(to_mpf(x), digits, min_fixed=1, max_fixed=0, strip_zeros=False)


@dataclass
class Series:
    """A coefficient sequence: exact head plus an optional approximate tail.

    ``exact[n]`` is the coefficient of index n (int, or Fraction for
    synthetic test series).  ``approx_tail[j]`` is a (value, std_dev) pair
    for index ``len(exact) + j``.
    """

    name: str
    exact: list
    approx_tail: list | None = None

    @property
    def last_exact(self) -> int:
        return len(self.exact) - 1

    @property
    def max_index(self) -> int:
        tail = len(self.approx_tail) if self.approx_tail else 0
        return len(self.exact) - 1 + tail

    def value(self, n: int):
        """Exact value if known, else the approximate tail value."""
        if 0 <= n < len(self.exact):
            return self.exact[n]
        if self.approx_tail and n <= self.max_index:
            return self.approx_tail[n - len(self.exact)][0]
        raise IndexError(f"series {self.name!r} has no coefficient {n}")

    def std_dev(self, n: int):
        if 0 <= n < len(self.exact):
            return mpf(0)
        if self.approx_tail and n <= self.max_index:
            return self.approx_tail[n - len(self.exact)][1]
        raise IndexError(f"series {self.name!r} has no coefficient {n}")

    def with_tail(self, table: "EstimateTable") -> "Series":
        """Attach an estimate table (indices must continue the exact head)."""
        tail = []
        expect = len(self.exact)
        for row in sorted(table.rows, key=lambda r: r.n):
            if row.n < expect:
                continue
            if row.n != expect + len(tail):
                raise SeriesFormatError(
                    f"tail index {row.n} does not continue series at {expect + len(tail)}")
            tail.append((row.value, row.std_dev))
        return Series(self.name, list(self.exact), tail)


def read_series(path, name: str | None = None) -> Series:
    """Read an exact series file (one integer per line, '#' comments)."""
    exact = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                exact.append(int(line))
            except ValueError:
                raise SeriesFormatError(f"{path}:{lineno}: not an integer: {line!r}") from None
    if not exact:
        raise SeriesFormatError(f"{path}: no coefficients found")
    return Series(name or str(path), exact)


def write_series(path, series: Series, comments=()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for comment in comments:
            fh.write(f"# {comment}\n")
        for v in series.exact:
            if not isinstance(v, int):
                raise SeriesFormatError("series files hold exact integer coefficients only")
            fh.write(f"{v}\n")


@dataclass(frozen=True)
class EstimateRow:
    n: int
    value: mpf
    std_dev: mpf
    samples: int


@dataclass
class EstimateTable:
    """Rows of (index, value, std_dev, samples) estimates."""

    rows: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def row_for(self, n: int) -> EstimateRow:
        for row in self.rows:
            if row.n == n:
                return row
        raise KeyError(n)

    def indices(self) -> list:
        return [row.n for row in self.rows]


def write_estimates(path, table: EstimateTable, comments=()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for comment in comments:
            fh.write(f"# {comment}\n")
        fh.write("n,value,std_dev,samples\n")
        for row in table.rows:
            fh.write(f"{row.n},{sci(row.value)},{sci(row.std_dev)},{row.samples}\n")


def read_estimates(path) -> tuple:
    """Read an estimate CSV; returns (table, comment_lines)."""
    rows = []
    comments = []
    with mpmath.workdps(WORKING_DPS):
        with open(path, "r", encoding="utf-8") as fh:
            header_seen = False
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    comments.append(line[1:].strip())
                    continue
                if not header_seen:
                    if line.replace(" ", "") != "n,value,std_dev,samples":
                        raise SeriesFormatError(f"{path}:{lineno}: unexpected header {line!r}")
                    header_seen = True
                    continue
                parts = line.split(",")
                if len(parts) != 4:
                    raise SeriesFormatError(f"{path}:{lineno}: expected 4 columns")
                try:
                    rows.append(EstimateRow(int(parts[0]), mpf(parts[1]),
                                            mpf(parts[2]), int(parts[3])))
                except ValueError:
                    raise SeriesFormatError(f"{path}:{lineno}: bad row {line!r}") from None
    if not header_seen:
        raise SeriesFormatError(f"{path}: missing 'n,value,std_dev,samples' header")
    return EstimateTable(rows), comments
