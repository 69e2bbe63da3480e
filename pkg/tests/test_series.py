import pytest
from mpmath import mpf

from twostacks.errors import SeriesFormatError
from twostacks.series import (EstimateRow, EstimateTable, Series, read_estimates,
                              read_series, sci, to_mpf, write_estimates, write_series)


def test_series_file_round_trip(tmp_path):
    path = tmp_path / "s.txt"
    series = Series("x", [1, 1, 2, 6, 24])
    write_series(path, series, comments=["a comment"])
    back = read_series(path)
    assert back.exact == series.exact
    assert path.read_text().startswith("# a comment\n1\n")


def test_series_file_ignores_comments_and_blank_lines(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("# header\n\n1\n# middle\n7\n\n")
    assert read_series(path).exact == [1, 7]


def test_series_file_rejects_non_integer(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("1\n2.5\n")
    with pytest.raises(SeriesFormatError):
        read_series(path)


def test_series_file_rejects_empty(tmp_path):
    path = tmp_path / "empty.txt"
    path.write_text("# nothing here\n")
    with pytest.raises(SeriesFormatError):
        read_series(path)


def test_series_values_and_tail():
    s = Series("x", [1, 2, 4], approx_tail=[(mpf(8), mpf("0.5")), (mpf(16), mpf(1))])
    assert s.last_exact == 2
    assert s.max_index == 4
    assert s.value(2) == 4
    assert s.value(3) == mpf(8)
    assert s.std_dev(1) == 0
    assert s.std_dev(4) == 1
    with pytest.raises(IndexError):
        s.value(5)


def test_with_tail_requires_contiguous_indices():
    s = Series("x", [1, 2, 4])
    good = EstimateTable([EstimateRow(3, mpf(8), mpf(0), 5)])
    assert s.with_tail(good).value(3) == 8
    gap = EstimateTable([EstimateRow(4, mpf(16), mpf(0), 5)])
    with pytest.raises(SeriesFormatError):
        s.with_tail(gap)


def test_sci_formatting():
    assert sci(mpf(10.5), 4) == "1.050e+1"
    assert sci(0, 4) == "0.0"
    # 16 significant digits survive a round trip through the text form
    value = to_mpf("1.094901468298879e+01")
    assert sci(value) == "1.094901468298879e+1"


def test_estimates_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    table = EstimateTable([EstimateRow(20, to_mpf("4.764211695346e16"), to_mpf("9.207e6"), 204),
                           EstimateRow(21, to_mpf("5.24460896431e17"), to_mpf("9.83e8"), 204)])
    write_estimates(path, table, comments=["manifest: {}"])
    back, comments = read_estimates(path)
    assert comments == ["manifest: {}"]
    assert [r.n for r in back.rows] == [20, 21]
    assert abs(back.rows[0].value - table.rows[0].value) < mpf("1e3")
    assert back.rows[0].samples == 204


def test_estimates_header_required(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("20,1.0,0.1,5\n")
    with pytest.raises(SeriesFormatError):
        read_estimates(path)
