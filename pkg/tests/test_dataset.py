import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foodcast.dataset import (
    ALL_SERIES,
    INPUT_SERIES,
    TARGET_SERIES,
    RawRecord,
    Scaler,
    SeriesTable,
    SupervisedSet,
    aggregate,
    build_features,
    fit_scaler,
    parse_csv,
    split_random,
)
from foodcast.exceptions import DataError

HEADER = "Area,Item,Element,Year,Value\n"


def write(tmp_path, body, header=HEADER, name="data.csv"):
    path = tmp_path / name
    path.write_text(header + body, encoding="utf-8")
    return path


# -- parse_csv ---------------------------------------------------------------

def test_parse_plain_row(tmp_path):
    recs = parse_csv(write(tmp_path, "Iran,Wheat,Production,1961,2500000\n"))
    assert recs == [RawRecord("Iran", "Wheat", "Production", 1961, 2500000.0)]


def test_parse_quoted_thousands(tmp_path):
    recs = parse_csv(write(tmp_path, 'Iran,Wheat,Production,1961,"1,234"\n'))
    assert recs[0].value == 1234.0


def test_parse_empty_value_reports_line(tmp_path):
    path = write(tmp_path, "Iran,Wheat,Production,1961,5\nIran,Wheat,Production,1962,\n")
    with pytest.raises(DataError, match=r":3: empty Value"):
        parse_csv(path)


def test_parse_non_numeric_value(tmp_path):
    with pytest.raises(DataError, match=r":2: non-numeric"):
        parse_csv(write(tmp_path, "Iran,Wheat,Production,1961,abc\n"))


def test_parse_missing_column_named(tmp_path):
    path = write(tmp_path, "Iran,Wheat,1961,5\n", header="Area,Item,Year,Value\n")
    with pytest.raises(DataError, match="Element"):
        parse_csv(path)


def test_parse_header_order_and_extra_columns(tmp_path):
    header = "Domain,Value,Year,Element,Item,Area,Flag\n"
    recs = parse_csv(write(tmp_path, "QCL,7,2000,Yield,Rice,Iran,E\n", header=header))
    assert recs == [RawRecord("Iran", "Rice", "Yield", 2000, 7.0)]


def test_parse_skips_blank_lines(tmp_path):
    recs = parse_csv(write(tmp_path, "Iran,Wheat,Production,1961,1\n\nIran,Wheat,Production,1962,2\n"))
    assert [r.year for r in recs] == [1961, 1962]


def test_parse_rejects_negative(tmp_path):
    with pytest.raises(DataError, match=":2:"):
        parse_csv(write(tmp_path, "Iran,Wheat,Production,1961,-1\n"))


def test_parse_bundled_sample(sample_table):
    assert set(ALL_SERIES) <= set(sample_table.series)
    assert sample_table.years[0] == 1961 and sample_table.years[-1] == 2017


# -- aggregate ---------------------------------------------------------------

def rec(item, element, year, value, area="Iran"):
    return RawRecord(area, item, element, year, value)


def test_aggregate_sums_items():
    table = aggregate([rec("A", "Production", 2000, 2), rec("B", "Production", 2000, 3)], {"Production": "p"})
    assert table.series["p"].tolist() == [5.0]


def test_aggregate_excludes_unlisted_item():
    recs = [rec("A", "Production", 2000, 2), rec("B", "Production", 2000, 3)]
    assert aggregate(recs, {"Production": "p"}, items=["A"]).series["p"].tolist() == [2.0]


def test_aggregate_per_series_items():
    recs = [rec("Meat", "Production", 2000, 2), rec("Wheat", "Production", 2000, 3)]
    table = aggregate(recs, {"Production": ["live", "agri"]}, items={"live": ["Meat"], "agri": ["Wheat"]})
    assert table.series["live"].tolist() == [2.0] and table.series["agri"].tolist() == [3.0]


def test_aggregate_area_filter():
    recs = [rec("A", "Production", 2000, 2), rec("A", "Production", 2000, 9, area="Iraq")]
    assert aggregate(recs, {"Production": "p"}, area="Iran").series["p"].tolist() == [2.0]


def test_aggregate_gap_error_names_series_and_year():
    recs = [rec("A", "Production", y, 1) for y in (2000, 2002)]
    with pytest.raises(DataError, match=r"p .*2001"):
        aggregate(recs, {"Production": "p"})


def test_aggregate_gap_interpolate():
    recs = [rec("A", "Production", 2000, 1), rec("A", "Production", 2002, 3)]
    table = aggregate(recs, {"Production": "p"}, gap_policy="interpolate")
    assert table.years.tolist() == [2000, 2001, 2002]
    assert table.series["p"].tolist() == [1.0, 2.0, 3.0]


def test_aggregate_interpolate_rejects_double_gap():
    recs = [rec("A", "Production", 2000, 1), rec("A", "Production", 2003, 3)]
    with pytest.raises(DataError):
        aggregate(recs, {"Production": "p"}, gap_policy="interpolate")


def test_aggregate_empty_is_error():
    with pytest.raises(DataError):
        aggregate([rec("A", "Yield", 2000, 1)], {"Production": "p"})


def test_aggregate_common_year_span():
    recs = [rec("A", "Production", y, 1) for y in range(2000, 2005)]
    recs += [rec("A", "Yield", y, 1) for y in range(2002, 2008)]
    table = aggregate(recs, {"Production": "p", "Yield": "y"})
    assert table.years.tolist() == [2002, 2003, 2004]


def test_series_table_roundtrip(tmp_path, sample_table):
    path = tmp_path / "t.csv"
    sample_table.to_csv(path)
    back = SeriesTable.from_csv(path)
    assert back.years.tolist() == sample_table.years.tolist()
    for k, v in sample_table.series.items():
        assert np.array_equal(back.series[k], v)


# -- build_features ----------------------------------------------------------

def test_autoregressive_single_window():
    table = SeriesTable(range(2000, 2006), {"s": [1, 2, 3, 4, 5, 6]})
    sset = build_features(table, "autoregressive", lags=5, target="s")
    assert sset.X.tolist() == [[1, 2, 3, 4, 5]] and sset.Y.tolist() == [[6]]
    assert sset.years.tolist() == [2005]


def test_autoregressive_57_years():
    table = SeriesTable(range(1961, 2018), {"s": np.arange(57.0)})
    sset = build_features(table, "autoregressive", lags=5, target="s")
    assert len(sset) == 52 and sset.years[0] == 1966


def test_autoregressive_too_short():
    table = SeriesTable(range(2000, 2005), {"s": [1, 2, 3, 4, 5]})
    with pytest.raises(DataError):
        build_features(table, "autoregressive", lags=5, target="s")


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 40), st.integers(1, 8))
def test_autoregressive_windows_are_consecutive(n, lags):
    if n < lags + 1:
        return
    values = np.arange(n, dtype=float) * 3.0
    sset = build_features(SeriesTable(range(1900, 1900 + n), {"s": values}), "autoregressive", lags, "s")
    assert len(sset) == n - lags
    for year, x, y in zip(sset.years, sset.X, sset.Y[:, 0]):
        i = year - 1900
        assert y == values[i] and x.tolist() == values[i - lags:i].tolist()


def test_exogenous_toy_table():
    table = SeriesTable([2000, 2001], {s: [1.0, 2.0] for s in ALL_SERIES})
    sset = build_features(table, "exogenous")
    assert sset.X.shape == (2, 5) and sset.Y.shape == (2, 2)
    assert sset.feature_names == list(INPUT_SERIES) and sset.target_names == list(TARGET_SERIES)


def test_exogenous_missing_series():
    with pytest.raises(DataError):
        build_features(SeriesTable([2000], {"live_animals": [1.0]}), "exogenous")


# -- split_random ------------------------------------------------------------

def toy_set(n):
    return SupervisedSet(np.arange(2000, 2000 + n), np.arange(n, dtype=float)[:, None], np.arange(n, dtype=float),
                         ["x"], ["y"])


def test_split_sizes():
    train, test = split_random(toy_set(10), 0.7, seed=3)
    assert (len(train), len(test)) == (7, 3)


def test_split_deterministic():
    a = split_random(toy_set(30), 0.7, seed=11)
    b = split_random(toy_set(30), 0.7, seed=11)
    assert a[0].years.tolist() == b[0].years.tolist() and a[1].years.tolist() == b[1].years.tolist()


def test_split_union_and_disjoint_100_trials():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 80))
        ratio = float(rng.uniform(0.3, 0.9))
        try:
            train, test = split_random(toy_set(n), ratio, seed=int(rng.integers(0, 10**6)))
        except DataError:
            continue
        a, b = set(train.years.tolist()), set(test.years.tolist())
        assert not a & b and a | b == set(range(2000, 2000 + n))
        assert np.all(np.diff(train.years) > 0) and np.all(np.diff(test.years) > 0)


def test_split_degenerate():
    with pytest.raises(DataError):
        split_random(toy_set(1), 0.7)
    with pytest.raises(ValueError):
        split_random(toy_set(10), 1.0)


# -- scaler ------------------------------------------------------------------

def test_scaler_min_max():
    assert Scaler().fit_transform(np.array([[0.0], [5.0], [10.0]])).ravel().tolist() == [0.0, 0.5, 1.0]


def test_scaler_constant_column():
    assert Scaler().fit_transform(np.array([[7.0], [7.0]])).ravel().tolist() == [0.5, 0.5]
    s = Scaler().fit(np.array([[7.0], [7.0]]))
    assert s.inverse_transform(np.array([[0.5]])).item() == 7.0


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.floats(-1e6, 1e6), min_size=3, max_size=3), min_size=2, max_size=20),
       st.booleans())
def test_scaler_roundtrip(rows, shared):
    M = np.array(rows)
    s = Scaler(shared=shared).fit(M)
    back = s.inverse_transform(s.transform(M))
    assert np.allclose(back, M, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max()))


def test_scaler_rejects_non_finite():
    with pytest.raises(ValueError):
        Scaler().fit(np.array([[1.0], [np.nan]]))


def test_scaler_train_only_statistics(sample_table):
    sset = build_features(sample_table, "autoregressive", 5, "agri_production")
    train, test = split_random(sset, 0.7, seed=0)
    xs, ys = fit_scaler(train.X, train.Y, shared=True)
    assert xs.data_min_[0] == min(train.X.min(), train.Y.min())
    assert xs.data_max_[0] == max(train.X.max(), train.Y.max())
    lo, span = xs.data_min_[0], xs.data_max_[0] - xs.data_min_[0]
    assert np.array_equal(xs.transform(test.X), (test.X - lo) / span)


def test_scaler_test_values_may_leave_unit_interval():
    xs, _ = fit_scaler(np.array([[0.0], [1.0]]), np.array([0.0, 1.0]))
    assert xs.transform(np.array([[2.0]])).item() == 2.0


def test_fit_scaler_separate_columns():
    X = np.array([[0.0, 10.0], [1.0, 30.0]])
    xs, ys = fit_scaler(X, np.array([5.0, 6.0]))
    assert xs.transform(X).tolist() == [[0.0, 0.0], [1.0, 1.0]]
    assert ys.transform(np.array([[5.5]])).item() == 0.5


def test_scaler_dict_roundtrip():
    s = Scaler(shared=True).fit(np.array([[1.0, 4.0]]))
    t = Scaler.from_dict(s.to_dict())
    assert t.transform(np.array([[2.5]])).item() == s.transform(np.array([[2.5]])).item() == 0.5


def test_pipeline_determinism(sample_table):
    def run():
        sset = build_features(sample_table, "autoregressive", 5, "livestock_production")
        return sset, split_random(sset, 0.7, seed=4)
    (a, (a1, a2)), (b, (b1, b2)) = run(), run()
    for x, y in ((a, b), (a1, b1), (a2, b2)):
        assert x.X.tobytes() == y.X.tobytes() and x.Y.tobytes() == y.Y.tobytes()
