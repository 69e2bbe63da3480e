import csv
import pathlib

import pytest
from mpmath import mpf

import twostacks as ts

DATA = pathlib.Path(__file__).parent / "data"


def load_reference_table(name):
    """Read an 'n,value,std_dev[,extra]' reference CSV from tests/data."""
    rows = []
    with open(DATA / name, encoding="utf-8") as fh:
        for record in csv.reader(line for line in fh if not line.startswith("#")):
            if not record:
                continue
            rows.append((int(record[0]), mpf(record[1]), mpf(record[2])))
    return rows


@pytest.fixture(scope="session")
def golden():
    """The exact counts s_0..s_19 shipped with the package."""
    return ts.reference_counts()


@pytest.fixture(scope="session")
def fourth_order_configs(golden):
    return ts.default_configs(len(golden.exact), orders=(4,))


@pytest.fixture(scope="session")
def ratio_tail(golden, fourth_order_configs):
    """Predicted ratios r_20..r_49 from the full 20-term series (shared:
    the ensemble run costs a few seconds)."""
    return ts.predict_ratios_ensemble(golden, fourth_order_configs, k=30, trim=0.10)


@pytest.fixture(scope="session")
def coefficient_tail(golden, fourth_order_configs):
    """Predicted coefficients s_20..s_38 from the full 20-term series."""
    return ts.predict_ensemble(golden, fourth_order_configs, k=19, trim=0.10)
