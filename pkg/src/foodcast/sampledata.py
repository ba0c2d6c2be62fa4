"""Synthetic FAOSTAT-format dataset used for demos and tests.

Country-level totals follow smooth upward trends with small seeded noise
and are split across items with fixed shares, so the aggregated series
resemble 1961-2017 national production statistics without reusing any
real data.
"""

from __future__ import annotations

import csv

import numpy as np

from .dataset import (CROP_ITEMS, DEFAULT_ITEMS, LIVE_ANIMAL_ITEMS, MEAT_ITEMS, MILK_ITEMS)

AREA = "Iran (Islamic Republic of)"
HEADER = ("Domain Code", "Domain", "Area Code", "Area", "Element Code", "Element", "Item Code", "Item",
          "Year Code", "Year", "Unit", "Value", "Flag")

_ELEMENTS = {
    "live_animals": ("5111", "Stocks", "Head", "QCL"),
    "animals_slaughtered": ("5320", "Producing Animals/Slaughtered", "Head", "QCL"),
    "livestock_yield": ("5417", "Yield", "hg/An", "QCL"),
    "agri_yield": ("5419", "Yield", "hg/ha", "QCL"),
    "agri_losses": ("5123", "Loss", "tonnes", "FBS"),
    "livestock_production": ("5510", "Production", "tonnes", "QCL"),
    "agri_production": ("5510", "Production", "tonnes", "QCL"),
}


def series_totals(first_year=1961, last_year=2017, seed=7) -> dict:
    """Country totals per series, keyed by series name."""
    rng = np.random.default_rng(seed)
    years = np.arange(first_year, last_year + 1)
    t = (years - first_year) / max(last_year - first_year, 1)

    def wobble(scale):
        # smoothed noise keeps the series trend-dominated
        raw = rng.normal(0.0, scale, size=len(years))
        return 1.0 + np.convolve(raw, np.ones(3) / 3.0, mode="same")

    live = 6.0e7 * (1.0 + 1.1 * t + 0.3 * t**2) * wobble(0.01)
    slaughtered = 1.5e7 * (1.0 + 1.6 * t + 0.5 * t**2) * wobble(0.01)
    l_yield = 1.2e5 * (1.0 + 0.9 * t) * wobble(0.008)
    l_prod = 2.6e7 * (slaughtered / 1.5e7) ** 0.8 * (l_yield / 1.2e5) ** 1.1 * (live / 6.0e7) ** 0.2 * wobble(0.006)
    a_yield = 9.0e4 * (1.0 + 1.3 * t + 0.4 * t**2) * wobble(0.012)
    a_prod = 4.0e6 * (a_yield / 9.0e4) ** 1.2 * (1.0 + 0.35 * t) * wobble(0.006)
    a_loss = 0.09 * a_prod * wobble(0.01)
    return {
        "years": years,
        "live_animals": live,
        "animals_slaughtered": slaughtered,
        "livestock_yield": l_yield,
        "agri_yield": a_yield,
        "agri_losses": a_loss,
        "livestock_production": l_prod,
        "agri_production": a_prod,
    }


def generate_rows(seed=7, first_year=1961, last_year=2017) -> list:
    totals = series_totals(first_year, last_year, seed)
    rng = np.random.default_rng(seed + 1)
    rows = []
    for series, (el_code, element, unit, domain) in _ELEMENTS.items():
        items = DEFAULT_ITEMS[series]
        shares = rng.dirichlet(np.full(len(items), 4.0))
        for k, item in enumerate(items):
            item_code = str(1000 + _item_index(item))
            for year, total in zip(totals["years"], totals[series]):
                value = round(float(total * shares[k]))
                rows.append([domain, "Production" if domain == "QCL" else "Food Balances", "102", AREA, el_code,
                             element, item_code, item, str(year), str(year), unit, str(value), "E"])
    return rows


def _item_index(item: str) -> int:
    catalogue = LIVE_ANIMAL_ITEMS + MEAT_ITEMS + MILK_ITEMS + CROP_ITEMS
    return catalogue.index(item)


def write_sample_csv(path, seed=7, first_year=1961, last_year=2017):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(generate_rows(seed, first_year, last_year))
