# -*- coding: utf-8 -*-
"""
Rate-distortion tables on disk and the comparison report built from two of them. A table is a
CSV file with the header `bpip,psnr_y,psnr_cb,psnr_cr` and one row per rate point.
"""

import os
import logging
import numpy as np
import pandas as pd

from typing import List, Sequence
from pybqe.data_models.curves import RDCurve
from pybqe.metrics.bjontegaard import bd_psnr, bd_rate
from pybqe.metrics.quality import ycbcr_psnr
from pybqe.constants import COMPONENTS

logger = logging.getLogger(__name__)

RD_COLUMNS = ("bpip", "psnr_y", "psnr_cb", "psnr_cr")
"""
The columns of a rate-distortion CSV file.
"""

REPORT_COMPONENTS = COMPONENTS + ("ycbcr",)
"""
The rows of a comparison report: the three components and their 6:1:1 aggregate.
"""


def read_rd_csv(path: str) -> pd.DataFrame:
    """
    Reads and validates a rate-distortion table. Rows are sorted by rate.

    :param path: the CSV file
    :return: the table
    :raises: :any:`ValueError` for missing columns, non-numeric values, non-positive or
             repeated rates
    """

    table = pd.read_csv(path)
    missing = [column for column in RD_COLUMNS if column not in table.columns]

    if len(missing) > 0:
        raise ValueError("Rate-distortion file `{path}` lacks columns {missing}.".format(path=path, missing=missing))

    table = table[list(RD_COLUMNS)].apply(pd.to_numeric, errors="coerce")

    if table.isnull().values.any():
        raise ValueError("Rate-distortion file `{}` contains non-numeric values.".format(path))

    table = table.sort_values("bpip").reset_index(drop=True)
    # validates the rate axis
    rd_curve(table, "y")
    return table


def write_rd_csv(table: pd.DataFrame, path: str) -> None:
    table[list(RD_COLUMNS)].to_csv(path, index=False)


def component_psnrs(table: pd.DataFrame, component: str) -> np.ndarray:
    """
    :param table: a rate-distortion table
    :param component: `y`, `cb`, `cr` or `ycbcr` for the 6:1:1 aggregate
    :return: the PSNR of every rate point
    """

    if component == "ycbcr":
        return np.array([
            ycbcr_psnr(row.psnr_y, row.psnr_cb, row.psnr_cr)
            for row in table.itertuples(index=False)
        ])

    elif component not in COMPONENTS:
        raise ValueError("Unknown component `{}`.".format(component))

    return table["psnr_" + component].to_numpy(dtype=np.float64)


def rd_curve(table: pd.DataFrame, component: str) -> RDCurve:
    return RDCurve(points=list(zip(table["bpip"].to_numpy(dtype=np.float64), component_psnrs(table, component))))


def enhanced_curve(anchor: RDCurve, enhanced_psnrs: Sequence[float]) -> RDCurve:
    """
    The curve of codec plus enhancement: the anchor rates, since enhancement spends no bits,
    with the PSNRs measured after enhancement.
    """

    return anchor.with_psnrs(enhanced_psnrs)


def delta_psnr_breakdown(anchor: pd.DataFrame, test: pd.DataFrame) -> pd.DataFrame:
    """
    The PSNR gain of the test over the anchor at every rate point.

    :param anchor: the anchor table
    :param test: the test table, with as many rate points
    :return: a table with the anchor rate and one gain column per report component
    :raises: :any:`ValueError` if the tables differ in length
    """

    if len(anchor) != len(test):
        raise ValueError("Per-rate gains need equally long tables ({a} vs {t} rows).".format(a=len(anchor), t=len(test)))

    breakdown = pd.DataFrame({"bpip": anchor["bpip"].to_numpy()})

    for component in REPORT_COMPONENTS:
        breakdown["delta_" + component] = component_psnrs(test, component) - component_psnrs(anchor, component)

    return breakdown


def compare_tables(anchor: pd.DataFrame, test: pd.DataFrame) -> pd.DataFrame:
    """
    The comparison report: per component the mean PSNR gain, the BD-rate and the BD-PSNR.
    The aggregate row takes the 6:1:1 mean of the component gains, and its Bjontegaard
    figures come from the aggregated PSNR curves.

    :param anchor: the anchor table
    :param test: the test table
    :return: one row per component of :any:`REPORT_COMPONENTS`
    """

    breakdown = delta_psnr_breakdown(anchor, test)
    gains = {component: float(breakdown["delta_" + component].mean()) for component in COMPONENTS}
    gains["ycbcr"] = ycbcr_psnr(gains["y"], gains["cb"], gains["cr"])
    rows = []

    for component in REPORT_COMPONENTS:
        anchor_curve = rd_curve(anchor, component)
        test_curve = rd_curve(test, component)
        rows.append({
            "component": component,
            "delta_psnr": gains[component],
            "bd_rate": bd_rate(anchor_curve, test_curve),
            "bd_psnr": bd_psnr(anchor_curve, test_curve)
        })

    return pd.DataFrame(rows, columns=["component", "delta_psnr", "bd_rate", "bd_psnr"])


def plot_rd_curves(
        anchor: pd.DataFrame,
        test: pd.DataFrame,
        output_dir: str,
        labels: Sequence[str] = ("anchor", "test")
) -> List[str]:
    """
    Draws one rate-PSNR chart per component.

    :param anchor: the anchor table
    :param test: the test table
    :param output_dir: the directory receiving `rd_<component>.png`
    :param labels: the legend entries of the two curves
    :return: the written files
    """

    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []

    for component in COMPONENTS:
        figure, axis = plt.subplots(figsize=(5, 4))

        for table, label, marker in zip((anchor, test), labels, ("o", "s")):
            axis.plot(table["bpip"], component_psnrs(table, component), marker=marker, label=label)

        axis.set_xlabel("bpip")
        axis.set_ylabel("PSNR {} (dB)".format(component.upper()))
        axis.grid(True, alpha=0.3)
        axis.legend()
        path = os.path.join(output_dir, "rd_{}.png".format(component))
        figure.savefig(path, dpi=100, bbox_inches="tight")
        plt.close(figure)
        written.append(path)
        logger.debug("Wrote %s.", path)

    return written


def format_report(report: pd.DataFrame, breakdown: pd.DataFrame) -> str:
    """
    A plain-text rendering of the comparison report and the per-rate gains.
    """

    return "\n\n".join([
        report.to_string(index=False, float_format=lambda value: "{:.4f}".format(value)),
        breakdown.to_string(index=False, float_format=lambda value: "{:.4f}".format(value))
    ])
