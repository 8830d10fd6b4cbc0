"""
The report module lays out metric reports as comparison tables and writes the per-frame errors as CSV.

Created on Feb 12, 2016

@author: Nicklas Boerjesson
"""
import pandas as pd

from pavo.evaluation.metrics import MetricReport

__author__ = 'Nicklas Borjesson'

#: The statistic columns of a table
statistic_columns = ["mean", "median", "rmse", "sd"]
total_label = "Total"


def report_table(_reports):
    """
    Builds a comparison table with one row per method and dataset and, per method, a "Total" row of the
    statistics over all its pooled per-frame errors.

    :param _reports: An iterable of (method, dataset, MetricReport)
    :return: A pandas DataFrame with the columns method, dataset, mean, median, rmse, sd and count
    """
    _rows = []
    _by_method = {}
    for _curr_method, _curr_dataset, _curr_report in _reports:
        _rows.append(dict(method=_curr_method, dataset=str(_curr_dataset), **_curr_report.as_dict()))
        _by_method.setdefault(_curr_method, []).append(_curr_report)
    for _curr_method, _curr_reports in _by_method.items():
        _rows.append(dict(method=_curr_method, dataset=total_label, **MetricReport.pooled(_curr_reports).as_dict()))
    _table = pd.DataFrame(_rows, columns=["method", "dataset"] + statistic_columns + ["count"])
    # Group the rows of each method, the total last
    _table["_order"] = [_curr == total_label for _curr in _table["dataset"]]
    _table["_method"] = pd.Categorical(_table["method"], categories=list(_by_method), ordered=True)
    return _table.sort_values(["_method", "_order"], kind="stable").drop(columns=["_order", "_method"]) \
        .reset_index(drop=True)


def format_table(_table, _title=None, _digits=4):
    """The table as aligned plain text"""
    _text = _table.to_string(index=False, float_format=lambda _value: ("{:." + str(_digits) + "f}").format(_value))
    return (_title + "\n" + _text if _title else _text) + "\n"


def error_frame(_result):
    """
    The per-frame errors of an EvaluationResult

    :return: (ATE DataFrame with N rows, RDE DataFrame with N - delta rows)
    """
    _ate = pd.DataFrame({"frame_index": range(len(_result.ate)), "timestamp": _result.timestamps,
                         "ate": _result.ate.errors})
    _rde = pd.DataFrame({"frame_index": range(len(_result.rde)), "timestamp": _result.timestamps[:len(_result.rde)],
                         "rde": _result.rde.errors})
    return _ate, _rde


def write_error_csv(_result, _ate_filename, _rde_filename):
    _ate, _rde = error_frame(_result)
    _ate.to_csv(_ate_filename, index=False, float_format="%.17g")
    _rde.to_csv(_rde_filename, index=False, float_format="%.17g")
