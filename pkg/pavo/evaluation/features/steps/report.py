import os
import tempfile

import numpy as np
import pandas as pd
from behave import *
from nose.tools.trivial import ok_

from pavo.evaluation.metrics import MetricReport, evaluate
from pavo.evaluation.report import report_table, format_table, write_error_csv, statistic_columns, total_label
from pavo.evaluation.trajectory import Trajectory
from pavo.geometry.lie import PoseSE3
from pavo.testing.builders import random_pose

use_step_matcher("re")


def row_of(_table, _method, _dataset):
    _rows = _table[(_table["method"] == _method) & (_table["dataset"] == _dataset)]
    ok_(len(_rows) == 1, str(_table))
    return _rows.iloc[0]


@given("the ATE errors (?P<errors>.*) of method (?P<method>\\w+) on dataset (?P<dataset>\\w+)")
def step_impl(context, errors, method, dataset):
    """
    :type context: behave.runner.Context
    """
    if not hasattr(context, "reports"):
        context.reports = []
    context.reports.append((method, dataset, MetricReport([float(_curr) for _curr in errors.split(",")])))


@when("the comparison table is built")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    context.comparison_table = report_table(context.reports)


@then("the total of method (?P<method>\\w+) equals its dataset (?P<dataset>\\w+) row")
def step_impl(context, method, dataset):
    """
    :type context: behave.runner.Context
    """
    _total = row_of(context.comparison_table, method, total_label)
    _row = row_of(context.comparison_table, method, dataset)
    for _curr in statistic_columns + ["count"]:
        ok_(_total[_curr] == _row[_curr], _curr + ": " + str(_total[_curr]) + " and " + str(_row[_curr]))


@then("the total of method (?P<method>\\w+) has a mean of (?P<mean>.*), a median of (?P<median>.*) and an RMSE of "
      "(?P<rmse>.*) over (?P<count>\\d+) frames")
def step_impl(context, method, mean, median, rmse, count):
    """
    :type context: behave.runner.Context
    """
    _total = row_of(context.comparison_table, method, total_label)
    ok_(abs(_total["mean"] - float(mean)) < 1e-12 and abs(_total["median"] - float(median)) < 1e-12, str(_total))
    ok_(abs(_total["rmse"] - float(rmse)) < 1e-12 and _total["count"] == int(count), str(_total))


@then("the rows are (?P<rows>.*)")
def step_impl(context, rows):
    """
    :type context: behave.runner.Context
    """
    _expected = [_curr.strip().split(" ") for _curr in rows.split(";")]
    ok_([[_method, _dataset] for _method, _dataset in zip(context.comparison_table["method"], context.comparison_table["dataset"])] ==
        _expected, str(context.comparison_table))


@then("the formatted table is titled and lists every row")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    _text = format_table(context.comparison_table, "ATE [m]")
    _lines = _text.strip().split("\n")
    ok_(_lines[0] == "ATE [m]", _text)
    # The title, the header and a line per row
    ok_(len(_lines) == 2 + len(context.comparison_table), _text)
    ok_(_text.count(total_label) == 2 and "1.0000" in _text, _text)


@given("a ground truth of (?P<count>\\d+) poses and an estimate 1 cm off in every fifth frame")
def step_impl(context, count):
    """
    :type context: behave.runner.Context
    """
    _rng = np.random.default_rng(20160212)
    _poses = [random_pose(_rng, _max_translation=10.0) for _ in range(int(count))]
    _timestamps = np.arange(int(count)) * 0.1
    context.ground_truth = Trajectory(_timestamps, _poses)
    context.estimate = Trajectory(_timestamps, [PoseSE3(_curr.R, _curr.t + ([0.01, 0.0, 0.0] if _idx % 5 == 0 else 0.0))
                                                for _idx, _curr in enumerate(_poses)])


@when("it is evaluated over (?P<delta>\\d+) frames and the per-frame errors are written")
def step_impl(context, delta):
    """
    :type context: behave.runner.Context
    """
    context.result = evaluate(context.estimate, context.ground_truth, int(delta))
    context.directory = tempfile.mkdtemp(prefix="pavo_report_")
    context.ate_file = os.path.join(context.directory, "ate.csv")
    context.rde_file = os.path.join(context.directory, "rde.csv")
    write_error_csv(context.result, context.ate_file, context.rde_file)


@then("the ATE file has (?P<ate_rows>\\d+) rows and the RDE file has (?P<rde_rows>\\d+) rows")
def step_impl(context, ate_rows, rde_rows):
    """
    :type context: behave.runner.Context
    """
    context.ate_frame = pd.read_csv(context.ate_file)
    context.rde_frame = pd.read_csv(context.rde_file)
    ok_(len(context.ate_frame) == int(ate_rows) and len(context.rde_frame) == int(rde_rows))
    ok_(list(context.ate_frame.columns) == ["frame_index", "timestamp", "ate"], str(context.ate_frame.columns))
    ok_(list(context.rde_frame.columns) == ["frame_index", "timestamp", "rde"], str(context.rde_frame.columns))


@then("the files hold the errors of the evaluation")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    ok_(np.array_equal(context.ate_frame["ate"].values, context.result.ate.errors))
    ok_(np.array_equal(context.rde_frame["rde"].values, context.result.rde.errors))
    ok_(context.result.ate.max > 0.0 and context.result.rde.max > 0.0)
    ok_(list(context.ate_frame["frame_index"]) == list(range(len(context.result.ate))))
