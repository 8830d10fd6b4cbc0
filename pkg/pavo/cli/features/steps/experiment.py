import os

import numpy as np
import pandas as pd
from behave import *
from nose.tools.trivial import ok_

from pavo.cli.commands import cmd_experiment, cmd_evaluate, median_ate_rmse_ratio

use_step_matcher("re")


def seed_row(context, _seed):
    _rows = context.per_seed[context.per_seed["seed"] == int(_seed)]
    ok_(len(_rows) == 1, str(context.per_seed))
    return _rows.iloc[0]


@when("the experiment is run with (?P<workers>\\d+) workers?")
def step_impl(context, workers):
    """
    :type context: behave.runner.Context
    """
    context.paths["experiment"] = os.path.join(context.work_directory, "experiment")
    context.summary, context.per_seed = cmd_experiment(context.paths["config"], context.paths["experiment"],
                                                       _workers=int(workers))


@then("the experiment directory holds summary.txt and per_seed.csv")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    for _curr in ["summary.txt", "per_seed.csv"]:
        ok_(os.path.isfile(os.path.join(context.paths["experiment"], _curr)), _curr)
    _written = pd.read_csv(os.path.join(context.paths["experiment"], "per_seed.csv"))
    ok_(list(_written["seed"]) == list(context.per_seed["seed"]), str(_written))


@then("seed (?P<seed>\\d+) completed in both modes")
def step_impl(context, seed):
    """
    :type context: behave.runner.Context
    """
    _row = seed_row(context, seed)
    ok_(bool(_row["completed"]) and _row["error"] == "", str(_row))
    for _curr in ["normal", "baseline"]:
        ok_(np.isfinite(_row[_curr + "_ate_rmse"]) and np.isfinite(_row[_curr + "_rde_mean"]), str(_row))
        ok_(_row[_curr + "_keyframes"] >= 2, str(_row))


@then("the normal ATE RMSE of seed (?P<seed>\\d+) is the evaluation of its estimate")
def step_impl(context, seed):
    """
    :type context: behave.runner.Context
    """
    _directory = os.path.join(context.paths["experiment"], "seed_" + seed)
    _result = cmd_evaluate(os.path.join(_directory, "est_normal.txt"),
                           os.path.join(_directory, "dataset", "traj_gt.txt"), None, 5)
    _row = seed_row(context, seed)
    ok_(_row["normal_ate_rmse"] == _result.ate.rmse, str((_row["normal_ate_rmse"], _result.ate.rmse)))


@then("seed (?P<seed>\\d+) is flagged as failed in per_seed.csv and summary.txt")
def step_impl(context, seed):
    """
    :type context: behave.runner.Context
    """
    _row = seed_row(context, seed)
    ok_(not bool(_row["completed"]) and _row["error"].startswith("TrackingLost"), str(_row))
    _written = pd.read_csv(os.path.join(context.paths["experiment"], "per_seed.csv"))
    ok_(not _written["completed"].iloc[0], str(_written))
    with open(os.path.join(context.paths["experiment"], "summary.txt"), "r", encoding="utf-8") as _file:
        _summary = _file.read()
    ok_("FAILED seed " + seed + ": TrackingLost" in _summary, _summary)


@then("the median ATE RMSE ratio of normal to baseline is at most (?P<limit>.*)")
def step_impl(context, limit):
    """
    :type context: behave.runner.Context
    """
    _ratio = median_ate_rmse_ratio(context.per_seed)
    ok_(_ratio <= float(limit), "Median ratio " + str(_ratio) + "\n" + str(context.per_seed))


@then("the RDE mean is lower with normal factors for at least (?P<count>\\d+) of (?P<total>\\d+) seeds")
def step_impl(context, count, total):
    """
    :type context: behave.runner.Context
    """
    _per_seed = context.per_seed
    ok_(len(_per_seed) == int(total) and _per_seed["completed"].all(), str(_per_seed))
    _lower = int((_per_seed["normal_rde_mean"] < _per_seed["baseline_rde_mean"]).sum())
    ok_(_lower >= int(count), str(_lower) + " seeds\n" + str(_per_seed))


@then("the ATE RMSE ratio of the seeds is the median normal RMSE over the median baseline RMSE")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    # The per-seed ratios 0.5, 2 and 2.5 have a median of 2, the medians are 2 and 2
    _per_seed = pd.DataFrame({"normal_ate_rmse": [1.0, 2.0, 10.0], "baseline_ate_rmse": [2.0, 1.0, 4.0]})
    ok_(median_ate_rmse_ratio(_per_seed) == 1.0)
    ok_(np.isnan(median_ate_rmse_ratio(pd.DataFrame({"normal_ate_rmse": [1.0], "baseline_ate_rmse": [0.0]}))))


@then("the summary holds the median ATE RMSE ratio of the seeds")
def step_impl(context):
    """
    :type context: behave.runner.Context
    """
    with open(os.path.join(context.paths["experiment"], "summary.txt"), "r", encoding="utf-8") as _file:
        _summary = _file.read()
    _expected = "Median ATE RMSE ratio (median normal / median baseline): " + \
                str(median_ate_rmse_ratio(context.per_seed[context.per_seed["completed"]]))
    ok_(_expected in _summary, _summary)
