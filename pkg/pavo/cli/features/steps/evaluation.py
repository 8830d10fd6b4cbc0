import os

import numpy as np
import pandas as pd
from behave import *
from nose.tools.trivial import ok_
from scipy.spatial.transform import Rotation

import pavo.common.logging
from pavo.cli.formats import write_trajectory, read_trajectory
from pavo.common.errors import DataFormatError
from pavo.evaluation.trajectory import Trajectory
from pavo.testing.builders import random_pose

use_step_matcher("re")


@then("ate.csv of (?P<directory>\\S+) has (?P<ate_rows>\\d+) rows and rde.csv (?P<rde_rows>\\d+) rows, "
      "all errors below (?P<limit>.*)")
def step_impl(context, directory, ate_rows, rde_rows, limit):
    """
    :type context: behave.runner.Context
    """
    _directory = directory.format(**context.paths)
    _ate = pd.read_csv(os.path.join(_directory, "ate.csv"))
    _rde = pd.read_csv(os.path.join(_directory, "rde.csv"))
    ok_(len(_ate) == int(ate_rows) and len(_rde) == int(rde_rows), str((len(_ate), len(_rde))))
    ok_(_ate["ate"].max() < float(limit) and _rde["rde"].max() < float(limit),
        str((_ate["ate"].max(), _rde["rde"].max())))


@then("(?P<count>\\d+) random poses survive writing and reading a trajectory file within (?P<tolerance>.*)")
def step_impl(context, count, tolerance):
    """
    :type context: behave.runner.Context
    """
    _filename = os.path.join(context.work_directory, "trajectory.txt")
    _written = Trajectory(np.arange(int(count)) * 0.1 + 1000.0,
                          [random_pose(context.rng, _max_translation=50.0) for _ in range(int(count))])
    write_trajectory(_filename, _written)
    _read = read_trajectory(_filename)
    ok_(np.array_equal(_read.timestamps, _written.timestamps))
    for _before, _after in zip(_written.poses, _read.poses):
        ok_(np.allclose(_before.matrix(), _after.matrix(), rtol=0, atol=float(tolerance)),
            str(_before) + " != " + str(_after))


@then("a quaternion of norm (?P<norm>.*) is read as the unit quaternion with a warning")
def step_impl(context, norm):
    """
    :type context: behave.runner.Context
    """
    _messages = []
    pavo.common.logging.callback = lambda _data, _category, _severity, *_rest: _messages.append((_data, _severity))
    _quaternion = Rotation.from_rotvec([0.3, -0.2, 0.5]).as_quat()
    _filename = os.path.join(context.work_directory, "scaled.txt")
    with open(_filename, "w", encoding="utf-8") as _file:
        _file.write("0.5 1 2 3 " + " ".join([repr(float(_curr * float(norm))) for _curr in _quaternion]) + "\n")
    _pose = read_trajectory(_filename).poses[0]
    ok_(np.allclose(_pose.R, Rotation.from_quat(_quaternion).as_matrix(), rtol=0, atol=1e-12), str(_pose))
    ok_(np.array_equal(_pose.t, [1.0, 2.0, 3.0]))
    ok_(len(_messages) == 1 and _messages[0][1] == pavo.common.logging.SEV_WARNING and
        "renormalized" in _messages[0][0], str(_messages))


@then("a trajectory line with (?P<count>\\d+) values is refused naming line (?P<line_number>\\d+)")
def step_impl(context, count, line_number):
    """
    :type context: behave.runner.Context
    """
    _filename = os.path.join(context.work_directory, "short.txt")
    _lines = ["# timestamp tx ty tz qx qy qz qw"] + ["0 0 0 0 0 0 0 1"] * (int(line_number) - 2) + \
        [" ".join(["1"] * int(count))]
    with open(_filename, "w", encoding="utf-8") as _file:
        _file.write("\n".join(_lines) + "\n")
    try:
        read_trajectory(_filename)
        ok_(False, "The short line was accepted")
    except DataFormatError as e:
        ok_(e.line_number == int(line_number), str(e))
        ok_(str(e).startswith(_filename + ":" + line_number + ": "), str(e))
