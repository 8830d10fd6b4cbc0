"""
    Initialization for MBE tests.
"""
import os
import shutil
import sys
import tempfile

import numpy as np

script_dir = os.path.dirname(os.path.abspath(__file__))
# Add relative repository path to be able to load the modules of this repository properly
sys.path.append(os.path.join(script_dir, "../../../"))

import pavo.common.logging

__author__ = 'Nicklas Borjesson'


def before_feature(context, feature):
    """

    Initialisation for all features.

    :param context:
    :param feature:
    :return:

    """
    pavo.common.logging.severity = pavo.common.logging.SEV_WARNING


def before_scenario(context, scenario):
    context.rng = np.random.default_rng(20160216)
    context.work_directory = tempfile.mkdtemp(prefix="pavo_cli_")
    context.paths = {"work": context.work_directory}


def after_scenario(context, scenario):
    # main installs its stderr callback and a log level
    pavo.common.logging.callback = None
    pavo.common.logging.severity = pavo.common.logging.SEV_WARNING
    shutil.rmtree(context.work_directory, ignore_errors=True)
