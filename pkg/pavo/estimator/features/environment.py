"""
    Initialization for MBE tests.
"""
import os
import sys

import numpy as np

script_dir = os.path.dirname(os.path.abspath(__file__))
# Add relative repository path to be able to load the modules of this repository properly
sys.path.append(os.path.join(script_dir, "../../../"))

import pavo.common.logging
from pavo.common.internal import reset_timings
from pavo.testing.builders import example_intrinsics

__author__ = 'Nicklas Borjesson'


def before_feature(context, feature):
    """

    Initialisation for all features.

    :param context:
    :param feature:
    :return:

    """
    pavo.common.logging.severity = pavo.common.logging.SEV_WARNING
    context.K = example_intrinsics
    reset_timings()


def before_scenario(context, scenario):
    context.rng = np.random.default_rng(20160204)
