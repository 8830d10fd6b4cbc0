"""
    Initialization for MBE tests.
"""
import os
import sys

script_dir = os.path.dirname(os.path.abspath(__file__))
# Add relative repository path to be able to load the modules of this repository properly
sys.path.append(os.path.join(script_dir, "../../../"))

import pavo.common.logging
from pavo.common.internal import reset_timings

__author__ = 'Nicklas Borjesson'


def before_feature(context, feature):
    """

    Initialisation for all features.

    :param context:
    :param feature:
    :return:

    """
    pavo.common.logging.callback = None
    pavo.common.logging.severity = pavo.common.logging.SEV_WARNING
    reset_timings()


def after_scenario(context, scenario):
    # Scenarios that install a callback must not leak it
    pavo.common.logging.callback = None
    pavo.common.logging.severity = pavo.common.logging.SEV_WARNING
