"""
This package evaluates estimated trajectories against ground truth: association, rigid alignment, the absolute
trajectory error and the relative distance error, and comparison tables
"""
from pavo.evaluation.trajectory import Trajectory, associate, AssociationReport, EvaluationError, TooFewPoses, \
    TimestampMismatch, SequenceTooShort
from pavo.evaluation.metrics import MetricReport, align, ate, rde, evaluate, EvaluationResult, default_delta
from pavo.evaluation.report import report_table, format_table, write_error_csv

__author__ = 'Nicklas Borjesson'
