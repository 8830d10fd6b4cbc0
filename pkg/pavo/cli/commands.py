"""
The commands module implements the commands of the command line: simulate, run, evaluate and experiment.

Created on Feb 16, 2016

@author: Nicklas Boerjesson
"""
import os
from multiprocessing import Pool

import numpy as np
import pandas as pd

from pavo.common.errors import OutputExistsError, PavoError, exit_code_for
from pavo.common.internal import reset_timings, summarize_timings
from pavo.common.logging import write_to_log, EC_NOTIFICATION, EC_RESOURCE, EC_SERVICE, SEV_INFO, SEV_ERROR, \
    SEV_WARNING
from pavo.common.settings import RunConfig
from pavo.cli.formats import Dataset, write_intrinsics, write_trajectory, write_landmarks, write_observations, \
    write_normals, intrinsics_filename, trajectory_filename, landmarks_filename, observations_filename, \
    normals_filename, config_filename, read_trajectory
from pavo.estimator.config import SolverConfig
from pavo.estimator.pipeline import run_sequence
from pavo.evaluation.metrics import evaluate, MetricReport
from pavo.evaluation.report import report_table, format_table, write_error_csv
from pavo.evaluation.trajectory import Trajectory
from pavo.simulator.config import SceneConfig
from pavo.simulator.sequence import simulate_sequence

__author__ = 'Nicklas Borjesson'

report_filename = "report.txt"
ate_filename = "ate.csv"
rde_filename = "rde.csv"
summary_filename = "summary.txt"
per_seed_filename = "per_seed.csv"

#: The two modes of the experiment, with and without normal factors
experiment_modes = ["normal", "baseline"]


def load_config(_filename=None):
    """The RunConfig in a file, the defaults if None"""
    return RunConfig.from_file(_filename) if _filename else RunConfig()


def prepare_output_directory(_directory, _force=False):
    """Creates the directory, refusing to reuse one that holds files unless _force"""
    if os.path.isdir(_directory) and os.listdir(_directory) and not _force:
        raise OutputExistsError(write_to_log("The output directory " + _directory + " is not empty, use --force to "
                                             "write into it anyway", _category=EC_RESOURCE, _severity=SEV_ERROR))
    os.makedirs(_directory, exist_ok=True)


def cmd_simulate(_config, _output_directory, _force=False):
    """
    Simulates a dataset into a directory.

    :param _config: A RunConfig, or the name of a configuration file, or None for the defaults
    :param _output_directory: Created if missing
    :param _force: Write into a directory that holds files
    :return: The SimulatedSequence
    """
    _config = _config if isinstance(_config, RunConfig) else load_config(_config)
    prepare_output_directory(_output_directory, _force)
    _sequence = simulate_sequence(SceneConfig.from_run_config(_config))

    def _path(_filename):
        return os.path.join(_output_directory, _filename)

    write_intrinsics(_path(intrinsics_filename), _sequence.intrinsics)
    write_trajectory(_path(trajectory_filename), Trajectory.from_world_to_camera(_sequence.timestamps,
                                                                                 _sequence.poses))
    write_landmarks(_path(landmarks_filename), _sequence.landmark_ids, _sequence.landmarks)
    write_observations(_path(observations_filename), _sequence.frames)
    write_normals(_path(normals_filename), _sequence.frames)
    _config.write(_path(config_filename))
    write_to_log("cmd_simulate: Wrote dataset to " + _output_directory, _category=EC_NOTIFICATION,
                 _severity=SEV_INFO)
    return _sequence


def run_config_for(_dataset, _config=None, _no_normal=False, _normal_weight=None):
    """
    The configuration of a run: _config if given, else the configuration of the dataset, else the defaults,
    with the normal weight overridden by the flags
    """
    if _config is None:
        _config = load_config(_dataset.config_filename)
    elif not isinstance(_config, RunConfig):
        _config = load_config(_config)
    if _no_normal:
        return _config.with_overrides(normal_weight=0.0, track_with_normal=False)
    if _normal_weight is not None:
        return _config.with_overrides(normal_weight=float(_normal_weight))
    return _config


def cmd_run(_dataset_directory, _output_filename, _no_normal=False, _normal_weight=None, _seed=None, _config=None,
            _process_id=None):
    """
    Runs the estimator on a dataset and writes the estimated trajectory.

    :param _dataset_directory: A directory written by cmd_simulate
    :param _output_filename: The trajectory file to write
    :param _no_normal: Run without normal factors, the reprojection-only baseline
    :param _normal_weight: Overrides lambda
    :param _seed: Recorded in the log, the estimator has no randomness
    :param _config: A RunConfig or a configuration file overriding the one of the dataset
    :return: (SequenceResult, timing summary)
    """
    _dataset = Dataset(_dataset_directory)
    _config = run_config_for(_dataset, _config, _no_normal, _normal_weight)
    _solver_config = SolverConfig.from_run_config(_config)
    write_to_log("cmd_run: " + _dataset_directory + ", lambda = " + str(_solver_config.normal_weight) +
                 (", seed " + str(_seed) if _seed is not None else ""), _category=EC_NOTIFICATION,
                 _severity=SEV_INFO, _process_id=_process_id)

    reset_timings()
    _result = run_sequence(_dataset.frames, _dataset.intrinsics, _solver_config, _process_id=_process_id)
    _timings = summarize_timings()

    _directory = os.path.dirname(os.path.abspath(_output_filename))
    os.makedirs(_directory, exist_ok=True)
    write_trajectory(_output_filename, Trajectory.from_world_to_camera(
        [_curr.timestamp for _curr in _result.poses], [_curr.pose for _curr in _result.poses]))
    write_to_log("cmd_run: Wrote " + str(len(_result.poses)) + " poses to " + _output_filename + "\n" +
                 format_timings(_timings), _category=EC_NOTIFICATION, _severity=SEV_INFO, _process_id=_process_id)
    return _result, _timings


def format_timings(_timings):
    """The timing summary as a table of mean and median milliseconds"""
    _table = pd.DataFrame([dict(module=_key, **_value) for _key, _value in _timings.items()],
                          columns=["module", "count", "mean", "median"])
    return format_table(_table, "Runtime (ms)", 2)


def cmd_evaluate(_estimate_filename, _ground_truth_filename, _output_directory=None, _delta=20, _align_mode="3d",
                 _label="estimate"):
    """
    Evaluates an estimated trajectory against ground truth.

    Writes report.txt with the ATE and RDE statistics, ate.csv and rde.csv with the per-frame errors.

    :return: An EvaluationResult
    """
    _result = evaluate(read_trajectory(_estimate_filename), read_trajectory(_ground_truth_filename), _delta,
                       _align_mode)
    if _output_directory is not None:
        os.makedirs(_output_directory, exist_ok=True)
        _text = format_table(report_table([(_label, "ATE", _result.ate)]), "ATE (m)") + "\n" + \
            format_table(report_table([(_label, "RDE", _result.rde)]), "RDE (m), delta = " + str(_delta)) + "\n" + \
            str(_result.association) + "\n"
        with open(os.path.join(_output_directory, report_filename), "w", encoding="utf-8") as _file:
            _file.write(_text)
        write_error_csv(_result, os.path.join(_output_directory, ate_filename),
                        os.path.join(_output_directory, rde_filename))
    write_to_log("cmd_evaluate: ATE " + repr(_result.ate) + ", RDE " + repr(_result.rde),
                 _category=EC_NOTIFICATION, _severity=SEV_INFO)
    return _result


def _experiment_seed(_arguments):
    """
    Simulates, runs both modes and evaluates one seed of the experiment, in a worker process.

    :return: A dict of the results, "error" is set if a step failed
    """
    _config_text, _seed, _output_directory, _force = _arguments
    _config = RunConfig.from_text(_config_text).with_overrides(seed=_seed)
    _directory = os.path.join(_output_directory, "seed_" + str(_seed))
    _row = {"seed": _seed, "error": None}
    try:
        cmd_simulate(_config, os.path.join(_directory, "dataset"), _force)
        for _curr_mode in experiment_modes:
            _estimate = os.path.join(_directory, "est_" + _curr_mode + ".txt")
            _run_result, _ = cmd_run(os.path.join(_directory, "dataset"), _estimate,
                                     _no_normal=_curr_mode == "baseline", _config=_config,
                                     _process_id="seed " + str(_seed) + " " + _curr_mode)
            _result = cmd_evaluate(_estimate, os.path.join(_directory, "dataset", trajectory_filename),
                                   os.path.join(_directory, "eval_" + _curr_mode), _config["rde_delta"],
                                   _config["align_mode"], _curr_mode)
            _row[_curr_mode] = {"ate": _result.ate.errors, "rde": _result.rde.errors,
                                "keyframes": _run_result.keyframe_count}
    except (PavoError, OSError, ValueError) as e:
        _row["error"] = type(e).__name__ + ": " + str(e)
        _row["exit_code"] = exit_code_for(e)
        write_to_log("cmd_experiment: Seed " + str(_seed) + " failed: " + _row["error"], _category=EC_SERVICE,
                     _severity=SEV_WARNING, _process_id="seed " + str(_seed))
    return _row


def median_ate_rmse_ratio(_per_seed):
    """The median over the seeds of the normal ATE RMSE divided by the median of the baseline one"""
    _baseline = float(np.median(_per_seed["baseline_ate_rmse"]))
    if _baseline <= 0:
        return float("nan")
    return float(np.median(_per_seed["normal_ate_rmse"])) / _baseline


def cmd_experiment(_config, _output_directory, _force=False, _workers=None):
    """
    The A/B experiment: for each seed of the configuration a dataset is simulated and estimated with and without
    normal factors, and both are evaluated. Seeds that fail are flagged, the aggregate covers the others.

    Writes summary.txt, with the statistics of both modes and their ratio, and per_seed.csv.

    :param _config: A RunConfig, a configuration file, or None for the defaults
    :param _workers: The number of worker processes, experiment_workers if None
    :return: (summary DataFrame, per seed DataFrame)
    """
    _config = _config if isinstance(_config, RunConfig) else load_config(_config)
    prepare_output_directory(_output_directory, _force)
    _workers = _config["experiment_workers"] if _workers is None else _workers
    _tasks = [(_config.to_text(), _curr_seed, _output_directory, _force) for _curr_seed in _config.seeds()]
    if _workers > 1:
        with Pool(min(_workers, len(_tasks))) as _pool:
            _rows = _pool.map(_experiment_seed, _tasks)
    else:
        _rows = [_experiment_seed(_curr) for _curr in _tasks]

    _per_seed = []
    _ate_reports, _rde_reports = [], []
    for _curr in _rows:
        _record = {"seed": _curr["seed"], "completed": _curr["error"] is None, "error": _curr["error"] or ""}
        if _curr["error"] is None:
            for _curr_mode in experiment_modes:
                _ate = MetricReport(_curr[_curr_mode]["ate"])
                _rde = MetricReport(_curr[_curr_mode]["rde"])
                _ate_reports.append((_curr_mode, "seed " + str(_curr["seed"]), _ate))
                _rde_reports.append((_curr_mode, "seed " + str(_curr["seed"]), _rde))
                _record.update({_curr_mode + "_ate_rmse": _ate.rmse, _curr_mode + "_ate_mean": _ate.mean,
                                _curr_mode + "_rde_mean": _rde.mean, _curr_mode + "_rde_rmse": _rde.rmse,
                                _curr_mode + "_keyframes": _curr[_curr_mode]["keyframes"]})
            _record["ate_rmse_ratio"] = _record["normal_ate_rmse"] / _record["baseline_ate_rmse"] \
                if _record["baseline_ate_rmse"] > 0 else float("nan")
        _per_seed.append(_record)

    _per_seed = pd.DataFrame(_per_seed)
    _per_seed.to_csv(os.path.join(_output_directory, per_seed_filename), index=False, float_format="%.17g")
    _completed = _per_seed[_per_seed["completed"]]

    _text = "A/B experiment over " + str(len(_per_seed)) + " seeds, " + str(len(_completed)) + " completed\n\n"
    if len(_completed):
        _ate_table = report_table(_ate_reports)
        _rde_table = report_table(_rde_reports)
        _text += format_table(_ate_table, "ATE (m)") + "\n" + format_table(_rde_table, "RDE (m)") + "\n"
        _text += "Median ATE RMSE ratio (median normal / median baseline): " + \
                 str(median_ate_rmse_ratio(_completed)) + "\n"
        _text += "Seeds with a lower RDE mean with normals: " + \
                 str(int((_completed["normal_rde_mean"] < _completed["baseline_rde_mean"]).sum())) + " of " + \
                 str(len(_completed)) + "\n"
        _summary = pd.concat([_ate_table.assign(metric="ATE"), _rde_table.assign(metric="RDE")], ignore_index=True)
    else:
        _summary = pd.DataFrame()
    for _curr in _per_seed[~_per_seed["completed"]].itertuples():
        _text += "FAILED seed " + str(_curr.seed) + ": " + _curr.error + "\n"

    with open(os.path.join(_output_directory, summary_filename), "w", encoding="utf-8") as _file:
        _file.write(_text)
    write_to_log("cmd_experiment: \n" + _text, _category=EC_NOTIFICATION, _severity=SEV_INFO)
    return _summary, _per_seed
