#!/usr/bin/env python3
"""
    ************
    pavo
    ************

    The command line of pavo: simulate degenerate pavement datasets, run the stereo visual odometry back-end
    on them and evaluate the estimated trajectories.

    :copyright: Copyright 2016 by Nicklas Boerjesson
    :license: BSD, see LICENSE for details.
"""
import getopt
import sys

import pavo.common.logging
from pavo import __version__
from pavo.common.errors import EXIT_OK, EXIT_USAGE, PavoError, exit_code_for, category_for
from pavo.common.logging import make_sparse_log_message, severity_from_identifier, write_to_log, \
    category_to_description, EC_SERVICE, SEV_ERROR
from pavo.cli.commands import cmd_simulate, cmd_run, cmd_evaluate, cmd_experiment
from pavo.estimator.config import TrackingLost

__author__ = 'Nicklas Borjesson'

_help_msg = """
Usage: pavo COMMAND [OPTION]...
Simulate, estimate and evaluate stereo visual odometry over degenerate pavement scenes

Commands:
    simulate    -c, --config FILE       The run configuration, defaults if omitted
                -o, --output DIR        The dataset directory to create
                --force                 Write into a directory that holds files

    run         -d, --dataset DIR       A dataset directory
                -o, --output FILE       The estimated trajectory to write
                --no-normal             Run without normal factors (lambda = 0)
                --lambda VALUE          The weight of the normal factors
                --seed N                Recorded in the log, the estimator is deterministic
                -c, --config FILE       Overrides the configuration of the dataset

    evaluate    -e, --estimate FILE     The estimated trajectory
                -g, --ground_truth FILE The ground truth trajectory
                -o, --output DIR        Where report.txt, ate.csv and rde.csv are written
                --delta N               The frame step of the relative distance error (20)
                --align MODE            3d or 2d alignment (3d)

    experiment  -c, --config FILE       The run configuration, listing experiment_seeds
                -o, --output DIR        The experiment directory to create
                --workers N             Parallel worker processes (experiment_workers)
                --force                 Write into a directory that holds files

Options of all commands:
    -l, --log_level LEVEL   debug, information, warning, alert, user, error or fatal (warning)
    --help                  display this help and exit
    --version               output version information and exit

Exit codes: 0 success, 1 usage error, 2 data error, 3 estimator failure.
"""

_commands = ["simulate", "run", "evaluate", "experiment"]


def _log_to_stderr(_data, _category, _severity, _process_id, _occurred_when, _frame_id, _pid):
    print(make_sparse_log_message(_data, _category, _severity, _process_id, None, _frame_id, _pid),
          file=sys.stderr)


def _usage_error(_message):
    write_to_log(_message, _category=EC_SERVICE, _severity=SEV_ERROR)
    print(_help_msg, file=sys.stderr)
    return EXIT_USAGE


def _parse_number(_option, _value, _type):
    try:
        return _type(_value)
    except ValueError:
        raise getopt.GetoptError("Invalid value for " + _option + ": " + _value)


def main(_argv=None):
    """Main program function, returns the exit code"""
    _argv = sys.argv[1:] if _argv is None else _argv

    pavo.common.logging.callback = _log_to_stderr

    if not _argv or _argv[0] in ("--help", "-h"):
        print(_help_msg)
        return EXIT_OK if _argv else EXIT_USAGE
    if _argv[0] == "--version":
        print("pavo " + __version__)
        return EXIT_OK

    _command = _argv[0]
    if _command not in _commands:
        return _usage_error("Unknown command \"" + _command + "\", use one of " + ", ".join(_commands))

    _values = {"config": None, "output": None, "dataset": None, "estimate": None, "ground_truth": None,
               "force": False, "no_normal": False, "lambda": None, "seed": None, "delta": 20, "align": "3d",
               "workers": None}
    try:
        _opts, _args = getopt.getopt(_argv[1:], "c:o:d:e:g:l:",
                                     ["config=", "output=", "dataset=", "estimate=", "ground_truth=", "force",
                                      "no-normal", "lambda=", "seed=", "delta=", "align=", "workers=", "log_level=",
                                      "help"])
        if _args:
            raise getopt.GetoptError("Unexpected arguments: " + " ".join(_args))
        for _opt, _arg in _opts:
            if _opt in ("-c", "--config"):
                _values["config"] = _arg
            elif _opt in ("-o", "--output"):
                _values["output"] = _arg
            elif _opt in ("-d", "--dataset"):
                _values["dataset"] = _arg
            elif _opt in ("-e", "--estimate"):
                _values["estimate"] = _arg
            elif _opt in ("-g", "--ground_truth"):
                _values["ground_truth"] = _arg
            elif _opt == "--force":
                _values["force"] = True
            elif _opt == "--no-normal":
                _values["no_normal"] = True
            elif _opt == "--lambda":
                _values["lambda"] = _parse_number(_opt, _arg, float)
            elif _opt == "--seed":
                _values["seed"] = _parse_number(_opt, _arg, int)
            elif _opt == "--delta":
                _values["delta"] = _parse_number(_opt, _arg, int)
            elif _opt == "--align":
                if _arg not in ("3d", "2d"):
                    raise getopt.GetoptError("--align must be 3d or 2d")
                _values["align"] = _arg
            elif _opt == "--workers":
                _values["workers"] = _parse_number(_opt, _arg, int)
            elif _opt in ("-l", "--log_level"):
                try:
                    pavo.common.logging.severity = severity_from_identifier(_arg)
                except ValueError as e:
                    raise getopt.GetoptError(str(e))
            elif _opt == "--help":
                print(_help_msg)
                return EXIT_OK
    except getopt.GetoptError as err:
        return _usage_error(str(err))

    _required = {"simulate": ["output"], "run": ["dataset", "output"], "evaluate": ["estimate", "ground_truth"],
                 "experiment": ["output"]}[_command]
    _missing = [_curr for _curr in _required if _values[_curr] is None]
    if _missing:
        return _usage_error(_command + ": Missing --" + ", --".join(_missing))

    try:
        if _command == "simulate":
            cmd_simulate(_values["config"], _values["output"], _values["force"])
        elif _command == "run":
            cmd_run(_values["dataset"], _values["output"], _no_normal=_values["no_normal"],
                    _normal_weight=_values["lambda"], _seed=_values["seed"], _config=_values["config"])
        elif _command == "evaluate":
            _result = cmd_evaluate(_values["estimate"], _values["ground_truth"], _values["output"], _values["delta"],
                                   _values["align"])
            print("ATE: " + repr(_result.ate) + "\nRDE: " + repr(_result.rde))
        else:
            _summary, _per_seed = cmd_experiment(_values["config"], _values["output"], _values["force"],
                                                 _values["workers"])
            if not _per_seed["completed"].all():
                write_to_log("Some seeds failed, see the summary", _category=EC_SERVICE, _severity=SEV_ERROR)
    except TrackingLost as e:
        write_to_log(_command + ": Tracking lost at frame " + str(e.frame_id) + ": " + str(e) + " (" +
                     category_to_description(e.category) + ")",
                     _category=e.category, _severity=SEV_ERROR, _frame_id=e.frame_id)
        return exit_code_for(e)
    except (PavoError, OSError, ValueError) as e:
        write_to_log(_command + ": " + str(e) + " (" + category_to_description(category_for(e)) + ")",
                     _category=category_for(e), _severity=SEV_ERROR)
        return exit_code_for(e)
    return EXIT_OK


def run():
    """The console script"""
    sys.exit(main())


if __name__ == "__main__":
    run()
