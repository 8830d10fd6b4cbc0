"""
This module holds internally used utilities

Created on Nov 6, 2012

@author: Nicklas Boerjesson

"""
import time

import numpy as np
from decorator import decorator

#: Wall clock durations in milliseconds, per timed key
timings = {}


def timed(_key):
    """
    Records the wall clock duration of each call of the decorated function under _key in timings.
    Example: @timed("tracking")
    """

    def _timed(func, *args, **kwargs):
        _start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            timings.setdefault(_key, []).append((time.perf_counter() - _start) * 1000.0)

    def _decorate(f):
        return decorator(_timed, f)

    return _decorate


def reset_timings():
    """Forget all recorded durations"""
    timings.clear()


def summarize_timings():
    """
    Summarizes the recorded durations

    :return: A dict of key -> {"count", "mean", "median"}, durations in milliseconds
    """
    _result = {}
    for _curr_key, _curr_values in sorted(timings.items()):
        _values = np.asarray(_curr_values, dtype=float)
        _result[_curr_key] = {"count": len(_values),
                              "mean": float(np.mean(_values)),
                              "median": float(np.median(_values))}
    return _result
