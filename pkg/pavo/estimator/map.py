"""
The map module holds the map of the estimator: keyframes, landmarks, their observations and the
covisibility graph, and the global surface normal.

Mutations are serialized by MapState.lock, readers that need a consistent view while another thread writes
take a snapshot().

Created on Feb 4, 2016

@author: Nicklas Boerjesson
"""
import copy
import threading
from collections import OrderedDict

import numpy as np

from pavo.factors.normal import make_tangent_basis, check_frame_normal
from pavo.factors.reprojection import StereoObservation

__author__ = 'Nicklas Borjesson'


class Keyframe(object):
    """A keyframe, its pose maps world points into its camera frame"""

    #: The id, the id of the frame it was made from
    id = None
    #: The PoseSE3, replaced by bundle adjustment
    pose = None
    timestamp = None
    #: The measured unit normal n_k, or None
    normal = None
    #: The tangent basis B_k of the normal, computed once
    basis = None
    #: The ids of the landmarks observed
    observations = None
    #: Fixed keyframes are never changed by bundle adjustment
    fixed = False
    #: The number of observations at insertion, the reference of the keyframe policy
    reference_count = 0

    def __init__(self, _id, _pose, _timestamp=0.0, _normal=None, _fixed=False):
        self.id = int(_id)
        self.pose = _pose
        self.timestamp = float(_timestamp)
        if _normal is not None:
            self.normal = check_frame_normal(_normal)
            self.basis = make_tangent_basis(self.normal)
        self.observations = set()
        self.fixed = _fixed

    def __repr__(self):
        return "Keyframe(" + str(self.id) + ", " + str(len(self.observations)) + " observations" + \
               (", fixed" if self.fixed else "") + ")"


class Landmark(object):
    """A 3D point in the world frame"""

    id = None
    #: The world position as a 3-vector
    position = None
    #: The ids of the observing keyframes
    observers = None
    #: The number of keyframes in the map when the landmark was triangulated
    created_at = None

    def __init__(self, _id, _position, _created_at=0):
        self.id = int(_id)
        self.position = np.array(_position, dtype=float).reshape(3)
        self.observers = set()
        self.created_at = int(_created_at)

    def __repr__(self):
        return "Landmark(" + str(self.id) + ", " + str(self.position.tolist()) + ")"


class MapState(object):
    """
    The map. Observations are keyed by (keyframe id, landmark id), covisibility counts are kept up to date
    on every observation that is added or removed.
    """

    def __init__(self, _normal_init_window=10):
        #: Keyframes by id, in insertion order
        self.keyframes = OrderedDict()
        self.landmarks = {}
        #: (keyframe id, landmark id) -> StereoObservation
        self.observations = {}
        #: keyframe id -> {other keyframe id: shared landmark count}
        self.covisibility = {}
        #: The global normal n_w, None until a keyframe with a measured normal arrives
        self.global_normal = None
        #: Keyframes left during which n_w is optimized
        self.normal_init_remaining = int(_normal_init_window)
        self.lock = threading.RLock()

    @property
    def first_keyframe_id(self):
        return next(iter(self.keyframes)) if self.keyframes else None

    def last_keyframe(self):
        return next(reversed(self.keyframes.values())) if self.keyframes else None

    def add_keyframe(self, _keyframe):
        with self.lock:
            if _keyframe.id in self.keyframes:
                raise ValueError("MapState.add_keyframe: Keyframe " + str(_keyframe.id) + " already exists")
            self.keyframes[_keyframe.id] = _keyframe
            self.covisibility[_keyframe.id] = {}

    def add_landmark(self, _landmark):
        with self.lock:
            if _landmark.id in self.landmarks:
                raise ValueError("MapState.add_landmark: Landmark " + str(_landmark.id) + " already exists")
            self.landmarks[_landmark.id] = _landmark

    def add_observation(self, _observation):
        """Adds a StereoObservation of an existing landmark by an existing keyframe"""
        _kf_id, _lm_id = _observation.frame_id, _observation.landmark_id
        with self.lock:
            if _kf_id not in self.keyframes or _lm_id not in self.landmarks:
                raise KeyError("MapState.add_observation: Unknown keyframe " + str(_kf_id) + " or landmark " +
                               str(_lm_id))
            if (_kf_id, _lm_id) in self.observations:
                raise ValueError("MapState.add_observation: Keyframe " + str(_kf_id) + " already observes " +
                                 str(_lm_id))
            _landmark = self.landmarks[_lm_id]
            for _curr_other in _landmark.observers:
                self._change_covisibility(_kf_id, _curr_other, 1)
            _landmark.observers.add(_kf_id)
            self.keyframes[_kf_id].observations.add(_lm_id)
            self.observations[(_kf_id, _lm_id)] = _observation

    def remove_observation(self, _kf_id, _lm_id):
        """
        Removes an observation, a landmark without observations left is deleted.

        :return: True if the landmark was deleted
        """
        with self.lock:
            del self.observations[(_kf_id, _lm_id)]
            _landmark = self.landmarks[_lm_id]
            _landmark.observers.discard(_kf_id)
            self.keyframes[_kf_id].observations.discard(_lm_id)
            for _curr_other in _landmark.observers:
                self._change_covisibility(_kf_id, _curr_other, -1)
            if not _landmark.observers:
                del self.landmarks[_lm_id]
                return True
            return False

    def _change_covisibility(self, _a, _b, _delta):
        for _from, _to in ((_a, _b), (_b, _a)):
            _count = self.covisibility[_from].get(_to, 0) + _delta
            if _count > 0:
                self.covisibility[_from][_to] = _count
            else:
                self.covisibility[_from].pop(_to, None)

    def shared_count(self, _a, _b):
        return self.covisibility.get(_a, {}).get(_b, 0)

    def covisible(self, _kf_id, _min_shared=15):
        """
        The keyframes sharing at least _min_shared landmarks with _kf_id

        :return: A list of keyframe ids, most shared first, ties by id
        """
        with self.lock:
            _counts = [(_curr_id, _curr_count) for _curr_id, _curr_count in self.covisibility[_kf_id].items()
                       if _curr_count >= _min_shared]
        return [_curr_id for _curr_id, _ in sorted(_counts, key=lambda _x: (-_x[1], _x[0]))]

    def edges(self, _min_shared=15):
        """The covisibility graph as (a, b, shared count) triples with a < b"""
        with self.lock:
            return sorted([(_a, _b, _count) for _a, _curr in self.covisibility.items()
                           for _b, _count in _curr.items() if _a < _b and _count >= _min_shared])

    def snapshot(self):
        """A deep copy taken under the lock"""
        with self.lock:
            _lock = self.lock
            self.lock = None
            try:
                _copy = copy.deepcopy(self)
            finally:
                self.lock = _lock
        _copy.lock = threading.RLock()
        return _copy

    def check_consistency(self):
        """
        Verifies that every observation references an existing keyframe and landmark, that every landmark has
        observations and that the covisibility counts equal the actual shared counts.

        :return: A list of problems, empty if the map is consistent
        """
        _problems = []
        with self.lock:
            for (_kf_id, _lm_id), _curr_obs in self.observations.items():
                if _kf_id not in self.keyframes or _lm_id not in self.landmarks:
                    _problems.append("Observation " + str((_kf_id, _lm_id)) + " references a missing item")
                elif _lm_id not in self.keyframes[_kf_id].observations or \
                        _kf_id not in self.landmarks[_lm_id].observers:
                    _problems.append("Observation " + str((_kf_id, _lm_id)) + " is not indexed")
            for _curr_landmark in self.landmarks.values():
                if not _curr_landmark.observers:
                    _problems.append("Landmark " + str(_curr_landmark.id) + " has no observations")
            for _a in self.keyframes:
                for _b in self.keyframes:
                    if _a == _b:
                        continue
                    _actual = len(self.keyframes[_a].observations & self.keyframes[_b].observations)
                    if self.shared_count(_a, _b) != _actual:
                        _problems.append("Covisibility " + str((_a, _b)) + " is " +
                                         str(self.shared_count(_a, _b)) + ", actual " + str(_actual))
        return _problems

    def observation_arrays(self, _keys):
        """
        Gathers observations into arrays.

        :param _keys: A list of (keyframe id, landmark id)
        :return: (pixels N x 3, weights N)
        """
        _pixels = np.array([self.observations[_curr].pixel for _curr in _keys], dtype=float).reshape(-1, 3)
        _weights = np.array([self.observations[_curr].weight for _curr in _keys], dtype=float)
        return _pixels, _weights

    @staticmethod
    def make_observation(_kf_id, _lm_id, _pixel, _weight):
        return StereoObservation(frame_id=int(_kf_id), landmark_id=int(_lm_id), uL=float(_pixel[0]),
                                 v=float(_pixel[1]), uR=float(_pixel[2]), weight=float(_weight))
