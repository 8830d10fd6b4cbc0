"""
The solver module holds the damped Gauss-Newton (Levenberg) loop and the two problems it is run on:
the pose-only problem of tracking and the bundle adjustment problem of local mapping.

A problem exposes:
    cost(state)           the robust objective of a state, inf if the state is invalid
    linearize()           builds the normal equations at the current state
    solve(damping)        the step of the damped normal equations, None if the factorization failed
    propose(step)         the candidate state after applying step
    accept(state, cost)   makes the candidate the current state

Created on Feb 5, 2016

@author: Nicklas Boerjesson
"""
from dataclasses import dataclass

import numpy as np
import scipy.sparse
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from pavo.common.logging import write_to_log, EC_NUMERIC, SEV_ERROR, SEV_DEBUG
from pavo.estimator.config import SolverDiverged
from pavo.factors.reprojection import reprojection_residuals, reprojection_jacobians_many
from pavo.factors.normal import normal_jacobian, normal_pose_jacobian, check_global_normal
from pavo.factors.robust import huber
from pavo.geometry.lie import apply_update

__author__ = 'Nicklas Borjesson'

# Relative cost decreases are computed against at least this cost
_tiny_cost = 1e-300


@dataclass
class SolverSummary:
    iterations: int = 0
    initial_cost: float = 0.0
    final_cost: float = 0.0
    accepted_steps: int = 0
    rejected_steps: int = 0
    #: The damping at exit, a continued solve starts from it
    damping: float = 0.0
    #: "step", "cost", "max_iterations" or "zero_cost"
    termination: str = ""


def levenberg_marquardt(_problem, _config, _max_iterations=None, _damping=None):
    """
    Minimizes a problem with damped Gauss-Newton. Damping is multiplied by damping_factor on a rejected step
    and divided by it on an accepted one, accepted steps never increase the cost.

    :param _problem: The problem, see the module documentation
    :param _config: A SolverConfig
    :param _max_iterations: Overrides max_iterations
    :param _damping: The initial damping, initial_damping if None
    :return: A SolverSummary
    """
    _max_iterations = _config.max_iterations if _max_iterations is None else _max_iterations
    _damping = _config.initial_damping if _damping is None else _damping
    _cost = _problem.cost(_problem.state)
    _summary = SolverSummary(initial_cost=_cost, final_cost=_cost, damping=_damping,
                             termination="max_iterations")
    if not np.isfinite(_cost):
        raise SolverDiverged(write_to_log("levenberg_marquardt: Initial cost is not finite",
                                          _category=EC_NUMERIC, _severity=SEV_ERROR))

    for _iteration in range(1, _max_iterations + 1):
        _summary.iterations = _iteration
        if _cost == 0.0:
            _summary.termination = "zero_cost"
            break
        _problem.linearize()
        _converged = False
        while True:
            _step = _problem.solve(_damping)
            if _step is not None:
                if np.linalg.norm(_step) < _config.step_tolerance:
                    _converged = True
                    break
                _candidate = _problem.propose(_step)
                _new_cost = _problem.cost(_candidate)
                if _new_cost < _cost:
                    _problem.accept(_candidate, _new_cost)
                    _summary.accepted_steps += 1
                    _damping = max(_damping / _config.damping_factor, 1e-15)
                    break
            _summary.rejected_steps += 1
            _damping *= _config.damping_factor
            if _damping > _config.damping_max:
                raise SolverDiverged(write_to_log("levenberg_marquardt: Damping exceeded " +
                                                  str(_config.damping_max) + " without a cost decrease at cost " +
                                                  str(_cost), _category=EC_NUMERIC, _severity=SEV_ERROR))
        if _converged:
            _summary.termination = "step"
            break
        _decrease = (_cost - _new_cost) / max(_cost, _tiny_cost)
        _cost = _new_cost
        if _decrease < _config.cost_tolerance:
            _summary.termination = "cost"
            break

    _summary.final_cost = _cost
    _summary.damping = _damping
    write_to_log("levenberg_marquardt: " + str(_summary.iterations) + " iterations, cost " +
                 str(_summary.initial_cost) + " -> " + str(_summary.final_cost) + " (" + _summary.termination + ")",
                 _category=EC_NUMERIC, _severity=SEV_DEBUG)
    return _summary


def _robust_reprojection(_K, _R, _t, _points, _pixels, _weights, _delta):
    """
    Residuals whitened by sqrt(w) and their Huber costs and IRLS weights.

    :return: (whitened residuals, camera frame points, valid mask, costs, IRLS weights)
    """
    _res, _pc, _valid = reprojection_residuals(_K, _R, _t, _points, _pixels)
    _white = _res * np.sqrt(_weights)[:, None]
    _cost, _irls = huber(np.linalg.norm(_white, axis=1), _delta)
    return _white, _pc, _valid, np.where(_valid, _cost, 0.0), _irls


def _robust_normals(_bases, _R, _n_w, _measured, _normal_weight, _delta):
    """
    Tangential normal residuals whitened by sqrt(lambda).

    :param _bases: K x 2 x 3 tangent bases
    :param _R: K x 3 x 3 keyframe rotations
    :return: (whitened residuals K x 2, costs, IRLS weights)
    """
    _unit = _n_w / np.linalg.norm(_n_w)
    _res = np.einsum("kij,kj->ki", _bases, np.einsum("kij,j->ki", _R, _unit) - _measured)
    _white = _res * np.sqrt(_normal_weight)
    _cost, _irls = huber(np.linalg.norm(_white, axis=1), _delta)
    return _white, _cost, _irls


class PoseProblem(object):
    """
    The objective of tracking: the reprojection errors of fixed landmarks in one frame plus,
    optionally, the normal factor of the frame against a fixed global normal.
    """

    def __init__(self, _K, _pose, _points, _pixels, _weights, _loss, _normal=None, _basis=None, _global_normal=None):
        self.K = _K
        self.state = _pose
        self.points = _points
        self.pixels = _pixels
        self.weights = _weights
        self.loss = _loss
        self.use_normal = _normal is not None and _global_normal is not None and _loss.normal_weight > 0
        if self.use_normal:
            self.normal = _normal
            self.basis = _basis
            self.global_normal = check_global_normal(_global_normal)
        self.active = self._reprojection(_pose)[2]
        self.H = None
        self.g = None

    def _reprojection(self, _pose):
        return _robust_reprojection(self.K, _pose.R, _pose.t, self.points, self.pixels, self.weights,
                                    self.loss.delta_repro)

    def _normal(self, _pose):
        return _robust_normals(self.basis[None], _pose.R[None], self.global_normal, self.normal[None],
                               self.loss.normal_weight, self.loss.delta_normal)

    def cost(self, _pose):
        _, _, _valid, _costs, _ = self._reprojection(_pose)
        if np.any(self.active & ~_valid):
            return np.inf
        _total = float(np.sum(_costs[self.active]))
        if self.use_normal:
            _total += float(self._normal(_pose)[1][0])
        return _total

    def linearize(self):
        _white, _pc, _, _, _irls = self._reprojection(self.state)
        _valid = self.active
        _J, _ = reprojection_jacobians_many(self.K, self.state.R, _pc[_valid])
        _scale = np.sqrt(self.weights[_valid] * _irls[_valid])
        _J = _J * _scale[:, None, None]
        _e = _white[_valid] * np.sqrt(_irls[_valid])[:, None]
        self.H = np.einsum("nki,nkj->ij", _J, _J)
        self.g = np.einsum("nki,nk->i", _J, _e)
        if self.use_normal:
            _e_n, _, _irls_n = self._normal(self.state)
            _J_n = normal_pose_jacobian(self.basis, self.state.R, self.global_normal) * \
                np.sqrt(self.loss.normal_weight * _irls_n[0])
            self.H += _J_n.T @ _J_n
            self.g += _J_n.T @ (_e_n[0] * np.sqrt(_irls_n[0]))

    def solve(self, _damping):
        try:
            return cho_solve(cho_factor(self.H + _damping * np.eye(6)), -self.g)
        except (LinAlgError, ValueError):
            return None

    def propose(self, _step):
        return apply_update(_step, self.state)

    def accept(self, _pose, _cost):
        self.state = _pose


class BundleState(object):
    """The variables of a bundle adjustment: optimized poses, landmark positions and the global normal"""

    def __init__(self, _poses, _points, _global_normal):
        self.poses = _poses
        self.points = _points
        self.global_normal = _global_normal


class BundleProblem(object):
    """
    The objective of local bundle adjustment over a fixed set of observations.

    Poses are split into optimized and fixed ones, fixed poses are constants. The normal equations are
    reduced onto the camera variables (the optimized poses, then n_w when it is optimized) with the Schur
    complement of the 3 x 3 landmark blocks.
    """

    def __init__(self, _K, _loss, _keyframe_ids, _optimized_ids, _poses, _points, _obs_keyframe, _obs_landmark,
                 _pixels, _weights, _normals=None, _global_normal=None, _optimize_global_normal=False):
        """
        :param _keyframe_ids: The ids of every keyframe involved, optimized or fixed
        :param _optimized_ids: The ids of the optimized keyframes, a subset of _keyframe_ids
        :param _poses: keyframe id -> PoseSE3
        :param _points: L x 3 landmark positions
        :param _obs_keyframe: N keyframe ids of the observations
        :param _obs_landmark: N indices into _points of the observations
        :param _normals: keyframe id -> (n_k, B_k) for the keyframes with a normal factor
        """
        self.K = _K
        self.loss = _loss
        self.keyframe_ids = list(_keyframe_ids)
        self.optimized_ids = list(_optimized_ids)
        _index = dict((_curr_id, _curr) for _curr, _curr_id in enumerate(self.optimized_ids))
        self.obs_landmark = np.asarray(_obs_landmark, dtype=np.int64)
        self.obs_keyframe = list(_obs_keyframe)
        self.obs_variable = np.array([_index.get(_curr, -1) for _curr in self.obs_keyframe], dtype=np.int64)
        self.pixels = _pixels
        self.weights = _weights
        self.landmark_count = len(_points)

        _normals = _normals or {}
        self.use_normal = _global_normal is not None and self.loss.normal_weight > 0 and len(_normals) > 0
        self.optimize_global_normal = self.use_normal and _optimize_global_normal
        if self.use_normal:
            self.normal_ids = [_curr for _curr in self.keyframe_ids if _curr in _normals]
            self.normal_measured = np.array([_normals[_curr][0] for _curr in self.normal_ids])
            self.normal_bases = np.array([_normals[_curr][1] for _curr in self.normal_ids])
            self.normal_variable = np.array([_index.get(_curr, -1) for _curr in self.normal_ids], dtype=np.int64)

        self.pose_count = len(self.optimized_ids)
        self.camera_size = 6 * self.pose_count + (3 if self.optimize_global_normal else 0)
        self.state = BundleState(dict(_poses), np.array(_points, dtype=float),
                                 None if _global_normal is None else np.array(check_global_normal(_global_normal)))
        self.active = np.ones(len(self.obs_landmark), dtype=bool)
        if len(self.obs_landmark):
            # Observations behind their camera are left out
            self.active = self._reprojection(self.state)[2]

    def _rotations(self, _state):
        _R = np.array([_state.poses[_curr].R for _curr in self.obs_keyframe]).reshape(-1, 3, 3)
        _t = np.array([_state.poses[_curr].t for _curr in self.obs_keyframe]).reshape(-1, 3)
        return _R, _t

    def _reprojection(self, _state):
        _R, _t = self._rotations(_state)
        return _robust_reprojection(self.K, _R, _t, _state.points[self.obs_landmark], self.pixels, self.weights,
                                    self.loss.delta_repro) + (_R,)

    def _normal(self, _state):
        _R = np.array([_state.poses[_curr].R for _curr in self.normal_ids])
        return _robust_normals(self.normal_bases, _R, _state.global_normal, self.normal_measured,
                               self.loss.normal_weight, self.loss.delta_normal) + (_R,)

    def cost_terms(self, _state=None):
        """(reprojection cost, normal cost) of a state"""
        _state = self.state if _state is None else _state
        _repro = float(np.sum(self._reprojection(_state)[3])) if len(self.obs_landmark) else 0.0
        _normal = float(np.sum(self._normal(_state)[1])) if self.use_normal else 0.0
        return _repro, _normal

    def cost(self, _state):
        _total = 0.0
        if len(self.obs_landmark):
            _, _, _valid, _costs, _, _ = self._reprojection(_state)
            if np.any(self.active & ~_valid):
                return np.inf
            _total = float(np.sum(_costs[self.active]))
        if self.use_normal:
            _total += float(np.sum(self._normal(_state)[1]))
        return _total

    def linearize(self):
        _C = self.camera_size
        _L = self.landmark_count
        self.H_cc = np.zeros((_C, _C))
        self.g_c = np.zeros(_C)
        self.H_ll = np.zeros((_L, 3, 3))
        self.g_l = np.zeros((_L, 3))
        _rows, _cols, _data = np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0)

        if len(self.obs_landmark):
            _white, _pc, _, _, _irls, _R = self._reprojection(self.state)
            _sel = np.nonzero(self.active)[0]
            _J_pose, _J_point = reprojection_jacobians_many(self.K, _R[_sel], _pc[_sel])
            _scale = np.sqrt(self.weights[_sel] * _irls[_sel])
            _J_pose *= _scale[:, None, None]
            _J_point *= _scale[:, None, None]
            _e = _white[_sel] * np.sqrt(_irls[_sel])[:, None]
            _lm = self.obs_landmark[_sel]
            np.add.at(self.H_ll, _lm, np.einsum("nki,nkj->nij", _J_point, _J_point))
            np.add.at(self.g_l, _lm, np.einsum("nki,nk->ni", _J_point, _e))

            _var = self.obs_variable[_sel]
            _opt = _var >= 0
            if np.any(_opt):
                _P = self.pose_count
                _H_pp = np.zeros((_P, 6, 6))
                _g_p = np.zeros((_P, 6))
                np.add.at(_H_pp, _var[_opt], np.einsum("nki,nkj->nij", _J_pose[_opt], _J_pose[_opt]))
                np.add.at(_g_p, _var[_opt], np.einsum("nki,nk->ni", _J_pose[_opt], _e[_opt]))
                for _curr in range(_P):
                    self.H_cc[6 * _curr:6 * _curr + 6, 6 * _curr:6 * _curr + 6] += _H_pp[_curr]
                self.g_c[:6 * _P] += _g_p.reshape(-1)
                # Pose-landmark coupling blocks, 6 x 3 per observation
                _W = np.einsum("nki,nkj->nij", _J_pose[_opt], _J_point[_opt])
                _r = 6 * _var[_opt][:, None, None] + np.arange(6)[None, :, None]
                _c = 3 * _lm[_opt][:, None, None] + np.arange(3)[None, None, :]
                _rows = np.broadcast_to(_r, _W.shape).ravel()
                _cols = np.broadcast_to(_c, _W.shape).ravel()
                _data = _W.ravel()

        self.W = scipy.sparse.csr_matrix((_data, (_rows, _cols)), shape=(_C, 3 * _L))

        if self.use_normal:
            self._linearize_normals()

    def _linearize_normals(self):
        _e, _, _irls, _R = self._normal(self.state)
        _lambda = self.loss.normal_weight
        _nw = 6 * self.pose_count
        if self.optimize_global_normal:
            # The objective does not depend on the length of n_w, the radial direction is held still
            _unit = self.state.global_normal / np.linalg.norm(self.state.global_normal)
            self.H_cc[_nw:_nw + 3, _nw:_nw + 3] += _lambda * np.outer(_unit, _unit)
        for _curr in range(len(self.normal_ids)):
            _J_phi, _J_nw = normal_jacobian(self.normal_bases[_curr], _R[_curr], self.state.global_normal)
            _s = np.sqrt(_lambda * _irls[_curr])
            _e_curr = _e[_curr] * np.sqrt(_irls[_curr])
            _blocks = []
            _var = self.normal_variable[_curr]
            if _var >= 0:
                _blocks.append((6 * _var + 3, _J_phi * _s))
            if self.optimize_global_normal:
                _blocks.append((_nw, _J_nw * _s))
            for _start_a, _J_a in _blocks:
                self.g_c[_start_a:_start_a + 3] += _J_a.T @ _e_curr
                for _start_b, _J_b in _blocks:
                    self.H_cc[_start_a:_start_a + 3, _start_b:_start_b + 3] += _J_a.T @ _J_b

    def solve(self, _damping):
        _L = self.landmark_count
        _H_ll = self.H_ll + _damping * np.eye(3)[None]
        try:
            _H_ll_inv = np.linalg.inv(_H_ll)
        except np.linalg.LinAlgError:
            return None
        _H_inv = scipy.sparse.bsr_matrix((_H_ll_inv, np.arange(_L), np.arange(_L + 1)), shape=(3 * _L, 3 * _L))
        _g_l = self.g_l.reshape(-1)
        if self.camera_size:
            _Y = self.W @ _H_inv
            _S = self.H_cc + _damping * np.eye(self.camera_size) - (_Y @ self.W.T).toarray()
            _rhs = -self.g_c + _Y @ _g_l
            try:
                _delta_c = cho_solve(cho_factor(_S), _rhs)
            except (LinAlgError, ValueError):
                return None
        else:
            _delta_c = np.zeros(0)
        _delta_l = _H_inv @ (-_g_l - self.W.T @ _delta_c)
        _step = np.concatenate([_delta_c, _delta_l])
        if not np.all(np.isfinite(_step)):
            return None
        return _step

    def propose(self, _step):
        _poses = dict(self.state.poses)
        for _curr, _curr_id in enumerate(self.optimized_ids):
            _poses[_curr_id] = apply_update(_step[6 * _curr:6 * _curr + 6], _poses[_curr_id])
        _global_normal = self.state.global_normal
        if self.optimize_global_normal:
            _global_normal = _global_normal + _step[6 * self.pose_count:6 * self.pose_count + 3]
        _points = self.state.points + _step[self.camera_size:].reshape(-1, 3)
        return BundleState(_poses, _points, _global_normal)

    def accept(self, _state, _cost):
        if self.optimize_global_normal:
            # The factor only depends on the direction
            _state.global_normal = _state.global_normal / np.linalg.norm(_state.global_normal)
        self.state = _state
