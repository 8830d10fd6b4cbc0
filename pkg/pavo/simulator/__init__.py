"""
This package simulates degenerate pavement scenes: a near-planar landmark field seen by a downward-looking
stereo camera, with labeled outliers and measured surface normals
"""
from pavo.simulator.config import SceneConfig
from pavo.simulator.scene import generate_scene, generate_trajectory, render_observations, estimate_frame_normal, \
    DegenerateCloud, Scene
from pavo.simulator.sequence import simulate_sequence, SimulatedSequence

__author__ = 'Nicklas Borjesson'
