"""Multi-agent estimation and circumnavigation of a moving circular target."""
from .analysis import theorem_report, validate_beta_dynamics
from .config import load_config, parse_config, render
from .controller import ControlParams, control_input, limit
from .estimator import (
    CircleEstimate,
    Measurement,
    RateEstimate,
    estimate_rates,
    fit_circle,
    fuse_estimates,
    init_from_satellite,
)
from .geometry import Angle, Vec2, bearing, ccw_angle, rotate90, signed_boundary_distance
from .kernels import BACKEND as KERNEL_BACKEND
from .network import FaultSchedule, RingTopology, exchange, incidence_ring
from .sim import SimConfig, SimLog, consensus_predict, metrics, place_agents_initial, run, step
from .target import BoundaryPerturbation, TargetState, TargetTrajectory, derivative_bounds, load_waypoints, measured_distance, sample

__version__ = "0.1.0"
