"""Holonomic motion control: jerk-limited profiles, pure pursuit and a
time-varying PID on a simulated mecanum robot."""

from .controller import ControllerGains, ControllerState, pid_step, pitdt_step, scale_starting_error
from .geometry import Path, Pose2D, Twist2D
from .orchestrator import Mode, RunPlan, TrialRecord, run_trial
from .profile import MotionProfile, RobotConstraints, TooShort, build_holonomic_profiles, build_profile
from .simulator import Plant, PlantConfig, plant_step

__version__ = "0.1.0"

__all__ = [
    "ControllerGains", "ControllerState", "pid_step", "pitdt_step", "scale_starting_error",
    "Path", "Pose2D", "Twist2D",
    "Mode", "RunPlan", "TrialRecord", "run_trial",
    "MotionProfile", "RobotConstraints", "TooShort", "build_holonomic_profiles", "build_profile",
    "Plant", "PlantConfig", "plant_step",
]
