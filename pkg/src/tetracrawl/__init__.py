"""Kinematics, gait generation and teleoperation for a soft tetrahedral crawler."""

from tetracrawl.config import (
    ConfigError,
    SessionConfig,
    config_hash,
    default_config,
    load_config,
    to_sim_params,
)
from tetracrawl.gait_engine import (
    GaitClock,
    GaitMode,
    GaitParams,
    LimbCommand,
    compile_tick,
    export_gait_csv,
    gait_targets,
)
from tetracrawl.limb_kinematics import (
    ConfigPair,
    JointLengths,
    LimbHtm,
    LimbPoint,
    ModuleParams,
    PmaPressures,
    WorkspaceError,
    config_from_joint,
    fk_htm,
    fk_point,
    ik_planar,
    joint_from_config,
    pressure_from_joint,
)
from tetracrawl.locomotion_sim import (
    Pose2D,
    SimParams,
    SimState,
    Simulator,
    TelemetryFrame,
    TelemetryLogError,
    TelemetryWriter,
    read_telemetry,
)
from tetracrawl.teleop_map import (
    JoystickState,
    TeleopFidelity,
    TeleopParams,
    classify,
    radii,
)
from tetracrawl.tetra_frames import (
    DegenerateSupportError,
    GlobalPose,
    LimbId,
    TetraGeometry,
    cog_estimate,
    stability_margin,
)
from tetracrawl.topple import (
    CANONICAL,
    ManeuverStep,
    OrientationState,
    RemapTable,
    apply_remap,
    correction_maneuver,
    remap_for,
)

__all__ = [
    "CANONICAL",
    "ConfigError",
    "ConfigPair",
    "DegenerateSupportError",
    "GaitClock",
    "GaitMode",
    "GaitParams",
    "GlobalPose",
    "JointLengths",
    "JoystickState",
    "LimbCommand",
    "LimbHtm",
    "LimbId",
    "LimbPoint",
    "ManeuverStep",
    "ModuleParams",
    "OrientationState",
    "PmaPressures",
    "Pose2D",
    "RemapTable",
    "SessionConfig",
    "SimParams",
    "SimState",
    "Simulator",
    "TelemetryFrame",
    "TelemetryLogError",
    "TelemetryWriter",
    "TeleopFidelity",
    "TeleopParams",
    "TetraGeometry",
    "WorkspaceError",
    "apply_remap",
    "classify",
    "cog_estimate",
    "compile_tick",
    "config_from_joint",
    "config_hash",
    "correction_maneuver",
    "default_config",
    "export_gait_csv",
    "fk_htm",
    "fk_point",
    "gait_targets",
    "ik_planar",
    "joint_from_config",
    "load_config",
    "pressure_from_joint",
    "radii",
    "read_telemetry",
    "remap_for",
    "stability_margin",
    "to_sim_params",
]
