# __init__.py

"""
__init__ module for the `foldsurf` package.
"""

# Version of the foldsurf package
__version__ = "0.1.0"
__author__ = "foldsurf developers"

# Build the namespace
from foldsurf.common import (
    FoldSurfError,
    CircuitError,
    DetectorError,
    DecompositionError,
    MatchingError,
    NondeterminismError,
    FormatError,
    PlanError,
    xor_prob,
    weight_from_probability,
)
from foldsurf.model import (
    Coord,
    Pauli,
    SparsePauli,
    MidCycleLabel,
    Timestamp,
    ResetLocation,
    MeasurementLocation,
    commutes,
    pauli_mul,
)
from foldsurf.circuit import (
    Circuit,
    Instruction,
    InstructionKind,
    Layout,
    NoiseChannel,
    NoiseKind,
    RoundKind,
    apply_noise,
    build_layout,
    build_rounds,
    build_s2,
    build_x_memory,
)
from foldsurf.trajectory import (
    Detector,
    DetectorClass,
    Observable,
    StabilizerTrajectory,
    TrajectoryStatus,
    detecting_region,
    enumerate_detectors,
    logical_observable,
    propagate_trajectory,
)
from foldsurf.simulator import (
    FrameSimulator,
    ShotRecord,
    Tableau,
    canonical_form,
    reference_run,
    rotated_stabilizer_check,
    sample_shots,
    stabilizer_group_at,
)
from foldsurf.dem import (
    DecodingHypergraph,
    ErrorEffect,
    ErrorLocation,
    build_hypergraph,
    decompose_total_error,
    effect_via_frame,
    effect_via_regions,
)
from foldsurf.matcher import MatchingGraph, MatchResult, compile_matching_graph, decode
from foldsurf.pipeline import (
    DecodeResult,
    DecoderConfig,
    DecoderMode,
    DecodingGraphs,
    decode_batch,
    decode_shot,
    decode_shot_fr,
    decode_shot_pr,
    infer_and_reweight,
    vtb_decode,
)
from foldsurf.aod import (
    Orientation,
    RearrangementPlan,
    check_diagonal_addressing,
    plan_reflection,
    plan_rotation,
    verify_plan,
)
from foldsurf.parser import (
    circuit_digest,
    format_circuit,
    format_dem,
    format_detectors,
    format_shots,
    read_circuit,
    read_shots,
)
from foldsurf.harness import (
    CompiledExperiment,
    ExperimentSpec,
    Family,
    ResultRow,
    derive_seed,
    likelihood_interval,
    load_sweep_config,
    run_experiment,
    sweep,
    verify_circuit,
)
