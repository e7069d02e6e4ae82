"""faircut: fair mass partitions with few cuts.

Solvers for necklace splits among k thieves, stair-like halving paths in the
plane, nested fixed-direction hyperplane partitions, chessboard colourings
and generalized weighted-Voronoi fair divisions, together with brute-force
oracles and numerical non-existence certificates.
"""

from .errors import (
    BudgetExceeded,
    CertificateFailed,
    ContractError,
    DimensionError,
    FaircutError,
    InstanceTooLarge,
    NonConvergence,
    NotAdmissible,
    NoZeroFound,
    PrecisionError,
    QuantileError,
    UnsupportedShape,
)
from .measures import (
    BoxMeasure,
    ConvexRegion,
    Halfspace,
    PointMeasure,
    average_measure,
    box_measure,
    box_region,
    halfspace_ge,
    halfspace_le,
    load_measures,
    mass_of_region,
    mass_of_union,
    measure_from_json,
    point_mass_of_region,
    point_measure,
    restrict,
    uniform_box,
)
from .busolver import (
    JoinPoint,
    OctahedralPoint,
    SolverConfig,
    antipodal_zero,
    join_zero,
    product_sphere_zero,
)
from .necklace1d import (
    BeadString,
    NecklaceSplit,
    discrete_split,
    split_composite,
    split_prime,
)
from .stairpath import (
    CutVector,
    StairPartition,
    StairPath,
    halve_with_path,
    partition_masses,
    solve_equipartition,
    sphere_to_partition,
    to_path,
)
from .nested import (
    NestedPartition,
    SchemeTree,
    join_to_partition,
    parts,
    solve_nested,
    solve_nested_composite,
)
from .chessboard import (
    ChessboardColouring,
    ChessboardSpec,
    admissible,
    colour_of,
    solve_chessboard,
)
from .voronoifair import (
    LinearFunctions,
    SimplexFunctions,
    capacities,
    cells,
    solve_fair,
    weights_from_capacities,
)
from .counterexamples import (
    NonExistenceCertificate,
    refute_one_one,
    refute_orthant,
)
from .oracle import OracleReport, oracle_grid_equipartition, oracle_necklace
from .estimators import (
    ChessboardHalver,
    NecklaceSplitter,
    NestedPartitioner,
    StairPathHalver,
    VoronoiFairSplitter,
)

__version__ = "0.1.0"

__all__ = [
    "BoxMeasure", "ConvexRegion", "Halfspace", "PointMeasure",
    "average_measure", "box_measure", "box_region", "halfspace_ge",
    "halfspace_le", "load_measures", "mass_of_region", "mass_of_union",
    "measure_from_json", "point_mass_of_region", "point_measure", "restrict",
    "uniform_box",
    "JoinPoint", "OctahedralPoint", "SolverConfig", "antipodal_zero",
    "join_zero", "product_sphere_zero",
    "BeadString", "NecklaceSplit", "discrete_split", "split_composite",
    "split_prime",
    "CutVector", "StairPartition", "StairPath", "halve_with_path",
    "partition_masses", "solve_equipartition", "sphere_to_partition",
    "to_path",
    "NestedPartition", "SchemeTree", "join_to_partition", "parts",
    "solve_nested", "solve_nested_composite",
    "ChessboardColouring", "ChessboardSpec", "admissible", "colour_of",
    "solve_chessboard",
    "LinearFunctions", "SimplexFunctions", "capacities", "cells",
    "solve_fair", "weights_from_capacities",
    "NonExistenceCertificate", "refute_one_one", "refute_orthant",
    "OracleReport", "oracle_grid_equipartition", "oracle_necklace",
    "ChessboardHalver", "NecklaceSplitter", "NestedPartitioner",
    "StairPathHalver", "VoronoiFairSplitter",
    "FaircutError", "DimensionError", "PrecisionError", "ContractError",
    "NoZeroFound", "QuantileError", "InstanceTooLarge", "UnsupportedShape",
    "NotAdmissible", "NonConvergence", "CertificateFailed", "BudgetExceeded",
]
