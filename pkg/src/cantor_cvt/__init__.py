"""
cantor_cvt
==========

Centroidal Voronoi tessellations (CVTs) of self-similar Cantor measures
on the line.

A CVT with ``n`` generators is searched for among partitions of the
level-``m`` cylinder intervals into ``n`` contiguous blocks: a partition
qualifies when every Voronoi midpoint between consecutive block centroids
lands in the gap separating the two blocks.

Modules
-------
ifs_model
    Measure parameters, exact moments, cylinders and prefix-sum tables.
cvt_search
    Complete enumeration of CVTs at a level, level escalation, best CVT.
oracle
    Lloyd iteration, dynamic-programming optimum and truncated moments,
    used to cross-check the two modules above.
generalized
    Level-dependent families of maps (eventually periodic).
cli
    ``cantor-cvt`` command line.
"""

from .cvt_search import (
    BlockPartition,
    CvtResult,
    SearchConfig,
    best_cvt,
    enumerate_cvts,
    find_cvts,
    gap_condition,
    lift_partition,
    reflect_partition,
)
from .errors import (
    CantorCVTError,
    EmptyCell,
    EmptyList,
    IndexOutOfRange,
    LevelTooLarge,
    NoCvtFoundUpToMMax,
    NTooLarge,
    OverlappingCylinders,
    ParamOutOfRange,
    PartitionMismatch,
    SpecInvalid,
    SymmetryPruningInvalid,
)
from .generalized import (
    AffineMap,
    GeneralizedIfsSpec,
    TailMoments,
    build_table_generalized,
    find_cvts_generalized,
    tail_moments,
)
from .ifs_model import (
    CylinderTable,
    IfsModel,
    Word,
    block_centroid,
    block_distortion,
    build_table,
    cylinder,
    expectation,
    index_from_word,
    partition_distortion,
    second_moment,
    validate_params,
    variance,
    word_from_index,
)
from .oracle import (
    AtomMeasure,
    discretize,
    dp_optimal_blocks,
    lloyd,
    lloyd_restarts,
    moments_by_truncation,
)

__version__ = "0.1.0"
