"""Two-layer hierarchical coded caching with coded placement.

Byte-level placement/delivery simulation, exact rational rate algebra,
memory sharing, and rate calculators for the published comparison schemes.
"""

from .errors import (
    ConstraintError,
    DecodeError,
    DegenerateError,
    DemandError,
    DivisibilityError,
    HierCacheError,
    HullError,
    RangeError,
    ReconstructError,
    ScopeError,
    SingularError,
)
from .model import (
    ChunkId,
    CodedSymbol,
    DemandProfile,
    FilePartition,
    HierConfig,
    build_demand_profile,
    make_partition,
    min_file_bytes,
    mirror_of_user,
    users_of_mirror,
    validate_config,
)
from .hierarchy import (
    MeasuredRates,
    Message,
    Placement,
    SimulationResult,
    TransmissionLog,
    make_library,
    measured_rates,
    mirror_deliver,
    mirror_reconstruct,
    place,
    run_simulation,
    server_deliver,
    user_decode,
)
from .analytics import (
    ConvexWeights,
    RatePoint,
    RegionReport,
    coding_delay,
    composite,
    concurrent_r2,
    global_memory,
    m2_from_m1,
    memory_point,
    memory_share,
    rate_r1,
    rate_r2,
    rate_r2_worst,
    region_classify,
)
from .single import (
    SingleMirrorConfig,
    decode_single,
    deliver_single,
    dominance_gap,
    place_single,
    run_single_simulation,
    single_config,
)
from .baselines import (
    Scheme,
    knmd_optimal_tuple,
    knmd_rates,
    kwc_rates,
    lzx_rates,
    r_decentralized,
    wwcy_best,
    wwcy_rates,
    zwxwl_envelope,
    zwxwl_point,
    zwxwl_rates,
    zwxwll_best,
    zwxwll_rates,
)

__version__ = "0.1.0"
