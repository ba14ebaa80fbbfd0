"""Two-parameter persistence landscapes and their statistics."""

from ._kernels import backend
from .bifilt import (
    BifilteredComplex,
    GridFunction,
    MonotoneReport,
    Simplex,
    SliceFiltration,
    build_closure_bicomplex,
    build_function_rips,
    minimal_elements,
    push_to_line,
    snap_up_to_grid,
    translate_grades,
    validate_monotone,
    validate_weight,
)
from .datagen import (
    SampleSet,
    derive_seed,
    gaussian_kde,
    gen_circles,
    gen_disc,
    gen_kde_surface,
    knn_codensity,
    trimodal_sample,
)
from .errors import InputError, InternalError
from .grid import (
    LandscapeGrid,
    Region,
    compute_landscape_grid,
    eval_point,
    lipschitz_excess,
    load_landscape_grid,
    recover_rank_from_landscape,
    rescale_bigrades,
    save_landscape_grid,
)
from .landscape import landscape_eval, landscape_profile, tent
from .rectangles import (
    Rect,
    as_rect_array,
    rect_interleaved,
    rect_interleaving_distance,
    rect_landscape,
    rect_landscape_grid,
    rect_rank,
    shift_rects,
    wasserstein_pw,
)
from .reduction import Bar, Barcode, brute_force_rank, compute_barcode
from .stats import (
    FunctionalSpec,
    confidence_interval,
    export_features_csv,
    functional_integral,
    mean_landscape,
    permutation_test,
    q_distance,
    two_sample_t,
    vectorize,
)

__version__ = "0.1.0"
