"""Hierarchical locally recoverable codes from Artin-Schreier and Kummer fibered surfaces."""

__version__ = "0.1.0"

from .code import (  # noqa: E402
    Code,
    CodeSpec,
    GeneratorMatrix,
    distance_bound,
    generator_matrix,
    monomial_basis,
    param_report,
    validate_spec,
)
from .gf import AdditiveLHS, Field, FieldElement, field_of_order, make_field  # noqa: E402
from .recovery import build_hierarchy, recover_lower, recover_middle, simulate  # noqa: E402
from .surface import (  # noqa: E402
    ArtinSchreierSurface,
    BivariatePoly,
    KummerProductForm,
    KummerSurface,
    as_example_surface,
    evaluation_set,
    gamma_set,
    hermitian_cone_surface,
    kummer_example_surface,
)
from .verify import (  # noqa: E402
    check_as_census,
    check_bound,
    check_point_counts,
    min_distance_exhaustive,
    min_weight_sampled,
)
