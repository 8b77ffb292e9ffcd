"""Anti-Wick calculus on truncated Wiener-Ito chaos expansions."""
from ._kernels import BACKEND
from .basis import L2Function, TimeGrid, indicator, inner_product, make_uniform_grid, project, unit
from .chaos import (
    ChaosVector,
    constant,
    evaluate,
    expectation,
    gamma_scale,
    gaussian_of,
    norm_g,
    pair_expectation,
    pointwise_product,
    stochastic_exponential,
    wick_power,
    wick_product,
)
from .malliavin import annihilate, derivative_field, iterated_pairing, smoothness_norm_identity
from .products import (
    PhiSeries,
    anti_wick_gamma,
    anti_wick_series,
    antiwick_to_wick,
    associativity_probe,
    circle_phi,
    l1_bound_check,
    wick_to_antiwick,
)
from .heat import (
    McConfig,
    Poly1D,
    example41_check,
    functional_calculus,
    heat_solution_poly,
    heat_solution_quadrature,
    mc_pairing_check,
    poly_of_chaos,
    theorem42_check,
    theorem43_check,
)

__version__ = "0.1.0"
