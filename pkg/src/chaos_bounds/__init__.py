"""Moment and tail bounds for homogeneous multilinear forms of independent
symmetric random variables, with exact oracles to check them against."""
from .bounds import (
    BoundReport,
    borell_moment_bound,
    compare_theorem2_vs_borell,
    double_factorial_odd,
    hoeffding_tail_bound,
    tail_constant_A,
    theorem1_tail_bound,
    theorem2_moment_bound,
)
from .diagram import (
    Diagram,
    DiscreteKernel,
    RowLayout,
    chaos_moment_via_diagrams,
    count_diagrams,
    embed_form,
    enumerate_diagrams,
    expected_product,
    f_gamma,
)
from .distributions import (
    MomentSequence,
    SubGaussianInput,
    builtin_inputs,
    check_subgaussian,
    hermite,
    limit_comparison,
    sharpness_form,
)
from .errors import BudgetError, FormatError
from .form_core import SymmetricMultilinearForm, evaluate, symmetrize, v_squared
from .kernels import BACKEND
from .moment_engine import (
    MonomialPolynomial,
    exact_moment_by_expansion,
    exact_moment_rademacher,
    exact_tail,
)
from .montecarlo import TailEstimate, estimate_tail, sample_z

__version__ = "0.1.0"
