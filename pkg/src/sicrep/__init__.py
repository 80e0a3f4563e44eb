"""SIC representation of quantum states: SIC construction, Born rule in
probability coordinates, certainty experiments and the exact constraint
system on the Urgleichung constants."""

from .hermitian import (
    eigenvalues_hermitian,
    haar_random_pure,
    is_psd,
    onb_containing,
    random_ginibre_density,
    random_povm,
    trace_inner,
)
from .whsic import (
    SearchFailure,
    SearchReport,
    SicPovm,
    displacement_operator,
    frame_potential,
    known_fiducial,
    search_fiducial,
    sic_for_dimension,
    sic_from_fiducial,
    verify_sic,
)
from .representation import (
    ConditionalMatrix,
    TripleProducts,
    UrungleichungViolation,
    basis_states,
    conditional_matrix,
    is_valid_quantum_prob,
    probs_to_state,
    purity_residuals,
    state_to_probs,
    total_probability,
    triple_products,
    urgleichung,
    urungleichung_check,
)
from .certainty import (
    CertaintyExperiment,
    build_certainty_experiment,
    gram_matrix,
    isu_check,
    universal_angle,
)
from .urtheory import (
    TheoryParams,
    angle_formula,
    cos_admissibility,
    dimension_from,
    q_family_table,
    solve_constants,
)

__version__ = "0.1.0"
