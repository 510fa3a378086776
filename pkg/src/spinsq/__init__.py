"""spinsq: collective-moment entanglement criteria for ensembles of spin-j
particles, with state constructors, polytope geometry, measurement simulation
and threshold scans."""

from .spin_core import (
    HalfInt,
    SingleParticleReport,
    SpinOperators,
    bloch_vector,
    nematic_q0,
    nematic_tensor,
    rotation_unitary,
    single_particle_report,
    spin_coherent_state,
    spin_operators,
)
from .states import (
    CapacityError,
    EnsembleShape,
    ExtremalSpec,
    QuantumState,
    alpha_product_state,
    coherent_ensemble,
    collective_operator,
    collective_rotation,
    collective_triple,
    completely_mixed,
    dicke_state,
    extremal_state,
    from_spec,
    ground_state,
    load_state,
    mix_with_white_noise,
    rotate_state,
    rotated_average,
    singlet_state,
    state_from_json,
    state_to_json,
    thermal_state,
)
from .moments import (
    MomentMatrices,
    MomentSet,
    ReducedStates,
    completely_mixed_moments,
    dicke_moments,
    frame_with_z_along,
    moment_matrices,
    moment_set,
    moment_set_from_matrices,
    random_frame,
    random_frames,
    reduced_states,
    singlet_moments,
)
from .criteria import (
    CriteriaReport,
    CriterionRecord,
    IndexSubset,
    PPTReport,
    SqueezingReport,
    dicke_local_moment,
    evaluate_coordinate_free,
    evaluate_optimal_set,
    frame_scan_margins,
    map_to_qubit_moments,
    mapped_criteria,
    planar_criterion,
    ppt_report,
    squeezing_parameters,
    two_body_criterion,
)
from .polytope import FacetMargins, PolytopeVertices, facet_mesh, membership, vertices
from .measurement import (
    EstimatedMoments,
    MeasurementRecord,
    estimate_moment_set,
    simulate_population_measurement,
)
from .pipeline import (
    ScanResult,
    named_hamiltonian,
    noise_threshold,
    reference_table,
    temperature_thresholds,
)

__version__ = "0.1.0"
