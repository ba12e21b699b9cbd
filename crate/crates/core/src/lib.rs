//! Exact computer algebra for quantized quadratic Hamiltonians, the
//! Witten–Kontsevich potential and the genus-zero Lagrangian cone.

pub mod acceptance;
pub mod cone;
pub mod correlators;
pub mod error;
pub mod frobenius;
pub mod hspace;
pub mod localization;
pub mod oracle;
pub mod quantization;
pub mod sampling;
pub mod scalar;
pub mod series;
pub mod virasoro;

pub use cone::{
    check_on_cone, cone_homogeneity_check, cone_point, genus0_potential, ConeCheck, ConePoint, ConeTruncation,
};
pub use correlators::{CorrelatorKey, CorrelatorTable, Coverage, Insertion};
pub use error::{Error, Result};
pub use frobenius::{frobenius_pair, FrobeniusAlgebra, Target};
pub use hspace::{
    dilaton_shift, from_darboux, inverse_dilaton_shift, omega, omega_series, to_darboux, DarbouxVector, HElement,
};
pub use localization::{
    euler_inverse, ev_infty_push, fixed_locus_contribution, theorem1_verify, EquivariantClass, FixedLocusCase,
    FixedLocusContribution, PushForward, TheoremCheck,
};
pub use oracle::{dvv_correlator, genus0_point_integral, DvvOracle, StringOracle};
pub use quantization::{
    apply, quadratic_hamiltonian, quantize, Coord, DiffOperator, GenusExpandedPotential, InfSymplectic, PotentialJson,
    QuadraticForm,
};
pub use scalar::{half_integer_gamma_ratio, Scalar};
pub use series::{Monomial, SeriesSpace, Substitution, TruncatedSeries, Truncation};
pub use virasoro::{
    assemble_potential, constraint_residual, genus0_point_table, quantized_virasoro, solve_virasoro, virasoro_generator,
};
