//! Frobenius traces of `y^2 = x^8 + c` and `y^2 = x^7 - c*x` from their
//! Hasse-Witt matrices, trace statistics over large prime ranges, and the
//! matching theoretical side: Haar moments of explicit Sato-Tate groups and
//! fixed subalgebras of the endomorphism algebra.

pub mod cmat;
pub mod curve;
pub mod endo;
pub mod forms;
pub mod hasse_witt;
pub mod modp;
pub mod oracle;
pub mod scan;
pub mod sieve;
pub mod stats;
pub mod stgroup;

pub use curve::{CurveError, CurveFamily, Family, Rational};
pub use endo::{lattice_report, parse_words, AlgebraProfile, EndoContext, EndoError, FixedAlgebra};
pub use forms::{cornacchia, solve_form_normalized, FormError, FormSolution};
pub use hasse_witt::{
    binom_half, binom_quarter, binom_sixth, hw_matrix, trace, trace_c1, trace_c2, trace_residue, HasseWittMatrix,
    HwError, TraceValue,
};
pub use modp::{legendre, ModpError, PrimeField, Residue, Sqrt, SqrtStrategy};
pub use oracle::{naive_binom_mod, naive_count, naive_hasse_witt, naive_trace, AffineModel};
pub use scan::{scan, scan_range, ScanError, ScanOptions};
pub use sieve::sieve_segment;
pub use stats::{emit_csv, split_filter_for, MomentAccumulator, ScanReport, SplitField, SplitFilter, StatsError};
pub use stgroup::{
    binomial_convolution, builtin_group, component_group_profile, enumerate_components, haar_moments, haar_moments_all,
    scaled_moments, Coefficient, ComponentProfile, GroupName, MomentSequence, STGroup, StError,
};
