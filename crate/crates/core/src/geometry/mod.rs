//! Exact differential geometry of CP¹ with the Fubini–Study form
//! `ω = i dz∧dz̄ / (1 + |z|²)²`.
//!
//! Sign conventions used throughout the crate:
//! - `df = ω(X_f, ·)`, so `X¹ = -i ρ² ∂̄f`;
//! - `{f, g} = ω(X_f, X_g) = -X_f.g`;
//! - `|dz|²_K = ρ²`, `|dz^{1/2}|²_δ = ρ`.

mod canonical;
mod field;
mod forms;
mod function;

pub use canonical::{
    b_j, b_j_in_frame, canonical_commutator_defect, chern_canonical, d_canonical, d_delta, CanonicalSection, HoloFrame,
};
pub use field::{hamiltonian_field, laplacian, poisson_bracket, VectorField};
pub use forms::{integrate_function, kahler_form, monomial_integral, FsForm, OneForm, TwoForm};
pub use function::{CoeffTable, Fs, FsFunction, FsFunctionF64};
