//! Hierarchy generators.

pub mod akns;
pub mod gardner;
pub mod goodvar;
pub mod kdv;
pub mod poisson;
pub mod reference;
pub mod table;

pub use akns::{akns_iterates, akns_table, nls_reality, reduce_table, AknsTable, Reduction};
pub use gardner::{
    flux_of, gardner_hamiltonians, kdv_from_gardner_limit, kdv_limit_of, miura_polynomial, mkdv_hamiltonians,
    GardnerTable, MkdvTable,
};
pub use goodvar::{good_variable_equation, normalize_s, pulled_form, u_in_v, w_in_v};
pub use kdv::{hamiltonian_from_gradient, lenard_operator, lenard_sequence, leading_terms, KdvTable};
pub use poisson::{magri_miura_identity, magri_operator, poisson_bracket, BracketReport, BracketStructure};
pub use table::{build_table, Entry, Family, HierarchyTable};
