//! Distribution of prime-ideal norms of an abelian number field K in
//! residue classes, and the Barban-Davenport-Halberstam variance
//!
//! ```text
//! V(x, Q) = sum_{q <= Q} sum_{a in G_q} (psi_K(x; q, a) - x / phi_K(q))^2
//! ```
//!
//! together with the exact identities and inequalities that bound it.

pub mod arith;
pub mod characters;
pub mod cli;
pub mod error;
pub mod exec;
pub mod field;
pub mod galois;
pub mod oracle;
pub mod report;
pub mod sieve;
pub mod stats;
pub mod sum;

pub use error::{Error, Result};
pub use exec::Exec;
pub use field::{parse_field, FieldKind, FieldSpec, SplitData};
