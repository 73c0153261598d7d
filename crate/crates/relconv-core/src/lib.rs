//! Exact computational algebra for finite relational groupoids.
//!
//! A relational groupoid is a finite carrier set `G` together with a ternary
//! relation `L ⊆ G³` and an involution `I : G → G`, subject to six axioms
//! that generalize the multiplication graph of an ordinary groupoid. This
//! crate builds the derived structure relations, checks the axioms with
//! explicit witnesses, reduces a relational groupoid to its quotient
//! groupoid, classifies relational Haar systems, and realizes the associated
//! convolution algebras — all in exact rational arithmetic. Floating point
//! appears only in [`representation`], which estimates reduced operator
//! norms by power iteration.
//!
//! The crate is desk-scale by design: carriers are capped at 64 elements so
//! element sets fit in machine-word bitmasks and every check can afford to
//! be an exhaustive scan.

pub mod convolution;
pub mod generators;
pub mod groupoid;
pub mod haar;
pub mod reduction;
pub mod rel;
pub mod representation;
pub mod scalar;
pub mod table;

mod bits;
mod exec;

pub use groupoid::RelationalGroupoid;
pub use rel::{FiniteSet, Relation};
pub use scalar::{CRat, Rat};
pub use table::GroupoidTable;
