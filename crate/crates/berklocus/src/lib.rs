//! Fixed-point loci of rational maps on the Berkovich projective line over
//! finite extensions of `Q_p`, computed with exact arithmetic.

pub mod berkmap;
pub mod error;
pub mod fixlocus;
pub mod oracle;
pub mod exactfield;
pub mod poly;
pub mod residue;
pub mod roots;

pub use berkmap::{LocalData, RationalMapK, TypeIIPoint};
pub use error::{Error, Result};
pub use exactfield::{FieldElement, KPoly, PrimeContext, Val};
pub use poly::{Field, Poly};
pub use residue::{FqElement, FqPoly, FqRationalMap};

/// Polynomials over `Q`.
pub type QPoly = Poly<num_rational::BigRational>;
