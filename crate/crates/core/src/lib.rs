//! Exact computations with twisted de Rham complexes `d + df∧` on polynomial
//! forms.

pub mod acceptance;
pub mod constraints;
pub mod dwork;
pub mod error;
pub mod families;
pub mod form;
pub mod groebner;
pub mod integral;
pub mod linalg;
pub mod milnor;
pub mod parse;
pub mod poly;
pub mod ratfunc;
pub mod ring;

pub use error::{Error, Result};
pub use form::{Form, IndexSet, TwistedComplex};
pub use poly::{Monomial, Poly};
pub use ring::{PiAdicRing, Ring, RingElement, RingHom, RingSpec, Value};
