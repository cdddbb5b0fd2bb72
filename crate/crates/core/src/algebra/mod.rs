//! Exact and certified-numeric arithmetic kernels.

pub mod bigreal;
pub mod cyclotomic;
pub mod poly;
pub mod ring;
pub mod roots;
pub mod surd;

pub use bigreal::{BigComplex, BigReal};
pub use cyclotomic::CyclotomicField;
pub use poly::Polynomial;
pub use ring::{CompositeRing, RingElement};
pub use roots::RealRoot;
pub use surd::{sqrt_in_cyclotomic, QuadraticForm};
