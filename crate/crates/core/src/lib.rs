//! Exact symbolic kernel for plane loci and envelopes.
//!
//! A ruler-and-compass construction is translated into a system of
//! polynomial equations over the rationals; Groebner-basis elimination
//! projects the system onto the coordinates of a tracing point (or the
//! incidence equation of a tracing line) and yields the implicit
//! algebraic equation of the traced curve. All algebra is exact; the
//! numeric layer exists only to cross-check and to draw.
//!
//! Module map:
//! - [`vars`], [`monomial`], [`order`], [`poly`], [`gcd`]: sparse exact
//!   multivariate polynomial arithmetic and normal forms.
//! - [`groebner`]: Buchberger's algorithm, reduction, block-order
//!   elimination with resource budgets.
//! - [`geom`]: construction programs and their algebraization.
//! - [`locus`], [`envelope`]: the two pipelines built on elimination.
//! - [`dsl`]: the construction script language.
//! - [`render`]: marching-squares rasterization, SVG and CSV output.

pub mod dsl;
pub mod envelope;
pub mod gcd;
pub mod geom;
pub mod groebner;
pub mod locus;
pub mod monomial;
mod numeric;
pub mod order;
pub mod poly;
pub mod rational;
pub mod render;
pub mod text;
pub mod vars;

pub use poly::MultiPoly;
pub use rational::Rational;
pub use vars::VarRegistry;
