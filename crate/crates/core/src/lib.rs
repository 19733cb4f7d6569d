//! Exact-arithmetic toolkit for the twisted Heisenberg–Virasoro algebra:
//! the algebra itself, its weight modules on finite index windows, the
//! constraint systems that classify them, and truncated Verma modules.

pub mod algebra;
pub mod classifier;
pub mod linalg;
pub mod modules;
pub mod poly;
pub mod rational;
pub mod verma;

pub use algebra::{bracket, jacobiator, vir_embed, ElementDegree, Generator, LieElement};
pub use rational::{format_rational, parse_rational, Rational};
