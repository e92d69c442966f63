//! One-dimensional flux reconstruction with a swappable approximation basis:
//! nodal polynomials, Gaussian and other radial basis functions in their
//! direct form, and a flat-limit-stable Gaussian basis.
//!
//! Modules build on one another bottom-up: [`linalg`] → [`rbf`] →
//! [`element`] → [`solver`] / [`analysis`] → [`cli`].

pub mod analysis;
pub mod cli;
pub mod element;
pub mod io;
pub mod linalg;
pub mod rbf;
pub mod solver;
