//! Exact eigenpolynomials of exactly-solvable differential operators and the
//! asymptotic geometry of their roots.

pub mod analysis;
pub mod eigensolver;
pub mod operator;
pub mod polyalg;
pub mod rootfinder;
