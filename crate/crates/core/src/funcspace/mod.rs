//! Analytic functions on the unit disk and their norms.

pub mod expr;
pub mod grid;
pub mod norms;
pub mod parse;
pub mod quad;

pub use expr::{AnalyticFn, Expr, C64};
pub use grid::{make_grid, DiskGrid, GridConfig};
pub use norms::{
    atomic_function, atomic_l1_bound, b1_surrogate_norm, normalized_area_integral, zygmund_norm, zygmund_seminorm,
    B1Config, NormEstimate,
};
pub use parse::{parse_complex, parse_fn};
