//! Backward symbolic execution of loop-free games whose ODEs have
//! polynomial solutions.

mod failure;
mod ode;
mod wp;

pub use crate::ir::fresh;
pub use failure::{ToolFailureKind, ToolFailureReason};
pub use ode::{solve_ode, solve_ode_in, OdeSolution};
pub use wp::{eliminate_modalities, wp_box, wp_diamond, WpResult};
