//! Semantic analysis and the typed program it produces.

mod analyze;
pub mod bounded;
pub mod consteval;
mod expr;
pub mod flow;
pub mod ops;
pub mod signature;
mod stmt;
pub mod tast;
pub mod types;

pub use analyze::{analyze_unit, external_imports, Analysis, Mode};
pub use bounded::{check_bounded_execution, module_step_bounds, step_bound};
pub use consteval::fold_constant;
pub use expr::range_of;
pub use flow::{message_flow, FlowEdge};
pub use signature::{build_signatures, ModuleSignature};
