//! Output generation: C translation units and the auxiliary text formats.

pub mod aux;
pub mod c;
pub mod interface;

pub use aux::{emit_deps, emit_error_map, emit_flow_dot, parse_error_map, MapEntry};
pub use c::emit_c;
pub use interface::{emit_interface, parse_interface, InterfaceError};
