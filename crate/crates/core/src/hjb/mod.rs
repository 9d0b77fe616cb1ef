//! Value function of the obstacle problem, free boundary, Hamiltonian flows
//! and the transport maps they induce.

mod flow;
mod maps;
mod value;

pub use flow::{
    hamiltonian, hamiltonian_flow, FlowDirection, FlowSample, FlowTrajectory, HamiltonianValue, StopReason,
};
pub use maps::{one_sided_gradients, node_gradient, transport_maps, MapEntry, TransportMaps};
pub use value::{
    dual_value_eulerian, free_boundary, solve_value_function, solve_value_function_with, value_on_graph,
    BoundaryKind, FreeBoundary, ValueField, CONTACT_TOL,
};
