//! Freezing majority cellular automata with L-shaped neighborhoods on the
//! torus: simulation, fast prediction for one-offset neighborhoods, and a
//! compiler from monotone circuits to initial configurations.

pub mod automaton;
pub mod circuit;
pub mod cli;
pub mod error;
pub mod grid;
pub mod predict;

pub use automaton::{
    local_rule, plus_times, predict_by_simulation, run_to_fixed_point, simulate, step, step_with_threads,
};
pub use circuit::{
    evaluate_circuit, normalize_fanout, parse_circuit, print_circuit, random_circuit, GateKind,
    MonotoneCircuit, Node,
};
pub use error::{Error, Result};
pub use grid::{Cell, Configuration, LNeighborhood, State};
pub use predict::{
    build_cell_digraph, cycle_vertices, fast_schedule, flip_times, locate, matrix_power_changed,
    matrix_power_classify, matrix_power_flip_times, matrix_power_predictor, never_flip_set, predict_fast,
    subgrid_map, CellDigraph, FlipEntry, FlipSchedule, MatrixClass, SubgridMap,
};
pub mod compile;

pub use compile::{
    build_gadget_set, check_compiled, compile, layout_circuit, load_gadget_set, verify_gadget, wire_params,
    CompiledInstance, GadgetSet, NeighborhoodFamily, Placement, Tile, TileKind, VerifyReport, WireParams,
};
