//! Optimal control: control fields, state-transfer problems with adjoint
//! gradients, and the GRAPE, GROUP and dressed GROUP optimizers.

mod basis;
mod field;
mod optimize;
mod problem;
mod system;

pub use basis::{make_rand_sine_basis_maker, make_sigmoid_shape, make_sine_basis, BasisMaker, GroupBasis};
pub use field::{make_time_control, ControlField};
pub use optimize::{
    default_restarter, default_stopper, dgroup_optimize, grape_optimize, group_gradient, group_optimize,
    make_collector, make_dressed_restarter, make_interpolating_step_size_finder, make_stopper, minimize,
    project_gradient, Collector, Direction, DressedRestarter, GrapeObjective, GroupObjective, InterpolatingStepSize,
    Lbfgs, Metric, Objective, OptimizationReport, OptimizerOptions, OptimizerView, Restart, Status, Stopper,
    LBFGS_MEMORY,
};
pub use problem::{
    bounds_cost, gradient_h1, h1_inner, l2_inner, regularization_cost, Evaluation, SoftBounds, StateTransferProblem,
};
pub use system::{ControlSystem, FewModeSystem, GpeSystem, LatticeSystem, PairSystem, Sensitivity};
