//! Linear time-invariant models: transfer functions, continuous and discrete
//! state space, ZOH discretization, excitation signals and time/frequency
//! simulation.

mod excitation;
mod model;
mod random;
mod signal;
mod sim;

pub use excitation::{colored_noise, lfsr_taps, prbs, white_noise, Lfsr};
pub use model::{
    c2d_zoh, second_order_tf, tf_to_ss, ContinuousStateSpace, DiscreteStateSpace, ModelFile,
    TransferFunction,
};
pub use random::{random_stable_matrix, random_stable_model, MIN_POLE_SEPARATION};
pub use signal::{Channel, SignalRecord};
pub use sim::{
    frequency_response, log_grid, samples_for_duration, simulate, simulate_outputs,
    simulate_with_noise, step_response, Disturbances,
};
