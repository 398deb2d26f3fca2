//! Dense networks with manual backpropagation, the Adam optimizer, soft
//! target tracking, and a uniform experience-replay ring. Everything here
//! is driven by an externally supplied RNG so runs stay reproducible.

mod mlp;
mod optim;
mod replay;

pub use mlp::{ForwardCache, Gradients, Mlp, OutputActivation};
pub use optim::{soft_update, Adam};
pub use replay::{ReplayBuffer, Transition};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NeuroError {
    #[error("a network needs an input and an output width")]
    TooFewLayers,
    #[error("layer widths must be positive")]
    ZeroWidth,
    #[error("checkpoint io: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint parse: {0}")]
    Parse(String),
}
