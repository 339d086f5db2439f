//! Actor-critic learner with experience replay and TD-gated actor updates.

mod agent;
mod checkpoint;
mod env;
mod mlp;
mod replay;
mod trainer;

pub use agent::{layer_sizes, ActorCritic, UpdateStats};
pub use checkpoint::{Checkpoint, CheckpointError, NetRecord, CHECKPOINT_VERSION};
pub use env::{CoverageEnv, EnvStep};
pub use mlp::{Cache, Head, Mlp};
pub use replay::{store, widen, Experience, ReplayBuffer, StoredObs};
pub use trainer::{initial_agent, sigma_at, train, CurvePoint, TrainOutcome};
