//! States, cost observables and channels.

mod channel;
pub mod random;
mod state;

pub(crate) use channel::kraus_from_choi_matrix;
pub use channel::{
    choi_to_kraus, choi_to_kraus_default, compose, kraus_to_choi, replacer_channel, ChoiMatrix, KrausChannel,
};
pub use random::{derive_seed, marginal_pair, random_channel, random_observable, random_state, MarginalInstance};
pub use state::{DensityMatrix, ObservableTuple};
