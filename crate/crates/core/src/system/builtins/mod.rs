mod boolform;
mod na;
mod os;
mod prefix;
mod ski;
mod trs;
mod walk;
mod zwalk;

pub use boolform::{boolean_provenance, BoolCosts};
pub use na::na_system;
pub use os::{os_fair, os_runtime, os_size, os_starv, OsWeights};
pub use prefix::prefix_words;
pub use ski::ski_rental;
pub use trs::addition_trs_ground;
pub use walk::{geometric_walk, walk_expected, walk_termprob, WalkWeights};
pub use zwalk::z_walk_safety;

use super::{Claim, Metadata, SystemError};

fn claims(
    deterministic: Claim,
    finitely_nondeterministic: Claim,
    finitely_branching: Claim,
    terminating: Claim,
) -> Metadata {
    Metadata {
        deterministic,
        finitely_nondeterministic,
        finitely_branching,
        terminating,
    }
}

fn bad_object(text: &str, msg: impl Into<String>) -> SystemError {
    SystemError::BadObject {
        text: text.to_string(),
        msg: msg.into(),
    }
}
