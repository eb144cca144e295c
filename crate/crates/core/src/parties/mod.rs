//! Alice and Bob as separate actors who only touch their own qubits and only
//! learn the other side's results through announced messages.

mod session;
mod transcript;

pub use session::{
    replay_correction, run_session, run_session_with, trial_seed, Cooperation, Party, Session,
};
pub use transcript::{
    ownership_check, Actor, Announcement, Event, EventKind, Message, Transcript, TRANSCRIPT_SCHEMA,
};
