//! Executable protocol narratives: BB84 sifting and the encode/decode game.

pub mod bb84;
pub mod decoding;

pub use bb84::{average_bb84_state, empirical_bb84_state, run_bb84, Basis, Bb84Run};
pub use decoding::{encoding_preset, run_decoding, DecodingExperiment, EncodingEntry};
