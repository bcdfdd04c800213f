pub mod code;
pub mod channel;
pub mod decoder;
pub mod ga;
pub mod harness;
