//! Entry points shared by the command-line tool and the socket service.

pub mod config;
pub mod protocol;
pub mod scheduler;
pub mod server;
pub mod workflow;
