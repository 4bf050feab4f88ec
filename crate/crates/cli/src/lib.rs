//! Standard-library front end for [`rus_core`]: JSON and OpenQASM formats, a
//! threaded job runner and the `rus-synth` command line.

pub mod app;
pub mod export;
pub mod report;
pub mod runner;

pub use app::run;
