//! Configuration, scenario orchestration and run manifests for `attoqo`.

pub mod config;
pub mod run;

pub use config::{parse_config, ParseError, RunConfig, Scenario};
pub use run::{run, RunError, RunManifest, TOOL_VERSION};
