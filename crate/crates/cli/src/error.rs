/// Failures that map to the usage/configuration exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("configuration {path}: {source}")]
    Config { path: String, source: tvc::Error },
}

pub const SCHEMA_HELP: &str = r#"Configuration format (JSON):
{
  "field": {"edge_length": N},
  "speed": {"min": v, "max": v},              optional default for all periods
  "nodes": [{
    "id": "name",
    "count": 25,                                optional, expands to name-0 ... name-24
    "onoff": {"kind": "ALWAYS_ON" | "ON_WHEN_PAUSED" | "ON_WHEN_MOVING" | "FIXED_PROB",
              "p_on": [[per community] per period]},    p_on only for FIXED_PROB
    "schedule": [{
      "duration_s": T,
      "speed": {"min": v, "max": v},            optional
      "communities": [{"id": "c", "x": x0 | "random", "y": y0 | "random", "edge": C}],
      "transition_matrix": [[...]],             rows sum to 1
      "mean_epoch_length": [L per community],
      "max_pause_s": [D per community]
    }]
  }]
}
Communities are squares with lower-left corner (x, y) inside the field; a
community covering the whole field is the roaming community."#;
