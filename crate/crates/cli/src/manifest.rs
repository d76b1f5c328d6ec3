use serde::Serialize;

#[derive(Clone, Debug, Serialize)]
pub struct TaskOutcome {
    pub task: String,
    pub outcome: String,
}

/// Everything needed to replay a run. Only `wall_time_seconds` varies
/// between runs with equal arguments, and `--no-timing` drops it.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub seed: u64,
    pub config: serde_json::Value,
    pub versions: Versions,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
    pub tasks: Vec<TaskOutcome>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Versions {
    pub posmaps: &'static str,
    pub cli: &'static str,
}

impl RunManifest {
    pub fn new(command: Vec<String>, seed: u64, config: serde_json::Value) -> Self {
        Self {
            command,
            seed,
            config,
            versions: Versions { posmaps: posmaps::VERSION, cli: env!("CARGO_PKG_VERSION") },
            wall_time_seconds: None,
            tasks: Vec::new(),
        }
    }

    pub fn task(&mut self, task: impl Into<String>, outcome: impl Into<String>) {
        self.tasks.push(TaskOutcome { task: task.into(), outcome: outcome.into() });
    }
}
