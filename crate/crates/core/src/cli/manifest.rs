//! Run manifest embedded as comment lines in every emitted file. Lines carry
//! everything needed to re-run the command bit-exactly; wall-clock time is
//! deliberately kept out of them and reported on stderr instead.

/// Resolved description of one run: canonical re-run command plus rendered
/// configuration sections.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool_version: &'static str,
    pub command: String,
    pub entries: Vec<(String, String)>,
    pub wall_secs: Option<f64>,
}

impl RunManifest {
    pub fn new(command: String) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            entries: Vec::new(),
            wall_secs: None,
        }
    }

    pub fn push(&mut self, key: &str, value: String) {
        self.entries.push((key.to_string(), value));
    }

    /// `#`-prefixed lines for file embedding. Excludes wall_secs so repeated
    /// runs emit identical bytes.
    pub fn comment_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("# pdm-duffing {}", self.tool_version),
            format!("# command: {}", self.command),
        ];
        lines.extend(self.entries.iter().map(|(k, v)| format!("# {k}: {v}")));
        lines
    }
}

/// 17-significant-digit serialization; round-trips f64 bit-exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
