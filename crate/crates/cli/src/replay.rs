//! Re-running a recorded scenario and comparing its artifacts byte for byte.

use std::fs;
use std::path::Path;

use crate::config::Config;
use crate::error::CliError;
use crate::summary::RunSummary;

/// Reruns the scenario recorded in `summary_path` into a scratch directory
/// and compares every listed artifact with the recorded one.
pub fn replay(summary_path: &Path) -> Result<RunSummary, CliError> {
    let recorded = RunSummary::read(summary_path)?;
    let dir = summary_path.parent().unwrap_or(Path::new("."));
    for name in &recorded.artifacts {
        if !dir.join(name).is_file() {
            return Err(CliError::Usage(format!("recorded artifact {name} is missing")));
        }
    }
    let scratch = tempfile::tempdir()?;
    let cfg = Config::from_map(&recorded.config);
    let fresh = crate::run_scenario(&recorded.scenario, cfg, recorded.seed, scratch.path(), None)?;
    if fresh.artifacts != recorded.artifacts {
        return Err(CliError::Mismatch(format!(
            "artifact lists differ: recorded {:?}, replayed {:?}",
            recorded.artifacts, fresh.artifacts
        )));
    }
    for name in &recorded.artifacts {
        let a = fs::read(dir.join(name))?;
        let b = fs::read(scratch.path().join(name))?;
        if let Some(at) = first_difference(&a, &b) {
            return Err(CliError::Mismatch(format!("{name}: {at}")));
        }
    }
    Ok(fresh)
}

/// Position of the first difference, as line and column for text and as a
/// byte offset otherwise.
fn first_difference(a: &[u8], b: &[u8]) -> Option<String> {
    if a == b {
        return None;
    }
    let offset = a.iter().zip(b).position(|(x, y)| x != y).unwrap_or(a.len().min(b.len()));
    match (std::str::from_utf8(a), std::str::from_utf8(b)) {
        (Ok(_), Ok(_)) => {
            let before = &a[..offset];
            let line = before.iter().filter(|&&c| c == b'\n').count() + 1;
            let col = offset - before.iter().rposition(|&c| c == b'\n').map_or(0, |p| p + 1) + 1;
            Some(format!("first difference at line {line}, column {col}"))
        }
        _ => Some(format!("first difference at byte {offset}")),
    }
}

#[cfg(test)]
mod tests {
    use super::first_difference;

    #[test]
    fn locates_differences() {
        assert_eq!(first_difference(b"a\nb", b"a\nb"), None);
        assert_eq!(first_difference(b"ab\ncd", b"ab\nce").unwrap(), "first difference at line 2, column 2");
        assert_eq!(first_difference(&[0, 1, 255], &[0, 2, 255]).unwrap(), "first difference at byte 1");
        assert_eq!(first_difference(b"ab", b"abc").unwrap(), "first difference at line 1, column 3");
    }
}
