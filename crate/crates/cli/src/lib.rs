//! Command implementations behind the `trackpilot` binary, plus the loaders
//! that read back every file the commands write.

pub mod files;
pub mod frame;
pub mod run;
pub mod sweep;
pub mod track;

use trackpilot_core::simulator::EpisodeStatus;

/// Process exit code for a finished episode.
pub fn exit_code(status: EpisodeStatus) -> i32 {
    match status {
        EpisodeStatus::Completed => 0,
        EpisodeStatus::Collided => 2,
        EpisodeStatus::Stopped | EpisodeStatus::Timeout => 3,
    }
}

/// Orders outcomes from best to worst: completed, stopped/timeout, collided.
pub fn severity(status: EpisodeStatus) -> u8 {
    match status {
        EpisodeStatus::Completed => 0,
        EpisodeStatus::Stopped | EpisodeStatus::Timeout => 1,
        EpisodeStatus::Collided => 2,
    }
}

/// Prints pretty JSON to stdout, ignoring a closed pipe.
pub fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    use std::io::Write;
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}
