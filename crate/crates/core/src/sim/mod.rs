//! Mission engine, rewards and metrics.

pub mod engine;
pub mod metrics;
pub mod rewards;
pub mod scenario;
pub mod sweep;

pub use engine::{run_mission, LogRow, MissionError, MissionOptions, MissionOutput, MissionStats, Snapshot, RETURN_MARGIN};
pub use metrics::{Metrics, MetricsReport, WorldGrid};
pub use scenario::{Scenario, ValueSource, CRATER_CENTER, CRATER_RADIUS, PRESETS};
pub use sweep::{median, sweep_fleet, SweepRow};

/// Write `rows` as CSV with a header taken from the field names.
pub fn write_csv<T: serde::Serialize, W: std::io::Write>(rows: &[T], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
