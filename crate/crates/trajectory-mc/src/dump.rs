use std::io::Write;

use crate::record::TrajectoryRecord;

/// One CSV row per jump: `trajectory_id, t, event, W_so_far, Q_so_far`.
pub fn write_event_dump<W: Write>(records: &[TrajectoryRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["trajectory_id", "t", "event", "W_so_far", "Q_so_far"])?;
    for r in records {
        for j in &r.jumps {
            w.write_record([
                r.stream.to_string(),
                j.t.to_string(),
                j.direction.label().to_string(),
                j.work.to_string(),
                j.heat.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
