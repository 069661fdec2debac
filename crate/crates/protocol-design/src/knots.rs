use std::io::{Read, Write};

use model_core::{DriveProtocol, PiecewiseLinear};

use crate::error::{DesignError, Result};

/// Writes the `(t, E)` knots of a piecewise-linear protocol.
pub fn write_knots<W: Write>(protocol: &DriveProtocol, out: W) -> Result<()> {
    if protocol.name() != "piecewise" {
        return Err(DesignError::Knots(format!("`{}` protocols have no knots", protocol.name())));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "E"])?;
    for pair in protocol.schedule().params().chunks(2) {
        // `{:?}` prints the shortest string that parses back to the same f64.
        w.write_record([format!("{:?}", pair[0]), format!("{:?}", pair[1])])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a knot table, skipping `#` comment lines; the protocol ends at the last knot.
pub fn read_knots<R: Read>(input: R) -> Result<DriveProtocol> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let mut knots = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let parse = |j: usize| -> Result<f64> {
            row.get(j)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| DesignError::Knots(format!("row {}: column {j} is not a number", i + 1)))
        };
        knots.push((parse(0)?, parse(1)?));
    }
    let tau = knots.last().map(|k| k.0).ok_or_else(|| DesignError::Knots("empty table".into()))?;
    Ok(DriveProtocol::from_schedule(PiecewiseLinear::new(knots)?, tau)?)
}
