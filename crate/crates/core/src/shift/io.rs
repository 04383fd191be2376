use std::io::Write;

use super::ShiftSample;

/// Writes `t,X,Xdot` rows.
pub fn write_shift_csv<'a, W: Write>(
    rows: impl IntoIterator<Item = &'a ShiftSample>,
    out: W,
) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
