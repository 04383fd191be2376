use std::io::Write;

use serde::Serialize;

use super::{Grid, State};

#[derive(Serialize)]
struct Row {
    x: f64,
    v: f64,
    u: f64,
}

/// Writes `x,v,u` rows for one snapshot.
pub fn write_snapshot_csv<W: Write>(grid: &Grid, state: &State, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for (i, (&v, &u)) in state.v.iter().zip(&state.u).enumerate() {
        w.serialize(Row { x: grid.x(i), v, u })?;
    }
    w.flush()?;
    Ok(())
}
