use std::io::Write;

use super::DiagnosticsRow;

/// Header of the diagnostics table, in column order.
pub const DIAGNOSTICS_COLUMNS: [&str; 46] = [
    "t",
    "weighted_entropy",
    "Y",
    "Jbad1",
    "Jbad2",
    "Jbad3",
    "Jbad4",
    "Jbad5",
    "Jgood1",
    "Jgood2",
    "Jgood3",
    "P",
    "P1",
    "P2",
    "P3",
    "P4",
    "P5",
    "B1",
    "B2",
    "B3",
    "B4",
    "B5",
    "B6",
    "G1",
    "G2",
    "D",
    "GS",
    "Dv1",
    "Du1",
    "Du2",
    "Y1",
    "Y2",
    "Y3",
    "Y4",
    "Y5",
    "Y6",
    "X",
    "Xdot",
    "sup_pert",
    "x_over_t",
    "h1_pert",
    "y0",
    "r1_margin",
    "h_entropy",
    "identity_residual",
    "cum_abs_P",
];

/// One line per row; unavailable values are left empty.
pub fn write_diagnostics_csv<W: Write>(rows: &[DiagnosticsRow], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(DIAGNOSTICS_COLUMNS)?;
    let text = |x: Option<f64>| x.map(|x| x.to_string()).unwrap_or_default();
    for row in rows {
        let b = &row.terms;
        let mut fields = vec![b.t, b.weighted_entropy, b.y];
        fields.extend(b.jbad);
        fields.extend(b.jgood);
        fields.push(b.p());
        fields.extend(b.boundary.parts);
        fields.extend(b.b);
        fields.extend([b.g1, b.g2, b.d_visc, b.gs, b.dv1, b.du1, b.du2]);
        fields.extend(b.y_parts);
        fields.extend([row.shift, b.xdot, row.metrics.sup_perturbation]);
        let mut record: Vec<String> = fields.into_iter().map(|x| x.to_string()).collect();
        record.push(text(row.metrics.x_over_t));
        record.extend(
            [
                row.metrics.h1_perturbation,
                row.y0,
                row.r1.margin,
                row.h_entropy,
            ]
            .map(|x| x.to_string()),
        );
        record.push(text(row.identity.map(|i| i.normalised)));
        record.push(row.cumulative_abs_boundary.to_string());
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}
