use std::io::{self, Write};

use super::representation::MasRepresentation;

/// Writes one CSV line per row: `t,source_row,coeff_x_1..coeff_x_n,coeff_v,h`.
/// Steady-state rows carry `t = -1`.
pub fn write_mas_csv<W: Write>(rep: &MasRepresentation, mut out: W) -> io::Result<()> {
    let n = rep.state_dim();
    let mut header = String::from("t,source_row");
    for i in 1..=n {
        header.push_str(&format!(",coeff_x_{i}"));
    }
    header.push_str(",coeff_v,h");
    writeln!(out, "{header}")?;
    for (i, tag) in rep.tags().iter().enumerate() {
        let t = tag.time.map_or(-1, |t| t as i64);
        write!(out, "{t},{}", tag.source_row)?;
        for c in rep.row(i) {
            write!(out, ",{c:?}")?;
        }
        writeln!(out, ",{:?}", rep.h()[i])?;
    }
    Ok(())
}
