//! Field evaluation on point grids and CSV export.

use std::io::Write;

use rayon::prelude::*;

use super::{lw_field_4d, stress_energy, FieldTensor};
use crate::error::{Error, Result};
use crate::spacetime::FourVector;
use crate::worldline::Worldline;

/// A field point and the retarded field there.
#[derive(Debug, Clone)]
pub struct GridSample {
    pub x: FourVector,
    pub field: FieldTensor,
}

/// Retarded four-dimensional field of a charge at each point, in parallel.
/// Output order matches input order.
pub fn evaluate_field_grid<W: Worldline + ?Sized>(w: &W, e: f64, points: &[FourVector]) -> Result<Vec<GridSample>> {
    points
        .par_iter()
        .map(|x| Ok(GridSample { x: x.clone(), field: lw_field_4d(w, e, x)? }))
        .collect()
}

/// Writes `x0..x3, E1..E3, B1..B3, T00, S1..S3` rows. `header` lines are
/// written first, each prefixed with `# `.
pub fn write_field_grid<Wr: Write>(out: Wr, header: &[String], samples: &[GridSample]) -> Result<()> {
    let mut out = out;
    for h in header {
        writeln!(out, "# {h}")?;
    }
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record([
        "x0", "x1", "x2", "x3", "E1", "E2", "E3", "B1", "B2", "B3", "T00", "S1", "S2", "S3",
    ])?;
    for s in samples {
        if s.x.len() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: s.x.len() });
        }
        let t = stress_energy(&s.field);
        let mut row: Vec<f64> = s.x.as_slice().to_vec();
        row.extend(s.field.electric());
        row.extend(s.field.magnetic()?);
        row.push(t.energy_density());
        row.extend(t.poynting());
        csv.write_record(row.iter().map(|v| format!("{v:.17e}")))?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacetime::MinkowskiDim;
    use crate::worldline::AnalyticMotion;

    #[test]
    fn grid_csv_has_expected_columns() {
        let w = AnalyticMotion::rest(MinkowskiDim::D4, &[0.0; 3]);
        let pts: Vec<FourVector> = (1..4)
            .map(|i| FourVector::from_slice(&[5.0, i as f64, 0.0, 0.0]).unwrap())
            .collect();
        let samples = evaluate_field_grid(&w, 1.0, &pts).unwrap();
        let mut buf = Vec::new();
        write_field_grid(&mut buf, &["test".to_string()], &samples).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# test"));
        assert_eq!(lines.next().unwrap().split(',').count(), 14);
        let row: Vec<f64> = lines.nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert!((row[4] - 0.25).abs() < 1e-15);
    }
}
