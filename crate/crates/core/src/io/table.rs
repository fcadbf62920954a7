use std::path::Path;

use nalgebra::DMatrix;

use super::{from_json, read_text, to_json, write_atomic, IoError};
use crate::blade::Wireframe;
use crate::geometry::{CstParams, LandmarkMatrix};

fn csv_bytes<I>(header: &[&str], rows: I) -> Result<Vec<u8>, IoError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| IoError::Invalid(e.to_string()))
}

/// Shortest representation that parses back to the same bits.
fn num(v: f64) -> String {
    format!("{v:?}")
}

/// Generic numeric table: one header row, then `rows`.
pub fn write_table_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), IoError> {
    let bytes = csv_bytes(header, rows.iter().map(|r| r.iter().map(|v| num(*v)).collect()))?;
    write_atomic(path, &bytes)
}

/// Shapes as `shape,landmark,x,y` records.
pub fn write_shape_csv(path: &Path, shapes: &[&LandmarkMatrix]) -> Result<(), IoError> {
    let rows = shapes.iter().enumerate().flat_map(|(s, x)| {
        x.rows()
            .enumerate()
            .map(move |(j, [a, b])| vec![s.to_string(), j.to_string(), num(a), num(b)])
    });
    write_atomic(path, &csv_bytes(&["shape", "landmark", "x", "y"], rows)?)
}

pub fn write_wireframe_csv(path: &Path, w: &Wireframe) -> Result<(), IoError> {
    let rows = (0..w.spans).flat_map(|i| {
        (0..w.n).map(move |j| {
            let [x, y, eta] = w.get(i, j);
            vec![i.to_string(), j.to_string(), num(x), num(y), num(eta)]
        })
    });
    write_atomic(path, &csv_bytes(&["span", "landmark", "x", "y", "eta"], rows)?)
}

/// Reads a wireframe written by [`write_wireframe_csv`]; records must form
/// the complete grid in row-major order.
pub fn read_wireframe_csv(path: &Path) -> Result<Wireframe, IoError> {
    let text = read_text(path)?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != ["span", "landmark", "x", "y", "eta"] {
        return Err(IoError::Schema {
            path: "header".into(),
            message: format!("unexpected columns {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut records = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        let field = |c: usize| -> Result<&str, IoError> {
            rec.get(c).ok_or(IoError::Parse {
                line,
                column: c + 1,
                message: "missing field".into(),
            })
        };
        let index = |c: usize| -> Result<usize, IoError> {
            let t = field(c)?;
            t.parse().map_err(|_| IoError::Parse {
                line,
                column: c + 1,
                message: format!("`{t}` is not an index"),
            })
        };
        let value = |c: usize| -> Result<f64, IoError> {
            let t = field(c)?;
            t.parse().map_err(|_| IoError::Parse {
                line,
                column: c + 1,
                message: format!("`{t}` is not a number"),
            })
        };
        records.push((index(0)?, index(1)?, [value(2)?, value(3)?, value(4)?]));
    }
    let n = records.iter().take_while(|r| r.0 == 0).count();
    if n == 0 || records.len() % n != 0 {
        return Err(IoError::Invalid("wireframe records do not form a grid".into()));
    }
    let spans = records.len() / n;
    let mut points = DMatrix::zeros(records.len(), 3);
    for (k, (i, j, p)) in records.iter().enumerate() {
        if *i != k / n || *j != k % n {
            return Err(IoError::Parse {
                line: k + 2,
                column: 1,
                message: format!("expected span {} landmark {}", k / n, k % n),
            });
        }
        for c in 0..3 {
            points[(k, c)] = p[c];
        }
    }
    Ok(Wireframe { spans, n, points })
}

pub fn write_cst_params(path: &Path, params: &CstParams) -> Result<(), IoError> {
    write_atomic(path, to_json(params)?.as_bytes())
}

pub fn read_cst_params(path: &Path) -> Result<CstParams, IoError> {
    let p: CstParams = from_json(&read_text(path)?)?;
    p.check()?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blade::{export_wireframe, synthetic_blade};
    use crate::geometry::synthetic_baselines;

    #[test]
    fn wireframe_round_trip_bit_exact() {
        let blade = synthetic_blade(41).unwrap();
        let w = export_wireframe(&blade, 9).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.csv");
        write_wireframe_csv(&p, &w).unwrap();
        let back = read_wireframe_csv(&p).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn cst_params_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        let c = synthetic_baselines()[7].clone();
        write_cst_params(&p, &c).unwrap();
        assert_eq!(read_cst_params(&p).unwrap(), c);
        std::fs::write(&p, r#"{"upper":[0.1],"lower":[0.1],"te_thickness":0.0}"#).unwrap();
        assert!(read_cst_params(&p).is_err());
    }

    #[test]
    fn table_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_table_csv(&p, &["a", "b"], &[vec![1.0, 0.1], vec![-2.5, 1e-300]]).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a,b\n1.0,0.1\n-2.5,1e-300\n");
    }
}
