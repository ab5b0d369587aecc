//! Polygon CSV: one row per edge with columns `poly_id,edge_index,x,y[,z]`.
//! Planar files omit the `z` column. Values are written with 17
//! significant digits so they read back bit for bit.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::geom::{Dim, EdgeChain, Vec3};

fn header(dim: Dim) -> &'static [&'static str] {
    match dim {
        Dim::Two => &["poly_id", "edge_index", "x", "y"],
        Dim::Three => &["poly_id", "edge_index", "x", "y", "z"],
    }
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io.to_string()),
        other => Error::Parse { line, message: format!("{other:?}") },
    }
}

/// `{:.16e}` keeps 17 significant digits, enough to round-trip any f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct PolygonCsvWriter<W: Write> {
    inner: csv::Writer<W>,
    dim: Dim,
}

impl<W: Write> PolygonCsvWriter<W> {
    pub fn new(w: W, dim: Dim) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        inner.write_record(header(dim)).map_err(csv_err)?;
        Ok(PolygonCsvWriter { inner, dim })
    }

    pub fn write<P: EdgeChain + ?Sized>(&mut self, poly_id: u64, p: &P) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::UnsupportedDimension {
                expected: self.dim.as_usize(),
                found: p.dim().as_usize(),
            });
        }
        let id = poly_id.to_string();
        for (i, e) in p.edges().iter().enumerate() {
            let idx = i.to_string();
            let (x, y) = (format_f64(e.x), format_f64(e.y));
            match self.dim {
                Dim::Two => self.inner.write_record([&id, &idx, &x, &y]),
                Dim::Three => self.inner.write_record([&id, &idx, &x, &y, &format_f64(e.z)]),
            }
            .map_err(csv_err)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.inner.into_inner().map_err(|e| Error::Io(e.error().to_string()))
    }
}

/// Edge lists read from a polygon CSV, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonTable {
    pub dim: Dim,
    pub polygons: Vec<(u64, Vec<Vec3>)>,
}

/// Parses a polygon CSV. Rows of one polygon must be contiguous with edge
/// indices `0, 1, 2, ...`.
pub fn read_polygons_csv<R: Read>(r: R) -> Result<PolygonTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r);
    let head: Vec<String> = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let dim = match head.len() {
        4 if head == header(Dim::Two) => Dim::Two,
        5 if head == header(Dim::Three) => Dim::Three,
        _ => {
            return Err(Error::Parse { line: 1, message: format!("unexpected header {head:?}") });
        }
    };
    let mut polygons: Vec<(u64, Vec<Vec3>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let bad = |m: String| Error::Parse { line, message: m };
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(format!("missing column {i}")));
        let id: u64 = field(0)?.parse().map_err(|e| bad(format!("poly_id: {e}")))?;
        let idx: usize = field(1)?.parse().map_err(|e| bad(format!("edge_index: {e}")))?;
        let num = |i: usize| -> Result<f64> {
            field(i)?.parse().map_err(|e| bad(format!("column {i}: {e}")))
        };
        let e = match dim {
            Dim::Two => Vec3::planar(num(2)?, num(3)?),
            Dim::Three => Vec3::new(num(2)?, num(3)?, num(4)?),
        };
        match polygons.last_mut() {
            Some((last, edges)) if *last == id => {
                if idx != edges.len() {
                    return Err(bad(format!("expected edge index {}, got {idx}", edges.len())));
                }
                edges.push(e);
            }
            _ => {
                if polygons.iter().any(|(p, _)| *p == id) {
                    return Err(bad(format!("rows of polygon {id} are not contiguous")));
                }
                if idx != 0 {
                    return Err(bad(format!("polygon {id} starts at edge index {idx}")));
                }
                polygons.push((id, vec![e]));
            }
        }
    }
    Ok(PolygonTable { dim, polygons })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{ClosedPolygon, PolygonArm};

    #[test]
    fn round_trip_is_exact() {
        let edges = vec![
            Vec3::new(0.1, -1.0 / 3.0, 1e-300),
            Vec3::new(2.0f64.sqrt(), 5e17, -0.0),
            Vec3::new(-0.1 - 2.0f64.sqrt(), 1.0 / 3.0 - 5e17, -1e-300),
        ];
        let arm = PolygonArm::new(Dim::Three, edges.clone()).unwrap();
        let mut w = PolygonCsvWriter::new(Vec::new(), Dim::Three).unwrap();
        w.write(7, &arm).unwrap();
        w.write(8, &arm).unwrap();
        let bytes = w.finish().unwrap();
        let t = read_polygons_csv(bytes.as_slice()).unwrap();
        assert_eq!(t.dim, Dim::Three);
        assert_eq!(t.polygons.len(), 2);
        for (a, b) in t.polygons[0].1.iter().zip(&edges) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.z.to_bits(), b.z.to_bits());
        }
    }

    #[test]
    fn planar_files_have_four_columns() {
        let sq = vec![
            Vec3::planar(1.0, 0.0),
            Vec3::planar(0.0, 1.0),
            Vec3::planar(-1.0, 0.0),
            Vec3::planar(0.0, -1.0),
        ];
        let p = ClosedPolygon::new(Dim::Two, sq).unwrap();
        let mut w = PolygonCsvWriter::new(Vec::new(), Dim::Two).unwrap();
        w.write(0, &p).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "poly_id,edge_index,x,y");
        assert_eq!(lines.len(), 5);
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 4));
        assert_eq!(read_polygons_csv(text.as_bytes()).unwrap().dim, Dim::Two);
    }

    #[test]
    fn malformed_input() {
        assert!(read_polygons_csv("a,b,c\n".as_bytes()).is_err());
        let gap = "poly_id,edge_index,x,y\n0,0,1,0\n0,2,1,0\n";
        assert!(matches!(read_polygons_csv(gap.as_bytes()), Err(Error::Parse { line: 3, .. })));
        let split = "poly_id,edge_index,x,y\n0,0,1,0\n1,0,1,0\n0,1,1,0\n";
        assert!(read_polygons_csv(split.as_bytes()).is_err());
        let junk = "poly_id,edge_index,x,y\n0,0,one,0\n";
        assert!(read_polygons_csv(junk.as_bytes()).is_err());
    }
}
