//! CSV and JSON readers and writers for every pipeline artifact.
//!
//! CSV readers skip blank lines and lines starting with `#`, trim
//! whitespace, and report parse failures with the 1-based line number.
//! Numeric tables have no header; tables written with a header accept it
//! back on input.

use std::io::{Read, Write};

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::complex::{BoundaryMatrix, PointCloud};
use crate::error::{Error, Result};
use crate::graphfilt::BettiCurve;
use crate::matrix::SymmetricMatrix;
use crate::morse1d::{MorsePair, PersistencePairs1D, Signal1D};

/// Raw records with their line numbers.
fn records<R: Read>(r: R) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(r);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn parse_f64(row: usize, s: &str) -> Result<f64> {
    match s.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    s.parse::<f64>().map_err(|_| Error::Parse {
        row,
        msg: format!("'{s}' is not a number"),
    })
}

fn parse_usize(row: usize, s: &str) -> Result<usize> {
    s.parse::<usize>().map_err(|_| Error::Parse {
        row,
        msg: format!("'{s}' is not a nonnegative integer"),
    })
}

/// Drops the first record when it matches `header` (case-insensitive).
fn strip_header(recs: &mut Vec<(usize, Vec<String>)>, header: &[&str]) {
    if let Some((_, first)) = recs.first() {
        if first.len() == header.len()
            && first
                .iter()
                .zip(header)
                .all(|(a, b)| a.eq_ignore_ascii_case(b))
        {
            recs.remove(0);
        }
    }
}

fn numeric_table<R: Read>(r: R) -> Result<Vec<Vec<f64>>> {
    let recs = records(r)?;
    if recs.is_empty() {
        return Err(Error::Parse {
            row: 1,
            msg: "no data rows".into(),
        });
    }
    let width = recs[0].1.len();
    recs.iter()
        .map(|(line, rec)| {
            if rec.len() != width {
                return Err(Error::Parse {
                    row: *line,
                    msg: format!("expected {width} columns, found {}", rec.len()),
                });
            }
            rec.iter().map(|s| parse_f64(*line, s)).collect()
        })
        .collect()
}

fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        // Shortest representation that round-trips exactly.
        format!("{x:?}")
    }
}

fn write_rows<W: Write>(
    w: W,
    header: Option<&[&str]>,
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    if let Some(h) = header {
        wtr.write_record(h)?;
    }
    for row in rows {
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

/// One point per row, all rows the same width.
pub fn read_points<R: Read>(r: R) -> Result<PointCloud> {
    let rows = numeric_table(r)?;
    PointCloud::from_rows(&rows)
}

pub fn write_points<W: Write>(w: W, cloud: &PointCloud) -> Result<()> {
    write_rows(
        w,
        None,
        (0..cloud.len()).map(|i| cloud.point(i).iter().map(|&x| fmt_f64(x)).collect()),
    )
}

/// Square symmetric matrix with a zero diagonal.
pub fn read_matrix<R: Read>(r: R) -> Result<SymmetricMatrix> {
    let rows = numeric_table(r)?;
    if rows.len() != rows[0].len() {
        return Err(Error::InvalidInput(format!(
            "matrix has {} rows and {} columns",
            rows.len(),
            rows[0].len()
        )));
    }
    SymmetricMatrix::from_rows(rows)
}

pub fn write_matrix<W: Write>(w: W, m: &SymmetricMatrix) -> Result<()> {
    write_rows(
        w,
        None,
        (0..m.n()).map(|i| m.row(i).iter().map(|&x| fmt_f64(x)).collect()),
    )
}

/// Two columns `t,y`; an optional `t,y` header is accepted.
pub fn read_signal<R: Read>(r: R) -> Result<Signal1D> {
    let mut recs = records(r)?;
    strip_header(&mut recs, &["t", "y"]);
    if recs.is_empty() {
        return Err(Error::Parse {
            row: 1,
            msg: "no data rows".into(),
        });
    }
    let mut t = Vec::with_capacity(recs.len());
    let mut y = Vec::with_capacity(recs.len());
    for (line, rec) in &recs {
        if rec.len() != 2 {
            return Err(Error::Parse {
                row: *line,
                msg: format!("expected 2 columns (t,y), found {}", rec.len()),
            });
        }
        t.push(parse_f64(*line, &rec[0])?);
        y.push(parse_f64(*line, &rec[1])?);
    }
    Signal1D::new(t, y)
}

pub fn write_signal<W: Write>(w: W, s: &Signal1D) -> Result<()> {
    write_rows(
        w,
        Some(&["t", "y"]),
        s.positions()
            .iter()
            .zip(s.values())
            .map(|(&t, &y)| vec![fmt_f64(t), fmt_f64(y)]),
    )
}

/// One nonnegative integer label per row; an optional `label` header is
/// accepted.
pub fn read_labels<R: Read>(r: R) -> Result<Vec<usize>> {
    let mut recs = records(r)?;
    strip_header(&mut recs, &["label"]);
    if recs.is_empty() {
        return Err(Error::Parse {
            row: 1,
            msg: "no labels".into(),
        });
    }
    recs.iter()
        .map(|(line, rec)| {
            if rec.len() != 1 {
                return Err(Error::Parse {
                    row: *line,
                    msg: format!("expected one label per row, found {} columns", rec.len()),
                });
            }
            parse_usize(*line, &rec[0])
        })
        .collect()
}

pub fn write_labels<W: Write>(w: W, labels: &[usize]) -> Result<()> {
    write_rows(
        w,
        Some(&["label"]),
        labels.iter().map(|l| vec![l.to_string()]),
    )
}

const BETTI_HEADER: [&str; 3] = ["threshold", "beta0", "beta1"];

pub fn write_betti_curve<W: Write>(w: W, c: &BettiCurve) -> Result<()> {
    write_rows(
        w,
        Some(&BETTI_HEADER),
        (0..c.len()).map(|i| {
            vec![
                fmt_f64(c.thresholds[i]),
                c.beta0[i].to_string(),
                c.beta1[i].to_string(),
            ]
        }),
    )
}

pub fn read_betti_curve<R: Read>(r: R) -> Result<BettiCurve> {
    let mut recs = records(r)?;
    strip_header(&mut recs, &BETTI_HEADER);
    let mut c = BettiCurve {
        thresholds: vec![],
        beta0: vec![],
        beta1: vec![],
    };
    for (line, rec) in &recs {
        if rec.len() != 3 {
            return Err(Error::Parse {
                row: *line,
                msg: format!("expected 3 columns, found {}", rec.len()),
            });
        }
        c.thresholds.push(parse_f64(*line, &rec[0])?);
        c.beta0.push(parse_usize(*line, &rec[1])?);
        c.beta1.push(parse_usize(*line, &rec[2])?);
    }
    Ok(c)
}

const COO_HEADER: [&str; 3] = ["row", "col", "sign"];

/// Coordinate list `row,col,sign`, column-major.
pub fn write_boundary<W: Write>(w: W, b: &BoundaryMatrix) -> Result<()> {
    write_rows(
        w,
        Some(&COO_HEADER),
        b.triplets()
            .map(|(i, j, s)| vec![i.to_string(), j.to_string(), s.to_string()]),
    )
}

/// Reads a coordinate list back; the shape is not stored in the file.
pub fn read_boundary<R: Read>(
    r: R,
    dim: usize,
    rows: usize,
    cols: usize,
) -> Result<BoundaryMatrix> {
    let mut recs = records(r)?;
    strip_header(&mut recs, &COO_HEADER);
    let mut columns = vec![Vec::new(); cols];
    for (line, rec) in &recs {
        if rec.len() != 3 {
            return Err(Error::Parse {
                row: *line,
                msg: format!("expected 3 columns, found {}", rec.len()),
            });
        }
        let i = parse_usize(*line, &rec[0])?;
        let j = parse_usize(*line, &rec[1])?;
        let s: i8 = match rec[2].as_str() {
            "1" | "+1" => 1,
            "-1" => -1,
            other => {
                return Err(Error::Parse {
                    row: *line,
                    msg: format!("sign must be 1 or -1, got '{other}'"),
                })
            }
        };
        if j >= cols {
            return Err(Error::Parse {
                row: *line,
                msg: format!("column {j} out of range for {cols} columns"),
            });
        }
        columns[j].push((i, s));
    }
    BoundaryMatrix::from_columns(dim, rows, columns)
}

const PAIRS_HEADER: [&str; 4] = ["birth", "death", "birth_t", "death_t"];

/// Finite pairs, then the essential class as `birth,inf,,`.
pub fn write_morse_pairs<W: Write>(w: W, p: &PersistencePairs1D) -> Result<()> {
    let finite = p.pairs.iter().map(|q| {
        vec![
            fmt_f64(q.birth),
            fmt_f64(q.death),
            fmt_f64(q.birth_position),
            fmt_f64(q.death_position),
        ]
    });
    let essential = p
        .essential
        .map(|b| vec![fmt_f64(b), "inf".into(), String::new(), String::new()]);
    write_rows(w, Some(&PAIRS_HEADER), finite.chain(essential))
}

pub fn read_morse_pairs<R: Read>(r: R) -> Result<PersistencePairs1D> {
    let mut recs = records(r)?;
    strip_header(&mut recs, &PAIRS_HEADER);
    let mut out = PersistencePairs1D::default();
    for (line, rec) in &recs {
        if rec.len() != 4 {
            return Err(Error::Parse {
                row: *line,
                msg: format!("expected 4 columns, found {}", rec.len()),
            });
        }
        let birth = parse_f64(*line, &rec[0])?;
        let death = parse_f64(*line, &rec[1])?;
        if death == f64::INFINITY {
            if out.essential.replace(birth).is_some() {
                return Err(Error::Parse {
                    row: *line,
                    msg: "more than one essential class".into(),
                });
            }
            continue;
        }
        out.pairs.push(MorsePair {
            birth,
            death,
            birth_position: parse_f64(*line, &rec[2])?,
            death_position: parse_f64(*line, &rec[3])?,
        });
    }
    Ok(out)
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(w: W, value: &T) -> Result<()> {
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read, T: DeserializeOwned>(r: R) -> Result<T> {
    Ok(serde_json::from_reader(r)?)
}
