//! Snapshot and value-map file formats.
//!
//! Grid CSV: one header line `# x0=<m>,y0=<m>,cell=<m>,width=<n>,height=<n>`
//! giving the lower-left corner of cell (0, 0), then one line per row from
//! the bottom row up. The same format is read back as a value map.

use std::fmt::Write as _;

use super::grid::GridGeom;
use super::info::ValueMap;
use super::MapError;

/// Binary PGM (P5), north up, pixel = round(255 * v / max).
pub fn to_pgm(values: &[f64], side: usize, max: f64) -> Vec<u8> {
    to_pgm_rect(values, side, side, max)
}

/// [`to_pgm`] for a `width` x `height` grid stored row-major, bottom row first.
pub fn to_pgm_rect(values: &[f64], width: usize, height: usize, max: f64) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    for row in (0..height).rev() {
        for col in 0..width {
            let v = (values[row * width + col] / max).clamp(0.0, 1.0);
            out.push((255.0 * v).round() as u8);
        }
    }
    out
}

pub fn grid_to_csv(values: &[f64], geom: &GridGeom) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# x0={},y0={},cell={},width={},height={}",
        geom.min_ix as f64 * geom.cell,
        geom.min_iy as f64 * geom.cell,
        geom.cell,
        geom.side,
        geom.side
    );
    for row in values.chunks(geom.side) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

pub fn value_map_from_csv(text: &str) -> Result<ValueMap, MapError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .and_then(|h| h.strip_prefix('#'))
        .ok_or_else(|| MapError::Parse("missing '# x0=..' header line".into()))?;
    let mut x0 = None;
    let mut y0 = None;
    let mut cell = None;
    let mut width = None;
    let mut height = None;
    for kv in header.split(',') {
        let (k, v) = kv
            .trim()
            .split_once('=')
            .ok_or_else(|| MapError::Parse(format!("bad header field '{kv}'")))?;
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| MapError::Parse(format!("{k}: {e}")));
        match k.trim() {
            "x0" => x0 = Some(num(v)?),
            "y0" => y0 = Some(num(v)?),
            "cell" => cell = Some(num(v)?),
            "width" => width = Some(num(v)? as usize),
            "height" => height = Some(num(v)? as usize),
            other => return Err(MapError::Parse(format!("unknown header field '{other}'"))),
        }
    }
    let missing = |name: &str| MapError::Parse(format!("header lacks {name}"));
    let (x0, y0, cell) = (x0.ok_or_else(|| missing("x0"))?, y0.ok_or_else(|| missing("y0"))?, cell.ok_or_else(|| missing("cell"))?);
    let mut values = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    let body = lines.collect::<Vec<_>>().join("\n");
    let mut reader = csv::ReaderBuilder::new().has_headers(false).from_reader(body.as_bytes());
    for rec in reader.records() {
        let rec = rec.map_err(|e| MapError::Parse(e.to_string()))?;
        if cols.is_some_and(|c| c != rec.len()) {
            return Err(MapError::Parse(format!("row {rows} has {} columns", rec.len())));
        }
        cols = Some(rec.len());
        for f in rec.iter() {
            values.push(f.trim().parse::<f64>().map_err(|e| MapError::Parse(format!("row {rows}: {e}")))?);
        }
        rows += 1;
    }
    let width = width.unwrap_or(cols.unwrap_or(0));
    let height = height.unwrap_or(rows);
    ValueMap::new(x0, y0, cell, width, height, values)
}
