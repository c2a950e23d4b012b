use std::io::{Read, Write};
use std::path::Path;

use super::{csv_error, line_of, parse_field, reader};
use crate::error::{Error, Result};
use crate::objectives::Embeddings;

/// Reads `id,f0,…,f{d−1}` rows with ids `0..n` in order.
pub fn parse_embeddings<R: Read>(input: R) -> Result<Embeddings> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(csv_error)?.clone();
    if header.get(0).map(str::trim) != Some("id") {
        return Err(Error::format(1, "first column must be `id`"));
    }
    let dim = header.len() - 1;
    if dim == 0 {
        return Err(Error::format(1, "no feature columns"));
    }
    for (k, name) in header.iter().skip(1).enumerate() {
        if name.trim() != format!("f{k}") {
            return Err(Error::format(1, format!("expected column f{k}, found {name:?}")));
        }
    }
    let mut data = Vec::new();
    let mut n = 0usize;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        if rec.len() != dim + 1 {
            return Err(Error::format(line, format!("expected {} fields, found {}", dim + 1, rec.len())));
        }
        let id: usize = parse_field(&rec, 0, "id")?;
        if id != n {
            return Err(Error::format(line, format!("expected id {n}, found {id} (rows missing or out of order)")));
        }
        for k in 0..dim {
            let v: f64 = parse_field(&rec, k + 1, "feature")?;
            if !v.is_finite() {
                return Err(Error::format(line, format!("non-finite feature f{k}")));
            }
            data.push(v);
        }
        n += 1;
    }
    if n == 0 {
        return Err(Error::format(None, "no embedding rows"));
    }
    Embeddings::new(n, dim, data)
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<Embeddings> {
    parse_embeddings(std::io::BufReader::new(super::open(path.as_ref())?))
}

/// Writes with shortest round-trip float formatting.
pub fn write_embeddings<W: Write>(emb: &Embeddings, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend((0..emb.dim()).map(|k| format!("f{k}")));
    w.write_record(&header).map_err(csv_error)?;
    for (p, row) in emb.rows().enumerate() {
        let mut rec = vec![p.to_string()];
        rec.extend(row.iter().map(|v| format!("{v:?}")));
        w.write_record(&rec).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
