use std::io::{Read, Write};
use std::path::Path;

use super::{csv_error, line_of, parse_field, reader};
use crate::comm::EtaStats;
use crate::error::{Error, Result};

/// Reads `partition,t,eta_bar,sigma` rows. Every partition must cover the
/// same contiguous range `t = 0..T` and repeat one `sigma`.
pub fn parse_stats<R: Read>(input: R) -> Result<EtaStats> {
    let mut rdr = reader(input);
    let header = rdr.headers().map_err(csv_error)?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["partition", "t", "eta_bar", "sigma"] {
        return Err(Error::format(1, "header must be `partition,t,eta_bar,sigma`"));
    }
    let mut eta_bar: Vec<Vec<f64>> = Vec::new();
    let mut sigma: Vec<f64> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = line_of(&rec);
        if rec.len() != 4 {
            return Err(Error::format(line, format!("expected 4 fields, found {}", rec.len())));
        }
        let i: usize = parse_field(&rec, 0, "partition")?;
        let t: usize = parse_field(&rec, 1, "t")?;
        let eta: f64 = parse_field(&rec, 2, "eta_bar")?;
        let s: f64 = parse_field(&rec, 3, "sigma")?;
        if !eta.is_finite() || !(s.is_finite() && s > 0.0) {
            return Err(Error::format(line, "eta_bar must be finite and sigma positive"));
        }
        if i == eta_bar.len() && t == 0 {
            eta_bar.push(Vec::new());
            sigma.push(s);
        }
        if i + 1 != eta_bar.len() || t != eta_bar[i].len() {
            return Err(Error::format(line, format!("row for partition {i}, t = {t} is out of order")));
        }
        if s != sigma[i] {
            return Err(Error::format(line, format!("sigma changes within partition {i}")));
        }
        eta_bar[i].push(eta);
    }
    if eta_bar.is_empty() {
        return Err(Error::format(None, "no statistics rows"));
    }
    if eta_bar.iter().any(|row| row.len() != eta_bar[0].len()) {
        return Err(Error::format(None, "partitions cover different horizons"));
    }
    EtaStats::new(eta_bar, sigma)
}

pub fn load_stats(path: impl AsRef<Path>) -> Result<EtaStats> {
    parse_stats(std::io::BufReader::new(super::open(path.as_ref())?))
}

pub fn write_stats<W: Write>(stats: &EtaStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["partition", "t", "eta_bar", "sigma"]).map_err(csv_error)?;
    for (i, row) in stats.eta_bar.iter().enumerate() {
        for (t, eta) in row.iter().enumerate() {
            w.write_record([i.to_string(), t.to_string(), format!("{eta:?}"), format!("{:?}", stats.sigma[i])])
                .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}
