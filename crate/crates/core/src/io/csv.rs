//! Monitor time series as CSV.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::FluidParams;
use crate::norms::{MonitorRow, MonitorSeries};

pub const HEADER: &str = "t,l3_wp,l3_wm,h12_wp,h12_wm,h32_wp_sq_int,h32_wm_sq_int,l9_wp_cubed_int,energy_u,energy_b,a_minus_l3,a_minus_h12,div_max";

/// Header plus one line per row. Floats use the shortest decimal form that
/// parses back to the same value.
pub fn timeseries_to_string(series: &MonitorSeries) -> String {
    let mut out = String::with_capacity(64 * (series.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for row in &series.rows {
        for (i, v) in row.values().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v:?}");
        }
        out.push('\n');
    }
    out
}

pub fn write_timeseries(series: &MonitorSeries, path: &Path) -> Result<()> {
    std::fs::write(path, timeseries_to_string(series)).map_err(|e| Error::io(path, e))
}

/// Parses CSV text. The result carries `params` and no integrand state, so
/// it cannot be extended.
pub fn timeseries_from_str(text: &str, params: FluidParams) -> Result<MonitorSeries> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == HEADER => {}
        Some(h) => return Err(Error::TimeSeries(format!("unexpected header `{h}`"))),
        None => return Err(Error::TimeSeries("empty file".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let mut values = [0.0; 13];
        let mut count = 0;
        for field in line.split(',') {
            if count == 13 {
                count += 1;
                break;
            }
            values[count] = field
                .trim()
                .parse()
                .map_err(|_| Error::TimeSeries(format!("row {}: cannot parse `{field}`", i + 1)))?;
            count += 1;
        }
        if count != 13 {
            return Err(Error::TimeSeries(format!(
                "row {}: expected 13 columns",
                i + 1
            )));
        }
        rows.push(MonitorRow::from_values(values));
    }
    Ok(MonitorSeries::from_rows(rows, params, ""))
}

pub fn read_timeseries(path: &Path, params: FluidParams) -> Result<MonitorSeries> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    timeseries_from_str(&text, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::make_params;

    #[test]
    fn header_has_thirteen_columns() {
        assert_eq!(HEADER.split(',').count(), 13);
    }

    #[test]
    fn rejects_wrong_header_and_width() {
        let p = make_params(1.0, 1.0, 1.0).unwrap();
        assert!(timeseries_from_str("t,x\n", p).is_err());
        let short = format!("{HEADER}\n1,2,3\n");
        assert!(timeseries_from_str(&short, p).is_err());
        let long = format!("{HEADER}\n{}\n", ["0"; 14].join(","));
        assert!(timeseries_from_str(&long, p).is_err());
    }

    #[test]
    fn debug_format_round_trips() {
        for v in [
            0.1f64,
            1.0 / 3.0,
            1e-300,
            5e-324,
            1.7976931348623157e308,
            -0.0,
        ] {
            let s = format!("{v:?}");
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }
}
