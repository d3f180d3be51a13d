//! Result rows and their CSV encoding.

use std::io::{self, Write};

pub const SCHEMA_VERSION: u32 = 1;

pub const HEADER: &str =
    "schema_version,experiment,algo,n,m,model,n_e,snr_db,metric,value,stderr,trials,seed,wall_time_ms";

/// One `(cell, metric)` result. `n_e` and `snr_db` are only set by the
/// secrecy experiment; `wall_time_ms` only by the runtime experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: &'static str,
    pub algo: String,
    pub n: usize,
    pub m: usize,
    pub model: String,
    pub n_e: Option<usize>,
    pub snr_db: Option<f64>,
    pub metric: &'static str,
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
    pub wall_time_ms: f64,
}

/// Twelve significant digits in scientific notation.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

impl ResultRow {
    pub fn to_csv_line(&self) -> String {
        let n_e = self.n_e.map(|x| x.to_string()).unwrap_or_default();
        let snr = self.snr_db.map(fmt_float).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            SCHEMA_VERSION,
            self.experiment,
            self.algo,
            self.n,
            self.m,
            self.model,
            n_e,
            snr,
            self.metric,
            fmt_float(self.value),
            fmt_float(self.stderr),
            self.trials,
            self.seed,
            fmt_float(self.wall_time_ms),
        )
    }
}

pub fn write_csv<W: Write>(out: &mut W, rows: &[ResultRow]) -> io::Result<()> {
    out.write_all(HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    for r in rows {
        out.write_all(r.to_csv_line().as_bytes())?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_rows() {
        let row = ResultRow {
            experiment: "outage",
            algo: "random".into(),
            n: 20,
            m: 4,
            model: "rayleigh".into(),
            n_e: None,
            snr_db: None,
            metric: "pr_outage",
            value: 0.152,
            stderr: 0.0035,
            trials: 10_000,
            seed: 1,
            wall_time_ms: 0.0,
        };
        assert_eq!(
            row.to_csv_line(),
            "1,outage,random,20,4,rayleigh,,,pr_outage,1.52000000000e-1,3.50000000000e-3,10000,1,0.00000000000e0"
        );
        let mut buf = Vec::new();
        write_csv(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(HEADER));
        assert_eq!(text.lines().count(), 2);
        assert!(!text.contains('\r'));
        assert_eq!(HEADER.split(',').count(), 14);
    }
}
