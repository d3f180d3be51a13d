//! Single-instance entry point for inspecting one SPZF run.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use spzf_core::rng::trial_rng;
use spzf_core::spzf::spzf_two_user;
use spzf_core::{ChannelVector, Complex64, PartitionAlgo, SpzfOutcome};

use crate::args::SolveArgs;
use crate::csv::fmt_float;

/// Parses `re im` lines; blank lines and text after `#` are ignored.
pub fn parse_complex_vector(text: &str) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let [re, im] = fields[..] else {
            bail!("line {}: expected two numbers 're im', got '{body}'", no + 1);
        };
        let num = |s: &str| -> Result<f64> {
            let x: f64 = s.parse().with_context(|| format!("line {}: '{s}' is not a number", no + 1))?;
            if !x.is_finite() {
                bail!("line {}: '{s}' is not finite", no + 1);
            }
            Ok(x)
        };
        out.push(Complex64::new(num(re)?, num(im)?));
    }
    Ok(out)
}

fn read_channel(path: &Path) -> Result<ChannelVector> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let entries = parse_complex_vector(&text).with_context(|| format!("in {}", path.display()))?;
    ChannelVector::new(entries).with_context(|| format!("in {}", path.display()))
}

fn join(xs: impl IntoIterator<Item = String>) -> String {
    xs.into_iter().collect::<Vec<_>>().join(" ")
}

pub fn run<W: Write>(args: &SolveArgs, out: &mut W) -> Result<()> {
    let algo: PartitionAlgo = args.algo.parse().map_err(anyhow::Error::msg)?;
    let h1 = read_channel(&args.h1)?;
    let h2 = read_channel(&args.h2)?;
    if h1.len() != h2.len() {
        bail!("dimension mismatch: h1 has {} entries, h2 has {}", h1.len(), h2.len());
    }
    let mut rng = trial_rng(args.seed, 0);
    let part = algo.partition(&h1.magnitudes(), args.m, &mut rng)?;

    writeln!(out, "algo: {algo}")?;
    writeln!(out, "n: {}", h1.len())?;
    writeln!(out, "m: {}", args.m)?;
    match spzf_two_user(&h1, &h2, &part)? {
        SpzfOutcome::Solved(sol) => {
            writeln!(out, "status: solved")?;
            writeln!(out, "partition: {}", join(part.labels().iter().map(|l| l.to_string())))?;
            for (k, phases) in sol.stage_phases.iter().enumerate() {
                writeln!(out, "stage {} phases: {}", k + 1, join(phases.iter().map(|&p| fmt_float(p))))?;
            }
            writeln!(out, "w:")?;
            for z in &sol.w {
                writeln!(out, "{} {}", fmt_float(z.re), fmt_float(z.im))?;
            }
            for (k, r) in sol.residuals.iter().enumerate() {
                writeln!(out, "residual user {}: {}", k + 1, fmt_float(*r))?;
            }
        }
        SpzfOutcome::Outage(report) => {
            writeln!(out, "status: outage")?;
            writeln!(out, "event: {}", report.event())?;
            writeln!(out, "stage: {}", report.stage + 1)?;
            writeln!(out, "set: {}", report.set)?;
            writeln!(out, "distance: {}", fmt_float(report.distance))?;
            writeln!(
                out,
                "partition: {}",
                join(report.partition.labels().iter().map(|l| l.to_string()))
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_vectors() {
        let v = parse_complex_vector("# header\n1 2\n\n -0.5  3e-1 # trailing\n").unwrap();
        assert_eq!(v, vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.3)]);
        assert!(parse_complex_vector("1\n").is_err());
        assert!(parse_complex_vector("1 2 3\n").is_err());
        assert!(parse_complex_vector("1 x\n").is_err());
        assert!(parse_complex_vector("1 inf\n").is_err());
        assert!(parse_complex_vector("# nothing\n").unwrap().is_empty());
    }
}
