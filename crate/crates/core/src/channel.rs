//! Channel realizations: i.i.d. Rayleigh fading and the geometric
//! multipath model over a uniform linear array.

use std::f64::consts::PI;
use std::ops::Index;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};

/// One user's length-N channel vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ChannelVector(Vec<Complex64>);

impl ChannelVector {
    /// Wraps entries, rejecting empty input and non-finite components.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("channel vector must have at least one entry"));
        }
        if let Some(i) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid(format!("channel entry {i} is not finite")));
        }
        Ok(Self(entries))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Complex64> {
        self.0
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.norm()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }
}

impl Index<usize> for ChannelVector {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl AsRef<[Complex64]> for ChannelVector {
    fn as_ref(&self) -> &[Complex64] {
        &self.0
    }
}

/// Eavesdropper channel `G`, one row per eavesdropper antenna.
#[derive(Clone, Debug, PartialEq)]
pub struct EveChannelMatrix {
    rows: Vec<ChannelVector>,
}

impl EveChannelMatrix {
    pub fn new(rows: Vec<ChannelVector>) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(invalid("eavesdropper matrix needs at least one row"));
        };
        let n = first.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(invalid(format!(
                "eavesdropper row {bad} has length {} but row 0 has {n}",
                rows[bad].len()
            )));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[ChannelVector] {
        &self.rows
    }

    /// Number of eavesdropper antennas.
    pub fn n_e(&self) -> usize {
        self.rows.len()
    }

    /// Number of transmit antennas.
    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    /// `G x` for a length-N vector `x`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.rows
            .iter()
            .map(|g| g.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Rayleigh,
    Geometric,
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rayleigh" => Ok(ModelKind::Rayleigh),
            "geometric" => Ok(ModelKind::Geometric),
            other => Err(format!("unknown channel model '{other}' (expected rayleigh|geometric)")),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Rayleigh => "rayleigh",
            ModelKind::Geometric => "geometric",
        })
    }
}

/// Channel model parameters. `paths` and `spacing_ratio` (d/λ) only matter
/// for the geometric model; `sigma2` only for Rayleigh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelModelConfig {
    pub kind: ModelKind,
    pub sigma2: f64,
    pub paths: usize,
    pub spacing_ratio: f64,
}

impl Default for ChannelModelConfig {
    fn default() -> Self {
        Self::rayleigh(1.0)
    }
}

impl ChannelModelConfig {
    pub fn rayleigh(sigma2: f64) -> Self {
        Self {
            kind: ModelKind::Rayleigh,
            sigma2,
            paths: 1,
            spacing_ratio: 0.5,
        }
    }

    /// Geometric model with half-wavelength spacing.
    pub fn geometric(paths: usize) -> Self {
        Self {
            kind: ModelKind::Geometric,
            sigma2: 1.0,
            paths,
            spacing_ratio: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(invalid(format!("sigma2 must be positive, got {}", self.sigma2)));
        }
        if self.paths == 0 {
            return Err(invalid("geometric model needs at least one path"));
        }
        if !(self.spacing_ratio > 0.0 && self.spacing_ratio.is_finite()) {
            return Err(invalid(format!(
                "spacing ratio d/lambda must be positive, got {}",
                self.spacing_ratio
            )));
        }
        Ok(())
    }

    /// Draws one length-`n` channel vector under this model.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<ChannelVector> {
        self.validate()?;
        match self.kind {
            ModelKind::Rayleigh => sample_rayleigh(n, self.sigma2, rng),
            ModelKind::Geometric => sample_geometric(n, self, rng),
        }
    }
}

/// One circularly-symmetric CN(0, sigma2) draw.
#[inline]
pub(crate) fn complex_gaussian<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> Complex64 {
    let scale = (sigma2 / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * scale, im * scale)
}

/// Magnitude of a CN(0, sigma2) draw without building the complex value.
#[inline]
pub(crate) fn rayleigh_magnitude<R: Rng + ?Sized>(sigma2: f64, rng: &mut R) -> f64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    (sigma2 / 2.0).sqrt() * re.hypot(im)
}

/// i.i.d. CN(0, sigma2) entries.
pub fn sample_rayleigh<R: Rng + ?Sized>(n: usize, sigma2: f64, rng: &mut R) -> Result<ChannelVector> {
    if n == 0 {
        return Err(invalid("antenna count must be at least 1"));
    }
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(invalid(format!("sigma2 must be positive, got {sigma2}")));
    }
    Ok(ChannelVector((0..n).map(|_| complex_gaussian(sigma2, rng)).collect()))
}

/// ULA response: entry `i` is `exp(j 2π (d/λ) i sin φ) / √n`.
pub fn array_response(n: usize, phi: f64, spacing_ratio: f64) -> Result<ChannelVector> {
    if n == 0 {
        return Err(invalid("antenna count must be at least 1"));
    }
    let amp = 1.0 / (n as f64).sqrt();
    let step = 2.0 * PI * spacing_ratio * phi.sin();
    Ok(ChannelVector(
        (0..n).map(|i| Complex64::from_polar(amp, step * i as f64)).collect(),
    ))
}

/// `sqrt(1/L) Σ_l α_l a(φ_l)` with α_l ~ CN(0, 1) and φ_l ~ U[0, 2π].
pub fn sample_geometric<R: Rng + ?Sized>(
    n: usize,
    cfg: &ChannelModelConfig,
    rng: &mut R,
) -> Result<ChannelVector> {
    if cfg.kind != ModelKind::Geometric {
        return Err(invalid("sample_geometric called with a non-geometric config"));
    }
    cfg.validate()?;
    if n == 0 {
        return Err(invalid("antenna count must be at least 1"));
    }
    let mut h = vec![Complex64::new(0.0, 0.0); n];
    let norm = 1.0 / (cfg.paths as f64).sqrt();
    for _ in 0..cfg.paths {
        let alpha = complex_gaussian(1.0, rng) * norm;
        let phi = rng.random_range(0.0..2.0 * PI);
        let a = array_response(n, phi, cfg.spacing_ratio)?;
        for (hi, ai) in h.iter_mut().zip(a.iter()) {
            *hi += alpha * ai;
        }
    }
    Ok(ChannelVector(h))
}

/// `n_e` independent rows, each drawn from `cfg`.
pub fn sample_eve_matrix<R: Rng + ?Sized>(
    n_e: usize,
    n: usize,
    cfg: &ChannelModelConfig,
    rng: &mut R,
) -> Result<EveChannelMatrix> {
    if n_e == 0 {
        return Err(invalid("eavesdropper antenna count must be at least 1"));
    }
    let rows = (0..n_e)
        .map(|_| cfg.sample(n, rng))
        .collect::<Result<Vec<_>>>()?;
    EveChannelMatrix::new(rows)
}
