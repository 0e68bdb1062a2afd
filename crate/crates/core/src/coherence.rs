//! Coherence-order readout and spectra.
//!
//! Basis states carry a total magnetic quantum number `M` (`|00⟩ → +1`,
//! `|01⟩, |10⟩ → 0`, `|11⟩ → -1`); a density-matrix element `(r, c)` has
//! coherence order `p = M_r - M_c`. Only `|p| = 1` elements radiate.
//!
//! The free Hamiltonian is `H/2π = ν1·Iz1 + ν2·Iz2 + J·Iz1·Iz2` and the
//! receiver measures `tr(ρ(t)·(I1⁺ + I2⁺))`, so a qubit-2 coherence whose
//! partner is in `|0⟩` shows up at `ν2 + J/2` and one with partner `|1⟩` at
//! `ν2 - J/2`.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::boolfun::Parity;
use crate::error::{Error, Result};
use crate::evenodd::{lift, DeviationDensity, Target};
use crate::qmat::{Mat2, Mat4, C64, ONE, ZERO};

/// `M` of each basis state in units of single-spin quanta.
const MAGNETIC: [i8; 4] = [1, 0, 0, -1];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoherenceOrder(pub i8);

pub fn coherence_order(row: usize, col: usize) -> CoherenceOrder {
    CoherenceOrder(MAGNETIC[row] - MAGNETIC[col])
}

/// Summed element magnitude per coherence order `p = -2..=2`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoherenceProfile {
    pub magnitudes: [f64; 5],
}

impl CoherenceProfile {
    pub fn magnitude(&self, p: i8) -> f64 {
        assert!((-2..=2).contains(&p), "coherence order out of range: {p}");
        self.magnitudes[(p + 2) as usize]
    }

    pub fn single_quantum(&self) -> f64 {
        self.magnitude(-1) + self.magnitude(1)
    }

    pub fn double_quantum(&self) -> f64 {
        self.magnitude(-2) + self.magnitude(2)
    }

    pub fn total(&self) -> f64 {
        self.magnitudes.iter().sum()
    }
}

pub fn decompose(rho: &DeviationDensity) -> CoherenceProfile {
    let mut profile = CoherenceProfile::default();
    for r in 0..4 {
        for c in 0..4 {
            let p = coherence_order(r, c).0;
            profile.magnitudes[(p + 2) as usize] += rho.get(r, c).norm();
        }
    }
    profile
}

/// Offsets and coupling of the two-spin system, all in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinSystemParams {
    pub nu1: f64,
    pub nu2: f64,
    pub j: f64,
}

impl Default for SpinSystemParams {
    fn default() -> Self {
        SpinSystemParams {
            nu1: 100.0,
            nu2: -150.0,
            j: 6.1,
        }
    }
}

impl SpinSystemParams {
    pub fn new(nu1: f64, nu2: f64, j: f64) -> Result<Self> {
        let p = SpinSystemParams { nu1, nu2, j };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu1.is_finite() && self.nu2.is_finite() && self.j.is_finite()) {
            return Err(Error::InvalidParameter(
                "spin parameters must be finite".into(),
            ));
        }
        if self.j < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling must be >= 0, got {}",
                self.j
            )));
        }
        Ok(())
    }

    /// Diagonal of `H/2π` in the product basis (Hz).
    pub fn energies_hz(&self) -> [f64; 4] {
        std::array::from_fn(|i| {
            let m1 = if i < 2 { 0.5 } else { -0.5 };
            let m2 = if i % 2 == 0 { 0.5 } else { -0.5 };
            self.nu1 * m1 + self.nu2 * m2 + self.j * m1 * m2
        })
    }
}

/// One stick of a line spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    pub frequency_hz: f64,
    pub amplitude: C64,
}

/// Stick spectrum, sorted by frequency.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LineSpectrum {
    pub lines: Vec<SpectralLine>,
}

pub const SPECTRUM_CSV_HEADER: &str = "frequency_hz,amp_re,amp_im";
pub const FID_CSV_HEADER: &str = "t_s,re,im";

impl LineSpectrum {
    fn from_unsorted(mut lines: Vec<SpectralLine>) -> Self {
        lines.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
        LineSpectrum { lines }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn max_amplitude(&self) -> f64 {
        self.lines
            .iter()
            .map(|l| l.amplitude.norm())
            .fold(0.0, f64::max)
    }

    /// CSV export. A `scale` is written as a leading `# amplitude_scale=` comment.
    pub fn to_csv(&self, scale: Option<f64>) -> String {
        let mut out = String::new();
        if let Some(s) = scale {
            let _ = writeln!(out, "# amplitude_scale={s}");
        }
        let _ = writeln!(out, "{SPECTRUM_CSV_HEADER}");
        for l in &self.lines {
            let _ = writeln!(
                out,
                "{},{},{}",
                l.frequency_hz, l.amplitude.re, l.amplitude.im
            );
        }
        out
    }
}

const LINE_FLOOR: f64 = 1e-12;

/// Lines predicted directly from the single-quantum elements of `rho`.
///
/// Each `p = -1` element (the ones the raising-operator receiver picks out)
/// gives one line whose amplitude is the element itself.
pub fn analytic_lines(rho: &DeviationDensity, params: &SpinSystemParams) -> LineSpectrum {
    let mut lines: Vec<SpectralLine> = Vec::with_capacity(4);
    let half_j = params.j / 2.0;
    for partner in 0..2 {
        let partner_shift = if partner == 0 { half_j } else { -half_j };
        // qubit 2 flips, qubit 1 is the partner
        lines.push(SpectralLine {
            frequency_hz: params.nu2 + partner_shift,
            amplitude: rho.get(2 * partner + 1, 2 * partner),
        });
        // qubit 1 flips, qubit 2 is the partner
        lines.push(SpectralLine {
            frequency_hz: params.nu1 + partner_shift,
            amplitude: rho.get(2 + partner, partner),
        });
    }
    let mut merged: Vec<SpectralLine> = Vec::with_capacity(4);
    for l in lines {
        match merged
            .iter_mut()
            .find(|m| (m.frequency_hz - l.frequency_hz).abs() < 1e-12)
        {
            Some(m) => m.amplitude += l.amplitude,
            None => merged.push(l),
        }
    }
    merged.retain(|l| l.amplitude.norm() >= LINE_FLOOR);
    LineSpectrum::from_unsorted(merged)
}

/// Sampling of the free induction decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Acquisition {
    pub dwell: f64,
    pub npoints: usize,
}

impl Default for Acquisition {
    fn default() -> Self {
        Acquisition {
            dwell: 1e-3,
            npoints: 4096,
        }
    }
}

impl Acquisition {
    pub fn validate(&self) -> Result<()> {
        if !(self.dwell.is_finite() && self.dwell > 0.0) {
            return Err(Error::BadAcquisition(format!(
                "dwell must be > 0, got {}",
                self.dwell
            )));
        }
        if !self.npoints.is_power_of_two() || !(64..=65536).contains(&self.npoints) {
            return Err(Error::BadAcquisition(format!(
                "npoints must be a power of two in 64..=65536, got {}",
                self.npoints
            )));
        }
        Ok(())
    }

    /// Frequency spacing of the DFT grid (Hz).
    pub fn resolution(&self) -> f64 {
        1.0 / (self.npoints as f64 * self.dwell)
    }
}

/// Complex time-domain signal sampled every `dwell` seconds from `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Fid {
    pub dwell: f64,
    pub samples: Vec<C64>,
}

impl Fid {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{FID_CSV_HEADER}");
        for (n, s) in self.samples.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", n as f64 * self.dwell, s.re, s.im);
        }
        out
    }
}

fn raising() -> Mat2 {
    crate::qmat::Mat([[ZERO, ONE], [ZERO, ZERO]])
}

/// Detection operator `I1⁺ + I2⁺`.
pub fn detection_operator() -> Mat4 {
    lift(&raising(), Target::Qubit1) + lift(&raising(), Target::Qubit2)
}

/// `s(t_n) = tr(U(t_n) ρ U(t_n)† D)` under the free Hamiltonian, no relaxation.
pub fn simulate_fid(
    rho: &DeviationDensity,
    params: &SpinSystemParams,
    acq: &Acquisition,
) -> Result<Fid> {
    acq.validate()?;
    params.validate()?;
    let detect = detection_operator();
    let energies = params.energies_hz();
    let samples = (0..acq.npoints)
        .map(|n| {
            let t = n as f64 * acq.dwell;
            let u = Mat4::from_diag(energies.map(|e| C64::from_polar(1.0, -TAU * e * t)));
            (u * *rho.matrix() * u.dagger() * detect).trace()
        })
        .collect();
    Ok(Fid {
        dwell: acq.dwell,
        samples,
    })
}

/// Centered DFT of an FID: `(frequency_hz, X_k / N)` from `-1/(2·dwell)` up.
pub fn dft_bins(fid: &Fid) -> Vec<(f64, C64)> {
    let n = fid.samples.len();
    if n == 0 {
        return Vec::new();
    }
    let spectrum = fft(&fid.samples);
    let df = 1.0 / (n as f64 * fid.dwell);
    let half = n / 2;
    (0..n)
        .map(|i| {
            let k = (i + n - half) % n;
            let signed = if k >= n - half {
                k as isize - n as isize
            } else {
                k as isize
            };
            (signed as f64 * df, spectrum[k] / n as f64)
        })
        .collect()
}

fn fft(samples: &[C64]) -> Vec<C64> {
    let mut buf = samples.to_vec();
    FftPlanner::new()
        .plan_fft_forward(buf.len())
        .process(&mut buf);
    buf
}

/// Peak-picking thresholds for [`spectrum_from_fid_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeakPicking {
    /// Relative to the largest normalized DFT magnitude.
    pub relative: f64,
    /// Absolute floor on normalized amplitude.
    pub floor: f64,
    pub max_lines: usize,
}

impl Default for PeakPicking {
    fn default() -> Self {
        PeakPicking {
            relative: 1e-6,
            floor: 1e-9,
            max_lines: 16,
        }
    }
}

/// Stick spectrum recovered from an FID by DFT peak picking.
pub fn spectrum_from_fid(fid: &Fid) -> LineSpectrum {
    spectrum_from_fid_with(fid, &PeakPicking::default())
}

/// Picks the largest residual DFT bin, refines its frequency on the continuous
/// transform, least-squares fits every tone found so far, subtracts them and
/// repeats until nothing above threshold remains. Sidelobes of off-grid tones
/// are removed with their parent line instead of being reported as peaks.
pub fn spectrum_from_fid_with(fid: &Fid, picking: &PeakPicking) -> LineSpectrum {
    let n = fid.samples.len();
    if n == 0 {
        return LineSpectrum::default();
    }
    let nf = n as f64;
    let signal = &fid.samples;
    let peak_of = |buf: &[C64]| -> (usize, f64) {
        fft(buf)
            .iter()
            .enumerate()
            .map(|(k, x)| (k, x.norm() / nf))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap()
    };
    let (_, largest) = peak_of(signal);
    let threshold = (picking.relative * largest).max(picking.floor);
    if largest <= threshold {
        return LineSpectrum::default();
    }

    // Frequencies in cycles per sample.
    let mut freqs: Vec<f64> = Vec::new();
    let mut amps: Vec<C64> = Vec::new();
    let mut residual = signal.clone();
    while freqs.len() < picking.max_lines {
        let (k, mag) = peak_of(&residual);
        if mag <= threshold {
            break;
        }
        let nu0 = k as f64 / nf;
        freqs.push(refine_peak(&residual, nu0, 0.5 / nf));
        for _round in 0..12 {
            amps = fit_amplitudes(signal, &freqs);
            for j in 0..freqs.len() {
                let mut isolated = signal.clone();
                for (i, (&f, &a)) in freqs.iter().zip(&amps).enumerate() {
                    if i != j {
                        subtract_tone(&mut isolated, f, a);
                    }
                }
                freqs[j] = refine_peak(&isolated, freqs[j], 0.5 / nf);
            }
        }
        amps = fit_amplitudes(signal, &freqs);
        residual = signal.clone();
        for (&f, &a) in freqs.iter().zip(&amps) {
            subtract_tone(&mut residual, f, a);
        }
    }

    let nyquist = 0.5 / fid.dwell;
    let lines = freqs
        .iter()
        .zip(&amps)
        .filter(|(_, a)| a.norm() > threshold)
        .map(|(&nu, &a)| {
            let hz = (nu / fid.dwell + nyquist).rem_euclid(2.0 * nyquist) - nyquist;
            SpectralLine {
                frequency_hz: hz,
                amplitude: a,
            }
        })
        .collect();
    LineSpectrum::from_unsorted(lines)
}

fn tone(nu: f64, n: usize) -> C64 {
    C64::from_polar(1.0, TAU * nu * n as f64)
}

fn subtract_tone(buf: &mut [C64], nu: f64, amp: C64) {
    for (n, x) in buf.iter_mut().enumerate() {
        *x -= amp * tone(nu, n);
    }
}

/// `X(ν) = Σ x_n e^{-2πiνn}` with first and second derivatives in `ν`.
fn dtft(buf: &[C64], nu: f64) -> (C64, C64, C64) {
    let (mut x, mut dx, mut ddx) = (ZERO, ZERO, ZERO);
    for (n, s) in buf.iter().enumerate() {
        let nn = n as f64;
        let term = *s * C64::from_polar(1.0, -TAU * nu * nn);
        x += term;
        dx += term * C64::new(0.0, -TAU * nn);
        ddx += term * C64::new(-(TAU * nn).powi(2), 0.0);
    }
    (x, dx, ddx)
}

/// Maximizes `|X(ν)|` within `center ± half_width`: golden section, then Newton
/// on `d|X|²/dν`.
fn refine_peak(buf: &[C64], center: f64, half_width: f64) -> f64 {
    let objective = |nu: f64| dtft(buf, nu).0.norm_sqr();
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (center - half_width, center + half_width);
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (objective(a), objective(b));
    for _ in 0..40 {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = objective(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = objective(a);
        }
    }
    let mut nu = 0.5 * (lo + hi);
    for _ in 0..4 {
        let (x, dx, ddx) = dtft(buf, nu);
        let slope = (x.conj() * dx).re;
        let curvature = dx.norm_sqr() + (x.conj() * ddx).re;
        if curvature >= 0.0 {
            break;
        }
        let step = slope / curvature;
        if !step.is_finite() || step.abs() > half_width {
            break;
        }
        nu -= step;
    }
    nu
}

/// Least-squares complex amplitudes of `signal ≈ Σ a_j e^{2πiν_j n}`.
fn fit_amplitudes(signal: &[C64], freqs: &[f64]) -> Vec<C64> {
    let k = freqs.len();
    let n = signal.len();
    // Normal equations G a = b with G_ij = Σ conj(t_i) t_j.
    let mut g = vec![vec![ZERO; k]; k];
    let mut rhs = vec![ZERO; k];
    for i in 0..k {
        rhs[i] = (0..n).map(|m| tone(freqs[i], m).conj() * signal[m]).sum();
        for j in 0..k {
            g[i][j] = gram_entry(freqs[j] - freqs[i], n);
        }
    }
    solve(g, rhs)
}

/// `Σ_{m<n} e^{2πiδm}` in closed form.
fn gram_entry(delta: f64, n: usize) -> C64 {
    let z = tone(delta, 1);
    if (z - ONE).norm() < 1e-14 {
        return C64::new(n as f64, 0.0);
    }
    (ONE - tone(delta, n)) / (ONE - z)
}

fn solve(mut a: Vec<Vec<C64>>, mut b: Vec<C64>) -> Vec<C64> {
    let k = b.len();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col];
        if p.norm() < 1e-300 {
            continue;
        }
        for row in col + 1..k {
            let factor = a[row][col] / p;
            let pivot_row = a[col].clone();
            for (dst, v) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *dst -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![ZERO; k];
    for row in (0..k).rev() {
        let s: C64 = (row + 1..k).map(|c| a[row][c] * x[c]).sum();
        x[row] = if a[row][row].norm() < 1e-300 {
            ZERO
        } else {
            (b[row] - s) / a[row][row]
        };
    }
    x
}

/// Relative threshold separating "signal" from "no signal".
pub const READOUT_THRESHOLD: f64 = 1e-6;

/// Even iff observable single-quantum coherence is present; odd iff only
/// double-quantum coherence survives.
pub fn classify_from_readout(rho: &DeviationDensity, params: &SpinSystemParams) -> Result<Parity> {
    params.validate()?;
    let profile = decompose(rho);
    let threshold = READOUT_THRESHOLD * rho.matrix().entrywise_l1();
    let single = profile.single_quantum();
    let double = profile.double_quantum();
    let has_single = single > threshold && threshold > 0.0;
    let has_double = double > threshold && threshold > 0.0;
    match (has_single, has_double) {
        (true, false) => Ok(Parity::Even),
        (false, true) => Ok(Parity::Odd),
        _ => Err(Error::AmbiguousReadout { single, double }),
    }
}
