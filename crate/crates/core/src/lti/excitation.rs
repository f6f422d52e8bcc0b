use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::model::{c2d_zoh, tf_to_ss, TransferFunction};
use super::sim::simulate_outputs;
use crate::error::{domain, Result, SidError};

/// Fibonacci feedback taps (1-based, register size first) of maximal-length LFSRs.
const LFSR_TAPS: [&[u32]; 31] = [
    &[2, 1],
    &[3, 2],
    &[4, 3],
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 6, 4, 1],
    &[13, 4, 3, 1],
    &[14, 5, 3, 1],
    &[15, 14],
    &[16, 15, 13, 4],
    &[17, 14],
    &[18, 11],
    &[19, 6, 2, 1],
    &[20, 17],
    &[21, 19],
    &[22, 21],
    &[23, 18],
    &[24, 23, 22, 17],
    &[25, 22],
    &[26, 6, 2, 1],
    &[27, 5, 2, 1],
    &[28, 25],
    &[29, 27],
    &[30, 6, 4, 1],
    &[31, 28],
    &[32, 22, 2, 1],
];

/// Feedback taps for a register of `bits` cells.
pub fn lfsr_taps(bits: u32) -> Result<&'static [u32]> {
    if !(2..=32).contains(&bits) {
        return Err(SidError::RegisterSize(bits));
    }
    Ok(LFSR_TAPS[(bits - 2) as usize])
}

/// Fibonacci linear-feedback shift register.
#[derive(Debug, Clone)]
pub struct Lfsr {
    state: u64,
    bits: u32,
    taps: &'static [u32],
}

impl Lfsr {
    pub fn new(bits: u32, seed: u64) -> Result<Self> {
        let taps = lfsr_taps(bits)?;
        let mask = (1u64 << bits) - 1;
        let mut state = splitmix64(seed) & mask;
        if state == 0 {
            state = 1;
        }
        Ok(Self { state, bits, taps })
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// Emits the low cell and shifts the feedback bit in at the top.
    pub fn next_bit(&mut self) -> bool {
        let out = self.state & 1 == 1;
        let fb = self
            .taps
            .iter()
            .fold(0u64, |acc, &t| acc ^ (self.state >> (self.bits - t)));
        self.state = (self.state >> 1) | ((fb & 1) << (self.bits - 1));
        out
    }
}

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Two-level pseudo-random binary sequence, each LFSR chip held for `hold` samples.
pub fn prbs(bits: u32, hold: usize, length: usize, amplitude: f64, seed: u64) -> Result<Vec<f64>> {
    if hold == 0 {
        return domain("PRBS hold must be at least one sample");
    }
    let mut reg = Lfsr::new(bits, seed)?;
    let mut out = Vec::with_capacity(length);
    while out.len() < length {
        let level = if reg.next_bit() { amplitude } else { -amplitude };
        let take = hold.min(length - out.len());
        out.extend(std::iter::repeat_n(level, take));
    }
    Ok(out)
}

/// Gaussian white sequence with standard deviation `sigma`.
pub fn white_noise(sigma: f64, length: usize, seed: u64) -> Result<Vec<f64>> {
    if !(sigma >= 0.0) {
        return domain(format!("noise standard deviation must be nonnegative, got {sigma}"));
    }
    if sigma == 0.0 {
        return Ok(vec![0.0; length]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = Normal::new(0.0, sigma).map_err(|e| SidError::Domain(e.to_string()))?;
    Ok((0..length).map(|_| normal.sample(&mut rng)).collect())
}

/// White Gaussian noise passed through the ZOH-discretized `filter`.
pub fn colored_noise(
    filter: &TransferFunction,
    ts: f64,
    sigma: f64,
    length: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let dss = c2d_zoh(&tf_to_ss(filter)?, ts)?;
    let v = white_noise(sigma, length, seed)?;
    if sigma == 0.0 {
        return Ok(v);
    }
    let u = DMatrix::from_row_slice(1, length, &v);
    let y = simulate_outputs(&dss, &u, None)?;
    Ok(y.row(0).iter().copied().collect())
}
