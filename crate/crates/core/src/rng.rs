//! Deterministic sampling.
//!
//! The generator is xorshift64* seeded through one round of splitmix64, so
//! any implementation following the recurrences below reproduces the same
//! sample stream:
//!
//! ```text
//! seeding:  z = seed + 0x9E3779B97F4A7C15
//!           z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!           z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!           state = z ^ (z >> 31)          (0 is replaced by 0x9E3779B97F4A7C15)
//! step:     x ^= x >> 12; x ^= x << 25; x ^= x >> 27
//!           output = x * 0x2545F4914F6CDD1D
//! uniform:  (output >> 11) * 2^-53 in [0, 1)
//! ```
//!
//! All arithmetic is wrapping 64-bit. Ball samples are drawn coordinate-wise
//! uniform in the cube `[-radius, radius]^d` and rejected until strictly
//! inside the ball.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Debug)]
pub struct Xorshift {
    state: u64,
}

impl Xorshift {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(GOLDEN);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Self {
            state: if z == 0 { GOLDEN } else { z },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform point in the open ball of the given radius.
    pub fn ball(&mut self, dim: usize, radius: f64) -> Vec<f64> {
        loop {
            let p: Vec<f64> = (0..dim).map(|_| self.uniform(-radius, radius)).collect();
            if p.iter().map(|v| v * v).sum::<f64>() < radius * radius {
                return p;
            }
        }
    }
}
