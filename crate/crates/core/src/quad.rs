//! Fixed quadrature rules and the deterministic PRNG used by the
//! validation suites.

/// 16-point Gauss-Legendre abscissae on `[-1, 1]` (negative half; the rule
/// is symmetric).
pub(crate) const GL16_X: [f64; 8] = [
    -0.989_400_934_991_649_932_6,
    -0.944_575_023_073_232_576_1,
    -0.865_631_202_387_831_743_9,
    -0.755_404_408_355_003_033_9,
    -0.617_876_244_402_643_748_4,
    -0.458_016_777_657_227_386_3,
    -0.281_603_550_779_258_913_2,
    -0.095_012_509_837_637_440_2,
];

pub(crate) const GL16_W: [f64; 8] = [
    0.027_152_459_411_754_094_85,
    0.062_253_523_938_647_892_86,
    0.095_158_511_682_492_784_81,
    0.124_628_971_255_533_872_1,
    0.149_595_988_816_576_732_1,
    0.169_156_519_395_002_538_2,
    0.182_603_415_044_923_588_9,
    0.189_450_610_455_068_496_3,
];

/// 16-point Gauss-Legendre approximation of the integral of `f` over `[a, b]`.
pub fn gauss_legendre_16(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for i in 0..8 {
        sum += GL16_W[i] * (f(mid + half * GL16_X[i]) + f(mid - half * GL16_X[i]));
    }
    half * sum
}

/// SplitMix64: tiny, seedable, identical on every platform. Used to build
/// the random corpora of the validation suites so frozen expectations stay
/// reproducible.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Log-uniform in `[lo, hi)`, for densities spanning decades.
    pub fn log_in_range(&mut self, lo: f64, hi: f64) -> f64 {
        crate::math::exp(self.in_range(crate::math::ln(lo), crate::math::ln(hi)))
    }
}
