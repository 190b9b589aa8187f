//! Physical-layer quantities: direct SNR and range, the collaborative
//! beamforming (CB) directivity bound with its Monte Carlo beam-pattern
//! estimator, the cooperative transmission (CT) gain in closed form and by
//! Monte Carlo, packet success probability, and the Gauss hypergeometric
//! series the closed form reduces to.
//!
//! Everything works in linear units (watts, meters); dBm/dB enter only
//! through the [`ChannelParams`] constructors. All Monte Carlo estimators
//! take a seed and give every trial its own counter-based RNG substream, so
//! estimates are reproducible and independent of how trials are scheduled.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec;

/// Geometry constant in the far-field CB directivity lower bound.
pub const CB_MU: f64 = 0.09332;

/// Antenna constant in the direct-SNR formula (other gains folded in; unity).
pub const C0: f64 = 1.0;

/// Errors from link-model computations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinkError {
    /// A channel parameter violates its range constraint.
    InvalidParams(&'static str),
    /// Distance or radius must be strictly positive.
    NonPositiveDistance(f64),
    /// Node counts must be at least one.
    InvalidCount,
    /// Monte Carlo estimators need at least one trial.
    ZeroTrials,
    /// The beamforming target must lie outside the node disk (far field).
    TargetInsideDisk { target_dist: f64, radius: f64 },
    /// The azimuth grid is too coarse for the directivity quadrature.
    GridTooCoarse { len: usize },
    /// The azimuth grid does not cover [-pi, pi) in ascending order.
    InvalidPhiGrid(&'static str),
    /// Hypergeometric series does not converge for these parameters.
    HypDivergent(String),
    /// The CT gain reduction requires noise * R^alpha / (4 P) < 1.
    TaylorRegime { z: f64 },
}

impl fmt::Display for LinkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkError::InvalidParams(what) => write!(f, "invalid channel parameters: {what}"),
            LinkError::NonPositiveDistance(d) => {
                write!(f, "distance must be positive, got {d}")
            }
            LinkError::InvalidCount => write!(f, "node count must be at least 1"),
            LinkError::ZeroTrials => write!(f, "at least one Monte Carlo trial is required"),
            LinkError::TargetInsideDisk {
                target_dist,
                radius,
            } => write!(
                f,
                "target distance {target_dist} must exceed disk radius {radius}"
            ),
            LinkError::GridTooCoarse { len } => {
                write!(f, "phi grid with {len} points is too coarse (need >= 16)")
            }
            LinkError::InvalidPhiGrid(what) => write!(f, "invalid phi grid: {what}"),
            LinkError::HypDivergent(what) => write!(f, "hypergeometric series diverges: {what}"),
            LinkError::TaylorRegime { z } => write!(
                f,
                "noise*R^alpha/(4P) = {z} >= 1; shrink the disk radius"
            ),
        }
    }
}

impl std::error::Error for LinkError {}

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a dB ratio to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Radio constants shared by every gain formula.
///
/// Stored in linear units; use [`ChannelParams::from_db`] for the usual
/// dBm/dB configuration surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    tx_power: f64,
    noise: f64,
    alpha: f64,
    wavelength: f64,
    packet_len: u32,
    gamma0: f64,
}

impl ChannelParams {
    /// Builds parameters from linear units (watts and plain ratios).
    pub fn new(
        tx_power: f64,
        noise: f64,
        alpha: f64,
        wavelength: f64,
        packet_len: u32,
        gamma0: f64,
    ) -> Result<Self, LinkError> {
        if !(tx_power > 0.0) || !tx_power.is_finite() {
            return Err(LinkError::InvalidParams("tx_power must be > 0"));
        }
        if !(noise > 0.0) || !noise.is_finite() {
            return Err(LinkError::InvalidParams("noise must be > 0"));
        }
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(LinkError::InvalidParams("alpha must be >= 1"));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(LinkError::InvalidParams("wavelength must be > 0"));
        }
        if packet_len < 1 {
            return Err(LinkError::InvalidParams("packet_len must be >= 1"));
        }
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(LinkError::InvalidParams("gamma0 must be > 0"));
        }
        Ok(ChannelParams {
            tx_power,
            noise,
            alpha,
            wavelength,
            packet_len,
            gamma0,
        })
    }

    /// Builds parameters from the usual configuration units: transmit power
    /// and noise in dBm, minimum SNR in dB.
    pub fn from_db(
        tx_power_dbm: f64,
        noise_dbm: f64,
        alpha: f64,
        wavelength: f64,
        packet_len: u32,
        gamma0_db: f64,
    ) -> Result<Self, LinkError> {
        ChannelParams::new(
            dbm_to_watts(tx_power_dbm),
            dbm_to_watts(noise_dbm),
            alpha,
            wavelength,
            packet_len,
            db_to_linear(gamma0_db),
        )
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn packet_len(&self) -> u32 {
        self.packet_len
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    /// Maximal direct-transmission range: the distance at which the SNR with
    /// unit fade equals the threshold, `(P C0 / (gamma0 sigma^2))^(1/alpha)`.
    pub fn max_direct_range(&self) -> f64 {
        (self.tx_power * C0 / (self.gamma0 * self.noise)).powf(1.0 / self.alpha)
    }
}

/// Disk of cooperating nodes around a source, far from the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskGeometry {
    pub radius: f64,
    pub density: f64,
    pub target_dist: f64,
}

impl DiskGeometry {
    pub fn new(radius: f64, density: f64, target_dist: f64) -> Result<Self, LinkError> {
        if !(radius > 0.0) {
            return Err(LinkError::NonPositiveDistance(radius));
        }
        if !(density > 0.0) {
            return Err(LinkError::InvalidParams("density must be > 0"));
        }
        if !(target_dist > radius) {
            return Err(LinkError::TargetInsideDisk {
                target_dist,
                radius,
            });
        }
        Ok(DiskGeometry {
            radius,
            density,
            target_dist,
        })
    }

    /// Number of nodes the disk holds at this density.
    pub fn node_count(&self) -> u64 {
        cb_nodes_in_disk(self.density, self.radius)
    }
}

/// Received SNR of a direct transmission over `distance` with squared fade
/// magnitude `fade_power`: `P C0 d^-alpha fade / sigma^2`.
pub fn snr_direct(
    params: &ChannelParams,
    distance: f64,
    fade_power: f64,
) -> Result<f64, LinkError> {
    if !(distance > 0.0) {
        return Err(LinkError::NonPositiveDistance(distance));
    }
    if !(fade_power >= 0.0) {
        return Err(LinkError::InvalidParams("fade_power must be >= 0"));
    }
    Ok(params.tx_power * C0 * distance.powf(-params.alpha) * fade_power / params.noise)
}

/// Maximal direct range with unit fade; see [`ChannelParams::max_direct_range`].
pub fn max_direct_range(params: &ChannelParams) -> f64 {
    params.max_direct_range()
}

/// Probability that a packet of `packet_len` BPSK symbols survives a
/// Rayleigh-faded hop of length `r`:
/// `((1 + sqrt(P / (P + sigma^2 r^alpha))) / 2)^L`.
pub fn ct_success_prob(params: &ChannelParams, r: f64) -> f64 {
    debug_assert!(r >= 0.0);
    let ratio = params.tx_power / (params.tx_power + params.noise * r.powf(params.alpha));
    (0.5 + 0.5 * ratio.sqrt()).powi(params.packet_len as i32)
}

// ---------------------------------------------------------------------------
// Gauss hypergeometric series
// ---------------------------------------------------------------------------

const HYP_MAX_TERMS: usize = 100_000;
const HYP_REL_TOL: f64 = 1e-14;

/// Gauss hypergeometric function `2F1(a, b; c; z)` by series summation.
///
/// When `b` is a nonpositive integer `-L` the series terminates and all
/// `L + 1` polynomial terms are summed; a compensated f64 pass handles the
/// well-conditioned cases and an exact big-integer pass takes over when the
/// alternating terms cancel. Otherwise the series is summed until the next
/// term falls below `1e-14` of the partial sum, which requires `|z| < 1`.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64, LinkError> {
    for (name, v) in [("a", a), ("b", b), ("c", c), ("z", z)] {
        if !v.is_finite() {
            return Err(LinkError::HypDivergent(format!("{name} = {v} is not finite")));
        }
    }
    let b_is_nonpos_int = b <= 0.0 && b == b.trunc() && b >= -(u32::MAX as f64);
    if b_is_nonpos_int {
        let l = (-b) as u64;
        // (c)_n vanishes at n = -c + 1; fatal only if that happens within the
        // polynomial's L terms.
        if c <= 0.0 && c == c.trunc() && (-c as u64) < l {
            return Err(LinkError::HypDivergent(format!(
                "c = {c} is a nonpositive integer inside the terminating range"
            )));
        }
        return Ok(hyp2f1_terminating(a, l, c, z));
    }
    if z.abs() >= 1.0 {
        return Err(LinkError::HypDivergent(format!(
            "|z| = {} >= 1 with a nonterminating series",
            z.abs()
        )));
    }
    if c <= 0.0 && c == c.trunc() {
        return Err(LinkError::HypDivergent(format!(
            "c = {c} is a nonpositive integer"
        )));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut term = 1.0f64;
    for n in 0..HYP_MAX_TERMS {
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        if n > 1 && term.abs() < HYP_REL_TOL * sum.abs() {
            return Ok(sum);
        }
    }
    Err(LinkError::HypDivergent(format!(
        "no convergence after {HYP_MAX_TERMS} terms (a={a}, b={b}, c={c}, z={z})"
    )))
}

/// Terminating branch: compensated f64 recurrence with a cancellation guard.
fn hyp2f1_terminating(a: f64, l: u64, c: f64, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut term = 1.0f64;
    let mut max_abs = 0.0f64;
    for n in 0..=l {
        max_abs = max_abs.max(term.abs());
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if n < l {
            let nf = n as f64;
            term *= (a + nf) * (nf - l as f64) / ((c + nf) * (nf + 1.0)) * z;
        }
    }
    // With alternating signs the partial terms can dwarf the result; the f64
    // pass is then meaningless and the polynomial is re-summed exactly.
    if sum.is_finite() && max_abs <= 2.0 * sum.abs() {
        sum
    } else {
        hyp2f1_terminating_exact(a, l, c, z)
    }
}

/// Splits a finite f64 into `(m, k)` with value `m * 2^-k` and `k >= 0`.
fn dyadic(x: f64) -> (BigInt, u64) {
    if x == 0.0 {
        return (BigInt::from(0), 0);
    }
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, exp) = if raw_exp == 0 {
        (frac, -1074i64)
    } else {
        (frac | (1u64 << 52), raw_exp - 1075)
    };
    let mut m = BigInt::from(mant);
    if x < 0.0 {
        m = -m;
    }
    if exp >= 0 {
        (m << exp as u64, 0)
    } else {
        (m, (-exp) as u64)
    }
}

/// Exact evaluation of the degree-`l` polynomial over a shared big-integer
/// denominator. The inputs are dyadic rationals, so every term is an exact
/// rational; one rounding happens at the final conversion.
fn hyp2f1_terminating_exact(a: f64, l: u64, c: f64, z: f64) -> f64 {
    let (pa, ka) = dyadic(a);
    let (pc, kc) = dyadic(c);
    let (pz, kz) = dyadic(z);
    // term over denom; sum over the SAME denom. Step n -> n+1 multiplies
    //   term by (a+n)(n-l)z / ((c+n)(n+1))
    //         = [(pa + n 2^ka)(n - l) pz 2^kc] / [2^(ka+kz) (pc + n 2^kc)(n+1)]
    let mut term_num = BigInt::from(1);
    let mut sum_num = BigInt::from(1);
    let mut denom = BigInt::from(1);
    for n in 0..l {
        let f_num = (&pa + (BigInt::from(n) << ka))
            * (BigInt::from(n as i64 - l as i64))
            * &pz
            * (BigInt::from(1) << kc);
        let f_den =
            ((&pc + (BigInt::from(n) << kc)) * BigInt::from(n + 1)) << (ka + kz);
        term_num *= &f_num;
        if term_num.sign() == Sign::NoSign {
            break; // a or z hit an exact zero; remaining terms vanish
        }
        sum_num *= &f_den;
        denom *= &f_den;
        sum_num += &term_num;
    }
    big_ratio_to_f64(&sum_num, &denom)
}

/// Rounds the exact rational `num/den` to the nearest f64.
fn big_ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.sign() == Sign::NoSign {
        return 0.0;
    }
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let n = num.magnitude();
    let d = den.magnitude();
    // Aim for a ~56-bit quotient, then round by remainder.
    let shift = 56i64 - (n.bits() as i64 - d.bits() as i64);
    let (scaled_n, scaled_d): (BigUint, BigUint) = if shift >= 0 {
        (n << shift as u64, d.clone())
    } else {
        (n.clone(), d << (-shift) as u64)
    };
    let mut q = &scaled_n / &scaled_d;
    let r = scaled_n - &q * &scaled_d;
    if (r << 1u8) >= scaled_d {
        q += 1u8;
    }
    // q has ~57 bits by construction; fold limbs for safety.
    let qf = q
        .to_u64_digits()
        .iter()
        .rev()
        .fold(0.0, |acc, &d| acc * 1.8446744073709552e19 + d as f64);
    let e = (-shift).clamp(-3000, 3000) as i32;
    let val = qf * 2f64.powi(e);
    if negative {
        -val
    } else {
        val
    }
}

// ---------------------------------------------------------------------------
// Cooperative transmission
// ---------------------------------------------------------------------------

/// Result of a Monte Carlo estimate: sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
}

/// Average CT link gain over random relay placements, closed form:
/// `1 + (N-1) 2F1(2/alpha, -L; (alpha+2)/alpha; sigma^2 R^alpha / (4P))`.
///
/// Returns exactly 1 for a single node. Errors when the series argument
/// reaches 1, i.e. when the node disk is too large for the underlying
/// good-source-relay-links approximation.
pub fn ct_gain_analytic(params: &ChannelParams, count: u64, radius: f64) -> Result<f64, LinkError> {
    if count == 0 {
        return Err(LinkError::InvalidCount);
    }
    if !(radius > 0.0) {
        return Err(LinkError::NonPositiveDistance(radius));
    }
    if count == 1 {
        return Ok(1.0);
    }
    let z = params.noise * radius.powf(params.alpha) / (4.0 * params.tx_power);
    if z >= 1.0 {
        return Err(LinkError::TaylorRegime { z });
    }
    let alpha = params.alpha;
    let f = hyp2f1(
        2.0 / alpha,
        -(params.packet_len as f64),
        (alpha + 2.0) / alpha,
        z,
    )?;
    Ok(1.0 + (count - 1) as f64 * f)
}

/// One placement sample of the CT gain: the source sits at the disk center,
/// the `count - 1` relays fall with radial density `2r/R^2` and uniform
/// angle, and each contributes `(A/d)^alpha P_r(r)` at the far target.
pub fn ct_gain_sample<R: Rng>(
    params: &ChannelParams,
    count: u64,
    radius: f64,
    target_dist: f64,
    rng: &mut R,
) -> f64 {
    let alpha = params.alpha;
    // center node: d = A exactly and P_r(0) = 1
    let mut total = 1.0;
    for _ in 1..count {
        let r = radius * rng.gen::<f64>().sqrt();
        let psi = TAU * rng.gen::<f64>();
        let d = (target_dist * target_dist + r * r - 2.0 * r * target_dist * psi.cos()).sqrt();
        total += (target_dist / d).powf(alpha) * ct_success_prob(params, r);
    }
    total
}

/// Monte Carlo estimate of the average CT gain toward a target at
/// `target_dist`, using one RNG substream per trial (deterministic in
/// `seed`, independent of scheduling).
pub fn ct_gain_montecarlo(
    params: &ChannelParams,
    count: u64,
    radius: f64,
    target_dist: f64,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, LinkError> {
    if count == 0 {
        return Err(LinkError::InvalidCount);
    }
    if trials == 0 {
        return Err(LinkError::ZeroTrials);
    }
    if !(radius > 0.0) {
        return Err(LinkError::NonPositiveDistance(radius));
    }
    if !(target_dist > radius) {
        return Err(LinkError::TargetInsideDisk {
            target_dist,
            radius,
        });
    }
    let params = *params;
    let samples = exec::indexed_map(trials, move |i| {
        ct_gain_sample(&params, count, radius, target_dist, &mut trial_rng(seed, i))
    });
    Ok(summarize(&samples))
}

fn summarize(samples: &[f64]) -> MonteCarloEstimate {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let std_error = if samples.len() > 1 {
        let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    MonteCarloEstimate {
        estimate: mean,
        std_error,
    }
}

/// RNG substream for one Monte Carlo trial: `seed` keys the cipher, the
/// trial index selects the stream.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

// ---------------------------------------------------------------------------
// Collaborative beamforming
// ---------------------------------------------------------------------------

/// Nodes available for beamforming in a disk of radius `radius` at density
/// `rho`: `floor(rho * pi * R^2)`. Zero means CB is not possible there.
pub fn cb_nodes_in_disk(rho: f64, radius: f64) -> u64 {
    let x = rho * PI * radius * radius;
    let guarded = x + x.abs() * 1e-12;
    if guarded < 0.0 {
        0
    } else {
        guarded.floor() as u64
    }
}

/// Far-field lower bound on the average CB directivity of `count` nodes in
/// a disk of radius `radius`: `N / (1 + mu N lambda / R)`.
pub fn cb_gain_lower_bound(count: u64, radius: f64, wavelength: f64) -> f64 {
    let n = count as f64;
    n / (1.0 + CB_MU * n * wavelength / radius)
}

/// Beam pattern of one random placement plus its directivity estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CbPattern {
    /// `P(0) / ((1/2pi) integral of P)`; at least 1 since `P(phi) <= P(0) = 1`.
    pub directivity: f64,
    /// `P(phi)` sampled on the input grid.
    pub pattern: Vec<f64>,
}

fn validate_phi_grid(grid: &[f64]) -> Result<(), LinkError> {
    if grid.len() < 16 {
        return Err(LinkError::GridTooCoarse { len: grid.len() });
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LinkError::InvalidPhiGrid("grid must be strictly ascending"));
    }
    let first = grid[0];
    let last = *grid.last().unwrap();
    if first < -PI - 1e-9 || last > PI + 1e-9 {
        return Err(LinkError::InvalidPhiGrid("grid must lie within [-pi, pi]"));
    }
    let min_span = TAU * (1.0 - 2.0 / grid.len() as f64) - 1e-9;
    if last - first < min_span {
        return Err(LinkError::InvalidPhiGrid("grid must cover [-pi, pi)"));
    }
    Ok(())
}

/// Uniform half-open azimuth grid `-pi + 2 pi i / len`, `i = 0..len`.
pub fn uniform_phi_grid(len: usize) -> Vec<f64> {
    (0..len).map(|i| -PI + TAU * i as f64 / len as f64).collect()
}

/// One placement sample of the CB beam pattern on `phi_grid`.
///
/// Node 1 sits at the disk center and the rest fall like the CT sampler.
/// With phases aligned at boresight, the array factor at azimuth `phi` is
/// `F(phi) = (1/N) sum_k exp(-j (4 pi / lambda) r_k sin(phi/2) sin(psi_k - phi/2))`
/// and the pattern is `P(phi) = |F|^2`. Directivity uses `P(0) = 1` over the
/// trapezoidal mean of `P` around the circle.
pub fn cb_pattern_sample<R: Rng>(
    count: u64,
    radius: f64,
    wavelength: f64,
    phi_grid: &[f64],
    rng: &mut R,
) -> CbPattern {
    let mut r = Vec::with_capacity(count as usize);
    let mut psi = Vec::with_capacity(count as usize);
    r.push(0.0);
    psi.push(0.0);
    for _ in 1..count {
        r.push(radius * rng.gen::<f64>().sqrt());
        psi.push(TAU * rng.gen::<f64>());
    }
    let wave_factor = 4.0 * PI / wavelength;
    let inv_n = 1.0 / count as f64;
    let pattern: Vec<f64> = phi_grid
        .iter()
        .map(|&phi| {
            let half = 0.5 * phi;
            let s = half.sin();
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..count as usize {
                let phase = -wave_factor * r[k] * s * (psi[k] - half).sin();
                re += phase.cos();
                im += phase.sin();
            }
            (re * re + im * im) * inv_n * inv_n
        })
        .collect();
    let directivity = TAU / periodic_trapezoid(phi_grid, &pattern);
    CbPattern {
        directivity,
        pattern,
    }
}

/// Trapezoidal integral of a periodic function sampled on an ascending grid
/// covering one period, closing the wrap-around segment.
fn periodic_trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    let mut integral = 0.0;
    for i in 0..grid.len() - 1 {
        integral += 0.5 * (values[i] + values[i + 1]) * (grid[i + 1] - grid[i]);
    }
    let wrap = grid[0] + TAU - grid[grid.len() - 1];
    integral += 0.5 * (values[grid.len() - 1] + values[0]) * wrap;
    integral
}

/// Beam pattern and directivity of a single seeded placement.
pub fn cb_pattern_montecarlo(
    count: u64,
    radius: f64,
    wavelength: f64,
    phi_grid: &[f64],
    seed: u64,
) -> Result<CbPattern, LinkError> {
    if count == 0 {
        return Err(LinkError::InvalidCount);
    }
    if !(radius > 0.0) {
        return Err(LinkError::NonPositiveDistance(radius));
    }
    validate_phi_grid(phi_grid)?;
    Ok(cb_pattern_sample(
        count,
        radius,
        wavelength,
        phi_grid,
        &mut trial_rng(seed, 0),
    ))
}

/// Mean CB directivity over independent placements, one RNG substream per
/// placement, on a uniform grid of `grid_len` azimuth points.
pub fn cb_gain_montecarlo(
    count: u64,
    radius: f64,
    wavelength: f64,
    grid_len: usize,
    placements: u64,
    seed: u64,
) -> Result<MonteCarloEstimate, LinkError> {
    if count == 0 {
        return Err(LinkError::InvalidCount);
    }
    if placements == 0 {
        return Err(LinkError::ZeroTrials);
    }
    if !(radius > 0.0) {
        return Err(LinkError::NonPositiveDistance(radius));
    }
    let grid = uniform_phi_grid(grid_len);
    validate_phi_grid(&grid)?;
    let samples = exec::indexed_map(placements, move |i| {
        cb_pattern_sample(count, radius, wavelength, &grid, &mut trial_rng(seed, i)).directivity
    });
    Ok(summarize(&samples))
}
