//! Truncation scalars: the radius `b_n`, the rate functional `δ_n` with its
//! four components, and the α-truncated moments used by the split of the
//! leading term.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};

/// Default truncation fraction for α-dependent quantities.
pub const DEFAULT_ALPHA: f64 = 0.25;

/// Consecutive doublings with `h < 1` before the upward scan stops.
const PERSISTENCE: usize = 8;
/// Points on the geometric post-check grid above a candidate root.
const POSTCHECK_POINTS: usize = 16;

/// The four terms of `δ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaComponents {
    /// `n P(|X| > b_n)`
    pub d1: f64,
    /// `n b_n⁻¹ |E X I(|X| ≤ b_n)|`
    pub d2: f64,
    /// `n b_n⁻³ |E X³ I(|X| ≤ b_n)|`
    pub d3: f64,
    /// `n b_n⁻⁴ E X⁴ I(|X| ≤ b_n)`
    pub d4: f64,
}

impl DeltaComponents {
    pub fn total(&self) -> f64 {
        self.d1 + self.d2 + self.d3 + self.d4
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.d1, self.d2, self.d3, self.d4]
    }
}

/// All truncation scalars for one `(law, n, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationFunctionals {
    pub dist: String,
    pub n: u64,
    pub alpha: f64,
    pub b_n: f64,
    pub delta_n: f64,
    pub delta_components: DeltaComponents,
    /// `E X I(|X| ≤ α b_n)`
    pub nu: f64,
    /// `E X² I(|X| ≤ α b_n)`
    pub tau2: f64,
    /// `E X² I(|X| ≤ b_n)`
    pub sigma_n2: f64,
    /// `n τ²`
    pub big_b_n2: f64,
    /// `n P(|X| > α b_n)`
    pub rho_n: f64,
    /// `u_{nj} = n E[(X/B_n)^j I(|X| ≤ α b_n)]` for `j = 1..=4`
    pub u: [f64; 4],
}

impl TruncationFunctionals {
    pub fn big_b_n(&self) -> f64 {
        self.big_b_n2.sqrt()
    }
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n", "sample size must be at least 1"));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("alpha must lie in (0, 1], got {alpha}"),
        ));
    }
    Ok(())
}

/// `b_n = sup{x : n x⁻² E[X² I(|X| ≤ x)] ≥ 1}`.
///
/// Probes `h(x) = n x⁻² E[X² I(|X| ≤ x)]` on doublings from 1 (and on the
/// atoms of a discrete law), takes the largest probe with `h ≥ 1`, bisects
/// against the next probe above it, and re-bisects whenever a point on a
/// geometric grid above the root still has `h ≥ 1`.
pub fn compute_bn(dist: &DistributionSpec, n: u64) -> Result<f64> {
    check_n(n)?;
    if dist.scale() != 1.0 {
        return Ok(dist.scale() * compute_bn(&dist.unit(), n)?);
    }
    let nf = n as f64;
    let h = |x: f64| -> Result<f64> { Ok(nf * dist.truncated_moment(2, x)? / (x * x)) };

    let mut probes = Vec::new();
    let mut x = 1.0f64;
    let mut run = 0;
    let mut found = false;
    while run < PERSISTENCE || !found {
        let hx = h(x)?;
        probes.push((x, hx));
        if hx >= 1.0 {
            found = true;
            run = 0;
        } else {
            run += 1;
        }
        x *= 2.0;
        if x > 1e300 {
            break;
        }
    }
    if !found {
        let mut x = 0.5f64;
        while x > 1e-300 {
            let hx = h(x)?;
            probes.push((x, hx));
            if hx >= 1.0 {
                break;
            }
            x *= 0.5;
        }
    }
    if let Some((atoms, _)) = dist.atoms() {
        for a in atoms.iter().map(|a| a.abs()).filter(|a| *a > 0.0) {
            probes.push((a, h(a)?));
        }
    }
    probes.sort_by(|a, b| a.0.total_cmp(&b.0));

    let (mut lo, _) = *probes
        .iter()
        .rev()
        .find(|p| p.1 >= 1.0)
        .ok_or_else(|| Error::Degenerate(dist.name().to_string()))?;
    let mut hi = probes
        .iter()
        .find(|p| p.0 > lo)
        .map(|p| p.0)
        .ok_or_else(|| Error::Degenerate(dist.name().to_string()))?;

    loop {
        for _ in 0..200 {
            if hi - lo <= 1e-15 * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid)? >= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // h must stay below one on a geometric grid between the root and the
        // bracket top; otherwise there is a later crossing.
        let ratio = (hi / lo).max(2.0).powf(1.0 / POSTCHECK_POINTS as f64);
        let mut later = None;
        let mut p = lo;
        for _ in 0..POSTCHECK_POINTS {
            p *= ratio;
            if h(p)? >= 1.0 {
                later = Some(p);
            }
        }
        match later {
            Some(p) => {
                lo = p;
                hi = probes.iter().find(|q| q.0 > p).map(|q| q.0).unwrap_or(2.0 * p);
                while h(hi)? >= 1.0 {
                    lo = hi;
                    hi *= 2.0;
                }
            }
            None => return Ok(lo),
        }
    }
}

/// `b_n` together with the components of `δ_n`.
pub fn compute_delta(dist: &DistributionSpec, n: u64) -> Result<(f64, DeltaComponents)> {
    let unit = dist.unit();
    let b = compute_bn(&unit, n)?;
    Ok((dist.scale() * b, delta_at(&unit, n, b)?))
}

/// `ρ_n = n P(|X| > αb_n)`. Unlike the full set of functionals this needs no
/// mass inside the truncation.
pub fn compute_rho(dist: &DistributionSpec, n: u64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let unit = dist.unit();
    let b = compute_bn(&unit, n)?;
    Ok(n as f64 * unit.tail(alpha * b)?)
}

fn delta_at(dist: &DistributionSpec, n: u64, b: f64) -> Result<DeltaComponents> {
    let nf = n as f64;
    Ok(DeltaComponents {
        d1: nf * dist.tail(b)?,
        d2: nf / b * dist.truncated_moment(1, b)?.abs(),
        d3: nf / b.powi(3) * dist.truncated_moment(3, b)?.abs(),
        d4: nf / b.powi(4) * dist.truncated_moment(4, b)?,
    })
}

/// Fills every truncation scalar for `(dist, n, alpha)`.
///
/// Everything is computed at unit scale; only `b_n`, `ν`, `τ²`, `σ_n²` and
/// `B_n²` then pick up powers of the scale, so the dimensionless fields are
/// exactly scale-invariant.
pub fn compute_functionals(dist: &DistributionSpec, n: u64, alpha: f64) -> Result<TruncationFunctionals> {
    check_n(n)?;
    check_alpha(alpha)?;
    let mut f = unit_functionals(&dist.unit(), n, alpha)?;
    let c = dist.scale();
    if c != 1.0 {
        f.b_n *= c;
        f.nu *= c;
        f.tau2 *= c * c;
        f.sigma_n2 *= c * c;
        f.big_b_n2 *= c * c;
    }
    Ok(f)
}

fn unit_functionals(dist: &DistributionSpec, n: u64, alpha: f64) -> Result<TruncationFunctionals> {
    let (b, components) = compute_delta(dist, n)?;
    let nf = n as f64;
    let cut = alpha * b;
    let tau2 = dist.truncated_moment(2, cut)?;
    if tau2 <= 0.0 {
        return Err(Error::invalid(
            "alpha",
            format!("alpha * b_n = {cut} leaves no mass inside the truncation, so tau^2 = 0"),
        ));
    }
    let big_b2 = nf * tau2;
    let big_b = big_b2.sqrt();
    let mut u = [0.0; 4];
    for (j, slot) in u.iter_mut().enumerate() {
        let order = j as u32 + 1;
        *slot = nf * dist.truncated_moment(order, cut)? / big_b.powi(order as i32);
    }
    Ok(TruncationFunctionals {
        dist: dist.name().to_string(),
        n,
        alpha,
        b_n: b,
        delta_n: components.total(),
        delta_components: components,
        nu: dist.truncated_moment(1, cut)?,
        tau2,
        sigma_n2: dist.truncated_moment(2, b)?,
        big_b_n2: big_b2,
        rho_n: nf * dist.tail(cut)?,
        u,
    })
}
