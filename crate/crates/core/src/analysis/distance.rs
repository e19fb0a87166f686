use super::{Distribution, ReferenceDensity, RescaledDistribution};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Total variation `(1/2) sum |a - b|`.
    TotalVariation,
    /// Kolmogorov-Smirnov `sup |F_a - F_b|`.
    KolmogorovSmirnov,
}

impl std::str::FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "tv" => Ok(Self::TotalVariation),
            "ks" => Ok(Self::KolmogorovSmirnov),
            other => Err(format!("unknown metric `{other}` (expected tv or ks)")),
        }
    }
}

/// One side of a distance computation.
#[derive(Debug, Clone, Copy)]
pub enum Comparand<'a> {
    Lattice(&'a Distribution),
    Rescaled(&'a RescaledDistribution),
    Reference(&'a ReferenceDensity),
}

fn union_range(a: &Distribution, b: &Distribution) -> std::ops::RangeInclusive<i64> {
    let t = a.horizon().max(b.horizon()) as i64;
    -t..=t
}

/// `(1/2) sum_x |a(x) - b(x)|` over integer positions.
pub fn total_variation(a: &Distribution, b: &Distribution) -> Result<f64> {
    Ok(0.5 * union_range(a, b).map(|x| (a.mass(x) - b.mass(x)).abs()).sum::<f64>())
}

/// `sup_x |F_a(x) - F_b(x)|` over integer positions.
pub fn ks_lattice(a: &Distribution, b: &Distribution) -> Result<f64> {
    let (mut fa, mut fb, mut worst) = (0.0, 0.0, 0.0_f64);
    for x in union_range(a, b) {
        fa += a.mass(x);
        fb += b.mass(x);
        worst = worst.max((fa - fb).abs());
    }
    Ok(worst)
}

fn same_lattice(a: &RescaledDistribution, b: &RescaledDistribution) -> Result<()> {
    a.check_same_gamma(b)?;
    if a.base().horizon() != b.base().horizon() {
        return Err(invalid(
            "horizon",
            format!(
                "rescaled lattices differ: horizons {} and {}",
                a.base().horizon(),
                b.base().horizon()
            ),
        ));
    }
    Ok(())
}

/// Total variation between two rescaled distributions on the same lattice.
pub fn total_variation_rescaled(a: &RescaledDistribution, b: &RescaledDistribution) -> Result<f64> {
    same_lattice(a, b)?;
    total_variation(a.base(), b.base())
}

/// KS distance to a continuous reference, evaluated at the midpoints between
/// parity-lattice sites, `(x + 1) / t^gamma`, and below the first site.
pub fn ks_reference(dist: &RescaledDistribution, reference: &ReferenceDensity) -> Result<f64> {
    let base = dist.base();
    let t = base.horizon() as i64;
    let mut worst = reference.cdf(dist.rescaled_position(-t - 1)).abs();
    let mut cumulative = 0.0;
    for x in -t..=t {
        cumulative += base.mass(x);
        if (x + t) % 2 == 0 {
            // include the empty odd site x + 1 so the CDF is the one at the midpoint
            let at_mid = cumulative + base.mass(x + 1);
            worst = worst.max((at_mid - reference.cdf(dist.rescaled_position(x + 1))).abs());
        }
    }
    Ok(worst)
}

/// Total variation against a reference discretized on the rescaled lattice:
/// site `x` receives the reference mass of `((x - 1) / s, (x + 1) / s]`.
fn tv_reference(dist: &RescaledDistribution, reference: &ReferenceDensity) -> Result<f64> {
    let base = dist.base();
    let t = base.horizon() as i64;
    let mut covered = 0.0;
    let mut diff = 0.0;
    for x in (-t..=t).step_by(2) {
        let cell = reference.cdf(dist.rescaled_position(x + 1)) - reference.cdf(dist.rescaled_position(x - 1));
        covered += cell;
        diff += (base.mass(x) - cell).abs();
    }
    let off_parity: f64 = (-t + 1..t).step_by(2).map(|x| base.mass(x)).sum();
    Ok(0.5 * (diff + off_parity + (1.0 - covered).max(0.0)))
}

/// Distance between any two comparable inputs. Continuous references need a
/// rescaled lattice distribution on the other side.
pub fn distribution_distance(a: Comparand<'_>, b: Comparand<'_>, metric: Metric) -> Result<f64> {
    use Comparand::*;
    match (a, b) {
        (Lattice(x), Lattice(y)) => match metric {
            Metric::TotalVariation => total_variation(x, y),
            Metric::KolmogorovSmirnov => ks_lattice(x, y),
        },
        (Rescaled(x), Rescaled(y)) => {
            same_lattice(x, y)?;
            distribution_distance(Lattice(x.base()), Lattice(y.base()), metric)
        }
        (Rescaled(x), Reference(r)) | (Reference(r), Rescaled(x)) => match metric {
            Metric::TotalVariation => tv_reference(x, r),
            Metric::KolmogorovSmirnov => ks_reference(x, r),
        },
        (Lattice(_), Rescaled(_)) | (Rescaled(_), Lattice(_)) => Err(invalid(
            "comparand",
            "cannot compare a raw lattice distribution with a rescaled one; rescale both",
        )),
        (Lattice(_), Reference(_)) | (Reference(_), Lattice(_)) => Err(invalid(
            "comparand",
            "rescale the lattice distribution before comparing with a continuous reference",
        )),
        (Reference(_), Reference(_)) => Err(invalid("comparand", "need at least one lattice distribution")),
    }
}
