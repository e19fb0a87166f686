use super::Distribution;
use crate::error::{invalid, Result};

/// Default tail level: 97% of the mass near the endpoints.
pub const DEFAULT_ALPHA: f64 = 0.03;

/// Left-tail width `epsilon_t` holding `(1 - alpha) / 2` of the mass, and
/// `alpha_t = epsilon_t / t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailStats {
    pub alpha: f64,
    pub horizon: usize,
    pub epsilon_t: usize,
    pub alpha_t: f64,
}

/// Smallest `k` with `sum_{i=-t}^{-t+k} p(i) >= (1 - alpha) / 2`.
pub fn tail_epsilon(dist: &Distribution, alpha: f64) -> Result<TailStats> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    let target = (1.0 - alpha) / 2.0;
    let mut acc = 0.0;
    let mut epsilon_t = dist.masses().len() - 1;
    for (k, &m) in dist.masses().iter().enumerate() {
        acc += m;
        if acc >= target {
            epsilon_t = k;
            break;
        }
    }
    let t = dist.horizon();
    Ok(TailStats {
        alpha,
        horizon: t,
        epsilon_t,
        alpha_t: epsilon_t as f64 / t as f64,
    })
}

/// `(t, alpha_t)` for each distribution.
pub fn alpha_t_series(dists: &[Distribution], alpha: f64) -> Result<Vec<(f64, f64)>> {
    dists
        .iter()
        .map(|d| tail_epsilon(d, alpha).map(|s| (d.horizon() as f64, s.alpha_t)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bernoulli_endpoints() {
        let d = Distribution::from_points(50, [(-50, 0.5), (50, 0.5)]).unwrap();
        let s = tail_epsilon(&d, 0.03).unwrap();
        assert_eq!((s.epsilon_t, s.alpha_t), (0, 0.0));
    }

    #[test]
    fn point_mass_at_origin() {
        let d = Distribution::point_mass(40, 0).unwrap();
        assert_eq!(tail_epsilon(&d, 0.03).unwrap().epsilon_t, 40);
    }

    #[test]
    fn uniform_lattice() {
        let d = Distribution::new(100, vec![1.0 / 201.0; 201]).unwrap();
        let s = tail_epsilon(&d, 0.03).unwrap();
        assert_eq!(s.epsilon_t, 97);
        assert_eq!(s.alpha_t, 0.97);
    }

    #[test]
    fn rejects_bad_alpha() {
        let d = Distribution::point_mass(4, 0).unwrap();
        assert!(tail_epsilon(&d, 0.0).is_err());
        assert!(tail_epsilon(&d, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn larger_alpha_never_widens_the_tail(
            weights in proptest::collection::vec(0.0f64..1.0, 21),
            a in 0.001f64..0.999,
            b in 0.001f64..0.999,
        ) {
            let total: f64 = weights.iter().sum();
            prop_assume!(total > 1e-6);
            let d = Distribution::new(10, weights.iter().map(|w| w / total).collect()).unwrap();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let s_lo = tail_epsilon(&d, lo).unwrap();
            let s_hi = tail_epsilon(&d, hi).unwrap();
            prop_assert!(s_hi.epsilon_t <= s_lo.epsilon_t);
            prop_assert!(s_lo.epsilon_t <= 20);
            prop_assert_eq!(s_lo.alpha_t, s_lo.epsilon_t as f64 / 10.0);
        }
    }
}
