use serde::Serialize;

use super::MwcError;

/// Every constant the two regimes derive from `(n, W, k*, alpha)`.
#[derive(Clone, Debug, Serialize)]
pub struct MwcParams {
    pub n: usize,
    pub max_weight: u64,
    pub k_star: f64,
    /// `min(2 / log2 n, 1/2)`.
    pub eps: f64,
    /// `(1 - eps)(k* - eps)`.
    pub k: f64,
    pub alpha: f64,
    /// Hop threshold between the regimes, `10 n ln n / alpha`.
    pub h0: f64,
    /// `lambda = sigma = 1 / (5 log2 n)`.
    pub short_step: f64,
    /// `lambda = sigma = 1 / (4 log2 n)`.
    pub long_step: f64,
    pub skeleton_prob: f64,
    /// Hop bound of the skeleton pair search, `ceil(2 h0)`.
    pub pair_hops: u64,
    /// Trial counts that the analysis asks for.
    pub short_trials_nominal: f64,
    pub long_trials_nominal: f64,
}

impl MwcParams {
    /// Requires `n >= 3`, `k* >= 1`, `alpha` (if given) in `[1, n / ln n]` and
    /// `eps` (if given) in `[min_eps(n), 1)`. Without `alpha` the balancing
    /// choice `n^{k/(2k+1)}` is used, clamped to that range.
    pub fn new(
        n: usize,
        max_weight: u64,
        k_star: f64,
        alpha: Option<f64>,
        eps: Option<f64>,
    ) -> Result<Self, MwcError> {
        if n < 3 {
            return Err(MwcError::TooSmall(n));
        }
        if !(k_star >= 1.0 && k_star.is_finite()) {
            return Err(MwcError::BadKStar(k_star));
        }
        let nf = n as f64;
        let ln_n = libm::log(nf);
        let log2_n = libm::log2(nf);
        let floor = min_eps(n);
        let eps = match eps {
            Some(e) if (floor..1.0).contains(&e) => e,
            Some(e) => return Err(MwcError::BadEps { eps: e, min: floor }),
            None => floor,
        };
        let k = (1.0 - eps) * (k_star - eps);
        let alpha_max = nf / ln_n;
        let alpha = match alpha {
            Some(a) if (1.0..=alpha_max).contains(&a) => a,
            Some(a) => return Err(MwcError::BadAlpha { alpha: a, max: alpha_max }),
            None => libm::pow(nf, k / (2.0 * k + 1.0)).clamp(1.0, alpha_max),
        };
        let h0 = 10.0 * nf * ln_n / alpha;
        Ok(MwcParams {
            n,
            max_weight,
            k_star,
            eps,
            k,
            alpha,
            h0,
            short_step: 1.0 / (5.0 * log2_n),
            long_step: 1.0 / (4.0 * log2_n),
            skeleton_prob: (alpha * ln_n / nf).min(1.0),
            pair_hops: libm::ceil(2.0 * h0) as u64,
            short_trials_nominal: 40.0 * libm::pow(nf, 1.0 / k) * ln_n,
            long_trials_nominal: 80.0 * libm::pow(10.0 * alpha, 1.0 / k) * libm::pow(ln_n, 1.0 + 1.0 / k),
        })
    }

    /// Distance guesses of the short-hop regime.
    pub fn short_grid(&self) -> Vec<f64> {
        d_grid(self.short_step, self.n, self.max_weight)
    }

    pub fn long_grid(&self) -> Vec<f64> {
        d_grid(self.long_step, self.n, self.max_weight)
    }

    /// Scaling factor for guess `d` in the short-hop regime.
    pub fn short_gamma(&self, d: f64) -> f64 {
        self.short_step * 2.0 * d / self.h0
    }

    /// Decomposition scale on the scaled graph, `(1 + sigma) d / gamma`.
    /// It does not depend on `d`.
    pub fn short_ldd_scale(&self) -> f64 {
        (1.0 + self.short_step) * self.h0 / (2.0 * self.short_step)
    }

    pub fn short_trials(&self, cap: Option<u64>) -> u64 {
        capped(self.short_trials_nominal, cap)
    }

    pub fn long_trials(&self, cap: Option<u64>) -> u64 {
        capped(self.long_trials_nominal, cap)
    }
}

/// Smallest error parameter the regimes accept: `min(2 / log2 n, 1/2)`.
pub fn min_eps(n: usize) -> f64 {
    (2.0 / libm::log2(n.max(2) as f64)).min(0.5)
}

fn capped(nominal: f64, cap: Option<u64>) -> u64 {
    let t = libm::ceil(nominal).min(u64::MAX as f64) as u64;
    cap.map_or(t, |c| t.min(c))
}

/// `d_l = (1 + step)^l / 2` for `l = 0..=L`, `L = ceil(log_{1+step}(n W))`.
pub fn d_grid(step: f64, n: usize, max_weight: u64) -> Vec<f64> {
    let top = n as f64 * max_weight.max(1) as f64;
    let last = libm::ceil(libm::log(top) / libm::log1p(step)).max(0.0) as usize;
    let mut out = Vec::with_capacity(last + 1);
    let mut d = 0.5f64;
    for _ in 0..=last {
        out.push(d);
        d *= 1.0 + step;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_at_120() {
        let p = MwcParams::new(120, 32, 1.0, None, None).unwrap();
        assert!((p.eps - 2.0 / libm::log2(120.0)).abs() < 1e-15);
        assert!(p.k > 0.0 && p.k < 1.0);
        assert!(p.alpha >= 1.0 && p.alpha <= 120.0 / libm::log(120.0));
        assert!((p.short_ldd_scale() * p.short_gamma(7.0) - (1.0 + p.short_step) * 7.0).abs() < 1e-9);
        assert_eq!(p.short_trials(Some(5)), 5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(MwcParams::new(2, 1, 1.0, None, None).is_err());
        assert!(MwcParams::new(10, 1, 0.5, None, None).is_err());
        assert!(MwcParams::new(10, 1, 1.0, Some(0.5), None).is_err());
        assert!(MwcParams::new(10, 1, 1.0, Some(100.0), None).is_err());
        assert!(MwcParams::new(10, 1, 1.0, None, Some(0.1)).is_err());
        assert_eq!(MwcParams::new(10, 1, 2.0, None, Some(0.75)).unwrap().k, 0.25 * 1.25);
    }

    #[test]
    fn grid_brackets_every_weight() {
        let (n, w) = (30, 17);
        for step in [0.05, 0.3] {
            let g = d_grid(step, n, w);
            for target in 1..=(n as u64 * w) {
                let t = target as f64;
                assert!(g.iter().any(|&d| t <= 2.0 * d && 2.0 * d <= (1.0 + step) * t), "{target}");
            }
        }
    }
}
