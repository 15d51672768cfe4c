//! Channel realizations and their decomposition into BC subchannels.

use nalgebra::{Complex, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::{CMatrix, Node};

/// Singular values below this fraction of the largest one count as zero.
pub const RANK_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub n1: usize,
    pub n2: usize,
    pub n_r: usize,
    pub p1_max: f64,
    pub p2_max: f64,
    pub pr_max: f64,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub sigmar_sq: f64,
    pub seed: u64,
}

impl SystemConfig {
    /// Configuration with one common noise variance at every node.
    pub fn uniform_noise(
        (n1, n2, n_r): (usize, usize, usize),
        (p1_max, p2_max, pr_max): (f64, f64, f64),
        sigma_sq: f64,
        seed: u64,
    ) -> Self {
        SystemConfig {
            n1,
            n2,
            n_r,
            p1_max,
            p2_max,
            pr_max,
            sigma1_sq: sigma_sq,
            sigma2_sq: sigma_sq,
            sigmar_sq: sigma_sq,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 == 0 || self.n2 == 0 || self.n_r == 0 {
            return Err(Error::InvalidConfig(
                "antenna counts must be at least 1".into(),
            ));
        }
        for (name, v) in [
            ("sigma1_sq", self.sigma1_sq),
            ("sigma2_sq", self.sigma2_sq),
            ("sigmar_sq", self.sigmar_sq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [
            ("p1_max", self.p1_max),
            ("p2_max", self.p2_max),
            ("pr_max", self.pr_max),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be nonnegative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn antennas(&self, node: Node) -> usize {
        match node {
            Node::One => self.n1,
            Node::Two => self.n2,
        }
    }

    pub fn power_budget(&self, node: Node) -> f64 {
        match node {
            Node::One => self.p1_max,
            Node::Two => self.p2_max,
        }
    }

    pub fn noise(&self, node: Node) -> f64 {
        match node {
            Node::One => self.sigma1_sq,
            Node::Two => self.sigma2_sq,
        }
    }
}

/// The four channel matrices of one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// Node 1 to relay, `n_r x n1`.
    pub h1r: CMatrix,
    /// Node 2 to relay, `n_r x n2`.
    pub h2r: CMatrix,
    /// Relay to node 1, `n1 x n_r`.
    pub hr1: CMatrix,
    /// Relay to node 2, `n2 x n_r`.
    pub hr2: CMatrix,
}

impl ChannelSet {
    pub fn uplink(&self, node: Node) -> &CMatrix {
        match node {
            Node::One => &self.h1r,
            Node::Two => &self.h2r,
        }
    }

    pub fn downlink(&self, node: Node) -> &CMatrix {
        match node {
            Node::One => &self.hr1,
            Node::Two => &self.hr2,
        }
    }

    pub fn check_dims(&self, config: &SystemConfig) -> Result<()> {
        let expect = [
            ("h1r", &self.h1r, (config.n_r, config.n1)),
            ("h2r", &self.h2r, (config.n_r, config.n2)),
            ("hr1", &self.hr1, (config.n1, config.n_r)),
            ("hr2", &self.hr2, (config.n2, config.n_r)),
        ];
        for (name, m, shape) in expect {
            if m.shape() != shape {
                return Err(Error::Dimension(format!(
                    "{name} is {:?}, expected {:?}",
                    m.shape(),
                    shape
                )));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::Dimension(format!("{name} has non-finite entries")));
            }
        }
        Ok(())
    }
}

/// Independent RNG stream for one Monte-Carlo trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

/// Circularly-symmetric complex Gaussian with unit variance.
pub fn complex_gaussian<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex<f64> {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Draws i.i.d. unit-variance Rayleigh channels for trial `trial_index`.
pub fn generate_channels(config: &SystemConfig, trial_index: u64) -> ChannelSet {
    let mut rng = trial_rng(config.seed, trial_index);
    let h1r = gaussian_matrix(config.n_r, config.n1, &mut rng);
    let h2r = gaussian_matrix(config.n_r, config.n2, &mut rng);
    let hr1 = gaussian_matrix(config.n1, config.n_r, &mut rng);
    let hr2 = gaussian_matrix(config.n2, config.n_r, &mut rng);
    ChannelSet { h1r, h2r, hr1, hr2 }
}

/// SVD of one relay-to-node channel, `H = U diag(omega) V^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionGains {
    /// `omega(k)^2 / sigma^2` for the nonzero singular values, descending.
    pub alpha: Vec<f64>,
    /// All `min(n_i, n_r)` singular values, descending.
    pub omega: Vec<f64>,
    /// Left factor, `n_i x min(n_i, n_r)`.
    pub u: CMatrix,
    /// Right factor completed to a unitary `n_r x n_r` matrix.
    pub v: CMatrix,
}

impl DirectionGains {
    /// Gains of a diagonal channel with unit noise, for instances given
    /// directly as gain lists. `V` is the identity.
    pub fn from_gains(mut alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() || alpha.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidConfig(
                "gain lists must be nonempty with positive finite entries".into(),
            ));
        }
        alpha.sort_by(|a, b| b.total_cmp(a));
        let n = alpha.len();
        Ok(DirectionGains {
            omega: alpha.iter().map(|a| a.sqrt()).collect(),
            u: CMatrix::identity(n, n),
            v: CMatrix::identity(n, n),
            alpha,
        })
    }

    pub fn rank(&self) -> usize {
        self.alpha.len()
    }

    /// `U diag(omega) V^H` using the thin factors.
    pub fn reconstruct(&self) -> CMatrix {
        let k = self.omega.len();
        let mut us = self.u.clone();
        for (j, &w) in self.omega.iter().enumerate() {
            us.column_mut(j).scale_mut(w);
        }
        us * self.v.columns(0, k).adjoint()
    }
}

/// BC subchannel gains for both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SubchannelGains {
    pub dirs: [DirectionGains; 2],
}

impl SubchannelGains {
    pub fn from_gain_lists(alpha1: Vec<f64>, alpha2: Vec<f64>) -> Result<Self> {
        Ok(SubchannelGains {
            dirs: [
                DirectionGains::from_gains(alpha1)?,
                DirectionGains::from_gains(alpha2)?,
            ],
        })
    }

    pub fn dir(&self, node: Node) -> &DirectionGains {
        &self.dirs[node.index()]
    }

    pub fn alpha(&self, node: Node) -> &[f64] {
        &self.dirs[node.index()].alpha
    }
}

fn decompose_one(h: &CMatrix, sigma_sq: f64, node: Node) -> Result<DirectionGains> {
    let svd = SVD::new(h.clone(), true, true);
    let u = svd.u.expect("u requested");
    let v_t = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let omega: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u = CMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
    let v_thin = CMatrix::from_fn(v_t.ncols(), k, |r, c| v_t[(order[c], r)].conj());

    let top = omega.first().copied().unwrap_or(0.0);
    let alpha: Vec<f64> = omega
        .iter()
        .take_while(|&&w| top > 0.0 && w > RANK_CUTOFF * top)
        .map(|w| w * w / sigma_sq)
        .collect();
    if alpha.is_empty() {
        return Err(Error::RankZero {
            node: node.index() as u8 + 1,
        });
    }
    Ok(DirectionGains {
        alpha,
        omega,
        u,
        v: linalg::complete_unitary(&v_thin),
    })
}

/// Decomposes both relay-to-node channels.
pub fn decompose(channels: &ChannelSet, config: &SystemConfig) -> Result<SubchannelGains> {
    Ok(SubchannelGains {
        dirs: [
            decompose_one(&channels.hr1, config.sigma1_sq, Node::One)?,
            decompose_one(&channels.hr2, config.sigma2_sq, Node::Two)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, frobenius, is_unitary};
    use approx::assert_relative_eq;

    fn cfg(n1: usize, n2: usize, n_r: usize) -> SystemConfig {
        SystemConfig::uniform_noise((n1, n2, n_r), (1.0, 1.0, 1.0), 1.0, 42)
    }

    fn with_downlinks(hr1: CMatrix, hr2: CMatrix, n_r: usize) -> ChannelSet {
        let (n1, n2) = (hr1.nrows(), hr2.nrows());
        ChannelSet {
            h1r: CMatrix::zeros(n_r, n1),
            h2r: CMatrix::zeros(n_r, n2),
            hr1,
            hr2,
        }
    }

    #[test]
    fn deterministic_per_trial() {
        let config = cfg(3, 2, 4);
        assert_eq!(generate_channels(&config, 5), generate_channels(&config, 5));
        assert_ne!(generate_channels(&config, 5), generate_channels(&config, 6));
    }

    #[test]
    fn unit_variance() {
        let mut rng = trial_rng(7, 0);
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|_| complex_gaussian(&mut rng).norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.05, "mean |h|^2 = {mean}");
    }

    #[test]
    fn trial_streams_uncorrelated() {
        let n = 10_000;
        let mut a = trial_rng(11, 0);
        let mut b = trial_rng(11, 1);
        let xs: Vec<Complex<f64>> = (0..n).map(|_| complex_gaussian(&mut a)).collect();
        let ys: Vec<Complex<f64>> = (0..n).map(|_| complex_gaussian(&mut b)).collect();
        // sample correlation of the real parts and of the imaginary parts
        for part in [|z: &Complex<f64>| z.re, |z: &Complex<f64>| z.im] {
            let x: Vec<f64> = xs.iter().map(part).collect();
            let y: Vec<f64> = ys.iter().map(part).collect();
            let mx = x.iter().sum::<f64>() / n as f64;
            let my = y.iter().sum::<f64>() / n as f64;
            let cov: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
            let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
            let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
            let rho = cov / (vx * vy).sqrt();
            assert!(rho.abs() < 0.1, "correlation {rho}");
        }
    }

    #[test]
    fn identity_channel() {
        let ch = with_downlinks(CMatrix::identity(2, 2), CMatrix::identity(2, 2), 2);
        let g = decompose(&ch, &cfg(2, 2, 2)).unwrap();
        assert_eq!(g.alpha(Node::One).len(), 2);
        for a in g.alpha(Node::One) {
            assert_relative_eq!(*a, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn diagonal_channel() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 0)] = c(1.0);
        h[(1, 1)] = c(2.0);
        let ch = with_downlinks(h.clone(), h, 2);
        let g = decompose(&ch, &cfg(2, 2, 2)).unwrap();
        let a = g.alpha(Node::Two);
        assert_relative_eq!(a[0], 4.0, epsilon = 1e-14);
        assert_relative_eq!(a[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn noise_scales_gains() {
        let mut config = cfg(1, 1, 1);
        config.sigma1_sq = 0.5;
        let ch = with_downlinks(CMatrix::identity(1, 1) * c(2.0), CMatrix::identity(1, 1), 1);
        let g = decompose(&ch, &config).unwrap();
        assert_relative_eq!(g.alpha(Node::One)[0], 8.0, epsilon = 1e-14);
    }

    #[test]
    fn random_reconstruction_and_unitarity() {
        for trial in 0..20 {
            for (n_i, n_r) in [(3, 3), (2, 4), (4, 2), (1, 3)] {
                let config = cfg(n_i, n_i, n_r);
                let ch = generate_channels(&config, trial);
                let g = decompose(&ch, &config).unwrap();
                for node in Node::BOTH {
                    let d = g.dir(node);
                    let h = ch.downlink(node);
                    assert_eq!(d.v.shape(), (n_r, n_r));
                    assert!(is_unitary(&d.v, 1e-10));
                    assert!(frobenius(&(d.reconstruct() - h)) / frobenius(h) < 1e-10);
                    assert_eq!(d.rank(), n_i.min(n_r));
                    assert!(d.alpha.windows(2).all(|w| w[0] >= w[1]));
                    for (a, w) in d.alpha.iter().zip(&d.omega) {
                        assert_relative_eq!(*a, w * w, max_relative = 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn rank_deficient_channel() {
        // rank-one 3x3 channel
        let x = CMatrix::from_fn(3, 1, |r, _| c(r as f64 + 1.0));
        let h = &x * x.adjoint();
        let ch = with_downlinks(h, CMatrix::identity(3, 3), 3);
        let g = decompose(&ch, &cfg(3, 3, 3)).unwrap();
        assert_eq!(g.dir(Node::One).rank(), 1);
        assert_relative_eq!(g.alpha(Node::One)[0], 14.0 * 14.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_channel_is_rank_zero() {
        let ch = with_downlinks(CMatrix::identity(2, 2), CMatrix::zeros(2, 2), 2);
        assert_eq!(
            decompose(&ch, &cfg(2, 2, 2)),
            Err(Error::RankZero { node: 2 })
        );
    }

    #[test]
    fn config_validation() {
        assert!(cfg(1, 1, 1).validate().is_ok());
        let mut bad = cfg(1, 1, 1);
        bad.n_r = 0;
        assert!(bad.validate().is_err());
        let mut bad = cfg(1, 1, 1);
        bad.sigmar_sq = 0.0;
        assert!(bad.validate().is_err());
        let mut bad = cfg(1, 1, 1);
        bad.pr_max = -1.0;
        assert!(bad.validate().is_err());
    }
}
