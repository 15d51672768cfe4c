//! Multiple-access phase: log-det rate functionals and the source strategy
//! that maximizes the MA sum-rate.

use nalgebra::Cholesky;
use serde::Serialize;

use crate::channel::{ChannelSet, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::{self, c};
use crate::waterfill;
use crate::{CMatrix, Node};

/// Sweep budget for iterative water-filling.
pub const MAX_SWEEPS: usize = 500;
/// Stop once a full sweep gains less than this many nats.
pub const SWEEP_TOL: f64 = 1e-10;
/// Slack on `r_ma <= r_bar_1r + r_bar_2r`.
pub const SUBADDITIVITY_SLACK: f64 = 1e-12;

/// The three MA-phase rates the relay needs, in nats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct MaRates {
    pub r_ma: f64,
    pub r_bar_1r: f64,
    pub r_bar_2r: f64,
}

impl MaRates {
    /// Single-user rate of `node` at the relay.
    pub fn r_bar(&self, node: Node) -> f64 {
        match node {
            Node::One => self.r_bar_1r,
            Node::Two => self.r_bar_2r,
        }
    }

    /// Rate cap on BC direction `node`: it carries the other node's message,
    /// so it can never usefully exceed that node's MA rate.
    pub fn cap(&self, direction: Node) -> f64 {
        self.r_bar(direction.other())
    }

    /// `r_bar_1r + r_bar_2r - r_ma`, nonnegative for any physical strategy.
    pub fn subadditivity_gap(&self) -> f64 {
        self.r_bar_1r + self.r_bar_2r - self.r_ma
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.r_ma, self.r_bar_1r, self.r_bar_2r];
        if all.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "MA rates must be finite and nonnegative: {self:?}"
            )));
        }
        if self.subadditivity_gap() < -SUBADDITIVITY_SLACK {
            return Err(Error::InvalidStrategy {
                r_ma: self.r_ma,
                bound: self.r_bar_1r + self.r_bar_2r,
            });
        }
        Ok(())
    }
}

/// Source covariances together with the rates they induce at the relay.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceStrategy {
    pub d1: CMatrix,
    pub d2: CMatrix,
    pub rates: MaRates,
}

impl SourceStrategy {
    /// Wraps arbitrary covariances, computing their rates from scratch.
    pub fn new(d1: CMatrix, d2: CMatrix, channels: &ChannelSet, sigmar_sq: f64) -> Result<Self> {
        let rates = MaRates {
            r_ma: rate_ma(&d1, &d2, channels, sigmar_sq)?,
            r_bar_1r: rate_bar(Node::One, &d1, channels, sigmar_sq)?,
            r_bar_2r: rate_bar(Node::Two, &d2, channels, sigmar_sq)?,
        };
        Ok(SourceStrategy { d1, d2, rates })
    }

    pub fn covariance(&self, node: Node) -> &CMatrix {
        match node {
            Node::One => &self.d1,
            Node::Two => &self.d2,
        }
    }
}

fn received(node: Node, d: &CMatrix, channels: &ChannelSet) -> Result<CMatrix> {
    let h = channels.uplink(node);
    if d.shape() != (h.ncols(), h.ncols()) {
        return Err(Error::Dimension(format!(
            "covariance of node {} is {:?}, channel has {} inputs",
            node.index() + 1,
            d.shape(),
            h.ncols()
        )));
    }
    linalg::check_psd(d)?;
    Ok(linalg::sandwich(h, d))
}

/// `ln |I + (H_1r D_1 H_1r^H + H_2r D_2 H_2r^H) / sigma_r^2|`.
pub fn rate_ma(d1: &CMatrix, d2: &CMatrix, channels: &ChannelSet, sigmar_sq: f64) -> Result<f64> {
    let s = (received(Node::One, d1, channels)? + received(Node::Two, d2, channels)?)
        * c(1.0 / sigmar_sq);
    Ok(linalg::log_det_identity_plus(&s))
}

/// `ln |I + H_ir D_i H_ir^H / sigma_r^2|`.
pub fn rate_bar(node: Node, d: &CMatrix, channels: &ChannelSet, sigmar_sq: f64) -> Result<f64> {
    let s = received(node, d, channels)? * c(1.0 / sigmar_sq);
    Ok(linalg::log_det_identity_plus(&s))
}

/// Single-user water-filling of `node`'s budget against the other node's
/// current interference plus relay noise.
pub fn best_response(
    node: Node,
    other_cov: &CMatrix,
    channels: &ChannelSet,
    config: &SystemConfig,
) -> CMatrix {
    let h = channels.uplink(node);
    let h_other = channels.uplink(node.other());
    let n_r = h.nrows();
    let z = linalg::hermitize(
        &(linalg::sandwich(h_other, other_cov) + CMatrix::identity(n_r, n_r) * c(config.sigmar_sq)),
    );
    let z_inv_h = Cholesky::new(z)
        .expect("noise-plus-interference is positive definite")
        .solve(h);
    let g = h.adjoint() * z_inv_h;
    let (eigs, vecs) = linalg::hermitian_eigen(&g);

    let budget = config.power_budget(node);
    let n = h.ncols();
    let top = eigs.first().copied().unwrap_or(0.0);
    let gains: Vec<f64> = eigs
        .iter()
        .copied()
        .take_while(|&e| top > 0.0 && e > 1e-12 * top)
        .collect();
    if gains.is_empty() {
        // no signal reaches the relay; any covariance with the full trace is a best response
        return CMatrix::identity(n, n) * c(budget / n as f64);
    }
    let alloc = waterfill::forward_waterfill(&gains, budget);
    linalg::hermitize(&linalg::from_eigen_powers(&vecs, &alloc.powers))
}

/// Result of iterative water-filling.
#[derive(Debug, Clone)]
pub struct IwfOutcome {
    pub strategy: SourceStrategy,
    /// MA sum-rate after each sweep.
    pub history: Vec<f64>,
}

/// Source covariances maximizing the MA sum-rate under per-node power budgets,
/// by iterative (Gauss-Seidel) water-filling.
pub fn max_ma_strategy(channels: &ChannelSet, config: &SystemConfig) -> Result<SourceStrategy> {
    max_ma_strategy_traced(channels, config).map(|o| o.strategy)
}

pub fn max_ma_strategy_traced(channels: &ChannelSet, config: &SystemConfig) -> Result<IwfOutcome> {
    config.validate()?;
    channels.check_dims(config)?;
    let mut d2 = CMatrix::zeros(config.n2, config.n2);
    let mut prev = 0.0;
    let mut history = Vec::new();
    for _ in 0..MAX_SWEEPS {
        let d1 = best_response(Node::One, &d2, channels, config);
        d2 = best_response(Node::Two, &d1, channels, config);
        let r = rate_ma(&d1, &d2, channels, config.sigmar_sq)?;
        history.push(r);
        let gain = r - prev;
        prev = r;
        if history.len() > 1 && gain.abs() < SWEEP_TOL {
            let strategy = SourceStrategy::new(d1, d2, channels, config.sigmar_sq)?;
            return Ok(IwfOutcome { strategy, history });
        }
    }
    let n = history.len();
    Err(Error::NoConvergence {
        sweeps: MAX_SWEEPS,
        last_gain: history[n - 1] - history[n - 2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_channels;
    use crate::linalg::hermitian_eigen;
    use approx::assert_relative_eq;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c(v))
    }

    fn scalar_channels(h1: f64, h2: f64) -> ChannelSet {
        ChannelSet {
            h1r: scalar(h1),
            h2r: scalar(h2),
            hr1: scalar(1.0),
            hr2: scalar(1.0),
        }
    }

    fn random_psd(n: usize, trace: f64, seed: u64) -> CMatrix {
        let mut rng = crate::channel::trial_rng(seed, 99);
        let a = crate::channel::gaussian_matrix(n, n, &mut rng);
        let m = &a * a.adjoint();
        let t = linalg::trace_re(&m);
        m * c(trace / t)
    }

    #[test]
    fn zero_covariances() {
        let ch = scalar_channels(1.0, 1.0);
        assert_eq!(rate_ma(&scalar(0.0), &scalar(0.0), &ch, 1.0).unwrap(), 0.0);
        assert_eq!(rate_bar(Node::One, &scalar(0.0), &ch, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn scalar_rates() {
        let ch = scalar_channels(1.0, 2.0);
        assert_relative_eq!(
            rate_ma(&scalar(1.0), &scalar(0.0), &ch, 1.0).unwrap(),
            2f64.ln(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            rate_bar(Node::Two, &scalar(1.0), &ch, 1.0).unwrap(),
            5f64.ln(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn non_psd_rejected() {
        let ch = scalar_channels(1.0, 1.0);
        let err = rate_ma(&scalar(-1.0), &scalar(0.0), &ch, 1.0).unwrap_err();
        assert!(matches!(err, Error::NonPsd { .. }));
    }

    #[test]
    fn random_rates_match_eigen_oracle() {
        let config = SystemConfig::uniform_noise((3, 2, 4), (1.0, 2.0, 1.0), 0.7, 5);
        for trial in 0..10 {
            let ch = generate_channels(&config, trial);
            let d1 = random_psd(3, 1.0, trial);
            let d2 = random_psd(2, 2.0, trial + 100);
            let inner =
                (linalg::sandwich(&ch.h1r, &d1) + linalg::sandwich(&ch.h2r, &d2)) * c(1.0 / 0.7);
            let (eigs, _) = hermitian_eigen(&inner);
            let oracle: f64 = eigs.iter().map(|l| (1.0 + l).ln()).sum();
            let r = rate_ma(&d1, &d2, &ch, 0.7).unwrap();
            assert_relative_eq!(r, oracle, epsilon = 1e-10);

            let zero2 = CMatrix::zeros(2, 2);
            let alone = rate_ma(&d1, &zero2, &ch, 0.7).unwrap();
            assert!((rate_bar(Node::One, &d1, &ch, 0.7).unwrap() - alone).abs() <= 1e-12);
            assert!(r >= alone.max(rate_bar(Node::Two, &d2, &ch, 0.7).unwrap()));
        }
    }

    #[test]
    fn silent_second_user() {
        let config = SystemConfig::uniform_noise((2, 2, 3), (2.0, 1.0, 1.0), 1.0, 3);
        let mut ch = generate_channels(&config, 0);
        ch.h2r = CMatrix::zeros(3, 2);
        let s = max_ma_strategy(&ch, &config).unwrap();

        // single-user water-filling over eigenmodes of H1^H H1 / sigma^2
        let (eigs, vecs) = hermitian_eigen(&(ch.h1r.adjoint() * &ch.h1r));
        let alloc = waterfill::forward_waterfill(&eigs, 2.0);
        let expect = linalg::from_eigen_powers(&vecs, &alloc.powers);
        assert!(linalg::frobenius(&(&s.d1 - expect)) < 1e-9);
        assert_relative_eq!(s.rates.r_ma, s.rates.r_bar_1r, epsilon = 1e-12);
        assert_relative_eq!(s.rates.r_bar_2r, 0.0);
        assert_relative_eq!(linalg::trace_re(&s.d2), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn orthogonal_users() {
        let config = SystemConfig::uniform_noise((1, 1, 2), (1.0, 1.0, 1.0), 1.0, 0);
        let mut h1 = CMatrix::zeros(2, 1);
        h1[(0, 0)] = c(1.0);
        let mut h2 = CMatrix::zeros(2, 1);
        h2[(1, 0)] = c(1.0);
        let ch = ChannelSet {
            h1r: h1,
            h2r: h2,
            hr1: CMatrix::zeros(1, 2),
            hr2: CMatrix::zeros(1, 2),
        };
        let s = max_ma_strategy(&ch, &config).unwrap();
        assert_relative_eq!(s.d1[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.d2[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.rates.r_ma, 2.0 * 2f64.ln(), epsilon = 1e-12);
        assert!(s.rates.validate().is_ok());
    }

    #[test]
    fn iwf_monotone_full_power_and_kkt() {
        let config = SystemConfig::uniform_noise((3, 2, 3), (2.0, 3.0, 1.0), 1.0, 17);
        for trial in 0..20 {
            let ch = generate_channels(&config, trial);
            let out = max_ma_strategy_traced(&ch, &config).unwrap();
            assert!(
                out.history.windows(2).all(|w| w[1] >= w[0] - 1e-12),
                "{:?}",
                out.history
            );
            let s = &out.strategy;
            assert_relative_eq!(linalg::trace_re(&s.d1), 2.0, epsilon = 1e-9);
            assert_relative_eq!(linalg::trace_re(&s.d2), 3.0, epsilon = 1e-9);
            assert!(linalg::min_eigenvalue(&s.d1) > -1e-10);
            for node in Node::BOTH {
                let br = best_response(node, s.covariance(node.other()), &ch, &config);
                let r = match node {
                    Node::One => rate_ma(&br, &s.d2, &ch, 1.0).unwrap(),
                    Node::Two => rate_ma(&s.d1, &br, &ch, 1.0).unwrap(),
                };
                assert!(r - s.rates.r_ma < 1e-6);
            }
            assert!(s.rates.subadditivity_gap() > -SUBADDITIVITY_SLACK);
            // rates recomputed from scratch
            assert_relative_eq!(
                s.rates.r_ma,
                rate_ma(&s.d1, &s.d2, &ch, 1.0).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    /// Projects eigenvalues onto `{x >= 0, sum x = total}`.
    fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
        let mut u = v.to_vec();
        u.sort_by(|a, b| b.total_cmp(a));
        let mut cum = 0.0;
        let mut theta = 0.0;
        for (k, x) in u.iter().enumerate() {
            cum += x;
            let t = (cum - total) / (k + 1) as f64;
            if x - t > 0.0 {
                theta = t;
            }
        }
        v.iter().map(|x| (x - theta).max(0.0)).collect()
    }

    fn project(d: &CMatrix, total: f64) -> CMatrix {
        let (eigs, vecs) = hermitian_eigen(d);
        linalg::from_eigen_powers(&vecs, &project_simplex(&eigs, total))
    }

    /// Joint projected gradient ascent on both covariances; independent of
    /// the water-filling path.
    #[test]
    fn iwf_matches_projected_ascent() {
        let config = SystemConfig::uniform_noise((2, 2, 2), (1.5, 1.0, 1.0), 1.0, 23);
        for trial in 0..5 {
            let ch = generate_channels(&config, trial);
            let iwf = max_ma_strategy(&ch, &config).unwrap().rates.r_ma;

            let mut d1 = CMatrix::identity(2, 2) * c(0.75);
            let mut d2 = CMatrix::identity(2, 2) * c(0.5);
            let step = 0.2;
            for _ in 0..20_000 {
                let cov = linalg::sandwich(&ch.h1r, &d1)
                    + linalg::sandwich(&ch.h2r, &d2)
                    + CMatrix::identity(2, 2);
                let inv = cov.try_inverse().unwrap();
                let g1 = linalg::hermitize(&(ch.h1r.adjoint() * &inv * &ch.h1r));
                let g2 = linalg::hermitize(&(ch.h2r.adjoint() * &inv * &ch.h2r));
                d1 = project(&(&d1 + g1 * c(step)), 1.5);
                d2 = project(&(&d2 + g2 * c(step)), 1.0);
            }
            let ascent = rate_ma(&d1, &d2, &ch, 1.0).unwrap();
            assert!((iwf - ascent).abs() < 1e-6, "iwf {iwf} vs ascent {ascent}");
        }
    }
}
