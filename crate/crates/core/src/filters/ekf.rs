//! Range-only EKF over the state `[r_x, r_y, v1_x, v1_y]`.
//!
//! Prediction assumes a constant tag velocity and a known anchor velocity:
//! `r <- r + (v1 - v0) Ts`. The update linearizes the three anchor ranges.

use nalgebra::{DMatrix, DVector, Matrix3, Matrix3x4, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};

use super::dual_mcl::{FilterEstimate, InitRegion};
use crate::geometry::{AnchorLayout, RangeTriple};
use crate::{Error, Result, Vec2};

/// Ranges shorter than this are not linearized.
pub const MIN_LINEARIZATION_RANGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EkfConfig {
    /// Diagonal of the additive process covariance `[r_x, r_y, v1_x, v1_y]`.
    pub process_var: [f64; 4],
    /// Per-anchor range noise std, meters.
    pub range_sigma: [f64; 3],
    /// Initial tag velocity variance, (m/s)^2.
    #[serde(default = "default_velocity_var")]
    pub init_velocity_var: f64,
    #[serde(skip)]
    pub ts: f64,
}

fn default_velocity_var() -> f64 {
    1.0
}

impl EkfConfig {
    pub fn validate(&self) -> Result<()> {
        if self.process_var.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("process_var", "variances must be finite and >= 0"));
        }
        if self.range_sigma.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::param("range_sigma", "std must be finite and >= 0"));
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return Err(Error::param("ts", format!("sample time must be > 0, got {}", self.ts)));
        }
        Ok(())
    }

    pub fn process_cov(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::from(self.process_var))
    }

    pub fn meas_cov(&self) -> Matrix3<f64> {
        Matrix3::from_diagonal(&Vector3::from(self.range_sigma.map(|s| s * s)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EkfState {
    pub mean: Vector4<f64>,
    pub cov: Matrix4<f64>,
    pub step: usize,
}

impl EkfState {
    pub fn r(&self) -> Vec2 {
        Vec2::new(self.mean[0], self.mean[1])
    }

    pub fn v1(&self) -> Vec2 {
        Vec2::new(self.mean[2], self.mean[3])
    }
}

/// Gaussian matching the init region, zero tag velocity.
pub fn init_ekf(region: &InitRegion, init_velocity_var: f64) -> Result<EkfState> {
    region.validate()?;
    let c = region.center();
    let var = region.variance();
    Ok(EkfState {
        mean: Vector4::new(c.x, c.y, 0.0, 0.0),
        cov: Matrix4::from_diagonal(&Vector4::new(var.x, var.y, init_velocity_var, init_velocity_var)),
        step: 0,
    })
}

/// Expected ranges `|r - q_i|` for the state.
pub fn range_model(x: &Vector4<f64>, layout: &AnchorLayout) -> Vector3<f64> {
    let r = Vec2::new(x[0], x[1]);
    Vector3::from(layout.anchors().map(|q| (r - q).norm()))
}

/// Jacobian of [`range_model`]; rows `[(r - q_i)^T / |r - q_i|, 0, 0]`.
///
/// Rows for ranges below [`MIN_LINEARIZATION_RANGE`] are zero.
pub fn range_jacobian(x: &Vector4<f64>, layout: &AnchorLayout) -> Matrix3x4<f64> {
    let r = Vec2::new(x[0], x[1]);
    let mut h = Matrix3x4::zeros();
    for (i, q) in layout.anchors().iter().enumerate() {
        let diff = r - q;
        let n = diff.norm();
        if n >= MIN_LINEARIZATION_RANGE {
            h[(i, 0)] = diff.x / n;
            h[(i, 1)] = diff.y / n;
        }
    }
    h
}

pub fn ekf_step(
    state: &EkfState,
    ranges: &RangeTriple,
    v0_k: &Vec2,
    process_cov: &Matrix4<f64>,
    meas_cov: &Matrix3<f64>,
    ts: f64,
    layout: &AnchorLayout,
) -> (EkfState, FilterEstimate) {
    let step = state.step + 1;

    let mut f = Matrix4::identity();
    f[(0, 2)] = ts;
    f[(1, 3)] = ts;
    let mut mean = f * state.mean;
    mean[0] -= v0_k.x * ts;
    mean[1] -= v0_k.y * ts;
    let mut cov = f * state.cov * f.transpose() + process_cov;

    let predicted = range_model(&mean, layout);
    let jac = range_jacobian(&mean, layout);
    let rows: Vec<usize> = (0..3)
        .filter(|&i| predicted[i] >= MIN_LINEARIZATION_RANGE)
        .collect();

    if !rows.is_empty() {
        let n = rows.len();
        let h = DMatrix::from_fn(n, 4, |r, c| jac[(rows[r], c)]);
        let innovation = DVector::from_fn(n, |r, _| ranges.d[rows[r]] - predicted[rows[r]]);
        let meas = DMatrix::from_fn(n, n, |r, c| meas_cov[(rows[r], rows[c])]);
        let p = DMatrix::from_column_slice(4, 4, cov.as_slice());

        let s = &h * &p * h.transpose() + &meas;
        let s_inv = s
            .clone()
            .try_inverse()
            .or_else(|| s.pseudo_inverse(1e-12).ok())
            .unwrap_or_else(|| DMatrix::zeros(n, n));
        let gain = &p * h.transpose() * s_inv;

        let dx = &gain * innovation;
        for i in 0..4 {
            mean[i] += dx[i];
        }
        // Joseph form keeps the covariance positive semidefinite
        let i_kh = DMatrix::identity(4, 4) - &gain * &h;
        let updated = &i_kh * &p * i_kh.transpose() + &gain * meas * gain.transpose();
        cov = Matrix4::from_column_slice(updated.as_slice());
    }
    cov = (cov + cov.transpose()) * 0.5;

    let next = EkfState { mean, cov, step };
    let estimate = FilterEstimate {
        r_hat: next.r(),
        v1_hat: next.v1(),
        step,
    };
    (next, estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{anchor_positions, true_ranges};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn jacobian_matches_central_differences() {
        let layout = anchor_positions(0.44).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let h = 1e-6;
        for _ in 0..100 {
            let x = Vector4::from_fn(|_, _| rng.random_range(-5.0..5.0));
            let jac = range_jacobian(&x, &layout);
            for c in 0..4 {
                let mut xp = x;
                let mut xm = x;
                xp[c] += h;
                xm[c] -= h;
                let fd = (range_model(&xp, &layout) - range_model(&xm, &layout)) / (2.0 * h);
                for r in 0..3 {
                    assert!((jac[(r, c)] - fd[r]).abs() < 1e-6, "row {r} col {c}: {} vs {}", jac[(r, c)], fd[r]);
                }
            }
        }
    }

    #[test]
    fn noiseless_fixed_point() {
        let layout = anchor_positions(0.44).unwrap();
        let truth = Vec2::new(-2.0, 2.0);
        let mut s = init_ekf(&InitRegion::Point(truth), 0.0).unwrap();
        let ranges = true_ranges(&truth, &layout);
        for _ in 0..20 {
            s = ekf_step(&s, &ranges, &Vec2::zeros(), &Matrix4::zeros(), &Matrix3::zeros(), 0.1, &layout).0;
        }
        assert!((s.r() - truth).amax() < 1e-9);
        assert!(s.v1().amax() < 1e-9);
    }

    #[test]
    fn converges_from_offset() {
        let layout = anchor_positions(0.44).unwrap();
        let truth = Vec2::new(-2.0, 2.0);
        let mut s = init_ekf(&InitRegion::Point(truth + Vec2::new(1.0, 0.0)), 0.01).unwrap();
        s.cov[(0, 0)] = 1.0;
        s.cov[(1, 1)] = 1.0;
        let q = Matrix4::from_diagonal(&Vector4::new(1e-4, 1e-4, 1e-4, 1e-4));
        let r = Matrix3::from_diagonal_element(0.05 * 0.05);
        let ranges = true_ranges(&truth, &layout);
        let mut first_inside = None;
        for k in 1..=400 {
            s = ekf_step(&s, &ranges, &Vec2::zeros(), &q, &r, 0.1, &layout).0;
            if first_inside.is_none() && (s.r() - truth).norm() < 0.05 {
                first_inside = Some(k);
            }
        }
        // the velocity state makes the approach ring before it settles
        assert!(first_inside.is_some_and(|k| k <= 50), "{first_inside:?}");
        assert!((s.r() - truth).norm() < 0.05, "estimate {}", s.r());
    }

    #[test]
    fn covariance_stays_symmetric_psd() {
        let layout = anchor_positions(0.44).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let q = Matrix4::from_diagonal(&Vector4::new(0.01, 0.01, 0.5, 0.5));
        let r = Matrix3::from_diagonal_element(0.05 * 0.05);
        let mut s = init_ekf(
            &InitRegion::Box {
                min: Vec2::new(-4.2, -0.2),
                max: Vec2::new(-0.2, 3.8),
            },
            1.0,
        )
        .unwrap();
        for _ in 0..1000 {
            let truth = Vec2::new(rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
            let mut ranges = true_ranges(&truth, &layout);
            ranges.d.iter_mut().for_each(|d| *d = (*d + rng.random_range(-0.1..0.1)).max(0.0));
            let v0 = Vec2::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            s = ekf_step(&s, &ranges, &v0, &q, &r, 0.1, &layout).0;
            assert_eq!(s.cov, s.cov.transpose());
            let eig = s.cov.symmetric_eigenvalues();
            assert!(eig.min() >= -1e-9, "eigenvalues {eig}");
            assert!(s.mean.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn degenerate_range_row_is_skipped() {
        let layout = anchor_positions(1.0).unwrap();
        let x = Vector4::new(0.0, 0.0, 0.0, 0.0);
        let jac = range_jacobian(&x, &layout);
        assert_eq!(jac.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0; 4]);
        let s = EkfState {
            mean: x,
            cov: Matrix4::identity() * 0.1,
            step: 0,
        };
        let (n, _) = ekf_step(
            &s,
            &true_ranges(&Vec2::zeros(), &layout),
            &Vec2::zeros(),
            &Matrix4::zeros(),
            &Matrix3::from_diagonal_element(0.01),
            0.1,
            &layout,
        );
        assert!(n.mean.iter().all(|v| v.is_finite()));
    }
}
