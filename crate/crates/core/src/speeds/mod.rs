//! Spreading speeds `c*(+-inf) = inf_{nu > 0} log(lambda(nu)) / nu` of the
//! limiting systems.
//!
//! For the delayed scalar model `log lambda(nu)` is the real characteristic
//! root of `z = d nu^2 - mu + mu f'_+-(0) exp(-z tau)`. For systems
//! `lambda(nu)` is the Perron root of `exp(A_+- + nu^2 D)`.

mod roots;

pub use roots::{golden_section, principal_root};

use crate::error::{Error, Result};
use crate::linalg::{matrix_exp, perron, Matrix};
use crate::models::{CooperativeModel, ScalarShiftModel, Side};
use crate::real::Real;

pub const NU_MIN: f64 = 1e-3;
pub const NU_MAX: f64 = 50.0;
pub const SCAN_POINTS: usize = 200;
pub const NU_TOL: f64 = 1e-8;

/// A model whose limiting linearizations have a principal eigenvalue.
pub trait Linearization<T: Real> {
    /// `log lambda_+-(nu)`.
    fn log_lambda(&self, side: Side, nu: T) -> Result<T>;

    /// Positive eigenvector for systems, `None` for scalar models.
    fn principal_vector(&self, _side: Side, _nu: T) -> Result<Option<Vec<T>>> {
        Ok(None)
    }
}

impl<T: Real> Linearization<T> for ScalarShiftModel<T> {
    fn log_lambda(&self, side: Side, nu: T) -> Result<T> {
        principal_root(
            self.d * nu * nu - self.mu,
            self.mu * self.limit_jacobian(side),
            self.tau,
        )
    }
}

impl<T: Real> CooperativeModel<T> {
    fn shifted_generator(&self, side: Side, nu: T) -> (Matrix<T>, T) {
        let d = Matrix::from_diag(self.diffusivities()).scale(nu * nu);
        let b = self.limit_jacobian(side) + &d;
        // exp(B) = e^sigma exp(B - sigma I) keeps the exponential in range
        let sigma = b.max_diag();
        let shifted = &b + &Matrix::identity(b.rows()).scale(-sigma);
        (shifted, sigma)
    }
}

impl<T: Real> Linearization<T> for CooperativeModel<T> {
    fn log_lambda(&self, side: Side, nu: T) -> Result<T> {
        let (shifted, sigma) = self.shifted_generator(side, nu);
        let rho = perron(&matrix_exp(&shifted)?)?.rho;
        Ok(sigma + rho.ln())
    }

    fn principal_vector(&self, side: Side, nu: T) -> Result<Option<Vec<T>>> {
        let (shifted, _) = self.shifted_generator(side, nu);
        Ok(Some(perron(&matrix_exp(&shifted)?)?.vector))
    }
}

/// `lambda_+-(nu)` of the delayed scalar linearization.
pub fn lambda_scalar<T: Real>(model: &ScalarShiftModel<T>, side: Side, nu: T) -> Result<T> {
    check_nu(nu)?;
    Ok(model.log_lambda(side, nu)?.exp())
}

/// `lambda_+-(nu)`: Perron root of `exp(A_+- + nu^2 D)`.
pub fn lambda_matrix<T: Real>(model: &CooperativeModel<T>, side: Side, nu: T) -> Result<T> {
    if !(nu >= T::zero()) {
        return Err(Error::config(format!("decay rate must be >= 0, got {nu}")));
    }
    Ok(model.log_lambda(side, nu)?.exp())
}

fn check_nu<T: Real>(nu: T) -> Result<()> {
    if !(nu > T::zero()) {
        return Err(Error::config(format!("decay rate must be positive, got {nu}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpeedSample<T = f64> {
    pub nu: T,
    pub log_lambda: T,
    /// `log lambda / nu`.
    pub phi: T,
}

impl<T: Real> SpeedSample<T> {
    /// May overflow to `+inf` for large `nu`; `log_lambda` stays finite.
    pub fn lambda(&self) -> T {
        self.log_lambda.exp()
    }
}

/// Right/left speeds in the lab frame and in the frame moving with the habitat.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameSpeeds<T = f64> {
    pub rightward: T,
    pub leftward: T,
    pub comoving_right: T,
    pub comoving_left: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedReport<T = f64> {
    pub side: Side,
    pub c_star: T,
    pub nu_star: T,
    pub samples: Vec<SpeedSample<T>>,
    /// Normalized so the largest entry is 1; systems only.
    pub perron_vector: Option<Vec<T>>,
    pub frame_speeds: Option<FrameSpeeds<T>>,
}

impl<T: Real> SpeedReport<T> {
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "nu,lambda,phi")?;
        for s in &self.samples {
            writeln!(
                w,
                "{},{},{}",
                crate::grid::fmt_sig17(s.nu),
                crate::grid::fmt_sig17(s.lambda()),
                crate::grid::fmt_sig17(s.phi)
            )?;
        }
        Ok(())
    }
}

/// Minimizes `phi(nu) = log lambda(nu) / nu`: log-spaced scan of 200 points on
/// `[1e-3, 50]`, then golden-section refinement around the best scan point.
pub fn spreading_speed<T: Real, M: Linearization<T>>(model: &M, side: Side) -> Result<SpeedReport<T>> {
    let growth = model.log_lambda(side, T::zero())?;
    if !(growth > T::zero()) {
        return Err(Error::Hypotheses(format!(
            "zero is not unstable for the {side} limit (log lambda(0) = {growth}); c* would not be positive"
        )));
    }
    let (lmin, lmax) = (NU_MIN.ln(), NU_MAX.ln());
    let mut samples = Vec::with_capacity(SCAN_POINTS);
    for i in 0..SCAN_POINTS {
        let nu = T::lit((lmin + (lmax - lmin) * i as f64 / (SCAN_POINTS - 1) as f64).exp());
        let log_lambda = model.log_lambda(side, nu)?;
        samples.push(SpeedSample {
            nu,
            log_lambda,
            phi: log_lambda / nu,
        });
    }
    let k = (0..samples.len())
        .min_by(|&i, &j| samples[i].phi.partial_cmp(&samples[j].phi).unwrap())
        .unwrap();
    if k == 0 || k + 1 == samples.len() {
        return Err(Error::Numeric(
            "minimizer outside bracket; extend ν range".to_string(),
        ));
    }
    check_unimodal(&samples)?;
    let phi = |nu: T| {
        model
            .log_lambda(side, nu)
            .map(|l| l / nu)
            .unwrap_or(T::infinity())
    };
    let (nu_star, c_star) = golden_section(
        phi,
        samples[k - 1].nu,
        samples[k + 1].nu,
        T::tol_floor(NU_TOL) * T::lit(0.5),
    );
    Ok(SpeedReport {
        side,
        c_star,
        nu_star,
        samples,
        perron_vector: model.principal_vector(side, nu_star)?,
        frame_speeds: None,
    })
}

/// At most one sign change of the discrete slope of `phi`, ignoring
/// differences at rounding level.
fn check_unimodal<T: Real>(samples: &[SpeedSample<T>]) -> Result<()> {
    let mut last_sign = 0i8;
    let mut changes = 0;
    for w in samples.windows(2) {
        let diff = w[1].phi - w[0].phi;
        let noise = T::lit(1e-12) * (w[0].phi.abs() + w[1].phi.abs());
        if diff.abs() <= noise {
            continue;
        }
        let sign = if diff > T::zero() { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }
    if changes > 1 {
        return Err(Error::numeric(format!(
            "phi(nu) is not unimodal on the scan range ({changes} slope sign changes)"
        )));
    }
    Ok(())
}

/// Lab and comoving front speeds from the two one-sided reports.
pub fn lab_frame_speeds<T: Real>(c: T, plus: &SpeedReport<T>, minus: &SpeedReport<T>) -> FrameSpeeds<T> {
    FrameSpeeds {
        rightward: plus.c_star,
        leftward: minus.c_star,
        comoving_right: plus.c_star - c,
        comoving_left: minus.c_star + c,
    }
}

/// Both one-sided reports with their `frame_speeds` filled in.
pub fn scalar_speeds<T: Real>(model: &ScalarShiftModel<T>) -> Result<(SpeedReport<T>, SpeedReport<T>)> {
    let mut plus = spreading_speed(model, Side::Plus)?;
    let mut minus = spreading_speed(model, Side::Minus)?;
    let fs = lab_frame_speeds(model.c, &plus, &minus);
    plus.frame_speeds = Some(fs);
    minus.frame_speeds = Some(fs);
    Ok((plus, minus))
}

pub fn system_speeds<T: Real>(model: &CooperativeModel<T>) -> Result<(SpeedReport<T>, SpeedReport<T>)> {
    let mut plus = spreading_speed(model, Side::Plus)?;
    let mut minus = spreading_speed(model, Side::Minus)?;
    let fs = lab_frame_speeds(T::zero(), &plus, &minus);
    plus.frame_speeds = Some(fs);
    minus.frame_speeds = Some(fs);
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{LinearReaction, LogisticParams, PairParams};
    use std::sync::Arc;

    fn pair_model(beta: f64, kappa: f64) -> CooperativeModel {
        CooperativeModel::cooperative_pair(PairParams {
            beta_minus: [beta; 2],
            beta_plus: [beta; 2],
            kappa,
            w: 1.0,
            diffusivities: [1.0; 2],
        })
        .unwrap()
    }

    #[test]
    fn fisher_lambda_and_speed() {
        let m = ScalarShiftModel::<f64>::fisher();
        let l = lambda_scalar(&m, Side::Plus, 1.0).unwrap();
        assert!((l - 7.38905609893065).abs() < 1e-12);
        assert!((m.log_lambda(Side::Plus, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let r = spreading_speed(&m, Side::Plus).unwrap();
        assert!((r.c_star - 2.0).abs() < 1e-6);
        assert!((r.nu_star - 1.0).abs() < 1e-6);
        assert_eq!(r.samples.len(), 200);
        assert!(r.perron_vector.is_none());
    }

    #[test]
    fn marginal_instability_is_rejected() {
        // b = 1 gives log lambda = d nu^2, so c* would be 0
        let r = crate::models::ClosureReaction::homogeneous("marginal", |u: f64| u);
        let m = ScalarShiftModel::from_reaction("m", Arc::new(r), 1.0, 1.0, 0.0, 0.0, 1.0).unwrap();
        let l = lambda_scalar(&m, Side::Plus, 0.7).unwrap();
        assert!((l - (0.49f64).exp()).abs() < 1e-6);
        assert!(spreading_speed(&m, Side::Plus).is_err());
    }

    #[test]
    fn logistic_undelayed_speed() {
        let m = ScalarShiftModel::<f64>::shifted_logistic(LogisticParams {
            beta_minus: 0.25,
            beta_plus: 1.0,
            w: 1.0,
            mu: 3.0,
            d: 1.0,
            tau: 0.0,
            c: 1.5,
        })
        .unwrap();
        let (p, n) = scalar_speeds(&m).unwrap();
        assert!((p.c_star - 2.0).abs() < 1e-6);
        assert!((n.c_star - 1.0).abs() < 1e-6);
        let fs = p.frame_speeds.unwrap();
        assert!((fs.comoving_right - 0.5).abs() < 1e-6);
        assert!((fs.comoving_left - 2.5).abs() < 1e-6);
    }

    #[test]
    fn delay_slows_spreading() {
        let base = LogisticParams {
            beta_minus: 0.25,
            beta_plus: 1.0,
            w: 1.0,
            mu: 3.0,
            d: 1.0,
            tau: 0.0,
            c: 0.0,
        };
        let fast = ScalarShiftModel::<f64>::shifted_logistic(base).unwrap();
        let slow = ScalarShiftModel::<f64>::shifted_logistic(LogisticParams { tau: 0.5, ..base }).unwrap();
        for side in Side::BOTH {
            let a = spreading_speed(&fast, side).unwrap().c_star;
            let b = spreading_speed(&slow, side).unwrap().c_star;
            assert!(b < a, "{side}: {b} !< {a}");
        }
    }

    #[test]
    fn pair_matrix_path() {
        let m = pair_model(1.0, 2.0);
        let l = lambda_matrix(&m, Side::Plus, 1.0).unwrap();
        let e2 = std::f64::consts::E.powi(2);
        assert!((l - e2).abs() < 1e-10);
        let l0 = lambda_matrix(&m, Side::Plus, 0.0).unwrap();
        assert!((l0 - std::f64::consts::E).abs() < 1e-10);
        let r = spreading_speed(&m, Side::Plus).unwrap();
        assert!((r.c_star - 2.0).abs() < 1e-6);
        assert!((r.nu_star - 1.0).abs() < 1e-4);
        let v = r.perron_vector.unwrap();
        assert!((v[0] - 1.0).abs() < 1e-10 && (v[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn one_component_system_matches_scalar() {
        // f(u) = u (scalar growth rate 1) vs mu = 1, b = 2, tau = 0
        let a = Matrix::from_rows(&[vec![1.0]]).unwrap();
        let sys = CooperativeModel::from_reaction("lin", Arc::new(LinearReaction { a }), vec![1.0], vec![1.0])
            .unwrap();
        let sc = ScalarShiftModel::<f64>::fisher();
        for &nu in &[0.01, 0.5, 1.0, 3.0, 10.0] {
            let a = sys.log_lambda(Side::Plus, nu).unwrap();
            let b = sc.log_lambda(Side::Plus, nu).unwrap();
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "{nu}: {a} vs {b}");
        }
    }

    #[test]
    fn kpp_scaling() {
        // doubling d and the growth rate doubles c* = 2 sqrt(d r)
        let m1 = ScalarShiftModel::<f64>::homogeneous_logistic(1.0, 3.0, 1.0, 0.0, 0.0).unwrap();
        let m2 = ScalarShiftModel::<f64>::homogeneous_logistic(2.0, 6.0, 2.0, 0.0, 0.0).unwrap();
        let c1 = spreading_speed(&m1, Side::Plus).unwrap().c_star;
        let c2 = spreading_speed(&m2, Side::Plus).unwrap().c_star;
        assert!((c2 - 2.0 * c1).abs() < 1e-6);
    }

    #[test]
    fn symmetric_habitat_speeds_agree() {
        let m = ScalarShiftModel::<f64>::homogeneous_logistic(0.8, 3.0, 1.0, 0.5, 0.7).unwrap();
        let (p, n) = scalar_speeds(&m).unwrap();
        assert!((p.c_star - n.c_star).abs() < 1e-12);
        let fs = lab_frame_speeds(0.0, &p, &n);
        assert_eq!(fs.rightward, fs.comoving_right);
        assert_eq!(fs.leftward, fs.comoving_left);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let r = spreading_speed(&ScalarShiftModel::<f64>::fisher(), Side::Plus).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("nu,lambda,phi\n"));
        assert_eq!(text.lines().count(), 201);
    }
}
