use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::modes::DerivativeBasis;
use crate::error::{invalid, Error, Result};
use crate::metrology::{Povm, NORM_TOL};
use crate::pswf::ProlateBasis;

/// Entries below this magnitude count as zero in the design constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereParams {
    pub r1: f64,
    pub phi1: f64,
    pub r2: f64,
    pub phi2: f64,
}

/// Entries of `C` left free by the constraints.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FreeEntries {
    pub c03: f64,
    pub c13: f64,
    pub c2: [f64; 4],
}

/// `|πⱼ⟩ = Σₖ C_jk |Φₖ⟩` for `j = 0, 1, 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementDesign {
    c: [[f64; 4]; 3],
    sphere: Option<SphereParams>,
    constrained: bool,
}

impl MeasurementDesign {
    /// Checks `C₀₀ = C₁₀ = 0` and that `C₀₁, C₁₁, C₀₂, C₁₂` are nonzero.
    pub fn new(c: [[f64; 4]; 3]) -> Result<Self> {
        if c.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("C", "entries must be finite"));
        }
        if c[0][0].abs() > CONSTRAINT_TOL || c[1][0].abs() > CONSTRAINT_TOL {
            return Err(Error::DesignConstraint(format!(
                "C00 = {} and C10 = {} must vanish",
                c[0][0], c[1][0]
            )));
        }
        for (j, k) in [(0, 1), (1, 1), (0, 2), (1, 2)] {
            if c[j][k].abs() <= CONSTRAINT_TOL {
                return Err(Error::DesignConstraint(format!("C{j}{k} must be nonzero")));
            }
        }
        Ok(Self {
            c,
            sphere: None,
            constrained: true,
        })
    }

    /// Any finite `C`; used for transformed designs that no longer satisfy
    /// the constraints.
    pub fn unconstrained(c: [[f64; 4]; 3]) -> Result<Self> {
        if c.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("C", "entries must be finite"));
        }
        Ok(Self {
            c,
            sphere: None,
            constrained: false,
        })
    }

    pub fn matrix(&self) -> &[[f64; 4]; 3] {
        &self.c
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.c[j][k]
    }

    pub fn sphere(&self) -> Option<SphereParams> {
        self.sphere
    }

    pub fn is_constrained(&self) -> bool {
        self.constrained
    }

    pub fn scaled(&self, s: f64) -> Result<Self> {
        let mut c = self.c;
        c.iter_mut().flatten().for_each(|x| *x *= s);
        Ok(Self {
            c,
            sphere: None,
            constrained: self.constrained,
        })
    }

    /// With orthonormal `Φ`, `Σⱼ |πⱼ⟩⟨πⱼ|` has the nonzero spectrum of `CCᵀ`.
    /// Requires its top eigenvalue `≤ 1` (so `Π̂₃ ≥ 0`) and its smallest
    /// eigenvalue away from zero (independent elements).
    pub fn check_validity(&self) -> Result<()> {
        let m = Matrix3::<f64>::from_fn(|i, j| (0..4).map(|k| self.c[i][k] * self.c[j][k]).sum::<f64>());
        let eig = SymmetricEigen::new(m);
        let (mut lo, mut hi) = (0, 0);
        for i in 0..3 {
            if eig.eigenvalues[i] < eig.eigenvalues[lo] {
                lo = i;
            }
            if eig.eigenvalues[i] > eig.eigenvalues[hi] {
                hi = i;
            }
        }
        if eig.eigenvalues[hi] > 1.0 + NORM_TOL {
            // Eigenvector of CCᵀ in element space, mapped to design space by Cᵀ.
            let u = eig.eigenvectors.column(hi);
            let mut direction: Vec<f64> = (0..4).map(|k| (0..3).map(|j| u[j] * self.c[j][k]).sum()).collect();
            let n = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
            direction.iter_mut().for_each(|x| *x /= n);
            return Err(Error::PovmNotPositive {
                eigenvalue: eig.eigenvalues[hi],
                direction,
            });
        }
        if eig.eigenvalues[lo] <= 1e-12 {
            return Err(Error::PovmDependent {
                min_eigenvalue: eig.eigenvalues[lo],
            });
        }
        Ok(())
    }
}

/// `C₀₁ = r₁ sin φ₁`, `C₁₁ = r₁ cos φ₁`, `C₀₂ = r₂ sin φ₂`, `C₁₂ = r₂ cos φ₂`.
pub fn design_from_sphere(r1: f64, phi1: f64, r2: f64, phi2: f64, free: FreeEntries) -> Result<MeasurementDesign> {
    for (name, r) in [("r1", r1), ("r2", r2)] {
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid(name, format!("must be positive, got {r}")));
        }
    }
    for (name, phi) in [("phi1", phi1), ("phi2", phi2)] {
        let (s, c) = phi.sin_cos();
        if s.abs() < CONSTRAINT_TOL || c.abs() < CONSTRAINT_TOL {
            return Err(invalid(name, format!("{phi} lies on the excluded lattice kπ/2")));
        }
    }
    let c = [
        [0.0, r1 * phi1.sin(), r2 * phi2.sin(), free.c03],
        [0.0, r1 * phi1.cos(), r2 * phi2.cos(), free.c13],
        free.c2,
    ];
    let mut d = MeasurementDesign::new(c)?;
    d.sphere = Some(SphereParams { r1, phi1, r2, phi2 });
    Ok(d)
}

/// `𝒜 = (C₀₁C₁₂ − C₁₁C₀₂)² / (C₀₁² + C₁₁²)`.
pub fn efficiency_factor(design: &MeasurementDesign) -> Result<f64> {
    let c = &design.c;
    let den = c[0][1] * c[0][1] + c[1][1] * c[1][1];
    if !(den > 1e-300) {
        return Err(Error::DesignConstraint("C01² + C11² vanishes".into()));
    }
    let num = c[0][1] * c[1][2] - c[1][1] * c[0][2];
    Ok(num * num / den)
}

/// Rank-one elements `|πⱼ⟩`, `j = 0, 1, 2`, in PSWF coefficients; `Π̂₃` is the leakage.
pub fn optimal_povm(design: &MeasurementDesign, dbasis: &DerivativeBasis) -> Result<Povm> {
    design.check_validity()?;
    let phi = dbasis.phi_or_err()?;
    if phi.len() < 4 {
        return Err(Error::DimensionMismatch(format!("design needs 4 Φ modes, have {}", phi.len())));
    }
    let dim = dbasis.dim();
    let vectors = design
        .c
        .iter()
        .map(|row| (0..dim).map(|n| (0..4).map(|k| row[k] * phi[k][n]).sum()).collect())
        .collect();
    Povm::projectors(vectors)
}

/// `G_mk = Σₙ Φ_mn wₙ Φ_kn` for the first four Φ modes.
fn damped_gram(phi: &[Vec<f64>], weights: &[f64]) -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    for m in 0..4 {
        for k in 0..4 {
            g[m][k] = phi[m].iter().zip(&phi[k]).zip(weights).map(|((a, b), w)| a * w * b).sum();
        }
    }
    g
}

fn check_dims(dbasis: &DerivativeBasis, basis: &ProlateBasis) -> Result<()> {
    if dbasis.dim() > basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "Φ has {} coefficients, basis only {} eigenvalues",
            dbasis.dim(),
            basis.len()
        )));
    }
    Ok(())
}

/// `C̃_jk = ⟨Φₖ|Ξ̂_T|πⱼ⟩ = Σₘ C_jm G_mk`.
pub fn time_limited_design(
    design: &MeasurementDesign,
    dbasis: &DerivativeBasis,
    basis: &ProlateBasis,
) -> Result<MeasurementDesign> {
    check_dims(dbasis, basis)?;
    time_limited_design_with(design, dbasis, basis.lambdas())
}

/// As [`time_limited_design`] with explicit damping factors in place of `λₙ`.
pub fn time_limited_design_with(
    design: &MeasurementDesign,
    dbasis: &DerivativeBasis,
    damping: &[f64],
) -> Result<MeasurementDesign> {
    let phi = dbasis.phi_or_err()?;
    if phi.len() < 4 || damping.len() < dbasis.dim() {
        return Err(Error::DimensionMismatch("need 4 Φ modes and one factor per coefficient".into()));
    }
    let g = damped_gram(phi, damping);
    let mut c = [[0.0; 4]; 3];
    for j in 0..3 {
        for k in 0..4 {
            c[j][k] = (0..4).map(|m| design.c[j][m] * g[m][k]).sum();
        }
    }
    MeasurementDesign::unconstrained(c)
}

/// `(Σₙ Φ₂ₙ² λₙ, λ₀)`.
pub fn efficiency_bounds(dbasis: &DerivativeBasis, basis: &ProlateBasis) -> Result<(f64, f64)> {
    check_dims(dbasis, basis)?;
    let phi = dbasis.phi_or_err()?;
    if phi.len() < 3 {
        return Err(Error::DimensionMismatch("need Φ₂".into()));
    }
    let bound: f64 = phi[2].iter().zip(basis.lambdas()).map(|(p, l)| p * p * l).sum();
    Ok((bound, basis.lambda(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn design(c01: f64, c11: f64, c02: f64, c12: f64) -> MeasurementDesign {
        MeasurementDesign::new([[0.0, c01, c02, 0.0], [0.0, c11, c12, 0.0], [1.0, 0.0, 0.0, 0.0]]).unwrap()
    }

    #[test]
    fn efficiency_closed_forms() {
        assert!(MeasurementDesign::new([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0; 4]]).is_err());
        let unit = MeasurementDesign::unconstrained([[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0; 4]])
            .unwrap();
        assert_eq!(efficiency_factor(&unit).unwrap(), 1.0);
        assert!(efficiency_factor(&design(0.3, 0.4, 0.6, 0.8)).unwrap().abs() < 1e-16);
        let a = efficiency_factor(&design(0.3, 0.4, 0.2, -0.5)).unwrap();
        let b = efficiency_factor(&design(0.3, 0.4, 0.2 * 1.7, -0.5 * 1.7)).unwrap();
        assert!((b - 1.7 * 1.7 * a).abs() < 1e-15);
    }

    #[test]
    fn sphere_form() {
        let d = design_from_sphere(0.6, PI / 3.0, 0.8, 5.0 * PI / 6.0, FreeEntries::default()).unwrap();
        assert!((efficiency_factor(&d).unwrap() - 0.64).abs() < 1e-15);
        let d = design_from_sphere(0.5, 0.3, 1.0, 0.3 + PI / 2.0, FreeEntries::default()).unwrap();
        assert!((efficiency_factor(&d).unwrap() - 1.0).abs() < 1e-15);
        let d = design_from_sphere(0.5, 0.4, 0.9, 0.4, FreeEntries::default()).unwrap();
        assert!(efficiency_factor(&d).unwrap() < 1e-30);
        assert!(design_from_sphere(0.5, PI / 2.0, 0.9, 0.4, FreeEntries::default()).is_err());
        assert!(design_from_sphere(0.5, 0.3, 0.9, PI, FreeEntries::default()).is_err());
    }

    #[test]
    fn validity_detects_overcomplete_and_dependent_designs() {
        let free = FreeEntries {
            c2: [1.0, 0.0, 0.0, 0.0],
            ..Default::default()
        };
        let d = design_from_sphere(0.6, PI / 3.0, 0.8, 5.0 * PI / 6.0, free).unwrap();
        d.check_validity().unwrap();
        assert!(matches!(d.scaled(2.0).unwrap().check_validity(), Err(Error::PovmNotPositive { .. })));
        let zero_row = design_from_sphere(0.6, PI / 3.0, 0.8, 5.0 * PI / 6.0, FreeEntries::default()).unwrap();
        assert!(matches!(zero_row.check_validity(), Err(Error::PovmDependent { .. })));
    }

    #[test]
    fn identity_damping_leaves_design_unchanged() {
        let phi: Vec<Vec<f64>> = (0..4)
            .map(|k| (0..6).map(|n| if n == k { 1.0 } else { 0.0 }).collect())
            .collect();
        let mut d = DerivativeBasis::from_gamma(phi.clone()).unwrap();
        d = super::super::modes::gram_schmidt(&d).unwrap();
        let design = design(0.3, 0.4, 0.2, -0.5);
        let t = time_limited_design_with(&design, &d, &[1.0; 6]).unwrap();
        assert_eq!(t.matrix(), design.matrix());
    }
}
