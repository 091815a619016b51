use serde::{Deserialize, Serialize};

use super::eigen::{lambda1_grid, DEFAULT_TOL};
use super::field::ScalarField;
use super::operator::{dot, Laplacian};
use crate::geometry::{components4, RasterSet};

/// Outcome of the supersolution test `−Δψ ≥ λψ`, `ψ > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// `ψ > 0` and `−Δψ ≥ λψ(1 − tol)` on every cell, so `λ₁ ≥ λ(1 − tol)`.
    pub certified: bool,
    pub positive: bool,
    /// `min (−Δψ)/ψ` over the domain, exterior held at 0.
    pub min_ratio: f64,
    /// Relative tolerance `min(100·h², 1%)`.
    pub tol: f64,
    /// `|Σ(χ·Δψ − ψ·Δχ)| / Σ|χ·Δψ|` against the grid eigenfunction `χ`.
    pub green_residual: Option<f64>,
    /// `Σχ(−Δψ) / Σχψ` on the lowest component, which equals `λ₁`.
    pub implied_bound: Option<f64>,
    pub lambda1_grid: Option<f64>,
}

impl Certificate {
    fn rejected(tol: f64) -> Self {
        Self {
            certified: false,
            positive: false,
            min_ratio: 0.0,
            tol,
            green_residual: None,
            implied_bound: None,
            lambda1_grid: None,
        }
    }
}

/// Checks whether `psi` certifies `λ₁(domain) ≥ λ`.
///
/// The discrete operator is the Dirichlet one (value 0 outside `domain`) at
/// every occupied cell, which makes the check sound: a positive `ψ` with
/// `−Δ_hψ ≥ μψ` forces the smallest eigenvalue of `−Δ_h` to be at least `μ`.
/// A `psi` on another lattice, or missing some domain cell, is rejected.
pub fn certify_lower_bound(domain: &RasterSet, psi: &ScalarField, lambda: f64) -> Certificate {
    let h = domain.h();
    let tol = (100.0 * h * h).min(0.01);
    if domain.is_empty() || !domain.grid().same_as(psi.domain().grid()) || !domain.is_subset_of(psi.domain()) {
        return Certificate::rejected(tol);
    }
    let op = Laplacian::whole(domain);
    let x: Vec<f64> = op.cells.iter().map(|&k| psi.values()[k]).collect();
    let mut ax = vec![0.0; x.len()];
    op.apply(&x, &mut ax, 0.0);
    let positive = x.iter().all(|&v| v > 0.0);
    let min_ratio =
        if positive { ax.iter().zip(&x).map(|(a, v)| a / v).fold(f64::INFINITY, f64::min) } else { f64::NEG_INFINITY };
    let certified = positive && min_ratio >= lambda * (1.0 - tol);

    let (mut green_residual, mut implied_bound, mut lambda1) = (None, None, None);
    if let Ok(eig) = lambda1_grid(domain, DEFAULT_TOL) {
        let chi_field = eig.eigenfunction.expect("grid solver returns eigenfunctions");
        let chi: Vec<f64> = op.cells.iter().map(|&k| chi_field.values()[k]).collect();
        let mut achi = vec![0.0; chi.len()];
        op.apply(&chi, &mut achi, 0.0);
        let lhs = dot(&chi, &ax);
        let scale: f64 = chi.iter().zip(&ax).map(|(c, a)| (c * a).abs()).sum();
        if scale > 0.0 {
            green_residual = Some((lhs - dot(&x, &achi)).abs() / scale);
        }
        // restrict χ to the component attaining λ₁
        let comps = components4(domain);
        let lowest =
            (0..eig.components.len()).min_by(|&a, &b| eig.components[a].total_cmp(&eig.components[b])).unwrap_or(0);
        let (mut num, mut den) = (0.0, 0.0);
        for (n, &k) in op.cells.iter().enumerate() {
            if comps.labels[k] == lowest {
                num += chi[n] * ax[n];
                den += chi[n] * x[n];
            }
        }
        if den != 0.0 {
            implied_bound = Some(num / den);
        }
        lambda1 = Some(eig.lambda1);
    }
    Certificate { certified, positive, min_ratio, tol, green_residual, implied_bound, lambda1_grid: lambda1 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::solve_psi;
    use crate::geometry::{shapes, Point2};
    use std::f64::consts::PI;

    #[test]
    fn psi_certifies_its_own_lambda() {
        let d = shapes::disc(Point2::ORIGIN, 1.0, 1.0 / 32.0, 2).unwrap();
        let psi = solve_psi(&d, 3.0).unwrap();
        let c = certify_lower_bound(&d, &psi, 3.0);
        assert!(c.certified);
        assert!(c.green_residual.unwrap() < 1e-8);
        assert!((c.implied_bound.unwrap() - c.lambda1_grid.unwrap()).abs() < 1e-6 * c.lambda1_grid.unwrap());
    }

    #[test]
    fn widened_cosine_certifies() {
        let sq = shapes::rectangle(0.0, 1.0, 0.0, 1.0, 1.0 / 64.0, 2).unwrap();
        let w = 1.1;
        let psi =
            ScalarField::from_fn(sq.clone(), 0.0, |p| (PI * (p.x - 0.5) / w).cos() * (PI * (p.y - 0.5) / w).cos())
                .unwrap();
        let mu = 2.0 * PI * PI / (w * w);
        assert!(certify_lower_bound(&sq, &psi, 0.98 * mu).certified);
        assert!(!certify_lower_bound(&sq, &psi, 25.0).certified);
    }

    #[test]
    fn gaussian_bump_fails() {
        // −Δψ/ψ = 40 − 400|x − c|² is negative near the corners
        let sq = shapes::rectangle(0.0, 1.0, 0.0, 1.0, 1.0 / 64.0, 2).unwrap();
        let psi = ScalarField::from_fn(sq.clone(), 0.0, |p| {
            let r2 = (p.x - 0.5).powi(2) + (p.y - 0.5).powi(2);
            (-r2 / 0.1).exp()
        })
        .unwrap();
        assert!(!certify_lower_bound(&sq, &psi, 5.0).certified);
    }

    #[test]
    fn negative_cell_rejected() {
        let sq = shapes::rectangle(0.0, 1.0, 0.0, 1.0, 1.0 / 16.0, 2).unwrap();
        let mut values = vec![1.0; sq.grid().len()];
        let (i, j) = sq.occupied().nth(40).unwrap();
        values[sq.grid().index(i, j)] = -0.1;
        let psi = ScalarField::new(sq.clone(), values, 0.0).unwrap();
        let c = certify_lower_bound(&sq, &psi, 0.1);
        assert!(!c.positive && !c.certified);
    }
}
