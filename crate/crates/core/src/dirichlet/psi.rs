use super::eigen::{lambda1_grid, DEFAULT_TOL};
use super::field::ScalarField;
use super::operator::Laplacian;
use crate::error::{invalid, Error, Result};
use crate::geometry::{dilate, squared_distance_transform, RasterSet};

/// Relative distance `λ` must keep below `λ₁` in [`solve_psi`].
pub const DEFAULT_MARGIN: f64 = 0.05;

const SOLVE_TOL: f64 = 1e-11;

/// `ψ_λ`: solution of `Δψ + λψ = 0` in `domain` with `ψ = 1` outside, i.e.
/// `E^x[exp(λ T)]`. Requires `λ < λ₁(domain)·(1 − 5%)`.
pub fn solve_psi(domain: &RasterSet, lambda: f64) -> Result<ScalarField> {
    if lambda == 0.0 {
        return solve_psi_with(domain, 0.0, f64::INFINITY, DEFAULT_MARGIN);
    }
    let lambda1 = lambda1_grid(domain, DEFAULT_TOL)?.lambda1;
    solve_psi_with(domain, lambda, lambda1, DEFAULT_MARGIN)
}

/// [`solve_psi`] with a known `λ₁` and a custom margin.
pub fn solve_psi_with(domain: &RasterSet, lambda: f64, lambda1: f64, margin: f64) -> Result<ScalarField> {
    if domain.is_empty() {
        return Err(Error::EmptySet);
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return invalid(format!("lambda must be finite and non-negative, got {lambda}"));
    }
    if !(0.0..1.0).contains(&margin) {
        return invalid(format!("margin must lie in [0, 1), got {margin}"));
    }
    if lambda >= lambda1 * (1.0 - margin) {
        return Err(Error::SubEigenvalue { lambda, lambda1 });
    }
    let op = Laplacian::whole(domain);
    let n = op.len();
    // ψ = 1 + u with u = 0 outside: (−Δ_h − λ)u = λ
    let mut u = vec![0.0; n];
    if lambda > 0.0 {
        let b = vec![lambda; n];
        op.solve(&b, &mut u, lambda, SOLVE_TOL, 50 * n + 10_000)?;
    }
    u.iter_mut().for_each(|v| *v += 1.0);
    Ok(ScalarField::from_unknowns(domain.clone(), &op.cells, &u, 1.0))
}

/// `φ = −log ψ` and the pointwise checks of `Δφ = λ + |∇φ|²`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport {
    pub phi: ScalarField,
    /// `max |Δφ − |∇φ|² − λ|` over interior cells.
    pub residual: f64,
    /// `min (Δφ − λ)` over interior cells; `Δφ ≥ λ` holds when non-negative.
    pub min_excess: f64,
    /// `max (|∇φ|² − Δφ)` over interior cells.
    pub max_grad_excess: f64,
    /// Tolerance for the two inequalities: `100·h²·max(1, max|Δφ|)`.
    pub tol: f64,
    pub interior_cells: usize,
    pub lambda: f64,
}

impl PhiReport {
    /// `Δφ ≥ λ − tol` and `|∇φ|² ≤ Δφ + tol` at every interior cell.
    pub fn inequalities_hold(&self) -> bool {
        self.min_excess >= -self.tol && self.max_grad_excess <= self.tol
    }

    /// The residual over interior cells at distance at least `dist` from the
    /// complement of the domain.
    ///
    /// Next to a staircase boundary the discrete `ψ` is not smooth on the
    /// grid scale and the residual stays of order one there; away from it
    /// the scheme is second order.
    pub fn residual_beyond(&self, dist: f64) -> f64 {
        let domain = self.phi.domain();
        let outside = RasterSet::new(*domain.grid(), domain.cells().iter().map(|&c| !c).collect()).expect("same grid");
        let h = domain.h();
        let d2 = squared_distance_transform(&outside);
        let r2 = (dist / h).powi(2);
        self.phi
            .interior_cells()
            .into_iter()
            .filter(|&(i, j)| d2[domain.grid().index(i, j)] >= r2)
            .map(|(i, j)| (self.phi.laplacian(i, j) - self.phi.grad_sq(i, j) - self.lambda).abs())
            .fold(0.0, f64::max)
    }
}

pub fn phi_and_residual(psi: &ScalarField, lambda: f64) -> Result<PhiReport> {
    if !(psi.exterior() > 0.0) || psi.occupied_values().any(|v| !(v > 0.0)) {
        return Err(Error::InvalidPsi);
    }
    let phi = psi.map(|v| -v.ln());
    let cells = phi.interior_cells();
    let mut residual: f64 = 0.0;
    let mut min_excess = f64::INFINITY;
    let mut max_grad_excess = f64::NEG_INFINITY;
    let mut scale: f64 = 1.0;
    for &(i, j) in &cells {
        let lap = phi.laplacian(i, j);
        let g2 = phi.grad_sq(i, j);
        residual = residual.max((lap - g2 - lambda).abs());
        min_excess = min_excess.min(lap - lambda);
        max_grad_excess = max_grad_excess.max(g2 - lap);
        scale = scale.max(lap.abs());
    }
    let h = psi.domain().h();
    Ok(PhiReport {
        phi,
        residual,
        min_excess,
        max_grad_excess,
        tol: 100.0 * h * h * scale,
        interior_cells: cells.len(),
        lambda,
    })
}

/// `f_n = φ_{n², ε_n} / n` on `dilate(Λ, ε_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FnResult {
    pub f: ScalarField,
    pub eps: f64,
    pub lambda1: f64,
}

/// Scans `eps_search` (decreasing) for the first, i.e. largest, `ε` with
/// `λ₁(dilate(Λ, ε)) > n² / (1 − 5%)` and builds `f_n` there.
pub fn build_fn(lambda_set: &RasterSet, n: u32, eps_search: &[f64]) -> Result<FnResult> {
    if n == 0 {
        return invalid("n must be positive");
    }
    if eps_search.is_empty() || eps_search.windows(2).any(|w| w[1] >= w[0]) {
        return invalid("eps_search must be non-empty and strictly decreasing");
    }
    let lambda = f64::from(n * n);
    for &eps in eps_search {
        let domain = dilate(lambda_set, eps)?;
        let lambda1 = lambda1_grid(&domain, DEFAULT_TOL)?.lambda1;
        if lambda < lambda1 * (1.0 - DEFAULT_MARGIN) {
            let psi = solve_psi_with(&domain, lambda, lambda1, DEFAULT_MARGIN)?;
            let nf = f64::from(n);
            let f = psi.map(|v| -v.ln() / nf);
            return Ok(FnResult { f, eps, lambda1 });
        }
    }
    Err(Error::NotThin)
}
