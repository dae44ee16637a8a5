use nalgebra::{DMatrix, DVector};

use crate::error::{Result, SbiteError};
use crate::fixed_point::{block_factor, FixedPointSolution, ProblemInstance, UpdateRule};
use crate::thresholding::Hyperparameters;

/// Pivot ratio below which the row-equilibrated system is treated as singular.
const SINGULAR_PIVOT_RATIO: f64 = 1e-12;

/// Linear system satisfied by the Jacobian of the fixed point with respect to
/// the response, restricted to the active coefficients.
///
/// For active block `j` with factor base `c_j`, gradient `r_j` and
/// `κ_j = s c_j^(s-1) (1 - c_j)`, the rows read
/// `M_j⁻¹ X_jᵀX_j h_j + Σ_{k≠j} X_jᵀX_k h_k = X_jᵀe_n + M_j⁻¹ u_j`
/// where `M_j = c_j^s I + κ_j r_j r_jᵀ / ‖r_j‖²`. The grouped rule replaces
/// `X_jᵀX_j` by the identity. The matrix does not depend on `n`, so it is
/// factored once and every right-hand side reuses the factorization.
#[derive(Debug, Clone)]
pub struct GradientSystem {
    active_blocks: Vec<usize>,
    active_coords: Vec<usize>,
    matrix: DMatrix<f64>,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    row_scale: DVector<f64>,
    /// `1 / (c_j^s + κ_j)` per active block.
    d_diag: Vec<f64>,
    /// Pilot-dependence terms: block `j` contributes `γ_j r_j (β̃*_jᵀ A_j)`.
    pilot_terms: Vec<(usize, DVector<f64>, DVector<f64>)>,
}

impl GradientSystem {
    pub fn assemble(inst: &ProblemInstance, sol: &FixedPointSolution, hp: &Hyperparameters) -> Result<Self> {
        let part = inst.partition();
        let beta = &sol.beta;
        let gram = inst.gram();
        let gb = gram * beta;

        let active_blocks = sol.active_blocks.clone();
        let active_coords: Vec<usize> = active_blocks.iter().flat_map(|&j| part.range(j)).collect();
        let m = active_coords.len();
        let mut matrix = DMatrix::zeros(m, m);
        for (a, &ia) in active_coords.iter().enumerate() {
            for (b, &ib) in active_coords.iter().enumerate() {
                matrix[(a, b)] = gram[(ia, ib)];
            }
        }

        let mut d_diag = Vec::with_capacity(active_blocks.len());
        let mut pilot_terms = Vec::new();
        let mut row = 0;
        for &j in &active_blocks {
            let r = part.range(j);
            let len = r.len();
            let own = gram.view((r.start, r.start), (len, len)) * beta.rows(r.start, len);
            let rj: DVector<f64> = inst.xty().rows(r.start, len) - gb.rows(r.start, len) + own;
            let t2 = rj.norm_squared();
            let weight = inst.pilot_weight(j, hp.nu);
            let cs = block_factor(weight, t2.sqrt(), hp);
            let c = if hp.lambda == 0.0 { 1.0 } else { 1.0 - hp.lambda_pow() / (weight * t2.sqrt()) };
            if !(c > 0.0) {
                return Err(SbiteError::Domain(format!("block {j} is active but sits on its activation boundary")));
            }
            let kappa = if hp.lambda == 0.0 { 0.0 } else { hp.s * c.powf(hp.s - 1.0) * (1.0 - c) };
            let v = cs + kappa;
            d_diag.push(1.0 / v);

            // M⁻¹ = c^{-s} (I - κ/(c^s+κ) r rᵀ/‖r‖²)
            let mut minv = DMatrix::identity(len, len);
            if kappa != 0.0 {
                minv -= (&rj * rj.transpose()) * (kappa / (v * t2));
            }
            minv /= cs;
            let diag_block = match sol.rule {
                UpdateRule::Sbite => &minv * gram.view((r.start, r.start), (len, len)),
                UpdateRule::Group => minv,
            };
            matrix.view_mut((row, row), (len, len)).copy_from(&diag_block);

            if hp.nu != 1.0 && kappa != 0.0 {
                let pilot_j = inst.pilot().rows(r.start, len);
                let pn2 = pilot_j.norm_squared();
                let gamma = kappa * (hp.nu - 1.0) / (pn2 * v);
                let sens = inst.pilot_map().rows(r.start, len).transpose() * pilot_j;
                pilot_terms.push((row, rj * gamma, sens));
            }
            row += len;
        }

        // row equilibration keeps the singularity test independent of c^{-s}
        let row_scale = DVector::from_fn(m, |i, _| {
            let peak = matrix.row(i).amax();
            if peak > 0.0 {
                1.0 / peak
            } else {
                1.0
            }
        });
        let mut scaled = matrix.clone();
        for i in 0..m {
            scaled.row_mut(i).scale_mut(row_scale[i]);
        }
        let lu = scaled.lu();
        if m > 0 {
            let u = lu.u();
            let diag: Vec<f64> = (0..m).map(|i| u[(i, i)].abs()).collect();
            let hi = diag.iter().cloned().fold(0.0, f64::max);
            let lo = diag.iter().cloned().fold(f64::INFINITY, f64::min);
            if !(hi > 0.0) || !(lo / hi >= SINGULAR_PIVOT_RATIO) {
                return Err(SbiteError::SingularGradientSystem);
            }
        }
        Ok(Self { active_blocks, active_coords, matrix, lu, row_scale, d_diag, pilot_terms })
    }

    pub fn active_blocks(&self) -> &[usize] {
        &self.active_blocks
    }

    pub fn active_coords(&self) -> &[usize] {
        &self.active_coords
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Diagonal entries `1/v_j ≥ 1` of the smoothing matrix, one per active block.
    pub fn d_diagonal(&self) -> &[f64] {
        &self.d_diag
    }

    /// Right-hand sides for every observation, one column per `n`.
    fn rhs(&self, inst: &ProblemInstance, cols: std::ops::Range<usize>) -> DMatrix<f64> {
        let m = self.active_coords.len();
        let x = inst.x();
        let mut rhs = DMatrix::from_fn(m, cols.len(), |a, k| x[(cols.start + k, self.active_coords[a])]);
        for (row, gr, sens) in &self.pilot_terms {
            let s = sens.rows(cols.start, cols.len()).transpose();
            let mut view = rhs.rows_mut(*row, gr.len());
            view += gr * s;
        }
        for i in 0..m {
            rhs.row_mut(i).scale_mut(self.row_scale[i]);
        }
        rhs
    }

    /// Jacobian restricted to the active coordinates: column `n` is `∂β̂_a/∂Y_n`.
    pub fn active_jacobian(&self, inst: &ProblemInstance) -> DMatrix<f64> {
        if self.active_coords.is_empty() {
            return DMatrix::zeros(0, inst.n());
        }
        let rhs = self.rhs(inst, 0..inst.n());
        self.lu.solve(&rhs).expect("factorization checked at assembly")
    }

    /// `Σ_n x_nᵀ ∂β̂/∂Y_n`, the divergence of `Xβ̂`.
    pub fn divergence(&self, inst: &ProblemInstance) -> f64 {
        let h = self.active_jacobian(inst);
        let x = inst.x();
        let mut total = 0.0;
        for (a, &p) in self.active_coords.iter().enumerate() {
            for n in 0..inst.n() {
                total += x[(n, p)] * h[(a, n)];
            }
        }
        total
    }

    /// Full-length gradient `∂β̂/∂Y_n`.
    pub fn gradient(&self, inst: &ProblemInstance, n: usize) -> DVector<f64> {
        let mut out = DVector::zeros(inst.p());
        if self.active_coords.is_empty() {
            return out;
        }
        let rhs = self.rhs(inst, n..n + 1);
        let h = self.lu.solve(&rhs).expect("factorization checked at assembly");
        for (a, &p) in self.active_coords.iter().enumerate() {
            out[p] = h[(a, 0)];
        }
        out
    }
}

/// Gradient of the fixed point with respect to the `n`th response value.
pub fn beta_gradient(
    inst: &ProblemInstance,
    sol: &FixedPointSolution,
    hp: &Hyperparameters,
    n: usize,
) -> Result<DVector<f64>> {
    if n >= inst.n() {
        return Err(SbiteError::InvalidInput(format!("observation {n} out of range ({} rows)", inst.n())));
    }
    Ok(GradientSystem::assemble(inst, sol, hp)?.gradient(inst, n))
}
