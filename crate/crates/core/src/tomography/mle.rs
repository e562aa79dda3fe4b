//! Maximum-likelihood chi reconstruction.
//!
//! The chi matrix is parameterized as χ = L†L / tr(L†L) with L lower
//! triangular complex, which is positive semidefinite and unit trace by
//! construction. Rows with counts contribute their within-row multinomial
//! log-likelihood; rows with zero total contribute the Poisson probability
//! of observing nothing at the row's unconditional rate:
//!
//!   g = (Σ_c n_c ln q_c − Σ_{r: N_r>0} N_r ln w_r − Σ_{r: N_r=0} S·w_r) / Σ_c n_c
//!
//! with q_c = Σ_mn χ_mn B_c[m,n] the unconditional model value of cell c,
//! w_r the sum of q over the cells of row r = (prep, setting), n_c the
//! observed count, N_r the row total and S the shots per setting. The last
//! term matters: a channel can annihilate a preparation outright, and an
//! all-zero row is the evidence for it. Without that term the likelihood is
//! blind to every chi direction that only changes the annihilated output,
//! and the ascent drifts arbitrarily along them. Since model outputs of a
//! PSD chi are PSD, driving the row weight (a trace) to zero pins the whole
//! output block. The multinomial part is scale-blind in χ, and the zero-row
//! term only wants w_r = 0, so the trace normalization can still be applied
//! once at the end instead of being enforced during the ascent.
//! The division by the grand total puts the objective and its gradient in
//! per-count units regardless of how many shots were collected.
//!
//! Ascent uses the analytic gradient ∂g/∂L̄ = L·conj(G) with
//! G = Σ_c (n_c/q_c − N_r/w_r)·B_c, masked to the lower triangle,
//! preconditioned by a limited-memory inverse-Hessian estimate built from
//! the same gradients, with an Armijo backtracking line search.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::tomography::linear::{check_counts_shape, raw_linear_estimate};
use crate::tomography::{ChiMatrix, CountTable, PreparedDesign, TomographyDesign};
use crate::{Error, Result};

/// Iteration cap of the ascent.
const MAX_ITERATIONS: usize = 5000;
/// Convergence threshold on ‖∂g/∂L̄‖_F; the objective is per count, so this
/// is a per-count gradient norm.
const GRAD_TOL: f64 = 1e-8;
/// Objective-stationarity stop: when a whole window of accepted steps gains
/// less than [`STALL_WINDOW_GAIN`] relative likelihood, the iterate counts
/// as converged, provided the gradient is already below [`STALL_GRAD_CAP`].
/// Rank-deficient channels put the optimum on the boundary of the positive
/// cone, where the gradient of the L†L parameterization decays too slowly
/// to ever meet [`GRAD_TOL`] even though the fit has stopped improving.
const STALL_WINDOW: usize = 100;
/// Relative likelihood gain over a full window below which the ascent is
/// stationary. Statistical resolution of the data is about 1/total_counts
/// per count; this sits orders of magnitude beneath it.
const STALL_WINDOW_GAIN: f64 = 1e-9;
/// A stalled iterate with a gradient above this is a line-search failure,
/// not an optimum, and must keep the non-converged verdict.
const STALL_GRAD_CAP: f64 = 1e-4;
/// Armijo sufficient-increase constant.
const ARMIJO_C: f64 = 1e-4;
/// Curvature pairs kept for the quasi-Newton direction.
const LBFGS_MEMORY: usize = 10;
/// Weight of the maximally mixed admixture in the starting point. Keeps
/// every model probability strictly positive at iteration zero without
/// biasing the optimum.
const INIT_MIX: f64 = 1e-6;

/// Result of a likelihood maximization.
///
/// Non-convergence is not an error: the outcome carries the best iterate
/// plus diagnostics, and `converged` tells the caller whether the gradient
/// or stationarity criterion was met within the iteration budget.
#[derive(Debug, Clone)]
pub struct MleOutcome {
    pub chi: ChiMatrix,
    pub converged: bool,
    pub iterations: usize,
    /// Final gradient norm, per count.
    pub grad_norm: f64,
    /// Mean log-likelihood per count at the final iterate.
    pub log_likelihood: f64,
}

struct Objective<'a> {
    pd: &'a PreparedDesign,
    /// Counts divided by the grand total: the objective is the mean
    /// log-likelihood per count. Working in per-count units keeps |g| near 1,
    /// so line-search comparisons resolve gains about six orders of
    /// magnitude finer than they would at raw-count scale, and the gradient
    /// norm is directly the per-count quantity the convergence test wants.
    counts: DVector<f64>,
    row_totals: Vec<f64>,
    /// Shots per setting divided by the grand total: the zero-row Poisson
    /// term in the same per-count units as everything else.
    shots_scale: f64,
    n_outcomes: usize,
}

impl<'a> Objective<'a> {
    fn new(pd: &'a PreparedDesign, table: &CountTable) -> Self {
        let mut counts: DVector<f64> =
            DVector::from_iterator(table.counts().len(), table.counts().iter().map(|&n| n as f64));
        let total = counts.sum();
        if total > 0.0 {
            counts /= total;
        }
        let n_outcomes = table.n_outcomes();
        let n_rows = table.n_preps() * table.n_settings();
        let mut row_totals = vec![0.0; n_rows];
        for (c, &n) in counts.iter().enumerate() {
            row_totals[c / n_outcomes] += n;
        }
        let shots_scale = if total > 0.0 {
            table.shots_per_setting() as f64 / total
        } else {
            0.0
        };
        Self {
            pd,
            counts,
            row_totals,
            shots_scale,
            n_outcomes,
        }
    }

    /// Log-likelihood of the (unnormalized) Hermitian model matrix M = L†L.
    fn log_likelihood(&self, l: &DMatrix<Complex64>) -> f64 {
        let m = l.adjoint() * l;
        let q = self.pd.forward(&self.pd.pack(&m));
        let mut g = 0.0;
        let mut row_w = vec![0.0; self.row_totals.len()];
        for (c, &qc) in q.iter().enumerate() {
            row_w[c / self.n_outcomes] += qc;
            let n = self.counts[c];
            if n > 0.0 {
                g += n * qc.max(1e-300).ln();
            }
        }
        for (r, &w) in row_w.iter().enumerate() {
            let nr = self.row_totals[r];
            if nr > 0.0 {
                g -= nr * w.max(1e-300).ln();
            } else {
                g -= self.shots_scale * w;
            }
        }
        g
    }

    /// Gradient ∂g/∂L̄ restricted to the lower triangle, and g itself.
    fn gradient(&self, l: &DMatrix<Complex64>) -> (DMatrix<Complex64>, f64) {
        let s = self.pd.size();
        let m = l.adjoint() * l;
        let q = self.pd.forward(&self.pd.pack(&m));
        let mut row_w = vec![0.0; self.row_totals.len()];
        for (c, &qc) in q.iter().enumerate() {
            row_w[c / self.n_outcomes] += qc;
        }
        let mut g = 0.0;
        let mut coef = DVector::zeros(q.len());
        for (c, &qc) in q.iter().enumerate() {
            let n = self.counts[c];
            let r = c / self.n_outcomes;
            let nr = self.row_totals[r];
            if nr == 0.0 {
                coef[c] = -self.shots_scale;
                continue;
            }
            let qc_safe = qc.max(1e-300);
            if n > 0.0 {
                g += n * qc_safe.ln();
                coef[c] += n / qc_safe;
            }
            let w_safe = row_w[r].max(1e-300);
            coef[c] -= nr / w_safe;
        }
        for (r, &w) in row_w.iter().enumerate() {
            let nr = self.row_totals[r];
            if nr > 0.0 {
                g -= nr * w.max(1e-300).ln();
            } else {
                g -= self.shots_scale * w;
            }
        }
        // The packed adjoint assembles Σ coef_c [Re B_c; −Im B_c], which is
        // already the conjugate of G = Σ coef_c B_c.
        let packed = self.pd.adjoint(&coef);
        let gconj = self.pd.unpack(&packed);
        let gconj = (&gconj + gconj.adjoint()).scale(0.5);
        // Ascent direction on L̄: L·conj(G), masked lower-triangular.
        let mut dir = l * gconj;
        for r in 0..s {
            for c in (r + 1)..s {
                dir[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
        (dir, g)
    }
}

fn frob_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn re_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Inverse-Hessian action from stored gradient-difference pairs (standard
/// two-loop recursion). Input and output live in the real vector space of
/// lower-triangular complex matrices with inner product Re tr(A†B); the
/// recursion is linear, so feeding the ascent gradient directly yields the
/// ascent direction.
fn lbfgs_direction(
    memory: &std::collections::VecDeque<(DMatrix<Complex64>, DMatrix<Complex64>, f64)>,
    grad: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let mut q = grad.clone();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let alpha = rho * re_inner(s, &q);
        q -= y.scale(alpha);
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = re_inner(s, y) / re_inner(y, y);
        if gamma.is_finite() && gamma > 0.0 {
            q = q.scale(gamma);
        }
    }
    for ((s, y, rho), alpha) in memory.iter().zip(alphas.iter().rev()) {
        let beta = rho * re_inner(y, &q);
        q += s.scale(alpha - beta);
    }
    q
}

/// Cholesky factor of the starting point: the (clamped, slightly mixed)
/// linear-inversion estimate, or the maximally mixed chi when inversion is
/// unavailable.
fn initial_factor(
    counts: &CountTable,
    pd: &PreparedDesign,
) -> DMatrix<Complex64> {
    let s = pd.size();
    let mixed = DMatrix::identity(s, s).scale(1.0 / s as f64);
    let base = raw_linear_estimate(counts, pd).unwrap_or_else(|_| mixed.clone());
    let eig = base.symmetric_eigen();
    let mut clamped = DMatrix::zeros(s, s);
    for k in 0..s {
        let lam = eig.eigenvalues[k].max(0.0);
        let col = eig.eigenvectors.column(k);
        for i in 0..s {
            for j in 0..s {
                clamped[(i, j)] += col[i] * col[j].conj() * Complex64::new(lam, 0.0);
            }
        }
    }
    let tr: Complex64 = clamped.diagonal().sum();
    let start = if tr.re > 1e-12 {
        clamped.scale((1.0 - INIT_MIX) / tr.re) + mixed.scale(INIT_MIX)
    } else {
        mixed
    };
    // The mixed admixture makes the matrix strictly positive definite, so a
    // factorization exists; the ridge fallback covers extreme conditioning.
    let mut ridge = 0.0;
    loop {
        let candidate = &start + DMatrix::identity(s, s).scale(ridge);
        if let Some(l) = lower_factor(&candidate) {
            return l;
        }
        ridge = if ridge == 0.0 { 1e-12 } else { ridge * 10.0 };
        if ridge > 1.0 {
            return DMatrix::identity(s, s).scale(1.0 / (s as f64).sqrt());
        }
    }
}

/// Lower-triangular L with L†L = A for positive definite A.
///
/// Ordinary Cholesky produces A = C·C† (the L·L† orientation). Conjugating
/// by the exchange matrix J flips triangularity: factorizing J·A·J as C·C†
/// gives A = U·U† with U = J·C·J upper triangular, so L = U† is the lower
/// factor of the L†L orientation.
fn lower_factor(a: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let s = a.nrows();
    let j = DMatrix::<Complex64>::from_fn(s, s, |r, c| {
        if r + c == s - 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let reversed = &j * a * &j;
    let chol = nalgebra::Cholesky::new(reversed)?;
    let upper = &j * chol.l() * &j;
    Some(upper.adjoint())
}

/// Maximum-likelihood estimate from a count table over a design.
pub fn mle_chi(counts: &CountTable, design: &TomographyDesign) -> Result<MleOutcome> {
    let pd = PreparedDesign::new(design)?;
    mle_chi_from_counts_prepared(counts, &pd)
}

/// As [`mle_chi`] with a shared prepared design (the bootstrap path).
pub fn mle_chi_from_counts_prepared(
    counts: &CountTable,
    pd: &PreparedDesign,
) -> Result<MleOutcome> {
    check_counts_shape(counts, pd)?;
    if counts.total() == 0 {
        return Err(Error::InvalidArgument(
            "likelihood estimation needs at least one nonzero count".into(),
        ));
    }
    let obj = Objective::new(pd, counts);
    let mut l = initial_factor(counts, pd);
    let nf = frob_norm(&l);
    if nf > 0.0 {
        l /= Complex64::new(nf, 0.0);
    }

    let mut iterations = 0;
    let mut converged = false;
    let (mut dir, mut g) = obj.gradient(&l);
    let mut grad_norm = frob_norm(&dir);
    // Curvature pairs (s, y, 1/⟨s,y⟩) for the quasi-Newton direction. Plain
    // steepest ascent crawls on this likelihood (the L†L composition mixes
    // barrier-stiff cells with near-flat rank-deficient directions and
    // never meets the gradient tolerance within the iteration cap), so the
    // direction is preconditioned with the standard limited-memory
    // inverse-Hessian estimate built from the same gradients.
    let mut memory: std::collections::VecDeque<(DMatrix<Complex64>, DMatrix<Complex64>, f64)> =
        std::collections::VecDeque::new();
    let mut window_anchor = g;
    let mut window_len = 0usize;

    while iterations < MAX_ITERATIONS {
        if grad_norm < GRAD_TOL {
            converged = true;
            break;
        }
        let mut ascent = if memory.is_empty() {
            dir.clone()
        } else {
            lbfgs_direction(&memory, &dir)
        };
        // Directional derivative of g along dL = a is 2 Re⟨D, a⟩.
        let mut slope = 2.0 * re_inner(&dir, &ascent);
        if !slope.is_finite() || slope <= 0.0 {
            memory.clear();
            ascent = dir.clone();
            slope = 2.0 * grad_norm * grad_norm;
        }
        // Increments smaller than this cannot be distinguished from float
        // noise of g, so below it the test degrades to non-decrease.
        let resolution = 64.0 * f64::EPSILON * (1.0 + g.abs());
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let candidate = &l + ascent.scale(t);
            let g_new = obj.log_likelihood(&candidate);
            let required = ARMIJO_C * t * slope;
            let ok = if required >= resolution {
                g_new >= g + required
            } else {
                g_new >= g
            };
            if ok {
                let nf = frob_norm(&candidate);
                let l_new = candidate.scale(1.0 / nf);
                let (d_new, g_next) = obj.gradient(&l_new);
                let s = &l_new - &l;
                let y = &dir - &d_new;
                let sy = re_inner(&s, &y);
                // Admit only pairs with solid positive curvature; the
                // renormalization projection and float noise can produce
                // junk pairs that would wreck the Hessian estimate.
                if LBFGS_MEMORY > 0 && sy > 1e-10 * frob_norm(&s) * frob_norm(&y) {
                    memory.push_back((s, y, 1.0 / sy));
                    if memory.len() > LBFGS_MEMORY {
                        memory.pop_front();
                    }
                }
                l = l_new;
                dir = d_new;
                g = g_next;
                grad_norm = frob_norm(&dir);
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        if !accepted {
            if !memory.is_empty() {
                // The quasi-Newton direction failed outright; drop the
                // memory and retry from steepest ascent.
                memory.clear();
                continue;
            }
            // Even the non-decrease test failed 60 halvings deep along the
            // raw gradient: the iterate is pinned. Report what it says.
            converged = grad_norm < GRAD_TOL;
            break;
        }
        window_len += 1;
        if window_len >= STALL_WINDOW {
            if g - window_anchor < STALL_WINDOW_GAIN * (1.0 + g.abs())
                && grad_norm < STALL_GRAD_CAP
            {
                // Numerically stationary: a full window of steps moved the
                // likelihood by less than any statistically visible amount.
                converged = true;
                break;
            }
            window_anchor = g;
            window_len = 0;
        }
    }
    if grad_norm < GRAD_TOL {
        converged = true;
    }

    let m = l.adjoint() * &l;
    let herm = (&m + m.adjoint()).scale(0.5);
    let tr: Complex64 = herm.diagonal().sum();
    if tr.re <= 0.0 {
        return Err(Error::Numerical(
            "likelihood ascent collapsed to the zero matrix".into(),
        ));
    }
    let chi = ChiMatrix::new(herm.scale(1.0 / tr.re), true)?;
    Ok(MleOutcome {
        chi,
        converged,
        iterations,
        grad_norm,
        log_likelihood: g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{gate, GateName};
    use crate::remote::{rc_operator, RcCoefficients};
    use crate::tomography::{born_probabilities, simulate_counts, Channel, TomographyDesign};

    fn check_gradient_against_finite_differences(counts: &CountTable) {
        let design = TomographyDesign::single_qubit();
        let pd = PreparedDesign::new(&design).unwrap();
        let obj = Objective::new(&pd, counts);
        let mut l = initial_factor(counts, &pd);
        let nf = frob_norm(&l);
        l /= Complex64::new(nf, 0.0);
        // Nudge off the optimum so the gradient is not tiny.
        l[(2, 1)] += Complex64::new(0.05, -0.03);
        l[(0, 0)] += Complex64::new(-0.02, 0.0);
        let (dir, g0) = obj.gradient(&l);
        assert!((obj.log_likelihood(&l) - g0).abs() < 1e-12 * (1.0 + g0.abs()));
        let s = pd.size();
        let h = 1e-6;
        for (r, c) in [(0usize, 0usize), (1, 0), (2, 1), (3, 3), (2, 2)] {
            if c > r || r >= s {
                continue;
            }
            for re_part in [true, false] {
                let mut probe = l.clone();
                let delta = if re_part {
                    Complex64::new(h, 0.0)
                } else {
                    Complex64::new(0.0, h)
                };
                probe[(r, c)] += delta;
                let gp = obj.log_likelihood(&probe);
                let mut probe2 = l.clone();
                probe2[(r, c)] -= delta;
                let gm = obj.log_likelihood(&probe2);
                let fd = (gp - gm) / (2.0 * h);
                let analytic = if re_part {
                    2.0 * dir[(r, c)].re
                } else {
                    2.0 * dir[(r, c)].im
                };
                assert!(
                    (fd - analytic).abs() < 1e-4 * (1.0 + analytic.abs()),
                    "entry ({r},{c}) {} part: finite diff {fd:.9}, analytic {analytic:.9}",
                    if re_part { "real" } else { "imag" }
                );
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let design = TomographyDesign::single_qubit();
        let table = born_probabilities(&Channel::Op(gate(GateName::H)), &design).unwrap();
        let counts = simulate_counts(&table, 3000, 99).unwrap();
        check_gradient_against_finite_differences(&counts);
    }

    #[test]
    fn gradient_matches_finite_differences_with_empty_rows() {
        // (I − X)/√2 annihilates |+⟩, so that prep's rows carry zero counts
        // and the gradient has to include the zero-row Poisson term.
        let coeffs =
            RcCoefficients::real(std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2)
                .unwrap();
        let op = rc_operator(&coeffs, &gate(GateName::I), &gate(GateName::X)).unwrap();
        let design = TomographyDesign::single_qubit();
        let table = born_probabilities(&Channel::Op(op), &design).unwrap();
        let counts = simulate_counts(&table, 3000, 99).unwrap();
        assert!((0..3).any(|j| {
            (0..counts.n_outcomes()).all(|k| counts.count(2, j, k) == 0)
        }));
        check_gradient_against_finite_differences(&counts);
    }
}
