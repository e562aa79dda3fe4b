//! Process fidelity between chi matrices.

use crate::linalg::psd_sqrt_matrix;
use crate::tomography::ChiMatrix;
use crate::{Error, Result};

/// F(a, b) = [tr √(√a · b · √a)]² for trace-normalized process matrices.
///
/// Inputs passed ChiMatrix validation (eigenvalues ≥ −1e-8), so eigenvalue
/// clamping here uses that same floor rather than the tighter bound used for
/// exact algebra. The result is clamped into [0, 1]. Rank-deficient inputs
/// (every unitary's chi is rank one) push the zero eigenvalue cluster to
/// ~1e-14 through the two products, and the square root inflates that to
/// ~1e-7 per eigenvalue, so overshoot up to ~1e-6 is ordinary float noise;
/// anything beyond that indicates corrupted inputs and errors out.
pub fn process_fidelity(a: &ChiMatrix, b: &ChiMatrix) -> Result<f64> {
    if !a.trace_normalized() || !b.trace_normalized() {
        return Err(Error::InvalidArgument(
            "process fidelity needs trace-normalized chi matrices".into(),
        ));
    }
    if a.size() != b.size() {
        return Err(Error::Dimension(format!(
            "process fidelity between {}x{0} and {1}x{1} chi matrices",
            a.size(),
            b.size()
        )));
    }
    let sqrt_a = psd_sqrt_matrix(a.entries(), -1e-8)?;
    let inner = &sqrt_a * b.entries() * &sqrt_a;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    let root = psd_sqrt_matrix(&inner, -1e-8)?;
    let tr = root.diagonal().sum().re;
    let f = tr * tr;
    if f > 1.0 + 1e-5 {
        return Err(Error::Numerical(format!(
            "process fidelity {f} exceeds 1 beyond tolerance"
        )));
    }
    Ok(f.clamp(0.0, 1.0))
}
