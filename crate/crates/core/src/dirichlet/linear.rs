use crate::error::Result;
use crate::linalg::{gmres, Coefficients, GmresOptions, GmresStats, Multigrid};

/// Solves `L x = b` for the operator described by `coeffs` (Dirichlet rows
/// are identity rows), starting from `x`.
pub(crate) fn solve(coeffs: &Coefficients, b: &[f64], x: &mut [f64], opts: &GmresOptions) -> Result<GmresStats> {
    let mg = Multigrid::new(coeffs)?;
    let mut work = mg.workspace();
    let stats = gmres(mg.fine_matrix(), b, x, &mut |r, z| mg.apply(&mut work, r, z), opts)?;
    // Krylov combinations leave rounding on the identity rows
    let lattice = coeffs.lattice();
    for (v, xv) in x.iter_mut().enumerate() {
        if lattice.is_boundary(v) {
            *xv = b[v];
        }
    }
    Ok(stats)
}
