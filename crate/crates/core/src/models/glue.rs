//! Joining two overlapping Gaussian marginals `(X, Y)` and `(Y, Z)` under the
//! chain hypothesis `X → Y → Z`, which forces `X ⊥ Z | Y`.

use crate::error::{Error, Result};

const TOL: f64 = 1e-9;

fn check_psd2(m: &[[f64; 2]; 2]) -> Result<()> {
    let finite = m.iter().flatten().all(|x| x.is_finite());
    let sym = (m[0][1] - m[1][0]).abs() <= TOL;
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !finite || !sym || m[0][0] < -TOL || m[1][1] < -TOL || det < -TOL {
        return Err(Error::NonPsdInput);
    }
    Ok(())
}

/// The unique Gaussian covariance over `(X, Y, Z)` that agrees with both
/// inputs and satisfies `X ⊥ Z | Y`: `cov(X,Z) = cov(X,Y)·cov(Y,Z)/var(Y)`.
pub fn glue_gaussian_chain(cov_xy: &[[f64; 2]; 2], cov_yz: &[[f64; 2]; 2]) -> Result<[[f64; 3]; 3]> {
    check_psd2(cov_xy)?;
    check_psd2(cov_yz)?;
    let var_y = cov_xy[1][1];
    if (var_y - cov_yz[0][0]).abs() > TOL {
        return Err(Error::MarginalMismatch(var_y, cov_yz[0][0]));
    }
    if var_y < 1e-12 {
        return Err(Error::DegenerateInput(format!("var(Y) = {var_y}")));
    }
    let xz = cov_xy[0][1] * cov_yz[0][1] / var_y;
    Ok([
        [cov_xy[0][0], cov_xy[0][1], xz],
        [cov_xy[1][0], var_y, cov_yz[0][1]],
        [xz, cov_yz[1][0], cov_yz[1][1]],
    ])
}
