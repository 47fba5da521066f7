//! Proximal mappings of the l1 term and its conjugate.
//!
//! `prox_l1` is soft-thresholding, `proj_linf` the projection onto the
//! l-infinity ball (the prox of the conjugate indicator); they are tied by
//! the Moreau decomposition `z = prox_l1(z, t*lambda) + t * proj_linf(z/t, lambda)`.
//! `clarke_diag` picks the standard 0/1 diagonal element of the Clarke
//! subdifferential of soft-thresholding and stores it as an active set.

use ndarray::{Array1, ArrayView1};

/// Indices where the generalized Jacobian of soft-thresholding is 1,
/// i.e. `{ i : |z_i| > sigma*lambda }` for the generating vector `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSet {
    indices: Vec<usize>,
}

impl ActiveSet {
    /// Strictly increasing member indices.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// Cardinality `r`.
    pub fn r(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Elementwise soft-threshold `sign(z_i) * max(|z_i| - t, 0)`.
///
/// Panics if `t <= 0`.
pub fn prox_l1(z: ArrayView1<'_, f64>, t: f64) -> Array1<f64> {
    assert!(t > 0.0, "soft-threshold level must be positive, got {t}");
    z.mapv(|zi| {
        let shrunk = zi.abs() - t;
        if shrunk > 0.0 {
            shrunk * zi.signum()
        } else {
            0.0
        }
    })
}

/// Elementwise clamp of `z` to `[-lambda, lambda]`.
///
/// Panics if `lambda <= 0`.
pub fn proj_linf(z: ArrayView1<'_, f64>, lambda: f64) -> Array1<f64> {
    assert!(
        lambda > 0.0,
        "l-infinity ball radius must be positive, got {lambda}"
    );
    z.mapv(|zi| zi.clamp(-lambda, lambda))
}

/// Active set `{ i : |z_i| > sigma_lambda }`. Ties at the threshold fall in
/// the inactive branch, which keeps the Newton system rank minimal while
/// remaining a valid generalized-Jacobian choice.
pub fn clarke_diag(z: ArrayView1<'_, f64>, sigma_lambda: f64) -> ActiveSet {
    assert!(
        sigma_lambda > 0.0,
        "threshold must be positive, got {sigma_lambda}"
    );
    ActiveSet {
        indices: z
            .iter()
            .enumerate()
            .filter_map(|(i, zi)| (zi.abs() > sigma_lambda).then_some(i))
            .collect(),
    }
}
