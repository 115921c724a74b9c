//! Extrinsic Grassmannian geometry for 2D subspaces: least-squares fits of a
//! projector by axis-aligned projectors, the residual subspace left over, and
//! geodesic interpolation between two subspaces.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph_embedding::LinearProjection;
use crate::linalg::{fix_signs, orthonormalize, sym_eigen_ascending};

const MODULE: &str = "grassmann";
const FULLY_EXPLAINED: f64 = 1e-12;

/// Unordered pair of dimension indices, stored with `p < q`. Stands for the
/// selector `Z = [e_p, e_q]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct AxisPair {
    p: usize,
    q: usize,
}

impl AxisPair {
    /// Orders the indices. Panics when `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "an axis pair needs two distinct dimensions");
        AxisPair {
            p: a.min(b),
            q: a.max(b),
        }
    }

    pub fn p(self) -> usize {
        self.p
    }

    pub fn q(self) -> usize {
        self.q
    }

    pub fn dims(self) -> [usize; 2] {
        [self.p, self.q]
    }

    pub fn contains(self, dim: usize) -> bool {
        self.p == dim || self.q == dim
    }

    /// `⟨Z_a Z_aᵀ, Z_b Z_bᵀ⟩_F`, the number of shared dimensions.
    pub fn overlap(self, other: AxisPair) -> usize {
        usize::from(other.contains(self.p)) + usize::from(other.contains(self.q))
    }

    /// All `d(d−1)/2` pairs in lexicographic order.
    pub fn all(d: usize) -> Vec<AxisPair> {
        (0..d)
            .flat_map(|p| ((p + 1)..d).map(move |q| AxisPair { p, q }))
            .collect()
    }
}

impl From<AxisPair> for [usize; 2] {
    fn from(a: AxisPair) -> Self {
        a.dims()
    }
}

impl TryFrom<[usize; 2]> for AxisPair {
    type Error = String;

    fn try_from(v: [usize; 2]) -> std::result::Result<Self, String> {
        if v[0] == v[1] {
            return Err(format!("axis pair with repeated dimension {}", v[0]));
        }
        Ok(AxisPair::new(v[0], v[1]))
    }
}

impl fmt::Display for AxisPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.p, self.q)
    }
}

/// `β` minimising `‖VVᵀ − Σ β_i Z_iZ_iᵀ‖_F² + λ‖β‖²`.
///
/// The Gram matrix of the dictionary is `|pair_i ∩ pair_j|` and the right-hand
/// side is `(VVᵀ)_pp + (VVᵀ)_qq`. With `λ = 0` and a rank-deficient
/// dictionary the minimum-norm solution is returned.
pub fn grassmann_least_squares(v: &LinearProjection, pairs: &[AxisPair], lambda: f64) -> Result<Vec<f64>> {
    if pairs.is_empty() {
        return Ok(Vec::new());
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::Config(format!("lambda must be >= 0, got {lambda}")));
    }
    let m = pairs.len();
    let gram = DMatrix::from_fn(m, m, |i, j| {
        pairs[i].overlap(pairs[j]) as f64 + if i == j { lambda } else { 0.0 }
    });
    let basis = &v.basis;
    let diag = |r: usize| basis.row(r).norm_squared();
    let rhs = DVector::from_iterator(m, pairs.iter().map(|a| diag(a.p) + diag(a.q)));
    let beta = match gram.clone().cholesky() {
        Some(chol) if lambda > 0.0 => chol.solve(&rhs),
        _ => gram
            .svd(true, true)
            .solve(&rhs, 1e-12)
            .map_err(|e| Error::numeric(MODULE, format!("least squares failed: {e}")))?,
    };
    Ok(beta.iter().copied().collect())
}

/// `R = VVᵀ − Σ β_i Z_iZ_iᵀ`
pub fn residual_matrix(v: &LinearProjection, pairs: &[AxisPair], betas: &[f64]) -> DMatrix<f64> {
    assert_eq!(pairs.len(), betas.len(), "one beta per pair");
    let mut r = v.projector();
    for (a, b) in pairs.iter().zip(betas) {
        r[(a.p, a.p)] -= b;
        r[(a.q, a.q)] -= b;
    }
    r
}

/// Span of the two algebraically largest eigenvectors of the residual
/// projector difference. Fails with [`Error::FullyExplained`] when
/// `‖R‖_F < 1e-12`.
pub fn residual_subspace(v: &LinearProjection, pairs: &[AxisPair], betas: &[f64]) -> Result<LinearProjection> {
    let r = residual_matrix(v, pairs, betas);
    let norm = r.norm();
    if norm < FULLY_EXPLAINED {
        return Err(Error::FullyExplained { norm });
    }
    let (_, vecs) = sym_eigen_ascending(&r);
    let d = vecs.ncols();
    let mut basis = orthonormalize(&vecs.select_columns([d - 1, d - 2].iter()))?;
    fix_signs(&mut basis);
    Ok(LinearProjection {
        basis,
        objective_tag: v.objective_tag,
        order_index: v.order_index,
    })
}

/// Constant-speed great-circle path between two 2D subspaces, expressed in
/// their principal bases.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub start_frame: DMatrix<f64>,
    pub direction_frame: DMatrix<f64>,
    /// Principal angles, ascending.
    pub angles: [f64; 2],
}

impl GeodesicPath {
    /// Column `k` is `cos(tθ_k)·start_k + sin(tθ_k)·direction_k`.
    pub fn frame(&self, t: f64) -> DMatrix<f64> {
        let mut out = self.start_frame.clone();
        for k in 0..2 {
            let (s, c) = (t * self.angles[k]).sin_cos();
            let col = self.start_frame.column(k) * c + self.direction_frame.column(k) * s;
            out.set_column(k, &col);
        }
        out
    }
}

/// Unit vector orthogonal to every column of `taken`, built from the first
/// coordinate axis that is not (numerically) inside their span. `None` when
/// they already span the whole space.
fn complete_orthonormal(taken: &[DVector<f64>], d: usize) -> Option<DVector<f64>> {
    for i in 0..d {
        let mut e = DVector::zeros(d);
        e[i] = 1.0;
        // two passes of Gram-Schmidt against the taken columns
        for _ in 0..2 {
            for t in taken {
                let proj = t.dot(&e);
                e.axpy(-proj, t, 1.0);
            }
        }
        let n = e.norm();
        if n > 1e-6 {
            return Some(e / n);
        }
    }
    None
}

/// Sign making the largest-magnitude entry positive (lowest index on ties).
fn canonical_sign(v: &DVector<f64>) -> f64 {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Geodesic from `span(v0)` to `span(v1)` via the SVD of `v0ᵀv1`.
///
/// Principal vector pairs are signed so the start vector's largest entry is
/// positive; at a right angle, where the pairing fixes no relative sign, the
/// end vector is signed the same way on its own. A column with a vanishing
/// angle gets any unit direction orthogonal to the rest (its sine weight stays
/// zero), or a zero column when the ambient space has no room left.
pub fn geodesic_path(v0: &LinearProjection, v1: &LinearProjection) -> GeodesicPath {
    assert_eq!(v0.dim(), v1.dim(), "projections live in different ambient dimensions");
    let d = v0.dim();
    let svd = (v0.basis.transpose() * &v1.basis).svd(true, true);
    let u = svd.u.expect("requested");
    let w = svd.v_t.expect("requested").transpose();
    // descending singular values give ascending angles
    let mut order = [0usize, 1];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]).then(a.cmp(&b)));
    let start_all = &v0.basis * &u;
    let end_all = &v1.basis * &w;

    let mut start = DMatrix::zeros(d, 2);
    let mut direction = DMatrix::zeros(d, 2);
    let mut angles = [0.0; 2];
    let mut pending = Vec::new();
    for (k, &src) in order.iter().enumerate() {
        let mut a = start_all.column(src).into_owned();
        let mut b = end_all.column(src).into_owned();
        let sigma = svd.singular_values[src].clamp(0.0, 1.0);
        let flip = canonical_sign(&a);
        a *= flip;
        b *= if sigma > 1e-12 { flip } else { canonical_sign(&b) };
        let r = &b - &a * sigma;
        let rn = r.norm();
        start.set_column(k, &a);
        if rn > 1e-12 {
            angles[k] = rn.atan2(sigma).clamp(0.0, std::f64::consts::FRAC_PI_2);
            direction.set_column(k, &(r / rn));
        } else {
            pending.push(k);
        }
    }
    let mut taken: Vec<DVector<f64>> = Vec::new();
    for k in 0..2 {
        taken.push(start.column(k).into_owned());
        if !pending.contains(&k) {
            taken.push(direction.column(k).into_owned());
        }
    }
    for k in pending {
        if let Some(e) = complete_orthonormal(&taken, d) {
            direction.set_column(k, &e);
            taken.push(e);
        }
    }
    GeodesicPath {
        start_frame: start,
        direction_frame: direction,
        angles,
    }
}
