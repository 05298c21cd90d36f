//! Dense complex tensors with named axes: contraction, matricization,
//! decompositions, and norms. Every other module trades in these values.
//!
//! Data is stored row-major over the axis order. Axis labels are unique
//! within a tensor; contractions pair axes by label, so callers rename
//! clashing labels before contracting.

use faer::linalg::matmul::matmul;
use faer::prelude::Solve;
use faer::{Accum, Mat, MatRef, Par, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// One named tensor axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Axis {
    pub label: String,
    pub dim: usize,
}

impl Axis {
    pub fn new(label: impl Into<String>, dim: usize) -> Self {
        Axis {
            label: label.into(),
            dim,
        }
    }
}

/// Dense complex tensor with named axes, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    axes: Vec<Axis>,
    data: Vec<C64>,
}

fn check_unique(axes: &[Axis]) -> Result<()> {
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.label == a.label) {
            return Err(Error::DuplicateLabel(a.label.clone()));
        }
    }
    Ok(())
}

impl Tensor {
    /// Build a tensor from axes and row-major data.
    pub fn new(axes: Vec<Axis>, data: Vec<C64>) -> Result<Self> {
        check_unique(&axes)?;
        let len: usize = axes.iter().map(|a| a.dim).product();
        if len != data.len() {
            return Err(Error::InvalidInput(format!(
                "data length {} does not match axis dims (product {})",
                data.len(),
                len
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite tensor entry".into()));
        }
        Ok(Tensor { axes, data })
    }

    pub fn from_fn(axes: Vec<Axis>, mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        check_unique(&axes)?;
        let dims: Vec<usize> = axes.iter().map(|a| a.dim).collect();
        let len: usize = dims.iter().product();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for k in (0..dims.len()).rev() {
                idx[k] += 1;
                if idx[k] < dims[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Ok(Tensor { axes, data })
    }

    pub fn zeros(axes: Vec<Axis>) -> Result<Self> {
        check_unique(&axes)?;
        let len: usize = axes.iter().map(|a| a.dim).product();
        Ok(Tensor {
            axes,
            data: vec![C64::new(0.0, 0.0); len],
        })
    }

    /// Rank-0 tensor holding one value.
    pub fn scalar(z: C64) -> Self {
        Tensor {
            axes: Vec::new(),
            data: vec![z],
        }
    }

    /// Identity matrix with the given row/col labels.
    pub fn identity(row: impl Into<String>, col: impl Into<String>, dim: usize) -> Self {
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Tensor {
            axes: vec![Axis::new(row, dim), Axis::new(col, dim)],
            data,
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn has_axis(&self, label: &str) -> bool {
        self.axes.iter().any(|a| a.label == label)
    }

    pub fn axis_pos(&self, label: &str) -> Result<usize> {
        self.axes
            .iter()
            .position(|a| a.label == label)
            .ok_or_else(|| Error::AxisNotFound(label.to_string()))
    }

    pub fn dim(&self, label: &str) -> Result<usize> {
        Ok(self.axes[self.axis_pos(label)?].dim)
    }

    /// The single entry of a rank-0 tensor.
    pub fn into_scalar(&self) -> Result<C64> {
        if self.data.len() == 1 {
            Ok(self.data[0])
        } else {
            Err(Error::InvalidInput(format!(
                "expected scalar, tensor has {} entries",
                self.data.len()
            )))
        }
    }

    pub fn rename(mut self, old: &str, new: impl Into<String>) -> Result<Self> {
        let pos = self.axis_pos(old)?;
        let new = new.into();
        if new != self.axes[pos].label && self.axes.iter().any(|a| a.label == new) {
            return Err(Error::DuplicateLabel(new));
        }
        self.axes[pos].label = new;
        Ok(self)
    }

    /// Rename every axis through `f`; the result must stay unique.
    pub fn rename_all(mut self, f: impl Fn(&str) -> String) -> Result<Self> {
        for a in &mut self.axes {
            a.label = f(&a.label);
        }
        check_unique(&self.axes)?;
        Ok(self)
    }

    pub fn conj(&self) -> Self {
        Tensor {
            axes: self.axes.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Tensor {
            axes: self.axes.clone(),
            data: self.data.iter().map(|z| z * c).collect(),
        }
    }

    /// Elementwise sum; axis order of `other` may differ, it is permuted to match.
    pub fn add(&self, other: &Tensor) -> Result<Self> {
        let labels: Vec<&str> = self.axes.iter().map(|a| a.label.as_str()).collect();
        let other = other.permuted(&labels)?;
        if other.axes != self.axes {
            return Err(Error::LabelSetMismatch("add: axes differ".into()));
        }
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(x, y)| x + y)
            .collect();
        Ok(Tensor {
            axes: self.axes.clone(),
            data,
        })
    }

    /// Reorder axes to the given label order (must be a permutation of all axes).
    pub fn permuted(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.axes.len() {
            return Err(Error::LabelSetMismatch(format!(
                "permutation lists {} axes, tensor has {}",
                order.len(),
                self.axes.len()
            )));
        }
        let perm: Vec<usize> = order
            .iter()
            .map(|l| self.axis_pos(l))
            .collect::<Result<_>>()?;
        {
            let mut seen = vec![false; perm.len()];
            for &p in &perm {
                if seen[p] {
                    return Err(Error::DuplicateLabel(order[p].to_string()));
                }
                seen[p] = true;
            }
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let old_dims: Vec<usize> = self.axes.iter().map(|a| a.dim).collect();
        let mut old_strides = vec![1usize; old_dims.len()];
        for k in (0..old_dims.len().saturating_sub(1)).rev() {
            old_strides[k] = old_strides[k + 1] * old_dims[k + 1];
        }
        let new_axes: Vec<Axis> = perm.iter().map(|&p| self.axes[p].clone()).collect();
        let new_dims: Vec<usize> = new_axes.iter().map(|a| a.dim).collect();
        let src_strides: Vec<usize> = perm.iter().map(|&p| old_strides[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; new_dims.len()];
        let mut src = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[src]);
            for k in (0..new_dims.len()).rev() {
                idx[k] += 1;
                src += src_strides[k];
                if idx[k] < new_dims[k] {
                    break;
                }
                idx[k] = 0;
                src -= new_dims[k] * src_strides[k];
            }
        }
        Ok(Tensor {
            axes: new_axes,
            data,
        })
    }

    /// sqrt of the sum of squared entry magnitudes.
    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// View a rank-2 tensor as a faer matrix (copies into column-major storage).
    pub fn to_mat(&self) -> Result<Mat<C64>> {
        if self.rank() != 2 {
            return Err(Error::InvalidInput(format!(
                "expected rank-2 tensor, got rank {}",
                self.rank()
            )));
        }
        let (r, c) = (self.axes[0].dim, self.axes[1].dim);
        Ok(Mat::from_fn(r, c, |i, j| self.data[i * c + j]))
    }

    /// Wrap a faer matrix as a rank-2 tensor.
    pub fn from_mat(row: impl Into<String>, col: impl Into<String>, m: MatRef<'_, C64>) -> Self {
        let (r, c) = (m.nrows(), m.ncols());
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(m[(i, j)]);
            }
        }
        Tensor {
            axes: vec![Axis::new(row, r), Axis::new(col, c)],
            data,
        }
    }
}

/// Contract `a` and `b` over the given (a-axis, b-axis) label pairs.
///
/// The result carries the unpaired axes of `a` (in their original order)
/// followed by the unpaired axes of `b`. An empty pair list is an outer
/// product.
pub fn contract(a: &Tensor, b: &Tensor, pairs: &[(&str, &str)]) -> Result<Tensor> {
    let mut a_paired = Vec::with_capacity(pairs.len());
    let mut b_paired = Vec::with_capacity(pairs.len());
    for (la, lb) in pairs {
        let pa = a.axis_pos(la)?;
        let pb = b.axis_pos(lb)?;
        if a.axes[pa].dim != b.axes[pb].dim {
            return Err(Error::DimMismatch {
                a_label: la.to_string(),
                a_dim: a.axes[pa].dim,
                b_label: lb.to_string(),
                b_dim: b.axes[pb].dim,
            });
        }
        if a_paired.contains(&pa) || b_paired.contains(&pb) {
            return Err(Error::DuplicateLabel(format!("{la}/{lb} paired twice")));
        }
        a_paired.push(pa);
        b_paired.push(pb);
    }
    let a_free: Vec<usize> = (0..a.rank()).filter(|p| !a_paired.contains(p)).collect();
    let b_free: Vec<usize> = (0..b.rank()).filter(|p| !b_paired.contains(p)).collect();
    for &pb in &b_free {
        if a_free.iter().any(|&pa| a.axes[pa].label == b.axes[pb].label) {
            return Err(Error::DuplicateLabel(b.axes[pb].label.clone()));
        }
    }

    let a_order: Vec<&str> = a_free
        .iter()
        .chain(a_paired.iter())
        .map(|&p| a.axes[p].label.as_str())
        .collect();
    let b_order: Vec<&str> = b_paired
        .iter()
        .chain(b_free.iter())
        .map(|&p| b.axes[p].label.as_str())
        .collect();
    let ap = a.permuted(&a_order)?;
    let bp = b.permuted(&b_order)?;

    let k: usize = a_paired.iter().map(|&p| a.axes[p].dim).product();
    let ra = ap.data.len() / k.max(1);
    let rb = bp.data.len() / k.max(1);

    let mut out_axes: Vec<Axis> = a_free.iter().map(|&p| a.axes[p].clone()).collect();
    out_axes.extend(b_free.iter().map(|&p| b.axes[p].clone()));
    let mut data = vec![C64::new(0.0, 0.0); ra * rb];
    if k > 0 && ra > 0 && rb > 0 {
        // Row-major X viewed column-major is X^T, so C^T = B^T * A^T lands
        // row-major C directly in `data`.
        let av = MatRef::from_column_major_slice(&ap.data, k, ra);
        let bv = MatRef::from_column_major_slice(&bp.data, rb, k);
        let cv = faer::MatMut::from_column_major_slice_mut(&mut data, rb, ra);
        matmul(cv, Accum::Replace, bv, av, C64::new(1.0, 0.0), Par::Seq);
    }
    Ok(Tensor {
        axes: out_axes,
        data,
    })
}

/// Contract a chain of tensors left to right over shared labels.
pub fn contract_many(first: Tensor, rest: &[(&Tensor, Vec<(&str, &str)>)]) -> Result<Tensor> {
    let mut acc = first;
    for (t, pairs) in rest {
        acc = contract(&acc, t, pairs)?;
    }
    Ok(acc)
}

/// Reshape a tensor into a matrix over (row_labels) x (col_labels).
///
/// The two label lists must exactly cover the tensor's axes. The output is a
/// rank-2 tensor labeled `#rows` / `#cols`; [`unmatricize`] restores the
/// original tensor bit-exactly.
pub fn matricize(t: &Tensor, row_labels: &[&str], col_labels: &[&str]) -> Result<Tensor> {
    if row_labels.len() + col_labels.len() != t.rank() {
        return Err(Error::LabelSetMismatch(format!(
            "{} + {} labels for a rank-{} tensor",
            row_labels.len(),
            col_labels.len(),
            t.rank()
        )));
    }
    let order: Vec<&str> = row_labels.iter().chain(col_labels.iter()).copied().collect();
    let p = t.permuted(&order)?;
    let rdim: usize = row_labels
        .iter()
        .map(|l| t.dim(l))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .product();
    let cdim = p.data.len() / rdim.max(1);
    Ok(Tensor {
        axes: vec![Axis::new("#rows", rdim), Axis::new("#cols", cdim)],
        data: p.data,
    })
}

/// Inverse of [`matricize`]: split the row and column axes back out.
pub fn unmatricize(m: &Tensor, row_axes: &[Axis], col_axes: &[Axis]) -> Result<Tensor> {
    if m.rank() != 2 {
        return Err(Error::InvalidInput("unmatricize expects rank 2".into()));
    }
    let rdim: usize = row_axes.iter().map(|a| a.dim).product();
    let cdim: usize = col_axes.iter().map(|a| a.dim).product();
    if rdim != m.axes[0].dim || cdim != m.axes[1].dim {
        return Err(Error::LabelSetMismatch(format!(
            "axis dims ({rdim}, {cdim}) do not match matrix ({}, {})",
            m.axes[0].dim, m.axes[1].dim
        )));
    }
    let mut axes: Vec<Axis> = row_axes.to_vec();
    axes.extend_from_slice(col_axes);
    Tensor::new(axes, m.data.clone())
}

/// Singular value decomposition of a rank-2 tensor, optionally truncated.
#[derive(Clone, Debug)]
pub struct SvdResult {
    /// Isometry; axes = (input rows, `#sv`).
    pub u: Tensor,
    /// Singular values, descending, all non-negative.
    pub s: Vec<f64>,
    /// Isometry; axes = (`#sv`, input cols).
    pub vh: Tensor,
    /// 2-norm of the discarded singular values.
    pub truncation_error: f64,
}

/// Truncation policy for [`svd`]: keep the largest
/// `min(max_rank, #{s_i > cutoff * s_0})` values.
#[derive(Clone, Copy, Debug)]
pub struct SvdOpts {
    pub max_rank: Option<usize>,
    /// Relative cutoff; defaults to 1e-14.
    pub cutoff: Option<f64>,
}

impl Default for SvdOpts {
    fn default() -> Self {
        SvdOpts {
            max_rank: None,
            cutoff: None,
        }
    }
}

pub fn svd(m: &Tensor, opts: SvdOpts) -> Result<SvdResult> {
    let mat = m.to_mat()?;
    if m.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Decomposition("non-finite input to svd".into()));
    }
    let dec = mat
        .thin_svd()
        .map_err(|e| Error::Decomposition(format!("svd: {e:?}")))?;
    let k_full = dec.S().column_vector().nrows();
    let s_full: Vec<f64> = (0..k_full)
        .map(|i| dec.S().column_vector()[i].re.max(0.0))
        .collect();
    let cutoff = opts.cutoff.unwrap_or(1e-14);
    let s0 = s_full.first().copied().unwrap_or(0.0);
    let n_above = s_full.iter().filter(|&&x| x > cutoff * s0).count();
    // Rank floor of 1 keeps downstream shapes valid on zero input.
    let keep = opts
        .max_rank
        .unwrap_or(usize::MAX)
        .min(n_above)
        .clamp(1, k_full);
    let truncation_error = s_full[keep..]
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let u = Tensor::from_mat(
        m.axes[0].label.clone(),
        "#sv",
        dec.U().subcols(0, keep),
    );
    let vh_mat = dec.V().subcols(0, keep).adjoint().to_owned();
    let vh = Tensor::from_mat("#sv", m.axes[1].label.clone(), vh_mat.as_ref());
    Ok(SvdResult {
        u,
        s: s_full[..keep].to_vec(),
        vh,
        truncation_error,
    })
}

/// Sum of singular values of a rank-2 tensor.
pub fn nuclear_norm(m: &Tensor) -> Result<f64> {
    let dec = svd(m, SvdOpts { max_rank: None, cutoff: Some(0.0) })?;
    Ok(dec.s.iter().sum())
}

/// Hermitian eigendecomposition: eigenvalues ascending, columns of the
/// returned matrix are the eigenvectors.
pub(crate) fn eigh(m: &Mat<C64>) -> Result<(Vec<f64>, Mat<C64>)> {
    let dec = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Decomposition(format!("eigh: {e:?}")))?;
    let n = m.nrows();
    let vals: Vec<f64> = (0..n).map(|i| dec.S().column_vector()[i].re).collect();
    Ok((vals, dec.U().to_owned()))
}

/// Deviation of a rank-2 tensor from Hermiticity, ‖m − m†‖ (Frobenius).
pub fn hermiticity_gap(m: &Tensor) -> Result<f64> {
    if m.rank() != 2 || m.axes[0].dim != m.axes[1].dim {
        return Err(Error::InvalidInput("hermiticity check expects square rank-2".into()));
    }
    let n = m.axes[0].dim;
    let mut gap = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d = m.data[i * n + j] - m.data[j * n + i].conj();
            gap += d.norm_sqr();
        }
    }
    Ok(gap.sqrt())
}

/// Matrix exponential exp(scale * h) of a Hermitian matrix via
/// eigendecomposition. `h` must be Hermitian within 1e-12 relative.
pub fn hermitian_gate_exp(h: &Tensor, scale: f64) -> Result<Tensor> {
    let gap = hermiticity_gap(h)?;
    let norm = h.norm2();
    if gap > 1e-12 * norm.max(1.0) {
        return Err(Error::NotHermitian(gap));
    }
    let n = h.axes[0].dim;
    // Work on the Hermitized matrix so roundoff dirt cannot leak in.
    let mat = h.to_mat()?;
    let mut hm = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            hm[(i, j)] = (mat[(i, j)] + mat[(j, i)].conj()) * 0.5;
        }
    }
    let (vals, vecs) = eigh(&hm)?;
    let mut expd = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        expd[(i, i)] = C64::new((scale * vals[i]).exp(), 0.0);
    }
    let tmp = &vecs * &expd;
    let mut out = Mat::<C64>::zeros(n, n);
    matmul(
        out.as_mut(),
        Accum::Replace,
        tmp.as_ref(),
        vecs.adjoint(),
        C64::new(1.0, 0.0),
        Par::Seq,
    );
    Ok(Tensor::from_mat(
        h.axes[0].label.clone(),
        h.axes[1].label.clone(),
        out.as_ref(),
    ))
}

/// Solve x · A = b for a Hermitian PSD `A` (so A x† = b†), with a ridge of
/// `ridge_rel * tr(A)/n` added to the diagonal. Falls back to a clipped
/// eigen-pseudoinverse when the Cholesky factorization fails.
pub(crate) fn solve_hermitian(a: &Mat<C64>, b: &[C64], ridge_rel: f64) -> Result<Vec<C64>> {
    let n = a.nrows();
    if b.len() != n {
        return Err(Error::InvalidInput("solve: rhs length mismatch".into()));
    }
    let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    let ridge = ridge_rel * (trace / n.max(1) as f64).abs();
    // x·A = b  <=>  A^T x^T = b^T; factor the transpose.
    let mut reg = Mat::<C64>::from_fn(n, n, |i, j| a[(j, i)]);
    for i in 0..n {
        reg[(i, i)] += C64::new(ridge, 0.0);
    }
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    match reg.llt(Side::Lower) {
        Ok(f) => {
            let x = f.solve(&rhs);
            Ok((0..n).map(|i| x[(i, 0)]).collect())
        }
        Err(_) => {
            // Pseudo-inverse through the Hermitian eigenbasis of A.
            let mut herm = Mat::<C64>::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    herm[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                }
            }
            let (vals, vecs) = eigh(&herm)?;
            let vmax = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            let tol = 1e-12 * vmax.max(1e-300);
            let mut x = vec![C64::new(0.0, 0.0); n];
            for k in 0..n {
                if vals[k].abs() <= tol {
                    continue;
                }
                // x = sum_k v_k^T (conj(v_k) · b) / lambda_k  solves x A = b.
                let mut proj = C64::new(0.0, 0.0);
                for i in 0..n {
                    proj += vecs[(i, k)] * b[i];
                }
                let w = proj / vals[k];
                for i in 0..n {
                    x[i] += vecs[(i, k)].conj() * w;
                }
            }
            Ok(x)
        }
    }
}
