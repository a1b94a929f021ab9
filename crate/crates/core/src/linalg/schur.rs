//! Real Schur decomposition and eigenvalue reordering.
//!
//! `A = U·T·Uᵀ` is computed by Householder reduction to upper Hessenberg form
//! followed by implicit Francis double-shift QR sweeps. Converged 2×2 blocks
//! with real eigenvalues are split by a rotation so that every remaining 2×2
//! diagonal block carries a complex-conjugate pair.
//!
//! Reordering moves adjacent diagonal blocks past each other with the direct
//! swapping method: solve a small Sylvester equation for the invariant
//! subspace of the trailing block, then apply an orthogonal factor of it.

use num_complex::Complex;

use super::{LinalgError, Matrix, Real};

/// Upper bound on QR sweeps per deflated eigenvalue.
const SWEEPS_PER_EIGENVALUE: usize = 40;

/// Orthogonal `u` and quasi-upper-triangular `t` with `u·t·uᵀ = A`, plus the
/// split index `k`: the trailing `(n−k)×(n−k)` block of `t` holds exactly the
/// eigenvalues classified as zero.
#[derive(Clone)]
pub struct OrderedSchur<T> {
    pub u: Matrix<T>,
    pub t: Matrix<T>,
    pub split: usize,
}

impl<T: Real> std::fmt::Debug for OrderedSchur<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OrderedSchur").field("u", &self.u).field("t", &self.t).field("split", &self.split).finish()
    }
}

impl<T: Real> OrderedSchur<T> {
    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    /// Number of eigenvalues classified as zero.
    pub fn zero_count(&self) -> usize {
        self.dim() - self.split
    }

    pub fn eigenvalues(&self) -> Vec<Complex<T>> {
        schur_eigenvalues(&self.t)
    }
}

/// A Householder reflector `I − β·v·vᵀ`.
struct Reflector<T> {
    v: [T; 3],
    len: usize,
    beta: T,
}

impl<T: Real> Reflector<T> {
    /// Reflector mapping `x` (length 2 or 3) onto a multiple of `e₁`.
    fn new(x: &[T]) -> Self {
        let len = x.len();
        let mut v = [T::zero(); 3];
        v[..len].copy_from_slice(x);
        let tail: T = x[1..].iter().map(|&y| y * y).sum();
        if tail == T::zero() {
            return Reflector { v, len, beta: T::zero() };
        }
        let norm = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] >= T::zero() { -norm } else { norm };
        v[0] = x[0] - alpha;
        let vtv = v[0] * v[0] + tail;
        Reflector { v, len, beta: T::of(2.0) / vtv }
    }

    fn apply_left(&self, m: &mut Matrix<T>, row: usize, cols: std::ops::Range<usize>) {
        if self.beta == T::zero() {
            return;
        }
        for j in cols {
            let mut s = T::zero();
            for l in 0..self.len {
                s += self.v[l] * m[(row + l, j)];
            }
            s *= self.beta;
            for l in 0..self.len {
                m[(row + l, j)] -= s * self.v[l];
            }
        }
    }

    fn apply_right(&self, m: &mut Matrix<T>, col: usize, rows: std::ops::Range<usize>) {
        if self.beta == T::zero() {
            return;
        }
        for i in rows {
            let mut s = T::zero();
            for l in 0..self.len {
                s += self.v[l] * m[(i, col + l)];
            }
            s *= self.beta;
            for l in 0..self.len {
                m[(i, col + l)] -= s * self.v[l];
            }
        }
    }
}

/// Householder reduction `A = Q·H·Qᵀ` with `H` upper Hessenberg.
pub fn hessenberg<T: Real>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = Matrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let tail: T = x[1..].iter().map(|&y| y * y).sum();
        if tail == T::zero() {
            continue;
        }
        let norm = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] >= T::zero() { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let beta = T::of(2.0) / (v[0] * v[0] + tail);
        // left: rows k+1..n, columns k..n
        for j in k..n {
            let s: T = v.iter().enumerate().map(|(l, &vl)| vl * h[(k + 1 + l, j)]).sum::<T>() * beta;
            for (l, &vl) in v.iter().enumerate() {
                h[(k + 1 + l, j)] -= s * vl;
            }
        }
        // right: all rows, columns k+1..n
        for m in [&mut h, &mut q] {
            for i in 0..n {
                let s: T = v.iter().enumerate().map(|(l, &vl)| vl * m[(i, k + 1 + l)]).sum::<T>() * beta;
                for (l, &vl) in v.iter().enumerate() {
                    m[(i, k + 1 + l)] -= s * vl;
                }
            }
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = T::zero();
        }
    }
    (h, q)
}

/// Applies the plane rotation `G = [[c, −s], [s, c]]` as the similarity
/// `Gᵀ·T·G` on indices `(k, k+1)` and accumulates `U ← U·G`.
fn rotate<T: Real>(t: &mut Matrix<T>, u: &mut Matrix<T>, k: usize, c: T, s: T) {
    let n = t.rows();
    for j in 0..n {
        let (x, y) = (t[(k, j)], t[(k + 1, j)]);
        t[(k, j)] = c * x + s * y;
        t[(k + 1, j)] = -s * x + c * y;
    }
    for m in [t, u] {
        for i in 0..n {
            let (x, y) = (m[(i, k)], m[(i, k + 1)]);
            m[(i, k)] = c * x + s * y;
            m[(i, k + 1)] = -s * x + c * y;
        }
    }
}

/// Splits the 2×2 diagonal block at `k` into two 1×1 blocks when its
/// eigenvalues are real. Returns `true` if the block was split.
fn split_real_pair<T: Real>(t: &mut Matrix<T>, u: &mut Matrix<T>, k: usize) -> bool {
    let (a, b, c, d) = (t[(k, k)], t[(k, k + 1)], t[(k + 1, k)], t[(k + 1, k + 1)]);
    if c == T::zero() {
        return true;
    }
    let p = (a - d) * T::of(0.5);
    let disc = p * p + b * c;
    if disc < T::zero() {
        return false;
    }
    // eigenvector (λ₁ − d, c) for λ₁ = (a+d)/2 + sign(p)·√disc; no cancellation
    let root = disc.sqrt();
    let x = if p >= T::zero() { p + root } else { p - root };
    let r = x.hypot(c);
    rotate(t, u, k, x / r, c / r);
    t[(k + 1, k)] = T::zero();
    true
}

fn negligible<T: Real>(sub: T, d1: T, d2: T, hnorm: T) -> bool {
    let eps = T::epsilon();
    let s = d1.abs() + d2.abs();
    sub.abs() <= eps * s || sub.abs() <= eps * hnorm
}

/// Francis double-shift QR on an upper Hessenberg `h`, accumulating into `q`.
fn francis_qr<T: Real>(h: &mut Matrix<T>, q: &mut Matrix<T>) -> Result<(), LinalgError> {
    let n = h.rows();
    if n < 2 {
        return Ok(());
    }
    let hnorm = h.frobenius_norm();
    let max_sweeps = SWEEPS_PER_EIGENVALUE * n;
    let mut total = 0usize;
    let mut iter = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            if negligible(h[(lo, lo - 1)], h[(lo - 1, lo - 1)], h[(lo, lo)], hnorm) {
                h[(lo, lo - 1)] = T::zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        if lo + 1 == hi {
            split_real_pair(h, q, lo);
            if lo == 0 {
                break;
            }
            hi = lo - 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > max_sweeps {
            return Err(LinalgError::NoConvergence { sweeps: total });
        }

        let (s, p) = if iter % 10 == 0 {
            let w = h[(hi, hi - 1)].abs() + h[(hi - 1, hi - 2)].abs();
            (T::of(1.5) * w, w * w)
        } else {
            let (a, b, c, d) = (h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            (a + d, a * d - b * c)
        };

        let mut x = h[(lo, lo)] * h[(lo, lo)] + h[(lo, lo + 1)] * h[(lo + 1, lo)] - s * h[(lo, lo)] + p;
        let mut y = h[(lo + 1, lo)] * (h[(lo, lo)] + h[(lo + 1, lo + 1)] - s);
        let mut z = h[(lo + 1, lo)] * h[(lo + 2, lo + 1)];
        for k in lo..=hi - 2 {
            let r = Reflector::new(&[x, y, z]);
            let first_col = if k > lo { k - 1 } else { lo };
            r.apply_left(h, k, first_col..n);
            r.apply_right(h, k, 0..(k + 4).min(hi + 1));
            r.apply_right(q, k, 0..n);
            if k > lo {
                h[(k + 1, k - 1)] = T::zero();
                h[(k + 2, k - 1)] = T::zero();
            }
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
            if k + 3 <= hi {
                z = h[(k + 3, k)];
            }
        }
        let r = Reflector::new(&[x, y]);
        r.apply_left(h, hi - 1, hi - 2..n);
        r.apply_right(h, hi - 1, 0..hi + 1);
        r.apply_right(q, hi - 1, 0..n);
        h[(hi, hi - 2)] = T::zero();
    }
    Ok(())
}

/// Real Schur decomposition `a = u·t·uᵀ`; returns `(u, t)`.
pub fn real_schur<T: Real>(a: &Matrix<T>) -> Result<(Matrix<T>, Matrix<T>), LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Dimension {
            op: "real_schur",
            detail: format!("{}x{} is not square", a.rows(), a.cols()),
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let (mut h, mut q) = hessenberg(a);
    francis_qr(&mut h, &mut q)?;
    Ok((q, h))
}

/// Diagonal blocks of a quasi-upper-triangular matrix as `(start, size)`.
pub fn schur_blocks<T: Real>(t: &Matrix<T>) -> Vec<(usize, usize)> {
    let n = t.rows();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != T::zero() {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Eigenvalues of the diagonal block at `(start, size)`.
pub fn block_eigenvalues<T: Real>(t: &Matrix<T>, start: usize, size: usize) -> Vec<Complex<T>> {
    if size == 1 {
        return vec![Complex::new(t[(start, start)], T::zero())];
    }
    let (a, b, c, d) = (t[(start, start)], t[(start, start + 1)], t[(start + 1, start)], t[(start + 1, start + 1)]);
    let mean = (a + d) * T::of(0.5);
    let p = (a - d) * T::of(0.5);
    let disc = p * p + b * c;
    if disc >= T::zero() {
        let r = disc.sqrt();
        vec![Complex::new(mean + r, T::zero()), Complex::new(mean - r, T::zero())]
    } else {
        let im = (-disc).sqrt();
        vec![Complex::new(mean, im), Complex::new(mean, -im)]
    }
}

/// Eigenvalues read off the diagonal blocks of a quasi-triangular matrix.
pub fn schur_eigenvalues<T: Real>(t: &Matrix<T>) -> Vec<Complex<T>> {
    schur_blocks(t).into_iter().flat_map(|(s, k)| block_eigenvalues(t, s, k)).collect()
}

/// Eigenvalues of a general square matrix.
pub fn eigenvalues<T: Real>(a: &Matrix<T>) -> Result<Vec<Complex<T>>, LinalgError> {
    let (_, t) = real_schur(a)?;
    Ok(schur_eigenvalues(&t))
}

/// Whether `t` is upper quasi-triangular: zero below the subdiagonal and no
/// two consecutive non-zero subdiagonal entries.
pub fn is_quasi_upper_triangular<T: Real>(t: &Matrix<T>) -> bool {
    let n = t.rows();
    if !t.is_square() {
        return false;
    }
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            if t[(i, j)] != T::zero() {
                return false;
            }
        }
    }
    (1..n.saturating_sub(1)).all(|i| t[(i, i - 1)] == T::zero() || t[(i + 1, i)] == T::zero())
}

/// Solves the tiny system `A·X − X·B = C` (blocks of order ≤ 2) through its
/// Kronecker form with complete pivoting.
#[allow(clippy::needless_range_loop)]
pub(crate) fn small_sylvester<T: Real>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    c: &Matrix<T>,
    sign_b: T,
) -> Result<Matrix<T>, LinalgError> {
    let p = a.rows();
    let q = b.rows();
    let n = p * q;
    // unknown (r, s) ↦ s·p + r
    let mut m = vec![vec![T::zero(); n + 1]; n];
    for s in 0..q {
        for r in 0..p {
            let row = s * p + r;
            for r2 in 0..p {
                m[row][s * p + r2] += a[(r, r2)];
            }
            for s2 in 0..q {
                m[row][s2 * p + r] += sign_b * b[(s2, s)];
            }
            m[row][n] = c[(r, s)];
        }
    }
    let mut col_of: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut best = (k, k, T::zero());
        for i in k..n {
            for j in k..n {
                if m[i][j].abs() > best.2 {
                    best = (i, j, m[i][j].abs());
                }
            }
        }
        if best.2 == T::zero() {
            return Err(LinalgError::Singular);
        }
        m.swap(k, best.0);
        if best.1 != k {
            for row in m.iter_mut() {
                row.swap(k, best.1);
            }
            col_of.swap(k, best.1);
        }
        for i in k + 1..n {
            let l = m[i][k] / m[k][k];
            if l != T::zero() {
                for j in k..=n {
                    let v = m[k][j];
                    m[i][j] -= l * v;
                }
            }
        }
    }
    let mut sol = vec![T::zero(); n];
    for k in (0..n).rev() {
        let mut s = m[k][n];
        for j in k + 1..n {
            s -= m[k][j] * sol[j];
        }
        sol[k] = s / m[k][k];
    }
    let mut x = Matrix::zeros(p, q);
    for (k, &idx) in col_of.iter().enumerate() {
        x[(idx % p, idx / p)] = sol[k];
    }
    if !x.is_finite() {
        return Err(LinalgError::Singular);
    }
    Ok(x)
}

/// Orthogonal `Q` (k×k) whose leading `w.cols()` columns span `range(w)`,
/// from Householder QR.
fn orthogonal_basis<T: Real>(w: &Matrix<T>) -> Matrix<T> {
    let k = w.rows();
    let mut r = w.clone();
    let mut q = Matrix::identity(k);
    for j in 0..w.cols() {
        let x: Vec<T> = (j..k).map(|i| r[(i, j)]).collect();
        let tail: T = x[1..].iter().map(|&y| y * y).sum();
        if tail == T::zero() {
            continue;
        }
        let norm = (x[0] * x[0] + tail).sqrt();
        let alpha = if x[0] >= T::zero() { -norm } else { norm };
        let mut v = x;
        v[0] -= alpha;
        let beta = T::of(2.0) / (v[0] * v[0] + tail);
        for c in 0..w.cols() {
            let s: T = v.iter().enumerate().map(|(l, &vl)| vl * r[(j + l, c)]).sum::<T>() * beta;
            for (l, &vl) in v.iter().enumerate() {
                r[(j + l, c)] -= s * vl;
            }
        }
        for i in 0..k {
            let s: T = v.iter().enumerate().map(|(l, &vl)| vl * q[(i, j + l)]).sum::<T>() * beta;
            for (l, &vl) in v.iter().enumerate() {
                q[(i, j + l)] -= s * vl;
            }
        }
    }
    q
}

/// Swaps the adjacent diagonal blocks of sizes `p` (at `j`) and `q` (at
/// `j + p`), updating `u` so that `u·t·uᵀ` is unchanged.
pub fn swap_blocks<T: Real>(
    u: &mut Matrix<T>,
    t: &mut Matrix<T>,
    j: usize,
    p: usize,
    q: usize,
) -> Result<(), LinalgError> {
    let n = t.rows();
    let k = p + q;
    let a11 = t.block(j, j, p, p);
    let a12 = t.block(j, j + p, p, q);
    let a22 = t.block(j + p, j + p, q, q);
    let tnorm = t.block(j, j, k, k).frobenius_norm();

    // [X; I] spans the invariant subspace of a22: a11·X − X·a22 = −a12
    let x = small_sylvester(&a11, &a22, &(-&a12), -T::one())?;
    let mut w = Matrix::zeros(k, q);
    w.set_block(0, 0, &x);
    w.set_block(p, 0, &Matrix::identity(q));
    let qk = orthogonal_basis(&w);

    let rows = t.block(j, 0, k, n);
    let rows = &qk.transpose() * &rows;
    t.set_block(j, 0, &rows);
    let cols = &t.block(0, j, n, k) * &qk;
    t.set_block(0, j, &cols);
    let ucols = &u.block(0, j, n, k) * &qk;
    u.set_block(0, j, &ucols);

    let residual = t.block(j + q, j, p, q).frobenius_norm();
    if residual > T::of(1e3) * T::epsilon() * tnorm.max(T::min_positive_value()) {
        return Err(LinalgError::SwapRejected { index: j, residual: residual.as_f64() });
    }
    for r in j + q..j + k {
        for c in j..j + q {
            t[(r, c)] = T::zero();
        }
    }
    if q == 2 {
        split_real_pair(t, u, j);
    }
    if p == 2 {
        split_real_pair(t, u, j + q);
    }
    Ok(())
}

/// Default threshold below which an eigenvalue of `a` is classified as zero.
///
/// An exact zero eigenvalue belonging to a Jordan chain of length two is
/// perturbed to roughly `‖A‖·√ε` by backward-stable rounding, far above any
/// `n·ε·‖A‖` rule. The threshold is `2.5·√(n·ε)·‖A‖_F`.
pub fn default_zero_tolerance<T: Real>(a: &Matrix<T>) -> T {
    let n = T::of(a.rows() as f64);
    T::of(2.5) * (n * T::epsilon()).sqrt() * a.frobenius_norm()
}

/// Reorders a real Schur pair so that every eigenvalue with `|λ| ≤ tau_zero`
/// sits in the trailing diagonal block.
pub fn order_schur_zeros_last<T: Real>(
    u: &Matrix<T>,
    t: &Matrix<T>,
    tau_zero: T,
) -> Result<OrderedSchur<T>, LinalgError> {
    if !t.is_square() || u.rows() != t.rows() || !u.is_square() {
        return Err(LinalgError::Dimension {
            op: "order_schur_zeros_last",
            detail: format!("u {}x{}, t {}x{}", u.rows(), u.cols(), t.rows(), t.cols()),
        });
    }
    let mut u = u.clone();
    let mut t = t.clone();
    let classify = |t: &Matrix<T>, start: usize, size: usize| -> Result<bool, LinalgError> {
        let ev = block_eigenvalues(t, start, size);
        let zero: Vec<bool> = ev.iter().map(|l| l.norm() <= tau_zero).collect();
        if zero.iter().any(|&z| z != zero[0]) {
            return Err(LinalgError::Classification {
                index: start,
                detail: format!("block eigenvalues straddle the zero threshold {tau_zero:e}"),
            });
        }
        Ok(zero[0])
    };
    loop {
        let blocks = schur_blocks(&t);
        let mut flags = Vec::with_capacity(blocks.len());
        for &(s, k) in &blocks {
            flags.push(classify(&t, s, k)?);
        }
        let Some(i) = (0..blocks.len().saturating_sub(1)).find(|&i| flags[i] && !flags[i + 1]) else {
            let split = blocks.iter().zip(&flags).find(|(_, &z)| z).map_or(t.rows(), |(&(s, _), _)| s);
            return Ok(OrderedSchur { u, t, split });
        };
        let (j, p) = blocks[i];
        let (_, q) = blocks[i + 1];
        swap_blocks(&mut u, &mut t, j, p, q)?;
    }
}
