//! Dense linear-algebra kernels used by the master-equation engine.
//!
//! Everything here is written against plain `ndarray` storage with no BLAS
//! or LAPACK backend: the matrices in this crate are small (Hilbert-space
//! dimensions up to ~10², Liouville-space dimensions up to ~10³) and the
//! project requires bit-for-bit reproducible output across runs and thread
//! counts, which rules out backends with nondeterministic reduction orders.
//!
//! Provided kernels:
//!
//! - [`matmul`]: complex matrix product via four blocked real products,
//! - [`lu_solve`] / [`lu_solve_mat`]: complex LU with partial pivoting,
//! - [`eigh`]: cyclic Jacobi eigensolver for real symmetric matrices,
//! - [`expm`]: scaling-and-squaring matrix exponential (Padé order 13),
//! - [`is_positive_semidefinite`]: Cholesky-based cone membership test.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::C64;

/// Largest one-norm at which the order-13 Padé approximant of `exp` is
/// accurate to double precision without squaring (Higham's θ₁₃).
const PADE13_THETA: f64 = 5.371_920_351_148_152;

/// Numerator coefficients of the order-13 diagonal Padé approximant.
const PADE13_COEFFS: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];

/// Complex identity matrix of dimension `d`.
pub fn identity(d: usize) -> Array2<C64> {
    Array2::from_diag_elem(d, C64::new(1.0, 0.0))
}

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Promote a real matrix to complex storage.
pub fn to_complex(a: &Array2<f64>) -> Array2<C64> {
    a.mapv(|x| C64::new(x, 0.0))
}

/// Complex matrix product `a · b` computed through four real products.
///
/// `ndarray`'s complex `dot` has no cache-blocked kernel and falls back to
/// a naive triple loop, which dominates runtime once Liouville-space
/// matrices reach a few hundred rows. Splitting into real and imaginary
/// parts routes each partial product through the blocked real `f64`
/// kernel instead:
///
/// ```text
/// (Ar + i·Ai)(Br + i·Bi) = (Ar·Br − Ai·Bi) + i·(Ar·Bi + Ai·Br)
/// ```
///
/// The blocked kernel is single-threaded and has a fixed summation order,
/// so results remain reproducible across runs and thread counts.
///
/// Panics if the inner dimensions disagree (same contract as `dot`).
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let ar = a.mapv(|z| z.re);
    let ai = a.mapv(|z| z.im);
    let br = b.mapv(|z| z.re);
    let bi = b.mapv(|z| z.im);
    let re = ar.dot(&br) - ai.dot(&bi);
    let im = ar.dot(&bi) + ai.dot(&br);
    Array2::from_shape_fn((re.nrows(), re.ncols()), |(i, j)| {
        C64::new(re[[i, j]], im[[i, j]])
    })
}

/// Matrix one-norm (maximum absolute column sum).
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0_f64;
    for col in a.columns() {
        let s: f64 = col.iter().map(|z| z.norm()).sum();
        if s > best {
            best = s;
        }
    }
    best
}

/// Largest deviation from Hermiticity, `max_ij |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// LU factorization with partial pivoting, stored packed in `lu`
/// (unit lower triangle below the diagonal, U on and above it).
struct LuFactors {
    lu: Array2<C64>,
    /// Row permutation: `perm[k]` is the original row index now in row `k`.
    perm: Vec<usize>,
}

fn lu_factor(a: &Array2<C64>, context: &'static str) -> Result<LuFactors> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context,
            expected: n,
            got: a.ncols(),
        });
    }
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = one_norm(a).max(f64::MIN_POSITIVE);

    for k in 0..n {
        // Pivot search down column k.
        let mut p = k;
        let mut best = lu[[k, k]].norm();
        for i in (k + 1)..n {
            let v = lu[[i, k]].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best <= scale * 1e-14 * (n as f64) {
            return Err(Error::SingularSystem { context, pivot: best });
        }
        if p != k {
            perm.swap(k, p);
            for j in 0..n {
                let tmp = lu[[k, j]];
                lu[[k, j]] = lu[[p, j]];
                lu[[p, j]] = tmp;
            }
        }
        let pivot = lu[[k, k]];
        for i in (k + 1)..n {
            let m = lu[[i, k]] / pivot;
            lu[[i, k]] = m;
            for j in (k + 1)..n {
                let sub = m * lu[[k, j]];
                lu[[i, j]] -= sub;
            }
        }
    }
    Ok(LuFactors { lu, perm })
}

impl LuFactors {
    fn solve_vec(&self, b: &Array1<C64>) -> Array1<C64> {
        let n = self.perm.len();
        let mut x = Array1::from_elem(n, C64::new(0.0, 0.0));
        // Apply permutation, then forward substitution with unit L.
        for k in 0..n {
            x[k] = b[self.perm[k]];
        }
        for k in 0..n {
            for j in 0..k {
                let sub = self.lu[[k, j]] * x[j];
                x[k] -= sub;
            }
        }
        // Back substitution with U.
        for k in (0..n).rev() {
            for j in (k + 1)..n {
                let sub = self.lu[[k, j]] * x[j];
                x[k] -= sub;
            }
            x[k] /= self.lu[[k, k]];
        }
        x
    }

    fn solve_mat(&self, b: &Array2<C64>) -> Array2<C64> {
        let n = self.perm.len();
        let m = b.ncols();
        let mut x = Array2::from_elem((n, m), C64::new(0.0, 0.0));
        for c in 0..m {
            let col = self.solve_vec(&b.column(c).to_owned());
            for r in 0..n {
                x[[r, c]] = col[r];
            }
        }
        x
    }
}

/// Solve the square complex system `A x = b` by LU with partial pivoting.
pub fn lu_solve(a: &Array2<C64>, b: &Array1<C64>) -> Result<Array1<C64>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            context: "lu_solve rhs",
            expected: a.nrows(),
            got: b.len(),
        });
    }
    Ok(lu_factor(a, "lu_solve")?.solve_vec(b))
}

/// Solve `A X = B` for a matrix right-hand side.
pub fn lu_solve_mat(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch {
            context: "lu_solve_mat rhs",
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    Ok(lu_factor(a, "lu_solve_mat")?.solve_mat(b))
}

/// Eigendecomposition of a real symmetric matrix by the cyclic Jacobi
/// method.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the second array. The input must be
/// symmetric; the routine only reads the upper triangle implicitly through
/// symmetrized updates, but an asymmetric input is rejected up front.
pub fn eigh(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "eigh",
            expected: n,
            got: a.ncols(),
        });
    }
    let mut scale = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            scale = scale.max(a[[i, j]].abs());
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (a[[i, j]] - a[[j, i]]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::NotHermitian {
                    context: "eigh",
                    deviation: (a[[i, j]] - a[[j, i]]).abs(),
                });
            }
        }
    }

    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    let off = |m: &Array2<f64>| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[[i, j]] * m[[i, j]];
                }
            }
        }
        s.sqrt()
    };

    let tol = 1e-14 * scale.max(f64::MIN_POSITIVE) * (n as f64);
    let max_sweeps = 100;
    let mut converged = false;
    for _ in 0..max_sweeps {
        if off(&m) <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= tol / (n as f64) {
                    continue;
                }
                // Classic Jacobi rotation zeroing m[p][q].
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off(&m) > tol {
        return Err(Error::NoConvergence {
            routine: "eigh (cyclic Jacobi)",
            detail: format!(
                "off-diagonal norm {:.3e} after {} sweeps (target {:.3e})",
                off(&m),
                max_sweeps,
                tol
            ),
        });
    }

    // Sort ascending and permute eigenvector columns to match.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[i, i]].partial_cmp(&m[[j, j]]).unwrap());
    let mut evals = Array1::zeros(n);
    let mut evecs = Array2::zeros((n, n));
    for (new, &old) in order.iter().enumerate() {
        evals[new] = m[[old, old]];
        for k in 0..n {
            evecs[[k, new]] = v[[k, old]];
        }
    }
    Ok((evals, evecs))
}

/// Matrix exponential `exp(A)` by scaling and squaring with a diagonal
/// Padé approximant of order 13.
///
/// The scaling power is chosen from the one-norm so the approximant is
/// evaluated inside its accuracy radius; the result is then squared back.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "expm",
            expected: n,
            got: a.ncols(),
        });
    }
    let norm = one_norm(a);
    let s = if norm > PADE13_THETA {
        (norm / PADE13_THETA).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.mapv(|z| z / C64::new(2.0_f64.powi(s), 0.0));

    let a2 = matmul(&scaled, &scaled);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a2, &a4);
    let id = identity(n);
    let b = &PADE13_COEFFS;

    let u_inner = a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9]);
    let u_poly = matmul(&a6, &u_inner)
        + a6.mapv(|z| z * b[7])
        + a4.mapv(|z| z * b[5])
        + a2.mapv(|z| z * b[3])
        + id.mapv(|z| z * b[1]);
    let u = matmul(&scaled, &u_poly);

    let v_inner = a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8]);
    let v = matmul(&a6, &v_inner)
        + a6.mapv(|z| z * b[6])
        + a4.mapv(|z| z * b[4])
        + a2.mapv(|z| z * b[2])
        + id.mapv(|z| z * b[0]);

    // (V - U) R = (V + U)
    let mut r = lu_solve_mat(&(&v - &u), &(&v + &u))?;
    for _ in 0..s {
        r = matmul(&r, &r);
    }
    Ok(r)
}

/// Whether the Hermitian matrix `h + shift·I` is positive semidefinite,
/// decided by attempting a complex Cholesky factorization.
///
/// The caller is responsible for `h` being Hermitian; only its lower
/// triangle is read.
pub fn is_positive_semidefinite(h: &Array2<C64>, shift: f64) -> bool {
    let n = h.nrows();
    let mut l = Array2::from_elem((n, n), C64::new(0.0, 0.0));
    for j in 0..n {
        let mut d = h[[j, j]].re + shift;
        for k in 0..j {
            d -= l[[j, k]].norm_sqr();
        }
        if d < 0.0 {
            return false;
        }
        // Guard against a zero pivot producing NaNs in later columns: a
        // zero diagonal in a PSD matrix forces the rest of its column to
        // be zero, which the subtraction below then verifies.
        let dj = d.sqrt().max(f64::MIN_POSITIVE);
        l[[j, j]] = C64::new(dj, 0.0);
        for i in (j + 1)..n {
            let mut s = h[[i, j]];
            for k in 0..j {
                let sub = l[[i, k]] * l[[j, k]].conj();
                s -= sub;
            }
            l[[i, j]] = s / dj;
            if !l[[i, j]].is_finite() {
                return false;
            }
        }
    }
    true
}
