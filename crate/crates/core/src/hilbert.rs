//! Composite Hilbert space of the four-level emitter and two truncated cavity
//! modes, ordered emitter ⊗ H-mode ⊗ V-mode.
//!
//! Basis index of `|χ, n_H, n_V⟩` is `χ·(n_max+1)² + n_H·(n_max+1) + n_V`
//! with emitter order `{XX, X_H, X_V, G}`.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};

use crate::{Error, Result, C64};

pub type Operator = DMatrix<C64>;

/// Bare emitter levels in basis order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    XX = 0,
    XH = 1,
    XV = 2,
    G = 3,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::XX, Level::XH, Level::XV, Level::G];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Truncated tensor-product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Space {
    n_max: usize,
}

impl Space {
    pub const MIN_CUTOFF: usize = 2;

    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < Self::MIN_CUTOFF {
            return Err(Error::InvalidCutoff { n_max, min: Self::MIN_CUTOFF });
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Dimension of a single mode's Fock space.
    pub fn fock_dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        4 * self.fock_dim() * self.fock_dim()
    }

    /// Index of `|χ, n_H, n_V⟩`. Panics if a photon number exceeds the cutoff.
    pub fn index(&self, chi: usize, n_h: usize, n_v: usize) -> usize {
        assert!(chi < 4 && n_h <= self.n_max && n_v <= self.n_max, "state out of range");
        let f = self.fock_dim();
        chi * f * f + n_h * f + n_v
    }

    /// Inverse of [`Space::index`].
    pub fn label(&self, idx: usize) -> (usize, usize, usize) {
        let f = self.fock_dim();
        (idx / (f * f), (idx / f) % f, idx % f)
    }

    pub fn identity(&self) -> Operator {
        Operator::identity(self.dim(), self.dim())
    }

    /// `a_H` on the full space.
    pub fn a_h(&self) -> Operator {
        let a = annihilation(self.n_max).expect("cutoff validated");
        let i4 = Operator::identity(4, 4);
        let iv = Operator::identity(self.fock_dim(), self.fock_dim());
        kron(&i4, &kron(&a, &iv))
    }

    /// `a_V` on the full space.
    pub fn a_v(&self) -> Operator {
        let a = annihilation(self.n_max).expect("cutoff validated");
        let i4 = Operator::identity(4, 4);
        let ih = Operator::identity(self.fock_dim(), self.fock_dim());
        kron(&i4, &kron(&ih, &a))
    }

    pub fn number(&self) -> Operator {
        let ah = self.a_h();
        let av = self.a_v();
        ah.adjoint() * &ah + av.adjoint() * &av
    }

    pub fn ket(&self, chi: usize, n_h: usize, n_v: usize) -> DVector<C64> {
        let mut v = DVector::zeros(self.dim());
        v[self.index(chi, n_h, n_v)] = C64::new(1.0, 0.0);
        v
    }

    /// Projector `|χ,n_H,n_V⟩⟨χ,n_H,n_V|` as a density matrix.
    pub fn basis_state(&self, chi: usize, n_h: usize, n_v: usize) -> DensityMatrix {
        let mut m = Operator::zeros(self.dim(), self.dim());
        let i = self.index(chi, n_h, n_v);
        m[(i, i)] = C64::new(1.0, 0.0);
        DensityMatrix(m)
    }
}

/// Single-mode annihilation operator on `{|0⟩, …, |n_max⟩}`.
pub fn annihilation(n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::InvalidCutoff { n_max, min: 1 });
    }
    let d = n_max + 1;
    let mut a = Operator::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(a)
}

pub fn kron(a: &Operator, b: &Operator) -> Operator {
    a.kronecker(b)
}

/// `|i⟩⟨j|` on the emitter.
pub fn transition(i: Level, j: Level) -> Matrix4<C64> {
    let mut m = Matrix4::zeros();
    m[(i.index(), j.index())] = C64::new(1.0, 0.0);
    m
}

/// Lifts a 4×4 emitter operator to `op ⊗ I_H ⊗ I_V`.
pub fn embed_emitter(op4: &Operator, space: &Space) -> Result<Operator> {
    if op4.nrows() != 4 || op4.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: op4.nrows() });
    }
    let f2 = space.fock_dim() * space.fock_dim();
    Ok(kron(op4, &Operator::identity(f2, f2)))
}

pub fn embed_emitter4(op4: &Matrix4<C64>, space: &Space) -> Operator {
    let dyn_op = Operator::from_iterator(4, 4, op4.iter().copied());
    embed_emitter(&dyn_op, space).expect("4x4 input")
}

/// `Tr(op·ρ)`.
pub fn expectation(op: &Operator, rho: &DensityMatrix) -> Result<C64> {
    let r = rho.as_matrix();
    if op.shape() != r.shape() {
        return Err(Error::DimensionMismatch { expected: r.nrows(), found: op.nrows() });
    }
    Ok(trace_product(op, r))
}

/// `Tr(A·B)` without forming the product.
pub fn trace_product(a: &Operator, b: &Operator) -> C64 {
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for k in 0..n {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Largest elementwise deviation from Hermiticity.
pub fn hermitian_defect(m: &Operator) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(m: &Operator) -> Operator {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Tolerances for [`DensityMatrix::check`].
#[derive(Debug, Clone, Copy)]
pub struct Physicality {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for Physicality {
    fn default() -> Self {
        Self { hermitian: 1e-10, trace: 1e-8, positivity: 1e-8 }
    }
}

/// Density matrix on the full space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    /// Wraps `m` after checking Hermiticity, unit trace and positivity.
    pub fn new(m: Operator) -> Result<Self> {
        let rho = Self(m);
        rho.check(&Physicality::default())?;
        Ok(rho)
    }

    pub fn new_unchecked(m: Operator) -> Self {
        Self(m)
    }

    pub fn as_matrix(&self) -> &Operator {
        &self.0
    }

    pub fn into_matrix(self) -> Operator {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = hermitize(&self.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn purity(&self) -> f64 {
        trace_product(&self.0, &self.0).re
    }

    pub fn check(&self, tol: &Physicality) -> Result<()> {
        let m = &self.0;
        if !m.is_square() {
            return Err(Error::InvalidState("not square".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = hermitian_defect(m);
        if herm > tol.hermitian {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = m.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol.trace {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -tol.positivity {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

impl AsRef<Operator> for DensityMatrix {
    fn as_ref(&self) -> &Operator {
        &self.0
    }
}
