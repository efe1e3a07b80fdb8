//! Brute-force reference implementations for small systems.
//!
//! Nothing here shares code paths with the closed forms used elsewhere: the
//! Fock-space oracle builds the many-body state from fermion operators on a
//! `2^N` basis, eigenvectors come from a generic Hermitian solver, and
//! Pfaffians are expanded along the first row.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::{Complex64, ComplexFloat};

use crate::error::{Error, Result};
use crate::gibbs::{FermionTwoPoint, InitialStateParams};
use crate::model::{ModelParams, MomentumGrid};

/// Largest dimension accepted by [`pfaffian_cofactor`].
pub const COFACTOR_MAX_DIM: usize = 10;

/// Largest chain accepted by the Fock-space oracle.
pub const FOCK_MAX_SITES: usize = 12;

/// Recursive first-row expansion `Pf(A) = Σ_j (-1)^{j+1} a_{0j} Pf(A_{0̂ĵ})`.
pub fn pfaffian_cofactor<T: ComplexFloat<Real = f64>>(
    a: &crate::pfaffian::SkewMatrix<T>,
) -> Result<T> {
    let n = a.dim();
    if n > COFACTOR_MAX_DIM {
        return Err(Error::InvalidParams(format!(
            "cofactor expansion limited to dimension {COFACTOR_MAX_DIM}"
        )));
    }
    let idx: Vec<usize> = (0..n).collect();
    Ok(cofactor(a, &idx))
}

fn cofactor<T: ComplexFloat<Real = f64>>(a: &crate::pfaffian::SkewMatrix<T>, idx: &[usize]) -> T {
    if idx.is_empty() {
        return T::one();
    }
    let first = idx[0];
    let mut total = T::zero();
    for j in 1..idx.len() {
        let rest: Vec<usize> = idx[1..]
            .iter()
            .enumerate()
            .filter(|(p, _)| p + 1 != j)
            .map(|(_, &v)| v)
            .collect();
        let term = a.get(first, idx[j]) * cofactor(a, &rest);
        total = if j % 2 == 1 {
            total + term
        } else {
            total - term
        };
    }
    total
}

/// Eigenvectors `(|ε+>, |ε->)` of the momentum block from a generic
/// Hermitian eigensolver; `|ε->` is `|ε+>` with components swapped, which
/// fixes the relative gauge.
pub fn block_eigenvectors(
    params: &ModelParams,
    k: f64,
) -> Result<(Vector2<Complex64>, Vector2<Complex64>)> {
    let b = params.block(k);
    let h = Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1]);
    let eig = h.symmetric_eigen();
    if (eig.eigenvalues[0] - eig.eigenvalues[1]).abs() < 1e-12 {
        return Err(Error::DegenerateAngle { k });
    }
    let top = if eig.eigenvalues[0] > eig.eigenvalues[1] {
        0
    } else {
        1
    };
    let plus: Vector2<Complex64> = eig.eigenvectors.column(top).into_owned();
    let minus = Vector2::new(plus[1], plus[0]);
    Ok((plus, minus))
}

/// Mode-pair state on `(|1>, |0>)` assembled from solver eigenvectors.
pub fn mode_state_vector(
    spec: &ModelParams,
    init: &InitialStateParams,
    k: f64,
) -> Result<Vector2<Complex64>> {
    let (plus, minus) = block_eigenvectors(spec, k)?;
    let x = init.beta * spec.dispersion(k);
    let up = (1.0 / (1.0 + (2.0 * x).exp())).sqrt();
    let down = (1.0 / (1.0 + (-2.0 * x).exp())).sqrt();
    Ok(plus * Complex64::new(up, 0.0) + minus * Complex64::from_polar(down, init.phi))
}

/// `(cos 2Δθ, sin 2Δθ)` from eigenvector overlaps of the two blocks.
pub fn delta_theta_overlap(pre: &ModelParams, post: &ModelParams, k: f64) -> Result<(f64, f64)> {
    let (u, _) = block_eigenvectors(pre, k)?;
    let (u2, w2) = block_eigenvectors(post, k)?;
    let a = u.dotc(&u2);
    let b = u.dotc(&w2);
    Ok((2.0 * a.norm_sqr() - 1.0, -2.0 * (a * b.conj()).im))
}

/// `<ψ_k| exp(-i H'_k t) |ψ_k>` by 2x2 matrix exponentiation.
pub fn mode_amplitude_expm(
    pre: &ModelParams,
    post: &ModelParams,
    init: &InitialStateParams,
    k: f64,
    t: f64,
) -> Result<Complex64> {
    let psi = mode_state_vector(pre, init, k)?;
    let b = post.block(k);
    let h = Matrix2::new(b[0][0], b[0][1], b[1][0], b[1][1]);
    let u = (h * Complex64::new(0.0, -t)).exp();
    Ok(psi.dotc(&(u * psi)))
}

/// Dense Fock-space representation of the coherent Gibbs state of a short
/// periodic chain. Bit `j` of a basis index is the occupation of site `j`
/// (spin up).
#[derive(Debug, Clone)]
pub struct FockOracle {
    n_sites: usize,
    state: DVector<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Majorana {
    /// `c^† + c`
    A,
    /// `c^† - c`
    B,
}

impl FockOracle {
    pub fn coherent_gibbs(
        spec: &ModelParams,
        init: &InitialStateParams,
        n_sites: usize,
    ) -> Result<Self> {
        if n_sites > FOCK_MAX_SITES {
            return Err(Error::InvalidParams(format!(
                "Fock oracle limited to {FOCK_MAX_SITES} sites"
            )));
        }
        let grid = MomentumGrid::new(n_sites)?;
        let dim = 1usize << n_sites;
        let mut state = DVector::from_element(dim, Complex64::new(0.0, 0.0));
        state[0] = Complex64::new(1.0, 0.0);
        let mut oracle = Self { n_sites, state };
        for k in grid.iter() {
            let psi = mode_state_vector(spec, init, k)?;
            let paired = oracle.apply_momentum(-k, true, &oracle.state.clone());
            let paired = oracle.apply_momentum(k, true, &paired);
            oracle.state = paired * psi[0] + &oracle.state * psi[1];
        }
        Ok(oracle)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn state(&self) -> &DVector<Complex64> {
        &self.state
    }

    /// `c_j` or `c_j^†` with the Jordan-Wigner sign of the occupied sites
    /// below `j`.
    pub fn apply_site(&self, j: usize, dagger: bool, v: &DVector<Complex64>) -> DVector<Complex64> {
        let mut out = DVector::from_element(v.len(), Complex64::new(0.0, 0.0));
        let bit = 1usize << j;
        for (b, amp) in v.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let occupied = b & bit != 0;
            if occupied == dagger {
                continue;
            }
            let sign = if (b & (bit - 1)).count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            out[b ^ bit] += amp * sign;
        }
        out
    }

    /// `c_k = N^{-1/2} Σ_j e^{ikj} c_j` or its adjoint.
    pub fn apply_momentum(
        &self,
        k: f64,
        dagger: bool,
        v: &DVector<Complex64>,
    ) -> DVector<Complex64> {
        let norm = 1.0 / (self.n_sites as f64).sqrt();
        let mut out = DVector::from_element(v.len(), Complex64::new(0.0, 0.0));
        for j in 0..self.n_sites {
            let phase = if dagger { -k * j as f64 } else { k * j as f64 };
            out += self.apply_site(j, dagger, v) * Complex64::from_polar(norm, phase);
        }
        out
    }

    fn apply_majorana(
        &self,
        kind: Majorana,
        j: usize,
        v: &DVector<Complex64>,
    ) -> DVector<Complex64> {
        let create = self.apply_site(j, true, v);
        let destroy = self.apply_site(j, false, v);
        match kind {
            Majorana::A => create + destroy,
            Majorana::B => create - destroy,
        }
    }

    /// `<X_a Y_b>` for Majorana-type site operators.
    pub fn majorana_pair(&self, left: (Majorana, usize), right: (Majorana, usize)) -> Complex64 {
        let v = self.apply_majorana(right.0, right.1, &self.state);
        let v = self.apply_majorana(left.0, left.1, &v);
        self.state.dotc(&v)
    }

    /// The four momentum-space two-point values.
    pub fn two_point(&self, k: f64) -> FermionTwoPoint {
        let s = &self.state;
        let expect = |ops: &[(f64, bool)]| {
            let mut v = s.clone();
            for &(q, dagger) in ops.iter().rev() {
                v = self.apply_momentum(q, dagger, &v);
            }
            s.dotc(&v)
        };
        FermionTwoPoint {
            cdag_cdag: expect(&[(k, true), (-k, true)]),
            cdag_c: expect(&[(k, true), (k, false)]),
            c_c: expect(&[(-k, false), (k, false)]),
            c_cdag: expect(&[(-k, false), (-k, true)]),
        }
    }

    /// `<σ_i^α σ_j^α>` from spin operators acting directly on the basis.
    pub fn spin_correlator(
        &self,
        direction: crate::magnetization::Direction,
        i: usize,
        j: usize,
    ) -> Complex64 {
        let v = apply_spin(direction, j, &self.state);
        let v = apply_spin(direction, i, &v);
        self.state.dotc(&v)
    }

    pub fn m_z(&self) -> f64 {
        let mut total = 0.0;
        for (b, amp) in self.state.iter().enumerate() {
            let up = b.count_ones() as f64;
            total += amp.norm_sqr() * (2.0 * up - self.n_sites as f64);
        }
        total / self.n_sites as f64
    }

    pub fn energy(&self, params: &ModelParams) -> f64 {
        let h = spin_hamiltonian(params, self.n_sites);
        let hc = h.map(|x| Complex64::new(x, 0.0));
        self.state.dotc(&(hc * &self.state)).re
    }

    /// `|<ψ| e^{-iHt} |ψ>|²` by full diagonalization of the spin Hamiltonian.
    pub fn loschmidt_echo(&self, post: &ModelParams, t: f64) -> f64 {
        let h = spin_hamiltonian(post, self.n_sites);
        let eig = h.symmetric_eigen();
        let vecs = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let overlaps = vecs.adjoint() * &self.state;
        let mut amp = Complex64::new(0.0, 0.0);
        for (n, o) in overlaps.iter().enumerate() {
            amp += o.norm_sqr() * Complex64::from_polar(1.0, -eig.eigenvalues[n] * t);
        }
        amp.norm_sqr()
    }
}

fn apply_spin(
    direction: crate::magnetization::Direction,
    j: usize,
    v: &DVector<Complex64>,
) -> DVector<Complex64> {
    let bit = 1usize << j;
    let mut out = DVector::from_element(v.len(), Complex64::new(0.0, 0.0));
    for (b, amp) in v.iter().enumerate() {
        let factor = match direction {
            crate::magnetization::Direction::X => Complex64::new(1.0, 0.0),
            // σ^y |↓> = -i |↑>, σ^y |↑> = i |↓>
            crate::magnetization::Direction::Y => {
                if b & bit == 0 {
                    Complex64::new(0.0, -1.0)
                } else {
                    Complex64::new(0.0, 1.0)
                }
            }
        };
        out[b ^ bit] += amp * factor;
    }
    out
}

/// Periodic spin Hamiltonian
/// `-1/2 Σ_j [(1+γ)/2 σ^x_j σ^x_{j+1} + (1-γ)/2 σ^y_j σ^y_{j+1} + λ σ^z_j]`.
pub fn spin_hamiltonian(params: &ModelParams, n_sites: usize) -> DMatrix<f64> {
    let dim = 1usize << n_sites;
    let mut h = DMatrix::zeros(dim, dim);
    let jx = 0.5 * (1.0 + params.gamma);
    let jy = 0.5 * (1.0 - params.gamma);
    for b in 0..dim {
        for j in 0..n_sites {
            let up = b & (1 << j) != 0;
            h[(b, b)] -= 0.5 * params.lambda * if up { 1.0 } else { -1.0 };
            let l = (j + 1) % n_sites;
            let flipped = b ^ (1 << j) ^ (1 << l);
            // σ^y_j σ^y_l on |s_j s_l>: -(±1)(±1) with + for antiparallel
            let same = ((b >> j) & 1) == ((b >> l) & 1);
            let yy = if same { -1.0 } else { 1.0 };
            h[(flipped, b)] -= 0.5 * (jx + jy * yy);
        }
    }
    h
}
