//! Markovian limit: a flat `J` turns the effective Hamiltonian into the
//! constant non-Hermitian matrix `H = diag(ε) - iΓ f f†`.
//!
//! The survival probability follows from a biorthogonal eigen-decomposition
//! of `H`, or, at an exceptional point, from its Jordan chains.

use nalgebra::{DMatrix, DVector, RealField, Schur};
use num_traits::Float;

use crate::dynamics::SurvivalSeries;
use crate::error::{Error, Result};
use crate::model::{InitialState, ValidatedModel};
use crate::scalar::{cplx, real, Cplx, Real};
use crate::waveguide::{build_waveguide_model, WaveguideParams};

/// Scalars usable with the nalgebra decompositions.
pub trait MarkovReal: Real + RealField {}
impl<T: Real + RealField> MarkovReal for T {}

type CMat<T> = DMatrix<Cplx<T>>;
type CVec<T> = DVector<Cplx<T>>;

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonianMarkov<T: MarkovReal> {
    pub matrix: CMat<T>,
    /// `Γ = πJ`.
    pub gamma: T,
    pub levels: Vec<T>,
    pub couplings: Vec<Cplx<T>>,
}

impl<T: MarkovReal> EffectiveHamiltonianMarkov<T> {
    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// `K(z) = Σ |f_n|²/(z - ε_n)` of the underlying levels.
    pub fn k(&self, z: Cplx<T>) -> Cplx<T> {
        self.levels
            .iter()
            .zip(&self.couplings)
            .fold(real(T::zero()), |acc, (e, f)| acc + real(f.norm_sqr()) / (z - real(*e)))
    }

    pub fn k_derivative(&self, z: Cplx<T>) -> Cplx<T> {
        self.levels.iter().zip(&self.couplings).fold(real(T::zero()), |acc, (e, f)| {
            let d = z - real(*e);
            acc - real(f.norm_sqr()) / (d * d)
        })
    }

    /// `I(z) = Σ f_n* c_n/(z - ε_n)`.
    pub fn i(&self, c: &[Cplx<T>], z: Cplx<T>) -> Cplx<T> {
        self.levels
            .iter()
            .zip(&self.couplings)
            .zip(c)
            .fold(real(T::zero()), |acc, ((e, f), c)| acc + f.conj() * *c / (z - real(*e)))
    }
}

/// Assembles `ε_n δ_nn' - iΓ f_n f*_n'`.
pub fn markovian_from_parts<T: MarkovReal>(
    levels: Vec<T>,
    couplings: Vec<Cplx<T>>,
    gamma: T,
) -> Result<EffectiveHamiltonianMarkov<T>> {
    if !(gamma >= T::zero()) {
        return Err(Error::NegativeGamma { gamma: gamma.as_f64() });
    }
    if levels.len() != couplings.len() {
        return Err(Error::LengthMismatch {
            levels: levels.len(),
            couplings: couplings.len(),
        });
    }
    if levels.is_empty() {
        return Err(Error::NoLevels);
    }
    let n = levels.len();
    let g = cplx(T::zero(), -gamma);
    let matrix = CMat::from_fn(n, n, |r, c| {
        let v = g * couplings[r] * couplings[c].conj();
        if r == c {
            v + real(levels[r])
        } else {
            v
        }
    });
    Ok(EffectiveHamiltonianMarkov {
        matrix,
        gamma,
        levels,
        couplings,
    })
}

/// Markovian Hamiltonian of a model with an explicit `Γ`.
pub fn build_markovian<T: MarkovReal>(model: &ValidatedModel<T>, gamma: T) -> Result<EffectiveHamiltonianMarkov<T>> {
    markovian_from_parts(model.levels().to_vec(), model.couplings().to_vec(), gamma)
}

/// Markovian Hamiltonian with `Γ = πJ(e0)` read off the model's density.
pub fn build_markovian_at<T: MarkovReal>(model: &ValidatedModel<T>, e0: T) -> Result<EffectiveHamiltonianMarkov<T>> {
    build_markovian(model, T::PI() * model.band().spectral_density(e0))
}

/// Markovian limit of the chain on the waveguide, with `Γ = πJ(0)`
/// (`1/(2κ)` on the infinite waveguide).
pub fn waveguide_markovian<T: MarkovReal>(params: &WaveguideParams<T>) -> Result<EffectiveHamiltonianMarkov<T>> {
    build_markovian_at(&build_waveguide_model(params)?, T::zero())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResonanceKind {
    Diagonalizable,
    Defective,
}

/// A Jordan block: right chain `(H - z)Ψ_1 = 0`, `(H - z)Ψ_j = Ψ_{j-1}`,
/// the left chain of `H†` at `z*`, and `S = Q†P` with its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct JordanBlock<T: MarkovReal> {
    pub eigenvalue: Cplx<T>,
    pub right_chain: Vec<CVec<T>>,
    pub left_chain: Vec<CVec<T>>,
    pub overlap: CMat<T>,
    pub overlap_inverse: CMat<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceSystem<T: MarkovReal> {
    pub kind: ResonanceKind,
    /// Sorted by `Im z` descending, ties by `Re z` ascending. Members of a
    /// Jordan block carry the coalesced value.
    pub eigenvalues: Vec<Cplx<T>>,
    /// `|Ψ_i^+⟩` for the simple eigenvalues (indices into `eigenvalues`).
    pub right_states: Vec<(usize, CVec<T>)>,
    /// `|Ψ_i^-⟩` with `⟨Ψ_i^-|Ψ_i^+⟩ = 1`.
    pub left_states: Vec<(usize, CVec<T>)>,
    /// `V_i W_i*`, when `f† Ψ_i^+ ≠ 0`.
    pub normalization_products: Vec<(usize, Option<Cplx<T>>)>,
    pub jordan_blocks: Vec<JordanBlock<T>>,
    /// Eigenvalue coalescence threshold.
    pub ep_tol: T,
}

fn frobenius<T: MarkovReal>(m: &CMat<T>) -> T {
    Float::sqrt(m.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()))
}

fn eigenvalues<T: MarkovReal>(h: &CMat<T>) -> Vec<Cplx<T>> {
    let n = h.nrows();
    if n == 1 {
        return vec![h[(0, 0)]];
    }
    if n == 2 {
        // closed form keeps an exact coalescence exact
        let two = T::lit(2.0);
        let half_tr = (h[(0, 0)] + h[(1, 1)]) / two;
        let half_diff = (h[(0, 0)] - h[(1, 1)]) / two;
        let root = (half_diff * half_diff + h[(0, 1)] * h[(1, 0)]).sqrt();
        return vec![half_tr + root, half_tr - root];
    }
    let (_, t) = Schur::new(h.clone()).unpack();
    (0..n).map(|i| t[(i, i)]).collect()
}

fn sort_eigenvalues<T: MarkovReal>(z: &mut [Cplx<T>]) {
    z.sort_by(|a, b| {
        b.im.partial_cmp(&a.im)
            .unwrap()
            .then(a.re.partial_cmp(&b.re).unwrap())
    });
}

/// Unit vector spanning the numerical null space of `a`.
fn null_vector<T: MarkovReal>(a: &CMat<T>) -> CVec<T> {
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let k = vt.nrows() - 1;
    CVec::from_fn(vt.ncols(), |i, _| vt[(k, i)].conj())
}

/// Minimum-norm solution of `a x = b`, dropping the `drop` smallest singular values.
fn least_norm<T: MarkovReal>(a: &CMat<T>, b: &CVec<T>, drop: usize) -> CVec<T> {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V");
    let s = svd.singular_values;
    let keep = s.len().saturating_sub(drop);
    let mut x = CVec::zeros(a.ncols());
    for k in 0..keep {
        if s[k] == T::zero() {
            continue;
        }
        let coef = (u.column(k).adjoint() * b)[(0, 0)] / real(s[k]);
        for i in 0..x.len() {
            x[i] = x[i] + vt[(k, i)].conj() * coef;
        }
    }
    x
}

fn condition_number<T: MarkovReal>(m: &CMat<T>) -> T {
    let s = m.clone().svd(false, false).singular_values;
    let max = s.iter().fold(T::zero(), |a, b| Float::max(a, *b));
    let min = s.iter().fold(T::infinity(), |a, b| Float::min(a, *b));
    if min == T::zero() {
        T::infinity()
    } else {
        max / min
    }
}

fn normalized<T: MarkovReal>(v: CVec<T>) -> CVec<T> {
    let n = Float::sqrt(v.iter().fold(T::zero(), |a, x| a + x.norm_sqr()));
    v.map(|x| x / real(n))
}

/// Splits sorted eigenvalues into clusters closer than `tol` (single linkage).
fn clusters<T: MarkovReal>(z: &[Cplx<T>], tol: T) -> Vec<Vec<usize>> {
    let n = z.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() < tol {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == b {
                        *l = a;
                    }
                }
            }
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match out.iter_mut().find(|c| label[c[0]] == label[i]) {
            Some(c) => c.push(i),
            None => out.push(vec![i]),
        }
    }
    out
}

fn jordan_block<T: MarkovReal>(h: &CMat<T>, z: Cplx<T>, size: usize) -> JordanBlock<T> {
    let n = h.nrows();
    let shifted = h - CMat::identity(n, n) * z;
    let shifted_adj = shifted.adjoint();
    let mut right = vec![normalized(null_vector(&shifted))];
    let mut left = vec![normalized(null_vector(&shifted_adj))];
    for _ in 1..size {
        let r = least_norm(&shifted, right.last().unwrap(), 1);
        let l = least_norm(&shifted_adj, left.last().unwrap(), 1);
        right.push(r);
        left.push(l);
    }
    let overlap = CMat::from_fn(size, size, |j, k| left[j].dotc(&right[k]));
    let overlap_inverse = overlap.clone().try_inverse().unwrap_or_else(|| CMat::zeros(size, size));
    JordanBlock {
        eigenvalue: z,
        right_chain: right,
        left_chain: left,
        overlap,
        overlap_inverse,
    }
}

/// Coalescence threshold: `1e-8 ‖H‖`, raised to `8 sqrt(ε_mach) ‖H‖` because
/// rounding in the inputs already splits an exact double eigenvalue by
/// `O(sqrt(ε_mach)) ‖H‖`.
pub fn ep_tolerance<T: MarkovReal>(h: &EffectiveHamiltonianMarkov<T>) -> T {
    let floor = T::lit(8.0) * Float::sqrt(T::epsilon());
    Float::max(T::lit(1e-8), floor) * frobenius(&h.matrix)
}

/// `1e8`, lowered to `‖H‖/ep_tol` when the gap threshold is raised: a pair
/// split by `g` has eigenvector condition number of order `‖H‖/g`.
fn condition_threshold<T: MarkovReal>(h: &EffectiveHamiltonianMarkov<T>, ep_tol: T) -> T {
    Float::min(T::lit(1e8), frobenius(&h.matrix) / ep_tol)
}

/// Eigen-decomposition of `H`, or Jordan chains where eigenvalues coalesce.
///
/// A cluster counts as defective only when its eigenvalues lie within
/// [`ep_tolerance`] of each other *and* the eigenvector matrix is
/// ill-conditioned; a near-degenerate normal matrix stays diagonalizable.
pub fn resonance_decomposition<T: MarkovReal>(h: &EffectiveHamiltonianMarkov<T>) -> ResonanceSystem<T> {
    decompose(h, ep_tolerance(h), false)
}

/// Decomposition with every coalescing cluster (gap below `ep_tol`) treated
/// as a Jordan block, skipping the conditioning test.
pub fn resonance_decomposition_forced<T: MarkovReal>(
    h: &EffectiveHamiltonianMarkov<T>,
    ep_tol: T,
) -> ResonanceSystem<T> {
    decompose(h, ep_tol, true)
}

fn decompose<T: MarkovReal>(h: &EffectiveHamiltonianMarkov<T>, ep_tol: T, force: bool) -> ResonanceSystem<T> {
    let m = &h.matrix;
    let n = m.nrows();
    let mut z = eigenvalues(m);
    sort_eigenvalues(&mut z);
    let groups = clusters(&z, ep_tol);
    let right: Vec<CVec<T>> = z
        .iter()
        .map(|zi| normalized(null_vector(&(m - CMat::identity(n, n) * *zi))))
        .collect();
    let defective = groups.iter().any(|g| g.len() > 1)
        && (force || condition_number(&CMat::from_columns(&right)) > condition_threshold(h, ep_tol));

    let mut system = ResonanceSystem {
        kind: if defective {
            ResonanceKind::Defective
        } else {
            ResonanceKind::Diagonalizable
        },
        eigenvalues: z.clone(),
        right_states: Vec::new(),
        left_states: Vec::new(),
        normalization_products: Vec::new(),
        jordan_blocks: Vec::new(),
        ep_tol,
    };
    let simple: Vec<usize> = if defective {
        groups.iter().filter(|g| g.len() == 1).map(|g| g[0]).collect()
    } else {
        (0..n).collect()
    };
    if defective {
        for g in groups.iter().filter(|g| g.len() > 1) {
            let mean = g.iter().fold(real(T::zero()), |a, i| a + z[*i]) / real(T::count(g.len()));
            for i in g {
                system.eigenvalues[*i] = mean;
            }
            system.jordan_blocks.push(jordan_block(m, mean, g.len()));
        }
    }
    let adj = m.adjoint();
    for i in simple {
        let v = right[i].clone();
        let mut u = normalized(null_vector(&(&adj - CMat::identity(n, n) * z[i].conj())));
        let c = u.dotc(&v);
        // scale so that ⟨u|v⟩ = 1
        u = u.map(|x| x / c.conj());
        let product = vw_product(h, z[i], &v, &u);
        system.right_states.push((i, v));
        system.left_states.push((i, u));
        system.normalization_products.push((i, product));
    }
    system
}

/// `V W*` from `Ψ^+_n = V f_n/(z - ε_n)` and `⟨Ψ^-|_n = W* f_n*/(z - ε_n)`.
fn vw_product<T: MarkovReal>(h: &EffectiveHamiltonianMarkov<T>, z: Cplx<T>, v: &CVec<T>, u: &CVec<T>) -> Option<Cplx<T>> {
    let (n, f) = h
        .couplings
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())?;
    if f.norm_sqr() == T::zero() {
        return None;
    }
    let fv = h.couplings.iter().zip(v.iter()).fold(real(T::zero()), |a, (f, x)| a + f.conj() * *x);
    let scale = v.iter().fold(T::zero(), |a, x| Float::max(a, x.norm()));
    if fv.norm() <= T::lit(1e-10) * scale * f.norm() {
        return None;
    }
    let d = z - real(h.levels[n]);
    let vv = v[n] * d / *f;
    let ww = u[n].conj() * d / f.conj();
    Some(vv * ww)
}

impl<T: MarkovReal> ResonanceSystem<T> {
    /// `φ(t)` from the closed forms.
    pub fn evolve(&self, initial: &[Cplx<T>], t: T) -> CVec<T> {
        let n = initial.len();
        let phi0 = CVec::from_column_slice(initial);
        let mut out = CVec::zeros(n);
        for ((i, v), (_, u)) in self.right_states.iter().zip(&self.left_states) {
            let z = self.eigenvalues[*i];
            let coef = u.dotc(&phi0) * (cplx(T::zero(), -t) * z).exp();
            out += v * coef;
        }
        for b in &self.jordan_blocks {
            let k = b.right_chain.len();
            let proj = CVec::from_fn(k, |j, _| b.left_chain[j].dotc(&phi0));
            let coef = &b.overlap_inverse * proj;
            let phase = (cplx(T::zero(), -t) * b.eigenvalue).exp();
            // e^{-iHt} Ψ_j = e^{-izt} Σ_k (-it)^k/k! Ψ_{j-k}
            let mut pow = real(T::one());
            for kk in 0..k {
                for j in kk..k {
                    out += &b.right_chain[j - kk] * (coef[j] * pow * phase);
                }
                pow = pow * cplx(T::zero(), -t) / real(T::count(kk + 1));
            }
        }
        out
    }

    /// Amplitude vectors `a_i = Ψ_i^+ ⟨Ψ_i^-|φ0⟩` of the simple eigenvalues.
    pub fn amplitudes(&self, initial: &[Cplx<T>]) -> Vec<(Cplx<T>, CVec<T>)> {
        let phi0 = CVec::from_column_slice(initial);
        self.right_states
            .iter()
            .zip(&self.left_states)
            .map(|((i, v), (_, u))| (self.eigenvalues[*i], v * u.dotc(&phi0)))
            .collect()
    }
}

/// Closed-form `p(t)`.
///
/// Diagonalizable: `p = Σ_i D_i e^{2 Im z_i t} + Σ_{i<i'} 2|X_ii'| cos((Re z_i - Re z_i')t - arg X_ii') e^{(Im z_i + Im z_i')t}`
/// with `D_i = ‖a_i‖²` and `X_ii' = a_i'† a_i`. Defective systems go
/// through the Jordan-chain propagator.
pub fn markovian_survival<T: MarkovReal>(
    system: &ResonanceSystem<T>,
    initial: &InitialState<T>,
    times: &[T],
) -> Result<SurvivalSeries<T>> {
    let c = initial.amplitudes();
    if c.len() != system.eigenvalues.len() {
        return Err(Error::InitialStateLength {
            got: c.len(),
            expected: system.eigenvalues.len(),
        });
    }
    let p = match system.kind {
        ResonanceKind::Diagonalizable => {
            let a = system.amplitudes(c);
            times
                .iter()
                .map(|t| {
                    let two = T::lit(2.0);
                    let mut p = T::zero();
                    for (i, (zi, ai)) in a.iter().enumerate() {
                        p = p + ai.norm_squared() * Float::exp(two * zi.im * *t);
                        for (zj, aj) in a.iter().skip(i + 1) {
                            let x = aj.dotc(ai);
                            p = p + two
                                * x.norm()
                                * Float::cos((zi.re - zj.re) * *t - x.arg())
                                * Float::exp((zi.im + zj.im) * *t);
                        }
                    }
                    p
                })
                .collect()
        }
        ResonanceKind::Defective => times.iter().map(|t| system.evolve(c, *t).norm_squared()).collect(),
    };
    Ok(SurvivalSeries {
        times: times.to_vec(),
        p,
        parts: None,
        error_estimate: T::zero(),
    })
}

/// `p(t) = ‖e^{-iHt} φ0‖²` by matrix exponential.
pub fn markovian_survival_expm<T: MarkovReal>(
    h: &EffectiveHamiltonianMarkov<T>,
    initial: &InitialState<T>,
    times: &[T],
) -> Result<SurvivalSeries<T>> {
    let c = initial.amplitudes();
    if c.len() != h.dim() {
        return Err(Error::InitialStateLength {
            got: c.len(),
            expected: h.dim(),
        });
    }
    let phi0 = CVec::from_column_slice(c);
    let p = times
        .iter()
        .map(|t| {
            let u = (&h.matrix * cplx(T::zero(), -*t)).exp();
            (u * &phi0).norm_squared()
        })
        .collect();
    Ok(SurvivalSeries {
        times: times.to_vec(),
        p,
        parts: None,
        error_estimate: T::zero(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PtPhase {
    /// Eigenvalues `z_{1,2}* = -z_{2,1}` with nonzero real parts.
    Symmetric,
    /// Purely imaginary eigenvalues.
    Broken,
    ExceptionalPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiPtReport<T> {
    /// `‖P H* P + H‖` with `P` the index reversal `n → N + 1 - n`.
    pub residual: T,
    pub anti_symmetric: bool,
    /// Only classified for `N = 2`.
    pub phase: Option<PtPhase>,
}

pub fn anti_pt_check<T: MarkovReal>(h: &EffectiveHamiltonianMarkov<T>) -> AntiPtReport<T> {
    let m = &h.matrix;
    let n = m.nrows();
    let norm = frobenius(m);
    let reflected = CMat::from_fn(n, n, |r, c| m[(n - 1 - r, n - 1 - c)].conj());
    let residual = frobenius(&(reflected + m));
    let anti_symmetric = residual <= T::lit(1e-12) * norm;
    let phase = (n == 2).then(|| {
        let sys = resonance_decomposition(h);
        if sys.kind == ResonanceKind::Defective {
            PtPhase::ExceptionalPoint
        } else if sys.eigenvalues.iter().all(|z| Float::abs(z.re) <= T::lit(1e-12) * norm) {
            PtPhase::Broken
        } else {
            PtPhase::Symmetric
        }
    });
    AntiPtReport {
        residual,
        anti_symmetric,
        phase,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Two-atom chain on the infinite waveguide: `ε = ∓λ`, `f = ξ/√2`, `Γ = 1/(2κ)`.
    fn two_atom(kappa: f64, xi: f64) -> EffectiveHamiltonianMarkov<f64> {
        let f = real(xi / 2f64.sqrt());
        markovian_from_parts(vec![-1.0, 1.0], vec![f, f], 1.0 / (2.0 * kappa)).unwrap()
    }

    #[test]
    fn matrix_entries() {
        let h = two_atom(4.0, 2.0);
        let a = 4.0 / 16.0;
        assert!((h.matrix[(0, 0)] - cplx(-1.0, -a)).norm() < 1e-15);
        assert!((h.matrix[(1, 1)] - cplx(1.0, -a)).norm() < 1e-15);
        assert!((h.matrix[(0, 1)] - cplx(0.0, -a)).norm() < 1e-15);
        assert!(matches!(
            markovian_from_parts(vec![0.0], vec![real(1.0)], -1.0),
            Err(Error::NegativeGamma { .. })
        ));
    }

    #[test]
    fn exceptional_point() {
        let h = two_atom(4.0, 4.0);
        let s = resonance_decomposition(&h);
        assert_eq!(s.kind, ResonanceKind::Defective);
        let b = &s.jordan_blocks[0];
        assert!((b.eigenvalue - cplx(0.0, -1.0)).norm() < 1e-12);
        let v = &b.right_chain[0];
        let ratio = v[0] / v[1];
        assert!((ratio - cplx(0.0, -1.0)).norm() < 1e-10);
    }

    #[test]
    fn biorthonormal_and_vw() {
        let h = two_atom(4.0, 2.0);
        let s = resonance_decomposition(&h);
        assert_eq!(s.kind, ResonanceKind::Diagonalizable);
        for (i, v) in &s.right_states {
            for (j, u) in &s.left_states {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((u.dotc(v) - real(want)).norm() < 1e-10);
            }
        }
        for (i, p) in &s.normalization_products {
            let want = -real(1.0) / h.k_derivative(s.eigenvalues[*i]);
            assert!((p.unwrap() - want).norm() < 1e-8 * want.norm());
        }
    }

    #[test]
    fn defective_chain_relations() {
        let h = two_atom(4.0, 4.0);
        let s = resonance_decomposition(&h);
        let b = &s.jordan_blocks[0];
        let shifted = &h.matrix - CMat::identity(2, 2) * b.eigenvalue;
        assert!((&shifted * &b.right_chain[0]).norm() < 1e-8);
        assert!((&shifted * &b.right_chain[1] - &b.right_chain[0]).norm() < 1e-8);
    }
}
