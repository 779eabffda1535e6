//! Exact diagonalization for the interacting two-orbital chain: Hubbard
//! Hamiltonians on a fixed-particle-number Fock basis, ground states and
//! Krylov time evolution, Loschmidt rates, many-body entanglement spectra,
//! the interacting-SSH ↔ Ising ↔ Kitaev mappings, and an analytic
//! Slater-determinant layer for the open-boundary overlap analysis.
//!
//! Orbital conventions match the free-fermion module: cell `j` carries
//! orbitals `A = 2j`, `B = 2j + 1`. A basis bitmask `n` with set bits
//! `i_1 < i_2 < … < i_N` denotes `c†_{i_1} c†_{i_2} … c†_{i_N} |0⟩`, i.e.
//! creation operators are applied in descending orbital index so that the
//! lowest index stands leftmost. With that ordering a left/right bipartition
//! of the chain factorizes without fermionic sign factors.

use std::collections::HashMap;
use std::sync::Arc;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Determinant, Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bloch::BlochFunction;
use crate::error::CoreError;
use crate::free_fermion::{build_lattice, BoundaryCondition, CorrelationMatrix, LatticeHamiltonian};
use crate::Result;

/// Refuse bases beyond this many states.
pub const BASIS_CAP: usize = 10_000_000;
/// Dense propagator (full eigendecomposition) below this dimension.
pub const DENSE_CAP: usize = 5_000;
/// Maximum Krylov subspace dimension per time step.
pub const KRYLOV_DIM: usize = 30;
/// Local truncation target per Krylov step.
pub const KRYLOV_TOL: f64 = 1e-10;

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Occupation-number basis at fixed particle number, ordered by bitmask.
#[derive(Debug)]
pub struct FockBasis {
    pub cells: usize,
    pub orbitals: usize,
    pub particles: usize,
    states: Vec<u32>,
}

impl FockBasis {
    /// Half filling (`N = L`) unless a particle count is given.
    pub fn new(cells: usize, particles: usize) -> Result<Arc<Self>> {
        let orbitals = 2 * cells;
        if orbitals > 24 {
            return Err(CoreError::Config(format!(
                "L = {cells} exceeds the 12-cell exact-diagonalization cap"
            )));
        }
        let count = binomial(orbitals as u64, particles as u64) as usize;
        if count > BASIS_CAP {
            return Err(CoreError::BasisOverflow { states: count, cap: BASIS_CAP });
        }
        if count == 0 {
            return Err(CoreError::Config(format!(
                "no states: {particles} particles in {orbitals} orbitals"
            )));
        }
        // Gosper's hack enumerates same-popcount bitmasks in increasing order.
        let mut states = Vec::with_capacity(count);
        if particles == 0 {
            states.push(0);
        } else {
            let mut v: u32 = (1u32 << particles) - 1;
            let limit: u32 = 1u32 << orbitals;
            while v < limit {
                states.push(v);
                let c = v & v.wrapping_neg();
                let r = v + c;
                if r >= limit || c == 0 {
                    break;
                }
                v = r | (((v ^ r) / c) >> 2);
            }
        }
        debug_assert_eq!(states.len(), count);
        Ok(Arc::new(FockBasis { cells, orbitals, particles, states }))
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: usize) -> u32 {
        self.states[idx]
    }

    pub fn index(&self, mask: u32) -> Option<usize> {
        self.states.binary_search(&mask).ok()
    }
}

/// Sign picked up by `c_j` or `c†_j` acting past the occupied orbitals
/// below `j`.
fn jw_sign(mask: u32, j: usize) -> f64 {
    if (mask & ((1u32 << j) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Sparse Hermitian many-body operator on a [`FockBasis`].
#[derive(Debug, Clone)]
pub struct ManyBodyOperator {
    pub basis: Arc<FockBasis>,
    /// `rows[r]` lists `(c, H_rc)`.
    rows: Vec<Vec<(u32, C64)>>,
}

impl ManyBodyOperator {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// y = H x.
    pub fn apply(&self, x: &Array1<C64>) -> Array1<C64> {
        let y: Vec<C64> = self
            .rows
            .par_iter()
            .map(|row| row.iter().map(|&(c, v)| v * x[c as usize]).sum())
            .collect();
        Array1::from_vec(y)
    }

    pub fn expectation(&self, x: &Array1<C64>) -> f64 {
        let hx = self.apply(x);
        x.iter().zip(hx.iter()).map(|(a, b)| (a.conj() * b).re).sum()
    }

    pub fn to_dense(&self) -> Array2<C64> {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                m[[r, c as usize]] += v;
            }
        }
        m
    }

    /// Max-norm deviation from Hermiticity over all stored entries.
    pub fn hermiticity_error(&self) -> f64 {
        let mut map: HashMap<(u32, u32), C64> = HashMap::new();
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                *map.entry((r as u32, c)).or_insert(C64::new(0.0, 0.0)) += v;
            }
        }
        let mut err = 0.0f64;
        for (&(r, c), &v) in &map {
            let vt = map.get(&(c, r)).copied().unwrap_or(C64::new(0.0, 0.0));
            err = err.max((v - vt.conj()).norm());
        }
        err
    }

    /// Upper bound on the spectral radius (Gershgorin).
    fn norm_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.iter().map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Second-quantized Hubbard Hamiltonian: the one-body part of
/// [`build_lattice`] plus `U Σ_j n_{j,A} n_{j,B}`.
pub fn build_hubbard(
    f: &BlochFunction,
    u: f64,
    cells: usize,
    bc: BoundaryCondition,
) -> Result<ManyBodyOperator> {
    let lattice = build_lattice(f, cells, bc)?;
    hubbard_from_lattice(&lattice, u)
}

/// Hubbard Hamiltonian from an explicit one-body matrix.
pub fn hubbard_from_lattice(lattice: &LatticeHamiltonian, u: f64) -> Result<ManyBodyOperator> {
    let cells = lattice.cells;
    let basis = FockBasis::new(cells, cells)?;
    let n_orb = 2 * cells;
    // Collect nonzero one-body terms once.
    let mut hops = Vec::new();
    for i in 0..n_orb {
        for j in 0..n_orb {
            let v = lattice.matrix[[i, j]];
            if v.norm() > 1e-15 {
                hops.push((i, j, v));
            }
        }
    }
    let rows: Vec<Vec<(u32, C64)>> = {
        let mut rows = vec![Vec::new(); basis.dim()];
        for (c, &mask) in basis.states.iter().enumerate() {
            // Σ_ij h_ij c†_i c_j.
            for &(i, j, v) in &hops {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let removed = mask & !(1u32 << j);
                if removed & (1 << i) != 0 {
                    continue;
                }
                let sign = jw_sign(mask, j) * jw_sign(removed, i);
                let new_mask = removed | (1 << i);
                let r = basis.index(new_mask).expect("number-conserving term");
                rows[r].push((c as u32, v * sign));
            }
            // U per doubly occupied cell.
            if u != 0.0 {
                let doubles = (0..cells)
                    .filter(|&j| mask & (3 << (2 * j)) == 3 << (2 * j))
                    .count();
                if doubles > 0 {
                    rows[c].push((c as u32, C64::new(u * doubles as f64, 0.0)));
                }
            }
        }
        rows
    };
    Ok(ManyBodyOperator { basis, rows })
}

/// Many-body state over a shared Fock basis.
#[derive(Debug, Clone)]
pub struct FockState {
    pub basis: Arc<FockBasis>,
    pub amplitudes: Array1<C64>,
}

impl FockState {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self.amplitudes.mapv_inplace(|z| z / n);
        }
        self
    }

    pub fn overlap(&self, other: &FockState) -> Result<C64> {
        if !Arc::ptr_eq(&self.basis, &other.basis) && self.basis.dim() != other.basis.dim() {
            return Err(CoreError::DimensionMismatch("different bases".into()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Single basis configuration.
    pub fn from_mask(basis: &Arc<FockBasis>, mask: u32) -> Result<Self> {
        let idx = basis
            .index(mask)
            .ok_or_else(|| CoreError::Config(format!("mask {mask:#x} not in basis")))?;
        let mut amp = Array1::zeros(basis.dim());
        amp[idx] = C64::new(1.0, 0.0);
        Ok(FockState { basis: Arc::clone(basis), amplitudes: amp })
    }

    /// Product state with one particle per cell in the spinor `(w_a, w_b)`.
    pub fn polarized_product(basis: &Arc<FockBasis>, w_a: C64, w_b: C64) -> Result<Self> {
        if basis.particles != basis.cells {
            return Err(CoreError::Config("product state needs one particle per cell".into()));
        }
        let norm = (w_a.norm_sqr() + w_b.norm_sqr()).sqrt();
        let (w_a, w_b) = (w_a / norm, w_b / norm);
        let mut amp = Array1::zeros(basis.dim());
        for (idx, &mask) in basis.states.iter().enumerate() {
            let mut coeff = C64::new(1.0, 0.0);
            let mut ok = true;
            for j in 0..basis.cells {
                let cell = (mask >> (2 * j)) & 3;
                coeff *= match cell {
                    1 => w_a,
                    2 => w_b,
                    _ => {
                        ok = false;
                        break;
                    }
                };
            }
            if ok {
                amp[idx] = coeff;
            }
        }
        Ok(FockState { basis: Arc::clone(basis), amplitudes: amp })
    }

    /// Two-point function `⟨c†_i c_j⟩` on all orbital pairs.
    pub fn correlation_matrix(&self) -> CorrelationMatrix {
        let n = self.basis.orbitals;
        let mut c = Array2::<C64>::zeros((n, n));
        for (idx, &mask) in self.basis.states.iter().enumerate() {
            let a = self.amplitudes[idx];
            if a.norm_sqr() < 1e-30 {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) == 0 {
                    continue;
                }
                let removed = mask & !(1u32 << j);
                let sj = jw_sign(mask, j);
                for i in 0..n {
                    if removed & (1 << i) != 0 {
                        if i == j {
                            // n_j contribution handled below via i == j branch.
                        }
                        continue;
                    }
                    let si = jw_sign(removed, i);
                    let new_mask = removed | (1 << i);
                    if let Some(r) = self.basis.index(new_mask) {
                        c[[i, j]] += self.amplitudes[r].conj() * a * (si * sj);
                    }
                }
            }
        }
        CorrelationMatrix { cells: self.basis.cells, matrix: c }
    }
}

/// Ground eigenspace: near-degenerate states within `1e-8` of the minimum.
#[derive(Debug, Clone)]
pub struct GroundMultiplet {
    pub energies: Vec<f64>,
    pub states: Vec<FockState>,
}

/// Lowest eigenvector(s). Dense below [`DENSE_CAP`], Lanczos above.
pub fn ground_state(h: &ManyBodyOperator, degeneracy_hint: usize) -> Result<GroundMultiplet> {
    let want = degeneracy_hint.max(1) + 1;
    let (vals, vecs) = if h.dim() <= DENSE_CAP {
        let (vals, vecs) = h
            .to_dense()
            .eigh(UPLO::Lower)
            .map_err(|e| CoreError::Linalg(e.to_string()))?;
        (vals.to_vec(), vecs)
    } else {
        lanczos_lowest(h, want + 2)?
    };
    let e0 = vals[0];
    let mut energies = Vec::new();
    let mut states = Vec::new();
    for (i, &e) in vals.iter().enumerate().take(want.max(2)) {
        if i == 0 || e - e0 < 1e-8 {
            energies.push(e);
            states.push(FockState {
                basis: Arc::clone(&h.basis),
                amplitudes: vecs.column(i).to_owned(),
            });
        }
    }
    Ok(GroundMultiplet { energies, states })
}

/// Lanczos with full reorthogonalization; returns the `n_lowest` Ritz pairs.
fn lanczos_lowest(h: &ManyBodyOperator, n_lowest: usize) -> Result<(Vec<f64>, Array2<C64>)> {
    let n = h.dim();
    let max_iter = 300.min(n);
    // Deterministic pseudo-random start vector.
    let mut v = Array1::from_iter((0..n).map(|i| {
        let x = (i as f64 * 0.754877666 + 0.1).fract() - 0.5;
        let y = (i as f64 * 0.569840291 + 0.3).fract() - 0.5;
        C64::new(x, y)
    }));
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.mapv_inplace(|z| z / nv);

    let mut basis: Vec<Array1<C64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut last_res = f64::INFINITY;
    for m in 0..max_iter {
        let mut w = h.apply(&basis[m]);
        let alpha: f64 = basis[m]
            .iter()
            .zip(w.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        alphas.push(alpha);
        // Full reorthogonalization, twice for stability.
        for _ in 0..2 {
            for b in &basis {
                let ov: C64 = b.iter().zip(w.iter()).map(|(a, c)| a.conj() * c).sum();
                for (wi, bi) in w.iter_mut().zip(b.iter()) {
                    *wi -= ov * bi;
                }
            }
        }
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Check convergence of the lowest Ritz values periodically.
        if m + 1 >= n_lowest && (beta < 1e-13 || m % 10 == 9 || m + 1 == max_iter) {
            let (tvals, tvecs) = tridiag_eigh(&alphas, &betas)?;
            last_res = (0..n_lowest.min(tvals.len()))
                .map(|j| (beta * tvecs[[m, j]]).abs())
                .fold(0.0, f64::max);
            if last_res < 1e-10 || beta < 1e-13 {
                let mut vecs = Array2::zeros((n, n_lowest.min(tvals.len())));
                for j in 0..n_lowest.min(tvals.len()) {
                    for (i, b) in basis.iter().enumerate() {
                        let c = C64::new(tvecs[[i, j]], 0.0);
                        for r in 0..n {
                            vecs[[r, j]] += c * b[r];
                        }
                    }
                }
                return Ok((tvals[..n_lowest.min(tvals.len())].to_vec(), vecs));
            }
        }
        if beta < 1e-13 {
            break;
        }
        betas.push(beta);
        w.mapv_inplace(|z| z / beta);
        basis.push(w);
    }
    Err(CoreError::NoConvergence { iterations: max_iter, residual: last_res })
}

fn tridiag_eigh(alphas: &[f64], betas: &[f64]) -> Result<(Vec<f64>, Array2<f64>)> {
    let m = alphas.len();
    let mut t = Array2::<f64>::zeros((m, m));
    for i in 0..m {
        t[[i, i]] = alphas[i];
        if i + 1 < m {
            t[[i, i + 1]] = betas[i];
            t[[i + 1, i]] = betas[i];
        }
    }
    let (vals, vecs) = t
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Linalg(e.to_string()))?;
    Ok((vals.to_vec(), vecs))
}

/// Reusable propagator `exp(-iHt)`: dense eigendecomposition for small
/// bases, stepped Lanczos-Krylov otherwise.
pub struct Evolver<'a> {
    op: &'a ManyBodyOperator,
    dense: Option<(Array1<f64>, Array2<C64>)>,
    norm_bound: f64,
}

impl<'a> Evolver<'a> {
    pub fn new(op: &'a ManyBodyOperator) -> Result<Self> {
        let dense = if op.dim() <= DENSE_CAP {
            let (vals, vecs) = op
                .to_dense()
                .eigh(UPLO::Lower)
                .map_err(|e| CoreError::Linalg(e.to_string()))?;
            Some((vals, vecs))
        } else {
            None
        };
        Ok(Evolver { op, dense, norm_bound: op.norm_bound() })
    }

    pub fn apply(&self, psi: &FockState, t: f64) -> Result<FockState> {
        if psi.basis.dim() != self.op.dim() {
            return Err(CoreError::DimensionMismatch("state/operator basis".into()));
        }
        let amp = match &self.dense {
            Some((vals, vecs)) => {
                let proj = vecs.t().mapv(|z| z.conj()).dot(&psi.amplitudes);
                let phased = Array1::from_iter(
                    proj.iter()
                        .zip(vals.iter())
                        .map(|(&c, &e)| c * C64::from_polar(1.0, -e * t)),
                );
                vecs.dot(&phased)
            }
            None => self.krylov_apply(&psi.amplitudes, t)?,
        };
        Ok(FockState { basis: Arc::clone(&psi.basis), amplitudes: amp })
    }

    fn krylov_apply(&self, v: &Array1<C64>, t: f64) -> Result<Array1<C64>> {
        let mut cur = v.clone();
        let mut remaining = t;
        // Aim for ~KRYLOV_DIM-accurate exponentials: |H| dt ≲ 10.
        let mut dt = if self.norm_bound > 0.0 {
            (10.0 / self.norm_bound).min(remaining.abs().max(1e-300))
        } else {
            remaining.abs().max(1e-300)
        } * remaining.signum();
        if t == 0.0 {
            return Ok(cur);
        }
        let mut guard = 0usize;
        while remaining.abs() > 1e-15 {
            guard += 1;
            if guard > 100_000 {
                return Err(CoreError::NoConvergence { iterations: guard, residual: remaining.abs() });
            }
            let step = if dt.abs() > remaining.abs() { remaining } else { dt };
            match self.krylov_step(&cur, step) {
                Ok(next) => {
                    cur = next;
                    remaining -= step;
                }
                Err(_) => {
                    dt *= 0.5;
                    if dt.abs() < 1e-12 {
                        return Err(CoreError::NoConvergence { iterations: guard, residual: dt.abs() });
                    }
                }
            }
        }
        Ok(cur)
    }

    /// One Lanczos-Krylov step; errors if the truncation estimate exceeds
    /// [`KRYLOV_TOL`] at the maximum subspace dimension.
    fn krylov_step(&self, v: &Array1<C64>, dt: f64) -> Result<Array1<C64>> {
        let n = v.len();
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let mut basis = vec![v.mapv(|z| z / vnorm)];
        let mut alphas = Vec::new();
        let mut betas = Vec::new();
        let mut happy = false;
        for m in 0..KRYLOV_DIM.min(n) {
            let mut w = self.op.apply(&basis[m]);
            let alpha: f64 = basis[m]
                .iter()
                .zip(w.iter())
                .map(|(a, b)| (a.conj() * b).re)
                .sum();
            alphas.push(alpha);
            for b in &basis {
                let ov: C64 = b.iter().zip(w.iter()).map(|(a, c)| a.conj() * c).sum();
                for (wi, bi) in w.iter_mut().zip(b.iter()) {
                    *wi -= ov * bi;
                }
            }
            let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if beta < 1e-13 {
                happy = true;
                break;
            }
            betas.push(beta);
            w.mapv_inplace(|z| z / beta);
            basis.push(w);
        }
        let m = alphas.len();
        let (tvals, tvecs) = tridiag_eigh(&alphas, &betas[..m - 1.min(betas.len())])?;
        // coeffs = e^{-iT dt} e1.
        let mut coeffs = vec![C64::new(0.0, 0.0); m];
        for j in 0..m {
            let phase = C64::from_polar(1.0, -tvals[j] * dt);
            for (i, c) in coeffs.iter_mut().enumerate() {
                *c += C64::new(tvecs[[i, j]] * tvecs[[0, j]], 0.0) * phase;
            }
        }
        if !happy {
            let err = betas.last().copied().unwrap_or(0.0) * coeffs[m - 1].norm() * dt.abs();
            if err > KRYLOV_TOL {
                return Err(CoreError::NoConvergence { iterations: m, residual: err });
            }
        }
        let mut out = Array1::<C64>::zeros(n);
        for (i, b) in basis.iter().take(m).enumerate() {
            let c = coeffs[i] * vnorm;
            for r in 0..n {
                out[r] += c * b[r];
            }
        }
        Ok(out)
    }
}

/// Convenience single-shot evolution `e^{-iHt} |psi⟩`.
pub fn evolve_state(psi: &FockState, h: &ManyBodyOperator, t: f64) -> Result<FockState> {
    Evolver::new(h)?.apply(psi, t)
}

/// Rate `f(t) = -(1/L) ln |⟨ψ0|ψ(t)⟩|²` per unit cell. The flag marks a
/// saturated logarithm (overlap below 1e-300).
pub fn loschmidt_rate(psi0: &FockState, psit: &FockState, cells: usize) -> Result<(f64, bool)> {
    let ov = psi0.overlap(psit)?;
    let p = ov.norm_sqr();
    if p < 1e-300 {
        Ok((-(1e-300f64).ln() / cells as f64, true))
    } else {
        Ok((-p.ln() / cells as f64, false))
    }
}

/// Squared Schmidt coefficients for the cut after `cut` cells, descending.
///
/// The amplitude tensor is block diagonal in the left particle number; each
/// block is decomposed by SVD and the singular values merged.
pub fn many_body_es(psi: &FockState, cut: usize, n_lambda: usize) -> Result<Vec<f64>> {
    let cells = psi.basis.cells;
    if cut == 0 || cut >= cells {
        return Err(CoreError::DimensionMismatch(format!("cut {cut} outside 1..{cells}")));
    }
    let lbits = 2 * cut;
    let lmask: u32 = (1 << lbits) - 1;
    // sector -> (left-mask index map, right-mask index map, entries).
    type Sector = (HashMap<u32, usize>, HashMap<u32, usize>, Vec<(usize, usize, C64)>);
    let mut sectors: HashMap<u32, Sector> = HashMap::new();
    for (idx, &mask) in psi.basis.states.iter().enumerate() {
        let a = psi.amplitudes[idx];
        if a.norm_sqr() < 1e-32 {
            continue;
        }
        let left = mask & lmask;
        let right = mask >> lbits;
        let nl = left.count_ones();
        let (lmap, rmap, entries) = sectors.entry(nl).or_default();
        let li = *lmap.entry(left).or_insert_with(|| lmap.len());
        let ri = *rmap.entry(right).or_insert_with(|| rmap.len());
        entries.push((li, ri, a));
    }
    let mut lambdas: Vec<f64> = Vec::new();
    for (_, (lmap, rmap, entries)) in sectors {
        let mut m = Array2::<C64>::zeros((lmap.len(), rmap.len()));
        for (li, ri, a) in entries {
            m[[li, ri]] = a;
        }
        let (_, s, _) = m
            .svd(false, false)
            .map_err(|e| CoreError::Linalg(e.to_string()))?;
        lambdas.extend(s.iter().map(|&x| x * x));
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    lambdas.truncate(n_lambda.max(lambdas.len().min(n_lambda)));
    Ok(lambdas)
}

/// Sum of all squared Schmidt coefficients (should be the state norm²).
pub fn schmidt_norm(psi: &FockState, cut: usize) -> Result<f64> {
    Ok(many_body_es(psi, cut, usize::MAX)?.iter().sum())
}

/// Transverse-field Ising parameters equivalent to the interacting SSH
/// chain at `J' = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingParameters {
    pub field: f64,
    pub coupling: f64,
    /// Coupling exceeds field: ordered (antiferromagnetic ↔ trivial SSH)
    /// side of the transition at `U_c = 4J`.
    pub ordered: bool,
}

pub fn map_to_ising(j: f64, j_prime: f64, u: f64) -> Result<IsingParameters> {
    if j_prime != 0.0 {
        return Err(CoreError::MappingUndefined);
    }
    let coupling = u / 4.0;
    Ok(IsingParameters { field: j, coupling, ordered: coupling.abs() > j.abs() })
}

pub fn map_to_kitaev(j: f64, j_prime: f64, u: f64) -> Result<BlochFunction> {
    if j_prime != 0.0 {
        return Err(CoreError::MappingUndefined);
    }
    Ok(BlochFunction::Kitaev { j, u })
}

/// Slater determinant on 2L orbitals: columns are occupied orbitals.
#[derive(Debug, Clone)]
pub struct SlaterState {
    pub cells: usize,
    pub orbitals: Array2<C64>,
}

impl SlaterState {
    pub fn new(cells: usize, orbitals: Array2<C64>) -> Result<Self> {
        if orbitals.nrows() != 2 * cells {
            return Err(CoreError::DimensionMismatch(format!(
                "{} rows for {} cells",
                orbitals.nrows(),
                cells
            )));
        }
        let s = SlaterState { cells, orbitals };
        let err = s.orthonormality_error();
        if err > 1e-12 {
            return Err(CoreError::Config(format!("non-orthonormal columns ({err:.2e})")));
        }
        Ok(s)
    }

    pub fn particles(&self) -> usize {
        self.orbitals.ncols()
    }

    pub fn orthonormality_error(&self) -> f64 {
        let g = self.orbitals.t().mapv(|z| z.conj()).dot(&self.orbitals);
        let mut err = 0.0f64;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                let expect = if i == j { 1.0 } else { 0.0 };
                err = err.max((g[[i, j]] - C64::new(expect, 0.0)).norm());
            }
        }
        err
    }

    /// All-A product `|Ψ_A⟩ = Π_j a†_j |0⟩`.
    pub fn psi_a(cells: usize) -> Self {
        let mut m = Array2::zeros((2 * cells, cells));
        for j in 0..cells {
            m[[2 * j, j]] = C64::new(1.0, 0.0);
        }
        SlaterState { cells, orbitals: m }
    }

    /// All-B product `|Ψ_B⟩ = Π_j b†_j |0⟩`.
    pub fn psi_b(cells: usize) -> Self {
        let mut m = Array2::zeros((2 * cells, cells));
        for j in 0..cells {
            m[[2 * j + 1, j]] = C64::new(1.0, 0.0);
        }
        SlaterState { cells, orbitals: m }
    }

    /// Evolves every orbital with `exp(-i h t)`.
    pub fn evolve(&self, h: &LatticeHamiltonian, t: f64) -> Result<Self> {
        if h.dim() != 2 * self.cells {
            return Err(CoreError::DimensionMismatch("lattice/Slater size".into()));
        }
        let (vals, vecs) = h.eigh()?;
        let proj = vecs.t().mapv(|z| z.conj()).dot(&self.orbitals);
        let mut phased = proj;
        for (row, &e) in vals.iter().enumerate() {
            let p = C64::from_polar(1.0, -e * t);
            for c in 0..phased.ncols() {
                phased[[row, c]] *= p;
            }
        }
        Ok(SlaterState { cells: self.cells, orbitals: vecs.dot(&phased) })
    }

    /// Embeds the determinant in a Fock basis: amplitude on a bitmask is the
    /// determinant of the occupied-row submatrix.
    pub fn embed(&self, basis: &Arc<FockBasis>) -> Result<FockState> {
        let n = self.particles();
        if basis.particles != n || basis.orbitals != 2 * self.cells {
            return Err(CoreError::ParticleNumberMismatch {
                left: basis.particles,
                right: n,
            });
        }
        let mut amp = Array1::zeros(basis.dim());
        for (idx, &mask) in basis.states.iter().enumerate() {
            let mut sub = Array2::<C64>::zeros((n, n));
            let mut r = 0;
            for orb in 0..basis.orbitals {
                if mask & (1 << orb) != 0 {
                    for c in 0..n {
                        sub[[r, c]] = self.orbitals[[orb, c]];
                    }
                    r += 1;
                }
            }
            amp[idx] = sub.det().map_err(|e| CoreError::Linalg(e.to_string()))?;
        }
        Ok(FockState { basis: Arc::clone(basis), amplitudes: amp })
    }
}

/// `⟨φ|ψ⟩ = det(Φ† Ψ)` for equal particle number.
pub fn slater_overlap(phi: &SlaterState, psi: &SlaterState) -> Result<C64> {
    if phi.particles() != psi.particles() {
        return Err(CoreError::ParticleNumberMismatch {
            left: phi.particles(),
            right: psi.particles(),
        });
    }
    if phi.orbitals.nrows() != psi.orbitals.nrows() {
        return Err(CoreError::DimensionMismatch("orbital space".into()));
    }
    let g = phi.orbitals.t().mapv(|z| z.conj()).dot(&psi.orbitals);
    g.det().map_err(|e| CoreError::Linalg(e.to_string()))
}

/// Overlaps `⟨Ψ_±|Ψ_±(t)⟩` of the cat states `(|Ψ_A⟩ ± |Ψ_B⟩)/√2` evolved
/// under the pure-J SSH chain.
pub fn cat_state_overlaps(cells: usize, bc: BoundaryCondition, t: f64) -> Result<(C64, C64)> {
    let h = build_lattice(&BlochFunction::SshCircle { jx: 1.0 }, cells, bc)?;
    let a = SlaterState::psi_a(cells);
    let b = SlaterState::psi_b(cells);
    let at = a.evolve(&h, t)?;
    let bt = b.evolve(&h, t)?;
    let aa = slater_overlap(&a, &at)?;
    let bb = slater_overlap(&b, &bt)?;
    let ab = slater_overlap(&a, &bt)?;
    let ba = slater_overlap(&b, &at)?;
    let plus = (aa + bb + ab + ba) * 0.5;
    let minus = (aa + bb - ab - ba) * 0.5;
    Ok((plus, minus))
}

/// Bond eigenstates of the pure-J SSH chain and the bare orbitals; cells are
/// 1-indexed to match the boundary statements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BondKet {
    /// `w†_{j,±}|0⟩ = (|j+1,A⟩ ± |j,B⟩)/√2`, `j = 1..L-1`.
    Plus(usize),
    Minus(usize),
    OrbitalA(usize),
    OrbitalB(usize),
}

/// Single-particle flavor at a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    A,
    B,
}

/// Exact evolution of `|j,A⟩` or `|j,B⟩` under the pure-J SSH chain with
/// open boundaries, as a bond-state expansion. `|1,A⟩` and `|L,B⟩` are
/// stationary.
pub fn bond_basis_evolution(
    j: usize,
    flavor: Flavor,
    t: f64,
    cells: usize,
) -> Result<Vec<(BondKet, C64)>> {
    if j == 0 || j > cells {
        return Err(CoreError::Config(format!("cell {j} outside 1..={cells}")));
    }
    let half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let em = C64::from_polar(1.0, -t);
    let ep = C64::from_polar(1.0, t);
    Ok(match flavor {
        Flavor::A if j == 1 => vec![(BondKet::OrbitalA(1), C64::new(1.0, 0.0))],
        // a†_j = (w†_{j-1,+} + w†_{j-1,-})/√2.
        Flavor::A => vec![
            (BondKet::Plus(j - 1), em * half),
            (BondKet::Minus(j - 1), ep * half),
        ],
        Flavor::B if j == cells => vec![(BondKet::OrbitalB(cells), C64::new(1.0, 0.0))],
        // b†_j = (w†_{j,+} - w†_{j,-})/√2.
        Flavor::B => vec![
            (BondKet::Plus(j), em * half),
            (BondKet::Minus(j), ep * half),
        ],
    })
}

/// Rewrites a bond expansion in the bare orbital basis.
pub fn bond_to_orbitals(expansion: &[(BondKet, C64)]) -> Vec<(Flavor, usize, C64)> {
    let half = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut acc: HashMap<(u8, usize), C64> = HashMap::new();
    for &(ket, c) in expansion {
        match ket {
            BondKet::Plus(j) => {
                *acc.entry((0, j + 1)).or_default() += c * half;
                *acc.entry((1, j)).or_default() += c * half;
            }
            BondKet::Minus(j) => {
                *acc.entry((0, j + 1)).or_default() += c * half;
                *acc.entry((1, j)).or_default() -= c * half;
            }
            BondKet::OrbitalA(j) => *acc.entry((0, j)).or_default() += c,
            BondKet::OrbitalB(j) => *acc.entry((1, j)).or_default() += c,
        }
    }
    let mut out: Vec<(Flavor, usize, C64)> = acc
        .into_iter()
        .filter(|(_, c)| c.norm() > 1e-14)
        .map(|((f, j), c)| (if f == 0 { Flavor::A } else { Flavor::B }, j, c))
        .collect();
    out.sort_by_key(|&(f, j, _)| (j, matches!(f, Flavor::B)));
    out
}
