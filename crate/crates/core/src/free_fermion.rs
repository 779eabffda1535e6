//! Real-space Gaussian-state machinery: lattice Hamiltonians from Bloch
//! functions, Heisenberg evolution of the correlation matrix, entanglement
//! spectra from the restricted correlation matrix, and open-boundary parent
//! spectra with zero-mode detection.
//!
//! Orbital layout: cell `j` holds orbitals `A = 2j` and `B = 2j + 1`,
//! `j = 0..L-1`.

use ndarray::{s, Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bloch::{brillouin_grid, BlochFunction, BlochVector3, QuenchProtocol};
use crate::error::CoreError;
use crate::Result;

/// Inert-mode threshold: ξ outside `[XI_TOL, 1 - XI_TOL]` never changes a
/// reported entanglement eigenvalue by more than its own magnitude.
pub const XI_TOL: f64 = 1e-12;

/// Boundary condition of a real-space chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Periodic,
    Open,
}

/// Dense 2L x 2L Hermitian one-body Hamiltonian on the two-orbital chain.
#[derive(Debug, Clone)]
pub struct LatticeHamiltonian {
    pub cells: usize,
    pub bc: BoundaryCondition,
    pub matrix: Array2<C64>,
}

/// One-body correlation matrix `C_ij = <c†_i c_j>`.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub cells: usize,
    pub matrix: Array2<C64>,
}

/// Correlation-restriction eigenvalues, entanglement energies, and the
/// largest many-body entanglement eigenvalues.
#[derive(Debug, Clone)]
pub struct EntanglementData {
    pub xi: Vec<f64>,
    pub eps: Vec<f64>,
    pub lambdas: Vec<f64>,
}

/// Sorted single-particle spectra of the open-boundary parent Hamiltonian on
/// a time grid.
#[derive(Debug, Clone)]
pub struct ParentSpectrumSeries {
    pub times: Vec<f64>,
    pub energies: Vec<Vec<f64>>,
}

impl ParentSpectrumSeries {
    pub fn zero_mode_count(&self, idx: usize, tol: f64) -> usize {
        self.energies[idx].iter().filter(|e| e.abs() < tol).count()
    }
}

/// 2x2 hopping blocks `B_h` such that `h(k) = B_0 + Σ_h (B_h e^{-ihk} + B_h† e^{ihk})`.
#[derive(Debug, Clone)]
pub struct HoppingBlocks {
    pub blocks: Vec<[[C64; 2]; 2]>,
}

fn herm_2x2_from_bloch(d: &BlochVector3) -> [[C64; 2]; 2] {
    d.hamiltonian()
}

fn block_scale(b: &[[C64; 2]; 2], s: C64) -> [[C64; 2]; 2] {
    [[b[0][0] * s, b[0][1] * s], [b[1][0] * s, b[1][1] * s]]
}

fn block_add(a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    [
        [a[0][0] + b[0][0], a[0][1] + b[0][1]],
        [a[1][0] + b[1][0], a[1][1] + b[1][1]],
    ]
}

/// Trigonometric projection of `k -> d(k)` onto harmonics `0..=max_order`.
///
/// The quadrature grid is exact for trigonometric polynomials well below its
/// Nyquist order; the returned residual is the max-norm reconstruction error
/// on the grid.
pub fn fourier_blocks(
    f: impl Fn(f64) -> BlochVector3,
    max_order: usize,
) -> (HoppingBlocks, f64) {
    let n = 256usize;
    let samples: Vec<(f64, BlochVector3)> = brillouin_grid(n).map(|k| (k, f(k))).collect();
    // a_h, b_h Fourier coefficients of each Cartesian component.
    let mut cos_c = vec![BlochVector3::ZERO; max_order + 1];
    let mut sin_c = vec![BlochVector3::ZERO; max_order + 1];
    for &(k, d) in &samples {
        for h in 0..=max_order {
            let (c, s) = ((h as f64 * k).cos(), (h as f64 * k).sin());
            let w = if h == 0 { 1.0 } else { 2.0 } / n as f64;
            cos_c[h] = cos_c[h].add(&d.scale(w * c));
            sin_c[h] = sin_c[h].add(&d.scale(w * s));
        }
    }
    let mut residual = 0.0f64;
    for &(k, d) in &samples {
        let mut r = BlochVector3::ZERO;
        for h in 0..=max_order {
            r = r.add(&cos_c[h].scale((h as f64 * k).cos()));
            r = r.add(&sin_c[h].scale((h as f64 * k).sin()));
        }
        residual = residual
            .max((r.x - d.x).abs())
            .max((r.y - d.y).abs())
            .max((r.z - d.z).abs());
    }
    // B_h = (A_h + i C_h) / 2 for h >= 1, B_0 = A_0.
    let mut blocks = Vec::with_capacity(max_order + 1);
    blocks.push(herm_2x2_from_bloch(&cos_c[0]));
    for h in 1..=max_order {
        let a = herm_2x2_from_bloch(&cos_c[h]);
        let c = herm_2x2_from_bloch(&sin_c[h]);
        blocks.push(block_add(
            &block_scale(&a, C64::new(0.5, 0.0)),
            &block_scale(&c, C64::new(0.0, 0.5)),
        ));
    }
    (HoppingBlocks { blocks }, residual)
}

/// Real-space chain Hamiltonian from a Bloch function with hopping range
/// at most two unit cells.
pub fn build_lattice(
    f: &BlochFunction,
    cells: usize,
    bc: BoundaryCondition,
) -> Result<LatticeHamiltonian> {
    if cells < 2 {
        return Err(CoreError::Config(format!("need L >= 2 cells, got {cells}")));
    }
    let (hoppings, residual) = fourier_blocks(|k| f.eval(k), 2);
    if residual > 1e-10 {
        return Err(CoreError::UnsupportedRange { max_order: 2, residual });
    }
    Ok(lattice_from_blocks(&hoppings, cells, bc))
}

/// Assembles the dense 2L x 2L matrix from hopping blocks.
pub fn lattice_from_blocks(
    hoppings: &HoppingBlocks,
    cells: usize,
    bc: BoundaryCondition,
) -> LatticeHamiltonian {
    let n = 2 * cells;
    let mut m = Array2::<C64>::zeros((n, n));
    for j in 0..cells {
        for (h, block) in hoppings.blocks.iter().enumerate() {
            let target = j + h;
            let jt = match bc {
                BoundaryCondition::Periodic => target % cells,
                BoundaryCondition::Open => {
                    if target >= cells {
                        continue;
                    }
                    target
                }
            };
            for a in 0..2 {
                for b in 0..2 {
                    let v = block[a][b];
                    if h == 0 {
                        m[[2 * j + a, 2 * j + b]] += v;
                    } else {
                        // H block at rows of cell j+h, cols of cell j is B_h.
                        m[[2 * jt + a, 2 * j + b]] += v;
                        m[[2 * j + b, 2 * jt + a]] += v.conj();
                    }
                }
            }
        }
    }
    LatticeHamiltonian { cells, bc, matrix: m }
}

impl LatticeHamiltonian {
    pub fn dim(&self) -> usize {
        2 * self.cells
    }

    /// Max-norm deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut err = 0.0f64;
        for i in 0..n {
            for j in i..n {
                err = err.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        err
    }

    /// Eigenvalues and eigenvectors, ascending.
    pub fn eigh(&self) -> Result<(Array1<f64>, Array2<C64>)> {
        self.matrix
            .eigh(UPLO::Lower)
            .map_err(|e| CoreError::Linalg(e.to_string()))
    }

    /// Eigenvalues only, ascending.
    pub fn eigvals(&self) -> Result<Vec<f64>> {
        use ndarray_linalg::EighInto;
        let (vals, _) = self
            .matrix
            .clone()
            .eigh_into(UPLO::Lower)
            .map_err(|e| CoreError::Linalg(e.to_string()))?;
        Ok(vals.to_vec())
    }
}

/// Ground-state correlation matrix: all negative-energy single-particle
/// states filled.
pub fn ground_correlation(h: &LatticeHamiltonian, allow_degenerate: bool) -> Result<CorrelationMatrix> {
    let (vals, vecs) = h.eigh()?;
    if !allow_degenerate {
        if let Some(e) = vals.iter().find(|e| e.abs() <= 1e-10) {
            return Err(CoreError::AmbiguousFilling { energy: *e });
        }
    }
    let n = h.dim();
    let mut c = Array2::<C64>::zeros((n, n));
    for (idx, &e) in vals.iter().enumerate() {
        if e < 0.0 {
            let phi = vecs.slice(s![.., idx]);
            for i in 0..n {
                for j in 0..n {
                    // C_ij = <c†_i c_j> = Σ_occ φ_i φ*_j.
                    c[[i, j]] += phi[i] * phi[j].conj();
                }
            }
        }
    }
    Ok(CorrelationMatrix { cells: h.cells, matrix: c })
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        2 * self.cells
    }

    pub fn particle_number(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[[i, i]].re).sum()
    }

    /// Max-norm of `C² - C`; zero for pure Gaussian states.
    pub fn purity_error(&self) -> f64 {
        let c2 = self.matrix.dot(&self.matrix);
        c2.iter()
            .zip(self.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Heisenberg evolution of the correlation matrix under the post-quench
/// one-body Hamiltonian: with `U = exp(-i h t)`, `C(t) = U* C U^T`.
pub fn evolve_correlation(
    c0: &CorrelationMatrix,
    h_post: &LatticeHamiltonian,
    t: f64,
) -> Result<CorrelationMatrix> {
    if c0.dim() != h_post.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "correlation {} vs Hamiltonian {}",
            c0.dim(),
            h_post.dim()
        )));
    }
    let (vals, vecs) = h_post.eigh()?;
    evolve_correlation_with_eig(c0, &vals, &vecs, t)
}

/// Same as [`evolve_correlation`] with a precomputed eigendecomposition of
/// the post-quench Hamiltonian, shared across time points.
pub fn evolve_correlation_with_eig(
    c0: &CorrelationMatrix,
    vals: &Array1<f64>,
    vecs: &Array2<C64>,
    t: f64,
) -> Result<CorrelationMatrix> {
    let n = c0.dim();
    // U = V e^{-iEt} V†; conj(U) = V* e^{+iEt} V^T.
    let phases = Array1::from_iter(vals.iter().map(|&e| C64::from_polar(1.0, -e * t)));
    let mut u = Array2::<C64>::zeros((n, n));
    for (col, &p) in phases.iter().enumerate() {
        let v = vecs.slice(s![.., col]);
        for row in 0..n {
            u[[row, col]] = v[row] * p;
        }
    }
    let u = u.dot(&vecs.t().mapv(|z| z.conj()));
    let u_conj = u.mapv(|z| z.conj());
    let ct = u_conj.dot(&c0.matrix).dot(&u.t());
    Ok(CorrelationMatrix { cells: c0.cells, matrix: ct })
}

/// Restriction of a translation-invariant parent state to the first `cut`
/// cells, built directly from momentum-space 2x2 projector blocks. Exact for
/// periodic chains; avoids the 2L x 2L matrices entirely.
pub fn momentum_correlation_restriction(
    q: &QuenchProtocol,
    cells: usize,
    t: f64,
    cut: usize,
) -> Result<CorrelationMatrix> {
    if cut == 0 || cut >= cells {
        return Err(CoreError::DimensionMismatch(format!(
            "cut {cut} outside 1..{cells}"
        )));
    }
    // C_{(jα)(j'β)} = (1/L) Σ_k e^{ik(j-j')} P_{αβ}(k,t) depends on j - j'.
    let deltas = cut as i64;
    let mut g: Vec<[[C64; 2]; 2]> = vec![[[C64::new(0.0, 0.0); 2]; 2]; (2 * deltas - 1) as usize];
    for k in brillouin_grid(cells) {
        let d = q.parent_bloch(k, t)?;
        let n = d.unit().ok_or(CoreError::GaplessParent { k, t })?;
        // Lower-band projector P = (1 - n·σ)/2.
        let p = [
            [
                C64::new(0.5 * (1.0 - n.z), 0.0),
                C64::new(-0.5 * n.x, 0.5 * n.y),
            ],
            [
                C64::new(-0.5 * n.x, -0.5 * n.y),
                C64::new(0.5 * (1.0 + n.z), 0.0),
            ],
        ];
        for (idx, gd) in g.iter_mut().enumerate() {
            let delta = idx as i64 - (deltas - 1);
            let w = C64::from_polar(1.0 / cells as f64, k * delta as f64);
            for a in 0..2 {
                for b in 0..2 {
                    gd[a][b] += w * p[a][b];
                }
            }
        }
    }
    let n = 2 * cut;
    let mut m = Array2::<C64>::zeros((n, n));
    for j in 0..cut {
        for jp in 0..cut {
            let gd = &g[(j as i64 - jp as i64 + deltas - 1) as usize];
            for a in 0..2 {
                for b in 0..2 {
                    m[[2 * j + a, 2 * jp + b]] = gd[a][b];
                }
            }
        }
    }
    Ok(CorrelationMatrix { cells: cut, matrix: m })
}

/// Entanglement data of the bipartition into the first `cut` cells.
///
/// Diagonalizes the restricted correlation matrix, maps its eigenvalues to
/// entanglement energies `ε = ln((1-ξ)/ξ)`, and enumerates the `n_lambda`
/// largest many-body eigenvalues best-first over the active modes.
pub fn entanglement_spectrum(
    c: &CorrelationMatrix,
    cut: usize,
    n_lambda: usize,
) -> Result<EntanglementData> {
    if cut == 0 || 2 * cut > c.dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "cut {cut} outside 1..{}",
            c.cells
        )));
    }
    let restricted = c.matrix.slice(s![..2 * cut, ..2 * cut]).to_owned();
    let (xi_raw, _) = restricted
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Linalg(e.to_string()))?;
    entanglement_from_restricted(&xi_raw.to_vec(), n_lambda)
}

/// Entanglement spectrum of an already-restricted correlation matrix.
pub fn entanglement_spectrum_restricted(
    c_restricted: &CorrelationMatrix,
    n_lambda: usize,
) -> Result<EntanglementData> {
    let (xi_raw, _) = c_restricted
        .matrix
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Linalg(e.to_string()))?;
    entanglement_from_restricted(&xi_raw.to_vec(), n_lambda)
}

fn entanglement_from_restricted(xi_raw: &[f64], n_lambda: usize) -> Result<EntanglementData> {
    let xi: Vec<f64> = xi_raw.iter().map(|&x| x.clamp(0.0, 1.0)).collect();
    let eps: Vec<f64> = xi
        .iter()
        .map(|&x| {
            if x <= 0.0 {
                f64::INFINITY
            } else if x >= 1.0 {
                f64::NEG_INFINITY
            } else {
                ((1.0 - x) / x).ln()
            }
        })
        .collect();
    let active: Vec<f64> = xi
        .iter()
        .copied()
        .filter(|&x| x > XI_TOL && x < 1.0 - XI_TOL)
        .collect();
    let lambdas = top_lambdas(&active, n_lambda);
    Ok(EntanglementData { xi, eps, lambdas })
}

/// Best-first enumeration of the largest products
/// `Π_m [1/2 + s_m (ξ_m - 1/2)]` over occupation signs `s_m = ±1`.
fn top_lambdas(active_xi: &[f64], n_lambda: usize) -> Vec<f64> {
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;

    if active_xi.is_empty() {
        return vec![1.0];
    }
    // Dominant configuration takes the larger factor per mode; flips are
    // ordered by their ratio <= 1.
    let base: f64 = active_xi.iter().map(|&x| x.max(1.0 - x)).product();
    let mut ratios: Vec<f64> = active_xi
        .iter()
        .map(|&x| x.min(1.0 - x) / x.max(1.0 - x))
        .collect();
    ratios.sort_by(|a, b| b.total_cmp(a));

    #[derive(PartialEq)]
    struct Node {
        value: f64,
        next: usize,
    }
    impl Eq for Node {}
    impl Ord for Node {
        fn cmp(&self, other: &Self) -> Ordering {
            self.value.total_cmp(&other.value)
        }
    }
    impl PartialOrd for Node {
        fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
            Some(self.cmp(other))
        }
    }

    let mut heap = BinaryHeap::new();
    heap.push(Node { value: base, next: 0 });
    let mut out = Vec::with_capacity(n_lambda);
    while out.len() < n_lambda {
        let Some(Node { value, next }) = heap.pop() else {
            break;
        };
        out.push(value);
        // Children: flip any mode at index >= next (keeps enumeration
        // canonical and complete).
        for i in next..ratios.len() {
            if ratios[i] > 0.0 {
                heap.push(Node { value: value * ratios[i], next: i + 1 });
            }
        }
    }
    out
}

/// Band-flattened parent Hamiltonian `Q = I - 2C`.
pub fn flattened_parent(c: &CorrelationMatrix) -> LatticeHamiltonian {
    let n = c.dim();
    let mut q = c.matrix.mapv(|z| -2.0 * z);
    for i in 0..n {
        q[[i, i]] += C64::new(1.0, 0.0);
    }
    LatticeHamiltonian {
        cells: c.cells,
        bc: BoundaryCondition::Open,
        matrix: q,
    }
}

/// Open-boundary parent spectra on a time grid. The parent Bloch vector is
/// projected on harmonics up to order two; a larger residual means the
/// parent has left the short-range regime and is rejected.
pub fn parent_obc_spectrum(
    q: &QuenchProtocol,
    cells: usize,
    times: &[f64],
) -> Result<ParentSpectrumSeries> {
    let energies = times
        .par_iter()
        .map(|&t| -> Result<Vec<f64>> {
            let h = parent_lattice(q, cells, t, BoundaryCondition::Open)?;
            h.eigvals()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParentSpectrumSeries { times: times.to_vec(), energies })
}

/// Real-space parent Hamiltonian at time `t` via numeric Fourier projection
/// of `d_P(k,t)` (harmonic order <= 2 enforced).
pub fn parent_lattice(
    q: &QuenchProtocol,
    cells: usize,
    t: f64,
    bc: BoundaryCondition,
) -> Result<LatticeHamiltonian> {
    let mut failure = None;
    let (hoppings, residual) = fourier_blocks(
        |k| match q.parent_bloch(k, t) {
            Ok(d) => d,
            Err(e) => {
                failure = Some(e);
                BlochVector3::ZERO
            }
        },
        2,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if residual > 1e-10 {
        return Err(CoreError::UnsupportedRange { max_order: 2, residual });
    }
    Ok(lattice_from_blocks(&hoppings, cells, bc))
}

/// Per-cell density profiles of near-zero-energy modes, with a localization
/// length fitted on the decaying tail.
#[derive(Debug, Clone)]
pub struct ZeroModeProfile {
    pub energy: f64,
    pub density: Vec<f64>,
    pub localization_length: Option<f64>,
}

pub fn zero_mode_profiles(h: &LatticeHamiltonian, tol: f64) -> Result<Vec<ZeroModeProfile>> {
    let (vals, vecs) = h.eigh()?;
    let mut out = Vec::new();
    for (idx, &e) in vals.iter().enumerate() {
        if e.abs() < tol {
            let phi = vecs.slice(s![.., idx]);
            let density: Vec<f64> = (0..h.cells)
                .map(|j| phi[2 * j].norm_sqr() + phi[2 * j + 1].norm_sqr())
                .collect();
            out.push(ZeroModeProfile {
                energy: e,
                density: density.clone(),
                localization_length: fit_localization_length(&density),
            });
        }
    }
    Ok(out)
}

/// Log-linear regression over the decaying tail away from the peak cell.
fn fit_localization_length(density: &[f64]) -> Option<f64> {
    let l = density.len();
    let peak = density
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))?
        .0;
    // Walk away from the nearer edge into the bulk.
    let towards_right = peak < l / 2;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut j = peak;
    loop {
        let next = if towards_right { j + 1 } else { j.checked_sub(1)? };
        if next >= l {
            break;
        }
        let v = density[next];
        if v < 1e-28 || xs.len() >= l / 2 {
            break;
        }
        xs.push(xs.len() as f64 + 1.0);
        ys.push(v.ln());
        j = next;
    }
    if xs.len() < 3 {
        return None;
    }
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if slope < 0.0 {
        // |φ|² ~ exp(-2 j / ξ_loc).
        Some(-2.0 / slope)
    } else {
        None
    }
}

/// Z2 invariant from the real lattice momenta:
/// `(-1)^ν = sign[d_P^(x)(0,t) d_P^(x)(π,t)]`.
pub fn z2_real_momentum_invariant(q: &QuenchProtocol, t: f64) -> Result<u8> {
    let d0 = q.parent_bloch(0.0, t)?;
    let dpi = q.parent_bloch(-std::f64::consts::PI, t)?;
    if d0.x == 0.0 {
        return Err(CoreError::UndefinedInvariant { k: 0.0 });
    }
    if dpi.x == 0.0 {
        return Err(CoreError::UndefinedInvariant { k: std::f64::consts::PI });
    }
    Ok(if d0.x * dpi.x > 0.0 { 0 } else { 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::parent_coefficients;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn fig1() -> QuenchProtocol {
        QuenchProtocol::new(
            BlochFunction::Constant { j: 1.0, beta: 1.0, alpha: 0.0 },
            BlochFunction::SshCircle { jx: 1.0 },
            "fig1",
        )
    }

    fn alpha_beta(alpha: f64, beta: f64) -> QuenchProtocol {
        QuenchProtocol::new(
            BlochFunction::Constant { j: 1.0, beta, alpha },
            BlochFunction::RiceMeleFlat { j: 1.0, alpha },
            "alpha_beta",
        )
    }

    #[test]
    fn ssh_circle_flat_spectrum() {
        let h = build_lattice(&BlochFunction::SshCircle { jx: 1.0 }, 8, BoundaryCondition::Periodic)
            .unwrap();
        assert!(h.hermiticity_error() < 1e-14);
        let vals = h.eigvals().unwrap();
        for (i, v) in vals.iter().enumerate() {
            let expected = if i < 8 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(*v, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn lattice_reproduces_bloch_at_momenta() {
        // Fourier transform back at each lattice momentum.
        let f = BlochFunction::RiceMeleFlat { j: 1.0, alpha: 0.5 };
        let cells = 8;
        let h = build_lattice(&f, cells, BoundaryCondition::Periodic).unwrap();
        for m in 0..cells {
            let k = -PI + 2.0 * PI * m as f64 / cells as f64;
            let mut hk = [[C64::new(0.0, 0.0); 2]; 2];
            // h(k)_{ab} = Σ_Δ e^{-ikΔ} H_{(j+Δ,a),(j,b)} at fixed j = 0.
            for jp in 0..cells {
                let mut delta = jp as i64;
                if delta > cells as i64 / 2 {
                    delta -= cells as i64;
                }
                let w = C64::from_polar(1.0, -k * delta as f64);
                for a in 0..2 {
                    for b in 0..2 {
                        hk[a][b] += w * h.matrix[[2 * jp + a, b]];
                    }
                }
            }
            let d = f.eval(k);
            let expect = d.hamiltonian();
            for a in 0..2 {
                for b in 0..2 {
                    assert_abs_diff_eq!(hk[a][b].re, expect[a][b].re, epsilon = 1e-12);
                    assert_abs_diff_eq!(hk[a][b].im, expect[a][b].im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn constant_bloch_is_onsite() {
        let f = BlochFunction::Constant { j: 1.0, beta: 0.5, alpha: 0.5 };
        let h = build_lattice(&f, 6, BoundaryCondition::Open).unwrap();
        for j in 0..6 {
            for jp in 0..6 {
                if j != jp {
                    for a in 0..2 {
                        for b in 0..2 {
                            assert!(h.matrix[[2 * j + a, 2 * jp + b]].norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_long_range_bloch() {
        let f = BlochFunction::Harmonics {
            cos_coeffs: vec![
                BlochVector3::ZERO,
                BlochVector3::ZERO,
                BlochVector3::ZERO,
                BlochVector3::new(1.0, 0.0, 0.0),
            ],
            sin_coeffs: vec![],
        };
        assert!(matches!(
            build_lattice(&f, 8, BoundaryCondition::Periodic),
            Err(CoreError::UnsupportedRange { .. })
        ));
    }

    #[test]
    fn ground_correlation_projector() {
        let h = build_lattice(&BlochFunction::SshCircle { jx: 1.0 }, 8, BoundaryCondition::Periodic)
            .unwrap();
        let c = ground_correlation(&h, false).unwrap();
        assert_abs_diff_eq!(c.particle_number(), 8.0, epsilon = 1e-10);
        assert!(c.purity_error() < 1e-12);
    }

    #[test]
    fn ground_correlation_onsite_sigma_x() {
        let f = BlochFunction::Constant { j: 1.0, beta: 1.0, alpha: 0.0 };
        let h = build_lattice(&f, 6, BoundaryCondition::Periodic).unwrap();
        let c = ground_correlation(&h, false).unwrap();
        assert_abs_diff_eq!(c.particle_number(), 6.0, epsilon = 1e-10);
        let (vals, _) = c.matrix.eigh(UPLO::Lower).unwrap();
        for v in vals {
            assert!(v.abs() < 1e-12 || (v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_filling_refused() {
        // Gapless SSH point: J cos k crosses zero... use Kitaev at U = 4J.
        let f = BlochFunction::Kitaev { j: 1.0, u: 4.0 };
        let h = build_lattice(&f, 8, BoundaryCondition::Periodic).unwrap();
        assert!(matches!(
            ground_correlation(&h, false),
            Err(CoreError::AmbiguousFilling { .. })
        ));
        assert!(ground_correlation(&h, true).is_ok());
    }

    #[test]
    fn evolution_preserves_spectrum() {
        let q = fig1();
        let h0 = build_lattice(&q.pre, 8, BoundaryCondition::Periodic).unwrap();
        let hp = build_lattice(&q.post, 8, BoundaryCondition::Periodic).unwrap();
        let c0 = ground_correlation(&h0, false).unwrap();
        let ct = evolve_correlation(&c0, &hp, 0.0).unwrap();
        let diff = (&ct.matrix - &c0.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-12);

        let ct = evolve_correlation(&c0, &hp, 0.9).unwrap();
        assert!(ct.purity_error() < 1e-10);
        assert_abs_diff_eq!(ct.particle_number(), 8.0, epsilon = 1e-10);
    }

    #[test]
    fn momentum_block_oracle() {
        // Real-space evolution agrees with the momentum restriction built
        // from the parent Bloch closed form.
        let q = fig1();
        let cells = 16;
        let h0 = build_lattice(&q.pre, cells, BoundaryCondition::Periodic).unwrap();
        let hp = build_lattice(&q.post, cells, BoundaryCondition::Periodic).unwrap();
        let c0 = ground_correlation(&h0, false).unwrap();
        for &t in &[0.0, 0.37, PI / 2.0, 2.2] {
            let ct = evolve_correlation(&c0, &hp, t).unwrap();
            let cm = momentum_correlation_restriction(&q, cells, t, cells / 2).unwrap();
            for i in 0..cells {
                for j in 0..cells {
                    let d = (ct.matrix[[i, j]] - cm.matrix[[i, j]]).norm();
                    assert!(d < 1e-10, "mismatch at ({i},{j}), t={t}: {d}");
                }
            }
        }
    }

    #[test]
    fn product_state_unentangled() {
        let f = BlochFunction::Constant { j: 1.0, beta: 0.5, alpha: 0.5 };
        let h = build_lattice(&f, 8, BoundaryCondition::Periodic).unwrap();
        let c = ground_correlation(&h, false).unwrap();
        let es = entanglement_spectrum(&c, 4, 4).unwrap();
        assert_abs_diff_eq!(es.lambdas[0], 1.0, epsilon = 1e-10);
        for &x in &es.xi {
            assert!(x < 1e-10 || x > 1.0 - 1e-10);
        }
    }

    #[test]
    fn fig1_crossing_sixteen_lambdas() {
        let q = fig1();
        let cells = 64;
        let c = momentum_correlation_restriction(&q, cells, PI / 2.0, cells / 2).unwrap();
        let es = entanglement_spectrum_restricted(&c, 20).unwrap();
        let halves = es
            .xi
            .iter()
            .filter(|&&x| (x - 0.5).abs() < 1e-8)
            .count();
        assert_eq!(halves, 4, "xi near 1/2: {:?}", es.xi);
        for m in 0..16 {
            assert_abs_diff_eq!(es.lambdas[m], 1.0 / 16.0, epsilon = 1e-8);
        }
        // Only 16 nonzero eigenvalues exist.
        assert!(es.lambdas.len() == 16 || es.lambdas[16] < 1e-12);
        let total: f64 = top_lambdas(
            &es.xi
                .iter()
                .copied()
                .filter(|&x| x > XI_TOL && x < 1.0 - XI_TOL)
                .collect::<Vec<_>>(),
            1 << 4,
        )
        .iter()
        .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn alpha_beta_crossing_four_lambdas() {
        let q = alpha_beta(0.5, 0.5);
        let t1 = (5.0f64 / 6.0).sqrt().asin() / 1.25f64.sqrt();
        let cells = 64;
        let c = momentum_correlation_restriction(&q, cells, t1, cells / 2).unwrap();
        let es = entanglement_spectrum_restricted(&c, 6).unwrap();
        let halves = es.xi.iter().filter(|&&x| (x - 0.5).abs() < 1e-6).count();
        assert_eq!(halves, 2, "xi near 1/2: {:?}", es.xi);
        for m in 0..4 {
            assert_abs_diff_eq!(es.lambdas[m], 0.25, epsilon = 1e-6);
        }
    }

    #[test]
    fn flattened_parent_square_identity() {
        let q = fig1();
        let h0 = build_lattice(&q.pre, 8, BoundaryCondition::Periodic).unwrap();
        let c = ground_correlation(&h0, false).unwrap();
        let qf = flattened_parent(&c);
        let q2 = qf.matrix.dot(&qf.matrix);
        for i in 0..qf.dim() {
            for j in 0..qf.dim() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(q2[[i, j]].re, expect, epsilon = 1e-10);
                assert_abs_diff_eq!(q2[[i, j]].im, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn flattened_parent_trivial_cases() {
        let c = CorrelationMatrix { cells: 2, matrix: Array2::zeros((4, 4)) };
        let q = flattened_parent(&c);
        for i in 0..4 {
            assert_abs_diff_eq!(q.matrix[[i, i]].re, 1.0, epsilon = 1e-15);
        }
        let c = CorrelationMatrix { cells: 2, matrix: Array2::eye(4) };
        let q = flattened_parent(&c);
        for i in 0..4 {
            assert_abs_diff_eq!(q.matrix[[i, i]].re, -1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn fig1_parent_obc_four_zero_modes() {
        let q = fig1();
        let series = parent_obc_spectrum(&q, 200, &[PI / 2.0]).unwrap();
        assert_eq!(series.zero_mode_count(0, 1e-8), 4);
    }

    #[test]
    fn alpha_beta_parent_obc_two_zero_modes() {
        let q = alpha_beta(0.5, 0.5);
        let t1 = (5.0f64 / 6.0).sqrt().asin() / 1.25f64.sqrt();
        let series = parent_obc_spectrum(&q, 200, &[t1]).unwrap();
        assert_eq!(series.zero_mode_count(0, 1e-6), 2);
    }

    #[test]
    fn parent_lattice_matches_coefficients() {
        let (alpha, beta, t) = (0.5, 0.5, 0.83);
        let q = alpha_beta(alpha, beta);
        let coeffs = parent_coefficients(alpha, beta, 1.0, t).unwrap();
        let via_parent = parent_lattice(&q, 12, t, BoundaryCondition::Open).unwrap();
        let via_coeffs = build_lattice(
            &coeffs.to_bloch_function(),
            12,
            BoundaryCondition::Open,
        )
        .unwrap();
        let diff = (&via_parent.matrix - &via_coeffs.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "max diff {diff}");
    }

    #[test]
    fn zero_mode_profiles_edge_localized() {
        let q = alpha_beta(0.5, 0.5);
        let t1 = (5.0f64 / 6.0).sqrt().asin() / 1.25f64.sqrt();
        let h = parent_lattice(&q, 200, t1, BoundaryCondition::Open).unwrap();
        let profiles = zero_mode_profiles(&h, 1e-6).unwrap();
        assert_eq!(profiles.len(), 2);
        // One mode peaked near each edge. Zero modes may hybridize across
        // the two edges; check the pair covers both.
        let mut edge_weight_left = 0.0;
        let mut edge_weight_right = 0.0;
        for p in &profiles {
            edge_weight_left += p.density[..10].iter().sum::<f64>();
            edge_weight_right += p.density[190..].iter().sum::<f64>();
        }
        assert!(edge_weight_left > 0.9, "left weight {edge_weight_left}");
        assert!(edge_weight_right > 0.9, "right weight {edge_weight_right}");
        for p in &profiles {
            let xi = p.localization_length.expect("exponential tail");
            assert!(xi > 0.0 && xi < 20.0, "ξ_loc = {xi}");
        }
    }

    #[test]
    fn z2_invariant_fig1_trivial() {
        let q = fig1();
        for &t in &[0.0, 0.4, PI / 2.0, 2.9] {
            assert_eq!(z2_real_momentum_invariant(&q, t).unwrap(), 0);
        }
    }

    #[test]
    fn z2_invariant_sign_product() {
        // Synthetic: pre-quench with opposite d_x signs at k = 0 and π.
        let q = QuenchProtocol::new(
            BlochFunction::SshCircle { jx: 1.0 },
            BlochFunction::SshCircle { jx: 1.0 },
            "ssh",
        );
        assert_eq!(z2_real_momentum_invariant(&q, 0.0).unwrap(), 1);
    }

    #[test]
    fn top_lambda_enumeration_matches_brute_force() {
        let xi = [0.5, 0.3, 0.9, 0.02, 0.77];
        let best = top_lambdas(&xi, 32);
        let mut brute = Vec::new();
        for mask in 0u32..32 {
            let mut p = 1.0;
            for (m, &x) in xi.iter().enumerate() {
                p *= if mask & (1 << m) != 0 { x } else { 1.0 - x };
            }
            brute.push(p);
        }
        brute.sort_by(|a, b| b.total_cmp(a));
        assert_eq!(best.len(), 32);
        for (a, b) in best.iter().zip(&brute) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-14);
        }
        let sum: f64 = best.iter().sum();
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
    }
}
