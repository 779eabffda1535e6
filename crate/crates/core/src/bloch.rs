//! Two-band quench protocols and the exact parent-Hamiltonian Bloch vector.
//!
//! A two-band Bloch Hamiltonian is `h(k) = d(k)·σ` with `d(k)` a real
//! 3-vector. After a sudden quench from `d(k)` to `d'(k)` the time-evolved
//! state is the ground state of a parent Hamiltonian whose Bloch vector is
//!
//! ```text
//! d_P(k,t) = d_par(k) + cos[2 d'(k) t] d_perp(k) + sin[2 d'(k) t] d_o(k)
//! ```
//!
//! with `d_par` the projection of `d` on `d'`, `d_perp = d - d_par` and
//! `d_o = -(d × d') / |d'|`. All energies are in units of J, times in 1/J.

use num_complex::Complex64 as C64;

use crate::error::CoreError;
use crate::Result;

/// Largest harmonic order accepted for user-supplied Bloch functions. The
/// catalog protocols need at most order 2.
pub const MAX_HARMONIC_ORDER: usize = 8;

/// Real 3-vector defining a two-band Bloch Hamiltonian `h(k) = d·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector3 {
    pub const ZERO: Self = Self { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Self) -> Self {
        Self {
            x: self.y * other.z - self.z * other.y,
            y: self.z * other.x - self.x * other.z,
            z: self.x * other.y - self.y * other.x,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    /// Unit vector along `self`, or `None` for the zero vector.
    pub fn unit(&self) -> Option<Self> {
        let n = self.norm();
        if n > 0.0 {
            Some(self.scale(1.0 / n))
        } else {
            None
        }
    }

    /// The 2x2 Bloch Hamiltonian `d·σ` as row-major entries
    /// `[[z, x-iy], [x+iy, -z]]`.
    pub fn hamiltonian(&self) -> [[C64; 2]; 2] {
        [
            [C64::new(self.z, 0.0), C64::new(self.x, -self.y)],
            [C64::new(self.x, self.y), C64::new(-self.z, 0.0)],
        ]
    }
}

/// Named parametrized map from momentum to Bloch vector.
#[derive(Debug, Clone, PartialEq)]
pub enum BlochFunction {
    /// k-independent `J(β, 0, α)`.
    Constant { j: f64, beta: f64, alpha: f64 },
    /// SSH circle `J_x (cos k, sin k, 0)`.
    SshCircle { jx: f64 },
    /// Flat-band Rice-Mele `J (cos k, sin k, α)`.
    RiceMeleFlat { j: f64, alpha: f64 },
    /// Dispersive variant `J (δ + cos k, sin k, α)`.
    Dispersive { j: f64, alpha: f64, delta: f64 },
    /// Kitaev chain image of the transverse-field Ising chain,
    /// `(0, -U/2 sin k, 2J - U/2 cos k)`.
    Kitaev { j: f64, u: f64 },
    /// Trigonometric polynomial `d(k) = Σ_h (a_h cos hk + b_h sin hk)`,
    /// `h = 0..=H` with `H <= MAX_HARMONIC_ORDER`. `sin_coeffs[0]` is unused.
    Harmonics {
        cos_coeffs: Vec<BlochVector3>,
        sin_coeffs: Vec<BlochVector3>,
    },
}

impl BlochFunction {
    /// Evaluates `d(k)` for the named family.
    pub fn eval(&self, k: f64) -> BlochVector3 {
        match self {
            Self::Constant { j, beta, alpha } => BlochVector3::new(j * beta, 0.0, j * alpha),
            Self::SshCircle { jx } => BlochVector3::new(jx * k.cos(), jx * k.sin(), 0.0),
            Self::RiceMeleFlat { j, alpha } => {
                BlochVector3::new(j * k.cos(), j * k.sin(), j * alpha)
            }
            Self::Dispersive { j, alpha, delta } => {
                BlochVector3::new(j * (delta + k.cos()), j * k.sin(), j * alpha)
            }
            Self::Kitaev { j, u } => {
                BlochVector3::new(0.0, -0.5 * u * k.sin(), 2.0 * j - 0.5 * u * k.cos())
            }
            Self::Harmonics { cos_coeffs, sin_coeffs } => {
                let mut d = BlochVector3::ZERO;
                for (h, a) in cos_coeffs.iter().enumerate() {
                    d = d.add(&a.scale((h as f64 * k).cos()));
                }
                for (h, b) in sin_coeffs.iter().enumerate().skip(1) {
                    d = d.add(&b.scale((h as f64 * k).sin()));
                }
                d
            }
        }
    }

    /// Checks the harmonic-order cap for user-supplied trigonometric lists.
    pub fn validate(&self) -> Result<()> {
        if let Self::Harmonics { cos_coeffs, sin_coeffs } = self {
            let order = cos_coeffs.len().max(sin_coeffs.len()).saturating_sub(1);
            if order > MAX_HARMONIC_ORDER {
                return Err(CoreError::Config(format!(
                    "harmonic order {order} exceeds cap {MAX_HARMONIC_ORDER}"
                )));
            }
        }
        Ok(())
    }

    /// Smallest `|d(k)|` over the uniform grid `k_n = -π + 2πn/n_k`.
    pub fn min_norm_on_grid(&self, n_k: usize) -> f64 {
        brillouin_grid(n_k)
            .map(|k| self.eval(k).norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Uniform Brillouin-zone grid `k_n = -π + 2πn/n_k`, end point π excluded.
pub fn brillouin_grid(n_k: usize) -> impl Iterator<Item = f64> {
    let step = 2.0 * std::f64::consts::PI / n_k as f64;
    (0..n_k).map(move |n| -std::f64::consts::PI + n as f64 * step)
}

/// Pre- and post-quench Bloch functions sharing the convention k ∈ [-π, π).
#[derive(Debug, Clone, PartialEq)]
pub struct QuenchProtocol {
    pub pre: BlochFunction,
    pub post: BlochFunction,
    pub label: String,
}

/// Decomposition of the pre-quench vector relative to the post-quench one:
/// `d_par ∥ d'`, `d_perp = d - d_par`, `d_o = -(d × d')/|d'|`.
pub fn decompose(
    d: &BlochVector3,
    dp: &BlochVector3,
) -> Result<(BlochVector3, BlochVector3, BlochVector3)> {
    let dp_norm = dp.norm();
    if dp_norm <= 0.0 {
        return Err(CoreError::GaplessPostQuench { k: f64::NAN });
    }
    let d_par = dp.scale(d.dot(dp) / (dp_norm * dp_norm));
    let d_perp = d.sub(&d_par);
    let d_o = d.cross(dp).scale(-1.0 / dp_norm);
    Ok((d_par, d_perp, d_o))
}

impl QuenchProtocol {
    pub fn new(pre: BlochFunction, post: BlochFunction, label: impl Into<String>) -> Self {
        Self { pre, post, label: label.into() }
    }

    /// Swapped pre/post, used for direction-symmetry checks.
    pub fn reversed(&self) -> Self {
        Self {
            pre: self.post.clone(),
            post: self.pre.clone(),
            label: format!("{} (reversed)", self.label),
        }
    }

    /// Parent Bloch vector `d_P(k,t)`; conserves `|d(k)|` and reduces to
    /// `d(k)` at `t = 0`.
    pub fn parent_bloch(&self, k: f64, t: f64) -> Result<BlochVector3> {
        let d = self.pre.eval(k);
        let dp = self.post.eval(k);
        if dp.norm() <= 0.0 {
            return Err(CoreError::GaplessPostQuench { k });
        }
        let (d_par, d_perp, d_o) = decompose(&d, &dp)?;
        let phase = 2.0 * dp.norm() * t;
        Ok(d_par
            .add(&d_perp.scale(phase.cos()))
            .add(&d_o.scale(phase.sin())))
    }

    /// Time derivative of the parent Bloch vector, available in closed form
    /// from the decomposition.
    pub fn parent_bloch_dt(&self, k: f64, t: f64) -> Result<BlochVector3> {
        let d = self.pre.eval(k);
        let dp = self.post.eval(k);
        if dp.norm() <= 0.0 {
            return Err(CoreError::GaplessPostQuench { k });
        }
        let (_, d_perp, d_o) = decompose(&d, &dp)?;
        let w = 2.0 * dp.norm();
        let phase = w * t;
        Ok(d_perp
            .scale(-w * phase.sin())
            .add(&d_o.scale(w * phase.cos())))
    }

    /// Period `T_k = π / |d'(k)|` of the Bloch-state evolution at momentum k.
    pub fn period_at(&self, k: f64) -> Result<f64> {
        let dp_norm = self.post.eval(k).norm();
        if dp_norm <= 0.0 {
            return Err(CoreError::GaplessPostQuench { k });
        }
        Ok(std::f64::consts::PI / dp_norm)
    }
}

/// Time-dependent hoppings of the parent Hamiltonian for the quench
/// `J(β,0,α) -> J(cos k, sin k, α)`: next-nearest `η`, nearest `ε`, on-site
/// off-diagonal `δ`, and the diagonal part `M(k,t) = m + m_c cos k + m_s sin k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParentCoefficients {
    pub eta: C64,
    pub epsilon: C64,
    pub delta: C64,
    pub m: f64,
    pub m_c: f64,
    pub m_s: f64,
}

/// Closed-form parent coefficients at time `t` for the `J(β,0,α)` family.
pub fn parent_coefficients(alpha: f64, beta: f64, j: f64, t: f64) -> Result<ParentCoefficients> {
    if j <= 0.0 {
        return Err(CoreError::Config(format!("J must be positive, got {j}")));
    }
    let s = (1.0 + alpha * alpha).sqrt();
    let x = s * j * t;
    let sin2 = x.sin() * x.sin();
    let c2x = (2.0 * x).cos();
    let s2x = (2.0 * x).sin();
    let denom = 1.0 + alpha * alpha;

    let eta = C64::new(beta * j / denom * sin2, 0.0);
    let epsilon = C64::new(
        alpha * j / denom * alpha * (1.0 - c2x),
        alpha * j / denom * s * s2x,
    );
    let delta = C64::new(
        beta * j / (2.0 * denom) * (1.0 + (1.0 + 2.0 * alpha * alpha) * c2x),
        -beta * j / (2.0 * denom) * 2.0 * alpha * s * s2x,
    );
    let m = alpha * j / denom * (alpha * alpha + c2x);
    let m_c = 2.0 * j * alpha * beta / denom * sin2;
    let m_s = -beta / s * s2x * j;
    Ok(ParentCoefficients { eta, epsilon, delta, m, m_c, m_s })
}

impl ParentCoefficients {
    /// Upper off-diagonal entry of `h_P(k,t)`, `δ + ε e^{-ik} + η e^{-2ik}`.
    pub fn off_diagonal(&self, k: f64) -> C64 {
        let e1 = C64::from_polar(1.0, -k);
        let e2 = C64::from_polar(1.0, -2.0 * k);
        self.delta + self.epsilon * e1 + self.eta * e2
    }

    /// Diagonal entry `M(k,t)`.
    pub fn diagonal(&self, k: f64) -> f64 {
        self.m + self.m_c * k.cos() + self.m_s * k.sin()
    }

    /// Bloch vector rebuilt from the hopping coefficients; equals
    /// `parent_bloch` for the corresponding protocol.
    pub fn bloch_vector(&self, k: f64) -> BlochVector3 {
        let o = self.off_diagonal(k);
        BlochVector3::new(o.re, -o.im, self.diagonal(k))
    }

    /// Harmonic-list Bloch function equivalent to these coefficients, for
    /// real-space lattice construction.
    pub fn to_bloch_function(&self) -> BlochFunction {
        // d_x = Re(o), d_y = -Im(o) with o(k) = δ + ε e^{-ik} + η e^{-2ik}.
        let cos_coeffs = vec![
            BlochVector3::new(self.delta.re, -self.delta.im, self.m),
            BlochVector3::new(self.epsilon.re, -self.epsilon.im, self.m_c),
            BlochVector3::new(self.eta.re, -self.eta.im, 0.0),
        ];
        let sin_coeffs = vec![
            BlochVector3::ZERO,
            BlochVector3::new(self.epsilon.im, self.epsilon.re, self.m_s),
            BlochVector3::new(self.eta.im, self.eta.re, 0.0),
        ];
        BlochFunction::Harmonics { cos_coeffs, sin_coeffs }
    }
}
