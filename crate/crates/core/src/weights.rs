//! Torus characters of the bundles restricted to a fixed point, and their
//! specialization to exact numbers.
//!
//! The torus acts on P³ by scaling coordinates. A character is stored as an
//! exponent vector over `(λ₀, λ₁, λ₂, λ₃)`; every character emitted here has
//! exponent sum zero. Localization works in equivariant cohomology, so a
//! character specializes to the linear form `Σ eⱼ·λⱼ` of its exponents.
//!
//! Conventions (checked end to end by the calibration fixtures):
//! - `O_Gr(1)` at `V_k` carries `λ_k/λ₀`.
//! - The Grassmannian tangent at `V_k` carries `λ_k/λ_j` for `j ≠ k`.
//! - In the chart at `e_m` of `V_k`, the coordinate functions carry
//!   `t₁ = λ_m/λ_{j₁}` and `t₂ = λ_m/λ_{j₂}`; tangent directions carry the
//!   inverse characters.
//! - The fibre of `O_S(d)^{[i]}` over the cell `(a, b)` at `e_m` carries
//!   `(λ₀/λ_m)^d · t₁^a · t₂^b`.

use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::fixed_points::{plane_points, FixedPoint, Partition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character(pub [i64; 4]);

impl Character {
    pub const TRIVIAL: Character = Character([0; 4]);

    pub fn basis(j: usize) -> Self {
        let mut e = [0; 4];
        e[j] = 1;
        Character(e)
    }

    /// `λ_a / λ_b`.
    pub fn ratio(a: usize, b: usize) -> Self {
        Character::basis(a) * Character::basis(b).inv()
    }

    pub fn exponents(&self) -> [i64; 4] {
        self.0
    }

    pub fn exponent_sum(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_trivial(&self) -> bool {
        self.0 == [0; 4]
    }

    pub fn inv(self) -> Self {
        Character(self.0.map(|e| -e))
    }

    pub fn pow(self, n: i64) -> Self {
        Character(self.0.map(|e| e * n))
    }
}

impl Mul for Character {
    type Output = Character;
    fn mul(self, rhs: Character) -> Character {
        Character([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
            self.0[3] + rhs.0[3],
        ])
    }
}

impl Neg for Character {
    type Output = Character;
    fn neg(self) -> Character {
        self.inv()
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "λ{j}")?;
            } else {
                write!(f, "λ{j}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

const DEFAULT_VALUES: [i64; 4] = [2, 3, 5, 7];
const POOL_BOUND: i64 = 1 << 20;

/// Values assigned to the four torus parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Specialization {
    values: [Rational; 4],
    /// Seed of the pseudorandom pool used for resampling.
    seed: u64,
}

impl Default for Specialization {
    fn default() -> Self {
        Specialization {
            values: DEFAULT_VALUES.map(Rational::from),
            seed: 0,
        }
    }
}

impl Specialization {
    /// Explicit values; they must be nonzero and pairwise distinct.
    pub fn new(values: [Rational; 4]) -> Result<Self> {
        Self::with_seed(values, 0)
    }

    pub fn with_seed(values: [Rational; 4], seed: u64) -> Result<Self> {
        if values.iter().any(Rational::is_zero) {
            return Err(Error::InvalidSpecialization("torus values must be nonzero".into()));
        }
        for a in 0..4 {
            for b in a + 1..4 {
                if values[a] == values[b] {
                    return Err(Error::InvalidSpecialization(
                        "torus values must be pairwise distinct".into(),
                    ));
                }
            }
        }
        Ok(Specialization { values, seed })
    }

    pub fn from_i64(values: [i64; 4]) -> Result<Self> {
        Self::new(values.map(Rational::from))
    }

    /// Four distinct positive integers drawn from a seeded pool.
    pub fn from_seed(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked: Vec<i64> = Vec::with_capacity(4);
        while picked.len() < 4 {
            let v = rng.gen_range(1..POOL_BOUND);
            if !picked.contains(&v) {
                picked.push(v);
            }
        }
        Specialization {
            values: [0, 1, 2, 3].map(|j| Rational::from(picked[j])),
            seed,
        }
    }

    /// The `attempt`-th replacement drawn after a non-generic hit.
    pub fn resampled(&self, attempt: u32) -> Self {
        let mixed = self
            .seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(u64::from(attempt) + 1);
        Specialization::from_seed(mixed)
    }

    /// An independent specialization for cross-validation.
    pub fn companion(&self) -> Self {
        Specialization::from_seed(self.seed ^ 0xA5A5_5A5A_C3C3_3C3C)
    }

    pub fn values(&self) -> &[Rational; 4] {
        &self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn eval(&self, c: &Character) -> Rational {
        c.0.iter()
            .zip(&self.values)
            .filter(|(&e, _)| e != 0)
            .map(|(&e, v)| v * Rational::from(e))
            .sum()
    }

    /// The values scaled by the common denominator. Integrals of top-degree
    /// classes are unchanged by this rescaling.
    pub fn integer_form(&self) -> IntegerSpecialization {
        let lcm = self
            .values
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        IntegerSpecialization {
            values: self
                .values
                .clone()
                .map(|v| v.numer() * (&lcm / v.denom())),
        }
    }
}

impl fmt::Display for Specialization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.values;
        write!(f, "({a:?},{b:?},{c:?},{d:?})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegerSpecialization {
    values: [BigInt; 4],
}

impl IntegerSpecialization {
    pub fn values(&self) -> &[BigInt; 4] {
        &self.values
    }

    pub fn eval(&self, c: &Character) -> BigInt {
        let mut acc = BigInt::zero();
        for (&e, v) in c.0.iter().zip(&self.values) {
            if e != 0 {
                acc += v * e;
            }
        }
        acc
    }
}

/// Deliberate convention faults, used to show the calibration fixtures
/// detect them.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Perturbation {
    #[default]
    None,
    /// `O_Gr(1)` at `V_k` carries `λ₀/λ_k`.
    DualHyperplane,
    /// The `O_S(d)` fibre at `e_m` carries `(λ_m/λ₀)^d`.
    DualFiber,
    /// Cells contribute `t₁^{-a} t₂^{-b}` to the tautological weights.
    CellSign,
}

/// Chart coordinate characters at the point `e_m` of the plane `V_k`.
pub fn chart_weights(k: usize, m: usize) -> (Character, Character) {
    let [j1, j2] = chart_complement(k, m);
    (Character::ratio(m, j1), Character::ratio(m, j2))
}

fn chart_complement(k: usize, m: usize) -> [usize; 2] {
    assert!(k < 4 && m < 4 && k != m, "chart ({k},{m}) is not a point of a coordinate plane");
    let mut out = [0; 2];
    let mut s = 0;
    for j in 0..4 {
        if j != k && j != m {
            out[s] = j;
            s += 1;
        }
    }
    out
}

pub fn gr_tangent_weights(k: usize) -> [Character; 3] {
    plane_points(k).map(|j| Character::ratio(k, j))
}

pub fn hyperplane_weight(k: usize, perturbation: Perturbation) -> Character {
    match perturbation {
        Perturbation::DualHyperplane => Character::ratio(0, k),
        _ => Character::ratio(k, 0),
    }
}

/// Tangent characters of the Hilbert scheme of the plane at the monomial
/// ideal of `mu`, given the chart coordinate characters `t1`, `t2`.
pub fn hilb_tangent_weights(mu: &Partition, t1: Character, t2: Character) -> Vec<Character> {
    let (tu, tv) = (t1.inv(), t2.inv());
    let mut out = Vec::with_capacity(2 * mu.size() as usize);
    for cell in mu.cells() {
        let (arm, leg) = mu.arm_leg(cell).expect("cell of its own diagram");
        let (arm, leg) = (arm as i64, leg as i64);
        out.push(tu.pow(arm + 1) * tv.pow(-leg));
        out.push(tu.pow(-arm) * tv.pow(leg + 1));
    }
    out
}

fn taut_slot_weights(
    k: usize,
    m: usize,
    mu: &Partition,
    d: u32,
    perturbation: Perturbation,
) -> Vec<Character> {
    let (t1, t2) = chart_weights(k, m);
    let fibre = match perturbation {
        Perturbation::DualFiber => Character::ratio(m, 0),
        _ => Character::ratio(0, m),
    }
    .pow(d as i64);
    let cell_sign = if perturbation == Perturbation::CellSign { -1 } else { 1 };
    mu.cells()
        .into_iter()
        .map(|(a, b)| fibre * t1.pow(cell_sign * a as i64) * t2.pow(cell_sign * b as i64))
        .collect()
}

/// Characters of `O_S(d)^{[i]}` at a fixed point.
pub fn taut_weights(f: &FixedPoint, d: u32) -> Vec<Character> {
    taut_weights_with(f, d, Perturbation::None)
}

pub fn taut_weights_with(f: &FixedPoint, d: u32, perturbation: Perturbation) -> Vec<Character> {
    let k = f.plane_index as usize;
    f.plane_points()
        .iter()
        .zip(f.tri.slots())
        .flat_map(|(&m, mu)| taut_slot_weights(k, m, mu, d, perturbation))
        .collect()
}

/// Characters of the relative tangent bundle of the Hilbert scheme at a
/// fixed point.
pub fn relative_tangent_weights(f: &FixedPoint) -> Vec<Character> {
    let k = f.plane_index as usize;
    f.plane_points()
        .iter()
        .zip(f.tri.slots())
        .flat_map(|(&m, mu)| {
            let (t1, t2) = chart_weights(k, m);
            hilb_tangent_weights(mu, t1, t2)
        })
        .collect()
}

/// All characters attached to one fixed point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    pub tangent_gr: [Character; 3],
    pub tangent_hilb: Vec<Character>,
    pub taut: Vec<Character>,
    pub h_weight: Character,
}

impl WeightSystem {
    pub fn new(f: &FixedPoint, d: u32) -> Self {
        Self::with_perturbation(f, d, Perturbation::None)
    }

    pub fn with_perturbation(f: &FixedPoint, d: u32, perturbation: Perturbation) -> Self {
        let k = f.plane_index as usize;
        let ws = WeightSystem {
            tangent_gr: gr_tangent_weights(k),
            tangent_hilb: relative_tangent_weights(f),
            taut: taut_weights_with(f, d, perturbation),
            h_weight: hyperplane_weight(k, perturbation),
        };
        debug_assert!(ws.all().all(|c| c.exponent_sum() == 0));
        ws
    }

    pub fn all(&self) -> impl Iterator<Item = &Character> {
        self.tangent_gr
            .iter()
            .chain(&self.tangent_hilb)
            .chain(&self.taut)
            .chain(std::iter::once(&self.h_weight))
    }

    /// Characters of the full tangent space at the fixed point.
    pub fn tangent(&self) -> impl Iterator<Item = &Character> {
        self.tangent_gr.iter().chain(&self.tangent_hilb)
    }
}

/// Equivariant Euler class of the tangent space at `f`.
pub fn euler_class(f: &FixedPoint, spec: &Specialization) -> Result<Rational> {
    let ws = WeightSystem::new(f, 1);
    let mut e = Rational::one();
    for c in ws.tangent() {
        let v = spec.eval(c);
        if v.is_zero() {
            return Err(Error::NonGeneric(format!("tangent weight {c} vanishes at {f}")));
        }
        e *= v;
    }
    Ok(e)
}

/// `e₁..eₙ` of the specialized characters.
pub fn chern_values(ws: &[Character], spec: &Specialization) -> Vec<Rational> {
    let vals: Vec<Rational> = ws.iter().map(|c| spec.eval(c)).collect();
    let mut e = vec![Rational::one()];
    for x in &vals {
        e.push(Rational::zero());
        for j in (1..e.len()).rev() {
            let add = &e[j - 1] * x;
            e[j] += add;
        }
    }
    e.remove(0);
    e
}

/// `e₀..eₙ` of integer values.
pub fn elementary_symmetric(vals: &[BigInt]) -> Vec<BigInt> {
    let mut e = vec![BigInt::one()];
    for x in vals {
        e.push(BigInt::zero());
        for j in (1..e.len()).rev() {
            let add = &e[j - 1] * x;
            e[j] += add;
        }
    }
    e
}

/// Product of two polynomials given by coefficient lists.
pub fn convolve(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}
