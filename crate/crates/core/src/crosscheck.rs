//! Counts of totally reducible nodal curves computed in the Chow ring of
//! the Grassmannian of planes, with no localization.
//!
//! For a supported component type `(d, δ)` the class of curves meeting
//! `n` lines is an integer multiple of a power of `H`; a reducible curve is
//! counted by splitting the lines among its components.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorial, GradedPoly, Rational, SymbolTable, Truncation};
use crate::error::{Error, Result};
use crate::integrand::{forms_rank, genus};

/// Component types with a known class.
pub const SUPPORTED: [(u32, u32); 3] = [(1, 0), (2, 0), (3, 1)];

pub fn is_supported(d: u32, delta: u32) -> bool {
    SUPPORTED.contains(&(d, delta))
}

/// Number of line conditions that cut the family of `(d, δ)` curves down
/// to finitely many.
pub fn full_line_count(d: u32, delta: u32) -> u32 {
    forms_rank(d) + 2 - delta
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NuClass {
    pub d: u32,
    pub delta: u32,
    pub n_lines: u32,
    /// The class is `coefficient · H^h_power`.
    pub coefficient: BigInt,
    pub h_power: u32,
}

/// Total Chern class of the bundle of degree-`d` forms, coefficients of
/// `1, H, H², H³`.
///
/// The dual tautological bundle has `c = 1 + H + H² + H³ = (1+H)(1+H²)`
/// modulo `H⁴`, so its Chern roots may be taken as `H·{1, i, −i}` and the
/// roots of the degree-`d` forms are `(a + (b − c)i)·H` for `a+b+c = d`.
pub fn forms_chern_class(d: u32) -> [BigInt; 4] {
    // Gaussian-integer coefficients (re, im) of a cubic in H.
    let mut acc: [(BigInt, BigInt); 4] = Default::default();
    acc[0].0 = BigInt::one();
    for a in 0..=d {
        for b in 0..=d - a {
            let c = d - a - b;
            let (re, im) = (BigInt::from(a), BigInt::from(b as i64 - c as i64));
            for k in (1..4).rev() {
                let (pr, pi) = acc[k - 1].clone();
                acc[k].0 += &pr * &re - &pi * &im;
                acc[k].1 += &pr * &im + &pi * &re;
            }
        }
    }
    assert!(acc.iter().all(|(_, im)| im.is_zero()), "Chern class must be real");
    acc.map(|(re, _)| re)
}

/// Segre coefficients `σ_j` with `Σ σ_j H^j = 1 / c`.
fn segre(c: &[BigInt; 4], len: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::one()];
    for j in 1..len {
        let mut v = BigInt::zero();
        for t in 1..=3.min(j) {
            v -= &c[t] * &s[j - t];
        }
        s.push(v);
    }
    s
}

struct Ring {
    table: Arc<SymbolTable>,
    h: usize,
    eta: usize,
    xi: usize,
}

impl Ring {
    fn new() -> Self {
        let mut t = SymbolTable::new();
        let h = t.push("H", 1, Some(4));
        let eta = t.push("eta", 1, None);
        let xi = t.push("xi", 1, None);
        Ring {
            table: Arc::new(t),
            h,
            eta,
            xi,
        }
    }

    fn lin(&self, terms: &[(usize, i64)]) -> GradedPoly {
        terms.iter().fold(GradedPoly::zero(&self.table), |acc, &(s, c)| {
            &acc + &GradedPoly::symbol_pow(&self.table, s, 1, Rational::from(c))
        })
    }

    fn mono(&self, h: u8, eta: u8, c: i64) -> GradedPoly {
        let mut e = smallvec::SmallVec::from_elem(0, 3);
        e[self.h] = h;
        e[self.eta] = eta;
        GradedPoly::monomial(&self.table, e, Rational::from(c))
    }

    /// Reduces with `η³ = Hη² − H²η + H³` and returns the `η²`
    /// coefficient, i.e. the push-forward along the planes.
    fn push_along_planes(&self, p: &GradedPoly, rules: &Truncation) -> GradedPoly {
        let relation = &(&self.mono(1, 2, 1) + &self.mono(2, 1, -1)) + &self.mono(3, 0, 1);
        let mut cur = p.clone();
        loop {
            let high = cur.filter(|e| e[self.eta] >= 3);
            if high.is_zero() {
                break;
            }
            let mut next = cur.filter(|e| e[self.eta] < 3);
            for (e, c) in high.terms() {
                let mut lowered = e.clone();
                lowered[self.eta] -= 3;
                let base = GradedPoly::monomial(&self.table, lowered, c.clone());
                next = &next + &base.mul(&relation, rules);
            }
            cur = next;
        }
        let mut out = GradedPoly::zero(&self.table);
        for (e, c) in cur.terms() {
            if e[self.eta] == 2 {
                let mut lowered = e.clone();
                lowered[self.eta] = 0;
                out = &out + &GradedPoly::monomial(&self.table, lowered, c.clone());
            }
        }
        out
    }
}

pub fn nu_class(d: u32, delta: u32, n_lines: u32) -> Result<NuClass> {
    let full = full_line_count(d, delta);
    if !is_supported(d, delta) || n_lines > full || n_lines + 3 < full {
        return Err(Error::NuUnavailable { d, delta, n_lines });
    }
    let h_power = 3 - (full - n_lines);
    let ring = Ring::new();
    let rules = Truncation::new(true, None);
    let di = d as i64;

    // (dH + ξ)^n
    let condition = ring.lin(&[(ring.h, di), (ring.xi, 1)]).pow(n_lines, &rules);
    let class = match delta {
        0 => condition,
        1 => {
            // c₃((Ω ⊕ O) ⊗ M) with c₁(M) = dη + ξ.
            let m = ring.lin(&[(ring.eta, di), (ring.xi, 1)]);
            let c1 = ring.lin(&[(ring.h, 1), (ring.eta, -3)]);
            let c2 = &(&ring.mono(0, 2, 3) + &ring.mono(1, 1, -2)) + &ring.mono(2, 0, 1);
            let m2 = m.mul(&m, &rules);
            let c3 = &(&m2.mul(&m, &rules) + &c1.mul(&m2, &rules)) + &c2.mul(&m, &rules);
            let nodal = ring.push_along_planes(&c3, &rules);
            condition.mul(&nodal, &rules)
        }
        _ => unreachable!("checked by is_supported"),
    };

    // Push forward along the projective bundle: ξ^{r−1+j} ↦ σ_j H^j.
    let r = forms_rank(d) as usize;
    let sigma = segre(&forms_chern_class(d), 8);
    let mut coefficient = Rational::zero();
    for (e, c) in class.terms() {
        let xi = e[ring.xi] as usize;
        if xi + 1 < r {
            continue;
        }
        let j = xi + 1 - r;
        let hp = e[ring.h] as usize + j;
        if hp > 3 {
            continue;
        }
        if hp != h_power as usize {
            return Err(Error::InvalidSpec(format!(
                "inhomogeneous class for ({d},{delta},{n_lines})"
            )));
        }
        coefficient += c * &Rational::from(sigma[j].clone());
    }
    let coefficient = coefficient.to_integer().ok_or_else(|| Error::NonInteger {
        delta,
        d,
        value: coefficient.to_string(),
    })?;
    Ok(NuClass {
        d,
        delta,
        n_lines,
        coefficient,
        h_power,
    })
}

/// Number of ways to split `Σ parts` labelled lines into unlabelled
/// blocks of the given sizes.
pub fn multiplicity(parts: &[u32]) -> BigInt {
    let n: u32 = parts.iter().sum();
    let mut value = factorial(n);
    for &p in parts {
        value /= factorial(p);
    }
    let mut counts: BTreeMap<u32, u32> = BTreeMap::new();
    for &p in parts {
        *counts.entry(p).or_default() += 1;
    }
    for &c in counts.values() {
        value /= factorial(c);
    }
    value
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Component {
    pub d: u32,
    pub delta: u32,
}

/// One multiset of components together with every admissible split of the
/// lines, as line counts listed in component order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionFamily {
    pub components: Vec<Component>,
    pub line_splits: Vec<Vec<u32>>,
}

/// Multisets of components (sorted decreasingly) with total degree `d`
/// and `δ` nodes, including the nodes where components meet, each
/// component within its genus bound.
pub fn component_multisets(delta: u32, d: u32) -> Vec<Vec<Component>> {
    fn rec(
        remaining_d: u32,
        remaining_delta: i64,
        max: Component,
        prefix: &mut Vec<Component>,
        out: &mut Vec<Vec<Component>>,
    ) {
        if remaining_d == 0 {
            if remaining_delta == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for cd in (1..=remaining_d.min(max.d)).rev() {
            let crossings = (cd * (remaining_d - cd)) as i64;
            let top = genus(cd).max(0) as u32;
            for cdelta in (0..=top).rev() {
                let c = Component { d: cd, delta: cdelta };
                if c > max {
                    continue;
                }
                let left = remaining_delta - crossings - cdelta as i64;
                if left < 0 {
                    continue;
                }
                prefix.push(c);
                rec(remaining_d - cd, left, c, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    let top = Component { d, delta: u32::MAX };
    rec(d, delta as i64, top, &mut Vec::new(), &mut out);
    out
}

pub fn enumerate_decompositions(delta: u32, d: u32) -> Result<Vec<DecompositionFamily>> {
    let n = crate::integrand::line_count(d, delta);
    if n < 0 {
        return Err(Error::InvalidSpec(format!("no line conditions for δ={delta}, d={d}")));
    }
    let n = n as u32;
    let mut out = Vec::new();
    for components in component_multisets(delta, d) {
        let missing: Vec<String> = components
            .iter()
            .filter(|c| !is_supported(c.d, c.delta))
            .map(|c| format!("({},{})", c.d, c.delta))
            .collect();
        if !missing.is_empty() {
            return Err(Error::UnsupportedComponents(missing.join(", ")));
        }
        let ranges: Vec<(u32, u32)> = components
            .iter()
            .map(|c| {
                let full = full_line_count(c.d, c.delta);
                (full.saturating_sub(3), full)
            })
            .collect();
        let mut line_splits = Vec::new();
        let mut current = Vec::with_capacity(components.len());
        splits(&ranges, n, &mut current, &mut line_splits);
        out.push(DecompositionFamily {
            components,
            line_splits,
        });
    }
    Ok(out)
}

fn splits(ranges: &[(u32, u32)], left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let Some((&(lo, hi), rest)) = ranges.split_first() else {
        if left == 0 {
            out.push(current.clone());
        }
        return;
    };
    for k in lo..=hi.min(left) {
        current.push(k);
        splits(rest, left - k, current, out);
        current.pop();
    }
}

/// Number of totally reducible `δ`-nodal degree-`d` curves meeting the
/// expected number of general lines.
pub fn reducible_count(delta: u32, d: u32) -> Result<BigInt> {
    let mut total = Rational::zero();
    for fam in enumerate_decompositions(delta, d)? {
        let mut symmetry = BigInt::one();
        let mut counts: BTreeMap<Component, u32> = BTreeMap::new();
        for c in &fam.components {
            *counts.entry(*c).or_default() += 1;
        }
        for &k in counts.values() {
            symmetry *= factorial(k);
        }
        for split in &fam.line_splits {
            let mut term = BigInt::one();
            let mut h = 0;
            for (c, &k) in fam.components.iter().zip(split) {
                let nu = nu_class(c.d, c.delta, k)?;
                h += nu.h_power;
                term *= nu.coefficient;
            }
            if h != 3 || term.is_zero() {
                continue;
            }
            let n: u32 = split.iter().sum();
            let mut ways = factorial(n);
            for &k in split {
                ways /= factorial(k);
            }
            total += Rational::new(term * ways, symmetry.clone());
        }
    }
    total.to_integer().ok_or_else(|| Error::NonInteger {
        delta,
        d,
        value: total.to_string(),
    })
}

/// Stirling number of the second kind, for sanity checks.
pub fn set_partitions(n: u32, blocks: u32) -> BigInt {
    let mut row = vec![BigInt::one()];
    for m in 1..=n as usize {
        let mut next = vec![BigInt::zero(); m + 1];
        for k in 1..=m {
            let stay = if k < m { &row[k] * k } else { BigInt::zero() };
            next[k] = stay + &row[k - 1];
        }
        row = next;
    }
    row.get(blocks as usize).cloned().unwrap_or_default()
}
