//! The class integrated over the relative Hilbert scheme for each term of
//! the BPS combination, as a polynomial in `H`, the Chern classes of the
//! tautological bundle and the Chern classes of the relative tangent bundle.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith::{binomial, GradedPoly, Rational, SymbolId, SymbolTable, Truncation};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Curves anywhere in P³ meeting `n` general lines.
    #[serde(rename = "p3")]
    P3,
    /// Curves in a fixed plane through `n − 3` general points.
    #[serde(rename = "p2")]
    P2Fixed,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::P3 => "p3",
            Mode::P2Fixed => "p2",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p3" | "P3" => Ok(Mode::P3),
            "p2" | "P2" | "p2fixed" => Ok(Mode::P2Fixed),
            other => Err(Error::InvalidSpec(format!("unknown mode {other:?}"))),
        }
    }
}

pub fn genus(d: u32) -> i64 {
    let d = d as i64;
    (d - 1) * (d - 2) / 2
}

/// Number of general lines (conditions) for `δ`-nodal degree-`d` curves.
pub fn line_count(d: u32, delta: u32) -> i64 {
    let d = d as i64;
    d * (d + 3) / 2 + 3 - delta as i64
}

/// Rank of the bundle of degree-`d` forms on the planes.
pub fn forms_rank(d: u32) -> u32 {
    (d + 1) * (d + 2) / 2
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BpsCoefficients {
    pub genus: i64,
    pub a: Vec<Rational>,
}

/// Row `δ` of the inverse of the unitriangular matrix
/// `M[j][i] = (−1)^{j−i}·C(2(g−i)−2, j−i)`.
pub fn bps_coefficients(delta: u32, g: i64) -> BpsCoefficients {
    let n = delta as usize + 1;
    let m = |j: usize, i: usize| -> Rational {
        let sign = if (j - i).is_multiple_of(2) { 1 } else { -1 };
        Rational::from(binomial(2 * (g - i as i64) - 2, (j - i) as u32) * sign)
    };
    let mut inv = vec![vec![Rational::zero(); n]; n];
    for j in 0..n {
        inv[j][j] = Rational::one();
        for i in (0..j).rev() {
            let mut s = Rational::zero();
            for k in i..j {
                s += m(j, k) * &inv[k][i];
            }
            inv[j][i] = -s;
        }
    }
    BpsCoefficients {
        genus: g,
        a: inv.swap_remove(delta as usize),
    }
}

/// Coefficients of `1, H, H², H³` in the total Chern class of the bundle of
/// degree-`d` forms on the planes.
pub fn sym_chern_coefficients(d: u32) -> [Rational; 4] {
    let d = d as i64;
    let base = d * (d + 1) * (d + 2);
    let c2 = base * (d + 3) * (d * d + 2);
    let c3 = c2 * (d * d * d + 3 * d * d + 2 * d + 12);
    [
        Rational::one(),
        Rational::new(base, 6),
        Rational::new(c2, 72),
        Rational::new(c3, 1296),
    ]
}

/// The same class as a polynomial in `H` over `table`.
pub fn sym_chern_in(d: u32, table: &Arc<SymbolTable>, h: SymbolId) -> GradedPoly {
    sym_chern_coefficients(d)
        .into_iter()
        .enumerate()
        .fold(GradedPoly::zero(table), |acc, (j, c)| {
            &acc + &GradedPoly::symbol_pow(table, h, j as u8, c)
        })
}

/// The same class over a table containing only `H`.
pub fn sym_chern(d: u32) -> GradedPoly {
    let mut t = SymbolTable::new();
    let h = t.push("H", 1, Some(4));
    sym_chern_in(d, &Arc::new(t), h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntegrandSpec {
    pub i: u32,
    pub delta: u32,
    pub d: u32,
    pub n: u32,
    pub r: u32,
    pub mode: Mode,
    /// Line conditions replaced by point conditions in a fixed plane
    /// (P3 mode only); each one trades a line for a factor of `H`.
    pub plane_points: u32,
}

impl IntegrandSpec {
    pub fn new(i: u32, delta: u32, d: u32, mode: Mode) -> Result<Self> {
        if d < 1 {
            return Err(Error::InvalidSpec("degree must be at least 1".into()));
        }
        if i > delta {
            return Err(Error::InvalidSpec(format!("i = {i} exceeds δ = {delta}")));
        }
        let n = line_count(d, delta);
        let min = match mode {
            Mode::P3 => 3,
            Mode::P2Fixed => 6,
        };
        if n < min {
            return Err(Error::InvalidSpec(format!(
                "n = {n} < {min} for δ = {delta}, d = {d} in {mode} mode"
            )));
        }
        Ok(IntegrandSpec {
            i,
            delta,
            d,
            n: n as u32,
            r: forms_rank(d),
            mode,
            plane_points: 0,
        })
    }

    pub fn with_plane_points(mut self, p: u32) -> Result<Self> {
        if self.mode != Mode::P3 || p > 3 {
            return Err(Error::InvalidSpec(format!("{p} plane points in {} mode", self.mode)));
        }
        self.plane_points = p;
        Ok(self)
    }

    /// Dimension of the relative Hilbert scheme.
    pub fn dimension(&self) -> u32 {
        3 + 2 * self.i
    }

    fn hyperplane_factors(&self) -> u32 {
        match self.mode {
            Mode::P3 => self.plane_points,
            Mode::P2Fixed => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegrandOptions {
    /// Impose `H⁴ = 0` while building.
    pub h4: bool,
    /// Number of terms kept in the geometric series; `None` means `3+2i+δ`.
    pub series_bound: Option<u32>,
    /// Keep only terms of degree equal to the dimension.
    pub top_degree_only: bool,
}

impl Default for IntegrandOptions {
    fn default() -> Self {
        IntegrandOptions {
            h4: true,
            series_bound: None,
            top_degree_only: true,
        }
    }
}

/// Symbol layout: `H`, then `c1(L)..ci(L)`, then `c1(T)..c2i(T)`.
#[derive(Debug, Clone)]
pub struct IntegrandSymbols {
    pub table: Arc<SymbolTable>,
    pub h: SymbolId,
    pub chern_l: Vec<SymbolId>,
    pub chern_t: Vec<SymbolId>,
}

impl IntegrandSymbols {
    pub fn new(i: u32) -> Self {
        let mut t = SymbolTable::new();
        let h = t.push("H", 1, Some(4));
        let chern_l = (1..=i).map(|k| t.push(format!("c{k}(L)"), k, None)).collect();
        let chern_t = (1..=2 * i).map(|m| t.push(format!("c{m}(T)"), m, None)).collect();
        IntegrandSymbols {
            table: Arc::new(t),
            h,
            chern_l,
            chern_t,
        }
    }

    /// `c_k(L)` with `c_0 = 1`.
    fn chern_l(&self, k: u32) -> GradedPoly {
        if k == 0 {
            GradedPoly::one(&self.table)
        } else {
            GradedPoly::symbol(&self.table, self.chern_l[k as usize - 1])
        }
    }

    fn chern_t(&self, m: u32) -> GradedPoly {
        if m == 0 {
            GradedPoly::one(&self.table)
        } else {
            GradedPoly::symbol(&self.table, self.chern_t[m as usize - 1])
        }
    }
}

#[derive(Debug, Clone)]
pub struct Integrand {
    pub spec: IntegrandSpec,
    pub options: IntegrandOptions,
    pub symbols: IntegrandSymbols,
    pub poly: GradedPoly,
}

impl Integrand {
    /// One term per line, for debugging.
    pub fn dump(&self) -> String {
        let s = &self.spec;
        let mut out = format!(
            "# i={} delta={} d={} n={} r={} mode={} plane_points={} terms={}\n",
            s.i,
            s.delta,
            s.d,
            s.n,
            s.r,
            s.mode,
            s.plane_points,
            self.poly.len()
        );
        let single = |e: &crate::arith::Exponents, c: &Rational| {
            GradedPoly::monomial(&self.symbols.table, e.clone(), c.clone()).to_string()
        };
        for (e, c) in self.poly.terms() {
            out.push_str(&single(e, c));
            out.push('\n');
        }
        out
    }
}

/// Polynomial in `ξ` with coefficients in the graded ring; the total degree
/// of a term counts `ξ` with degree 1.
type XiPoly = Vec<GradedPoly>;

fn xi_zero(sym: &IntegrandSymbols, len: usize) -> XiPoly {
    vec![GradedPoly::zero(&sym.table); len]
}

/// Product truncated at total degree `cap`, computing only `ξ`-powers
/// at least `min_xi`.
fn xi_mul(
    sym: &IntegrandSymbols,
    a: &XiPoly,
    b: &XiPoly,
    base: Truncation,
    cap: u32,
    min_xi: usize,
) -> XiPoly {
    let len = (a.len() + b.len()).saturating_sub(1).min(cap as usize + 1);
    let mut out = xi_zero(sym, len);
    for (s, pa) in a.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        for (t, pb) in b.iter().enumerate() {
            let k = s + t;
            if k < min_xi || k >= len || pb.is_zero() {
                continue;
            }
            let rules = base.with_cap(Some(cap - k as u32));
            let prod = pa.mul(pb, &rules);
            out[k].add_assign_scaled(&prod, &Rational::one());
        }
    }
    trim(&mut out);
    out
}

fn trim(p: &mut XiPoly) {
    while p.last().is_some_and(GradedPoly::is_zero) {
        p.pop();
    }
}

pub fn build_integrand(spec: &IntegrandSpec) -> Result<Integrand> {
    build_integrand_with(spec, &IntegrandOptions::default())
}

pub fn build_integrand_with(spec: &IntegrandSpec, options: &IntegrandOptions) -> Result<Integrand> {
    let s = IntegrandSpec::new(spec.i, spec.delta, spec.d, spec.mode)?
        .with_plane_points(spec.plane_points)
        .or_else(|e| if spec.plane_points == 0 { Ok(*spec) } else { Err(e) })?;
    debug_assert_eq!(&s, spec);
    let sym = IntegrandSymbols::new(s.i);
    let base = Truncation::new(options.h4, None);
    let (i, delta, n, r) = (s.i, s.delta, s.n, s.r);
    let table = &sym.table;

    // Y = 1 − Σ_k c_k(L)(1+ξ)^{i−k}
    let mut y = xi_zero(&sym, i as usize + 1);
    y[0] = GradedPoly::one(table);
    for k in 0..=i {
        let ck = sym.chern_l(k);
        for t in 0..=(i - k) {
            let coeff = Rational::from(binomial((i - k) as i64, t));
            y[t as usize].add_assign_scaled(&ck, &-coeff);
        }
    }
    trim(&mut y);

    // Truncated geometric series in Y.
    let s_cap = delta + i;
    let bound = options.series_bound.unwrap_or(3 + 2 * i + delta);
    let mut series: XiPoly = vec![GradedPoly::one(table)];
    let mut power: XiPoly = vec![GradedPoly::one(table)];
    for _ in 0..bound {
        power = xi_mul(&sym, &power, &y, base, s_cap, 0);
        if power.is_empty() {
            break;
        }
        if series.len() < power.len() {
            series.resize(power.len(), GradedPoly::zero(table));
        }
        for (acc, p) in series.iter_mut().zip(&power) {
            acc.add_assign_scaled(p, &Rational::one());
        }
    }

    // Σ_k c_k(L) ξ^{i−k}
    let mut top_chern = xi_zero(&sym, i as usize + 1);
    for k in 0..=i {
        top_chern[(i - k) as usize] = sym.chern_l(k);
    }

    // Line and point conditions.
    let p = s.hyperplane_factors();
    let lines = n - p;
    let mut line = xi_zero(&sym, lines as usize + 1);
    for j in 0..=(3 - p).min(lines) {
        let coeff = Rational::from(binomial(lines as i64, j)) * Rational::from(s.d as i64).pow(j);
        line[(lines - j) as usize] = GradedPoly::symbol_pow(table, sym.h, (j + p) as u8, coeff)
            .truncate(&base);
    }

    let cap = r + 2 + 2 * i;
    let min_xi = (r - 1) as usize;
    let head = xi_mul(&sym, &line, &top_chern, base, cap, 0);
    let mut f = xi_mul(&sym, &head, &series, base, cap, min_xi);

    // ξ^r = −c1 ξ^{r−1} − c2 ξ^{r−2} − c3 ξ^{r−3}, from the top down.
    let cq = sym_chern_coefficients(s.d);
    for k in (r as usize..f.len()).rev() {
        let top = std::mem::replace(&mut f[k], GradedPoly::zero(table));
        if top.is_zero() {
            continue;
        }
        for (j, cj) in cq.iter().enumerate().skip(1) {
            let target = k - j;
            if target < min_xi {
                continue;
            }
            let rules = base.with_cap(Some(cap - target as u32));
            let term = GradedPoly::symbol_pow(table, sym.h, j as u8, -cj);
            let prod = top.mul(&term, &rules);
            f[target].add_assign_scaled(&prod, &Rational::one());
        }
    }
    let q = f
        .get(min_xi)
        .cloned()
        .unwrap_or_else(|| GradedPoly::zero(table));

    let dim = s.dimension();
    let rules = base.with_cap(Some(dim));
    let mut poly = GradedPoly::zero(table);
    for m in 0..=2 * i {
        poly.add_assign_scaled(&sym.chern_t(m).mul(&q, &rules), &Rational::one());
    }
    if options.top_degree_only {
        poly = poly.homogeneous_part(dim);
    }
    Ok(Integrand {
        spec: s,
        options: *options,
        symbols: sym,
        poly,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn genus_values() {
        assert_eq!(genus(1), 0);
        assert_eq!(genus(3), 1);
        assert_eq!(genus(5), 6);
    }

    #[test]
    fn bps_small_cases() {
        assert_eq!(bps_coefficients(0, 3).a, vec![r(1)]);
        for g in 0..6 {
            assert_eq!(bps_coefficients(1, g).a, vec![r(2 * g - 2), r(1)]);
        }
        for delta in 0..8 {
            assert_eq!(bps_coefficients(delta, 4).a.last(), Some(&r(1)));
        }
    }

    #[test]
    fn sym_chern_values() {
        let mut t = SymbolTable::new();
        let h = t.push("H", 1, Some(4));
        let t = Arc::new(t);
        let poly = |cs: [i64; 4]| {
            cs.iter().enumerate().fold(GradedPoly::zero(&t), |acc, (j, &c)| {
                &acc + &GradedPoly::symbol_pow(&t, h, j as u8, r(c))
            })
        };
        assert_eq!(sym_chern_in(1, &t, h), poly([1, 1, 1, 1]));
        assert_eq!(sym_chern_in(2, &t, h), poly([1, 4, 10, 20]));
        // d = 1: c(U^∨) with c(U) = 1/(1+H), i.e. the inverse of 1 − H.
        let alt = poly([1, -1, 0, 0]);
        let rules = Truncation::new(true, None);
        assert_eq!(sym_chern_in(1, &t, h).mul(&alt, &rules), GradedPoly::one(&t));
    }

    #[test]
    fn spec_validation() {
        assert!(IntegrandSpec::new(0, 0, 1, Mode::P3).is_ok());
        assert!(IntegrandSpec::new(2, 1, 3, Mode::P3).is_err());
        assert!(IntegrandSpec::new(0, 3, 1, Mode::P3).is_err());
        assert!(IntegrandSpec::new(0, 0, 1, Mode::P2Fixed).is_err());
        assert!(IntegrandSpec::new(0, 0, 2, Mode::P2Fixed).is_ok());
        assert!(IntegrandSpec::new(0, 0, 0, Mode::P3).is_err());
        let s = IntegrandSpec::new(0, 0, 2, Mode::P3).unwrap();
        assert_eq!((s.n, s.r), (8, 6));
        assert!(s.with_plane_points(4).is_err());
    }

    #[test]
    fn lines_have_zero_integrand() {
        let s = IntegrandSpec::new(0, 0, 1, Mode::P3).unwrap();
        assert!(build_integrand(&s).unwrap().poly.is_zero());
        let full = IntegrandOptions {
            top_degree_only: false,
            ..Default::default()
        };
        assert!(build_integrand_with(&s, &full).unwrap().poly.is_zero());
    }

    #[test]
    fn untwisted_integrand_is_in_h_only() {
        for (delta, d) in [(0, 2), (1, 3), (2, 4)] {
            let s = IntegrandSpec::new(0, delta, d, Mode::P3).unwrap();
            let ig = build_integrand(&s).unwrap();
            assert_eq!(ig.symbols.table.len(), 1);
            assert!(ig.poly.max_degree().unwrap_or(0) <= 3);
        }
        // Conics through 8 lines: the integrand is 92·H³.
        let s = IntegrandSpec::new(0, 0, 2, Mode::P3).unwrap();
        let ig = build_integrand(&s).unwrap();
        let expected = GradedPoly::symbol_pow(&ig.symbols.table, ig.symbols.h, 3, r(92));
        assert_eq!(ig.poly, expected);
    }

    #[test]
    fn degree_bounded_by_dimension() {
        let s = IntegrandSpec::new(2, 2, 3, Mode::P3).unwrap();
        let full = IntegrandOptions {
            top_degree_only: false,
            ..Default::default()
        };
        let ig = build_integrand_with(&s, &full).unwrap();
        assert!(ig.poly.max_degree().unwrap() <= 7);
        let top = build_integrand(&s).unwrap();
        assert_eq!(top.poly, ig.poly.homogeneous_part(7));
        assert!(top.dump().lines().count() == top.poly.len() + 1);
    }
}
