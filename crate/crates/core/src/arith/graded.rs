use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::Rational;
use crate::error::{Error, Result};

pub type SymbolId = usize;

/// Exponent vector over a symbol table, one slot per symbol.
pub type Exponents = SmallVec<[u8; 32]>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    /// Cohomological degree.
    pub degree: u32,
    /// `Some(k)` when `symbol^k = 0` may be imposed.
    pub nilpotency: Option<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<Symbol>,
}

impl SymbolTable {
    pub fn new() -> Self {
        SymbolTable::default()
    }

    pub fn push(&mut self, name: impl Into<String>, degree: u32, nilpotency: Option<u32>) -> SymbolId {
        self.symbols.push(Symbol {
            name: name.into(),
            degree,
            nilpotency,
        });
        self.symbols.len() - 1
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: SymbolId) -> &Symbol {
        &self.symbols[id]
    }

    pub fn find(&self, name: &str) -> Option<SymbolId> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.iter()
    }

    pub fn degree_of(&self, exps: &[u8]) -> u32 {
        exps.iter()
            .zip(&self.symbols)
            .map(|(&e, s)| e as u32 * s.degree)
            .sum()
    }
}

/// Truncation rules applied to every product. Kept separate from the
/// polynomial type so the same classes can be manipulated with or without
/// the nilpotency relations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    pub nilpotency: bool,
    pub degree_cap: Option<u32>,
}

impl Truncation {
    pub const NONE: Truncation = Truncation {
        nilpotency: false,
        degree_cap: None,
    };

    pub fn new(nilpotency: bool, degree_cap: Option<u32>) -> Self {
        Truncation {
            nilpotency,
            degree_cap,
        }
    }

    pub fn with_cap(self, cap: Option<u32>) -> Self {
        Truncation {
            degree_cap: cap,
            ..self
        }
    }

    fn admits(&self, table: &SymbolTable, exps: &[u8]) -> bool {
        if self.nilpotency {
            for (&e, s) in exps.iter().zip(&table.symbols) {
                if let Some(k) = s.nilpotency {
                    if e as u32 >= k {
                        return false;
                    }
                }
            }
        }
        match self.degree_cap {
            Some(cap) => table.degree_of(exps) <= cap,
            None => true,
        }
    }
}

/// Sparse multivariate polynomial in graded formal symbols.
#[derive(Clone)]
pub struct GradedPoly {
    table: Arc<SymbolTable>,
    terms: BTreeMap<Exponents, Rational>,
}

impl GradedPoly {
    pub fn zero(table: &Arc<SymbolTable>) -> Self {
        GradedPoly {
            table: Arc::clone(table),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(table: &Arc<SymbolTable>, c: Rational) -> Self {
        let exps: Exponents = SmallVec::from_elem(0, table.len());
        Self::monomial(table, exps, c)
    }

    pub fn one(table: &Arc<SymbolTable>) -> Self {
        Self::constant(table, Rational::one())
    }

    pub fn symbol(table: &Arc<SymbolTable>, id: SymbolId) -> Self {
        Self::symbol_pow(table, id, 1, Rational::one())
    }

    /// `c * symbol^e`.
    pub fn symbol_pow(table: &Arc<SymbolTable>, id: SymbolId, e: u8, c: Rational) -> Self {
        let mut exps: Exponents = SmallVec::from_elem(0, table.len());
        exps[id] = e;
        Self::monomial(table, exps, c)
    }

    pub fn monomial(table: &Arc<SymbolTable>, exps: Exponents, c: Rational) -> Self {
        assert_eq!(exps.len(), table.len(), "exponent vector does not match symbol table");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        GradedPoly {
            table: Arc::clone(table),
            terms,
        }
    }

    pub fn table(&self) -> &Arc<SymbolTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u8]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// Highest cohomological degree among the terms.
    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| self.table.degree_of(e)).max()
    }

    pub fn homogeneous_part(&self, degree: u32) -> Self {
        self.filter(|e| self.table.degree_of(e) == degree)
    }

    pub fn filter(&self, keep: impl Fn(&[u8]) -> bool) -> Self {
        GradedPoly {
            table: Arc::clone(&self.table),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn truncate(&self, rules: &Truncation) -> Self {
        self.filter(|e| rules.admits(&self.table, e))
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return GradedPoly::zero(&self.table);
        }
        GradedPoly {
            table: Arc::clone(&self.table),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &GradedPoly, s: &Rational) {
        self.check_table(other);
        if s.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            accumulate(&mut self.terms, e.clone(), c * s);
        }
    }

    fn check_table(&self, other: &GradedPoly) {
        debug_assert!(
            Arc::ptr_eq(&self.table, &other.table) || *self.table == *other.table,
            "graded polynomials over different symbol tables"
        );
    }

    /// Product with the truncation rules applied term by term.
    pub fn mul(&self, other: &GradedPoly, rules: &Truncation) -> GradedPoly {
        self.check_table(other);
        let mut acc: HashMap<Exponents, Rational> = HashMap::new();
        let cap = rules.degree_cap;
        for (ea, ca) in &self.terms {
            let da = self.table.degree_of(ea);
            if cap.is_some_and(|c| da > c) {
                continue;
            }
            for (eb, cb) in &other.terms {
                if let Some(c) = cap {
                    if da + self.table.degree_of(eb) > c {
                        continue;
                    }
                }
                let exps: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                if !rules.admits(&self.table, &exps) {
                    continue;
                }
                let prod = ca * cb;
                match acc.get_mut(&exps) {
                    Some(v) => *v += prod,
                    None => {
                        acc.insert(exps, prod);
                    }
                }
            }
        }
        GradedPoly {
            table: Arc::clone(&self.table),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, e: u32, rules: &Truncation) -> GradedPoly {
        (0..e).fold(GradedPoly::one(&self.table), |acc, _| acc.mul(self, rules))
    }

    /// Exact evaluation; every symbol that occurs must be assigned.
    pub fn eval(&self, assignment: &HashMap<SymbolId, Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (exps, c) in &self.terms {
            let mut v = c.clone();
            for (id, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = assignment
                    .get(&id)
                    .ok_or_else(|| Error::MissingSymbol(self.table.symbol(id).name.clone()))?;
                v *= x.pow(e as u32);
            }
            total += v;
        }
        Ok(total)
    }

    /// Integer form for repeated evaluation at integer points.
    pub fn integer_form(&self) -> IntegerPoly {
        IntegerPoly::new(self)
    }
}

fn accumulate(terms: &mut BTreeMap<Exponents, Rational>, exps: Exponents, c: Rational) {
    use std::collections::btree_map::Entry;
    match terms.entry(exps) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

impl PartialEq for GradedPoly {
    fn eq(&self, other: &Self) -> bool {
        *self.table == *other.table && self.terms == other.terms
    }
}

impl Eq for GradedPoly {}

impl Add<&GradedPoly> for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub<&GradedPoly> for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (exps, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c:?})")?;
            for (id, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*{}", self.table.symbol(id).name)?,
                    _ => write!(f, "*{}^{}", self.table.symbol(id).name, e)?,
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedPoly({self})")
    }
}

/// A graded polynomial with its coefficients brought to a common
/// denominator, evaluated in integer arithmetic.
#[derive(Debug, Clone)]
pub struct IntegerPoly {
    denom: BigInt,
    max_exp: Vec<u8>,
    terms: Vec<(Vec<(u16, u8)>, BigInt)>,
}

impl IntegerPoly {
    fn new(p: &GradedPoly) -> Self {
        let denom = p
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut max_exp = vec![0u8; p.table.len()];
        let terms = p
            .terms
            .iter()
            .map(|(exps, c)| {
                let sparse: Vec<(u16, u8)> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(id, &e)| {
                        max_exp[id] = max_exp[id].max(e);
                        (id as u16, e)
                    })
                    .collect();
                let scaled = c.numer() * (&denom / c.denom());
                (sparse, scaled)
            })
            .collect();
        IntegerPoly {
            denom,
            max_exp,
            terms,
        }
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Numerator of the value at `values`; the value is `numer / denom()`.
    /// `values[id]` is only read for symbols that occur.
    pub fn eval_numer(&self, values: &[BigInt]) -> BigInt {
        let powers: Vec<Vec<BigInt>> = self
            .max_exp
            .iter()
            .enumerate()
            .map(|(id, &m)| {
                let mut pw = Vec::with_capacity(m as usize + 1);
                if m > 0 {
                    pw.push(BigInt::one());
                    for k in 1..=m as usize {
                        let next = &pw[k - 1] * &values[id];
                        pw.push(next);
                    }
                }
                pw
            })
            .collect();
        let mut total = BigInt::zero();
        for (mono, c) in &self.terms {
            let mut v = c.clone();
            for &(id, e) in mono {
                v *= &powers[id as usize][e as usize];
                if v.is_zero() {
                    break;
                }
            }
            total += v;
        }
        total
    }

    pub fn eval(&self, values: &[BigInt]) -> Rational {
        Rational::new(self.eval_numer(values), self.denom.clone())
    }
}
