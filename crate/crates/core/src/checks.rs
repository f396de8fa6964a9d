//! Verification suite shared by the command line and the tests: published
//! reference values, independent oracles, and consistency properties.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::crosscheck::{nu_class, reducible_count};
use crate::error::Result;
use crate::fixed_points::{plane_points, Partition};
use crate::integrand::{bps_coefficients, line_count, IntegrandOptions, Mode};
use crate::localization::{count_nodal_with, LocalizationOptions};
use crate::weights::{chart_weights, hilb_tangent_weights, Character, Specialization};

/// `(d, δ, lines, coefficient)`: the class of `(d, δ)` curves meeting that
/// many lines is `coefficient · H^h`.
pub const NU_TABLE: [(u32, u32, u32, i64); 12] = [
    (1, 0, 2, 1),
    (1, 0, 3, 2),
    (1, 0, 4, 2),
    (1, 0, 5, 0),
    (2, 0, 5, 1),
    (2, 0, 6, 8),
    (2, 0, 7, 34),
    (2, 0, 8, 92),
    (3, 1, 8, 12),
    (3, 1, 9, 216),
    (3, 1, 10, 2040),
    (3, 1, 11, 12960),
];

/// Smooth curves: `N_{0,d}` for `d = 1..5`.
pub const SMOOTH_COUNTS: [(u32, u64); 5] = [(1, 0), (2, 92), (3, 1500), (4, 11780), (5, 61880)];

/// `(δ, d, N_{δ,d})` for curves that are all totally reducible.
pub const TABLE_CASES: [(u32, u32, u64); 8] = [
    (1, 2, 140),
    (3, 3, 7280),
    (6, 4, 261800),
    (0, 2, 92),
    (2, 3, 15660),
    (5, 4, 1303500),
    (4, 4, 3071796),
    (8, 5, 385022820),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn from_result(name: impl Into<String>, r: Result<CheckOutcome>) -> Self {
        let name = name.into();
        r.unwrap_or_else(|e| CheckOutcome::new(name, false, format!("error: {e}")))
    }
}

/// The ν table by the Chow-ring route and by localization with point
/// conditions in the plane.
pub fn calibration(opts: &LocalizationOptions) -> Vec<CheckOutcome> {
    NU_TABLE
        .iter()
        .map(|&(d, delta, n, expected)| {
            let name = format!("nu(d={d},delta={delta},n={n})");
            CheckOutcome::from_result(name.clone(), (|| {
                let chow = nu_class(d, delta, n)?;
                let full = line_count(d, delta) as u32;
                let local = count_nodal_with(delta, d, Mode::P3, full - n, opts)?.value;
                let want = BigInt::from(expected);
                let passed = chow.coefficient == want && local == want;
                Ok(CheckOutcome::new(
                    name,
                    passed,
                    format!(
                        "expected {expected}·H^{}, chow {}, localization {local}",
                        chow.h_power, chow.coefficient
                    ),
                ))
            })())
        })
        .collect()
}

/// Counts of smooth curves by localization.
pub fn smooth_calibration(opts: &LocalizationOptions) -> Vec<CheckOutcome> {
    SMOOTH_COUNTS
        .iter()
        .map(|&(d, expected)| {
            let name = format!("N(delta=0,d={d})");
            CheckOutcome::from_result(name.clone(), (|| {
                let local = count_nodal_with(0, d, Mode::P3, 0, opts)?.value;
                Ok(CheckOutcome::new(
                    name,
                    local == BigInt::from(expected),
                    format!("expected {expected}, localization {local}"),
                ))
            })())
        })
        .collect()
}

/// Table values by localization and by reducible decompositions.
pub fn tables(opts: &LocalizationOptions) -> Vec<CheckOutcome> {
    TABLE_CASES
        .iter()
        .map(|&(delta, d, expected)| table_case(delta, d, expected, opts))
        .collect()
}

pub fn table_case(delta: u32, d: u32, expected: u64, opts: &LocalizationOptions) -> CheckOutcome {
    let name = format!("N(delta={delta},d={d})");
    CheckOutcome::from_result(name.clone(), (|| {
        let local = count_nodal_with(delta, d, Mode::P3, 0, opts)?.value;
        let combinatorial = reducible_count(delta, d)?;
        let want = BigInt::from(expected);
        Ok(CheckOutcome::new(
            name,
            local == want && combinatorial == want,
            format!("expected {expected}, localization {local}, combinatorial {combinatorial}"),
        ))
    })())
}

/// BPS coefficients recovered from the defining series by forward
/// substitution: row `δ` solves `P_i = Σ_j [q^{i−j}](1−q)^{2(g−j)−2} n_j`.
pub fn bps_by_series(delta: u32, g: i64) -> Vec<Rational> {
    let len = delta as usize + 1;
    let series = |m: i64| -> Vec<Rational> {
        let mut s = vec![Rational::zero(); len];
        s[0] = Rational::one();
        let factor: Vec<Rational> = if m >= 0 {
            let mut f = vec![Rational::zero(); len];
            f[0] = Rational::one();
            if len > 1 {
                f[1] = -Rational::one();
            }
            f
        } else {
            vec![Rational::one(); len]
        };
        for _ in 0..m.unsigned_abs() {
            let mut next = vec![Rational::zero(); len];
            for (i, a) in s.iter().enumerate() {
                for (j, b) in factor.iter().enumerate().take(len - i) {
                    next[i + j] += a * b;
                }
            }
            s = next;
        }
        s
    };
    let columns: Vec<Vec<Rational>> = (0..len).map(|j| series(2 * (g - j as i64) - 2)).collect();
    let entry = |i: usize, j: usize| -> &Rational { &columns[j][i - j] };
    (0..len)
        .map(|col| {
            let mut n = vec![Rational::zero(); len];
            for i in 0..len {
                let mut rhs = if i == col { Rational::one() } else { Rational::zero() };
                for (j, nj) in n.iter().enumerate().take(i) {
                    rhs -= entry(i, j) * nj;
                }
                n[i] = rhs / entry(i, i).clone();
            }
            n[delta as usize].clone()
        })
        .collect()
}

pub fn bps_oracle(max_delta: u32, max_genus: i64) -> CheckOutcome {
    let mut checked = 0;
    for delta in 0..=max_delta {
        for g in 0..=max_genus {
            if bps_coefficients(delta, g).a != bps_by_series(delta, g) {
                return CheckOutcome::new(
                    "bps",
                    false,
                    format!("mismatch at delta={delta}, g={g}"),
                );
            }
            checked += 1;
        }
    }
    CheckOutcome::new("bps", true, format!("{checked} (delta, g) pairs agree"))
}

/// Minimal monomial generators `(a, b)` ↔ `u^a v^b` of the ideal of `mu`.
pub fn ideal_generators(mu: &Partition) -> Vec<(i64, i64)> {
    let parts = mu.parts();
    let mut gens = Vec::new();
    for b in 0..=parts.len() {
        let row = parts.get(b).copied().unwrap_or(0);
        if b == 0 || row < parts[b - 1] {
            gens.push((row as i64, b as i64));
        }
    }
    gens
}

/// Tangent characters at the monomial ideal of `mu`, read off from the
/// torus decomposition of `Hom(I, O/I)` by linear algebra. `tu`, `tv` are
/// the characters of the tangent directions `∂_u`, `∂_v`.
pub fn hom_tangent_characters(mu: &Partition, tu: Character, tv: Character) -> Vec<Character> {
    let is_cell = |(a, b): (i64, i64)| a >= 0 && b >= 0 && mu.contains((a as u32, b as u32));
    let gens = ideal_generators(mu);
    let reach = mu.parts().first().copied().unwrap_or(0) as i64 + mu.parts().len() as i64 + 1;
    let mut out = Vec::new();
    for wu in -reach..=reach {
        for wv in -reach..=reach {
            // Unknowns: the coefficient of φ(g) = c_g u^{g+w} for generators
            // whose image is a nonzero monomial of the quotient.
            let unknowns: Vec<usize> = (0..gens.len())
                .filter(|&k| is_cell((gens[k].0 + wu, gens[k].1 + wv)))
                .collect();
            if unknowns.is_empty() {
                continue;
            }
            let col = |k: usize| unknowns.iter().position(|&x| x == k);
            let mut rows: Vec<Vec<Rational>> = Vec::new();
            for x in 0..gens.len() {
                for y in x + 1..gens.len() {
                    let lcm = (gens[x].0.max(gens[y].0), gens[x].1.max(gens[y].1));
                    if !is_cell((lcm.0 + wu, lcm.1 + wv)) {
                        continue;
                    }
                    let mut row = vec![Rational::zero(); unknowns.len()];
                    if let Some(c) = col(x) {
                        row[c] += Rational::one();
                    }
                    if let Some(c) = col(y) {
                        row[c] -= Rational::one();
                    }
                    rows.push(row);
                }
            }
            let dim = unknowns.len() - rank(rows);
            let c = tu.pow(-wu) * tv.pow(-wv);
            out.extend(std::iter::repeat_n(c, dim));
        }
    }
    out
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r][c].clone();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                let pr = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    r
}

/// The arm/leg tangent weights against the `Hom(I, O/I)` oracle, for all
/// partitions up to `max_size` at all twelve charts.
pub fn weights_oracle(max_size: u32, spec: &Specialization) -> CheckOutcome {
    let mut combos = 0;
    for k in 0..4 {
        for m in plane_points(k) {
            let (t1, t2) = chart_weights(k, m);
            for n in 0..=max_size {
                for mu in Partition::all(n) {
                    combos += 1;
                    let mut ours = hilb_tangent_weights(&mu, t1, t2);
                    let mut oracle = hom_tangent_characters(&mu, t1.inv(), t2.inv());
                    ours.sort();
                    oracle.sort();
                    let mut a: Vec<Rational> = ours.iter().map(|c| spec.eval(c)).collect();
                    let mut b: Vec<Rational> = oracle.iter().map(|c| spec.eval(c)).collect();
                    a.sort();
                    b.sort();
                    if ours != oracle || a != b {
                        return CheckOutcome::new(
                            "weights",
                            false,
                            format!("mismatch for {mu} at chart ({k},{m})"),
                        );
                    }
                }
            }
        }
    }
    CheckOutcome::new(
        "weights",
        true,
        format!("{combos} partition-chart combinations agree"),
    )
}

/// Dual specialization, `H⁴` on/off, shuffled summation and integrality
/// on every admissible `(δ, d)` with `δ ≤ max_delta`, `d ≤ max_degree`.
pub fn specialization_grid(
    max_delta: u32,
    max_degree: u32,
    opts: &LocalizationOptions,
) -> Vec<CheckOutcome> {
    let mut out = Vec::new();
    for delta in 0..=max_delta {
        for d in 1..=max_degree {
            if line_count(d, delta) < 3 {
                continue;
            }
            let name = format!("grid(delta={delta},d={d})");
            out.push(CheckOutcome::from_result(name.clone(), (|| {
                let verified = LocalizationOptions {
                    verify: true,
                    ..opts.clone()
                };
                let base = count_nodal_with(delta, d, Mode::P3, 0, &verified)?.value;
                let no_h4 = LocalizationOptions {
                    integrand: IntegrandOptions {
                        h4: false,
                        ..opts.integrand
                    },
                    ..opts.clone()
                };
                let without = count_nodal_with(delta, d, Mode::P3, 0, &no_h4)?.value;
                let shuffled = LocalizationOptions {
                    shuffle_seed: Some(u64::from(17 * delta + d)),
                    specialization: Specialization::from_seed(u64::from(1000 + 10 * delta + d)),
                    ..opts.clone()
                };
                let reordered = count_nodal_with(delta, d, Mode::P3, 0, &shuffled)?.value;
                let nonneg = base >= BigInt::from(0);
                Ok(CheckOutcome::new(
                    name,
                    base == without && base == reordered && nonneg,
                    format!("{base} (no H^4: {without}, shuffled: {reordered})"),
                ))
            })()));
        }
    }
    out
}
