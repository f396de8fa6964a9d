//! Independent oracles and fixtures for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use nodal_core::arith::{Rational, UniPoly};
use nodal_core::fixed_points::Partition;
use nodal_core::weights::Character;

/// `δ!·N_δ(d)` for `δ = 0..12`, parsed from the fixture file.
pub fn ordered_node_polynomials() -> Vec<UniPoly> {
    let text = include_str!("../fixtures/ordered_node_polynomials.txt");
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let delta: usize = fields[0].parse().unwrap();
        assert_eq!(delta, out.len(), "fixtures must be listed in order");
        let scale: Rational = fields[1].parse().unwrap();
        let mut poly = UniPoly::constant(scale);
        let mut rest = fields[2];
        while let Some(open) = rest.find('[') {
            let close = rest.find(']').unwrap();
            let factor = parse_poly(&rest[open + 1..close]);
            rest = &rest[close + 1..];
            let mut power = 1;
            if let Some(tail) = rest.strip_prefix('^') {
                let end = tail.find(|c: char| !c.is_ascii_digit()).unwrap_or(tail.len());
                power = tail[..end].parse().unwrap();
                rest = &tail[end..];
            }
            poly = &poly * &factor.pow(power);
        }
        out.push(poly);
    }
    out
}

/// Parses sums of terms like `18d^12`, `-10d`, `+3`.
fn parse_poly(s: &str) -> UniPoly {
    let mut coeffs: Vec<i128> = Vec::new();
    let mut terms = Vec::new();
    let mut start = 0;
    for (i, c) in s.char_indices() {
        if (c == '+' || c == '-') && i > 0 {
            terms.push(&s[start..i]);
            start = i;
        }
    }
    terms.push(&s[start..]);
    for t in terms {
        let (sign, body) = match t.strip_prefix('-') {
            Some(b) => (-1i128, b),
            None => (1, t.strip_prefix('+').unwrap_or(t)),
        };
        let (coef, exp) = match body.find('d') {
            None => (body.parse::<i128>().unwrap(), 0usize),
            Some(p) => {
                let coef = if p == 0 { 1 } else { body[..p].parse().unwrap() };
                let exp = match body[p + 1..].strip_prefix('^') {
                    Some(e) => e.parse().unwrap(),
                    None => 1,
                };
                (coef, exp)
            }
        };
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, 0);
        }
        coeffs[exp] += sign * coef;
    }
    UniPoly::new(coeffs.into_iter().map(Rational::from).collect())
}

/// Tangent characters at the monomial ideal of `mu` from `Hom(I, O/I)`.
///
/// In weight `w` a homomorphism sends each monomial `m ∈ I` to `c_m·u^{m+w}`.
/// Linearity over `u` and `v` forces `c_{xm} = c_m`, with `c = 0` wherever
/// `m + w` is not a standard monomial. The weight space has one dimension
/// per class of the generated equivalence relation that avoids zero.
pub fn hom_oracle(mu: &Partition, tu: Character, tv: Character) -> Vec<Character> {
    let is_cell = |a: i64, b: i64| a >= 0 && b >= 0 && mu.contains((a as u32, b as u32));
    let in_ideal = |a: i64, b: i64| a >= 0 && b >= 0 && !mu.contains((a as u32, b as u32));
    let width = mu.parts().first().copied().unwrap_or(0) as i64;
    let height = mu.parts().len() as i64;
    let mut out = Vec::new();
    for wu in -(width + 1)..=width + 1 {
        for wv in -(height + 1)..=height + 1 {
            // Monomials m ∈ I whose image can be nonzero, plus their
            // neighbours below, which may force zeros.
            let mut index: HashMap<(i64, i64), usize> = HashMap::new();
            let mut parent: Vec<usize> = Vec::new();
            let mut zero: Vec<bool> = Vec::new();
            let node = |m: (i64, i64),
                        index: &mut HashMap<(i64, i64), usize>,
                        parent: &mut Vec<usize>,
                        zero: &mut Vec<bool>| {
                *index.entry(m).or_insert_with(|| {
                    parent.push(parent.len());
                    zero.push(!is_cell(m.0 + wu, m.1 + wv));
                    parent.len() - 1
                })
            };
            fn find(parent: &mut [usize], x: usize) -> usize {
                let mut r = x;
                while parent[r] != r {
                    r = parent[r];
                }
                parent[x] = r;
                r
            }
            let reach = 2 * (width + height) + 2;
            for a in 0..=reach {
                for b in 0..=reach {
                    if !in_ideal(a, b) {
                        continue;
                    }
                    for (x, y) in [(a + 1, b), (a, b + 1)] {
                        let src_live = is_cell(a + wu, b + wv);
                        let dst_live = is_cell(x + wu, y + wv);
                        if !src_live && !dst_live {
                            continue;
                        }
                        let i = node((a, b), &mut index, &mut parent, &mut zero);
                        let j = node((x, y), &mut index, &mut parent, &mut zero);
                        if dst_live || !src_live {
                            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                            if ri != rj {
                                parent[ri] = rj;
                                let z = zero[ri] || zero[rj];
                                zero[rj] = z;
                            }
                        }
                        // A live image multiplied into the ideal is zero, so
                        // a dead target imposes nothing on the source.
                    }
                }
            }
            let mut classes = std::collections::HashSet::new();
            for x in 0..parent.len() {
                let r = find(&mut parent, x);
                if !zero[r] {
                    classes.insert(r);
                }
            }
            let c = tu.pow(-wu) * tv.pow(-wv);
            out.extend(std::iter::repeat_n(c, classes.len()));
        }
    }
    out
}

/// Checks a BPS coefficient row against the defining series: for every
/// `j ≤ δ`, `Σ_i a_i·[q^i] q^j(1−q)^{2(g−j)−2}` is 1 when `j = δ`, else 0.
pub fn bps_row_satisfies_series(a: &[Rational], g: i64) -> bool {
    let delta = a.len() - 1;
    let len = delta + 1;
    let one_minus_q_pow = |m: i64| -> Vec<Rational> {
        // Multiply out (1−q)^m or (1 + q + q² + ...)^{|m|} term by term.
        let step: Vec<Rational> = if m >= 0 {
            [1, -1].iter().map(|&c| Rational::from(c)).collect()
        } else {
            vec![Rational::one(); len]
        };
        let mut s = vec![Rational::one()];
        for _ in 0..m.unsigned_abs() {
            let mut next = vec![Rational::zero(); len];
            for (i, x) in s.iter().enumerate() {
                for (k, y) in step.iter().enumerate() {
                    if i + k < len {
                        next[i + k] += x * y;
                    }
                }
            }
            s = next;
        }
        s.resize(len, Rational::zero());
        s
    };
    (0..=delta).all(|j| {
        let series = one_minus_q_pow(2 * (g - j as i64) - 2);
        let total: Rational = (j..=delta).map(|i| &a[i] * &series[i - j]).sum();
        total == if j == delta { Rational::one() } else { Rational::zero() }
    })
}

/// One-nodal curves in a fixed plane through the expected number of
/// points: `∫ c₃(P¹(O(d)) ⊗ O(1)) · ξ^{N−1}` over `P² × P^N`, i.e. the
/// `h²ξ` coefficient of `m³ − 3hm² + 3h²m` with `m = dh + ξ`.
pub fn fixed_plane_one_node(d: i64) -> i64 {
    // Polynomials in h, ξ as maps (h-exponent, ξ-exponent) → coefficient.
    type P = HashMap<(u32, u32), i64>;
    let mul = |a: &P, b: &P| -> P {
        let mut out = P::new();
        for (&(h1, x1), c1) in a {
            for (&(h2, x2), c2) in b {
                if h1 + h2 <= 2 {
                    *out.entry((h1 + h2, x1 + x2)).or_default() += c1 * c2;
                }
            }
        }
        out
    };
    let m: P = [((1, 0), d), ((0, 1), 1)].into_iter().collect();
    let h: P = [((1, 0), 1)].into_iter().collect();
    let m2 = mul(&m, &m);
    let m3 = mul(&m2, &m);
    let t2 = mul(&mul(&h, &m2), &[((0, 0), -3)].into_iter().collect());
    let t3 = mul(&mul(&mul(&h, &h), &m), &[((0, 0), 3)].into_iter().collect());
    [m3, t2, t3]
        .iter()
        .map(|p| p.get(&(2, 1)).copied().unwrap_or(0))
        .sum()
}
