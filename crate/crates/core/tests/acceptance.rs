//! Acceptance suite: one line per criterion, calibration first. Runs
//! without the test harness so the report is always printed.

mod common;

use num_bigint::BigInt;
use nodal_core::arith::Rational;
use nodal_core::checks::{self, CheckOutcome, NU_TABLE, TABLE_CASES};
use nodal_core::crosscheck::{nu_class, reducible_count};
use nodal_core::fixed_points::{plane_points, Partition};
use nodal_core::integrand::{bps_coefficients, line_count, Mode};
use nodal_core::localization::{count_nodal_with, LocalizationOptions};
use nodal_core::node_polynomials::node_polynomial;
use nodal_core::weights::{chart_weights, hilb_tangent_weights, Specialization};

struct Report {
    lines: Vec<(u32, bool, String)>,
}

impl Report {
    fn record(&mut self, criterion: u32, title: &str, passed: bool, detail: String) {
        println!(
            "criterion {criterion} [{}] {title}: {detail}",
            if passed { "PASS" } else { "FAIL" }
        );
        self.lines.push((criterion, passed, detail));
    }
}

fn failures(outcomes: &[CheckOutcome]) -> Vec<String> {
    outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("{}: {}", o.name, o.detail))
        .collect()
}

fn verified() -> LocalizationOptions {
    LocalizationOptions {
        verify: true,
        ..Default::default()
    }
}

fn calibration() -> (bool, String) {
    let mut bad = Vec::new();
    for &(d, delta, n, expected) in &NU_TABLE {
        let full = line_count(d, delta) as u32;
        let chow = nu_class(d, delta, n).map(|c| (c.coefficient, c.h_power));
        let local = count_nodal_with(delta, d, Mode::P3, full - n, &verified()).map(|c| c.value);
        let want = BigInt::from(expected);
        let h = 3 - (full - n);
        match (chow, local) {
            (Ok((c, hp)), Ok(l)) if c == want && hp == h && l == want => {}
            (chow, local) => bad.push(format!("nu({d},{delta},{n}): {chow:?} / {local:?}")),
        }
    }
    bad.extend(failures(&checks::smooth_calibration(&verified())));
    let ok = bad.is_empty();
    (
        ok,
        if ok {
            "12 nu entries (Chow ring and localization) and smooth counts d=1..5".into()
        } else {
            bad.join("; ")
        },
    )
}

fn tables() -> (bool, String) {
    let mut bad = Vec::new();
    for &(delta, d, expected) in &TABLE_CASES {
        match count_nodal_with(delta, d, Mode::P3, 0, &verified()) {
            Ok(c) if c.value == BigInt::from(expected) => {}
            other => bad.push(format!("({delta},{d}) expected {expected}, got {:?}", other.map(|c| c.value))),
        }
    }
    (bad.is_empty(), if bad.is_empty() { "8/8 table values exact".into() } else { bad.join("; ") })
}

fn node_polynomials() -> (bool, String) {
    let fixtures = common::ordered_node_polynomials();
    let mut bad = Vec::new();
    for delta in 0..=4u32 {
        match node_polynomial(delta, Mode::P3) {
            Ok(rec) if rec.ordered == fixtures[delta as usize] && rec.extra_samples_agree => {}
            Ok(rec) => bad.push(format!("delta={delta}: got {}", rec.ordered)),
            Err(e) => bad.push(format!("delta={delta}: {e}")),
        }
    }
    (
        bad.is_empty(),
        if bad.is_empty() { "delta=0..4 match coefficient by coefficient".into() } else { bad.join("; ") },
    )
}

fn dual_path() -> (bool, String) {
    let mut bad = Vec::new();
    for &(delta, d, _) in &TABLE_CASES {
        let local = count_nodal_with(delta, d, Mode::P3, 0, &LocalizationOptions::default()).map(|c| c.value);
        let comb = reducible_count(delta, d);
        match (local, comb) {
            (Ok(a), Ok(b)) if a == b => {}
            (a, b) => bad.push(format!("({delta},{d}): {a:?} vs {b:?}")),
        }
    }
    (bad.is_empty(), if bad.is_empty() { "8/8 cases agree".into() } else { bad.join("; ") })
}

fn bps() -> (bool, String) {
    let mut bad = Vec::new();
    for delta in 0..=12u32 {
        for g in 0..=40i64 {
            let row = bps_coefficients(delta, g);
            if !common::bps_row_satisfies_series(&row.a, g) || row.a[delta as usize] != Rational::one() {
                bad.push(format!("(delta={delta}, g={g})"));
            }
        }
    }
    (bad.is_empty(), if bad.is_empty() { "all delta<=12, g<=40".into() } else { bad.join(", ") })
}

fn tangent_weights() -> (bool, String) {
    let spec = Specialization::from_i64([2, 17, 103, 1009]).unwrap();
    let mut combos = 0;
    let mut bad = Vec::new();
    for k in 0..4 {
        for m in plane_points(k) {
            let (t1, t2) = chart_weights(k, m);
            for n in 0..=5 {
                for mu in Partition::all(n) {
                    combos += 1;
                    let mut ours: Vec<Rational> =
                        hilb_tangent_weights(&mu, t1, t2).iter().map(|c| spec.eval(c)).collect();
                    let mut oracle: Vec<Rational> =
                        common::hom_oracle(&mu, t1.inv(), t2.inv()).iter().map(|c| spec.eval(c)).collect();
                    ours.sort();
                    oracle.sort();
                    if ours != oracle {
                        bad.push(format!("{mu} at ({k},{m})"));
                    }
                }
            }
        }
    }
    (
        bad.is_empty(),
        if bad.is_empty() {
            format!("{combos} partition-chart combinations (sizes 0..5) agree")
        } else {
            bad.join(", ")
        },
    )
}

fn robustness() -> (bool, String) {
    let outcomes = checks::specialization_grid(3, 6, &LocalizationOptions::default());
    let bad = failures(&outcomes);
    (
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} grid cases: dual specialization, H^4 on/off, shuffle, integrality", outcomes.len())
        } else {
            bad.join("; ")
        },
    )
}

fn fixed_plane() -> (bool, String) {
    let mut bad = Vec::new();
    match node_polynomial(1, Mode::P2Fixed) {
        Ok(rec) => {
            if rec.polynomial.degree() != Some(2) {
                bad.push(format!("delta=1 degree {:?}", rec.polynomial.degree()));
            }
            for d in 2..=30i64 {
                let want = Rational::from(common::fixed_plane_one_node(d));
                if rec.polynomial.eval(&Rational::from(d)) != want {
                    bad.push(format!("delta=1 at d={d}"));
                }
            }
        }
        Err(e) => bad.push(format!("delta=1: {e}")),
    }
    for delta in 2..=3 {
        match node_polynomial(delta, Mode::P2Fixed) {
            Ok(rec) if rec.extra_samples_agree => {}
            Ok(_) => bad.push(format!("delta={delta} unstable")),
            Err(e) => bad.push(format!("delta={delta}: {e}")),
        }
    }
    (
        bad.is_empty(),
        if bad.is_empty() { "delta=1 is 3(d-1)^2; delta=2,3 stable".into() } else { bad.join("; ") },
    )
}

fn main() {
    let mut report = Report { lines: Vec::new() };
    let (ok, detail) = calibration();
    report.record(4, "nu calibration", ok, detail);
    if !ok {
        for c in [1, 2, 3, 5, 6, 7, 8] {
            report.record(c, "skipped", false, "calibration failed".into());
        }
    } else {
        let (ok, detail) = tables();
        report.record(1, "table reproduction", ok, detail);
        let (ok, detail) = node_polynomials();
        report.record(2, "node polynomials", ok, detail);
        let (ok, detail) = dual_path();
        report.record(3, "dual-path agreement", ok, detail);
        let (ok, detail) = bps();
        report.record(5, "BPS oracle", ok, detail);
        let (ok, detail) = tangent_weights();
        report.record(6, "tangent-weight oracle", ok, detail);
        let (ok, detail) = robustness();
        report.record(7, "robustness properties", ok, detail);
        let (ok, detail) = fixed_plane();
        report.record(8, "fixed-plane mode", ok, detail);
    }
    let failed: Vec<u32> = report.lines.iter().filter(|l| !l.1).map(|l| l.0).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", report.lines.len());
    } else {
        eprintln!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}

