//! Bott residue evaluation of the integrands and the BPS-weighted count.

use std::collections::HashMap;

use log::{debug, warn};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::fixed_points::{enumerate_fixed_points, plane_points, FixedPoint, Partition};
use crate::integrand::{
    bps_coefficients, build_integrand_with, genus, Integrand, IntegrandOptions, IntegrandSpec, Mode,
};
use crate::weights::{
    chart_weights, convolve, elementary_symmetric, gr_tangent_weights, hilb_tangent_weights,
    hyperplane_weight, IntegerSpecialization, Perturbation, Specialization, WeightSystem,
};

#[derive(Debug, Clone)]
pub struct LocalizationOptions {
    pub specialization: Specialization,
    /// Replacement specializations tried after a vanishing tangent weight.
    pub max_resamples: u32,
    pub integrand: IntegrandOptions,
    pub perturbation: Perturbation,
    /// Repeat every integral under an independent specialization.
    pub verify: bool,
    /// Permute the fixed points before summing.
    pub shuffle_seed: Option<u64>,
}

impl Default for LocalizationOptions {
    fn default() -> Self {
        LocalizationOptions {
            specialization: Specialization::default(),
            max_resamples: 16,
            integrand: IntegrandOptions::default(),
            perturbation: Perturbation::None,
            verify: false,
            shuffle_seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub i: u32,
    pub delta: u32,
    pub d: u32,
    pub mode: Mode,
    pub plane_points: u32,
    pub value: Rational,
    pub spec_used: Specialization,
    pub fixed_point_count: usize,
}

/// Per-slot data: a partition at one chart of one plane.
#[derive(Debug, Clone)]
struct SlotData {
    hilb_e: Vec<BigInt>,
    taut_e: Vec<BigInt>,
    tangent_product: BigInt,
}

/// Specialized weights for every slot up to a given length.
struct SlotTable {
    slots: HashMap<(usize, usize, Partition), SlotData>,
    gr_euler: [BigInt; 4],
    h: [BigInt; 4],
}

impl SlotTable {
    fn new(
        ints: &IntegerSpecialization,
        d: u32,
        max_len: u32,
        perturbation: Perturbation,
    ) -> Result<Self> {
        let mut gr_euler: [BigInt; 4] = Default::default();
        let mut h: [BigInt; 4] = Default::default();
        for k in 0..4 {
            let mut prod = BigInt::one();
            for c in gr_tangent_weights(k) {
                prod *= ints.eval(&c);
            }
            if prod.is_zero() {
                return Err(Error::NonGeneric(format!("Grassmannian weight vanishes at V{k}")));
            }
            gr_euler[k] = prod;
            h[k] = ints.eval(&hyperplane_weight(k, perturbation));
        }
        let by_size: Vec<Vec<Partition>> = (0..=max_len).map(Partition::all).collect();
        let mut slots = HashMap::new();
        for k in 0..4 {
            for m in plane_points(k) {
                let (t1, t2) = chart_weights(k, m);
                for mu in by_size.iter().flatten() {
                    let tangent: Vec<BigInt> = hilb_tangent_weights(mu, t1, t2)
                        .iter()
                        .map(|c| ints.eval(c))
                        .collect();
                    if tangent.iter().any(Zero::is_zero) {
                        return Err(Error::NonGeneric(format!(
                            "tangent weight vanishes for {mu} at chart ({k},{m})"
                        )));
                    }
                    let single = FixedPoint {
                        plane_index: k as u8,
                        tri: slot_tripartition(k, m, mu.clone()),
                    };
                    let taut: Vec<BigInt> = WeightSystem::with_perturbation(&single, d, perturbation)
                        .taut
                        .iter()
                        .map(|c| ints.eval(c))
                        .collect();
                    let tangent_product = tangent.iter().product();
                    slots.insert(
                        (k, m, mu.clone()),
                        SlotData {
                            hilb_e: elementary_symmetric(&tangent),
                            taut_e: elementary_symmetric(&taut),
                            tangent_product,
                        },
                    );
                }
            }
        }
        Ok(SlotTable { slots, gr_euler, h })
    }

    /// Symbol values `[H, c(L).., c(T)..]` and the Euler class at `f`.
    fn point_values(&self, f: &FixedPoint) -> (Vec<BigInt>, BigInt) {
        let k = f.plane_index as usize;
        let mut hilb = vec![BigInt::one()];
        let mut taut = vec![BigInt::one()];
        let mut euler = self.gr_euler[k].clone();
        for (m, mu) in f.plane_points().into_iter().zip(f.tri.slots()) {
            let slot = &self.slots[&(k, m, mu.clone())];
            if mu.is_empty() {
                continue;
            }
            hilb = convolve(&hilb, &slot.hilb_e);
            taut = convolve(&taut, &slot.taut_e);
            euler *= &slot.tangent_product;
        }
        let mut values = Vec::with_capacity(1 + taut.len() + hilb.len());
        values.push(self.h[k].clone());
        values.extend(taut.into_iter().skip(1));
        values.extend(hilb.into_iter().skip(1));
        (values, euler)
    }
}

fn slot_tripartition(k: usize, m: usize, mu: Partition) -> crate::fixed_points::Tripartition {
    let mut parts = [Partition::empty(), Partition::empty(), Partition::empty()];
    let s = plane_points(k).iter().position(|&x| x == m).expect("point of the plane");
    parts[s] = mu;
    crate::fixed_points::Tripartition(parts)
}

fn sum_over_fixed_points(
    ig: &Integrand,
    table: &SlotTable,
    shuffle_seed: Option<u64>,
) -> (Rational, usize) {
    let mut points = enumerate_fixed_points(ig.spec.i);
    if let Some(seed) = shuffle_seed {
        points.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let count = points.len();
    if ig.poly.is_zero() {
        return (Rational::zero(), count);
    }
    let form = ig.poly.integer_form();
    let total = points
        .par_iter()
        .map(|f| {
            let (values, euler) = table.point_values(f);
            let numer = form.eval_numer(&values);
            if numer.is_zero() {
                Rational::zero()
            } else {
                Rational::new(numer, euler)
            }
        })
        .reduce(Rational::zero, |a, b| a + b);
    (total / Rational::from(form.denom().clone()), count)
}

/// Runs `body` with slot tables for `spec`, resampling on a vanishing weight.
fn with_generic_table<T>(
    d: u32,
    max_len: u32,
    opts: &LocalizationOptions,
    start: &Specialization,
    mut body: impl FnMut(&SlotTable, &Specialization) -> Result<T>,
) -> Result<T> {
    let mut spec = start.clone();
    for attempt in 0..=opts.max_resamples {
        match SlotTable::new(&spec.integer_form(), d, max_len, opts.perturbation) {
            Ok(table) => return body(&table, &spec),
            Err(Error::NonGeneric(why)) => {
                debug!("specialization {spec} is not generic ({why}); resampling");
                spec = start.resampled(attempt);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::NonGeneric(format!(
        "no generic specialization after {} resamples",
        opts.max_resamples
    )))
}

pub fn integrate(s: &IntegrandSpec, spec: &Specialization) -> Result<IntegralResult> {
    let opts = LocalizationOptions {
        specialization: spec.clone(),
        ..Default::default()
    };
    integrate_with(s, &opts)
}

pub fn integrate_with(s: &IntegrandSpec, opts: &LocalizationOptions) -> Result<IntegralResult> {
    let ig = build_integrand_with(s, &opts.integrand)?;
    let first = integrate_integrand(&ig, opts, &opts.specialization)?;
    if opts.verify {
        let second = integrate_integrand(&ig, opts, &opts.specialization.companion())?;
        check_agreement(&first, &second)?;
    }
    Ok(first)
}

/// Integral of a built integrand under `spec` (resampled if needed).
pub fn integrate_integrand(
    ig: &Integrand,
    opts: &LocalizationOptions,
    spec: &Specialization,
) -> Result<IntegralResult> {
    let s = ig.spec;
    with_generic_table(s.d, s.i, opts, spec, |table, used| {
        let (value, fixed_point_count) = sum_over_fixed_points(ig, table, opts.shuffle_seed);
        Ok(IntegralResult {
            i: s.i,
            delta: s.delta,
            d: s.d,
            mode: s.mode,
            plane_points: s.plane_points,
            value,
            spec_used: used.clone(),
            fixed_point_count,
        })
    })
}

fn check_agreement(a: &IntegralResult, b: &IntegralResult) -> Result<()> {
    if a.value != b.value {
        return Err(Error::SpecializationMismatch {
            context: format!("i={} δ={} d={} mode={}", a.i, a.delta, a.d, a.mode),
            first: a.value.to_string(),
            second: b.value.to_string(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodalCount {
    pub delta: u32,
    pub d: u32,
    pub mode: Mode,
    pub plane_points: u32,
    pub value: BigInt,
    pub bps: Vec<Rational>,
    pub integrals: Vec<IntegralResult>,
    /// Integrals under the companion specialization, when verified.
    pub verification: Option<Vec<IntegralResult>>,
}

impl NodalCount {
    pub fn fixed_point_count(&self) -> usize {
        self.integrals.iter().map(|r| r.fixed_point_count).sum()
    }
}

/// `N_{δ,d}` in the given mode with default options.
pub fn count_nodal(delta: u32, d: u32, mode: Mode) -> Result<BigInt> {
    Ok(count_nodal_with(delta, d, mode, 0, &LocalizationOptions::default())?.value)
}

/// The BPS combination of the integrals `i = 0..δ`. With `plane_points > 0`
/// (P3 mode), that many line conditions are replaced by point conditions in
/// the plane.
pub fn count_nodal_with(
    delta: u32,
    d: u32,
    mode: Mode,
    plane_points: u32,
    opts: &LocalizationOptions,
) -> Result<NodalCount> {
    let specs: Vec<IntegrandSpec> = (0..=delta)
        .map(|i| IntegrandSpec::new(i, delta, d, mode)?.with_plane_points(plane_points))
        .collect::<Result<_>>()
        .or_else(|e| {
            if plane_points == 0 {
                (0..=delta)
                    .map(|i| IntegrandSpec::new(i, delta, d, mode))
                    .collect()
            } else {
                Err(e)
            }
        })?;
    let integrands: Vec<Integrand> = specs
        .iter()
        .map(|s| build_integrand_with(s, &opts.integrand))
        .collect::<Result<_>>()?;
    let run = |start: &Specialization| -> Result<Vec<IntegralResult>> {
        with_generic_table(d, delta, opts, start, |table, used| {
            Ok(integrands
                .iter()
                .map(|ig| {
                    let (value, fixed_point_count) =
                        sum_over_fixed_points(ig, table, opts.shuffle_seed);
                    debug!("δ={delta} d={d} i={}: {value:?}", ig.spec.i);
                    IntegralResult {
                        i: ig.spec.i,
                        delta,
                        d,
                        mode,
                        plane_points,
                        value,
                        spec_used: used.clone(),
                        fixed_point_count,
                    }
                })
                .collect())
        })
    };
    let integrals = run(&opts.specialization)?;
    let verification = if opts.verify {
        let second = run(&opts.specialization.companion())?;
        for (a, b) in integrals.iter().zip(&second) {
            check_agreement(a, b)?;
        }
        Some(second)
    } else {
        None
    };
    let bps = bps_coefficients(delta, genus(d)).a;
    let total: Rational = bps
        .iter()
        .zip(&integrals)
        .map(|(a, r)| a * &r.value)
        .sum();
    let value = total.to_integer().ok_or_else(|| {
        warn!("non-integer count for δ={delta} d={d}: {total}");
        Error::NonInteger {
            delta,
            d,
            value: total.to_string(),
        }
    })?;
    Ok(NodalCount {
        delta,
        d,
        mode,
        plane_points,
        value,
        bps,
        integrals,
        verification,
    })
}
