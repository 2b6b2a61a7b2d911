//! Desk-scale instance generators and an independent cross-checking
//! harness. Everything here exists to stress the deciders and the witness
//! search against each other and against brute force on many small inputs;
//! none of it is needed to answer a single query.
//!
//! Randomness is deterministic: every generator is a pure function of the
//! seed in [`GenBounds`], so a failing sample can be reproduced from the
//! report alone.

use crate::bundle::{bundle_from_polygon, bundles_with, VectorBundle};
use crate::extension::{
    decide_semistable_case, decide_with, DecideOptions, Decider,
};
use crate::permutation::{brute_force_e_permutation, find_e_permutation, Leniency};
use crate::rat::{rat_int, Rat};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Bounds for generated instances plus the seed that makes generation
/// deterministic. The default envelope (rank 8, denominators 4, slopes in
/// [-3, 3]) keeps the factorial brute-force oracle sub-second per instance.
#[derive(Clone, Debug)]
pub struct GenBounds {
    pub max_rank: usize,
    pub max_denominator: usize,
    pub slope_min: Rat,
    pub slope_max: Rat,
    pub seed: u64,
}

impl Default for GenBounds {
    fn default() -> Self {
        GenBounds {
            max_rank: 8,
            max_denominator: 4,
            slope_min: rat_int(-3),
            slope_max: rat_int(3),
            seed: 0,
        }
    }
}

impl GenBounds {
    pub fn with_seed(seed: u64) -> Self {
        GenBounds {
            seed,
            ..GenBounds::default()
        }
    }

    fn validate(&self) {
        assert!(self.max_rank >= 1, "max_rank must be at least 1");
        assert!(self.max_denominator >= 1, "max_denominator must be at least 1");
        assert!(self.slope_min <= self.slope_max, "empty slope window");
        assert!(
            self.slope_min.ceil() <= self.slope_max.floor(),
            "slope window must contain an integer so any remaining rank can be filled"
        );
    }
}

/// All bundles of the given rank and degree with slopes inside the bounds
/// window and denominators at most `bounds.max_denominator`, in decreasing
/// lexicographic order of HN slope tuples.
pub fn enumerate_bundles(rank: usize, degree: i64, bounds: &GenBounds) -> Vec<VectorBundle> {
    bundles_with(
        rank,
        &BigInt::from(degree),
        &bounds.slope_min,
        &bounds.slope_max,
        bounds.max_denominator,
    )
}

/// A bounds-respecting bundle computed deterministically from
/// `bounds.seed`. Same bounds, same bundle.
pub fn random_bundle(bounds: &GenBounds) -> VectorBundle {
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    random_bundle_from(&mut rng, bounds)
}

/// Draws the next bounds-respecting bundle from an explicit stream, with
/// rank between 1 and `bounds.max_rank`.
pub fn random_bundle_from(rng: &mut impl Rng, bounds: &GenBounds) -> VectorBundle {
    bounds.validate();
    let rank = rng.random_range(1..=bounds.max_rank);
    random_bundle_with_rank(rng, bounds, rank)
}

fn random_bundle_with_rank(rng: &mut impl Rng, bounds: &GenBounds, rank: usize) -> VectorBundle {
    let mut rem = rank;
    let mut parts: Vec<(Rat, usize)> = Vec::new();
    while rem > 0 {
        // admissible stable slopes fitting in the remaining rank
        let mut slopes: Vec<Rat> = Vec::new();
        for q in 1..=bounds.max_denominator.min(rem) {
            let qb = BigInt::from(q);
            let q_rat = Rat::from_integer(qb.clone());
            let a_min = (&bounds.slope_min * &q_rat).ceil().to_integer();
            let a_max = (&bounds.slope_max * &q_rat).floor().to_integer();
            let mut a = a_min;
            while a <= a_max {
                let s = Rat::new(a.clone(), qb.clone());
                if s.denom() == &qb {
                    slopes.push(s);
                }
                a += BigInt::from(1);
            }
        }
        let slope = slopes[rng.random_range(0..slopes.len())].clone();
        let q = crate::bundle::StableSlope::new(slope.clone()).rank();
        let mult = rng.random_range(1..=rem / q);
        parts.push((slope, mult));
        rem -= mult * q;
    }
    VectorBundle::from_summands(parts)
}

/// One generated decision problem plus the text needed to reproduce it.
#[derive(Clone, Debug)]
pub struct Instance {
    pub d: VectorBundle,
    pub e: VectorBundle,
    pub f: VectorBundle,
    pub repro: String,
}

/// Draws a triple with matching rank and degree bookkeeping. The middle
/// term is the split sum or a concave rearrangement hull of `HN(D ⊕ F)`,
/// both of which land inside the dominance band where decisions are
/// nontrivial. Zero sub or quotient sides occur occasionally.
pub fn random_triple(
    rng: &mut impl Rng,
    bounds: &GenBounds,
) -> (VectorBundle, VectorBundle, VectorBundle) {
    bounds.validate();
    let max = bounds.max_rank;
    let rank_d = rng.random_range(0..max);
    let min_f = usize::from(rank_d == 0);
    let rank_f = rng.random_range(min_f..=max - rank_d);
    let d = if rank_d == 0 {
        VectorBundle::zero()
    } else {
        random_bundle_with_rank(rng, bounds, rank_d)
    };
    let f = if rank_f == 0 {
        VectorBundle::zero()
    } else {
        random_bundle_with_rank(rng, bounds, rank_f)
    };
    let sum = d.direct_sum(&f);
    let e = if rng.random_range(0..4) == 0 {
        sum.clone()
    } else {
        shuffled_hull_bundle(rng, &sum).unwrap_or(sum)
    };
    (d, e, f)
}

/// Upper hull of a random rearrangement of the HN slopes, read back as a
/// bundle when its runs divide evenly.
fn shuffled_hull_bundle(rng: &mut impl Rng, sum: &VectorBundle) -> Option<VectorBundle> {
    if sum.is_zero() {
        return Some(sum.clone());
    }
    let mut slopes = sum.hn_polygon().slopes().to_vec();
    slopes.shuffle(rng);
    let hull = crate::polygon::TuplarPolygon::from_integral_slopes(slopes).upper_hull();
    bundle_from_polygon(&hull).ok()
}

const MAX_REPRO: usize = 8;

/// Outcome of one named cross-check over all samples.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passes: usize,
    pub failures: usize,
    /// Reproduction strings for the first few failures.
    pub repro: Vec<String>,
}

/// Aggregated outcome of a [`cross_check_report`] run.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub samples: usize,
    pub checks: Vec<CheckReport>,
}

impl Report {
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.failures > 0)
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let total: usize = self.checks.iter().map(|c| c.failures).sum();
        writeln!(
            out,
            "cross-check report: {} samples, {} checks, {} failures",
            self.samples,
            self.checks.len(),
            total
        )?;
        for c in &self.checks {
            if c.failures == 0 {
                writeln!(out, "  PASS {} ({} ok)", c.name, c.passes)?;
            } else {
                writeln!(out, "  FAIL {} ({} ok, {} failed)", c.name, c.passes, c.failures)?;
                for r in &c.repro {
                    writeln!(out, "    {}", r)?;
                }
                if c.failures > c.repro.len() {
                    writeln!(out, "    ... and {} more", c.failures - c.repro.len())?;
                }
            }
        }
        Ok(())
    }
}

struct Check {
    name: &'static str,
    run: fn(&Instance) -> Result<(), String>,
}

fn fail(inst: &Instance, detail: &str) -> String {
    format!("{} [{}]", inst.repro, detail)
}

fn checks() -> Vec<Check> {
    vec![
        Check {
            name: "witness-search-matches-brute-force",
            run: |i| match brute_force_e_permutation(&i.d, &i.e, &i.f, Leniency::Strict) {
                Err(_) => Ok(()), // over the brute-force cap; nothing to compare
                Ok(brute) => {
                    let fast = find_e_permutation(&i.d, &i.e, &i.f);
                    if fast.is_some() == brute.is_some() {
                        Ok(())
                    } else {
                        Err(fail(i, "search and brute force disagree"))
                    }
                }
            },
        },
        Check {
            name: "found-witness-revalidates",
            run: |i| {
                if let Some(w) = find_e_permutation(&i.d, &i.e, &i.f) {
                    if !w.validates(&i.d, &i.e, &i.f, Leniency::Strict) {
                        return Err(fail(i, "witness failed revalidation"));
                    }
                    if !w.sorted {
                        return Err(fail(i, "search returned an unsorted witness"));
                    }
                    let sum = i.d.direct_sum(&i.f);
                    if !sum.hn_polygon().dominates(&w.polygon)
                        || !w.polygon.dominates(&i.e.hn_polygon())
                    {
                        return Err(fail(i, "witness escapes the dominance sandwich"));
                    }
                }
                Ok(())
            },
        },
        Check {
            name: "witness-duality",
            run: |i| {
                let forward = find_e_permutation(&i.d, &i.e, &i.f).is_some();
                let dual =
                    find_e_permutation(&i.f.dual(), &i.e.dual(), &i.d.dual()).is_some();
                if forward == dual {
                    Ok(())
                } else {
                    Err(fail(i, "witness existence not self-dual"))
                }
            },
        },
        Check {
            name: "witness-pullback-invariance",
            run: |i| {
                let plain = find_e_permutation(&i.d, &i.e, &i.f).is_some();
                let scaled = find_e_permutation(
                    &i.d.pullback(2),
                    &i.e.pullback(2),
                    &i.f.pullback(2),
                )
                .is_some();
                if plain == scaled {
                    Ok(())
                } else {
                    Err(fail(i, "witness existence changed under the degree-2 cover"))
                }
            },
        },
        Check {
            name: "split-extension-exists",
            run: |i| {
                let split = i.d.direct_sum(&i.f);
                match Decider::new(&i.d, &i.f).decide(&split) {
                    Some(chain) if chain.verify(&i.d, &split, &i.f) => Ok(()),
                    Some(_) => Err(fail(i, "split chain failed verification")),
                    None => Err(fail(i, "split extension not found")),
                }
            },
        },
        Check {
            name: "decision-duality",
            run: |i| {
                let forward = Decider::new(&i.d, &i.f).exists(&i.e);
                let dual = Decider::new(&i.f.dual(), &i.d.dual()).exists(&i.e.dual());
                if forward == dual {
                    Ok(())
                } else {
                    Err(fail(i, "decision not self-dual"))
                }
            },
        },
        Check {
            name: "witness-necessity",
            run: |i| {
                if Decider::new(&i.d, &i.f).exists(&i.e)
                    && find_e_permutation(&i.d, &i.e, &i.f).is_none()
                {
                    return Err(fail(i, "extension exists without a witness"));
                }
                Ok(())
            },
        },
        Check {
            name: "semistable-sides-agree",
            run: |i| {
                if !i.d.is_semistable() && !i.f.is_semistable() {
                    return Ok(());
                }
                let general = Decider::new(&i.d, &i.f).exists(&i.e);
                let special = decide_semistable_case(&i.d, &i.e, &i.f).is_some();
                if general == special {
                    Ok(())
                } else {
                    Err(fail(i, "general and semistable-case deciders disagree"))
                }
            },
        },
        Check {
            name: "shortcut-coherence",
            run: |i| {
                if i.d.rank() + i.f.rank() > 6 {
                    return Ok(()); // keep the no-shortcut recursion cheap
                }
                let fast = Decider::new(&i.d, &i.f).exists(&i.e);
                let slow = decide_with(&i.d, &i.e, &i.f, DecideOptions::no_shortcuts()).is_some();
                if fast == slow {
                    Ok(())
                } else {
                    Err(fail(i, "shortcuts change the decision"))
                }
            },
        },
        Check {
            name: "pullback-forward-stability",
            run: |i| {
                if !Decider::new(&i.d, &i.f).exists(&i.e) {
                    return Ok(());
                }
                for cover in [2u32, 3] {
                    let ok = Decider::new(&i.d.pullback(cover), &i.f.pullback(cover))
                        .exists(&i.e.pullback(cover));
                    if !ok {
                        return Err(fail(i, "extension lost under pullback"));
                    }
                }
                Ok(())
            },
        },
        Check {
            name: "chain-revalidates",
            run: |i| match Decider::new(&i.d, &i.f).decide(&i.e) {
                None => Ok(()),
                Some(chain) => {
                    if chain.verify(&i.d, &i.e, &i.f) {
                        Ok(())
                    } else {
                        Err(fail(i, "returned chain failed verification"))
                    }
                }
            },
        },
        Check {
            name: "middle-terms-coherent",
            run: |i| {
                let sum = i.d.direct_sum(&i.f);
                if sum.rank() > 4 {
                    return Ok(()); // full band re-decision is only cheap at tiny rank
                }
                let listed = crate::extension::enumerate_middle_terms(&i.d, &i.f);
                if sum.is_zero() {
                    return if listed == vec![VectorBundle::zero()] {
                        Ok(())
                    } else {
                        Err(fail(i, "zero pair should list exactly the zero bundle"))
                    };
                }
                let hi = sum.mu_max().unwrap().clone();
                let deg = sum.degree();
                let lo = Rat::from_integer(deg.clone())
                    - Rat::from_integer(BigInt::from(sum.rank() as u64 - 1)) * &hi;
                for cand in bundles_with(sum.rank(), &deg, &lo, &hi, sum.rank()) {
                    let member = listed.contains(&cand);
                    let decided = Decider::new(&i.d, &i.f).exists(&cand);
                    if member != decided {
                        return Err(fail(i, &format!("membership mismatch at {}", cand)));
                    }
                }
                Ok(())
            },
        },
    ]
}

fn run_checks(instances: &[Instance], checks: &[Check]) -> Report {
    let reports = checks
        .iter()
        .map(|check| {
            let errors: Vec<Option<String>> = instances
                .par_iter()
                .map(|inst| (check.run)(inst).err())
                .collect();
            let failures = errors.iter().filter(|e| e.is_some()).count();
            CheckReport {
                name: check.name.to_string(),
                passes: instances.len() - failures,
                failures,
                repro: errors.into_iter().flatten().take(MAX_REPRO).collect(),
            }
        })
        .collect();
    Report {
        samples: instances.len(),
        checks: reports,
    }
}

pub const DEFAULT_SAMPLES: usize = 256;

/// Runs every cross-check over [`DEFAULT_SAMPLES`] generated instances.
/// A correct build reports zero failures.
pub fn cross_check_report(bounds: &GenBounds) -> Report {
    cross_check_report_with(bounds, DEFAULT_SAMPLES)
}

/// [`cross_check_report`] with an explicit sample count.
pub fn cross_check_report_with(bounds: &GenBounds, samples: usize) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let instances: Vec<Instance> = (0..samples)
        .map(|k| {
            let (d, e, f) = random_triple(&mut rng, bounds);
            Instance {
                repro: format!("sample {} (seed {}): d={} e={} f={}", k, bounds.seed, d, e, f),
                d,
                e,
                f,
            }
        })
        .collect();
    run_checks(&instances, &checks())
}
