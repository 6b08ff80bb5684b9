//! The uniform model on pairs of maximal submodules of `Omega_n^2`.
//!
//! Exact quantities are `Ratio<u128>`; floating point only appears in
//! standard errors and chi-square summaries.

use std::collections::HashMap;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::series::{check_level, Prime};
use crate::submodule::{
    check_enumeration, count_maximal, enumerate_maximal, CyclicSubmodule, SubmoduleTower,
};

pub type Rational = Ratio<u128>;

/// Bound on `|N_n|` for double enumeration.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000;

const CHUNK: u64 = 4096;

/// Seeded source of per-trial generators. Trial `t` always sees the same
/// stream for a given seed, independent of scheduling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSpec {
    pub seed: u64,
}

impl RngSpec {
    pub fn new(seed: u64) -> Self {
        RngSpec { seed }
    }

    /// ChaCha8 keyed by the seed, on stream `trial`.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

impl std::fmt::Display for RngSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "chacha8(seed={}, stream=trial)", self.seed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbabilityModel {
    pub p: Prime,
    pub level: usize,
    pub total_pairs: u128,
    pub collision_pairs: u128,
    pub collision_probability: Rational,
}

impl ProbabilityModel {
    pub fn new(p: Prime, level: usize) -> Result<Self> {
        let count = count_maximal(p, level)?;
        let total_pairs = count.checked_mul(count).ok_or(Error::ResourceBound {
            what: "pair count",
            value: u128::MAX,
            limit: u128::MAX,
        })?;
        Ok(ProbabilityModel {
            p,
            level,
            total_pairs,
            collision_pairs: count,
            collision_probability: Rational::new(count, total_pairs),
        })
    }
}

/// Uniform draw from the `p^(n-1)(p+1)` canonical forms.
pub fn sample_maximal<R: Rng + ?Sized>(p: Prime, n: usize, rng: &mut R) -> Result<CyclicSubmodule> {
    let total = count_maximal(p, n)?;
    if total > u64::MAX as u128 {
        return Err(Error::ResourceBound {
            what: "maximal submodule count for sampling",
            value: total,
            limit: u64::MAX as u128,
        });
    }
    CyclicSubmodule::from_index(p, n, rng.gen_range(0..total as u64))
}

/// `1 / ((p+1) p^(n-1))`.
pub fn collision_probability_exact(p: Prime, n: usize) -> Result<Rational> {
    Ok(Rational::new(1, count_maximal(p, n)?))
}

/// Collision probability recomputed by running over every ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExhaustiveCollision {
    pub pairs: u128,
    pub collisions: u128,
    pub probability: Rational,
    /// Collisions detected through the intersection order agree with
    /// canonical equality on every pair.
    pub representations_agree: bool,
}

pub fn collision_probability_exhaustive(p: Prime, n: usize) -> Result<ExhaustiveCollision> {
    let count = count_maximal(p, n)?;
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::ResourceBound {
            what: "maximal submodules for double enumeration",
            value: count,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let all: Vec<_> = enumerate_maximal(p, n)?.collect();
    let (collisions, agree) = all
        .par_iter()
        .map(|a| {
            let mut hits = 0u128;
            let mut agree = true;
            for b in &all {
                let equal = a == b;
                let full = a.intersect(b).expect("same parameters").size_exponent == n;
                agree &= equal == full;
                hits += u128::from(equal);
            }
            (hits, agree)
        })
        .reduce(|| (0, true), |x, y| (x.0 + y.0, x.1 && y.1));
    let pairs = count * count;
    Ok(ExhaustiveCollision {
        pairs,
        collisions,
        probability: Rational::new(collisions, pairs),
        representations_agree: agree,
    })
}

/// `1 - 1/((p+1) p^(n-1))`, the lower bound on the probability that the
/// intersection vanishes.
pub fn intersection_bound(p: Prime, n: usize) -> Result<Rational> {
    Ok(Rational::from_integer(1) - collision_probability_exact(p, n)?)
}

/// The largest bound over a level grid.
pub fn bound_supremum(p: Prime, levels: &[usize]) -> Result<Option<Rational>> {
    levels
        .iter()
        .map(|&n| intersection_bound(p, n))
        .try_fold(None, |best: Option<Rational>, b| {
            let b = b?;
            Ok(Some(best.map_or(b, |x| x.max(b))))
        })
}

/// Pearson chi-square statistic with `p_count - 1` degrees of freedom against
/// the uniform law on canonical forms.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareSummary {
    pub draws: u64,
    pub counts: Vec<u64>,
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub quantile_999: f64,
}

impl ChiSquareSummary {
    pub fn passes(&self) -> bool {
        self.statistic < self.quantile_999
    }
}

pub fn sampler_chi_square(p: Prime, n: usize, draws: u64, rng: RngSpec) -> Result<ChiSquareSummary> {
    if draws == 0 {
        return Err(Error::Precondition("draws must be at least 1".into()));
    }
    let k = count_maximal(p, n)?;
    check_enumeration("chi-square cells", k)?;
    let k = k as usize;
    let counts = chunked(draws)
        .into_par_iter()
        .map(|(start, end)| {
            let mut c = vec![0u64; k];
            for t in start..end {
                let m = sample_maximal(p, n, &mut rng.trial_rng(t)).expect("validated");
                c[m.index() as usize] += 1;
            }
            c
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let expected = draws as f64 / k as f64;
    let statistic = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = k - 1;
    let quantile_999 = ChiSquared::new(dof as f64)
        .map_err(|e| Error::Precondition(e.to_string()))?
        .inverse_cdf(0.999);
    Ok(ChiSquareSummary {
        draws,
        counts,
        statistic,
        degrees_of_freedom: dof,
        quantile_999,
    })
}

fn chunked(trials: u64) -> Vec<(u64, u64)> {
    (0..trials.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(trials)))
        .collect()
}

/// Aggregated Monte-Carlo statistics for pairs of independent uniform draws.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonteCarloSummary {
    pub p: Prime,
    pub level: usize,
    pub trials: u64,
    pub rng: RngSpec,
    pub collisions: u64,
    /// `exponent_histogram[v]` counts pairs with `|N1 ∩ N2| = p^v`.
    pub exponent_histogram: Vec<u64>,
    /// Counts of quotient cyclic structures `Omega_n^2/(N1+N2)`.
    pub quotient_structures: Vec<(Vec<usize>, u64)>,
    /// Pairs where canonical equality, the intersection order and the quotient
    /// order disagree about a collision, or the two orders differ.
    pub representation_mismatches: u64,
    pub exact: Rational,
}

impl MonteCarloSummary {
    pub fn empirical(&self) -> Rational {
        Rational::new(self.collisions as u128, self.trials as u128)
    }

    pub fn empirical_f64(&self) -> f64 {
        self.collisions as f64 / self.trials as f64
    }

    /// Binomial standard error at the exact collision probability.
    pub fn standard_error(&self) -> f64 {
        let q = ratio_f64(&self.exact);
        (q * (1.0 - q) / self.trials as f64).sqrt()
    }

    pub fn z_score(&self) -> f64 {
        (self.empirical_f64() - ratio_f64(&self.exact)) / self.standard_error()
    }

    pub fn within_sigmas(&self, k: f64) -> bool {
        self.z_score().abs() <= k
    }
}

pub fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Default)]
struct Tally {
    collisions: u64,
    exponents: Vec<u64>,
    quotients: HashMap<Vec<usize>, u64>,
    mismatches: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.collisions += other.collisions;
        if self.exponents.len() < other.exponents.len() {
            self.exponents.resize(other.exponents.len(), 0);
        }
        for (a, b) in self.exponents.iter_mut().zip(other.exponents) {
            *a += b;
        }
        for (k, v) in other.quotients {
            *self.quotients.entry(k).or_default() += v;
        }
        self.mismatches += other.mismatches;
        self
    }
}

/// Draws `trials` independent pairs. Results depend only on `(p, n, trials, rng)`.
pub fn monte_carlo(p: Prime, n: usize, trials: u64, rng: RngSpec) -> Result<MonteCarloSummary> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    check_level(n, 1)?;
    let exact = collision_probability_exact(p, n)?;
    let tally = chunked(trials)
        .into_par_iter()
        .map(|(start, end)| {
            let mut t = Tally {
                exponents: vec![0; n + 1],
                ..Tally::default()
            };
            for trial in start..end {
                let mut r = rng.trial_rng(trial);
                let n1 = sample_maximal(p, n, &mut r).expect("validated");
                let n2 = sample_maximal(p, n, &mut r).expect("validated");
                let v = n1.intersect(&n2).expect("same parameters").size_exponent;
                let q = n1.sum_and_quotient(&n2).expect("same parameters");
                let equal = n1 == n2;
                t.collisions += u64::from(equal);
                t.exponents[v] += 1;
                if equal != (v == n) || v != q.quotient_size_exponent {
                    t.mismatches += 1;
                }
                *t.quotients.entry(q.cyclic_structure).or_default() += 1;
            }
            t
        })
        .reduce(Tally::default, Tally::merge);
    let mut quotient_structures: Vec<_> = tally.quotients.into_iter().collect();
    quotient_structures.sort();
    Ok(MonteCarloSummary {
        p,
        level: n,
        trials,
        rng,
        collisions: tally.collisions,
        exponent_histogram: tally.exponents,
        quotient_structures,
        representation_mismatches: tally.mismatches,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PushforwardReport {
    pub p: Prime,
    pub from_level: usize,
    pub to_level: usize,
    pub expected_fiber: u128,
    /// `(fiber size, number of level-n submodules with that fiber size)`.
    pub fiber_sizes: Vec<(u128, u64)>,
    /// Every lift projects back to its base and the lifts of each base are
    /// exactly its fiber.
    pub lifts_match_fibers: bool,
}

impl PushforwardReport {
    pub fn consistent(&self) -> bool {
        self.lifts_match_fibers
            && self.fiber_sizes.len() == 1
            && self.fiber_sizes[0].0 == self.expected_fiber
    }
}

/// Checks that `pi_{m,n}` carries the uniform law at level `m` to level `n`.
pub fn pushforward_consistency(p: Prime, n: usize, m: usize) -> Result<PushforwardReport> {
    if m < n {
        return Err(Error::Precondition(format!("need m >= n, got m={m}, n={n}")));
    }
    check_level(n, 1)?;
    let upper: Vec<_> = enumerate_maximal(p, m)?.collect();
    let mut fibers: HashMap<CyclicSubmodule, Vec<CyclicSubmodule>> = HashMap::new();
    for u in &upper {
        fibers.entry(u.project(n)?).or_default().push(u.clone());
    }
    let mut lifts_match = fibers.len() as u128 == count_maximal(p, n)?;
    let mut sizes: HashMap<u128, u64> = HashMap::new();
    for base in enumerate_maximal(p, n)? {
        let fiber = fibers.get(&base).cloned().unwrap_or_default();
        *sizes.entry(fiber.len() as u128).or_default() += 1;
        let mut lifted: Vec<_> = base.lifts(m)?.collect();
        lifts_match &= lifted.iter().all(|l| l.project(n).as_ref() == Ok(&base));
        let mut fiber = fiber;
        lifted.sort();
        fiber.sort();
        lifts_match &= lifted == fiber;
    }
    let mut fiber_sizes: Vec<_> = sizes.into_iter().collect();
    fiber_sizes.sort();
    Ok(PushforwardReport {
        p,
        from_level: n,
        to_level: m,
        expected_fiber: p.checked_power(m - n).expect("bounded by enumeration"),
        fiber_sizes,
        lifts_match_fibers: lifts_match,
    })
}

/// Intersection orders of a pair of towers across levels `1..=max_level`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerProfile {
    pub exponents: Vec<(usize, usize)>,
    pub identical: bool,
    /// For distinct towers, the exponent `v` at the top level.
    pub stabilized_exponent: Option<usize>,
    /// First level from which the exponent stays at `v` (that is, `v + 1`).
    pub stable_from: Option<usize>,
    /// Exponent equals the level up to `v` and equals `v` above it, or equals
    /// the level everywhere for identical towers.
    pub consistent: bool,
}

pub fn tower_profile(top1: &CyclicSubmodule, top2: &CyclicSubmodule) -> Result<TowerProfile> {
    let t1 = SubmoduleTower::from_top(top1);
    let t2 = SubmoduleTower::from_top(top2);
    let exponents = t1.intersection_profile(&t2)?;
    let identical = top1 == top2;
    let top_level = top1.level();
    let (stabilized_exponent, stable_from, consistent) = if identical {
        (None, None, exponents.iter().all(|&(l, e)| l == e))
    } else {
        let v = exponents.last().expect("non-empty").1;
        let ok = v < top_level
            && exponents
                .iter()
                .all(|&(l, e)| if l <= v { e == l } else { e == v });
        (Some(v), Some(v + 1), ok)
    };
    Ok(TowerProfile {
        exponents,
        identical,
        stabilized_exponent,
        stable_from,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TowerSummary {
    pub p: Prime,
    pub max_level: usize,
    pub pairs: u64,
    pub identical: u64,
    /// `v_histogram[v]` counts distinct pairs with stabilized exponent `v`.
    pub v_histogram: Vec<u64>,
    pub violations: u64,
}

impl TowerSummary {
    fn empty(p: Prime, max_level: usize) -> Self {
        TowerSummary {
            p,
            max_level,
            pairs: 0,
            identical: 0,
            v_histogram: vec![0; max_level + 1],
            violations: 0,
        }
    }

    fn record(&mut self, prof: &TowerProfile) {
        self.pairs += 1;
        match prof.stabilized_exponent {
            None => self.identical += 1,
            Some(v) => self.v_histogram[v] += 1,
        }
        self.violations += u64::from(!prof.consistent);
    }

    fn merge(mut self, other: TowerSummary) -> Self {
        self.pairs += other.pairs;
        self.identical += other.identical;
        self.violations += other.violations;
        self.v_histogram
            .iter_mut()
            .zip(other.v_histogram)
            .for_each(|(a, b)| *a += b);
        self
    }
}

/// Every ordered pair of canonical forms at `max_level`, projected through
/// every lower level.
pub fn tower_census(p: Prime, max_level: usize) -> Result<TowerSummary> {
    let count = count_maximal(p, max_level)?;
    if count > EXHAUSTIVE_LIMIT {
        return Err(Error::ResourceBound {
            what: "maximal submodules for tower census",
            value: count,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let all: Vec<_> = enumerate_maximal(p, max_level)?.collect();
    Ok(all
        .par_iter()
        .map(|a| {
            let mut s = TowerSummary::empty(p, max_level);
            for b in &all {
                s.record(&tower_profile(a, b).expect("same parameters"));
            }
            s
        })
        .reduce(|| TowerSummary::empty(p, max_level), TowerSummary::merge))
}

/// Random pairs of towers sampled at `max_level` and projected downward.
pub fn tower_experiment(p: Prime, max_level: usize, trials: u64, rng: RngSpec) -> Result<TowerSummary> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    check_level(max_level, 1)?;
    count_maximal(p, max_level)?;
    Ok(chunked(trials)
        .into_par_iter()
        .map(|(start, end)| {
            let mut s = TowerSummary::empty(p, max_level);
            for t in start..end {
                let mut r = rng.trial_rng(t);
                let a = sample_maximal(p, max_level, &mut r).expect("validated");
                let b = sample_maximal(p, max_level, &mut r).expect("validated");
                s.record(&tower_profile(&a, &b).expect("same parameters"));
            }
            s
        })
        .reduce(|| TowerSummary::empty(p, max_level), TowerSummary::merge))
}
