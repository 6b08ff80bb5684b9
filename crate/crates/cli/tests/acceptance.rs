//! End-to-end acceptance checks. Each criterion prints one `PASS`/`FAIL` line
//! with its runtime; the process exits non-zero if any criterion fails.
//!
//! Expected values are written out literally or recomputed here by brute
//! force, never taken from the library routine under test.

use std::collections::HashSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use omega_model::heuristic::{
    collision_probability_exhaustive, monte_carlo, pushforward_consistency, sampler_chi_square,
    tower_census,
};
use omega_model::pairing::{enumerate_maximal_isotropic, IsotropicDiagnostics};
use omega_model::submodule::{census_maximal_generators, enumerate_maximal};
use omega_model::{
    pairing, CyclicSubmodule, FpSubspace, Prime, Rational, RngSpec, Series, SpaceElement,
    SpaceShape, Subspace,
};
use rand::Rng;

type Outcome = Result<String, String>;

/// Name, check and runtime budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn prime(p: u32) -> Prime {
    Prime::new(p).expect("valid prime")
}

fn pow(p: u32, e: usize) -> u128 {
    (p as u128).pow(e as u32)
}

/// Canonical-form counts and generator censuses.
fn counts() -> Outcome {
    let mut notes = Vec::new();
    for pp in [3u32, 5, 7] {
        for n in 1..=3 {
            let expected = pow(pp, n - 1) * (pp as u128 + 1);
            if expected > 10_000 {
                continue;
            }
            let distinct: HashSet<_> = enumerate_maximal(prime(pp), n)
                .map_err(|e| e.to_string())?
                .collect();
            check(distinct.len() as u128 == expected, || {
                format!("p={pp} n={n}: {} forms, want {expected}", distinct.len())
            })?;
            notes.push(format!("{pp}^{n}:{expected}"));
        }
    }
    for (pp, n) in [(3u32, 1usize), (3, 2), (5, 1)] {
        let census = census_maximal_generators(prime(pp), n).map_err(|e| e.to_string())?;
        let expected = pow(pp, 2 * n) - pow(pp, 2 * (n - 1));
        check(census == expected, || {
            format!("census p={pp} n={n}: {census}, want {expected}")
        })?;
    }
    Ok(notes.join(" "))
}

/// Exact collision probabilities by double enumeration.
fn exhaustive_collisions() -> Outcome {
    let cases = [
        (3u32, 1usize, Rational::new(1, 4)),
        (3, 2, Rational::new(1, 12)),
        (3, 3, Rational::new(1, 36)),
        (5, 1, Rational::new(1, 6)),
        (5, 2, Rational::new(1, 30)),
    ];
    let mut notes = Vec::new();
    for (pp, n, want) in cases {
        let e = collision_probability_exhaustive(prime(pp), n).map_err(|e| e.to_string())?;
        check(e.probability == want && e.representations_agree, || {
            format!("p={pp} n={n}: got {}, want {want}", e.probability)
        })?;
        notes.push(format!("{want}"));
    }
    Ok(notes.join(" "))
}

/// Sampled collision frequency and sampler uniformity.
fn monte_carlo_agreement() -> Outcome {
    let s = monte_carlo(prime(3), 3, 100_000, RngSpec::new(20_240_601)).map_err(|e| e.to_string())?;
    check(s.exact == Rational::new(1, 36), || format!("exact {}", s.exact))?;
    let q: f64 = 1.0 / 36.0;
    let se = (q * (1.0 - q) / 100_000.0).sqrt();
    let emp = s.collisions as f64 / 100_000.0;
    check((emp - q).abs() <= 4.0 * se, || {
        format!("empirical {emp} is {:.2} standard errors from 1/36", (emp - q) / se)
    })?;
    let chi = sampler_chi_square(prime(3), 2, 1_000_000, RngSpec::new(7)).map_err(|e| e.to_string())?;
    check(chi.degrees_of_freedom == 11, || format!("{} d.o.f.", chi.degrees_of_freedom))?;
    // 0.999 quantile of chi-square with 11 degrees of freedom
    check((chi.quantile_999 - 31.264).abs() < 1e-3, || format!("quantile {}", chi.quantile_999))?;
    check(chi.statistic < 31.264, || format!("chi-square {} too large", chi.statistic))?;
    Ok(format!(
        "freq={emp:.6} z={:+.3} chi2={:.3}<31.264",
        (emp - q) / se,
        chi.statistic
    ))
}

/// Intersection exponents along towers stabilize once past the top exponent.
fn tower_stabilization() -> Outcome {
    let p = prime(3);
    let tops: Vec<_> = enumerate_maximal(p, 4).map_err(|e| e.to_string())?.collect();
    let mut pairs = 0u64;
    for a in &tops {
        for b in &tops {
            pairs += 1;
            let exps: Vec<usize> = (1..=4)
                .map(|k| {
                    let (x, y) = (a.project(k).unwrap(), b.project(k).unwrap());
                    x.intersect_linear(&y).unwrap().size_exponent
                })
                .collect();
            let ok = if a == b {
                exps.iter().enumerate().all(|(i, &e)| e == i + 1)
            } else {
                let v = exps[3];
                v < 4
                    && exps
                        .iter()
                        .enumerate()
                        .all(|(i, &e)| e == (i + 1).min(v))
            };
            check(ok, || format!("{a:?} vs {b:?}: exponents {exps:?}"))?;
        }
    }
    let census = tower_census(p, 4).map_err(|e| e.to_string())?;
    check(census.violations == 0 && census.pairs == pairs, || {
        format!("census reports {} violations over {} pairs", census.violations, census.pairs)
    })?;
    Ok(format!("{pairs} pairs"))
}

/// Every level-n form has p^(m-n) lifts, and the lifts tile level m.
fn projective_consistency() -> Outcome {
    let p = prime(3);
    for (n, m) in [(1usize, 2usize), (1, 3), (2, 3)] {
        let fiber = pow(3, m - n) as usize;
        let mut covered = HashSet::new();
        for base in enumerate_maximal(p, n).map_err(|e| e.to_string())? {
            let lifts: HashSet<_> = base.lifts(m).map_err(|e| e.to_string())?.collect();
            check(lifts.len() == fiber, || {
                format!("({n},{m}): {} lifts, want {fiber}", lifts.len())
            })?;
            check(lifts.iter().all(|l| l.project(n).unwrap() == base), || {
                format!("({n},{m}): lift does not project back")
            })?;
            covered.extend(lifts);
        }
        let all: HashSet<_> = enumerate_maximal(p, m).map_err(|e| e.to_string())?.collect();
        check(covered == all, || format!("({n},{m}): lifts do not cover level {m}"))?;
        let report = pushforward_consistency(p, n, m).map_err(|e| e.to_string())?;
        check(report.consistent(), || format!("({n},{m}): pushforward {report:?}"))?;
    }
    Ok("(1,2) (1,3) (2,3)".into())
}

fn pairing_axioms_on(shape: &SpaceShape, seed: u64) -> Result<(), String> {
    let p = shape.prime();
    let minus_one = p.get() - 1;
    let names = shape.generator_names();
    let levels = shape.generator_levels();
    let g = |i: usize| SpaceElement::generator(shape, i).unwrap();
    let pr = |x: &SpaceElement, y: &SpaceElement| pairing(x, y).unwrap();

    // generator relations, and orthogonality of distinct blocks
    for i in 0..names.len() {
        for j in 0..names.len() {
            let want = if i / 2 != j / 2 || i == j {
                0
            } else if i % 2 == 0 {
                1
            } else {
                minus_one
            };
            check(pr(&g(i), &g(j)) == want, || {
                format!("({}, {}) != {want}", names[i], names[j])
            })?;
        }
    }

    // delta relation on every block and every index pair
    let top = levels.iter().copied().max().unwrap();
    let gamma = Series::gamma(p, top);
    for block in 0..names.len() / 2 {
        let m = levels[2 * block];
        for k1 in 0..m as u64 {
            for k2 in 0..m as u64 {
                let x = g(2 * block).act(&gamma.pow(k1)).unwrap();
                let y = g(2 * block + 1).act(&gamma.pow(k2)).unwrap();
                check(pr(&x, &y) == u32::from(k1 == k2), || {
                    format!("delta relation fails on block {block} at ({k1},{k2})")
                })?;
            }
        }
    }

    // equivariance on seeded random triples
    let streams = RngSpec::new(seed);
    for t in 0..1000 {
        let mut rng = streams.trial_rng(t);
        let tau = Series::random(p, top, &mut rng);
        let x = SpaceElement::random(shape, &mut rng);
        let y = SpaceElement::random(shape, &mut rng);
        check(
            pr(&x.act(&tau).unwrap(), &y) == pr(&x, &y.act(&tau.iota()).unwrap()),
            || format!("equivariance fails on triple {t}"),
        )?;
    }

    // nondegeneracy
    let rank = shape.gram_matrix().rank();
    check(rank == shape.dim(), || format!("Gram rank {rank} < {}", shape.dim()))?;

    // complement laws on seeded random subspaces
    let dim = shape.dim();
    for t in 0..100 {
        let mut rng = streams.trial_rng(1_000_000 + t);
        let k = rng.gen_range(0..=dim);
        let vs: Vec<_> = (0..k).map(|_| SpaceElement::random(shape, &mut rng)).collect();
        let m = FpSubspace::span_elements(shape, &vs).unwrap();
        let perp = m.orthogonal_complement();
        check(m.dim() + perp.dim() == dim, || format!("subspace {t}: dimensions"))?;
        check(perp.orthogonal_complement() == m, || format!("subspace {t}: double complement"))?;
        for x in &vs {
            for b in perp.basis() {
                let y = SpaceElement::from_flat(shape, b).unwrap();
                check(pr(x, &y) == 0, || format!("subspace {t}: complement not orthogonal"))?;
            }
        }
    }
    Ok(())
}

/// Generator relations, delta relation, equivariance, nondegeneracy and
/// complement laws on the six small shapes.
fn pairing_axioms() -> Outcome {
    let mut count = 0;
    for rank in [1usize, 3] {
        for torsion in [vec![], vec![1usize], vec![3]] {
            let shape = SpaceShape::new(prime(3), rank, torsion.clone()).map_err(|e| e.to_string())?;
            pairing_axioms_on(&shape, 1000 + count)
                .map_err(|e| format!("rank {rank} torsion {torsion:?}: {e}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} shapes"))
}

/// `W^perp` by brute force over every vector of the space.
fn brute_complement(w: &FpSubspace) -> HashSet<Vec<u32>> {
    let shape = w.shape();
    let basis: Vec<_> = w
        .basis()
        .iter()
        .map(|b| SpaceElement::from_flat(shape, b).unwrap())
        .collect();
    Subspace::whole(shape.prime(), shape.dim())
        .elements()
        .filter(|v| {
            let y = SpaceElement::from_flat(shape, v).unwrap();
            basis.iter().all(|x| pairing(x, &y).unwrap() == 0)
        })
        .collect()
}

/// Maximal isotropic `T`-stable subspaces.
fn isotropic_enumeration() -> Outcome {
    let plain = SpaceShape::new(prime(3), 1, vec![]).map_err(|e| e.to_string())?;
    let found = enumerate_maximal_isotropic(&plain).map_err(|e| e.to_string())?;
    check(found.len() == 4, || format!("{} without torsion, want 4", found.len()))?;

    let shape = SpaceShape::new(prime(3), 1, vec![1]).map_err(|e| e.to_string())?;
    let found = enumerate_maximal_isotropic(&shape).map_err(|e| e.to_string())?;
    check(!found.is_empty(), || "nothing found with one torsion block".into())?;
    for (i, d) in found.iter().enumerate() {
        let w: HashSet<_> = d.subspace.subspace().elements().collect();
        check(brute_complement(&d.subspace) == w, || format!("result {i} is not its own complement"))?;
        check(d.subspace.is_t_stable(), || format!("result {i} is not T-stable"))?;
        check(*d == IsotropicDiagnostics::of(&d.subspace), || format!("result {i}: diagnostics"))?;
    }
    let decomposing = found.iter().filter(|d| d.decomposes).count();
    Ok(format!(
        "4 without torsion; {} with torsion (1): decomposing={decomposing} non_decomposing={}",
        found.len(),
        found.len() - decomposing
    ))
}

/// Intersection size against quotient size over all pairs at p = 3, n = 2.
fn duality() -> Outcome {
    let forms: Vec<CyclicSubmodule> = enumerate_maximal(prime(3), 2).map_err(|e| e.to_string())?.collect();
    let mut pairs = 0;
    for a in &forms {
        for b in &forms {
            let i = a.intersect(b).map_err(|e| e.to_string())?;
            let q = a.sum_and_quotient(b).map_err(|e| e.to_string())?;
            check(i.size_exponent == q.quotient_size_exponent, || {
                format!("{a:?} vs {b:?}: {} != {}", i.size_exponent, q.quotient_size_exponent)
            })?;
            pairs += 1;
        }
    }
    check(pairs == 144, || format!("{pairs} pairs, want 144"))?;
    Ok(format!("{pairs} pairs"))
}

fn run_binary(dir: &Path, threads: usize) -> Result<Vec<u8>, String> {
    let prefix = dir.join(format!("mc-threads-{threads}"));
    let status = Command::new(env!("CARGO_BIN_EXE_omega-experiments"))
        .args(["--mode", "montecarlo", "--prime", "3", "--levels", "1,2,3"])
        .args(["--trials", "50000", "--seed", "42", "--format", "csv"])
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--output")
        .arg(&prefix)
        .env("NO_COLOR", "1")
        .output()
        .map_err(|e| e.to_string())?;
    check(status.status.success(), || {
        format!("exit {:?}: {}", status.status.code(), String::from_utf8_lossy(&status.stderr))
    })?;
    std::fs::read(prefix.with_extension("csv")).map_err(|e| e.to_string())
}

/// Same config and seed on 1 and 8 threads give identical CSV bytes.
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let one = run_binary(dir.path(), 1)?;
    let eight = run_binary(dir.path(), 8)?;
    check(one == eight, || "CSV differs between 1 and 8 threads".into())?;
    let lines = one.iter().filter(|&&b| b == b'\n').count();
    check(lines == 4, || format!("{lines} CSV lines, want header + 3 rows"))?;
    Ok(format!("{} bytes identical", one.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("count of maximal cyclic submodules", counts, 5),
        ("exact collision probability", exhaustive_collisions, 30),
        ("Monte-Carlo agreement", monte_carlo_agreement, 60),
        ("tower stabilization", tower_stabilization, 30),
        ("projective-system consistency", projective_consistency, 10),
        ("pairing axioms", pairing_axioms, 60),
        ("maximal isotropic enumeration", isotropic_enumeration, 60),
        ("duality of invariants", duality, 10),
        ("thread-count determinism", determinism, 120),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{note}; exceeded {budget} s budget"))
            }
            other => other,
        };
        let (tag, note) = match &outcome {
            Ok(note) => ("PASS", note),
            Err(why) => {
                failures += 1;
                ("FAIL", why)
            }
        };
        println!(
            "[{tag}] criterion {} — {name} ({:.2} s): {note}",
            i + 1,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
