//! Mode dispatch.

use std::collections::HashSet;
use std::time::Instant;

use omega_model::heuristic::{
    bound_supremum, collision_probability_exact, collision_probability_exhaustive,
    intersection_bound, monte_carlo, ratio_f64, tower_census, tower_experiment, Rational,
    EXHAUSTIVE_LIMIT,
};
use omega_model::pairing::{enumerate_maximal_isotropic, IsotropicDiagnostics};
use omega_model::submodule::{
    census_maximal_generators, count_maximal, count_maximal_generators, enumerate_maximal,
};
use omega_model::{Prime, RngSpec, SpaceShape, VERSION};

use crate::config::{ExperimentConfig, Invocation, Mode};
use crate::decimal;
use crate::error::CliError;
use crate::report::{ExperimentReport, Extra, Metadata, ReportRow};

/// Enumerate canonical forms in count mode up to this many.
const COUNT_ENUMERATION_LIMIT: u128 = 1_000_000;
/// Census of `Omega_n^2` in count mode up to this many elements.
const COUNT_CENSUS_LIMIT: u128 = 1_000_000;
/// Exhaustive tower census in tower mode up to this many canonical forms.
const TOWER_CENSUS_LIMIT: u128 = 400;

/// Runs the configured experiment on a pool of `threads` workers (0 = automatic).
pub fn run(inv: &Invocation) -> Result<ExperimentReport, CliError> {
    inv.config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(inv.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("threads: {e}")))?;
    let rows = pool.install(|| rows_for(&inv.config))?;
    Ok(ExperimentReport {
        config: inv.config.clone(),
        rows,
        metadata: Metadata {
            version: VERSION.to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            rng: RngSpec::new(inv.config.seed).to_string(),
        },
    })
}

fn rows_for(config: &ExperimentConfig) -> Result<Vec<ReportRow>, CliError> {
    let p = config.prime();
    let mut rows = Vec::new();
    for &n in &config.levels {
        let start = Instant::now();
        let mut produced = match config.mode {
            Mode::Count => vec![count_row(p, n)?],
            Mode::Exhaustive => vec![exhaustive_row(p, n, &config.levels)?],
            Mode::Montecarlo => vec![montecarlo_row(config, p, n)?],
            Mode::Tower => vec![tower_row(config, p, n)?],
            Mode::Isotropic => isotropic_rows(config, p, n)?,
        };
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut produced {
            r.runtime_ms = Some(ms);
        }
        rows.extend(produced);
    }
    Ok(rows)
}

fn base_row(mode: Mode, p: Prime, n: usize) -> ReportRow {
    ReportRow {
        mode: mode.as_str().to_string(),
        p: p.get(),
        n,
        exact_num: None,
        exact_den: None,
        exact_decimal: None,
        empirical: None,
        stderr: None,
        trials: None,
        seed: None,
        runtime_ms: None,
        extra: String::new(),
    }
}

fn set_exact(row: &mut ReportRow, r: &Rational) {
    row.exact_num = Some(*r.numer());
    row.exact_den = Some(*r.denom());
    row.exact_decimal = Some(decimal::from_ratio(*r.numer(), *r.denom()));
}

fn ratio_text(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn histogram_text(h: &[u64]) -> String {
    h.iter()
        .enumerate()
        .map(|(v, c)| format!("{v}:{c}"))
        .collect::<Vec<_>>()
        .join("|")
}

fn count_row(p: Prime, n: usize) -> Result<ReportRow, CliError> {
    let count = count_maximal(p, n)?;
    let mut row = base_row(Mode::Count, p, n);
    set_exact(&mut row, &Rational::from_integer(count));
    let mut extra = Extra::default();
    extra.push("generators", count_maximal_generators(p, n)?);
    if count <= COUNT_ENUMERATION_LIMIT {
        let distinct: HashSet<_> = enumerate_maximal(p, n)?.collect();
        extra.push("enumerated", distinct.len());
    } else {
        extra.push("enumerated", "skipped");
    }
    match p.checked_power(2 * n) {
        Some(size) if size <= COUNT_CENSUS_LIMIT => {
            extra.push("census", census_maximal_generators(p, n)?);
        }
        _ => {
            extra.push("census", "skipped");
        }
    }
    row.extra = extra.finish();
    Ok(row)
}

fn exhaustive_row(p: Prime, n: usize, grid: &[usize]) -> Result<ReportRow, CliError> {
    let exact = collision_probability_exact(p, n)?;
    let mut row = base_row(Mode::Exhaustive, p, n);
    set_exact(&mut row, &exact);
    let mut extra = Extra::default();
    if count_maximal(p, n)? <= EXHAUSTIVE_LIMIT {
        let e = collision_probability_exhaustive(p, n)?;
        let ok = e.probability == exact && e.representations_agree;
        extra
            .push("cross_check", if ok { "verified" } else { "mismatch" })
            .push("pairs", e.pairs)
            .push("collisions", e.collisions);
        row.empirical = Some(decimal::from_ratio(*e.probability.numer(), *e.probability.denom()));
    } else {
        extra.push("cross_check", "skipped");
    }
    extra.push("bound", ratio_text(&intersection_bound(p, n)?));
    if let Some(sup) = bound_supremum(p, grid)? {
        extra.push("bound_sup", ratio_text(&sup));
    }
    row.extra = extra.finish();
    Ok(row)
}

fn montecarlo_row(config: &ExperimentConfig, p: Prime, n: usize) -> Result<ReportRow, CliError> {
    let trials = config.trials.expect("validated");
    let s = monte_carlo(p, n, trials, RngSpec::new(config.seed))?;
    let mut row = base_row(Mode::Montecarlo, p, n);
    set_exact(&mut row, &s.exact);
    row.empirical = Some(decimal::from_ratio(s.collisions as u128, trials as u128));
    row.stderr = Some(decimal::from_f64(s.standard_error()));
    row.trials = Some(trials);
    row.seed = Some(config.seed);
    let quotients = s
        .quotient_structures
        .iter()
        .map(|(shape, c)| {
            let key = if shape.is_empty() {
                "0".to_string()
            } else {
                shape.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
            };
            format!("{key}:{c}")
        })
        .collect::<Vec<_>>()
        .join("|");
    let delta = s.empirical_f64() - ratio_f64(&s.exact);
    let mut extra = Extra::default();
    extra
        .push("collisions", s.collisions)
        .push("delta", format!("{delta:+.6e}"))
        .push("z", format!("{:+.4}", s.z_score()))
        .push("within_4sigma", s.within_sigmas(4.0))
        .push("v_hist", histogram_text(&s.exponent_histogram))
        .push("quotients", quotients)
        .push("mismatches", s.representation_mismatches);
    row.extra = extra.finish();
    Ok(row)
}

fn tower_row(config: &ExperimentConfig, p: Prime, max_level: usize) -> Result<ReportRow, CliError> {
    let trials = config.trials.expect("validated");
    let s = tower_experiment(p, max_level, trials, RngSpec::new(config.seed))?;
    let exact = collision_probability_exact(p, max_level)?;
    let mut row = base_row(Mode::Tower, p, max_level);
    set_exact(&mut row, &exact);
    row.empirical = Some(decimal::from_ratio(s.identical as u128, s.pairs as u128));
    let q = ratio_f64(&exact);
    row.stderr = Some(decimal::from_f64((q * (1.0 - q) / trials as f64).sqrt()));
    row.trials = Some(trials);
    row.seed = Some(config.seed);
    let mut extra = Extra::default();
    extra
        .push("identical", s.identical)
        .push("violations", s.violations)
        .push("v_hist", histogram_text(&s.v_histogram));
    if count_maximal(p, max_level)? <= TOWER_CENSUS_LIMIT {
        let c = tower_census(p, max_level)?;
        extra
            .push("census_pairs", c.pairs)
            .push("census_violations", c.violations)
            .push("census_v_hist", histogram_text(&c.v_histogram));
    }
    row.extra = extra.finish();
    Ok(row)
}

fn isotropic_rows(config: &ExperimentConfig, p: Prime, n: usize) -> Result<Vec<ReportRow>, CliError> {
    let shape = SpaceShape::new(p, n, config.shape.clone())?;
    let found = enumerate_maximal_isotropic(&shape)?;
    let verified = found
        .iter()
        .all(|d| d.subspace.orthogonal_complement() == d.subspace && d.subspace.is_t_stable());
    let decomposing = found.iter().filter(|d| d.decomposes).count();
    let shape_text = config
        .shape
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(".");

    let mut summary = base_row(Mode::Isotropic, p, n);
    set_exact(&mut summary, &Rational::from_integer(found.len() as u128));
    let mut extra = Extra::default();
    extra
        .push("kind", "summary")
        .push("torsion", if shape_text.is_empty() { "none".into() } else { shape_text })
        .push("dim", shape.dim())
        .push("verified", verified)
        .push("decomposing", decomposing)
        .push("non_decomposing", found.len() - decomposing);
    summary.extra = extra.finish();

    let mut rows = vec![summary];
    rows.extend(found.iter().enumerate().map(|(i, d)| diagnostic_row(p, n, i, d)));
    Ok(rows)
}

fn diagnostic_row(p: Prime, n: usize, index: usize, d: &IsotropicDiagnostics) -> ReportRow {
    let mut row = base_row(Mode::Isotropic, p, n);
    let basis = d
        .subspace
        .basis()
        .iter()
        .map(|b| b.iter().map(u32::to_string).collect::<String>())
        .collect::<Vec<_>>()
        .join("|");
    let mut extra = Extra::default();
    extra
        .push("kind", "subspace")
        .push("index", index)
        .push("basis", basis)
        .push("rank_projection_dim", d.rank_projection_dim)
        .push("rank_intersection_dim", d.rank_intersection_dim)
        .push("torsion_intersection_dim", d.torsion_intersection_dim)
        .push("rank_cyclic", d.rank_intersection_cyclic)
        .push("decomposes", d.decomposes);
    row.extra = extra.finish();
    row
}
