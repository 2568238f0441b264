use std::ops::RangeInclusive;

use correlated_voters::closed_forms::{self, SweepModel};
use correlated_voters::elections::{paradox_probability, Constitution, ElectionMethod, PairRule};
use correlated_voters::meanfield::{eigen_summary, find_global_max, solve_family, Family};
use correlated_voters::models::{condorcet_probability, CondorcetMethod, ModelSpec};
use correlated_voters::perm::num_pairs;
use correlated_voters::tilt::{cgf_probe, PROBE_SEED};

use crate::table::Table;
use crate::{CliError, MethodArg, ModelArg};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// `start:end:step`.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts[..] else {
        return Err(usage(format!("grid {s:?} is not start:end:step")));
    };
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| usage(format!("bad number {x:?} in grid {s:?}")));
    Ok(closed_forms::grid(num(a)?, num(b)?, num(c)?)?)
}

/// `lo..hi` (inclusive) or a single value.
pub fn parse_range(s: &str) -> Result<RangeInclusive<usize>, CliError> {
    let num = |x: &str| x.trim().parse::<usize>().map_err(|_| usage(format!("bad range {s:?}")));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
        None => (num(s)?, num(s)?),
    };
    if lo > hi {
        return Err(usage(format!("empty range {s:?}")));
    }
    Ok(lo..=hi)
}

fn parse_edges(s: &str, voters: usize) -> Result<Vec<(usize, usize)>, CliError> {
    s.split(',')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            let (a, b) = e.split_once('-').ok_or_else(|| usage(format!("edge {e:?} is not i-j")))?;
            let v = |x: &str| match x.trim().parse::<usize>() {
                Ok(i) if (1..=voters).contains(&i) => Ok(i - 1),
                _ => Err(usage(format!("edge endpoint {x:?} is not a voter in 1..={voters}"))),
            };
            Ok((v(a)?, v(b)?))
        })
        .collect()
}

pub(crate) fn model_spec(
    model: ModelArg,
    q: usize,
    n: usize,
    beta: f64,
    edges: Option<&str>,
) -> Result<ModelSpec, CliError> {
    let spec = match (model, edges) {
        (ModelArg::MeanField, None) => ModelSpec::mean_field(q, n, beta)?,
        (ModelArg::Matching, None) => ModelSpec::matching(q, n, beta)?,
        (ModelArg::Graph, Some(e)) => ModelSpec::graph(q, n, beta, parse_edges(e, n)?)?,
        (ModelArg::Graph, None) => return Err(usage("the graph model needs --edges")),
        (_, Some(_)) => return Err(usage("--edges only applies to the graph model")),
    };
    Ok(spec)
}

fn model_name(spec: &ModelSpec) -> &'static str {
    match spec.kind() {
        correlated_voters::models::ModelKind::MeanField => "meanfield",
        correlated_voters::models::ModelKind::Matching => "matching",
        correlated_voters::models::ModelKind::GeneralGraph => "graph",
    }
}

pub fn guilbaud(model: &str, grid: &str) -> Result<Table, CliError> {
    let model: SweepModel = model.parse()?;
    let points = closed_forms::sweep(model, &parse_grid(grid)?)?;
    let mut t = Table::new(vec!["model", "beta", "p_condorcet"]);
    for p in points {
        t.push(vec![p.model.to_string().into(), p.beta.into(), p.value.into()]);
    }
    Ok(t)
}

pub(crate) fn estimate(
    spec: &ModelSpec,
    rule: &str,
    method: MethodArg,
    samples: u64,
    seed: u64,
) -> Result<Table, CliError> {
    let c = Constitution::parse(spec.q(), rule)?;
    let majority = c.rules().iter().all(|r| *r == PairRule::Majority);
    if method == MethodArg::Dp && !(majority && spec.q() == 3) {
        return Err(usage("--method dp needs the majority rule with three candidates"));
    }
    let election = match method {
        MethodArg::Exact | MethodArg::Dp => ElectionMethod::Exact,
        MethodArg::Mc => ElectionMethod::MonteCarlo { samples },
    };
    let condorcet = if majority {
        let m = match method {
            MethodArg::Exact => CondorcetMethod::ExactEnum,
            MethodArg::Dp => CondorcetMethod::ExactDp,
            MethodArg::Mc => CondorcetMethod::MonteCarlo { samples },
        };
        Some(condorcet_probability(spec, m, seed)?)
    } else {
        None
    };
    // With three candidates a complete tournament is intransitive exactly
    // when it has no Condorcet winner.
    let (paradox, se, used, draws) = match &condorcet {
        Some(cw) if spec.q() == 3 => (1.0 - cw.value, cw.std_error, cw.method, cw.samples),
        _ => {
            let p = paradox_probability(&c, spec, election, seed)?;
            (p.probability, p.standard_error, p.method, p.samples)
        }
    };
    let mut t = Table::new(vec![
        "model",
        "q",
        "n",
        "beta",
        "rule",
        "method",
        "samples",
        "seed",
        "p_paradox",
        "std_error",
        "p_condorcet",
    ]);
    t.push(vec![
        model_name(spec).into(),
        spec.q().into(),
        spec.n().into(),
        spec.beta().into(),
        c.to_string().into(),
        used.to_string().into(),
        draws.into(),
        seed.into(),
        paradox.into(),
        se.into(),
        condorcet.map(|e| e.value).into(),
    ]);
    Ok(t)
}

pub fn family_name(f: Family) -> &'static str {
    match f {
        Family::TrivialZero => "zero",
        Family::Type1AllEqual => "type1",
        Family::Type2ZeroPair => "type2",
        Family::Type3TwoEqualOppositeSign => "type3",
        Family::Unknown => "unknown",
    }
}

pub fn solve_mf(grid: &str) -> Result<Table, CliError> {
    let mut t = Table::new(vec![
        "beta", "start", "family", "lambda1", "lambda2", "lambda3", "objective", "residual", "global_max",
    ]);
    for beta in parse_grid(grid)? {
        let best = find_global_max(beta)?[0].objective;
        for start in [Family::Type1AllEqual, Family::Type2ZeroPair, Family::Type3TwoEqualOppositeSign] {
            let s = solve_family(beta, start)?;
            t.push(vec![
                beta.into(),
                family_name(start).into(),
                family_name(s.family).into(),
                s.lambda[0].into(),
                s.lambda[1].into(),
                s.lambda[2].into(),
                s.objective.into(),
                s.residual.into(),
                ((best - s.objective).abs() <= 1e-12).into(),
            ]);
        }
    }
    Ok(t)
}

pub fn verify_cgf(range: RangeInclusive<usize>, draws: usize, radius: f64) -> Result<(Table, Result<(), CliError>), CliError> {
    if draws == 0 {
        return Err(usage("--draws must be positive"));
    }
    let mut t = Table::new(vec![
        "q",
        "draws",
        "radius",
        "proven_bound",
        "conjectured_bound",
        "max_random_ratio",
        "small_lambda_ratio",
        "proven_violations",
        "conjecture_exceedances",
        "pass",
    ]);
    let mut failed = Vec::new();
    for q in range {
        let p = cgf_probe(q, draws, radius, PROBE_SEED)?;
        let pass = p.proven_violations == 0 && p.sup_ratio() > p.conjectured_bound - 1e-6;
        if !pass {
            failed.push(q);
        }
        if p.conjecture_exceedances > 0 {
            eprintln!("note: q = {q}: {} draws above (q+1)/3", p.conjecture_exceedances);
        }
        t.push(vec![
            q.into(),
            draws.into(),
            radius.into(),
            p.proven_bound.into(),
            p.conjectured_bound.into(),
            p.max_random_ratio.into(),
            p.small_lambda_ratio.into(),
            p.proven_violations.into(),
            p.conjecture_exceedances.into(),
            pass.into(),
        ]);
    }
    let verdict = if failed.is_empty() { Ok(()) } else { Err(CliError::Verify(format!("cgf bounds fail for q in {failed:?}"))) };
    Ok((t, verdict))
}

fn eigen_rows(range: RangeInclusive<usize>) -> Result<(Table, Vec<usize>), CliError> {
    let mut t = Table::new(vec![
        "q",
        "top_eigenvalue",
        "top_multiplicity",
        "bottom_eigenvalue",
        "bottom_multiplicity",
    ]);
    let mut bad = Vec::new();
    for q in range {
        let e = eigen_summary(q)?;
        let expected = [((q + 1) as f64 / 3.0, q - 1), (1.0 / 3.0, num_pairs(q - 1))];
        let ok = e.len() == 2 && e.iter().zip(&expected).all(|(a, b)| (a.0 - b.0).abs() < 1e-10 && a.1 == b.1);
        if !ok {
            bad.push(q);
        }
        let get = |i: usize| e.get(i).copied();
        t.push(vec![
            q.into(),
            get(0).map(|x| x.0).into(),
            get(0).map(|x| x.1).into(),
            get(1).map(|x| x.0).into(),
            get(1).map(|x| x.1).into(),
        ]);
    }
    Ok((t, bad))
}

pub fn eigen(range: RangeInclusive<usize>) -> Result<Table, CliError> {
    Ok(eigen_rows(range)?.0)
}

pub fn verify_eigen(range: RangeInclusive<usize>) -> Result<(Table, Result<(), CliError>), CliError> {
    let (t, bad) = eigen_rows(range)?;
    let verdict =
        if bad.is_empty() { Ok(()) } else { Err(CliError::Verify(format!("eigenstructure differs for q in {bad:?}"))) };
    Ok((t, verdict))
}
