//! Cross-checks against values computed independently inside the tests.

use correlated_voters::elections::{
    distance_to_class, f3_family, paradox_probability, qa_probe, Constitution, ElectionMethod, PairRule,
};
use correlated_voters::meanfield::{find_global_max, log_z_limit, nae_log_partition, phi_objective};
use correlated_voters::models::{
    condorcet_probability, energy, enumerate_exact, magnetization_summary, Chain, CondorcetMethod, MatchingSampler,
    ModelSpec, Profile, Scan,
};
use correlated_voters::perm::{
    embed, enumerate_permutations, from_nae_coords, is_transitive, kendall_tau, to_nae_coords, PermTable,
};
use correlated_voters::stats::stream_rng;
use correlated_voters::tilt::{covariance, mean_vector, sample, TiltParams};
use rand::Rng;

#[test]
fn single_edge_partition_is_mallows_sum() {
    for beta in [0.0, 0.3, 1.0, 2.5] {
        let spec = ModelSpec::graph(3, 2, beta, vec![(0, 1)]).unwrap();
        let d = enumerate_exact(&spec).unwrap();
        let e = |k: f64| (-2.0 * beta * k).exp();
        let z = 6.0 * (1.0 + 2.0 * e(1.0) + 2.0 * e(2.0) + e(3.0));
        assert!((d.log_z() - z.ln()).abs() < 1e-12, "β = {beta}");
    }
}

#[test]
fn one_voter_is_uniform() {
    for q in 3..=5 {
        let d = enumerate_exact(&ModelSpec::mean_field(q, 1, 1.7).unwrap()).unwrap();
        let u = 1.0 / d.len() as f64;
        assert!(d.probs().iter().all(|p| (p - u).abs() < 1e-15));
    }
}

#[test]
fn two_voter_mean_field_is_an_edge() {
    // (β/4)‖φx + φy‖² = β·C(q,2) − β·d(x, y), which is the edge energy at β/2
    // shifted by a constant.
    for q in [3, 4] {
        let perms = enumerate_permutations(q).unwrap();
        let pairs = (q * (q - 1) / 2) as f64;
        let mf = ModelSpec::mean_field(q, 2, 0.9).unwrap();
        let g = ModelSpec::graph(q, 2, 0.45, vec![(0, 1)]).unwrap();
        for x in &perms {
            for y in &perms {
                let p = Profile::Votes(vec![x.clone(), y.clone()]);
                let shift = energy(&mf, &p).unwrap() - energy(&g, &p).unwrap();
                assert!((shift - 0.9 * pairs).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn matching_pair_moments() {
    let beta: f64 = 1.0;
    let spec = ModelSpec::matching(3, 1, beta).unwrap();
    let sampler = MatchingSampler::new(&spec).unwrap();
    let table = PermTable::get(3).unwrap();
    let den = 3.0 * ((3.0 * beta).cosh() + 2.0 * beta.cosh());
    let diag = (3.0 * (3.0 * beta).sinh() + 2.0 * beta.sinh()) / den;
    let off = -((3.0 * beta).sinh() + 2.0 * beta.sinh()) / den;
    let draws = 1_000_000;
    let mut sum = [[0.0f64; 3]; 3];
    let mut sq = [[0.0f64; 3]; 3];
    let mut rng = stream_rng(17, 0);
    let nae = |i: u32| {
        let e = table.embedding(i as usize);
        to_nae_coords([e[0], e[1], e[2]])
    };
    for _ in 0..draws {
        let (x, y) = sampler.sample_pair(&mut rng);
        let (x, y) = (nae(x), nae(y));
        for a in 0..3 {
            for b in 0..3 {
                let v = (x[a] * y[b]) as f64;
                sum[a][b] += v;
                sq[a][b] += v * v;
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            let mean = sum[a][b] / draws as f64;
            let se = ((sq[a][b] / draws as f64 - mean * mean) / draws as f64).sqrt();
            let target = if a == b { diag } else { off };
            assert!((mean - target).abs() < 4.0 * se, "({a},{b}): {mean} vs {target}");
        }
    }
}

#[test]
fn glauber_profile_law_matches_enumeration() {
    let spec = ModelSpec::mean_field(3, 3, 1.0).unwrap();
    let exact = enumerate_exact(&spec).unwrap();
    let mut rng = stream_rng(23, 0);
    let mut chain = Chain::new(&spec, None, &mut rng).unwrap();
    let mut counts = vec![0u64; exact.len()];
    let draws = 50_000;
    for _ in 0..200 {
        chain.sweep(Scan::Random, &mut rng);
    }
    for _ in 0..draws {
        for _ in 0..10 {
            chain.sweep(Scan::Random, &mut rng);
        }
        counts[exact.index_of(chain.state())] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(exact.probs())
        .map(|(&c, &p)| {
            let e = p * draws as f64;
            (c as f64 - e).powi(2) / e
        })
        .sum();
    let df = (exact.len() - 1) as f64;
    assert!(chi2 < df + 5.0 * (2.0 * df).sqrt(), "χ² = {chi2} with {df} df");
}

#[test]
fn tilt_sampler_mean() {
    let t = TiltParams::new(4, vec![0.8, -0.3, 0.2, 0.5, -1.1, 0.4]).unwrap();
    let mean = mean_vector(&t).unwrap();
    let cov = covariance(&t).unwrap();
    let draws = 100_000;
    let mut rng = stream_rng(31, 0);
    let mut sum = [0.0; 6];
    for _ in 0..draws {
        let p = sample(&t, &mut rng).unwrap();
        for (s, &e) in sum.iter_mut().zip(embed(&p).entries()) {
            *s += e as f64;
        }
    }
    for k in 0..6 {
        let se = (cov[k * 6 + k] / draws as f64).sqrt();
        assert!((sum[k] / draws as f64 - mean[k]).abs() < 4.0 * se, "pair {k}");
    }
}

#[test]
fn objective_is_energy_plus_entropy() {
    // Φ(s) = (β/2)‖s‖² + H(P_λ), with the entropy taken from the generic tilt.
    let beta = 1.0;
    let sol = &find_global_max(beta).unwrap()[0];
    let lam_phi = from_nae_coords(sol.lambda);
    let t = TiltParams::new(3, lam_phi.to_vec()).unwrap();
    let mean = mean_vector(&t).unwrap();
    let log_z = correlated_voters::tilt::log_partition(&t).unwrap();
    let entropy = log_z - lam_phi.iter().zip(&mean).map(|(l, m)| l * m).sum::<f64>();
    let s = to_nae_coords([mean[0], mean[1], mean[2]]);
    for k in 0..3 {
        assert!((s[k] - sol.s[k]).abs() < 1e-12);
    }
    let norm: f64 = s.iter().map(|x| x * x).sum();
    assert!((phi_objective(sol.lambda, beta) - (0.5 * beta * norm + entropy)).abs() < 1e-12);
    assert!((nae_log_partition(sol.lambda) - log_z).abs() < 1e-12);

    // The product measure bounds log Z from below; the bound is tight per voter.
    let n = 1001;
    let summary = magnetization_summary(&ModelSpec::mean_field(3, n, beta).unwrap()).unwrap();
    let lower = n as f64 * (sol.objective - 6f64.ln()) + 0.5 * beta * (3.0 - norm);
    assert!(summary.log_z_ratio >= lower);
    assert!((summary.log_z_ratio - lower) / (n as f64) < 0.01);
}

#[test]
fn log_z_converges_below_criticality() {
    let summary = magnetization_summary(&ModelSpec::mean_field(3, 2001, 0.5).unwrap()).unwrap();
    assert!((summary.log_z_ratio - log_z_limit(0.5).unwrap()).abs() < 0.01);
}

fn brute_paradox(q: usize, n: usize) -> f64 {
    let perms = enumerate_permutations(q).unwrap();
    let m = perms.len();
    let total = m.pow(n as u32);
    let mut bad = 0usize;
    for code in 0..total {
        let mut c = code;
        let mut sum = vec![0i32; q * (q - 1) / 2];
        for _ in 0..n {
            for (s, &e) in sum.iter_mut().zip(embed(&perms[c % m]).entries()) {
                *s += e as i32;
            }
            c /= m;
        }
        let out: Vec<i8> = sum.iter().map(|&s| s.signum() as i8).collect();
        if !is_transitive(&out).unwrap() {
            bad += 1;
        }
    }
    bad as f64 / total as f64
}

#[test]
fn uniform_majority_paradox_by_brute_force() {
    for n in [3, 5, 7] {
        let spec = ModelSpec::mean_field(3, n, 0.0).unwrap();
        let got = paradox_probability(&Constitution::majority(3), &spec, ElectionMethod::Exact, 0).unwrap();
        assert!((got.probability - brute_paradox(3, n)).abs() < 1e-12, "n = {n}");
        let cw = condorcet_probability(&spec, CondorcetMethod::ExactDp, 0).unwrap();
        assert!((cw.value + got.probability - 1.0).abs() < 1e-12);
    }
    assert!((brute_paradox(3, 3) - 1.0 / 18.0).abs() < 1e-15);
}

#[test]
fn majority_is_not_in_the_class() {
    let spec = ModelSpec::mean_field(3, 5, 0.0).unwrap();
    let d = distance_to_class(&Constitution::majority(3), &spec, ElectionMethod::Exact, 0).unwrap();
    assert!(d.distance > 0.0);
    assert!(d.full_class.unwrap() > 0.0);
    for c in f3_family(5) {
        let d = distance_to_class(&c, &spec, ElectionMethod::Exact, 0).unwrap();
        assert_eq!(d.full_class, Some(0.0), "{c}");
    }
}

#[test]
fn random_truth_tables_are_never_flagged() {
    // Three voters, uniform: probabilities are multiples of 6⁻³, so "below
    // 1/432" means paradox-free, and a paradox-free IIA rule is in the class.
    let spec = ModelSpec::mean_field(3, 3, 0.0).unwrap();
    let mut rng = stream_rng(41, 0);
    let mut family = Vec::new();
    for _ in 0..200 {
        let rules = (0..3)
            .map(|_| PairRule::TruthTable((0..8).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()))
            .collect();
        family.push(Constitution::new(3, rules).unwrap());
    }
    family.extend(f3_family(3));
    let rows = qa_probe(&spec, &family, 1e-9, 1.0 / 432.0).unwrap();
    assert!(rows.iter().all(|r| !r.flagged));
    assert!(rows.iter().all(|r| (r.paradox == 0.0) == (r.full_class == 0.0)), "Arrow/Wilson dichotomy");
}

#[test]
fn exact_and_monte_carlo_paradox_agree() {
    let rules = [
        "maj",
        "dict:1",
        "maj,maj,const:+1",
        "dict:2,anti:1,maj",
        "table:01101001,maj,dict:3",
        "anti:3,anti:3,maj",
        "table:00010111,table:01111111,table:00000001",
    ];
    let mut cases = 0;
    for (k, r) in rules.iter().enumerate() {
        for (j, spec) in [
            ModelSpec::mean_field(3, 3, 0.0).unwrap(),
            ModelSpec::mean_field(3, 3, 1.0).unwrap(),
            ModelSpec::graph(3, 3, 0.7, vec![(0, 1), (1, 2)]).unwrap(),
        ]
        .iter()
        .enumerate()
        {
            if cases == 20 {
                break;
            }
            let c = Constitution::parse(3, r).unwrap();
            let exact = paradox_probability(&c, spec, ElectionMethod::Exact, 0).unwrap().probability;
            let mc =
                paradox_probability(&c, spec, ElectionMethod::MonteCarlo { samples: 40_000 }, (k * 3 + j) as u64)
                    .unwrap();
            let tol = 4.0 * mc.standard_error.max(1e-12);
            assert!((mc.probability - exact).abs() <= tol, "{r} on {spec:?}: {} vs {exact}", mc.probability);
            cases += 1;
        }
    }
    assert_eq!(cases, 20);
}

#[test]
fn kendall_counts_discordant_pairs() {
    let perms = enumerate_permutations(4).unwrap();
    for a in &perms {
        for b in &perms {
            let mut d = 0;
            for i in 0..4 {
                for j in i + 1..4 {
                    if (a.rank(i) < a.rank(j)) != (b.rank(i) < b.rank(j)) {
                        d += 1;
                    }
                }
            }
            assert_eq!(kendall_tau(a, b).unwrap(), d);
        }
    }
}

#[test]
fn matching_single_voter_marginal_is_uniform() {
    let spec = ModelSpec::matching(3, 1, 1.3).unwrap();
    let sampler = MatchingSampler::new(&spec).unwrap();
    let mut rng = stream_rng(53, 0);
    let draws = 1_000_000u64;
    let mut counts = [[0u64; 6]; 2];
    for _ in 0..draws {
        let (x, y) = sampler.sample_pair(&mut rng);
        counts[0][x as usize] += 1;
        counts[1][y as usize] += 1;
    }
    let e = draws as f64 / 6.0;
    for c in counts {
        let chi2: f64 = c.iter().map(|&k| (k as f64 - e).powi(2) / e).sum();
        // 5 degrees of freedom; the 0.9999 quantile is about 25.7.
        assert!(chi2 < 25.7, "χ² = {chi2}");
    }
}
