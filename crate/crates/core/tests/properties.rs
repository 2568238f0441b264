use correlated_voters::closed_forms::{guilbaud_matching, guilbaud_meanfield, gaussian_sign_corr};
use correlated_voters::elections::{evaluate, Constitution, PairRule};
use correlated_voters::meanfield::{
    eigen_summary, find_global_max, orbit, phi_objective, s_of_lambda, sigma_beta, solve_fixed_point,
};
use correlated_voters::models::{magnetization_dp, run_chain, ChainConfig, ModelSpec, Profile};
use correlated_voters::perm::{
    embed, from_nae_coords, is_transitive, kendall_tau, num_pairs, pair_index, ranking_from_transitive,
    to_nae_coords, NaeVector, Permutation,
};
use correlated_voters::stats::stream_rng;
use correlated_voters::tilt::{cgf, mean_vector, TiltParams};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn random_perm(q: usize, seed: u64) -> Permutation {
    let mut v: Vec<usize> = (1..=q).collect();
    v.shuffle(&mut stream_rng(seed, 0));
    Permutation::from_one_line(&v).unwrap()
}

fn perm_strategy(max_q: usize) -> impl Strategy<Value = (usize, u64, u64, u64)> {
    (2..=max_q, any::<u64>(), any::<u64>(), any::<u64>())
}

fn lambda_strategy(q: usize, scale: f64) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-scale..scale, num_pairs(q))
}

proptest! {
    #[test]
    fn inner_product_is_kendall((q, a, b, _) in perm_strategy(10)) {
        let (x, y) = (random_perm(q, a), random_perm(q, b));
        let d = kendall_tau(&x, &y).unwrap() as i64;
        prop_assert_eq!(embed(&x).dot(&embed(&y)), num_pairs(q) as i64 - 2 * d);
    }

    #[test]
    fn kendall_is_a_metric((q, a, b, c) in perm_strategy(9)) {
        let (x, y, z) = (random_perm(q, a), random_perm(q, b), random_perm(q, c));
        let d = |u: &Permutation, v: &Permutation| kendall_tau(u, v).unwrap();
        prop_assert_eq!(d(&x, &y), d(&y, &x));
        prop_assert_eq!(d(&x, &y) == 0, x == y);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }

    #[test]
    fn ranking_round_trip((q, a, _, _) in perm_strategy(10)) {
        let x = random_perm(q, a);
        prop_assert_eq!(ranking_from_transitive(embed(&x).entries()).unwrap(), x);
    }

    #[test]
    fn nae_coordinates_round_trip(v in prop::array::uniform3(-5i32..5)) {
        prop_assert_eq!(from_nae_coords(to_nae_coords(v)), v);
    }

    #[test]
    fn cgf_gradient_is_mean(q in 3usize..=5, lambda in lambda_strategy(5, 2.0)) {
        let lambda = lambda[..num_pairs(q)].to_vec();
        let t = TiltParams::new(q, lambda.clone()).unwrap();
        let mean = mean_vector(&t).unwrap();
        let h = 1e-5;
        for k in 0..lambda.len() {
            let (mut up, mut dn) = (lambda.clone(), lambda.clone());
            up[k] += h;
            dn[k] -= h;
            let fd = (cgf(&TiltParams::new(q, up).unwrap()).unwrap() - cgf(&TiltParams::new(q, dn).unwrap()).unwrap())
                / (2.0 * h);
            prop_assert!((fd - mean[k]).abs() <= 1e-6 * (1.0 + mean[k].abs()), "{fd} vs {}", mean[k]);
        }
    }

    #[test]
    fn cgf_below_proven_bound(q in 3usize..=6, lambda in lambda_strategy(6, 4.0)) {
        let t = TiltParams::new(q, lambda[..num_pairs(q)].to_vec()).unwrap();
        prop_assert!(cgf(&t).unwrap() <= (q - 1) as f64 * t.norm_sq() / 2.0 + 1e-12);
    }

    #[test]
    fn cgf_is_convex_along_lines(a in lambda_strategy(4, 3.0), b in lambda_strategy(4, 3.0)) {
        let psi = |v: Vec<f64>| cgf(&TiltParams::new(4, v).unwrap()).unwrap();
        let mid: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
        prop_assert!(psi(mid) <= 0.5 * (psi(a.clone()) + psi(b.clone())) + 1e-12);
        let neg: Vec<f64> = a.iter().map(|x| -x).collect();
        prop_assert!(psi(a) + psi(neg) >= -1e-12);
    }

    #[test]
    fn tilt_is_relabeling_invariant(lambda in lambda_strategy(4, 2.0), seed in any::<u64>(), pseed in any::<u64>()) {
        // Relabel candidates by σ and move λ's pair weights with them.
        let mut sigma: Vec<usize> = (0..4).collect();
        sigma.shuffle(&mut stream_rng(seed, 0));
        let mut moved = vec![0.0; 6];
        for i in 0..4 {
            for j in i + 1..4 {
                let (a, b) = (sigma[i], sigma[j]);
                let sign = if a < b { 1.0 } else { -1.0 };
                moved[pair_index(a.min(b), a.max(b), 4)] = sign * lambda[pair_index(i, j, 4)];
            }
        }
        let p = random_perm(4, pseed);
        let w = |lam: &[f64], x: &Permutation| -> f64 {
            lam.iter().zip(embed(x).entries()).map(|(l, &e)| l * e as f64).sum()
        };
        prop_assert!((w(&lambda, &p) - w(&moved, &p.relabel(&sigma))).abs() < 1e-12);
        prop_assert!((cgf(&TiltParams::new(4, lambda).unwrap()).unwrap()
            - cgf(&TiltParams::new(4, moved).unwrap()).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn cosh_inequality(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        let lhs = (a.cosh() + b.cosh() + c.cosh()) / 3.0;
        prop_assert!(lhs <= ((a * a + b * b + c * c) / 6.0).exp() * (1.0 + 1e-12));
    }

    #[test]
    fn s_of_lambda_is_inside_cube(l in prop::array::uniform3(-50.0f64..50.0)) {
        let s = s_of_lambda(l);
        prop_assert!(s.iter().all(|x| x.abs() < 1.0 + 1e-15));
    }

    #[test]
    fn solutions_have_small_residual(beta in 0.0f64..2.0, l in prop::array::uniform3(-2.0f64..2.0)) {
        if let Ok(s) = solve_fixed_point(beta, l) {
            prop_assert!(s.residual < 1e-12);
            let back = s_of_lambda(s.lambda);
            prop_assert_eq!(back, s.s);
        }
    }

    #[test]
    fn law_sums_to_one(n in 1usize..=12, beta in 0.0f64..1.5) {
        let law = magnetization_dp(&ModelSpec::mean_field(3, n, beta).unwrap()).unwrap();
        prop_assert!((law.total_mass() - 1.0).abs() < 1e-12);
        for m in law.weights().keys() {
            prop_assert!(m.iter().all(|&x| (x - n as i32).rem_euclid(2) == 0));
        }
    }

    #[test]
    fn iia_by_construction(seed in any::<u64>(), voter in 0usize..5, pos in 0usize..2, rules in prop::collection::vec(0u8..4, 3)) {
        let rules: Vec<PairRule> = rules.iter().map(|r| match r {
            0 => PairRule::Majority,
            1 => PairRule::Dictator(2),
            2 => PairRule::AntiDictator(4),
            _ => PairRule::Constant(-1),
        }).collect();
        let c = Constitution::new(3, rules).unwrap();
        let votes: Vec<Permutation> = (0..5).map(|i| random_perm(3, seed.wrapping_add(i))).collect();
        let before = evaluate(&c, &Profile::Votes(votes.clone())).unwrap();
        // Swap the candidates in positions pos and pos+1 of one voter's order.
        let mut order = votes[voter].order();
        order.swap(pos, pos + 1);
        let (a, b) = (order[pos].min(order[pos + 1]), order[pos].max(order[pos + 1]));
        let mut ranks = vec![0u8; 3];
        for (r, &cand) in order.iter().enumerate() {
            ranks[cand] = r as u8;
        }
        let mut after_votes = votes;
        after_votes[voter] = Permutation::from_ranks(ranks).unwrap();
        let after = evaluate(&c, &Profile::Votes(after_votes)).unwrap();
        let touched = pair_index(a, b, 3);
        for k in 0..3 {
            if k != touched {
                prop_assert_eq!(before.entries()[k], after.entries()[k]);
            }
        }
    }

    #[test]
    fn majority_is_unanimous((q, a, _, _) in perm_strategy(7), n in 1usize..8) {
        let x = random_perm(q, a);
        let p = Profile::Votes(vec![x.clone(); n]);
        prop_assert_eq!(evaluate(&Constitution::majority(q), &p).unwrap(), embed(&x));
    }

    #[test]
    fn majority_paradox_is_neutral(seed in any::<u64>(), sseed in any::<u64>()) {
        let votes: Vec<Permutation> = (0..5).map(|i| random_perm(4, seed.wrapping_add(i))).collect();
        let mut sigma: Vec<usize> = (0..4).collect();
        sigma.shuffle(&mut stream_rng(sseed, 0));
        let relabeled: Vec<Permutation> = votes.iter().map(|v| v.relabel(&sigma)).collect();
        let maj = Constitution::majority(4);
        let t1 = is_transitive(evaluate(&maj, &Profile::Votes(votes)).unwrap().entries()).unwrap();
        let t2 = is_transitive(evaluate(&maj, &Profile::Votes(relabeled)).unwrap().entries()).unwrap();
        prop_assert_eq!(t1, t2);
    }

    #[test]
    fn sign_corr_is_odd(rho in -1.0f64..1.0) {
        let a = gaussian_sign_corr([[1.0, rho], [rho, 1.0]]).unwrap();
        let b = gaussian_sign_corr([[1.0, -rho], [-rho, 1.0]]).unwrap();
        prop_assert!((a + b).abs() < 1e-12);
    }
}

#[test]
fn transitivity_matches_nae_for_three() {
    let nae: Vec<[i8; 3]> = NaeVector::all().iter().map(|v| v.entries()).collect();
    for code in 0..8u8 {
        let v: [i8; 3] = std::array::from_fn(|k| if code >> k & 1 == 1 { 1 } else { -1 });
        assert_eq!(is_transitive(&v).unwrap(), nae.contains(&to_nae_coords(v)), "{v:?}");
    }
}

#[test]
fn orbit_is_closed_with_equal_objective() {
    for beta in [0.8, 1.0, 1.5] {
        let sols = find_global_max(beta).unwrap();
        assert_eq!(sols.len(), 6);
        let pts: Vec<[f64; 3]> = sols.iter().map(|s| s.lambda).collect();
        for p in &pts {
            for img in orbit(*p) {
                assert!(pts.iter().any(|q| (0..3).all(|k| (q[k] - img[k]).abs() < 1e-9)));
            }
        }
        let phi0 = phi_objective(pts[0], beta);
        assert!(pts.iter().all(|p| (phi_objective(*p, beta) - phi0).abs() < 1e-12));
        assert!(sols.iter().all(|s| s.residual < 1e-12));
    }
}

#[test]
fn sigma_beta_is_positive_definite() {
    for i in 0..=74 {
        let beta = i as f64 / 100.0;
        let s = sigma_beta(beta).unwrap();
        assert_eq!(s, s.transpose());
        let ev = SymmetricEigen::new(s).eigenvalues;
        assert!(ev.iter().all(|&x| x > 0.0), "β = {beta}");
    }
    let top = |b: f64| SymmetricEigen::new(sigma_beta(b).unwrap()).eigenvalues.max();
    assert!(top(0.7499) > 100.0 * top(0.7));
}

#[test]
fn eigen_multiplicities_sum() {
    for q in 3..=12 {
        let e = eigen_summary(q).unwrap();
        assert_eq!(e.iter().map(|x| x.1).sum::<usize>(), num_pairs(q));
    }
}

#[test]
fn closed_form_identities() {
    let r = gaussian_sign_corr([[1.0, -1.0 / 3.0], [-1.0 / 3.0, 1.0]]).unwrap();
    assert!((guilbaud_meanfield(0.0).unwrap() - 0.75 * (1.0 - r)).abs() < 1e-12);
    assert!((guilbaud_matching(0.0).unwrap() - guilbaud_matching(50.0).unwrap()).abs() < 1e-9);
}

#[test]
fn run_chain_is_a_function_of_seed() {
    let spec = ModelSpec::mean_field(4, 6, 0.8).unwrap();
    let mut config = ChainConfig::new(30);
    config.burn_in = 5;
    config.thinning = 3;
    let a = run_chain(&spec, &config, &mut stream_rng(3, 0)).unwrap();
    let b = run_chain(&spec, &config, &mut stream_rng(3, 0)).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 10);
}
