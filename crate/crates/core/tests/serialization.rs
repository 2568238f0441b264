use correlated_voters::meanfield::find_global_max;
use correlated_voters::models::{magnetization_dp, magnetization_summary, ModelSpec, Profile};
use correlated_voters::perm::Permutation;

#[test]
fn profiles_round_trip() {
    let x = Permutation::from_one_line(&[2, 3, 1]).unwrap();
    let p = Profile::Pairs(vec![(x.clone(), Permutation::identity(3)), (x, Permutation::reversal(3))]);
    let s = serde_json::to_string(&p).unwrap();
    assert_eq!(serde_json::from_str::<Profile>(&s).unwrap(), p);
}

#[test]
fn laws_round_trip() {
    let spec = ModelSpec::mean_field(3, 4, 0.6).unwrap();
    let law = magnetization_dp(&spec).unwrap();
    let s = serde_json::to_string(&law).unwrap();
    let back: correlated_voters::models::MagnetizationLaw = serde_json::from_str(&s).unwrap();
    assert_eq!(back.weights().len(), law.weights().len());
    for (m, p) in law.weights() {
        assert!((back.prob(*m) - p).abs() <= 1e-15 * p.abs());
    }
    let summary = magnetization_summary(&ModelSpec::mean_field(3, 5, 0.6).unwrap()).unwrap();
    let s = serde_json::to_string(&summary).unwrap();
    assert_eq!(serde_json::from_str::<correlated_voters::models::MagnetizationSummary>(&s).unwrap(), summary);
}

#[test]
fn solutions_serialize() {
    let sol = &find_global_max(1.0).unwrap()[0];
    let v = serde_json::to_value(sol).unwrap();
    assert_eq!(v["lambda"].as_array().unwrap().len(), 3);
}
