use orlicz_mp_web::{index_curve_json, solve_json, sweep_json};
use serde_json::Value;

#[test]
fn index_curve_stays_between_the_indices() {
    let v: Value = serde_json::from_str(&index_curve_json("log_power", 3.0, 1.0, 30.0, 200).unwrap()).unwrap();
    let (lo, hi) = (v["lower"].as_f64().unwrap(), v["upper"].as_f64().unwrap());
    let ratio = v["ratio"].as_array().unwrap();
    assert_eq!(ratio.len(), 200);
    assert!(ratio.iter().all(|r| {
        let r = r.as_f64().unwrap();
        r >= lo - 1e-9 && r <= hi + 1e-9
    }));
}

#[test]
fn solve_returns_both_fields() {
    let v: Value = serde_json::from_str(&solve_json("power", 3.0, 0.0, 2.5, 1.5, 500.0, 80, 1).unwrap()).unwrap();
    assert_eq!(v["status"], "certificate");
    assert_eq!(v["x"].as_array().unwrap().len(), 81);
    assert_eq!(v["u2"].as_array().unwrap().len(), 81);
    assert!(!v["path_energies"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_finds_a_threshold() {
    let v: Value =
        serde_json::from_str(&sweep_json("power", 3.0, 0.0, 2.5, 1.5, 100.0, 450.0, 6, 1.0, 80, 1).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 6);
    assert!(v["lambda_star_est"].as_f64().is_some());
}

#[test]
fn bad_input_is_an_error() {
    assert!(index_curve_json("cubic", 3.0, 0.0, 10.0, 10).is_err());
    assert!(solve_json("power", 3.0, 0.0, 3.5, 1.5, 100.0, 50, 0).is_err());
}
