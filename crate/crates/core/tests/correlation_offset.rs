use loctemp::experiments::{correlation_scan, ExperimentConfig, Kind, TemperatureGrid};

/// Below the transition the fitted offset should recover `n₀²`.
#[test]
fn offset_recovers_condensate_density_within_three_stderr() {
    let mut cfg = ExperimentConfig::defaults(Kind::Correlations);
    cfg.l0 = vec![300];
    cfg.temperatures = TemperatureGrid::List(vec![1.0, 2.0, 3.0, 4.0]);
    let report = correlation_scan(&cfg).unwrap();
    let mut misses = Vec::new();
    for f in &report.fits {
        let c = f.fit.as_ref().unwrap().offset();
        let sigmas = (c.value - f.limit).abs() / c.stderr;
        if sigmas > 3.0 {
            misses.push(format!("T={}: c={:.6e} n0²={:.6e} ({sigmas:.0} σ)", f.t, c.value, f.limit));
        }
    }
    assert!(misses.is_empty(), "{}", misses.join("; "));
}
