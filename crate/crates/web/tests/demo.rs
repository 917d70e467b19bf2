use airnet_web::{
    exponential_explorer, network_stats, parse_points, random_network, seasonal_explorer, DEMO_INDICES,
};

#[test]
fn random_network_hits_requested_density() {
    let g = random_network(2000, 8.0, 3.0, 1.0, 11).unwrap();
    assert_eq!(g.node_count(), 2000);
    assert!(g.is_symmetric());
    // Capping c w_i w_j at 1 only removes mass, so allow a little shortfall.
    let k = g.mean_degree();
    assert!(k > 7.0 && k < 8.6, "mean degree {k}");
}

#[test]
fn random_network_is_seed_deterministic() {
    let a = random_network(300, 5.0, 2.5, 0.4, 7).unwrap();
    let b = random_network(300, 5.0, 2.5, 0.4, 7).unwrap();
    let c = random_network(300, 5.0, 2.5, 0.4, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn network_stats_reports_topology_and_fit() {
    let v = network_stats(1500, 10.0, 2.5, 1.0, 3).unwrap();
    assert_eq!(v["nodes"], 1500);
    assert_eq!(v["reciprocity"], 1.0);
    let mass: f64 = v["distribution"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e[1].as_f64().unwrap())
        .sum();
    assert!(mass > 0.0);
    assert!(v["fit"]["parameters"]["lambda1"].is_number());
}

#[test]
fn one_way_links_give_negative_reciprocity() {
    let v = network_stats(400, 6.0, 3.0, 0.0, 5).unwrap();
    assert!(v["reciprocity"].as_f64().unwrap() < 0.0);
}

#[test]
fn invalid_network_parameters_are_rejected() {
    assert!(network_stats(1, 1.0, 3.0, 0.5, 0).is_err());
    assert!(network_stats(100, 1.0, 2.0, 0.5, 0).is_err());
    assert!(network_stats(100, 1.0, 3.0, 1.5, 0).is_err());
    assert!(network_stats(100, 0.0, 3.0, 0.5, 0).is_err());
}

#[test]
fn points_parse_with_commas_spaces_and_comments() {
    let p = parse_points("# x y\n1, 2\n3 4.5\n\n5\t6 # trailing\n").unwrap();
    assert_eq!(p, vec![(1.0, 2.0), (3.0, 4.5), (5.0, 6.0)]);
    assert!(parse_points("1 2 3").unwrap_err().contains("line 1"));
    assert!(parse_points("1 x").unwrap_err().contains("not a number"));
}

#[test]
fn exponential_explorer_recovers_noiseless_curve() {
    let text: String = (0..30)
        .map(|i| {
            let x = i as f64;
            format!("{x},{}\n", 3.0 * (x / 8.0).exp() + 5.0)
        })
        .collect();
    let v = exponential_explorer(&text).unwrap();
    let params = &v["fit"]["parameters"];
    assert!((params["scale"].as_f64().unwrap() - 8.0).abs() < 1e-3 * 8.0);
    assert!((params["amplitude"].as_f64().unwrap() - 3.0).abs() < 1e-3 * 3.0);
    assert_eq!(v["curve"].as_array().unwrap().len(), 101);
}

#[test]
fn seasonal_explorer_flags_dip_and_recovers_pattern() {
    let v = seasonal_explorer(0.03, 0.01, Some(20), 0.2, 4).unwrap();
    assert!(v["outliers"].as_array().unwrap().contains(&20.into()));
    let rate = v["growth"]["parameters"]["rate"].as_f64().unwrap();
    assert!((rate / 0.03 - 1.0).abs() < 0.05, "rate {rate}");
    for (got, want) in v["indices"].as_array().unwrap().iter().zip(DEMO_INDICES) {
        assert!((got.as_f64().unwrap() / want - 1.0).abs() < 0.05);
    }
    assert_eq!(
        v["trend"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|t| t.is_null())
            .count(),
        12
    );
}

#[test]
fn seasonal_explorer_rejects_bad_input() {
    assert!(seasonal_explorer(0.03, 0.01, Some(48), 0.2, 0).is_err());
    assert!(seasonal_explorer(0.03, -0.1, None, 0.2, 0).is_err());
    assert!(seasonal_explorer(0.03, 0.01, None, 0.0, 0).is_err());
}
