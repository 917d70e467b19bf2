//! Writes the synthetic corpus under `testdata/corpus`.
//!
//! Four half-year snapshots of a hub-and-spoke network with airport and
//! route turnover, a merge map folding two secondary airports into their
//! cities, a domestic list that drops two foreign airports, and a traffic
//! file with a monthly national series and annual per-airport rows.
//!
//! Run with `cargo run -p airnet --example make_corpus`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use airnet::graph::{build_snapshot, AirportId, MergeMap, PeriodLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

const CITIES: usize = 72;
const HUBS: usize = 3;
const PERIODS: [&str; 4] = ["2006H1", "2006H2", "2007H1", "2007H2"];
const FOREIGN: [&str; 2] = ["HKG", "NRT"];
/// Secondary airport → city it is merged into.
const SECONDARY: [(&str, usize); 2] = [("NAY", 0), ("PVG", 1)];
const SEASONAL: [f64; 12] = [
    0.92, 0.85, 0.97, 1.00, 1.02, 1.01, 1.10, 1.12, 0.99, 1.04, 0.97, 1.01,
];

fn city_code(i: usize) -> String {
    match i {
        0 => "PEK".into(),
        1 => "SHA".into(),
        2 => "CAN".into(),
        _ => {
            let a = (b'A' + (i / 26) as u8) as char;
            let b = (b'A' + (i % 26) as u8) as char;
            format!("K{a}{b}")
        }
    }
}

fn main() {
    let out = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata/corpus");
    let snaps = out.join("snapshots");
    fs::create_dir_all(&snaps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(20090301);

    // Persistent attractiveness and pair thresholds give overlap between periods.
    let weight: Vec<f64> = (0..CITIES)
        .map(|i| {
            if i < HUBS {
                1.0
            } else {
                rng.random_range(0.05f64..1.0).powi(2)
            }
        })
        .collect();
    let threshold: Vec<Vec<f64>> = (0..CITIES)
        .map(|_| (0..CITIES).map(|_| rng.random::<f64>()).collect())
        .collect();
    let one_way: Vec<Vec<bool>> = (0..CITIES)
        .map(|_| (0..CITIES).map(|_| rng.random_bool(0.12)).collect())
        .collect();

    let mut raw_by_period = Vec::new();
    for (t, label) in PERIODS.iter().enumerate() {
        let mut active: BTreeSet<usize> = (0..56 + 4 * t).collect();
        for _ in 0..3 {
            let drop = rng.random_range(HUBS..active.len());
            active.remove(&drop);
        }
        let mut records: Vec<(String, String)> = Vec::new();
        let code = |i: usize, rng: &mut ChaCha8Rng| {
            for (alt, city) in SECONDARY {
                if city == i && rng.random_bool(0.4) {
                    return alt.to_string();
                }
            }
            city_code(i)
        };
        for &i in &active {
            for &j in &active {
                if j <= i {
                    continue;
                }
                let p = if i < HUBS {
                    0.85
                } else {
                    (2.0 * weight[i] * weight[j]).min(0.9)
                };
                let noise = rng.random_range(-0.04..0.04);
                if threshold[i][j] + noise >= p * (1.0 + 0.05 * t as f64) {
                    continue;
                }
                let (a, b) = (code(i, &mut rng), code(j, &mut rng));
                if one_way[i][j] {
                    if rng.random_bool(0.5) {
                        records.push((a, b));
                    } else {
                        records.push((b, a));
                    }
                } else {
                    records.push((a.clone(), b.clone()));
                    records.push((b, a));
                }
            }
        }
        for f in FOREIGN {
            for hub in 0..HUBS {
                records.push((city_code(hub), f.to_string()));
                records.push((f.to_string(), city_code(hub)));
            }
        }
        // A merged shuttle that collapses onto one city.
        records.push(("PVG".into(), "SHA".into()));
        records.sort();
        records.dedup();

        let mut text = format!("# period={label}\n");
        if t == 1 {
            text.push_str("# node=KZZ\n");
        }
        text.push_str("src,dst\n");
        for (a, b) in &records {
            let _ = writeln!(text, "{a},{b}");
        }
        fs::write(snaps.join(format!("{label}.csv")), text).unwrap();
        raw_by_period.push((label.parse::<PeriodLabel>().unwrap(), records));
    }

    let mut merge = String::from("raw_code,city_code\n");
    for (alt, city) in SECONDARY {
        let _ = writeln!(merge, "{alt},{}", city_code(city));
    }
    fs::write(out.join("merge_map.csv"), merge).unwrap();

    let mut domestic = String::from("# canonical city codes\n");
    for i in 0..CITIES {
        let _ = writeln!(domestic, "{}", city_code(i));
    }
    domestic.push_str("KZZ\n");
    fs::write(out.join("domestic.txt"), domestic).unwrap();

    let mut traffic = String::from("date,scope,passengers,cargo_tonnes,gdp\n");
    let noise = LogNormal::new(0.0, 0.01).unwrap();
    for m in 0..48 {
        let (year, month) = (2004 + m / 12, m % 12 + 1);
        let trend = (0.012 * m as f64).exp();
        let s = SEASONAL[(month - 1) as usize];
        let pax = 9.0e6 * trend * s * noise.sample(&mut rng);
        let cargo = 2.1e5 * (0.010 * m as f64).exp() * s.sqrt() * noise.sample(&mut rng);
        let gdp = 1.2e6 * (0.009 * m as f64).exp();
        let _ = writeln!(traffic, "{year}-{month:02},NATIONAL,{pax:.0},{cargo:.1},{gdp:.1}");
    }

    // Annual airport rows for the years with snapshots: strength grows as k^1.4.
    let merge_map = MergeMap::new(SECONDARY.iter().map(|(a, c)| (a.to_string(), city_code(*c)))).unwrap();
    let spread = LogNormal::new(0.0, 0.25).unwrap();
    for (period, records) in raw_by_period
        .iter()
        .filter(|(p, _)| p.half == airnet::graph::Half::H1)
    {
        let dom: BTreeSet<AirportId> = (0..CITIES)
            .map(|i| AirportId::new(&city_code(i)).unwrap())
            .collect();
        let g = build_snapshot(records, &merge_map, Some(&dom), *period).unwrap();
        let k: BTreeMap<String, usize> = g
            .degree_sequences()
            .into_iter()
            .map(|r| (r.node.as_str().to_string(), r.k))
            .collect();
        let mut rows = Vec::new();
        for (code, &deg) in &k {
            let pax = 2.0e4 * (deg as f64).powf(1.4) * spread.sample(&mut rng);
            let cargo = 80.0 * (deg as f64).powf(1.7) * spread.sample(&mut rng);
            // City traffic split across its airports where there are two.
            match SECONDARY.iter().find(|(_, c)| city_code(*c) == *code) {
                Some((alt, _)) => {
                    rows.push((code.clone(), 0.6 * pax, 0.6 * cargo));
                    rows.push((alt.to_string(), 0.4 * pax, 0.4 * cargo));
                }
                None => rows.push((code.clone(), pax, cargo)),
            }
        }
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        for (code, pax, cargo) in rows {
            let _ = writeln!(traffic, "{},{code},{pax:.0},{cargo:.1},", period.year);
        }
    }
    fs::write(out.join("traffic.csv"), traffic).unwrap();

    fs::write(
        out.join("run.conf"),
        "# Report over the synthetic corpus.\n\
         snapshot_dir = snapshots\n\
         merge_map = merge_map.csv\n\
         domestic = domestic.txt\n\
         traffic = traffic.csv\n\
         output_dir = report\n\
         format = csv\n\
         timestamp = false\n",
    )
    .unwrap();
    println!("corpus written to {}", out.display());
}
