use rre_core::netfile;
use rre_core::scenario::{generate, ScenarioConfig};

/// With NR readers of radius Rad placed uniformly over a side-L square, a tag
/// far from the border sits in NR·π·Rad²/L² zones on average.
#[test]
fn interior_multiplicity_matches_geometric_expectation() {
    let (nr, nt, rad, side) = (500usize, 1000usize, 500.0f64, 10_000.0f64);
    let expected = nr as f64 * std::f64::consts::PI * rad * rad / (side * side);

    let mut total = 0usize;
    let mut count = 0usize;
    for seed in 0..10u64 {
        let net = generate(&ScenarioConfig::new(nr, nt, rad, seed)).unwrap();
        for tag in net.tags() {
            let p = tag.position.unwrap();
            let interior = (rad..=side - rad).contains(&p.x) && (rad..=side - rad).contains(&p.y);
            if interior {
                total += net.multiplicity(tag.id).unwrap();
                count += 1;
            }
        }
    }
    let mean = total as f64 / count as f64;
    assert!(
        (mean - expected).abs() <= 0.15 * expected,
        "mean multiplicity {mean:.3}, expected {expected:.3}"
    );
}

#[test]
fn generated_file_parses_back_to_the_same_bytes() {
    let cfg = ScenarioConfig::new(40, 120, 800.0, 42);
    let net = generate(&cfg).unwrap();
    let text = netfile::to_text(&net, &[cfg.echo()]);
    let back = netfile::parse(&text).unwrap();
    assert_eq!(netfile::to_text(&back.network, &back.comments), text);
    assert_eq!(back.comments[0], cfg.echo());
}
