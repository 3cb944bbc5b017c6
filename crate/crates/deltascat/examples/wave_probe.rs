//! Dyadic low-energy probes: p = 4 grows for a p-wave resonance and stays bounded otherwise.
//!
//! `cargo run --release --example wave_probe -- 4`

use deltascat::classifier::fixtures;
use deltascat::waveop::lowenergy::BadPart;
use deltascat::waveop::probe::{boundedness_probe, ProbeOptions};

fn main() -> deltascat::Result<()> {
    let p: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4.0);
    let runs = [
        ("s-wave pair", fixtures::s_wave_pair(), BadPart::Keep),
        ("p-wave pair", fixtures::p_wave_pair(), BadPart::Keep),
        ("p-wave pair, bad part removed", fixtures::p_wave_pair(), BadPart::Remove),
    ];
    for (name, config, bad_part) in runs {
        let report = boundedness_probe(&config, p, ProbeOptions { bad_part, ..Default::default() })?;
        println!("{name} ({}), p = {p}: {:?}", report.case_label, report.verdict);
        for r in &report.rows {
            println!("  n = {}  λ ∈ [{:.2e}, {:.2e}]  ratio {:.6e}", r.n, r.lambda_min, r.lambda_max, r.ratio);
        }
    }
    Ok(())
}
