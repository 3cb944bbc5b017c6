use deltascat::classifier::{classify_default, fixtures, verify_log_coefficients, verify_resonance_asymptotics};

fn main() -> deltascat::Result<()> {
    for c in [fixtures::s_wave_pair(), fixtures::p_wave_pair()] {
        let report = classify_default(&c)?;
        for phi in &report.resonances {
            let fit = verify_resonance_asymptotics(phi, &[1e3, 2e3, 4e3, 8e3])?;
            let logs = verify_log_coefficients(phi, &[1e-5, 1e-6])?;
            println!("{:?}", phi.kind);
            println!("  constant  fitted {:.10}  predicted {:.10}", fit.constant, phi.constant);
            println!("  dipole    fitted {:.10?}  predicted {:.10?}", fit.dipole, phi.dipole);
            println!("  remainder order {:.3}", fit.remainder_order);
            println!("  log coefficients {logs:.8?} vs {:.8?}", phi.coeffs);
        }
    }
    Ok(())
}
