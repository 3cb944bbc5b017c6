//! How fast Γ(λ)⁻¹ approaches its leading singular term, and the ladder identities behind it.

use deltascat::classifier::fixtures;
use deltascat::fit::log_grid;
use deltascat::operator::gamma_expansion_residual;
use deltascat::spectral::{build_ladder, expansion_residual_profile};

fn main() -> deltascat::Result<()> {
    let grid = log_grid(1e-6, 1e-2, 9);
    for c in [fixtures::s_wave_pair(), fixtures::p_wave_pair(), fixtures::collinear_triple()] {
        let p = expansion_residual_profile(&c, &grid)?;
        println!("{}: residual ~ λ^{:.3} |log λ|^{:.2}", p.case_label, p.fitted_order, p.fitted_log_power);
        for r in p.rows.iter().step_by(2) {
            println!("  λ = {:.1e}  ‖Γ⁻¹ − lead‖ = {:.4e}  relative {:.4e}", r.lambda, r.value_re, r.residual);
        }
    }
    let (ladder, chain) = build_ladder(&fixtures::collinear_triple(), 1e-4)?;
    println!("ladder checks at λ = 1e-4: {:#?}", ladder.checks(&chain));
    for lam in [1e-4, 1e-3, 1e-2] {
        println!("Γ expansion residual at λ = {lam:.0e}: {:.3e}", gamma_expansion_residual(&fixtures::p_wave_pair(), lam)?);
    }
    Ok(())
}
