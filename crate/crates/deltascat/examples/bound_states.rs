use deltascat::operator::PointConfiguration;
use deltascat::spectral::{bound_state_function, negative_eigenvalues};

fn main() -> deltascat::Result<()> {
    let config = PointConfiguration::new(vec![-0.3, -0.1, 0.2], vec![[-0.8, 0.0], [0.6, 0.2], [0.0, 1.1]])?;
    let spectrum = negative_eigenvalues(&config, (1e-6, 1e3), 1e-12)?;
    for r in &spectrum.records {
        let psi = bound_state_function(r, &config, [2.0, 2.0])?;
        println!("κ = {:.12}  E = {:.12}  det residual {:.1e}  ψ(2, 2) = {psi:.6e}", r.kappa, r.energy, r.det_residual);
    }
    for w in &spectrum.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}
