//! K by its spectral form and by its principal-value form, and the product formula.

use deltascat::operator::PointConfiguration;
use deltascat::waveop::kop::{k_apply_at, k_apply_pv, EXCISION};
use deltascat::waveop::lowenergy::product_formula_check;
use deltascat::waveop::TestFunction;

fn main() -> deltascat::Result<()> {
    let u = TestFunction::radial_bump(0.5, 1.5)?;
    for s in [0.3, 1.0, 2.5] {
        let pv = k_apply_pv(&u, s, &EXCISION)?;
        println!("|x| = {s}: spectral {:.12}  principal value {:.12}", k_apply_at(&u, s), pv.limit);
    }
    let config = PointConfiguration::new(vec![0.3], vec![[0.0, 0.0]])?;
    for c in product_formula_check(&config, &u, 0, 0, &[0.7, 1.9, 3.3])? {
        println!("|x| = {}: stationary {:.10}  via K {:.10}  rel. diff {:.1e}", c.radius, c.stationary, c.via_k, c.relative_difference);
    }
    Ok(())
}
