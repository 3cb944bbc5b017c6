//! The Green kernel by series and by integral, and the prefactor g.

use deltascat::specfun::{g_factor, green_kernel, quarter_i_h0_integral, quarter_i_h0_series};
use num_complex::Complex64;

fn main() -> deltascat::Result<()> {
    for z in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)] {
        let s = quarter_i_h0_series(z);
        let i = quarter_i_h0_integral(z);
        println!("z = {z:>8.3}  series {s:.15}  integral {i:.15}  |diff| {:.2e}", (s - i).norm());
    }
    let z = Complex64::new(1e-3, 0.0);
    let x = [0.3, 0.4];
    // 𝒢_z(x) − g(z|x|) vanishes as z → 0
    println!("small-z remainder {:.3e}", (green_kernel(z, x)? - g_factor(z * 0.5)?).norm());
    Ok(())
}
