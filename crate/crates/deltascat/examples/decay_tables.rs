use deltascat::fit::log_grid;
use deltascat::waveop::decay::{appendix_kernel_bound, log_fourier_decay};

fn main() -> deltascat::Result<()> {
    let t = log_fourier_decay(0.5, &log_grid(1.0, 1e4, 9))?;
    for r in &t.rows {
        println!("|x| = {:>9.2}  |F| = {:.4e}  ratio {:.4}", r.radius, r.value.norm(), r.bound_ratio);
    }
    println!("sup {:.4}, trend {:.4}, asymptote deviation {:.2e}", t.sup_ratio, t.trend_slope, t.asymptotic_deviation);

    let mut xs = vec![0.0];
    xs.extend(log_grid(1.0, 1e3, 7));
    let a = appendix_kernel_bound(0.5, &xs, &xs)?;
    println!("appendix: sup ratio {:.4}, y = 0 slope {:.3}, diagonal trend {:.4}", a.sup_ratio_b, a.slope_y0, a.diagonal_trend);
    Ok(())
}
