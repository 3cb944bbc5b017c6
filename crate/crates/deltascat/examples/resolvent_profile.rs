use deltascat::classifier::fixtures;
use deltascat::fit::log_grid;
use deltascat::spectral::{resolvent_threshold_profile, s_wave_coefficient, s_wave_predicted_coefficient};

fn main() -> deltascat::Result<()> {
    let (x, y) = ([0.7, 1.9], [-2.3, 0.4]);
    let single = resolvent_threshold_profile(&fixtures::single(), &log_grid(1e-12, 1e-5, 30), x, y)?;
    println!("Case1 limit R(0)(x, y) = {:.12}", single.limit.unwrap());

    let pair = fixtures::s_wave_pair();
    let fitted = s_wave_coefficient(&pair, &log_grid(1e-14, 1e-6, 30), x, y)?;
    println!("Case2 coefficient of g: fitted {fitted:.12}, predicted {:.12}", s_wave_predicted_coefficient(&pair, x, y)?);

    let p = resolvent_threshold_profile(&fixtures::p_wave_pair(), &log_grid(1e-8, 1e-3, 6), x, y)?;
    for (row, ratio) in p.rows.iter().zip(&p.ratio) {
        println!("Case3 λ = {:.0e}  R = {:.6e}{:+.6e}i  R/prediction = {ratio:.12}", row.lambda, row.value_re, row.value_im);
    }
    Ok(())
}
