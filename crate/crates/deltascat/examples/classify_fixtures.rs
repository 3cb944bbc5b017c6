use deltascat::classifier::{classify_default, fixtures};

fn main() -> deltascat::Result<()> {
    for (name, c) in [
        ("single", fixtures::single()),
        ("s-wave pair", fixtures::s_wave_pair()),
        ("p-wave pair", fixtures::p_wave_pair()),
        ("collinear triple", fixtures::collinear_triple()),
    ] {
        let r = classify_default(&c)?;
        println!(
            "{name:<17} {}  ranks S/T/Tp/Te = {}/{}/{}/{}  {} resonance(s)",
            r.case_label,
            r.ranks.s,
            r.ranks.t,
            r.ranks.t_p,
            r.ranks.t_e,
            r.resonances.len()
        );
        for phi in &r.resonances {
            println!("    {:?}: constant {:.6}, dipole ({:.6}, {:.6})", phi.kind, phi.constant, phi.dipole[0], phi.dipole[1]);
        }
    }
    Ok(())
}
