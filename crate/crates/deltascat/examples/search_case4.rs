use deltascat::classifier::classify_default;
use deltascat::search::case4_search;

fn main() -> deltascat::Result<()> {
    for n in 3..=6 {
        match case4_search(n, 200, 7) {
            Some(c) => {
                let r = classify_default(&c)?;
                println!("N = {n}: {} with ranks {:?}", r.case_label, r.ranks);
                println!("  alpha {:?}\n  points {:?}", c.alpha, c.points);
            }
            None => println!("N = {n}: none found"),
        }
    }
    Ok(())
}
