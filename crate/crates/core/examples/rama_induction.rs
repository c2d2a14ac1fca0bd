//! Secondary-structure distributions induced from (φ, ψ).
//!
//! cargo run --example rama_induction

use fusefold::rama::{expand_ss8, induce_ss3, marginalize_ss8, RamaConfig};

fn main() -> fusefold::Result<()> {
    let cfg = RamaConfig::default();
    let points = [
        ("helix basin", -60.0, -45.0),
        ("strand basin", -120.0, 130.0),
        ("near the seam", -120.0, -175.0),
        ("left-handed", 60.0, 45.0),
    ];
    println!("{:<14} {:>7} {:>7} {:>7}", "", "H", "E", "C");
    for (label, phi, psi) in points {
        let p =
            induce_ss3(f64::to_radians(phi), f64::to_radians(psi), &cfg).expect("finite angles");
        println!("{label:<14} {:7.4} {:7.4} {:7.4}", p[0], p[1], p[2]);
    }

    let p8 = expand_ss8([0.6, 0.3, 0.1])?;
    println!("\nSS8 [H G I E B T S L] = {p8:.3?}");
    println!("back to SS3          = {:.3?}", marginalize_ss8(p8));
    Ok(())
}
