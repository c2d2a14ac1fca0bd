//! Virtual Cα torsions of a small helix-like trace.
//!
//! cargo run --example dihedrals

use fusefold::geometry::{dihedral, virtual_dihedrals, Conformation, Point3};
use fusefold::residue::parse_sequence;

fn main() -> fusefold::Result<()> {
    // ideal α-helix Cα positions: radius 2.3 Å, rise 1.5 Å, 100° per residue
    let coords: Vec<Point3> = (0..8)
        .map(|i| {
            let t = (100.0 * i as f64).to_radians();
            Point3::new(2.3 * t.cos(), 2.3 * t.sin(), 1.5 * i as f64)
        })
        .collect();
    let seq = parse_sequence("AEELLKKA")?;
    let helix = Conformation::from_parts("helix", &seq, &coords, 0.0)?;

    let trace = virtual_dihedrals(&helix);
    println!("residue  phi_hat   psi_hat");
    for i in 0..trace.len() {
        let fmt = |a: Option<f64>| {
            a.map_or("      --".to_string(), |v| {
                format!("{:8.2}", v.to_degrees())
            })
        };
        println!(
            "{:>7}  {}  {}",
            i + 1,
            fmt(trace.phi_hat[i]),
            fmt(trace.psi_hat[i])
        );
    }

    let p = [
        Point3::new(0.0, 0.0, 1.0),
        Point3::new(0.0, 0.0, 0.0),
        Point3::new(1.0, 0.0, 0.0),
        Point3::new(1.0, 1.0, 0.0),
    ];
    println!(
        "\nsingle torsion: {:.4} rad",
        dihedral(p[0], p[1], p[2], p[3])?
    );
    Ok(())
}
