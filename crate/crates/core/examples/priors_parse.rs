//! Read a NetSurfP-style CSV into a priors profile and clean it up.
//!
//! cargo run --example priors_parse

use fusefold::priors::{parse_priors, write_priors, PriorsSchema};

const NETSURFP: &str = "\
id,seq,n,rsa,asa,p[q3_H],p[q3_E],p[q3_C],p[q8_G],p[q8_H],p[q8_I],p[q8_B],p[q8_E],p[q8_S],p[q8_T],p[q8_C],phi,psi,disorder
frag,M,1,0.91,170.2,0.02,0.03,0.95,0.01,0.01,0.00,0.00,0.03,0.10,0.10,0.75,NA,155.3,0.60
frag,K,2,0.70,145.9,0.60,0.05,0.35,0.05,0.55,0.00,0.01,0.04,0.05,0.10,0.20,-65.1,-38.2,0.20
frag,L,3,0.10,18.3,0.88,0.02,0.10,0.03,0.85,0.00,0.00,0.02,0.02,0.03,0.05,-62.7,-41.9,0.05
frag,V,4,0.05,7.9,0.80,0.10,0.10,0.02,0.78,0.00,0.02,0.08,0.03,0.03,0.04,-66.0,-40.1,0.04
frag,F,5,0.40,80.5,0.20,0.10,0.80,0.00,0.20,0.00,0.00,0.10,0.20,0.30,0.20,-90.4,10.5,0.10
";

fn main() -> fusefold::Result<()> {
    let profile = parse_priors(NETSURFP, &PriorsSchema::netsurfp3())?;
    // residue 5's SS3 row sums to 1.1 and is renormalized on read; the
    // missing phi of residue 1 stays masked
    let clean = profile.sanitize();
    println!("{} residues", profile.len());
    println!("residue 5 SS3: {:.4?}", clean.ss3[4].unwrap());
    println!("residue 1 phi: {:?}\n", clean.phi[0]);
    print!("{}", write_priors(&clean));
    Ok(())
}
