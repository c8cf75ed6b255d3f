//! Scalar proximal maps of the shipped penalties.

use vbpg::prelude::*;

pub fn run_example() -> Result<()> {
    let penalties = [
        Penalty::L1 { lambda: 1.0 },
        Penalty::SqL2 { lambda: 1.0 },
        Penalty::Box { lo: -1.0, hi: 2.0 },
        Penalty::Scad { lambda: 1.0, a: 3.7 },
        Penalty::Mcp { lambda: 1.0, gamma: 2.5 },
        Penalty::Power { coef: 1.0, exponent: 1.5 },
        Penalty::PuncturedQuadratic { center: 0.5 },
    ];
    let inputs = [-3.0, -0.8, 0.3, 1.2, 4.0];
    for pen in &penalties {
        pen.validate()?;
        let row: Vec<String> = inputs
            .iter()
            .map(|&v| {
                let p = prox_1d(pen, v, 1.0, 0.5);
                format!("{:>8.4}{}", p.t, if p.tie { "*" } else { " " })
            })
            .collect();
        println!("{:<50} {}", format!("{pen:?}"), row.join(""));
    }
    // `*` marks a tie between two global minimizers.

    // Soft thresholding, checked against its closed form.
    let t = prox_1d(&Penalty::L1 { lambda: 1.0 }, 1.2, 1.0, 0.5).t;
    assert!((t - 0.7).abs() < 1e-15);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
