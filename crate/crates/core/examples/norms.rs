//! Adapted norms of a free wave and ratio sweeps for every estimate kind.
//!
//! ```text
//! cargo run --release --example norms -- [kind ...]
//! ```

use std::time::Instant;

use fslab::lp::{build_cone_atlas, default_cone_margin};
use fslab::norms::{verify_estimate, xk_norm, zk_upper, EstimateKind, FamilySpec, InputFamily};

fn main() -> fslab::Result<()> {
    let s = 0.75;
    let selected: Vec<EstimateKind> = std::env::args()
        .skip(1)
        .map(|a| a.parse())
        .collect::<fslab::Result<_>>()?;
    let kinds = if selected.is_empty() { EstimateKind::ALL.to_vec() } else { selected };

    let atlas2 = build_cone_atlas(2, default_cone_margin(2))?;
    let free = FamilySpec::standard(2, 1, s, InputFamily::Free);
    let u = free.draw(0, s, None)?;
    let x = xk_norm(&u, 1, s)?;
    let z = zk_upper(&u, 1, s, &atlas2)?;
    println!(
        "free wave, k = 1: X_k = {:.4}, Z_k <= {:.4} ({:?}), remainder share {:.1e}",
        x.value,
        z.value,
        z.branch.unwrap(),
        x.remainder_fraction.unwrap()
    );

    for n in [2, 3] {
        let atlas = build_cone_atlas(n, default_cone_margin(n))?;
        for &kind in &kinds {
            let clock = Instant::now();
            let (family, headroom) = match kind {
                EstimateKind::Trilinear => (InputFamily::Free, 3.0),
                EstimateKind::Inhomogeneous => (InputFamily::Shell, 1.0),
                _ => (InputFamily::Free, 1.0),
            };
            let points = if n == 2 { 32 } else { 16 };
            let mut spec = FamilySpec::with_layout(n, points, 1, s, family, headroom);
            spec.draws = 64;
            let report = verify_estimate(kind, &spec, s, &atlas)?;
            let items: Vec<String> = report
                .items
                .iter()
                .map(|i| format!("{} {:.3}", i.name, i.max))
                .collect();
            println!(
                "n = {n} {:<16} C* = {:<8.4} stable {:<5} [{}] {:.1} s",
                kind.name(),
                report.c_star,
                report.stable.unwrap(),
                items.join(", "),
                clock.elapsed().as_secs_f64()
            );
        }
    }
    Ok(())
}
