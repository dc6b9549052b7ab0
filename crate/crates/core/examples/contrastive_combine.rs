//! Reweighting a categorical action distribution by the ratio of its
//! predictions with and without the target object.

use pcd::action_dist::{contrastive_combine, BinGrid, CategoricalDist, DecodeConfig};

fn main() -> pcd::Result<()> {
    let grid = BinGrid::new(-1.0, 1.0, 3)?;
    let p = CategoricalDist::new(grid, vec![0.5, 0.3, 0.2])?;
    let masked = CategoricalDist::new(grid, vec![0.6, 0.3, 0.1])?;

    println!("original  {:?}", p.probs());
    println!("masked    {:?}", masked.probs());
    for alpha in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let out = contrastive_combine(&p, &masked, &DecodeConfig::with_alpha(alpha))?;
        let shown: Vec<String> = out.probs().iter().map(|x| format!("{x:.5}")).collect();
        println!(
            "alpha={alpha:<4} [{}]  argmax bin {}",
            shown.join(", "),
            out.argmax()
        );
    }

    // bins where the masked branch is (near) zero are floored, not divided by zero
    let hole = CategoricalDist::new(grid, vec![0.5, 0.5, 0.0])?;
    let out = contrastive_combine(&p, &hole, &DecodeConfig::with_alpha(0.1))?;
    println!("zero in masked branch -> {:.5?}", out.probs());
    Ok(())
}
