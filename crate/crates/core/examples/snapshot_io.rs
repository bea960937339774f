//! Writes a field to the binary snapshot format, reads it back, and resamples
//! it onto a finer grid.

use std::f64::consts::PI;

use nsda::grid::make_grid;
use nsda::ops::l2_norm;
use nsda::random::{random_field, FieldKind};
use nsda::snapshot::Snapshot;

fn main() -> nsda::Result<()> {
    let coarse = make_grid(2.0 * PI, 32)?;
    let field = random_field(&coarse, FieldKind::Solenoidal, 10.0, 42);
    let snap = Snapshot::new(1.5, field);

    let path = std::env::temp_dir().join("nsda_example.nsf2");
    snap.save(&path)?;
    let bytes = std::fs::metadata(&path).map(|m| m.len()).unwrap_or(0);
    let back = Snapshot::load(&path, Some(&coarse))?;
    println!("{} bytes, t = {}, identical after reload: {}", bytes, back.time, back == snap);

    let fine = back.field.resample(&make_grid(2.0 * PI, 64)?)?;
    println!(
        "L2 norm on 32^2: {:.12}, after resampling to 64^2: {:.12}",
        l2_norm(&snap.field),
        l2_norm(&fine)
    );
    std::fs::remove_file(&path).ok();
    Ok(())
}
