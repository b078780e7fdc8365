//! Point-by-point oracle: every candidate point is built, its height is
//! computed place by place and it is classified with the geometry module.
//! Slow by design; only meant for small bounds.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::geometry::{global_height, is_campana, is_darmon, BlowupPoint, Bound, GeometryError, Point, ProjectivePoint};
use crate::orbifold::{ModelKind, OrbifoldModel, PlaceSet};

use super::Counts;

/// Counts at each bound of the grid (any order).
pub fn naive_counts(model: &OrbifoldModel, s: &PlaceSet, bounds: &[Bound]) -> Result<Vec<Counts>, GeometryError> {
    let mut order: Vec<usize> = (0..bounds.len()).collect();
    order.sort_by(|&i, &j| bounds[i].cmp(&bounds[j]));
    let Some(&top) = order.last() else {
        return Ok(Vec::new());
    };
    let bmax = &bounds[top];
    // A point is first counted at the smallest sorted bound above its
    // height; prefix sums then give every count.
    let mut first = vec![Counts::default(); bounds.len()];
    let mut tally = |point: Point| -> Result<(), GeometryError> {
        let h = global_height(&point, model)?;
        if !h.le_bound(bmax) {
            return Ok(());
        }
        let campana = is_campana(&point, model, s)?;
        let darmon = is_darmon(&point, model, s)?;
        let k = order.partition_point(|&i| !h.le_bound(&bounds[i]));
        first[k].add_class(1, campana, darmon);
        Ok(())
    };
    match model.kind {
        ModelKind::ProjectiveSpace { n } => {
            // Each point has exactly one primitive representative with x_n > 0,
            // and its height is at least x_n and every |x_i|.
            let x = bmax.floor_u64() as i64;
            let n = n as usize;
            for q in 1..=x {
                let mut coords = vec![-x; n];
                'odometer: loop {
                    let g = coords.iter().fold(q, |g, c| g.gcd(c));
                    if g == 1 {
                        let mut v: Vec<BigInt> = coords.iter().map(|&c| BigInt::from(c)).collect();
                        v.push(BigInt::from(q));
                        tally(ProjectivePoint::new(v)?.into())?;
                    }
                    for c in coords.iter_mut() {
                        if *c < x {
                            *c += 1;
                            continue 'odometer;
                        }
                        *c = -x;
                    }
                    break;
                }
            }
        }
        ModelKind::BlowupP2 => {
            // The first height factor alone is max|x_i|^{λ1} ≥ 1, so
            // max|x_i| ≤ B^{1/λ1}.
            let m1 = model.components[0].weight.finite().unwrap_or(1) as f64;
            let m2 = model.components[1].weight.finite().unwrap_or(1) as f64;
            let (l1, mu) = (1.0 + 1.0 / m1, 1.0 + 1.0 / m2 - 1.0 / m1);
            let cap = bmax.to_f64() * (1.0 + 1e-6);
            let r = (bmax.to_f64().powf(m1 / (m1 + 1.0)) + 1e-6).floor() as i64 + 1;
            for x0 in 1..=r {
                for x1 in -r..=r {
                    let g01 = x0.gcd(&x1);
                    let u = (x1.abs() as f64 / x0 as f64).max(1.0);
                    for x2 in -r..=r {
                        if g01.gcd(&x2) != 1 {
                            continue;
                        }
                        // Every local factor is at least 1, so the archimedean
                        // factor alone rules out many candidates.
                        let w = x2.abs() as f64 / x0 as f64;
                        if u.max(w).powf(l1) * u.powf(mu) > cap {
                            continue;
                        }
                        let p = BlowupPoint::from_triple(x0.into(), x1.into(), x2.into())?;
                        tally(p.into())?;
                    }
                }
            }
        }
        ModelKind::Custom(ref name) => {
            return Err(GeometryError::ModelMismatch(format!("no enumeration for {name}")));
        }
    }
    let mut out = vec![Counts::default(); bounds.len()];
    let mut running = Counts::default();
    for (k, &i) in order.iter().enumerate() {
        running.add(&first[k]);
        out[i] = running;
    }
    Ok(out)
}
