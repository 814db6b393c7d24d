use std::collections::HashMap;

use rand::Rng;

use crate::curve::PolyCurve;
use crate::error::{bad_param, Error, Result};
use crate::geom::Point;

const STEP_CAP: u64 = 100_000_000;

/// Simple random walk on `(1/n) Z^2` from the lattice point nearest `start`
/// until it reaches distance `target_radius`, loop-erased chronologically.
pub fn gen_lerw(n: usize, seed: u64, start: Point, target_radius: f64) -> Result<PolyCurve> {
    if n < 1 || !(target_radius > 0.0) || !start.is_finite() {
        return bad_param("lerw needs n >= 1, a finite start and a positive radius");
    }
    let delta = 1.0 / n as f64;
    let s0 = ((start.x() / delta).round() as i64, (start.y() / delta).round() as i64);
    let r2 = (target_radius / delta) * (target_radius / delta) * (1.0 - 1e-12);
    let mut rng = crate::seed::rng(seed);
    let mut path = vec![s0];
    let mut at: HashMap<(i64, i64), usize> = HashMap::from([(s0, 0)]);
    let mut pos = s0;
    let mut steps = 0u64;
    loop {
        let (dx, dy) = ((pos.0 - s0.0) as f64, (pos.1 - s0.1) as f64);
        if dx * dx + dy * dy >= r2 {
            break;
        }
        if steps >= STEP_CAP {
            return Err(Error::StepCap(STEP_CAP));
        }
        steps += 1;
        pos = match rng.gen_range(0..4) {
            0 => (pos.0 + 1, pos.1),
            1 => (pos.0, pos.1 + 1),
            2 => (pos.0 - 1, pos.1),
            _ => (pos.0, pos.1 - 1),
        };
        if let Some(&i) = at.get(&pos) {
            for q in path.drain(i + 1..) {
                at.remove(&q);
            }
        } else {
            at.insert(pos, path.len());
            path.push(pos);
        }
    }
    let pts = path.iter().map(|&(x, y)| Point::new2(x as f64 * delta, y as f64 * delta)).collect();
    PolyCurve::new(2, pts, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn one_step_at_radius_delta() {
        let c = gen_lerw(16, 5, Point::new2(0.5, 0.5), 1.0 / 16.0).unwrap();
        assert_eq!(c.n_legs(), 1);
    }

    #[test]
    fn self_avoiding_and_reaches_radius() {
        for seed in 0..20 {
            let c = gen_lerw(64, seed, Point::new2(0.5, 0.5), 0.3).unwrap();
            let set: HashSet<(i64, i64)> =
                c.vertices().iter().map(|v| ((v.x() * 64.0).round() as i64, (v.y() * 64.0).round() as i64)).collect();
            assert_eq!(set.len(), c.vertices().len());
            assert!(c.end().dist(c.start()) >= 0.3 - 1e-9);
            let deterministic = gen_lerw(64, seed, Point::new2(0.5, 0.5), 0.3).unwrap();
            assert_eq!(deterministic, c);
        }
    }
}
