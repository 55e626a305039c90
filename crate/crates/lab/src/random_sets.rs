//! Seeded random interval sets for property sweeps.

use entropy_lab_core::TorusIntervalSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// 1 to `max_intervals` arcs with uniform starts and lengths in `[0.02, 0.3)`,
/// possibly overlapping or wrapping.
pub fn random_interval_set<R: Rng>(rng: &mut R, max_intervals: usize) -> TorusIntervalSet {
    let count = rng.gen_range(1..=max_intervals.max(1));
    let raw: Vec<(f64, f64)> = (0..count)
        .map(|_| {
            let start = rng.gen_range(0.0..1.0);
            (start, start + rng.gen_range(0.02..0.3))
        })
        .collect();
    TorusIntervalSet::canonicalize(&raw).expect("random arcs are valid")
}

/// Two disjoint nonempty sets: `2m` sorted cut points in `(0, 1)` form `m`
/// separated arcs, dealt alternately to the two sets.
pub fn random_disjoint_pair<R: Rng>(rng: &mut R) -> (TorusIntervalSet, TorusIntervalSet) {
    let m = rng.gen_range(2..=4);
    loop {
        let mut cuts: Vec<f64> = (0..2 * m).map(|_| rng.gen_range(0.0..1.0)).collect();
        cuts.sort_by(f64::total_cmp);
        // keep arcs and the gaps between them clear of the merge tolerance
        if cuts.windows(2).any(|w| w[1] - w[0] < 1e-3) {
            continue;
        }
        let (mut first, mut second) = (Vec::new(), Vec::new());
        for (i, arc) in cuts.chunks_exact(2).enumerate() {
            let target = if i % 2 == 0 { &mut first } else { &mut second };
            target.push((arc[0], arc[1]));
        }
        return (
            TorusIntervalSet::canonicalize(&first).expect("sorted arcs are valid"),
            TorusIntervalSet::canonicalize(&second).expect("sorted arcs are valid"),
        );
    }
}
