use proptest::prelude::*;
use sweep_core::path::{check_control_superadditive, one_variation, p_variation, p_variation_full, Grid, SamplePath};

fn random_path(dim: usize) -> impl Strategy<Value = SamplePath> {
    (2usize..24).prop_flat_map(move |n| {
        proptest::collection::vec(-2.0..2.0f64, (n + 1) * dim)
            .prop_map(move |v| SamplePath::new(Grid::uniform(1.0, n).unwrap(), dim, v).unwrap())
    })
}

/// All dissections of `{0, …, n}` that keep both ends, by bitmask.
fn brute_force_pvar(x: &SamplePath, p: f64) -> f64 {
    let n = x.len() - 1;
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << (n - 1)) {
        let mut points = vec![0];
        points.extend((1..n).filter(|i| mask & (1 << (i - 1)) != 0));
        points.push(n);
        let total: f64 = points
            .windows(2)
            .map(|w| x.increment(w[0], w[1]).iter().map(|v| v * v).sum::<f64>().sqrt().powf(p))
            .sum();
        best = best.max(total);
    }
    best.powf(1.0 / p)
}

#[test]
fn small_examples() {
    let x = SamplePath::new(Grid::uniform(1.0, 2).unwrap(), 1, vec![0.0, 1.0, 0.0]).unwrap();
    assert_eq!(p_variation(&x, 1.0, 0, 2).unwrap(), 2.0);
    let two = p_variation_full(&x, 2.0, 0, 2).unwrap();
    assert!((two.value - 2f64.sqrt()).abs() < 1e-15);
    assert!((brute_force_pvar(&x, 2.0) - 2f64.sqrt()).abs() < 1e-15);
    assert_eq!(two.dissection, vec![0, 1, 2]);
    let mono = SamplePath::new(Grid::uniform(1.0, 2).unwrap(), 1, vec![0.0, 1.0, 3.0]).unwrap();
    assert_eq!(p_variation(&mono, 1.0, 0, 2).unwrap(), 3.0);
}

proptest! {
    #[test]
    fn dynamic_programme_matches_enumeration(
        x in (2usize..11).prop_flat_map(|n| proptest::collection::vec(-2.0..2.0f64, 2 * (n + 1))
            .prop_map(move |v| SamplePath::new(Grid::uniform(1.0, n).unwrap(), 2, v).unwrap())),
        p in 1.0..4.0f64,
    ) {
        let n = x.len() - 1;
        let dp = p_variation(&x, p, 0, n).unwrap();
        let brute = brute_force_pvar(&x, p);
        prop_assert!((dp - brute).abs() <= 1e-12 * (1.0 + brute));
    }

    #[test]
    fn variation_decreases_in_p(x in random_path(2), r in 1.0..3.0f64, dq in 0.0..3.0f64) {
        let n = x.len() - 1;
        let q = r + dq;
        prop_assert!(p_variation(&x, q, 0, n).unwrap() <= p_variation(&x, r, 0, n).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn one_variation_sums_increments(x in random_path(3)) {
        let n = x.len() - 1;
        let sum: f64 = (0..n).map(|k| x.increment(k, k + 1).iter().map(|v| v * v).sum::<f64>().sqrt()).sum();
        let dp = p_variation(&x, 1.0, 0, n).unwrap();
        prop_assert!((dp - sum).abs() <= 1e-12 * (1.0 + sum));
        prop_assert!((one_variation(&x) - sum).abs() <= 1e-12 * (1.0 + sum));
    }

    #[test]
    fn p_variation_power_is_a_control(x in random_path(1), p in 1.0..3.0f64) {
        let report = check_control_superadditive(x.len(), |s, t| {
            if s == t { 0.0 } else { p_variation(&x, p, s, t).unwrap().powf(p) }
        });
        prop_assert!(report.satisfied, "{:?}", report);
    }

    #[test]
    fn refinement_never_decreases_the_value(x in random_path(1), p in 1.0..3.0f64, w in proptest::collection::vec(0.0..1.0f64, 23)) {
        let n = x.len() - 1;
        // Insert a point inside every segment at fraction w[k].
        let times = x.grid().times();
        let mut fine_t = vec![0.0];
        let mut fine_v = vec![x.at(0)[0]];
        for k in 0..n {
            let s = w[k].clamp(0.05, 0.95);
            fine_t.push(times[k] + s * (times[k + 1] - times[k]));
            fine_v.push(x.at(k)[0] + 2.0 * w[k] - 1.0);
            fine_t.push(times[k + 1]);
            fine_v.push(x.at(k + 1)[0]);
        }
        let fine = SamplePath::new(Grid::new(fine_t).unwrap(), 1, fine_v).unwrap();
        prop_assert!(p_variation(&fine, p, 0, 2 * n).unwrap() >= p_variation(&x, p, 0, n).unwrap() * (1.0 - 1e-12));
    }

    #[test]
    fn collinear_points_leave_one_variation_unchanged(x in random_path(2), w in proptest::collection::vec(0.05..0.95f64, 23)) {
        let n = x.len() - 1;
        let times = x.grid().times();
        let mut fine_t = vec![0.0];
        let mut fine_v = x.at(0).to_vec();
        for k in 0..n {
            let (a, b) = (x.at(k), x.at(k + 1));
            fine_t.push(times[k] + w[k] * (times[k + 1] - times[k]));
            fine_v.extend(a.iter().zip(b).map(|(a, b)| a + w[k] * (b - a)));
            fine_t.push(times[k + 1]);
            fine_v.extend_from_slice(b);
        }
        let fine = SamplePath::new(Grid::new(fine_t).unwrap(), 2, fine_v).unwrap();
        let (coarse, refined) = (one_variation(&x), one_variation(&fine));
        prop_assert!((coarse - refined).abs() <= 1e-12 * (1.0 + coarse));
    }
}
