//! Lattice-systole invariants: agreement with independent brute force,
//! scaling, unimodular invariance, primitivity, and exact completions.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use systocap_core::capacity::scale_gauge;
use systocap_core::gauge::GaugeSpec;
use systocap_core::lattice::{pull_back, systole, unimodular_complete, UnimodularMatrix};
use systocap_core::linalg::MatZ;

/// Random symmetric matrix with entries in [-5, 5], shifted so every
/// Gershgorin disc stays right of 1/2; the shift keeps it positive definite
/// with smallest eigenvalue at least 1/2.
fn random_pd_gram(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    let mut g: Vec<Vec<f64>> = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let x = rng.random_range(-5.0..5.0);
            g[i][j] = x;
            g[j][i] = x;
        }
    }
    let mut shift = 0.0f64;
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| g[i][j].abs()).sum();
        shift = shift.max(0.5 + off - g[i][i]);
    }
    if shift > 0.0 {
        for (i, row) in g.iter_mut().enumerate() {
            row[i] += shift;
        }
    }
    g
}

/// Independent oracle: minimum of sqrt(v' G v) over nonzero integer vectors
/// in the box |v_k| <= 10, by direct iteration. No library code involved.
fn brute_force_systole(gram: &[Vec<f64>]) -> f64 {
    let n = gram.len();
    let mut best = f64::INFINITY;
    let mut v = vec![-10i64; n];
    loop {
        if v.iter().any(|&x| x != 0) {
            let mut q = 0.0;
            for i in 0..n {
                for j in 0..n {
                    q += (v[i] as f64) * gram[i][j] * (v[j] as f64);
                }
            }
            best = best.min(q);
        }
        let mut k = 0;
        loop {
            if k == n {
                return best.sqrt();
            }
            v[k] += 1;
            if v[k] <= 10 {
                break;
            }
            v[k] = -10;
            k += 1;
        }
    }
}

fn gcd_of(entries: &[i64]) -> i64 {
    entries.iter().fold(0i64, |acc, &x| {
        let mut a = acc.abs();
        let mut b = x.abs();
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    })
}

/// Determinant by cofactor expansion, independent of the library's
/// elimination-based determinant. Exact in i128 for the sizes used here.
fn cofactor_det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0i128;
    for (j, &lead) in m[0].iter().enumerate() {
        if lead == 0 {
            continue;
        }
        let minor: Vec<Vec<i128>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(c, _)| c != j)
                    .map(|(_, &x)| x)
                    .collect()
            })
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        det += sign * lead * cofactor_det(&minor);
    }
    det
}

#[test]
fn systole_matches_brute_force_on_random_grams() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for trial in 0..50 {
        let n = 2 + (trial % 2);
        let gram = random_pd_gram(&mut rng, n);
        let spec = GaugeSpec::ellipsoid(&gram).unwrap();
        let result = systole(&spec).unwrap();
        let expected = brute_force_systole(&gram);
        assert!(
            (result.s - expected).abs() <= 1e-12 * expected,
            "trial {trial}: systole {} vs brute force {expected} for {gram:?}",
            result.s
        );
        assert!(result.exhaustive);
        assert_eq!(gcd_of(&result.u), 1, "non-primitive minimizer {:?}", result.u);
    }
}

#[test]
fn systole_scales_with_the_gauge() {
    let specs = [
        GaugeSpec::lp(2, 1.0).unwrap(),
        GaugeSpec::lp(3, 2.0).unwrap(),
        GaugeSpec::lp_infinity(2).unwrap(),
        GaugeSpec::ellipsoid(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap(),
        GaugeSpec::polytope_v(vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap(),
        GaugeSpec::polytope_h(
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            vec![1.0; 4],
        )
        .unwrap(),
    ];
    for spec in &specs {
        let base = systole(spec).unwrap();
        for t in [0.5, 3.0] {
            let scaled = scale_gauge(spec, t).unwrap();
            let s = systole(&scaled).unwrap();
            assert!(
                (s.s - t * base.s).abs() <= 1e-12 * t * base.s,
                "t = {t}: {} vs {}",
                s.s,
                t * base.s
            );
            assert_eq!(s.u, base.u);
        }
    }
}

/// Random word of length <= 10 in the generators S = [[0,-1],[1,0]] and
/// T = [[1,1],[0,1]] of SL(2,Z).
fn random_sl2_word(rng: &mut ChaCha8Rng) -> UnimodularMatrix {
    let s = UnimodularMatrix::new(MatZ::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap()).unwrap();
    let t = UnimodularMatrix::new(MatZ::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap()).unwrap();
    let len = rng.random_range(0..=10usize);
    let mut word = UnimodularMatrix::identity(2);
    for _ in 0..len {
        let gen = if rng.random::<bool>() { &s } else { &t };
        word = word.mul(gen).unwrap();
    }
    word
}

#[test]
fn systole_is_unimodular_invariant() {
    let specs = [
        GaugeSpec::lp(2, 1.0).unwrap(),
        GaugeSpec::ellipsoid(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for trial in 0..100 {
        let a = random_sl2_word(&mut rng);
        let spec = &specs[trial % specs.len()];
        let base = systole(spec).unwrap();
        let pulled = pull_back(spec, &a).unwrap();
        let moved = systole(&pulled).unwrap();
        assert!(
            (moved.s - base.s).abs() <= 1e-12 * base.s,
            "trial {trial}: {} vs {} under {:?}",
            moved.s,
            base.s,
            a.matrix()
        );
    }
}

#[test]
fn completions_are_exact_for_random_coprime_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut done = 0;
    while done < 1000 {
        let n = 2 + (done % 3);
        let u: Vec<i64> = (0..n).map(|_| rng.random_range(-50i64..=50)).collect();
        if u.iter().all(|&x| x == 0) || gcd_of(&u) != 1 {
            continue;
        }
        let a = unimodular_complete(&u).unwrap();
        let rows = a.matrix().to_rows();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row[0], u[i] as i128, "column 1 mismatch for {u:?}");
        }
        assert_eq!(cofactor_det(&rows), 1, "det != 1 for {u:?}");
        done += 1;
    }
}

#[test]
fn minimizers_are_primitive_across_families() {
    let specs = [
        GaugeSpec::lp(2, 1.0).unwrap(),
        GaugeSpec::lp(3, 3.0).unwrap(),
        GaugeSpec::lp_infinity(2).unwrap(),
        GaugeSpec::ellipsoid(&[vec![4.0, 0.0], vec![0.0, 9.0]]).unwrap(),
        GaugeSpec::ellipsoid(&[vec![5.0, 3.0], vec![3.0, 2.0]]).unwrap(),
        GaugeSpec::polytope_h(
            vec![
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            vec![1.0; 4],
        )
        .unwrap(),
    ];
    for spec in &specs {
        let result = systole(spec).unwrap();
        assert_eq!(gcd_of(&result.u), 1, "{:?}", result.u);
        let first = result.u.iter().find(|&&x| x != 0).unwrap();
        assert!(*first > 0, "not sign-normalized: {:?}", result.u);
    }
}

proptest! {
    #[test]
    fn completion_of_coprime_pairs(a in -80i64..80, b in -80i64..80) {
        let g = gcd_of(&[a, b]);
        prop_assume!(g == 1);
        let m = unimodular_complete(&[a, b]).unwrap();
        let rows = m.matrix().to_rows();
        prop_assert_eq!(rows[0][0], a as i128);
        prop_assert_eq!(rows[1][0], b as i128);
        prop_assert_eq!(rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0], 1);
    }

    #[test]
    fn l1_systole_scales(t in 0.05f64..20.0) {
        let spec = GaugeSpec::lp(2, 1.0).unwrap();
        let scaled = scale_gauge(&spec, t).unwrap();
        let s = systole(&scaled).unwrap();
        prop_assert!((s.s - t).abs() <= 1e-12 * t);
    }
}
