use toeplitz_asy::permlab::{count_u, gessel_check, lis_length, sample_scaled_lis, Permutation};

#[test]
fn gessel_identity_for_several_rows() {
    for (n, lambda, tol) in [(1, 0.5, 1e-10), (2, 0.25, 1e-10), (3, 0.5, 1e-8), (4, 1.0, 1e-5)] {
        let r = gessel_check(n, lambda, 10).unwrap();
        assert!(r.residual <= tol + r.tail_bound, "n={n} lambda={lambda}: {}", r.residual);
    }
}

#[test]
fn u3_counts_match_the_known_sequence() {
    // permutations avoiding 1234
    let want = [1u64, 1, 2, 6, 23, 103, 513, 2761, 15767, 94359, 586590];
    for (big_n, &w) in want.iter().enumerate() {
        assert_eq!(count_u(3, big_n).unwrap(), w, "N={big_n}");
    }
}

#[test]
fn samples_are_consistent_with_direct_lis() {
    let s = sample_scaled_lis(50, 10, 4).unwrap();
    let scale = 50f64.powf(-1.0 / 6.0);
    for v in &s.scaled_values {
        let l = v / scale + 2.0 * 50f64.sqrt();
        assert!((l - l.round()).abs() < 1e-9 && (1.0..=50.0).contains(&l.round()));
    }
    let p = Permutation::new(vec![2, 7, 1, 8, 3, 6, 4, 5]).unwrap();
    assert_eq!(lis_length(&p), 4);
}
