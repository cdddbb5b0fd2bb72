use bbp_core::algebra::bigreal::BigReal;
use bbp_core::lattice::{
    build_relation_lattice, determinant, extract_candidates, is_size_reduced, lll_reduce, satisfies_lovasz,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn bi(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect()
}

fn delta() -> BigRational {
    BigRational::new(3.into(), 4.into())
}

fn matmul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    a.iter()
        .map(|row| (0..b[0].len()).map(|j| row.iter().zip(b).map(|(x, r)| x * &r[j]).sum()).collect())
        .collect()
}

fn random_basis(rng: &mut StdRng, n: usize, bound: i64) -> Vec<Vec<BigInt>> {
    loop {
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
        let b = bi(&rows);
        if !determinant(&b).is_zero() {
            return b;
        }
    }
}

fn norm2(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x * x).sum()
}

/// Exact inverse of a rational Gram matrix (Gauss-Jordan).
fn inverse(m: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| BigRational::from_integer(BigInt::from((i == j) as i64))));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero()).unwrap();
        a.swap(c, p);
        let inv = a[c][c].recip();
        a[c].iter_mut().for_each(|x| *x *= &inv);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot = a[c].clone();
                a[r].iter_mut().zip(&pivot).for_each(|(x, y)| *x -= &f * y);
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Shortest nonzero vector by complete enumeration: any v with |v| <= |b_1|
/// has coordinates |c_i| <= |b_1| |d_i| where d_i are the dual basis rows.
fn brute_force_shortest(basis: &[Vec<BigInt>]) -> BigInt {
    let n = basis.len();
    let gram: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| BigRational::from_integer(basis[i].iter().zip(&basis[j]).map(|(x, y)| x * y).sum())).collect())
        .collect();
    let ginv = inverse(&gram);
    let b1 = norm2(&basis[0]).to_f64().unwrap();
    let bounds: Vec<i64> = (0..n).map(|i| ((b1 * ginv[i][i].to_f64().unwrap()).sqrt() ).ceil() as i64).collect();
    let mut best = norm2(&basis[0]);
    let mut c = bounds.iter().map(|b| -b).collect::<Vec<i64>>();
    loop {
        if c.iter().any(|&x| x != 0) {
            let v: Vec<BigInt> = (0..basis[0].len()).map(|j| (0..n).map(|i| BigInt::from(c[i]) * &basis[i][j]).sum()).collect();
            let s = norm2(&v);
            if s < best {
                best = s;
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            if c[i] < bounds[i] {
                c[i] += 1;
                break;
            }
            c[i] = -bounds[i];
            i += 1;
        }
    }
}

#[test]
fn random_bases_reduce_correctly() {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for case in 0..100 {
        let n = 2 + case % 4;
        let b = random_basis(&mut rng, n, 1000);
        let red = lll_reduce(&b, &delta()).unwrap();
        assert_eq!(matmul(&red.transform, &b), red.basis);
        let det = determinant(&red.transform);
        assert!(det == BigInt::from(1) || det == BigInt::from(-1));
        assert!(is_size_reduced(&red.basis).unwrap());
        assert!(satisfies_lovasz(&red.basis, &delta()).unwrap());
    }
}

#[test]
fn first_vector_within_lll_factor() {
    let mut rng = StdRng::seed_from_u64(17);
    for case in 0..40 {
        let n = 3 + case % 3;
        let b = random_basis(&mut rng, n, 1000);
        let red = lll_reduce(&b, &delta()).unwrap();
        let lambda1 = brute_force_shortest(&red.basis);
        // |b_1|^2 <= 2^{n-1} lambda_1^2
        assert!(norm2(&red.basis[0]) <= lambda1 * BigInt::from(1u64 << (n - 1)), "case {case}");
    }
}

#[test]
fn small_relation_lattice() {
    let xs = [BigReal::from_rational(&BigRational::new(1.into(), 2.into()), 64), BigReal::from_rational(&BigRational::new(1.into(), 4.into()), 64)];
    let lat = build_relation_lattice(&xs, &BigInt::from(100)).unwrap();
    assert_eq!(lat.rows, bi(&[vec![1, 0, 50], vec![0, 1, 25]]));
    let red = lll_reduce(&lat.rows, &delta()).unwrap();
    let c = extract_candidates(&red.basis, &BigInt::zero(), 32);
    assert_eq!(c.len(), 1);
    assert_eq!(c[0].coeffs, vec![BigInt::from(1), BigInt::from(-2)]);
    let none = extract_candidates(&bi(&[vec![1, 0, 7]]), &BigInt::zero(), 32);
    assert!(none.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn candidates_recompute_exactly(vals in prop::collection::vec(1i64..100_000, 2..6), scale in 2i64..1000) {
        let xs: Vec<BigReal> = vals
            .iter()
            .map(|&v| BigReal::from_rational(&BigRational::new(v.into(), 100_000.into()), 80))
            .collect();
        let lat = build_relation_lattice(&xs, &BigInt::from(scale)).unwrap();
        let m = lat.last_column();
        let red = lll_reduce(&lat.rows, &delta()).unwrap();
        for c in extract_candidates(&red.basis, &BigInt::from(1_000_000), 32) {
            let last: BigInt = c.coeffs.iter().zip(&m).map(|(a, b)| a * b).sum();
            prop_assert_eq!(&last, &c.last);
            prop_assert_eq!(norm2(&c.coeffs) + &c.last * &c.last, c.norm2.clone());
            prop_assert!(c.coeffs.iter().find(|v| !v.is_zero()).unwrap() > &BigInt::zero());
        }
    }
}
