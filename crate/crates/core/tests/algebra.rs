use leibnizlab::algebra::{Algebra, CharSeq, SeriesKind};
use leibnizlab::catalog::{admissible_grid, build, identify, validate_family, Family, FamilySpec};
use leibnizlab::matrix::Matrix;
use leibnizlab::scalar::{frac, rat, Rational};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec(family: Family, n: usize, k: usize) -> FamilySpec {
    FamilySpec::new(family, n, k).unwrap()
}

fn named(a: &Algebra, terms: &[(&str, i64)]) -> Vec<Rational> {
    let mut v = vec![rat(0); a.dim()];
    for (name, c) in terms {
        v[a.basis_index(name).unwrap()] += rat(*c);
    }
    v
}

/// Dense structure tensor `c[i][j][k]`.
fn tensor(a: &Algebra) -> Vec<Vec<Vec<Rational>>> {
    let n = a.dim();
    let mut t = vec![vec![vec![rat(0); n]; n]; n];
    for (i, j, terms) in a.products() {
        for (k, c) in terms {
            t[i][j][*k] = c.clone();
        }
    }
    t
}

/// Leibniz defect computed from the dense tensor by index contraction.
fn dense_leibniz_ok(a: &Algebra) -> bool {
    let c = tensor(a);
    let n = a.dim();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for out in 0..n {
                    let mut s = rat(0);
                    for p in 0..n {
                        s += &c[y][z][p] * &c[x][p][out];
                        s -= &c[x][y][p] * &c[p][z][out];
                        s += &c[x][z][p] * &c[p][y][out];
                    }
                    if s != rat(0) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Rank by plain Gaussian elimination over the rationals.
fn naive_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != rat(0)) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] != rat(0) {
                let f = &m[r][c] / &m[rank][c];
                for j in 0..cols {
                    let v = &m[rank][j] * &f;
                    m[r][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Jordan blocks of `R_x` via the ranks of its powers, computed densely.
fn oracle_char_seq(a: &Algebra, x: &[Rational]) -> Vec<usize> {
    let n = a.dim();
    let c = tensor(a);
    let r: Vec<Vec<Rational>> =
        (0..n).map(|row| (0..n).map(|col| (0..n).map(|p| &x[p] * &c[col][p][row]).sum()).collect()).collect();
    let mut ranks = vec![n];
    let mut power: Vec<Vec<Rational>> = (0..n).map(|i| (0..n).map(|j| rat((i == j) as i64)).collect()).collect();
    while *ranks.last().unwrap() > 0 {
        power = (0..n).map(|i| (0..n).map(|j| (0..n).map(|t| &power[i][t] * &r[t][j]).sum()).collect()).collect();
        ranks.push(naive_rank(&power));
    }
    let ge: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut blocks = Vec::new();
    for (j, &g) in ge.iter().enumerate() {
        let next = ge.get(j + 1).copied().unwrap_or(0);
        blocks.extend(std::iter::repeat_n(j + 1, g - next));
    }
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    blocks
}

#[test]
fn bracket_examples() {
    let a = build(&spec(Family::Mu1, 6, 1));
    let e1 = named(&a, &[("e1", 1)]);
    let f1 = named(&a, &[("f1", 1)]);
    assert_eq!(a.bracket(&e1, &e1).unwrap(), named(&a, &[("e2", 1)]));
    assert_eq!(a.bracket(&f1, &e1).unwrap(), vec![rat(0); 6]);
    let b = build(&spec(Family::Mu2, 6, 1));
    assert_eq!(b.bracket(&e1, &f1).unwrap(), named(&b, &[("e2", 1), ("f2", 1)]));
    let products: Vec<String> = a.to_string().lines().map(str::to_owned).collect();
    assert_eq!(products, ["[e1, e1] = e2", "[e1, f1] = f2", "[e2, e1] = e3", "[e3, e1] = e4"]);
}

#[test]
fn mu2_adds_exactly_the_f1_products() {
    for (n, k) in [(6, 1), (9, 2), (12, 3)] {
        let a = build(&spec(Family::Mu1, n, k));
        let b = build(&spec(Family::Mu2, n, k));
        let f1 = a.basis_index("f1").unwrap();
        let pa: Vec<_> = a.products().map(|(i, j, t)| (i, j, t.to_vec())).collect();
        let pb: Vec<_> = b.products().map(|(i, j, t)| (i, j, t.to_vec())).collect();
        for p in pa.iter().filter(|p| !pb.contains(p)).chain(pb.iter().filter(|p| !pa.contains(p))) {
            assert!(p.0 == f1 || p.1 == f1, "{p:?}");
        }
    }
}

#[test]
fn leibniz_agrees_with_dense_contraction() {
    for s in admissible_grid(&Family::ALL, 11, 2) {
        let a = build(&s);
        assert!(a.leibniz_violations().is_empty(), "{s}");
        assert!(dense_leibniz_ok(&a), "{s}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..40 {
        let mut a = Algebra::abelian(4);
        for _ in 0..rng.gen_range(1..5) {
            let (i, j, k) = (rng.gen_range(0..4), rng.gen_range(0..4), rng.gen_range(0..4));
            a.set_product(i, j, &[(k, rat(rng.gen_range(1..3)))]).unwrap();
        }
        assert_eq!(a.leibniz_violations().is_empty(), dense_leibniz_ok(&a), "{a}");
    }
}

#[test]
fn series_examples() {
    let a = build(&spec(Family::Mu1, 6, 1));
    let lc = a.series(SeriesKind::LowerCentral);
    assert_eq!(lc.subspace_dims, vec![6, 4, 2, 1, 0]);
    assert_eq!(lc.index, Some(5));
    let d = a.series(SeriesKind::Derived);
    assert_eq!(d.subspace_dims, vec![6, 4, 0]);
    assert_eq!(d.index, Some(3));
    let sq = a.derived_square();
    for name in ["e2", "e3", "e4", "f2"] {
        assert!(leibnizlab::matrix::in_span(&sq, &named(&a, &[(name, 1)])), "{name}");
    }
    assert_eq!(a.graded_dims().unwrap(), vec![2, 2, 1, 1]);
    assert_eq!(build(&spec(Family::Mu3, 7, 1)).graded_dims().unwrap(), vec![3, 2, 1, 1]);
    assert_eq!(build(&spec(Family::Mu2, 8, 2)).series(SeriesKind::LowerCentral).index, Some(5));
}

#[test]
fn right_multiplication_examples() {
    let a = build(&spec(Family::Mu1, 6, 1));
    let r = a.right_mul_matrix(&named(&a, &[("e1", 1)])).unwrap();
    assert_eq!(r.rank(), 3);
    let expected: Vec<(usize, usize)> = vec![(1, 0), (2, 1), (3, 2)];
    assert_eq!(r.nonzeros().map(|(i, j, _)| (i, j)).collect::<Vec<_>>(), expected);
    let kernel = r.kernel_basis();
    assert_eq!(kernel.len(), 3);
    for name in ["e4", "f1", "f2"] {
        assert!(leibnizlab::matrix::in_span(&kernel, &named(&a, &[(name, 1)])));
    }
    assert!(a.right_mul_matrix(&vec![rat(0); 6]).unwrap().is_zero());

    let b = build(&spec(Family::Mu3, 7, 1));
    let r = b.right_mul_matrix(&named(&b, &[("e1", 1)])).unwrap();
    let cols: Vec<(usize, usize)> = r.nonzeros().map(|(i, j, _)| (j, i)).collect();
    let mut cols = cols;
    cols.sort();
    assert_eq!(cols, vec![(0, 2), (1, 2), (2, 3), (3, 4)]);
}

#[test]
fn characteristic_sequences_match_rank_oracle() {
    assert_eq!(
        build(&spec(Family::Mu1, 6, 1)).char_seq_at(&named(&build(&spec(Family::Mu1, 6, 1)), &[("e1", 1)])).unwrap(),
        CharSeq::new(vec![4, 1, 1])
    );
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for s in admissible_grid(&Family::ALL, 10, 2) {
        let a = build(&s);
        let e1 = a.unit_vector(0);
        assert_eq!(a.char_seq_at(&e1).unwrap().blocks(), oracle_char_seq(&a, &e1).as_slice(), "{s}");
        assert_eq!(a.char_seq_at(&e1).unwrap(), s.expected_char_seq());
        for _ in 0..10 {
            let x: Vec<Rational> = (0..a.dim()).map(|_| rat(rng.gen_range(-3..=3))).collect();
            assert_eq!(a.char_seq_at(&x).unwrap().blocks(), oracle_char_seq(&a, &x).as_slice());
        }
    }
}

#[test]
fn estimate_never_beats_e1() {
    for s in [spec(Family::Mu1, 6, 1), spec(Family::Mu2, 6, 1), spec(Family::Mu3, 9, 2)] {
        let a = build(&s);
        let (c, witness) = a.char_seq_estimate(100, 7).unwrap();
        assert_eq!(c, s.expected_char_seq(), "{s}");
        assert_eq!(a.char_seq_at(&witness).unwrap(), c);
    }
    let (c, w) = build(&spec(Family::Mu1, 6, 1)).char_seq_estimate(100, 7).unwrap();
    assert_eq!(c.blocks(), &[4, 1, 1]);
    assert_eq!(w, named(&build(&spec(Family::Mu1, 6, 1)), &[("e1", 1)]));
}

#[test]
fn family_reports() {
    for s in admissible_grid(&Family::ALL, 14, 3) {
        let r = validate_family(&build(&s), &s);
        assert!(r.ok(), "{r:?}");
        let w = r.non_lie.unwrap();
        assert_eq!((w.x, w.y), (0, 0));
    }
}

#[test]
fn json_is_bit_exact() {
    for s in admissible_grid(&Family::ALL, 9, 2) {
        let a = build(&s);
        let text = a.to_json_string();
        let back = Algebra::from_json_str(&text).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json_string(), text);
        assert_eq!(identify(&back), Some(s));
    }
    let text = build(&spec(Family::Mu2, 6, 1)).to_json_string();
    assert!(text.contains("\"i\": 1,\n      \"j\": 5,\n      \"k\": 2,\n      \"c\": \"1\""), "{text}");
}

#[test]
fn inverse_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 20 {
        let rows: Vec<Vec<Rational>> =
            (0..4).map(|_| (0..4).map(|_| frac(rng.gen_range(-9..=9), rng.gen_range(1..=4))).collect()).collect();
        let a = Matrix::from_rows(rows).unwrap();
        let Some(inv) = a.inverse() else { continue };
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(4));
        done += 1;
    }
}

fn arb_table() -> impl Strategy<Value = Algebra> {
    (1usize..6, proptest::collection::vec((0usize..6, 0usize..6, 0usize..6, -20i64..20, 1i64..7), 0..12)).prop_map(
        |(n, entries)| {
            let mut a = Algebra::abelian(n);
            for (i, j, k, num, den) in entries {
                let mut terms = a.product(i % n, j % n).to_vec();
                if terms.iter().all(|(t, _)| *t != k % n) {
                    terms.push((k % n, frac(num, den)));
                }
                a.set_product(i % n, j % n, &terms).unwrap();
            }
            a
        },
    )
}

proptest! {
    #[test]
    fn json_round_trip(a in arb_table()) {
        let text = a.to_json_string();
        let back = Algebra::from_json_str(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_json_string(), text);
    }

    #[test]
    fn rational_results_are_canonical(num in -1000i64..1000, den in 1i64..1000) {
        let r = frac(num, den) * frac(den, 7) + frac(0, 5);
        let renormalized = Rational::new(r.numer().clone(), r.denom().clone());
        prop_assert_eq!(r.numer(), renormalized.numer());
        prop_assert!(r.denom() > &0.into());
    }

    #[test]
    fn block_sums_and_power_ranks(seed in any::<u64>(), fam in 0usize..3, k in 1usize..3, extra in 0usize..4) {
        let s = spec(Family::ALL[fam], 2 * k + 4 + extra, k);
        let a = build(&s);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<Rational> = (0..a.dim()).map(|_| rat(rng.gen_range(-4..=4))).collect();
        let c = a.char_seq_at(&x).unwrap();
        prop_assert_eq!(c.total(), a.dim());
        prop_assert!(c <= s.expected_char_seq());
        let r = a.right_mul_matrix(&x).unwrap();
        let mut prev = a.dim();
        for j in 1..=a.dim() {
            let rk = r.pow(j as u32).unwrap().rank();
            prop_assert!(rk <= prev);
            prev = rk;
        }
        prop_assert_eq!(prev, 0);
    }

    #[test]
    fn radical_powers_match_decimals(num in 1i64..500, den in 1i64..50, degree in 2u32..7, power in 1u32..6) {
        use leibnizlab::scalar::RadicalScalar;
        let radicand = frac(num, den);
        let power = power % degree;
        let s = RadicalScalar::monomial(&frac(3, 2), &radicand, degree, power).unwrap();
        let lhs = leibnizlab::scalar::Scalar::pow(&s, degree);
        let rhs = leibnizlab::scalar::Scalar::pow(&frac(3, 2), degree) * leibnizlab::scalar::Scalar::pow(&radicand, power);
        prop_assert_eq!(lhs.as_rational(), Some(&rhs));
        let digits = 60;
        let approx = s.fixed_point(digits);
        let scale = num_bigint_pow10(digits);
        let approx_pow = Rational::new(approx.pow(degree), scale.pow(degree));
        let rel = num_traits::Signed::abs(&((approx_pow - &rhs) / &rhs));
        prop_assert!(rel < frac(1, 1) / Rational::from_integer(num_bigint_pow10(40)));
    }
}

fn num_bigint_pow10(e: u32) -> num_bigint::BigInt {
    num_bigint::BigInt::from(10).pow(e)
}
