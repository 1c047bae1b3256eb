//! Each variant against a direct evaluation of its defining sums.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vdcorput::cstar::{AlgebraMap, FiniteCStarAlgebra, State};
use vdcorput::harness::{
    verify, CStarPayload, LatticeField, ModulePayload, OperatorPayload, SemigroupPayload,
    VariantSpec, Verdict, DEFAULT_MARGIN_TOL,
};
use vdcorput::hilbert_module::{DominatedPair, PreHilbertModule};
use vdcorput::linalg::{c, random_unitary, random_vector, CMat, CVec, Complex, ONE, ZERO};
use vdcorput::sequences::{VectorSequence, WindowSpec};
use vdcorput::Error;

const EPS: f64 = 1e-12;

fn random_periodic(seed: u64, period: usize, dim: usize) -> VectorSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..period)
        .map(|_| {
            let v = random_vector(&mut rng, dim);
            let n = v.norm();
            v / Complex::new(n, 0.0)
        })
        .collect();
    VectorSequence::periodic(values).unwrap()
}

fn window(w: &WindowSpec) -> Vec<u64> {
    (w.window_start()..=w.n_max).collect()
}

fn max(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::NEG_INFINITY, f64::max)
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// `(1/N) Σ_{n=M+1}^{M+N} u_n`, summed term by term.
fn block_average(u: &VectorSequence, m: u64, n: u64) -> CVec {
    let mut acc = CVec::zeros(u.dim());
    for k in m + 1..=m + n {
        acc += u.get(k);
    }
    acc / Complex::new(n as f64, 0.0)
}

/// `Re (1/N) Σ_{n=M+1}^{M+N} (u_n | u_{n+j})`.
fn block_correlation(u: &VectorSequence, j: u64, m: u64, n: u64) -> f64 {
    (m + 1..=m + n)
        .map(|k| u.get(k).dotc(&u.get(k + j)).re)
        .sum::<f64>()
        / n as f64
}

#[test]
fn hilbert_matches_direct_sums() {
    let u = random_periodic(3, 7, 2);
    let w = WindowSpec::new(60, 0.5, 9).unwrap();
    let r = verify(&VariantSpec::Hilbert(u.clone()), &w, DEFAULT_MARGIN_TOL).unwrap();
    let lhs = max(window(&w)
        .into_iter()
        .map(|n| block_average(&u, 0, n).norm_squared()));
    assert!((r.lhs - lhs).abs() <= EPS);
    let terms: Vec<f64> = (1..=w.j_max)
        .map(|j| {
            max(window(&w)
                .into_iter()
                .map(|n| block_correlation(&u, j, 0, n)))
        })
        .collect();
    for (&(j, got), want) in r.j_trace.iter().zip(&terms) {
        assert!((got - want).abs() <= EPS, "lag {j}: {got} vs {want}");
    }
    assert!((r.rhs - mean(&terms)).abs() <= EPS);
    assert_eq!(r.margin, r.rhs - r.lhs);
}

#[test]
fn scalar_geometric_closed_form() {
    let theta = 0.23;
    let lambda = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * theta);
    let u = VectorSequence::geometric_turns(theta, DVector::from_vec(vec![ONE]));
    let w = WindowSpec::new(400, 0.5, 12).unwrap();
    let r = verify(&VariantSpec::Scalar(u), &w, DEFAULT_MARGIN_TOL).unwrap();
    // (1/N) Σ_{n ≤ N} λ^n = λ(1 − λ^N) / (N(1 − λ))
    let lhs = max(window(&w).into_iter().map(|n| {
        (lambda * (ONE - lambda.powu(n as u32)) / ((ONE - lambda) * n as f64)).norm_sqr()
    }));
    assert!((r.lhs - lhs).abs() <= 1e-12);
    for &(j, term) in &r.j_trace {
        assert!((term - lambda.conj().powu(j as u32).re).abs() <= 1e-10);
    }
}

#[test]
fn scalar_rejects_vector_sequences() {
    let u = random_periodic(1, 3, 2);
    let err = verify(
        &VariantSpec::Scalar(u),
        &WindowSpec::new(10, 0.5, 2).unwrap(),
        1e-7,
    )
    .unwrap_err();
    assert!(matches!(err, Error::PayloadInvalid(_)));
}

#[test]
fn uniform_sup_matches_exhaustive_search() {
    let u = random_periodic(5, 5, 1);
    let w = WindowSpec::new(24, 0.5, 4).unwrap();
    let m_max = 10;
    let r = verify(
        &VariantSpec::UniformSup {
            u: u.clone(),
            m_max: Some(m_max),
        },
        &w,
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();
    let lhs = max(window(&w).into_iter().flat_map(|n| {
        let u = u.clone();
        (0..=m_max).map(move |m| block_average(&u, m, n).norm_squared())
    }));
    assert!((r.lhs - lhs).abs() <= EPS);
    for &(j, got) in &r.j_trace {
        let want = max(window(&w).into_iter().flat_map(|n| {
            let u = u.clone();
            (0..=m_max).map(move |m| block_correlation(&u, j, m, n))
        }));
        assert!((got - want).abs() <= EPS);
    }
    let plain = verify(&VariantSpec::Hilbert(u), &w, DEFAULT_MARGIN_TOL).unwrap();
    assert!(r.lhs >= plain.lhs);
}

#[test]
fn operator_matches_matrix_powers() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = 4;
    let s = random_unitary(&mut rng, d);
    let t = vdcorput::linalg::random_matrix(&mut rng, d, d) * c(0.4, 0.0);
    let xi = {
        let v = random_vector(&mut rng, d);
        let n = v.norm();
        v / Complex::new(n, 0.0)
    };
    let w = WindowSpec::new(30, 0.5, 5).unwrap();
    let p = OperatorPayload {
        s: s.clone(),
        t: t.clone(),
        xi: xi.clone(),
    };
    let r = verify(&VariantSpec::Operator(p), &w, DEFAULT_MARGIN_TOL).unwrap();
    let v = |n: u32| -> CVec {
        let mut x = xi.clone();
        for _ in 0..n {
            x = &s * x;
        }
        x
    };
    let lhs = max(window(&w).into_iter().map(|n| {
        let sum: Complex = (0..n as u32).map(|k| v(k).dotc(&(&t * v(k)))).sum();
        (sum / n as f64).norm_sqr()
    }));
    assert!((r.lhs - lhs).abs() <= 1e-10);
    for &(j, got) in &r.j_trace {
        let mut sj = CMat::identity(d, d);
        for _ in 0..j {
            sj = &s * sj;
        }
        let want = max(window(&w).into_iter().map(|n| {
            (0..n as u32)
                .map(|k| (&t * v(k + j as u32)).dotc(&(&sj * &t * v(k))).re)
                .sum::<f64>()
                / n as f64
        }));
        assert!((got - want).abs() <= 1e-10, "lag {j}");
    }
}

#[test]
fn operator_requires_an_isometry() {
    let s = CMat::from_diagonal(&DVector::from_vec(vec![c(2.0, 0.0), ONE]));
    let p = OperatorPayload {
        s,
        t: CMat::identity(2, 2),
        xi: DVector::from_vec(vec![ONE, ZERO]),
    };
    let err = verify(
        &VariantSpec::Operator(p),
        &WindowSpec::new(10, 0.5, 2).unwrap(),
        1e-7,
    )
    .unwrap_err();
    assert!(matches!(err, Error::PreconditionFailed { ref check, .. } if check == "isometry"));
}

#[test]
fn semigroup_product_field_factorizes() {
    let a = random_periodic(21, 3, 1);
    let b = random_periodic(22, 5, 1);
    let (a2, b2) = (a.clone(), b.clone());
    let field = LatticeField::from_fn(2, 1, 1.0, "product", move |t| {
        DVector::from_vec(vec![a2.get(t[0])[0] * b2.get(t[1])[0]])
    });
    let f: Vec<u64> = (1..=20).collect();
    let g = [1u64, 2, 3];
    let w = WindowSpec::new(20, 0.5, 3).unwrap();
    let r = verify(
        &VariantSpec::Semigroup(SemigroupPayload::cubes(field, &f, &g)),
        &w,
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();

    let avg = |u: &VectorSequence, l: u64| block_average(u, 0, l)[0];
    let corr = |u: &VectorSequence, s: u64, l: u64| -> Complex {
        (1..=l)
            .map(|k| u.get(k)[0] * u.get(k + s)[0].conj())
            .sum::<Complex>()
            / l as f64
    };
    let lhs = max(window(&w)
        .into_iter()
        .map(|l| (avg(&a, l) * avg(&b, l)).norm_sqr()));
    assert!((r.lhs - lhs).abs() <= EPS);

    // lag terms in lexicographic order over [1..3]^2
    let mut terms = Vec::new();
    for s1 in 1..=3 {
        for s2 in 1..=3 {
            terms.push(max(window(&w)
                .into_iter()
                .map(|l| (corr(&a, s1, l) * corr(&b, s2, l)).re)));
        }
    }
    for (&(_, got), want) in r.j_trace.iter().zip(&terms) {
        assert!((got - want).abs() <= EPS);
    }
    for (&(j, rhs_j), side) in r.diagnostics.rhs_trace.iter().zip(g) {
        let inside: Vec<f64> = (0..9)
            .filter(|k| k / 3 < side as usize && k % 3 < side as usize)
            .map(|k| terms[k])
            .collect();
        assert!((rhs_j - mean(&inside)).abs() <= EPS, "G_{j}");
    }
}

#[test]
fn cstar_matches_averaged_state() {
    let p = CMat::from_row_slice(
        3,
        3,
        &[
            c(0.2, 0.0),
            c(0.5, 0.0),
            c(0.3, 0.0),
            c(0.6, 0.0),
            c(0.1, 0.0),
            c(0.3, 0.0),
            c(0.3, 0.0),
            c(0.3, 0.0),
            c(0.4, 0.0),
        ],
    );
    let map = AlgebraMap::stochastic(&p).unwrap();
    let alg = map.algebra.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let x = alg.random_element(&mut rng);
    let mu = State::point_mass(&alg, 2).unwrap();
    let schedule = vec![5, 10, 20, 40];
    let payload = CStarPayload {
        map: map.clone(),
        x: x.clone(),
        states: vec![mu.clone()],
        schedule: schedule.clone(),
    };
    let w = WindowSpec::new(1, 0.5, 3).unwrap();
    let r = verify(&VariantSpec::CStarAbstract(payload), &w, DEFAULT_MARGIN_TOL).unwrap();

    let averaged = |y: &vdcorput::cstar::AlgebraElement, n: u64| -> Complex {
        let mut cur = y.clone();
        let mut acc = ZERO;
        for _ in 0..n {
            acc += mu.eval(&cur).unwrap();
            cur = map.apply(&cur).unwrap();
        }
        acc / n as f64
    };
    // window positions 2..=4 of the schedule
    let lhs = max(schedule[1..].iter().map(|&n| averaged(&x, n).norm_sqr()));
    assert!((r.lhs - lhs).abs() <= 1e-12);
    let mut phi_x = x.clone();
    for &(_, got) in &r.j_trace {
        phi_x = map.apply(&phi_x).unwrap();
        let y = phi_x.adjoint().multiply(&x).unwrap();
        let want = max(schedule[1..].iter().map(|&n| averaged(&y, n).re));
        assert!((got - want).abs() <= 1e-12);
    }
}

#[test]
fn cstar_rejects_non_schwarz_maps() {
    let alg = FiniteCStarAlgebra::matrices(2);
    let transpose = AlgebraMap::from_fn(&alg, |x| vdcorput::cstar::AlgebraElement {
        blocks: x.blocks.iter().map(|b| b.transpose()).collect(),
    })
    .unwrap();
    let payload = CStarPayload {
        x: alg.unit(),
        states: vec![State::tracial(&alg)],
        schedule: vec![4],
        map: transpose,
    };
    let err = verify(
        &VariantSpec::CStarAbstract(payload),
        &WindowSpec::new(1, 0.5, 2).unwrap(),
        1e-7,
    )
    .unwrap_err();
    assert!(
        matches!(err, Error::PreconditionFailed { ref check, .. } if check == "is_markov_schwarz")
    );
}

#[test]
fn module_matches_pointwise_sums() {
    let module = PreHilbertModule::new(3, 2).unwrap();
    let p = CMat::from_row_slice(
        3,
        3,
        &[
            c(0.5, 0.0),
            c(0.25, 0.0),
            c(0.25, 0.0),
            c(0.25, 0.0),
            c(0.5, 0.0),
            c(0.25, 0.0),
            c(0.25, 0.0),
            c(0.25, 0.0),
            c(0.5, 0.0),
        ],
    );
    let pair = DominatedPair::lifted(module, p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let x = module.random_element(&mut rng);
    let mu = vec![0.2, 0.5, 0.3];
    let schedule = vec![3, 6, 12];
    let payload = ModulePayload {
        pair: pair.clone(),
        x: x.clone(),
        states: vec![mu.clone()],
        schedule: schedule.clone(),
    };
    let w = WindowSpec::new(1, 0.5, 4).unwrap();
    let r = verify(
        &VariantSpec::ModuleAbstract(payload),
        &w,
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();

    let cesaro = |n: u64| {
        let mut cur = x.clone();
        let mut acc = CMat::zeros(3, 2);
        for _ in 0..n {
            acc += &cur.values;
            cur = pair.apply_t(&cur).unwrap();
        }
        acc / Complex::new(n as f64, 0.0)
    };
    // ν(k) = (1/N) Σ_{n<N} Σ_i μ_i (S^n δ_k)(i)
    let nu = |n: u64| -> Vec<f64> {
        (0..3)
            .map(|k| {
                let mut f = vec![0.0; 3];
                f[k] = 1.0;
                let mut acc = 0.0;
                for _ in 0..n {
                    acc += f.iter().zip(&mu).map(|(a, b)| a * b).sum::<f64>();
                    f = pair.apply_s(&f);
                }
                acc / n as f64
            })
            .collect()
    };
    let lhs = max(schedule[1..].iter().map(|&n| {
        let avg = cesaro(n);
        (0..3)
            .map(|i| mu[i] * avg.row(i).norm_squared())
            .sum::<f64>()
    }));
    assert!((r.lhs - lhs).abs() <= 1e-12);
    let mut tx = x.clone();
    for &(_, got) in &r.j_trace {
        tx = pair.apply_t(&tx).unwrap();
        let want = max(schedule[1..].iter().map(|&n| {
            let weights = nu(n);
            (0..3)
                .map(|i| weights[i] * tx.values.row(i).dotc(&x.values.row(i)).re)
                .sum::<f64>()
        }));
        assert!((got - want).abs() <= 1e-12);
    }
}

#[test]
fn wiener_wintner_dominates_untwisted_average() {
    let u = random_periodic(8, 6, 1);
    let w = WindowSpec::new(48, 0.5, 6).unwrap();
    let twisted = verify(
        &VariantSpec::WienerWintner(u.clone()),
        &w,
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();
    let plain = verify(&VariantSpec::Hilbert(u.clone()), &w, DEFAULT_MARGIN_TOL).unwrap();
    assert!(twisted.lhs >= plain.lhs - EPS);
    // sixth roots of unity lie on the torus grid, so none of them can beat the search
    for k in 0..6 {
        let lambda = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 6.0);
        let best = max(window(&w).into_iter().map(|n| {
            let sum: Complex = (1..=n).map(|m| lambda.powu(m as u32) * u.get(m)[0]).sum();
            (sum / n as f64).norm_sqr()
        }));
        assert!(
            twisted.lhs >= best - EPS,
            "root {k}: {best} > {}",
            twisted.lhs
        );
    }
}

#[test]
fn random_period_sequences_hold_on_whole_periods() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for seed in 0..10 {
        let period = rng.random_range(2..8usize);
        let u = random_periodic(seed, period, 2);
        let n = (period * 40) as u64;
        let w = WindowSpec::new(n, 0.5 / n as f64, n).unwrap();
        let r = verify(&VariantSpec::Hilbert(u), &w, DEFAULT_MARGIN_TOL).unwrap();
        assert_ne!(
            r.verdict,
            Verdict::Violated,
            "period {period}: margin {}",
            r.margin
        );
    }
}

#[test]
fn geometric_three_tenths_turn() {
    let theta = 0.3;
    let lambda = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * theta);
    let u = VectorSequence::geometric_turns(theta, DVector::from_vec(vec![ONE]));
    let spec = VariantSpec::Scalar(u);
    let r = verify(
        &spec,
        &WindowSpec::new(5000, 0.5, 50).unwrap(),
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();
    assert!(r.lhs <= 1e-3);
    for &(j, term) in &r.j_trace {
        assert!((term - lambda.conj().powu(j as u32).re).abs() <= 1e-3);
    }
    // Σ_{j ≤ 50} λ̄^j vanishes since 50·0.3 is an integer
    assert!(r.rhs.abs() <= 1e-3);
    // both sides tend to 0; on [2500, 5000] the left side is at most (2/(N₀|1 − λ|))²
    let bound = (2.0 / (2500.0 * (ONE - lambda).norm())).powi(2);
    assert!(r.margin >= -bound, "margin {}", r.margin);
    let end = verify(
        &spec,
        &WindowSpec::new(5000, 1e-4, 50).unwrap(),
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();
    assert!(end.verdict.is_ok(), "margin {}", end.margin);
}

#[test]
fn diagonal_isometry_with_random_contraction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = CMat::from_diagonal(&DVector::from_vec(vec![ONE, Complex::from_polar(1.0, 1.0)]));
    let g = vdcorput::linalg::random_matrix(&mut rng, 2, 2);
    let t = &g / Complex::new(vdcorput::linalg::spectral_norm(&g), 0.0);
    let (t11, t21) = (t[(0, 0)].norm_sqr(), t[(1, 0)].norm_sqr());
    let p = OperatorPayload {
        s,
        t,
        xi: DVector::from_vec(vec![ONE, ZERO]),
    };
    // S fixes ξ = e₁, so the left side is |t₁₁|² and the j-th term is |t₁₁|² + cos(j)|t₂₁|²
    for j_max in [40u64, 44, 100, 101] {
        let r = verify(
            &VariantSpec::Operator(p.clone()),
            &WindowSpec::new(2000, 0.5, j_max).unwrap(),
            DEFAULT_MARGIN_TOL,
        )
        .unwrap();
        assert!((r.lhs - t11).abs() <= 1e-12);
        let cosines: f64 = (1..=j_max).map(|j| (j as f64).cos()).sum::<f64>() / j_max as f64;
        assert!((r.rhs - (t11 + t21 * cosines)).abs() <= 1e-12);
        assert_eq!(
            r.verdict.is_ok(),
            t21 * cosines >= -DEFAULT_MARGIN_TOL,
            "J = {j_max}"
        );
    }
}

#[test]
fn lattice_character_on_growing_boxes() {
    let field = LatticeField::character(vec![0.3, 0.7], DVector::from_vec(vec![ONE]));
    let f: Vec<u64> = (10..=200).collect();
    let r = verify(
        &VariantSpec::Semigroup(SemigroupPayload::cubes(field, &f, &[1, 2, 3, 4, 5])),
        &WindowSpec::new(f.len() as u64, 0.5, 5).unwrap(),
        DEFAULT_MARGIN_TOL,
    )
    .unwrap();
    assert!(r.lhs <= 1e-2);
    assert!(r.verdict.is_ok(), "margin {}", r.margin);
}
