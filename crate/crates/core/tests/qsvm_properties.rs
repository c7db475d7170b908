use proptest::prelude::*;
use qsvm_core::ansatz::Registry;
use qsvm_core::dataset::{make_split, Label, Regime, SplitPlan};
use qsvm_core::qsvm::classical::{density_features, solve_dual, ClassicalSvm};
use qsvm_core::qsvm::{decision_score, quantum_loss, train, Hyperparams, KernelMatrix};
use qsvm_core::rng::rng;
use rand::Rng;

/// Loss evaluated term by term, straight from its definition.
fn naive_loss(mu: &[f64], y: &[f64], k: &[Vec<f64>], c: f64, gamma: f64) -> f64 {
    let m = mu.len();
    let mut total = 0.0;
    for i in 0..m {
        for j in 0..m {
            total += mu[i] * mu[j] * y[i] * y[j] * (k[i][j] + 1.0 / gamma);
        }
    }
    let mut ridge = 0.0;
    for i in 0..m {
        ridge += mu[i] * mu[i];
    }
    total + ridge / c
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<bool>, Vec<Vec<f64>>, f64, f64)> {
    (2usize..=8).prop_flat_map(|m| {
        (
            prop::collection::vec(0.0..1.0f64, m),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(0.0..=1.0f64, m * m),
            0.01..1000.0f64,
            0.01..1000.0f64,
        )
            .prop_map(move |(mu, y, raw, c, g)| {
                let k: Vec<Vec<f64>> = (0..m)
                    .map(|i| (0..m).map(|j| if i == j { 1.0 } else { raw[i.min(j) * m + i.max(j)] }).collect())
                    .collect();
                (mu, y, k, c, g)
            })
    })
}

fn labels(y: &[bool]) -> Vec<Label> {
    y.iter().map(|&s| if s { Label::Separable } else { Label::Entangled }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn loss_matches_naive_oracle((mu, y, k, c, g) in instance()) {
        let ls = labels(&y);
        let signs: Vec<f64> = ls.iter().map(|l| l.sign()).collect();
        let kernel = KernelMatrix::from_rows(k.clone()).unwrap();
        let fast = quantum_loss(&mu, &ls, &kernel, c, g);
        let slow = naive_loss(&mu, &signs, &k, c, g);
        prop_assert!((fast - slow).abs() <= 1e-12 * slow.abs().max(1.0), "{} vs {}", fast, slow);
        prop_assert!(fast.is_finite());
    }

    #[test]
    fn score_scales_with_mu((mu, y, k, _c, g) in instance(), scale in 0.01..100.0f64) {
        let ls = labels(&y);
        let scaled: Vec<f64> = mu.iter().map(|m| m * scale).collect();
        let s1 = decision_score(&mu, &ls, &k[0], g);
        let s2 = decision_score(&scaled, &ls, &k[0], g);
        prop_assert!((s2 - scale * s1).abs() <= 1e-12 * (scale * s1).abs().max(1e-12));
        prop_assert_eq!(Label::from_score(s1), Label::from_score(s2));
    }
}

#[test]
fn loss_trace_shrinks_in_most_seeds() {
    let reg = Registry::builtin();
    let t = reg.get("fig1").unwrap();
    let plan = SplitPlan::new(Regime::TwoQubitPartial, 4, 20);
    let mut good = 0;
    for seed in 0..5 {
        let out = train(&make_split(&plan, seed).unwrap(), t, &Hyperparams::default(), seed).unwrap();
        assert_eq!(out.trace.len(), 200);
        if out.model.final_loss <= 0.9 * out.model.initial_loss {
            good += 1;
        }
    }
    assert!(good >= 4, "{good}/5");
}

#[test]
fn shot_noise_training_tracks_exact() {
    let reg = Registry::builtin();
    let t = reg.get("fig1").unwrap();
    let split = make_split(&SplitPlan::new(Regime::TwoQubitPartial, 4, 20), 3).unwrap();
    let exact = train(&split, t, &Hyperparams::default(), 3).unwrap().model;
    let noisy = train(&split, t, &Hyperparams { shots: 8192, ..Default::default() }, 3).unwrap().model;
    let ratio = noisy.final_loss / exact.final_loss;
    assert!((0.5..=2.0).contains(&ratio), "{} vs {}", noisy.final_loss, exact.final_loss);
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(noisy.kernel.get(i, j), noisy.kernel.get(j, i));
            assert!((0.0..=1.0).contains(&noisy.kernel.get(i, j)));
        }
    }
}

#[test]
fn trained_kernel_is_exact_and_symmetric() {
    let reg = Registry::builtin();
    let t = reg.get("fig1").unwrap();
    let split = make_split(&SplitPlan::new(Regime::TwoQubitMaximal, 4, 4), 8).unwrap();
    let hyper = Hyperparams { spsa: qsvm_core::qsvm::SpsaConfig { iterations: 5, ..Default::default() }, ..Default::default() };
    let k = train(&split, t, &hyper, 8).unwrap().model.kernel;
    for i in 0..4 {
        assert!((k.get(i, i) - 1.0).abs() < 1e-10);
        for j in 0..4 {
            assert_eq!(k.get(i, j), k.get(j, i));
        }
    }
}

#[test]
fn separable_points_are_fit_perfectly() {
    let mut r = rng(12);
    let mut pts = Vec::new();
    let mut ys = Vec::new();
    while pts.len() < 20 {
        let p = [r.random::<f64>() * 4.0 - 2.0, r.random::<f64>() * 4.0 - 2.0];
        let margin = p[0] + 0.5 * p[1];
        if margin.abs() < 0.3 {
            continue;
        }
        ys.push(if margin > 0.0 { Label::Separable } else { Label::Entangled });
        pts.push(p.to_vec());
    }
    let svm = ClassicalSvm::fit(&pts, &ys, 1e4, 1e4).unwrap();
    let correct = pts.iter().zip(&ys).filter(|(p, y)| svm.predict(p) == **y).count();
    assert_eq!(correct, 20);
}

#[test]
fn feature_route_agrees_with_kernel_route() {
    let (c, gamma) = (100.0, 10.0);
    for seed in 0..3 {
        let split = make_split(&SplitPlan::new(Regime::TwoQubitPartial, 4, 20), seed).unwrap();
        let ys: Vec<Label> = split.train.iter().map(|s| s.label).collect();

        let feats: Vec<Vec<f64>> = split.train.iter().map(|s| density_features(&s.state)).collect();
        let classical = ClassicalSvm::fit(&feats, &ys, 2.0 * c, gamma).unwrap();

        let states: Vec<_> = split.train.iter().map(|s| &s.state).collect();
        let kernel = KernelMatrix::exact(&states).unwrap();
        let mu = solve_dual(&kernel.rows(), &ys, 2.0 * c, gamma).unwrap();

        let agree = split
            .test
            .iter()
            .filter(|t| {
                let overlaps: Vec<f64> = states
                    .iter()
                    .map(|s| qsvm_core::sim::fidelity(s, &t.state).unwrap())
                    .collect();
                let quantum = Label::from_score(decision_score(&mu, &ys, &overlaps, gamma));
                quantum == classical.predict(&density_features(&t.state))
            })
            .count();
        assert!(agree >= 18, "seed {seed}: {agree}/20");
    }
}
