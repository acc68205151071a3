//! Statistical checks of the two sampling distributions at sizes where the
//! Monte Carlo error bands are tight.

use advrisk::model::{bayes_classifier, sample_mixture, sample_squares, GaussianMixture};
use advrisk::numerics::sign;

fn mean_and_se(values: impl Iterator<Item = f64>, n: usize) -> (f64, f64) {
    let (mut sum, mut sumsq) = (0.0, 0.0);
    for v in values {
        sum += v;
        sumsq += v * v;
    }
    let mean = sum / n as f64;
    let var = ((sumsq - sum * mean) / (n as f64 - 1.0)).max(0.0);
    (mean, (var / n as f64).sqrt())
}

#[test]
fn squares_geometry_and_label_frequencies() {
    let n = 1_000_000;
    let data = sample_squares(n, 41).unwrap();
    let mut right = 0usize;
    let mut right_pos = 0usize;
    let mut left_pos = 0usize;
    for (x, y) in data.iter() {
        let horizontal = x[0].abs();
        assert!((1.0..=3.0).contains(&horizontal), "x0 = {} leaves the squares", x[0]);
        assert!((-1.0..=1.0).contains(&x[1]), "x1 = {} leaves the squares", x[1]);
        if x[0] > 0.0 {
            right += 1;
            if y == 1.0 {
                right_pos += 1;
            }
        } else if y == 1.0 {
            left_pos += 1;
        }
    }
    let p_right = right as f64 / n as f64;
    assert!((p_right - 0.5).abs() < 0.002, "P(right) = {p_right}");
    let p_pos_given_right = right_pos as f64 / right as f64;
    assert!((p_pos_given_right - 0.7).abs() < 0.003, "P(+1 | right) = {p_pos_given_right}");
    let p_pos_given_left = left_pos as f64 / (n - right) as f64;
    assert!((p_pos_given_left - 0.3).abs() < 0.003, "P(+1 | left) = {p_pos_given_left}");

    // The side-aware majority vote errs with probability exactly 0.3.
    let (bayes_risk, se) =
        mean_and_se(data.iter().map(|(x, y)| if sign(x[0]) == y { 0.0 } else { 1.0 }), n);
    assert!(
        (bayes_risk - 0.3).abs() <= 4.0 * se,
        "squares Bayes risk = {bayes_risk} (se {se})"
    );
}

#[test]
fn mixture_moments_match_the_model() {
    let n = 400_000;
    let w_star = vec![0.8, -0.4, 0.0, 1.2];
    let sigma = 1.3;
    let model = GaussianMixture::new(w_star.clone(), sigma).unwrap();
    let data = sample_mixture(&model, n, 17).unwrap();
    for j in 0..w_star.len() {
        // y*x_j has mean w*_j and variance sigma^2 regardless of the label mix.
        let (mean, se) = mean_and_se(data.iter().map(|(x, y)| y * x[j]), n);
        assert!(
            (mean - w_star[j]).abs() <= 4.0 * se,
            "coordinate {j}: mean {mean} vs {} (se {se})",
            w_star[j]
        );
        let (second, se2) = mean_and_se(data.iter().map(|(x, _)| x[j] * x[j]), n);
        let want = sigma * sigma + w_star[j] * w_star[j];
        assert!(
            (second - want).abs() <= 4.0 * se2,
            "coordinate {j}: E[x^2] = {second} vs {want} (se {se2})"
        );
    }
    let (p_pos, se) = mean_and_se(data.iter().map(|(_, y)| if y == 1.0 { 1.0 } else { 0.0 }), n);
    assert!((p_pos - 0.5).abs() <= 4.0 * se, "P(y = +1) = {p_pos}");
}

#[test]
fn masked_mixture_keeps_off_support_exactly_zero() {
    let mask = vec![true, false, true, false];
    let model =
        GaussianMixture::with_mask(vec![1.0, 0.0, -0.5, 0.0], 0.7, Some(mask.clone())).unwrap();
    let data = sample_mixture(&model, 50_000, 3).unwrap();
    for (x, _) in data.iter() {
        for (j, &m) in mask.iter().enumerate() {
            if !m {
                assert_eq!(x[j], 0.0);
            }
        }
    }
}

#[test]
fn bayes_classifier_reaches_the_closed_form_risk() {
    let model = GaussianMixture::new(vec![1.0, 0.5], 1.0).unwrap();
    let g = bayes_classifier(&model).unwrap();
    let n = 400_000;
    let data = sample_mixture(&model, n, 29).unwrap();
    let (risk, se) = mean_and_se(
        data.iter().map(|(x, y)| {
            let score: f64 = g.w.iter().zip(x).map(|(a, b)| a * b).sum();
            if sign(score) == y {
                0.0
            } else {
                1.0
            }
        }),
        n,
    );
    let want = advrisk::risk::cf_standard_risk(&g, &model).unwrap().value;
    assert!((risk - want).abs() <= 4.0 * se, "risk {risk} vs closed form {want} (se {se})");
}
