//! End-to-end exercises of the C interface from Rust: every function, the
//! status-code mapping for each failure class, and a few numeric
//! cross-checks against the underlying library.

use std::ffi::CStr;
use std::ptr;

use advrisk_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(advr_last_error_message()).to_str().unwrap().to_owned() }
}

fn mixture(w_star: &[f64], sigma: f64) -> *mut AdvrMixture {
    let mut handle = ptr::null_mut();
    let status =
        unsafe { advr_mixture_new(w_star.as_ptr(), w_star.len(), sigma, ptr::null(), &mut handle) };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
    assert!(!handle.is_null());
    handle
}

#[test]
fn version_is_a_static_string() {
    let v = unsafe { CStr::from_ptr(advr_version()) }.to_str().unwrap();
    assert!(!v.is_empty());
    assert!(v.chars().next().unwrap().is_ascii_digit());
}

#[test]
fn mixture_round_trip_matches_the_closed_form() {
    let w_star = [1.0, -0.5, 0.25];
    let model = mixture(&w_star, 0.8);

    let mut data = ptr::null_mut();
    let status = unsafe { advr_mixture_sample(model, 40_000, 7, &mut data) };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());

    let (mut n, mut dim) = (0usize, 0usize);
    unsafe {
        assert_eq!(advr_dataset_len(data, &mut n), AdvrStatus::Ok);
        assert_eq!(advr_dataset_dim(data, &mut dim), AdvrStatus::Ok);
    }
    assert_eq!((n, dim), (40_000, 3));

    let w = [0.9, -0.6, 0.1];
    let mut cf = 0.0;
    let status = unsafe { advr_cf_standard_risk(w.as_ptr(), 3, model, &mut cf) };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());

    let (mut mc, mut se) = (0.0, 0.0);
    let status = unsafe {
        advr_mc_risk(
            AdvrRiskFamily::Standard,
            AdvrLoss::ZeroOne,
            w.as_ptr(),
            ptr::null(),
            3,
            data,
            AdvrNorm::Linf,
            0.0,
            &mut mc,
            &mut se,
        )
    };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
    assert!(se > 0.0);
    assert!((cf - mc).abs() <= 4.0 * se, "cf {cf} vs mc {mc} (se {se})");

    // Worst case = standard + excess, as closed forms.
    let (mut worst, mut excess) = (0.0, 0.0);
    unsafe {
        assert_eq!(
            advr_cf_worst_case_adv_risk(w.as_ptr(), 3, model, AdvrNorm::Linf, 0.3, &mut worst),
            AdvrStatus::Ok
        );
        assert_eq!(
            advr_cf_excess_adv_risk(w.as_ptr(), 3, model, AdvrNorm::Linf, 0.3, &mut excess),
            AdvrStatus::Ok
        );
    }
    assert!((worst - cf - excess).abs() < 1e-12);
    assert!(worst >= cf);

    let mut bound = 0.0;
    let status =
        unsafe { advr_cf_new_adv_risk_bound(w.as_ptr(), 3, model, AdvrNorm::Linf, 0.3, &mut bound) };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
    assert!((0.0..=1.0).contains(&bound));

    unsafe {
        advr_dataset_free(data);
        advr_mixture_free(model);
    }
}

#[test]
fn base_relative_risk_of_the_base_classifier_is_zero() {
    let w_star = [2.0, 0.0];
    let model = mixture(&w_star, 1.0);
    let mut g = [0.0; 2];
    unsafe { assert_eq!(advr_bayes_classifier(model, g.as_mut_ptr()), AdvrStatus::Ok) };
    assert_eq!(g, w_star);

    let mut data = ptr::null_mut();
    unsafe { assert_eq!(advr_mixture_sample(model, 10_000, 3, &mut data), AdvrStatus::Ok) };

    let (mut radv, mut se) = (1.0, 1.0);
    let status = unsafe {
        advr_mc_risk(
            AdvrRiskFamily::Radv,
            AdvrLoss::ZeroOne,
            g.as_ptr(),
            g.as_ptr(),
            2,
            data,
            AdvrNorm::Linf,
            0.7,
            &mut radv,
            &mut se,
        )
    };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
    assert_eq!(radv, 0.0);
    assert_eq!(se, 0.0);

    unsafe {
        advr_dataset_free(data);
        advr_mixture_free(model);
    }
}

#[test]
fn attacks_report_margin_drops_and_respect_the_constraint() {
    let w = [1.0, -2.0, 0.5];
    let x = [0.4, 0.1, -0.3];
    let y = 1.0;
    let eps = 0.25;

    let mut delta = [0.0; 3];
    let mut info = AdvrAttackInfo { achieved_score: 0.0, flipped: false, constraint_active: true };
    let status = unsafe {
        advr_attack_unconstrained(
            w.as_ptr(),
            3,
            x.as_ptr(),
            y,
            AdvrNorm::Linf,
            eps,
            delta.as_mut_ptr(),
            &mut info,
        )
    };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
    assert!(!info.constraint_active);
    let base: f64 = w.iter().zip(&x).map(|(a, b)| a * b).sum();
    let l1: f64 = w.iter().map(|v| v.abs()).sum();
    assert!((info.achieved_score - (base - eps * l1)).abs() < 1e-12);
    for (d, wi) in delta.iter().zip(&w) {
        assert_eq!(*d, -eps * wi.signum());
    }

    // Attacking the classifier while preserving its own sign can never flip.
    let status = unsafe {
        advr_attack_constrained(
            w.as_ptr(),
            w.as_ptr(),
            3,
            x.as_ptr(),
            AdvrNorm::Linf,
            eps,
            delta.as_mut_ptr(),
            &mut info,
        )
    };
    assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
    assert!(!info.flipped);
    for d in delta {
        assert!(d.abs() <= eps + 1e-12);
    }
}

#[test]
fn training_through_the_interface_is_deterministic() {
    let mut data = ptr::null_mut();
    unsafe { assert_eq!(advr_squares_sample(5_000, 11, &mut data), AdvrStatus::Ok) };

    let run = |data| {
        let mut w = [0.0f64; 2];
        let mut objective = 0.0;
        let status = unsafe {
            advr_train(
                data,
                0.5,
                AdvrNorm::Linf,
                0.5,
                0.05,
                300,
                AdvrInit::Zeros,
                0.0,
                0,
                w.as_mut_ptr(),
                &mut objective,
            )
        };
        assert_eq!(status, AdvrStatus::Ok, "{}", last_error());
        (w, objective)
    };
    let (w1, obj1) = run(data);
    let (w2, obj2) = run(data);
    assert_eq!(w1.map(f64::to_bits), w2.map(f64::to_bits));
    assert_eq!(obj1.to_bits(), obj2.to_bits());
    assert!(obj1 < std::f64::consts::LN_2);
    assert!(w1[0] > 0.0);

    unsafe { advr_dataset_free(data) };
}

#[test]
fn csv_export_round_trips_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("squares.csv");
    let c_path = std::ffi::CString::new(path.to_str().unwrap()).unwrap();

    let mut data = ptr::null_mut();
    unsafe {
        assert_eq!(advr_squares_sample(200, 4, &mut data), AdvrStatus::Ok);
        assert_eq!(advr_dataset_save_csv(data, c_path.as_ptr()), AdvrStatus::Ok);
        advr_dataset_free(data);
    }
    let reloaded = advrisk::model::Dataset::load_csv(&path).unwrap();
    assert_eq!(reloaded.len(), 200);
    assert_eq!(reloaded.dim(), 2);
}

#[test]
fn every_failure_class_maps_to_its_status_code() {
    // Null pointers.
    let mut out = ptr::null_mut();
    let status = unsafe { advr_mixture_new(ptr::null(), 2, 1.0, ptr::null(), &mut out) };
    assert_eq!(status, AdvrStatus::NullArg);
    assert_eq!(last_error(), "w_star must not be null");

    // Domain violations.
    let w_star = [1.0, 0.0];
    let status = unsafe { advr_mixture_new(w_star.as_ptr(), 2, -1.0, ptr::null(), &mut out) };
    assert_eq!(status, AdvrStatus::InvalidArg);
    assert!(last_error().contains("sigma"), "{}", last_error());

    let model = mixture(&w_star, 1.0);
    let mut data = ptr::null_mut();
    unsafe { assert_eq!(advr_mixture_sample(model, 1_000, 0, &mut data), AdvrStatus::Ok) };

    // Dimension mismatches.
    let w3 = [1.0, 0.0, 0.0];
    let mut value = 0.0;
    let status = unsafe { advr_cf_standard_risk(w3.as_ptr(), 3, model, &mut value) };
    assert_eq!(status, AdvrStatus::InvalidArg);
    assert!(!last_error().is_empty());

    // Unsupported combinations.
    let w = [1.0, 0.0];
    let status = unsafe {
        advr_mc_risk(
            AdvrRiskFamily::WorstCase,
            AdvrLoss::Logistic,
            w.as_ptr(),
            ptr::null(),
            2,
            data,
            AdvrNorm::Linf,
            0.1,
            &mut value,
            ptr::null_mut(),
        )
    };
    assert_eq!(status, AdvrStatus::Unsupported);

    // A base-relative estimate without a base classifier.
    let status = unsafe {
        advr_mc_risk(
            AdvrRiskFamily::Radv,
            AdvrLoss::ZeroOne,
            w.as_ptr(),
            ptr::null(),
            2,
            data,
            AdvrNorm::Linf,
            0.1,
            &mut value,
            ptr::null_mut(),
        )
    };
    assert_eq!(status, AdvrStatus::InvalidArg);

    // I/O failures.
    let bad_path = std::ffi::CString::new("/nonexistent-dir/out.csv").unwrap();
    let status = unsafe { advr_dataset_save_csv(data, bad_path.as_ptr()) };
    assert_eq!(status, AdvrStatus::Io);

    // Divergence: an enormous step size with a strong adversarial weight
    // overflows the iterate within a few steps.
    let mut w_out = [0.0f64; 2];
    let status = unsafe {
        advr_train(
            data,
            1e8,
            AdvrNorm::Linf,
            1.0,
            1e300,
            5,
            AdvrInit::Zeros,
            0.0,
            0,
            w_out.as_mut_ptr(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, AdvrStatus::Diverged, "{}", last_error());
    assert!(last_error().contains("diverged"));

    unsafe {
        advr_dataset_free(data);
        advr_mixture_free(model);
    }
}
