//! End-to-end runs across modules: sampling, files, rendering and the
//! Monte Carlo comparison with the limiting covariance.

use num_bigint::BigInt;
use num_rational::BigRational;

use hallscope_core::config::ExperimentConfig;
use hallscope_core::enumerate::{enumerate_lht, EnumerationSpec};
use hallscope_core::experiment::run;
use hallscope_core::gff::{covariance_green, CovarianceSpec};
use hallscope_core::mcmc::{sample_exact_batch, sample_mcmc, McmcOptions, MoveKind};
use hallscope_core::measure::{build_transforms, BaseMeasure};
use hallscope_core::stats::{power_sum, CovarianceAccumulator};
use hallscope_core::Partition;

#[test]
fn sample_then_render_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let samples = dir.path().join("s.json");
    let svg = dir.path().join("s.svg");
    let cfg = format!("command = sample\nlambda = 3,1\nn = 3\nt = 3\nsamples = 4\nseed = 1\nout = {}\n", samples.display());
    assert!(run(&ExperimentConfig::parse(&cfg).unwrap()).unwrap().manifest.all_passed);
    let cfg = format!("command = render\ninput = {}\nout = {}\n", samples.display(), svg.display());
    let out = run(&ExperimentConfig::parse(&cfg).unwrap()).unwrap();
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<?xml"));
    assert_eq!(text.matches("class=\"path\"").count(), 3);
    assert_eq!(out.manifest.artifacts[0].bytes, text.len() as u64);
}

#[test]
fn frozen_json_renders() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("f.json");
    let cfg = format!("command = frozen\nformat = json\ngrid = 21\nout = {}\n", json.display());
    run(&ExperimentConfig::parse(&cfg).unwrap()).unwrap();
    let cfg = format!("command = render\ninput = {}\n", json.display());
    let out = run(&ExperimentConfig::parse(&cfg).unwrap()).unwrap();
    assert!(out.human.contains("class=\"frozen\""));
}

#[test]
fn tiny_weights_concentrate_on_floor_zero() {
    // x = (1, ε, ε): every ⌊L⌋ entry should be 0 with overwhelming probability
    let eps = BigRational::new(BigInt::from(1), BigInt::from(1_000_000));
    let w = vec![BigRational::from_integer(BigInt::from(1)), eps.clone(), eps];
    let spec = EnumerationSpec::new(Partition::parse("2,1").unwrap(), 2, 3).with_weights(w);
    let batch = sample_exact_batch(&spec, 500, 3).unwrap();
    let zero_floor = |l: &hallscope_core::LectureHallTableau| l.floor().unwrap().values().all(|&f| f == 0);
    assert!(batch.samples.iter().all(zero_floor));
    let all = enumerate_lht(&EnumerationSpec::new(Partition::parse("2,1").unwrap(), 2, 3)).unwrap();
    assert!(all.iter().any(|l| !zero_floor(l)));
}

#[test]
fn empty_shape_has_one_configuration() {
    let spec = EnumerationSpec::new(Partition::empty(), 3, 2);
    let batch = sample_exact_batch(&spec, 5, 0).unwrap();
    assert!(batch.samples.iter().all(|l| l.entries.is_empty()));
    let configs = batch.configs().unwrap();
    assert!(configs.iter().all(|p| p.paths.len() == 3));
}

#[test]
fn level_covariance_matches_green_form() {
    let n = 10u32;
    let spec = EnumerationSpec::new(Partition::staircase(2, n), n, 10);
    let opts = McmcOptions { kind: MoveKind::HeatBath, chains: 20, burn_in: 0, thin: 10, samples_per_chain: 250 };
    let batch = sample_mcmc(&spec, 3000, 8, &opts).unwrap();
    let pack = build_transforms(&BaseMeasure::Staircase { p: 2 }).unwrap();
    let mut acc = CovarianceAccumulator::new(2);
    for l in &batch.samples {
        let a = power_sum(&l.level(3).unwrap(), n as usize, 1) / n as f64;
        let b = power_sum(&l.level(7).unwrap(), n as usize, 1) / n as f64;
        acc.push(&[a, b]);
    }
    let mc = acc.covariance()[0][1];
    let limit = covariance_green(&CovarianceSpec::new(1, 1, 0.7, 0.3), &pack).unwrap().value;
    // finite n = 10 and correlated samples: a loose band
    assert!((mc - limit).abs() < 0.35 * limit, "Monte Carlo {mc} against {limit}");
}
