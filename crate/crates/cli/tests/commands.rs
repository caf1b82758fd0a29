//! End-to-end behaviour of the commands, through the binary where exit
//! codes and files matter and through the library for the statistics.

use std::path::{Path, PathBuf};
use std::process::Command;

use gpnet::data::{load_delimited, standardize, synth_generate, write_delimited, Dataset, Link, SynthEdge, SynthSpec};
use gpnet::scoring::{gp_family_score, kernel_family_score, FamilyKey, FamilyScorer, Fitted, ScoreConfig, Scorer, ScorerId};
use gpnet_cli::commands::benchmark::{benchmark, BenchmarkParams};
use gpnet_cli::commands::comparison::{model_comparison, ComparisonParams};
use gpnet_cli::commands::profile::predict_profile;
use gpnet_cli::commands::recovery::{structure_recovery, RecoveryParams, RecoveryRow};
use gpnet_cli::commands::score::ScoreRow;
use gpnet_cli::commands::two_variable_cell;
use gpnet_cli::commands::sweep::{noise_sweep, SweepParams, SweepRow};
use gpnet_cli::config::{Architecture, Generator};
use gpnet_cli::output::Timings;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use tempfile::TempDir;

fn gpnet(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gpnet")).args(args).output().expect("binary runs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, data: &Dataset) -> PathBuf {
    let path = dir.path().join(name);
    write_delimited(data, &path).unwrap();
    path
}

fn pair_file(dir: &TempDir, link: Option<Link>, m: usize, seed: u64) -> PathBuf {
    let edges = link.map(|link| vec![SynthEdge { parent: 0, child: 1, link }]).unwrap_or_default();
    let mut spec = SynthSpec::new(2, edges, 0.3, m, seed);
    spec.names = vec!["Y".into(), "X".into()];
    write(dir, "pair.csv", &synth_generate(&spec).unwrap())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[test]
fn learn_orients_the_quadratic_pair() {
    let dir = TempDir::new().unwrap();
    let input = pair_file(&dir, Some(Link::Quadratic), 150, 3);
    let out = dir.path().join("net.json");
    let run = gpnet(&["learn", "--input", arg(&input), "--scorer", "gp", "--out", arg(&out)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(json["edges"], serde_json::json!([{ "parent": "Y", "child": "X" }]));
    assert_eq!(json["families"].as_array().unwrap().len(), 2);
    let last = json["trace"].as_array().unwrap().last().unwrap()["total"].as_f64().unwrap();
    assert_eq!(last, json["total_score"].as_f64().unwrap());
    let timing: serde_json::Value =
        serde_json::from_slice(&std::fs::read(gpnet_cli::timing_path(&out)).unwrap()).unwrap();
    assert!(timing["phases"]["search"].as_f64().unwrap() > 0.0);
}

#[test]
fn learn_leaves_independent_columns_unconnected() {
    let dir = TempDir::new().unwrap();
    let input = pair_file(&dir, None, 150, 4);
    let run = gpnet(&["learn", "--input", arg(&input)]);
    assert!(run.status.success());
    let json: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(json["edges"].as_array().unwrap().len(), 0);
}

#[test]
fn input_and_usage_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "a,b\n1,2\n3,4\n5\n").unwrap();
    let run = gpnet(&["learn", "--input", arg(&bad)]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 4"));

    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "max_parent = 2\n").unwrap();
    assert_eq!(gpnet(&["learn", "--config", arg(&cfg), "--input", arg(&bad)]).status.code(), Some(2));
    assert_eq!(gpnet(&["learn"]).status.code(), Some(2));
    assert_eq!(gpnet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gpnet(&["noise-sweep", "--noise", "-1"]).status.code(), Some(2));

    let input = pair_file(&dir, Some(Link::Linear), 20, 1);
    let run = gpnet(&["score", "--input", arg(&input), "--child", "Z"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&run.stderr).contains("'Z'"));
}

#[test]
fn scoring_failures_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let input = pair_file(&dir, Some(Link::Linear), 4, 1);
    let run = gpnet(&["score", "--input", arg(&input), "--child", "X", "--parents", "Y"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("X"));
}

#[test]
fn score_matches_the_library_exactly() {
    let dir = TempDir::new().unwrap();
    let input = pair_file(&dir, Some(Link::Sinusoidal), 60, 5);
    let args = ["score", "--input", arg(&input), "--child", "X", "--parents", "Y", "--scorer", "gp,linear_gaussian"];
    let first = gpnet(&args);
    let second = gpnet(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let rows: Vec<ScoreRow> =
        csv::Reader::from_reader(first.stdout.as_slice()).deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.iter().map(|r| r.scorer.as_str()).collect::<Vec<_>>(), ["gp", "linear_gaussian"]);

    let raw = load_delimited(&input, &Default::default()).unwrap();
    let data = standardize(&raw, &raw.all_rows()).unwrap().0;
    let lib = gp_family_score(&FamilyKey::new(1, [0]).unwrap(), &data, &ScoreConfig::default()).unwrap();
    assert_eq!(rows[0].log_score.to_bits(), lib.log_score.to_bits());
    assert_eq!(rows[0].penalty.to_bits(), lib.penalty_applied.to_bits());
}

#[test]
fn noise_sweep_row_count_and_schema() {
    let run = gpnet(&["noise-sweep", "--seeds", "0..10", "--scorer", "linear_gaussian", "--samples", "30", "--test-count", "20"]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let rows: Vec<SweepRow> =
        csv::Reader::from_reader(run.stdout.as_slice()).deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 8 * 4 * 10 * 3);
    assert!(rows.iter().all(|r| r.error.is_empty() && r.score.is_some() && r.test_log_loss.is_some()));
    let header = String::from_utf8_lossy(&run.stdout).lines().next().unwrap().to_string();
    assert_eq!(header, gpnet_cli::commands::sweep::HEADER.join(","));
}

#[test]
fn noise_sweep_prefers_the_true_direction_at_low_noise() {
    let params = SweepParams {
        functions: vec![Generator::Link(Link::Quadratic)],
        noise: vec![0.2],
        seeds: (0..10).collect(),
        samples: 100,
        test_count: 100,
        scorers: vec![ScorerId::Gp],
        base_seed: 0,
    };
    let rows = noise_sweep(&params, &mut Timings::default());
    let scores = |model: &str| rows.iter().filter(|r| r.model == model).map(|r| r.score.unwrap()).collect::<Vec<_>>();
    assert!(median(scores("true-direction")) > median(scores("reverse")));

    // each row is reproducible from its recorded data seed
    let row = rows.iter().find(|r| r.model == "true-direction" && r.seed == 3).unwrap();
    let (train, _) =
        two_variable_cell(Generator::Link(Link::Quadratic), 0.2, row.samples, row.test_count, row.data_seed).unwrap();
    let gp = FamilyScorer::new(ScorerId::Gp, ScoreConfig::default()).unwrap();
    let direct = gp.score_family(&FamilyKey::new(1, [0]).unwrap(), &train).unwrap().log_score
        + gp.score_family(&FamilyKey::empty(0), &train).unwrap().log_score;
    assert_eq!(row.score.unwrap(), direct);
}

fn comparison(function: Generator) -> Vec<gpnet_cli::commands::comparison::ComparisonRow> {
    let params = ComparisonParams {
        functions: vec![function],
        sizes: vec![100],
        noise: 0.4,
        seeds: (0..10).collect(),
        test_count: 300,
        scorers: ScorerId::CONTINUOUS.to_vec(),
        base_seed: 0,
    };
    model_comparison(&params, &mut Timings::default())
}

fn median_ratio(rows: &[gpnet_cli::commands::comparison::ComparisonRow], scorer: ScorerId) -> f64 {
    median(rows.iter().filter(|r| r.scorer == scorer.as_str()).map(|r| r.ratio.unwrap()).collect())
}

#[test]
fn model_comparison_shapes() {
    let linear = comparison(Generator::Link(Link::Linear));
    for id in ScorerId::CONTINUOUS {
        assert!(median_ratio(&linear, id) > 0.0, "linear data, {id}");
    }
    let sine = comparison(Generator::Link(Link::Sinusoidal));
    assert!(median_ratio(&sine, ScorerId::Gp) > 0.0);
    assert!(median_ratio(&sine, ScorerId::Kernel) > 0.0);
    assert!(median_ratio(&sine, ScorerId::LinearGaussian).abs() < 2.0);
    let null = comparison(Generator::Independent);
    for id in ScorerId::CONTINUOUS {
        assert!(median_ratio(&null, id).abs() < 0.1, "independent data, {id}: {}", median_ratio(&null, id));
    }
}

#[test]
fn structure_recovery_rows() {
    let params = RecoveryParams {
        architectures: vec![Architecture::Chain, Architecture::Collider],
        link: Link::Quadratic,
        samples: 60,
        noise: 0.4,
        seeds: vec![0, 1],
        scorers: vec![ScorerId::LinearGaussian, ScorerId::Kernel],
        max_parents: 3,
        base_seed: 0,
    };
    let rows = structure_recovery(&params, &mut Timings::default());
    assert_eq!(rows.len(), 2 * 2 * 2);
    assert!(rows.iter().all(|r| r.error.is_empty() && r.functional_arcs == 2));
    let run = gpnet(&[
        "structure-recovery",
        "--architectures",
        "pair",
        "--link",
        "linear",
        "--seeds",
        "0",
        "--scorer",
        "linear_gaussian",
        "--samples",
        "40",
    ]);
    assert!(run.status.success());
    let parsed: Vec<RecoveryRow> =
        csv::Reader::from_reader(run.stdout.as_slice()).deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(parsed.len(), 1);
    assert_eq!(parsed[0].functional_arcs, 0);
}

/// Six variables with mixed links, a stand-in for a nonlinear benchmark
/// table.
fn six_variable_file(dir: &TempDir) -> PathBuf {
    let edges = vec![
        SynthEdge { parent: 0, child: 1, link: Link::Quadratic },
        SynthEdge { parent: 0, child: 2, link: Link::Sinusoidal },
        SynthEdge { parent: 3, child: 4, link: Link::Cubic },
        SynthEdge { parent: 1, child: 5, link: Link::Linear },
        SynthEdge { parent: 3, child: 5, link: Link::Quadratic },
    ];
    write(dir, "six.csv", &synth_generate(&SynthSpec::new(6, edges, 0.4, 400, 17)).unwrap())
}

#[test]
fn benchmark_learning_curves() {
    let dir = TempDir::new().unwrap();
    let params = BenchmarkParams {
        inputs: vec![six_variable_file(&dir), dir.path().join("missing.csv")],
        hints: Default::default(),
        sizes: vec![20, 50, 100],
        test_count: 100,
        seeds: (0..20).collect(),
        scorers: vec![ScorerId::Gp, ScorerId::LinearGaussian],
        max_parents: 3,
        base_seed: 0,
    };
    let rows = benchmark(&params, &mut Timings::default());
    assert!(rows.last().unwrap().error.contains("missing.csv"));
    let ll = |size: usize, scorer: ScorerId| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.dataset == "six" && r.size == size && r.scorer == scorer.as_str())
            .map(|r| r.test_log_likelihood.unwrap())
            .collect()
    };
    let (gp100, lin100) = (ll(100, ScorerId::Gp), ll(100, ScorerId::LinearGaussian));
    let wins = gp100.iter().zip(&lin100).filter(|(g, l)| g >= l).count();
    assert!(wins >= 15, "{wins} of 20");
    let medians: Vec<f64> = [20, 50, 100].iter().map(|&s| median(ll(s, ScorerId::Gp))).collect();
    assert!(medians.windows(2).all(|w| w[1] >= w[0]), "{medians:?}");
}

#[test]
fn kernel_survives_integer_valued_continuous_columns() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 200;
    let values = DMatrix::from_fn(m, 2, |_, _| 0.0);
    let mut values = values;
    for i in 0..m {
        let level = rng.random_range(0..9) as f64;
        values[(i, 0)] = level;
        values[(i, 1)] = 0.3 * level + rng.sample::<f64, _>(StandardNormal);
    }
    let data = Dataset::continuous(&["access", "value"], values).unwrap();
    let path = write(&dir, "housing.csv", &data);
    let hints = [("access".to_string(), "continuous".parse().unwrap())].into_iter().collect();
    let loaded = load_delimited(&path, &hints).unwrap();
    assert!(!loaded.kind(0).is_discrete());
    let std = standardize(&loaded, &loaded.all_rows()).unwrap().0;
    let fitted = kernel_family_score(&FamilyKey::empty(0), &std, &ScoreConfig::default()).unwrap();
    let Fitted::Kernel { bandwidth } = fitted.fitted else { unreachable!() };
    assert_eq!(bandwidth, ScoreConfig::default().kernel.floor);

    let params = BenchmarkParams {
        inputs: vec![path],
        hints,
        sizes: vec![50, 100],
        test_count: 100,
        seeds: vec![0, 1],
        scorers: vec![ScorerId::Kernel],
        max_parents: 3,
        base_seed: 0,
    };
    let rows = benchmark(&params, &mut Timings::default());
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r.test_log_likelihood.is_some_and(f64::is_finite)), "{rows:?}");
}

#[test]
fn predict_profile_widens_outside_the_data() {
    let dir = TempDir::new().unwrap();
    let input = pair_file(&dir, Some(Link::Sinusoidal), 80, 8);
    let out = dir.path().join("profile.csv");
    let run = gpnet(&[
        "predict-profile", "--input", arg(&input), "--child", "X", "--parent", "Y", "--grid-points", "101", "--out",
        arg(&out),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let rows: Vec<gpnet_cli::commands::profile::ProfileRow> =
        csv::Reader::from_path(&out).unwrap().deserialize().collect::<Result<_, _>>().unwrap();
    assert_eq!(rows.len(), 101);
    let raw = load_delimited(&input, &Default::default()).unwrap();
    let y = standardize(&raw, &raw.all_rows()).unwrap().0.column_vector(0);
    let inside: Vec<f64> = rows.iter().filter(|r| r.u >= y.min() && r.u <= y.max()).map(|r| r.sd).collect();
    let m = median(inside);
    assert!(rows[0].sd > m && rows[100].sd > m);
    assert_eq!(gpnet(&["predict-profile", "--input", arg(&input), "--child", "X"]).status.code(), Some(2));
}

#[test]
fn noiseless_profile_is_tight_inside_the_data() {
    let m = 40;
    let values = DMatrix::from_fn(m, 2, |i, j| {
        let u = -2.0 + 4.0 * i as f64 / (m - 1) as f64;
        if j == 0 {
            u
        } else {
            (1.3 * u).sin()
        }
    });
    let raw = Dataset::continuous(&["u", "x"], values).unwrap();
    let (data, st) = standardize(&raw, &raw.all_rows()).unwrap();
    let rows = predict_profile(&data, &st, 1, 0, 200).unwrap();
    let u = data.column_vector(0);
    let inside: Vec<f64> = rows.iter().filter(|r| r.u >= u.min() && r.u <= u.max()).map(|r| r.sd).collect();
    assert!(inside.iter().all(|&s| s < 0.1), "max {}", inside.iter().copied().fold(0.0, f64::max));
}
