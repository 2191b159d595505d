use std::process::{Command, Output};

use clap::Parser;
use heston_mc::harness::parse_csv;
use heston_mc_cli::config::{ConfigFile, ProductType};
use heston_mc_cli::{Cli, Command as Sub};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heston-mc"))
        .args(args)
        .env("HESTON_MC_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn temp_file(name: &str, text: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("heston-mc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn exact_preset_prices() {
    for (case, want) in [("I", 13.08467014), ("III", 6.80611331), ("IV", 9.02491348)] {
        let o = bin(&["exact", "--case", case]);
        assert!(o.status.success(), "{}", stderr(&o));
        let got: f64 = stdout(&o).trim().parse().unwrap();
        assert!((got - want).abs() < 1e-6, "case {case}: {got}");
        assert_eq!(stdout(&o).trim().split('.').nth(1).unwrap().len(), 8);
    }
}

#[test]
fn exact_from_params_file_matches_preset() {
    let p = temp_file(
        "case3.toml",
        "[model]\ns0 = 100.0\nv0 = 0.010201\nkappa = 6.21\ntheta = 0.019\nxi = 0.61\nrho = -0.7\nr = 0.0319\n\
         [product]\nmaturity = 1.0\nstrike = 100.0\n",
    );
    let o = bin(&["exact", "--params", p.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o), stdout(&bin(&["exact", "--case", "III"])));
}

#[test]
fn price_smoke_emits_one_row() {
    let o = bin(&[
        "price", "--scheme", "pois-ge", "--K", "0", "--steps", "1", "--case", "IV", "--paths", "160000",
        "--reps", "10", "--seed", "1", "--format", "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.scheme.as_str(), r.n_steps, r.k, r.paths, r.reps), ("pois-ge", 1, Some(0), 160_000, 10));
    assert!(r.bias.unwrap().abs() < 4.0 * r.se + 0.01, "{r:?}");
}

#[test]
fn price_is_reproducible_across_threads() {
    let args = ["price", "--scheme", "qem", "--steps", "4", "--case", "III", "--paths", "20000", "--reps", "3", "--format", "csv"];
    let strip = |o: &Output| {
        parse_csv(&stdout(o))
            .unwrap()
            .into_iter()
            .map(|mut r| {
                r.wall_seconds = 0.0;
                r
            })
            .collect::<Vec<_>>()
    };
    let a = bin(&[&args[..], &["--threads", "1"]].concat());
    let b = bin(&[&args[..], &["--threads", "3"]].concat());
    assert!(a.status.success() && b.status.success());
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn bench_var3_benchmarks() {
    let o = bin(&["bench", "--table", "var3", "--paths", "2000", "--reps", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let data: Vec<&str> = text.lines().skip(2).filter(|l| l.starts_with('|')).collect();
    assert_eq!(data.len(), 4, "{text}");
    for (line, want) in data.iter().zip(["1.870", "1.832", "1.790", "1.767"]) {
        let cells: Vec<&str> = line.split('|').map(str::trim).collect();
        assert_eq!(cells[3], want, "{line}");
    }
}

#[test]
fn varswap_subcommand() {
    let o = bin(&[
        "varswap", "--scheme", "pois-td", "--periods", "12", "--case", "IV", "--paths", "5000", "--reps", "2",
        "--format", "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].benchmark.unwrap() - 0.20356).abs() < 5e-6);
}

#[test]
fn output_files() {
    let out = temp_file("out.csv", "");
    let reps = temp_file("reps.csv", "");
    let o = bin(&[
        "price", "--scheme", "ig", "--case", "III", "--paths", "100", "--reps", "3", "--spot", "--format", "csv",
        "--out", out.to_str().unwrap(), "--reps-out", reps.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let rows = parse_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1].scheme, "ig:spot");
    assert_eq!(std::fs::read_to_string(&reps).unwrap().lines().count(), 1 + 2 * 3);
}

#[test]
fn help_lists_subcommands_and_flags() {
    let o = bin(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for s in ["exact", "price", "varswap", "bench"] {
        assert!(stdout(&o).contains(s));
    }
    let o = bin(&["price", "--help"]);
    for f in ["--scheme", "--K", "--steps", "--paths", "--reps", "--seed", "--out", "--format", "--config"] {
        assert!(stdout(&o).contains(f), "missing {f}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(bin(&["price", "--bogus"]).status.code(), Some(2));
    assert_eq!(bin(&["bench", "--table", "opt9"]).status.code(), Some(2));
    assert_eq!(bin(&["exact"]).status.code(), Some(2));
    let o = bin(&["price", "--scheme", "qem", "--K", "2", "--case", "I", "--paths", "10", "--reps", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("K"));
    let o = bin(&["varswap", "--scheme", "ge", "--periods", "4", "--case", "IV"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_name_the_field() {
    let p = temp_file("bad.toml", "[model]\ncase = \"I\"\nxi = -0.5\n");
    let o = bin(&["exact", "--params", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("xi"), "{}", stderr(&o));
    let p = temp_file("typo.toml", "[model]\ncase = \"I\"\nkapa = 1.0\n");
    let o = bin(&["exact", "--params", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("kapa"), "{}", stderr(&o));
}

#[test]
fn flags_and_config_file_build_the_same_experiment() {
    let cli = Cli::try_parse_from([
        "heston-mc", "price", "--case", "IV", "--scheme", "pois-ge", "--K", "2", "--steps", "3", "--paths", "5000",
        "--reps", "7", "--seed", "9", "--strike", "110", "--strike", "120", "--threads", "2",
    ])
    .unwrap();
    let Sub::Price(args) = cli.command else { panic!("price") };
    let from_flags = args.config().unwrap().experiments(ProductType::Call).unwrap();
    let text = "[model]\ncase = \"IV\"\n[product]\nstrikes = [110.0, 120.0]\n\
                [run]\nscheme = \"pois-ge\"\nK = 2\nsteps = 3\npaths = 5000\nreps = 7\nseed = 9\nthreads = 2\n";
    let from_file = ConfigFile::parse(text).unwrap().experiments(ProductType::Call).unwrap();
    assert_eq!(from_flags, from_file);

    let p = temp_file("run.toml", text);
    let cli = Cli::try_parse_from(["heston-mc", "price", "--config", p.to_str().unwrap(), "--seed", "10"]).unwrap();
    let Sub::Price(args) = cli.command else { panic!("price") };
    let overridden = args.config().unwrap().experiments(ProductType::Call).unwrap();
    assert_eq!(overridden[0].seed, 10);
    assert_eq!(overridden[0].configs, from_file[0].configs);
}

#[test]
fn grid_config_runs_every_point() {
    let p = temp_file(
        "grid.toml",
        "[model]\ncase = \"IV\"\n[product]\nstrikes = [100.0, 120.0]\n[run]\nscheme = \"pois-ge\"\nK = 1\n\
         paths = 200\nreps = 2\n[grid]\nxi = [1.0, 0.25]\nkappa = [4.0, 1.0]\n",
    );
    let o = bin(&["price", "--config", p.to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = parse_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[3].case, "IV(xi=1,kappa=1,X=120)");
}
