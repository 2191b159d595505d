//! Preset comparison tables: option tables per case, variance-swap tables
//! and the Case IV parameter grid.

use std::fmt::Write as _;
use std::str::FromStr;

use heston_mc::harness::{run_experiment, ExperimentResult, ExperimentSpec, Product, ResultRow};
use heston_mc::{Case, HestonError, SchemeConfig, SchemeKind};

use crate::config::grid_specs;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchTable {
    Options(Case),
    VarianceSwap(Case),
    Grid,
}

impl FromStr for BenchTable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "opt1" => BenchTable::Options(Case::I),
            "opt2" => BenchTable::Options(Case::II),
            "opt3" => BenchTable::Options(Case::III),
            "opt4" => BenchTable::Options(Case::IV),
            "var3" => BenchTable::VarianceSwap(Case::III),
            "var4" => BenchTable::VarianceSwap(Case::IV),
            "grid4" => BenchTable::Grid,
            _ => return Err(format!("unknown table `{s}` (expected opt1-opt4, var3, var4 or grid4)")),
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchRun {
    pub paths: u64,
    pub reps: u32,
    pub seed: u64,
    pub threads: Option<usize>,
}

const TRUNCATIONS: [u32; 5] = [0, 1, 2, 4, 8];
const IG_STEPS: [u32; 4] = [1, 2, 4, 8];
const SWAP_PERIODS: [u32; 4] = [2, 4, 12, 52];
const GRID_XI: [f64; 3] = [1.0, 0.25, 0.1];
const GRID_KAPPA: [f64; 3] = [4.0, 1.0, 0.1];
const GRID_STRIKES: [f64; 3] = [100.0, 110.0, 120.0];

fn td_steps(case: Case) -> [u32; 3] {
    match case {
        Case::I => [20, 40, 80],
        Case::II => [30, 60, 120],
        Case::III | Case::IV => [2, 4, 8],
    }
}

fn cfg(kind: SchemeKind, k: Option<u32>, n: u32) -> SchemeConfig {
    SchemeConfig::new(kind, k, n).expect("preset configuration is valid")
}

/// Left/right scheme pairs of one option sub-table, keyed by truncation or step count.
struct Section {
    left: Vec<SchemeConfig>,
    right: Vec<SchemeConfig>,
    by_truncation: bool,
}

fn option_sections(case: Case) -> Vec<Section> {
    use SchemeKind::*;
    vec![
        Section {
            left: TRUNCATIONS.iter().map(|&k| cfg(Ge, Some(k), 1)).collect(),
            right: TRUNCATIONS.iter().map(|&k| cfg(PoisGe, Some(k), 1)).collect(),
            by_truncation: true,
        },
        Section {
            left: IG_STEPS.iter().map(|&n| cfg(Ig, None, n)).collect(),
            right: IG_STEPS.iter().map(|&n| cfg(PoisGe, Some(0), n)).collect(),
            by_truncation: false,
        },
        Section {
            left: td_steps(case).iter().map(|&n| cfg(Qem, None, n)).collect(),
            right: td_steps(case).iter().map(|&n| cfg(PoisTd, None, n)).collect(),
            by_truncation: false,
        },
    ]
}

fn grid_configs() -> Vec<SchemeConfig> {
    use SchemeKind::*;
    vec![
        cfg(Ge, Some(1), 1),
        cfg(PoisGe, Some(1), 1),
        cfg(Ig, None, 2),
        cfg(PoisGe, Some(0), 2),
        cfg(Qem, None, 4),
        cfg(PoisTd, None, 4),
    ]
}

/// Experiments behind a table.
pub fn bench_specs(table: BenchTable, run: BenchRun) -> Vec<ExperimentSpec> {
    let finish = |mut s: ExperimentSpec| {
        s.threads = run.threads;
        s
    };
    match table {
        BenchTable::Options(case) => {
            let mut configs: Vec<SchemeConfig> = Vec::new();
            for sec in option_sections(case) {
                for c in sec.left.into_iter().chain(sec.right) {
                    if !configs.contains(&c) {
                        configs.push(c);
                    }
                }
            }
            vec![finish(ExperimentSpec::european(case, configs, run.paths, run.reps, run.seed))]
        }
        BenchTable::VarianceSwap(case) => SWAP_PERIODS
            .iter()
            .map(|&n| {
                let configs = vec![
                    cfg(SchemeKind::Qem, None, n),
                    cfg(SchemeKind::PoisTd, None, n)
                        .with_mode(heston_mc::MartingaleMode::ReturnVariance)
                        .expect("valid mode"),
                ];
                finish(ExperimentSpec::variance_swap(case, configs, n, run.paths, run.reps, run.seed))
            })
            .collect(),
        BenchTable::Grid => {
            let case = Case::IV;
            let mut base = ExperimentSpec::european(case, grid_configs(), run.paths, run.reps, run.seed);
            base.product = Product::EuropeanCall {
                strikes: GRID_STRIKES.to_vec(),
            };
            base.spot = false;
            grid_specs(&finish(base), &GRID_XI, &GRID_KAPPA).expect("preset grid is valid")
        }
    }
}

/// Run every experiment of a table and collect the rows.
pub fn run_bench(table: BenchTable, run: BenchRun) -> Result<ExperimentResult, HestonError> {
    let mut out: Option<ExperimentResult> = None;
    for spec in bench_specs(table, run) {
        let r = run_experiment(&spec)?;
        match &mut out {
            None => out = Some(r),
            Some(acc) => acc.extend(r)?,
        }
    }
    Ok(out.expect("every table has at least one experiment"))
}

fn find<'a>(rows: &'a [ResultRow], case: &str, scheme: &str, c: &SchemeConfig) -> Option<&'a ResultRow> {
    let k = c.kind.truncated().then(|| c.truncation());
    rows.iter()
        .find(|r| r.case == case && r.scheme == scheme && r.n_steps == c.n_steps && r.k == k)
}

fn bias_se(r: Option<&ResultRow>, scale: f64) -> String {
    match r {
        Some(r) => match r.bias {
            Some(b) => format!("{:.3} ({:.3})", b * scale, r.se * scale),
            None => format!("{:.3} ({:.3})", r.estimate * scale, r.se * scale),
        },
        None => "-".into(),
    }
}

fn time(r: Option<&ResultRow>) -> String {
    r.map_or("-".into(), |r| format!("{:.3}", r.wall_seconds))
}

fn step_label(t: f64, n: u32) -> String {
    let h = t / n as f64;
    let inv = n as f64 / t;
    if h < 1.0 && (inv - inv.round()).abs() < 1e-9 {
        format!("1/{}", inv.round())
    } else {
        format!("{h}")
    }
}

fn name(kind: SchemeKind) -> String {
    kind.label().to_uppercase()
}

/// Markdown in the side-by-side layout of the comparison tables.
pub fn render_markdown(table: BenchTable, result: &ExperimentResult) -> String {
    let rows = &result.rows;
    let mut out = String::new();
    match table {
        BenchTable::Options(case) => {
            let label = case.name();
            for sec in option_sections(case) {
                let (l, r) = (name(sec.left[0].kind), name(sec.right[0].kind));
                let r = if sec.right[0].kind == SchemeKind::PoisGe && !sec.by_truncation {
                    format!("{r} (K=0)")
                } else {
                    r
                };
                let key = if sec.by_truncation { "K" } else { "h" };
                let _ = writeln!(
                    out,
                    "| Case {label} N | {key} | {l} Time (s) | {l} Option Bias (SE) | {l} Spot Bias (SE) \
                     | {r} Time (s) | {r} Option Bias (SE) | {r} Spot Bias (SE) |"
                );
                let _ = writeln!(out, "|---:|---:|---:|---:|---:|---:|---:|---:|");
                for (a, b) in sec.left.iter().zip(&sec.right) {
                    let key = if sec.by_truncation {
                        a.truncation().to_string()
                    } else {
                        step_label(case.maturity(), a.n_steps)
                    };
                    let cells = |c: &SchemeConfig| {
                        let opt = find(rows, label, c.kind.label(), c);
                        let spot = find(rows, label, &format!("{}:spot", c.kind.label()), c);
                        format!("{} | {} | {}", time(opt), bias_se(opt, 1.0), bias_se(spot, 1.0))
                    };
                    let _ = writeln!(out, "| {} | {key} | {} | {} |", a.n_steps, cells(a), cells(b));
                }
                out.push('\n');
            }
        }
        BenchTable::VarianceSwap(case) => {
            let label = case.name();
            let _ = writeln!(
                out,
                "| Case {label} N | h | Benchmark (x1e-2) | QEM Time (s) | QEM Bias (SE) (x1e-2) \
                 | POIS-TD Time (s) | POIS-TD Bias (SE) (x1e-2) |"
            );
            let _ = writeln!(out, "|---:|---:|---:|---:|---:|---:|---:|");
            for &n in &SWAP_PERIODS {
                let q = find(rows, label, "qem", &cfg(SchemeKind::Qem, None, n));
                let p = find(rows, label, "pois-td", &cfg(SchemeKind::PoisTd, None, n));
                let bench = q
                    .or(p)
                    .and_then(|r| r.benchmark)
                    .map_or("-".into(), |b| format!("{:.3}", b * 100.0));
                let _ = writeln!(
                    out,
                    "| {n} | {} | {bench} | {} | {} | {} | {} |",
                    step_label(case.maturity(), n),
                    time(q),
                    bias_se(q, 100.0),
                    time(p),
                    bias_se(p, 100.0),
                );
            }
        }
        BenchTable::Grid => {
            let configs = grid_configs();
            let mut head = String::from("| xi | kappa |");
            for c in &configs {
                let _ = write!(head, " {} N={} Time (s) | Sum abs bias |", name(c.kind), c.n_steps);
            }
            let _ = writeln!(out, "{head}");
            let _ = writeln!(out, "|---:|---:|{}", "---:|---:|".repeat(configs.len()));
            for &xi in &GRID_XI {
                for &kappa in &GRID_KAPPA {
                    let _ = write!(out, "| {xi} | {kappa} |");
                    for c in &configs {
                        let mut sum = 0.0;
                        let mut wall = None;
                        for x in GRID_STRIKES {
                            let case = format!("IV(xi={xi},kappa={kappa},X={x})");
                            if let Some(r) = find(rows, &case, c.kind.label(), c) {
                                sum += r.bias.unwrap_or(0.0).abs();
                                wall = Some(r.wall_seconds);
                            }
                        }
                        match wall {
                            Some(w) => {
                                let _ = write!(out, " {w:.3} | {sum:.3} |");
                            }
                            None => out.push_str(" - | - |"),
                        }
                    }
                    out.push('\n');
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_names() {
        assert_eq!("opt3".parse(), Ok(BenchTable::Options(Case::III)));
        assert_eq!("grid4".parse(), Ok(BenchTable::Grid));
        assert!("opt5".parse::<BenchTable>().is_err());
    }

    #[test]
    fn option_table_shares_the_k0_column() {
        let run = BenchRun {
            paths: 10,
            reps: 1,
            seed: 1,
            threads: None,
        };
        let specs = bench_specs(BenchTable::Options(Case::I), run);
        assert_eq!(specs.len(), 1);
        // 5 + 5 + 4 + 3 (POIS-GE K=0 N=1 shared) + 3 + 3
        assert_eq!(specs[0].configs.len(), 23);
        assert_eq!(bench_specs(BenchTable::Grid, run).len(), 9);
        assert_eq!(bench_specs(BenchTable::VarianceSwap(Case::IV), run).len(), 4);
    }

    #[test]
    fn step_labels() {
        assert_eq!(step_label(10.0, 80), "1/8");
        assert_eq!(step_label(15.0, 2), "7.5");
        assert_eq!(step_label(15.0, 8), "1.875");
        assert_eq!(step_label(1.0, 1), "1");
        assert_eq!(step_label(1.0, 52), "1/52");
    }
}
