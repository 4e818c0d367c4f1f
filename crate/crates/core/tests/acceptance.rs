//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sagsense::channel::ChannelSet;
use sagsense::harness::{
    compare_with_oracle, parse_config, run_experiment, run_trace, trial_channels, ExperimentSpec, ResultRecord, Sweep,
};
use sagsense::numerics::{cosine_similarity, norm_sqr, solve_shifted, ComplexMatrix, ComplexVector};
use sagsense::optimizer::{
    random_pair, update_auxiliary, update_receive, update_transmit, OptimizerConfig, Strategy,
};
use sagsense::sensing::{build_sinr_parts, surrogate_f2, NoiseModel};

const ALTITUDES: [f64; 4] = [300.0, 500.0, 800.0, 1100.0];

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn paper_default() -> ExperimentSpec {
    parse_config(config("paper_default.cfg")).expect("paper_default.cfg parses")
}

/// Mean final SINR in dB per (sweep value, strategy).
fn means(records: &[ResultRecord]) -> BTreeMap<(u64, Strategy), f64> {
    let mut acc: BTreeMap<(u64, Strategy), (f64, usize)> = BTreeMap::new();
    for r in records {
        let e = acc.entry((r.sweep_value.to_bits(), r.strategy)).or_default();
        e.0 += r.final_sinr_db;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, n))| (k, s / n as f64)).collect()
}

fn mean_at(m: &BTreeMap<(u64, Strategy), f64>, value: f64, s: Strategy) -> f64 {
    m[&(value.to_bits(), s)]
}

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!("criterion {id:>2} {:<4} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn convergence(report: &mut Report) {
    let mut spec = paper_default();
    spec.sweep = Sweep::None;
    let start = Instant::now();
    let traces: Vec<_> = (0..spec.trials).map(|t| run_trace(&spec, t).expect("joint run")).collect();
    let elapsed = start.elapsed().as_secs_f64();
    let mut iters: Vec<usize> = traces.iter().map(|t| t.iterations()).collect();
    iters.sort_unstable();
    let median = iters[iters.len() / 2];
    let max = *iters.last().unwrap();
    let monotone = traces.iter().all(|t| t.is_non_decreasing(1e-9));
    report.line(
        1,
        "convergence speed",
        median <= 5 && max <= 10 && monotone && elapsed < 10.0 && traces.len() == 100,
        format!("{} runs, median {median}, max {max} iterations, monotone {monotone}, {elapsed:.2} s", traces.len()),
    );
}

fn sweeps(report: &mut Report) {
    let spec = paper_default();
    assert_eq!(spec.sweep, Sweep::Altitude(ALTITUDES.to_vec()));
    let run = run_experiment(&spec).expect("altitude sweep");
    let m = means(&run.records);
    let clean = run.failures.is_empty();

    let [j, ro, to, r] = [Strategy::Joint, Strategy::ReceiveOnly, Strategy::TransmitOnly, Strategy::Random]
        .map(|s| mean_at(&m, ALTITUDES[0], s));
    report.line(
        2,
        "strategy ordering",
        clean && spec.trials >= 100 && j >= ro && ro >= to && to >= r && ro - r > 3.0,
        format!("joint {j:.3} ≥ receive_only {ro:.3} ≥ transmit_only {to:.3} ≥ random {r:.3} dB, RO−R {:.3} dB", ro - r),
    );

    let joint: Vec<f64> = ALTITUDES.iter().map(|&a| mean_at(&m, a, Strategy::Joint)).collect();
    let mono: Vec<f64> = ALTITUDES.iter().map(|&a| mean_at(&m, a, Strategy::Transceiving)).collect();
    let above = joint.iter().zip(&mono).all(|(j, t)| j > t);
    let decreasing = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    report.line(
        3,
        "bistatic vs transceiving",
        clean && above && decreasing(&joint) && decreasing(&mono),
        format!("joint {} dB, transceiving {} dB", fmt_list(&joint), fmt_list(&mono)),
    );

    let gaps: Vec<f64> = ALTITUDES
        .iter()
        .map(|&a| mean_at(&m, a, Strategy::Joint) - mean_at(&m, a, Strategy::ReceiveOnly))
        .collect();
    let rises: Vec<f64> = gaps.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > 0.0).collect();
    let narrowing = rises.is_empty() || (rises.len() == 1 && rises[0] <= 0.1);
    report.line(
        4,
        "receive-only gap narrows",
        clean && narrowing,
        format!("joint − receive_only {} dB", fmt_list(&gaps)),
    );
}

fn power_antennas(report: &mut Report) {
    let antennas = [4usize, 8, 16, 32];
    let powers = [0.1, 1.0, 10.0];
    let mut table = Vec::new();
    let mut clean = true;
    for p in powers {
        let mut spec = paper_default();
        spec.sweep = Sweep::Antennas(antennas.to_vec());
        spec.strategies = vec![Strategy::Joint];
        spec.opt.power = p;
        let run = run_experiment(&spec).expect("antenna sweep");
        clean &= run.failures.is_empty();
        let m = means(&run.records);
        table.push(antennas.map(|n| mean_at(&m, n as f64, Strategy::Joint)));
    }
    let in_mt = table.iter().all(|row| row.windows(2).all(|w| w[1] > w[0]));
    let in_p = (0..antennas.len()).all(|i| table.windows(2).all(|w| w[1][i] > w[0][i]));
    let gain = |row: &[f64; 4]| row[3] - row[0];
    let (lo, hi) = (gain(&table[0]), gain(&table[2]));
    report.line(
        5,
        "power/antenna interaction",
        clean && in_mt && in_p && hi >= lo,
        format!("monotone in M_t {in_mt}, in P_t {in_p}; 4→32 gain {hi:.3} dB at 10 W vs {lo:.3} dB at 0.1 W"),
    );
}

fn fmt_list(v: &[f64]) -> String {
    format!("[{}]", v.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>().join(", "))
}

/// Randomised scenario: sizes, altitude and path-loss scale vary with `i`.
fn random_instance(i: usize) -> (ChannelSet, NoiseModel, OptimizerConfig, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0000 + i as u64);
    let mut spec = paper_default();
    spec.sweep = Sweep::None;
    spec.base_seed = rng.random();
    spec.scenario.num_aircraft = rng.random_range(1..=6);
    spec.scenario.tx_antennas = rng.random_range(1..=16);
    spec.scenario.rx_antennas = rng.random_range(1..=8);
    spec.scenario.satellite[2] = rng.random_range(300.0..1100.0);
    let beta = [1.0, 1e3, 1e5, 1e6][rng.random_range(0..4)];
    spec.prop.beta0_s2a = beta;
    spec.prop.beta0_a2g = beta;
    spec.opt.power = [0.1, 1.0, 10.0][rng.random_range(0..3)];
    let setup = trial_channels(&spec, 0.0, 0).expect("channels");
    (setup.channels, spec.noise, setup.opt, rng)
}

/// Echo of aircraft `k` at the receive array, `h_b (h_s t)`.
fn echo(ch: &ChannelSet, k: usize, t: &[Complex64]) -> ComplexVector {
    let g: Complex64 = ch.h_s[k].iter().zip(t).map(|(h, x)| h * x).sum();
    ch.h_b[k].iter().map(|h| h * g).collect()
}

/// SINR straight from the echoes, no matrices.
fn direct_sinr(ch: &ChannelSet, t: &[Complex64], u: &[Complex64], sigma2: f64) -> f64 {
    let proj = |k: usize| -> f64 {
        echo(ch, k, t)
            .iter()
            .zip(u)
            .map(|(a, w)| w.conj() * a)
            .sum::<Complex64>()
            .norm_sqr()
    };
    let rest: f64 = (1..ch.num_aircraft()).map(proj).sum();
    proj(0) / (rest + sigma2 * norm_sqr(u))
}

fn receive_oracle(report: &mut Report) {
    let mut worst = f64::INFINITY;
    for i in 0..1000 {
        let (ch, noise, cfg, mut rng) = random_instance(i);
        let pair = random_pair(&mut rng, ch.tx_antennas(), ch.rx_antennas(), cfg.power);
        let parts = build_sinr_parts(&ch, &pair.t, noise, 0).unwrap();
        let u = update_receive(&parts, cfg.pd_floor).unwrap();

        let mr = ch.rx_antennas();
        let echoes: Vec<_> = (0..ch.num_aircraft()).map(|k| echo(&ch, k, &pair.t)).collect();
        let d = ComplexMatrix::from_fn(mr, mr, |r, c| {
            let interference: Complex64 = echoes[1..].iter().map(|a| a[r] * a[c].conj()).sum();
            interference + if r == c { noise.sigma2 } else { 0.0 }
        });
        let closed_form = solve_shifted(&d, 0.0, &echoes[0]).unwrap();
        worst = worst.min(cosine_similarity(&u, &closed_form));
    }
    report.line(
        6,
        "closed-form receive filter",
        worst >= 1.0 - 1e-8,
        format!("1000 scenarios, worst cosine similarity 1 − {:.3e}", 1.0 - worst),
    );
}

fn kkt(report: &mut Report) {
    let (mut worst_residual, mut worst_power, mut active) = (0.0f64, 0.0f64, 0usize);
    let mut ok = true;
    for i in 0..1000 {
        let (ch, noise, cfg, mut rng) = random_instance(i);
        let start = random_pair(&mut rng, ch.tx_antennas(), ch.rx_antennas(), cfg.power);
        let varpi = update_auxiliary(&ch, &start.t, &start.u, noise, 0).unwrap();
        let up = update_transmit(&ch, &start.u, varpi, &cfg, 0).unwrap();

        // q = u^H A_0 and r_k = u^H A_k, built from the links.
        let row = |k: usize| -> ComplexVector {
            let g: Complex64 = start.u.iter().zip(&ch.h_b[k]).map(|(w, h)| w.conj() * h).sum();
            ch.h_s[k].iter().map(|h| g * h).collect()
        };
        let q = row(0);
        let rs: Vec<_> = (1..ch.num_aircraft()).map(row).collect();
        let w2 = varpi.norm_sqr();
        let mt = ch.tx_antennas();
        let lhs: ComplexVector = (0..mt).map(|m| varpi * q[m].conj()).collect();
        let residual: f64 = (0..mt)
            .map(|m| {
                let xi_t: Complex64 = rs
                    .iter()
                    .map(|r| r[m].conj() * r.iter().zip(&up.t).map(|(a, b)| a * b).sum::<Complex64>())
                    .sum::<Complex64>()
                    * w2;
                (lhs[m] - xi_t - up.t[m] * up.lambda).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        let rel = residual / norm_sqr(&lhs).sqrt();
        worst_residual = worst_residual.max(rel);
        ok &= rel <= 1e-8;

        let p = norm_sqr(&up.t);
        if up.lambda > 0.0 {
            active += 1;
            worst_power = worst_power.max((p / cfg.power - 1.0).abs());
            ok &= p >= cfg.power * (1.0 - 1e-6) && p <= cfg.power * (1.0 + 1e-8);
        } else {
            ok &= p <= cfg.power * (1.0 + 1e-8);
        }
    }
    report.line(
        7,
        "KKT certificate",
        ok,
        format!("1000 scenarios ({active} active), worst relative residual {worst_residual:.3e}, worst power error {worst_power:.3e}"),
    );
}

fn brute_force(report: &mut Report) {
    let spec = parse_config(config("oracle_small.cfg")).unwrap();
    assert_eq!((spec.scenario.tx_antennas, spec.scenario.rx_antennas, spec.scenario.num_aircraft), (2, 2, 2));
    let start = Instant::now();
    let rows = compare_with_oracle(&spec, 64).expect("oracle comparison");
    let elapsed = start.elapsed().as_secs_f64();
    let worst = rows.iter().map(|r| r.ratio()).fold(f64::INFINITY, f64::min);
    report.line(
        8,
        "brute-force equivalence",
        rows.len() == 50 && worst >= 0.98 && elapsed < 60.0,
        format!("{} instances, worst alternating/oracle {worst:.6}, {elapsed:.2} s", rows.len()),
    );
}

fn tightness(report: &mut Report) {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let (ch, noise, cfg, mut rng) = random_instance(i);
        let pair = random_pair(&mut rng, ch.tx_antennas(), ch.rx_antennas(), cfg.power);
        let varpi = update_auxiliary(&ch, &pair.t, &pair.u, noise, 0).unwrap();
        let f2 = surrogate_f2(&ch, &pair.t, &pair.u, varpi, noise, 0).unwrap();
        let s = direct_sinr(&ch, &pair.t, &pair.u, noise.sigma2);
        worst = worst.max((f2 - s).abs() / s);
    }
    report.line(
        9,
        "quadratic-transform tightness",
        worst <= 1e-10,
        format!("1000 pairs, worst relative gap {worst:.3e}"),
    );
}

fn strip_wall_time(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.rsplit_once(',').map(|(head, _)| head.to_string()).unwrap_or_default())
        .collect()
}

fn determinism(report: &mut Report) {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let outputs: Vec<_> = dirs
        .iter()
        .map(|d| {
            let status = Command::new(env!("CARGO_BIN_EXE_sagsense"))
                .args(["run", config("paper_default.cfg").to_str().unwrap(), "--seed", "42", "--out"])
                .arg(d.path())
                .output()
                .expect("spawn CLI");
            assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
            std::fs::read_to_string(d.path().join("results.csv")).unwrap()
        })
        .collect();
    let (a, b) = (strip_wall_time(&outputs[0]), strip_wall_time(&outputs[1]));
    report.line(
        10,
        "determinism",
        a == b && a.len() > 1,
        format!("{} rows, identical modulo wall time: {}", a.len().saturating_sub(1), a == b),
    );
}

fn main() {
    let mut report = Report { failed: 0 };
    convergence(&mut report);
    sweeps(&mut report);
    power_antennas(&mut report);
    receive_oracle(&mut report);
    kkt(&mut report);
    brute_force(&mut report);
    tightness(&mut report);
    determinism(&mut report);
    if report.failed > 0 {
        println!("{} acceptance criteria failed", report.failed);
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
