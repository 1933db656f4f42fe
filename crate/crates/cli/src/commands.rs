use std::fmt::Write as _;
use std::fs::File;
use std::io::BufWriter;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use neoqec_core::dataset::write_dataset;
use neoqec_core::lattice::{sample_errors, CodeLayout, LsSchedule, NoiseParams, Shape, Timeline};
use neoqec_core::mwpm::{mwpm_decode, Solver};
use neoqec_core::nn::{base_model_specs, load_weights, ConvNet};
use neoqec_core::online::{run_pipeline, DecoderContext, OnlineConfig};
use neoqec_core::rng::trial_rng;
use neoqec_npu::cells::CellCounts;
use neoqec_npu::power::CSV_HEADER as POWER_CSV_HEADER;
use neoqec_npu::sim::min_counter_bits;
use neoqec_npu::{
    decoder_power_report, npu_cost, npu_simulate_with_fault, popcount_oracle, throughput_check, Fault, PowerParams,
};

use crate::config::{DecoderKind, ExperimentConfig, Mode, ReportFormat};
use crate::stats::{rows_to_csv, ResultRow};
use crate::CliError;

/// Run one command. The returned bytes go to `output_path` or stdout, except
/// for `gen-data`, which writes the dataset itself and returns a summary line.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    match cfg.mode {
        Mode::GenData => cmd_gen_data(cfg),
        Mode::Decode | Mode::Sweep => Ok(rows_to_csv(&cmd_sweep(cfg, false)?).into_bytes()),
        Mode::LsDecode => Ok(rows_to_csv(&cmd_sweep(cfg, true)?).into_bytes()),
        Mode::NpuVerify => cmd_npu_verify(cfg).map(String::into_bytes),
        Mode::Power => cmd_power(cfg).map(String::into_bytes),
    }
}

pub fn memory_timeline(d: usize, cycles: usize) -> Result<Timeline, CliError> {
    Ok(Timeline::memory(CodeLayout::build(d, Shape::Single)?, cycles)?)
}

pub fn surgery_timeline(d: usize) -> Result<Timeline, CliError> {
    Ok(Timeline::lattice_surgery(
        CodeLayout::build(d, Shape::MergedRough)?,
        LsSchedule::standard(d),
    )?)
}

fn context(cfg: &ExperimentConfig, tl: Timeline) -> Result<DecoderContext, CliError> {
    let d = tl.layout().d();
    let mut oc = OnlineConfig::for_distance(d);
    oc.th_v = cfg.th_v;
    oc.time_weight = cfg.time_weight;
    if let Some(r) = cfg.r_max {
        oc.r_max = r;
    }
    DecoderContext::new(tl, oc).map_err(|e| CliError::Config(e.to_string()))
}

fn load_net(cfg: &ExperimentConfig) -> Result<Option<ConvNet>, CliError> {
    let Some(path) = &cfg.weights_path else {
        return Ok(None);
    };
    let net = load_weights(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    net.check_decoder()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Some(net))
}

#[derive(Clone, Copy)]
pub enum Decoder<'a> {
    Greedy(Option<&'a ConvNet>),
    Mwpm,
}

/// Failures among trials `0..trials` of `(seed, p)`. Trials run in parallel;
/// the result does not depend on scheduling.
pub fn count_failures(ctx: &DecoderContext, p: f64, seed: u64, trials: u64, decoder: Decoder) -> Result<u64, CliError> {
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| {
            let e = sample_errors(&ctx.timeline, &NoiseParams::new(p, seed, i))?;
            let r = match decoder {
                Decoder::Greedy(net) => run_pipeline(ctx, &e, net)?,
                Decoder::Mwpm => mwpm_decode(ctx, &e, Solver::Auto)?,
            };
            Ok(r.failed())
        })
        .collect::<Result<Vec<bool>, CliError>>()?;
    Ok(outcomes.into_iter().filter(|&f| f).count() as u64)
}

fn cmd_sweep(cfg: &ExperimentConfig, surgery: bool) -> Result<Vec<ResultRow>, CliError> {
    let net = load_net(cfg)?;
    let decoder = match cfg.decoder {
        DecoderKind::Greedy => Decoder::Greedy(net.as_ref()),
        DecoderKind::Mwpm => Decoder::Mwpm,
    };
    let mut rows = Vec::new();
    for &d in &cfg.d {
        let tl = if surgery {
            surgery_timeline(d)?
        } else {
            memory_timeline(d, cfg.cycles.unwrap_or(d))?
        };
        let ctx = context(cfg, tl)?;
        for &p in &cfg.p {
            let start = Instant::now();
            let failures = count_failures(&ctx, p, cfg.seed, cfg.trials, decoder)?;
            let wall = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            rows.push(ResultRow::new(d, p, cfg.trials, failures, wall));
        }
    }
    Ok(rows)
}

fn cmd_gen_data(cfg: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let d = cfg.d[0];
    let tl = if cfg.merged {
        surgery_timeline(d)?
    } else {
        memory_timeline(d, cfg.cycles.unwrap_or(d))?
    };
    let path = cfg.output_path.as_ref().expect("validated");
    let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write_dataset(&tl, cfg.k, cfg.p[0], cfg.seed, cfg.records, BufWriter::new(file)).map_err(|e| match e {
        neoqec_core::dataset::DatasetError::Io(e) => CliError::Io(format!("{}: {e}", path.display())),
        other => CliError::Config(other.to_string()),
    })?;
    Ok(format!("wrote {} records to {}\n", cfg.records, path.display()).into_bytes())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyTally {
    pub cases: u64,
    pub mismatches: u64,
}

/// Fuzz the cycle model against the popcount oracle. Case `i` draws fan-in
/// `N <= 512`, both streams, a threshold and a counter wide enough for it.
pub fn fuzz_npu(cases: u64, seed: u64, fault: Fault) -> VerifyTally {
    let mismatches = (0..cases)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = trial_rng(seed, i);
            let n = rng.gen_range(0..=512usize);
            let w: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let x: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let t = rng.gen_range(0..=n);
            let k = min_counter_bits(n, t) + rng.gen_range(0..3);
            let run = npu_simulate_with_fault(&w, &x, t, k, fault).expect("arguments satisfy the precondition");
            run.activation != popcount_oracle(&w, &x, t) || run.cycles != n + 2
        })
        .count() as u64;
    VerifyTally { cases, mismatches }
}

fn cmd_npu_verify(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let tally = fuzz_npu(cfg.cases, cfg.seed, cfg.inject_fault);
    let cost = npu_cost(9);
    let mut s = String::new();
    writeln!(s, "cases={}", tally.cases).unwrap();
    writeln!(s, "mismatches={}", tally.mismatches).unwrap();
    writeln!(s, "fault={:?}", cfg.inject_fault).unwrap();
    writeln!(s, "k={}", cost.k).unwrap();
    writeln!(s, "jj_total={}", cost.jj_total).unwrap();
    writeln!(s, "bias_total_ma={}", cost.bias_total_ma).unwrap();
    writeln!(s, "latency_ps={}", cost.latency_ps).unwrap();
    writeln!(s, "fmax_ghz={:.2}", cost.fmax_ghz).unwrap();
    writeln!(s, "fmax_class_ghz={}", cost.fmax_class_ghz()).unwrap();
    writeln!(s, "counter_bias_ma={:.3}", CellCounts::counter(9).bias_ma()).unwrap();
    if tally.mismatches == 0 {
        s.push_str("result=pass\n");
        Ok(s)
    } else {
        s.push_str("result=fail\n");
        Err(CliError::Verify(s))
    }
}

fn cmd_power(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let d = cfg.d[0];
    let params = PowerParams {
        f_npu_ghz: cfg.f_npu_ghz,
        p_stage2_uw: cfg.p_stage2_uw,
        budget_w: cfg.budget_w,
    };
    let r = decoder_power_report(d, params).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(match cfg.format {
        ReportFormat::Csv => format!("{POWER_CSV_HEADER}\n{}\n", r.csv_row()),
        ReportFormat::KeyValue => {
            let th = throughput_check(&base_model_specs(cfg.k), d, cfg.f_npu_ghz, cfg.budget_us);
            let mut s = r.to_key_values();
            writeln!(s, "mults_per_npu={}", th.mults_required).unwrap();
            writeln!(s, "mults_total={}", th.mults_required * th.npu_count).unwrap();
            writeln!(s, "cycles_available={}", th.cycles_available).unwrap();
            writeln!(s, "throughput_feasible={}", th.feasible).unwrap();
            s
        }
    })
}
