//! Flat `key=value` experiment configuration.
//!
//! A config file holds one assignment per line; `#` starts a comment. Command
//! line assignments override the file, and `NEOQEC_SEED` overrides both.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::CliError;

pub const SEED_ENV: &str = "NEOQEC_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    GenData,
    Decode,
    LsDecode,
    Sweep,
    NpuVerify,
    Power,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::GenData => "gen-data",
            Mode::Decode => "decode",
            Mode::LsDecode => "ls-decode",
            Mode::Sweep => "sweep",
            Mode::NpuVerify => "npu-verify",
            Mode::Power => "power",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        [
            Mode::GenData,
            Mode::Decode,
            Mode::LsDecode,
            Mode::Sweep,
            Mode::NpuVerify,
            Mode::Power,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| CliError::Config(format!("unknown mode {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Greedy,
    Mwpm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    KeyValue,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub d: Vec<usize>,
    pub k: usize,
    /// Noisy cycles of a memory experiment; defaults to `d`.
    pub cycles: Option<usize>,
    pub p: Vec<f64>,
    pub trials: u64,
    pub records: u64,
    pub seed: u64,
    pub th_v: usize,
    pub r_max: Option<u32>,
    pub time_weight: u32,
    pub decoder: DecoderKind,
    pub merged: bool,
    pub weights_path: Option<PathBuf>,
    pub output_path: Option<PathBuf>,
    pub timing: bool,
    pub cases: u64,
    pub inject_fault: neoqec_npu::Fault,
    pub f_npu_ghz: f64,
    pub p_stage2_uw: f64,
    pub budget_w: f64,
    pub budget_us: f64,
    pub format: ReportFormat,
}

impl ExperimentConfig {
    pub fn defaults(mode: Mode) -> Self {
        Self {
            mode,
            d: vec![3],
            k: 4,
            cycles: None,
            p: vec![0.01],
            trials: 1000,
            records: 1000,
            seed: 1,
            th_v: 2,
            r_max: None,
            time_weight: 1,
            decoder: DecoderKind::Greedy,
            merged: false,
            weights_path: None,
            output_path: None,
            timing: false,
            cases: 10_000,
            inject_fault: neoqec_npu::Fault::None,
            f_npu_ghz: 16.0,
            p_stage2_uw: 400.3,
            budget_w: 1.0,
            budget_us: 1.0,
            format: ReportFormat::KeyValue,
        }
    }

    /// Merge file text, overrides and the seed variable, in that order.
    pub fn load(mode: Mode, file: Option<&str>, overrides: &[String], seed_env: Option<&str>) -> Result<Self, CliError> {
        let mut kv = BTreeMap::new();
        if let Some(text) = file {
            for (n, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap().trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = split_pair(line).map_err(|e| CliError::Config(format!("line {}: {e}", n + 1)))?;
                kv.insert(k, v);
            }
        }
        for o in overrides {
            let (k, v) = split_pair(o).map_err(CliError::Config)?;
            kv.insert(k, v);
        }
        if let Some(s) = seed_env {
            kv.insert("seed".into(), s.trim().to_string());
        }
        let mut cfg = Self::defaults(mode);
        for (k, v) in &kv {
            cfg.set(k, v)
                .map_err(|e| CliError::Config(format!("{k}={v}: {e}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        match key {
            "mode" => {
                let m: Mode = v.parse().map_err(|e: CliError| e.to_string())?;
                if m != self.mode {
                    return Err(format!("config is for {m}, running {}", self.mode));
                }
            }
            "d" => self.d = parse_list(v)?,
            "k" | "K" => self.k = parse(v)?,
            "cycles" | "T_cycles" => self.cycles = Some(parse(v)?),
            "p" => self.p = parse_list(v)?,
            "trials" => self.trials = parse(v)?,
            "records" => self.records = parse(v)?,
            "seed" => self.seed = parse(v)?,
            "th_v" => self.th_v = parse(v)?,
            "r_max" => self.r_max = Some(parse(v)?),
            "time_weight" => self.time_weight = parse(v)?,
            "decoder" => {
                self.decoder = match v {
                    "greedy" => DecoderKind::Greedy,
                    "mwpm" => DecoderKind::Mwpm,
                    _ => return Err("expected greedy or mwpm".into()),
                }
            }
            "shape" => {
                self.merged = match v {
                    "single" => false,
                    "merged" => true,
                    _ => return Err("expected single or merged".into()),
                }
            }
            "weights" | "weights_path" => self.weights_path = Some(PathBuf::from(v)),
            "output" | "output_path" => self.output_path = Some(PathBuf::from(v)),
            "timing" => self.timing = parse_bool(v)?,
            "cases" => self.cases = parse(v)?,
            "inject_fault" => {
                self.inject_fault = match v {
                    "none" => neoqec_npu::Fault::None,
                    "early-readout" => neoqec_npu::Fault::EarlyReadout,
                    "preload" => neoqec_npu::Fault::PreloadOffByOne,
                    _ => return Err("expected none, early-readout or preload".into()),
                }
            }
            "f_npu_ghz" => self.f_npu_ghz = parse(v)?,
            "p_stage2_uw" => self.p_stage2_uw = parse(v)?,
            "budget_w" => self.budget_w = parse(v)?,
            "budget_us" => self.budget_us = parse(v)?,
            "format" => {
                self.format = match v {
                    "kv" => ReportFormat::KeyValue,
                    "csv" => ReportFormat::Csv,
                    _ => return Err("expected kv or csv".into()),
                }
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.d.is_empty() || self.p.is_empty() {
            return bad("d and p need at least one value".into());
        }
        for &d in &self.d {
            if d < 3 || d % 2 == 0 {
                return bad(format!("distance {d} is not an odd number >= 3"));
            }
        }
        for &p in &self.p {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("p={p} outside [0, 1]"));
            }
        }
        let decoding = matches!(self.mode, Mode::Decode | Mode::LsDecode | Mode::Sweep);
        if decoding && self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if matches!(self.mode, Mode::Decode | Mode::LsDecode | Mode::GenData | Mode::Power) && self.d.len() != 1 {
            return bad(format!("{} takes a single distance", self.mode));
        }
        if self.mode == Mode::GenData {
            if self.p.len() != 1 {
                return bad("gen-data takes a single p".into());
            }
            if self.k == 0 {
                return bad("K must be at least 1".into());
            }
            if self.output_path.is_none() {
                return bad("gen-data needs output=FILE".into());
            }
        }
        if self.cycles == Some(0) {
            return bad("cycles must be at least 1".into());
        }
        if let Some(w) = &self.weights_path {
            if decoding && !w.exists() {
                return Err(CliError::Io(format!("weights file {} not found", w.display())));
            }
        }
        Ok(())
    }
}

fn split_pair(s: &str) -> Result<(String, String), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let (k, v) = (k.trim(), v.trim());
    if k.is_empty() {
        return Err(format!("empty key in {s:?}"));
    }
    Ok((k.to_string(), v.to_string()))
}

fn parse<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse {v:?}"))
}

fn parse_list<T: FromStr>(v: &str) -> Result<Vec<T>, String> {
    v.split(',').map(|s| parse(s.trim())).collect()
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => Err("expected 0 or 1".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layering_order() {
        let file = "# memory run\nd = 5\np=0.01,0.02\nseed=3 # trailing\n";
        let cfg = ExperimentConfig::load(Mode::Sweep, Some(file), &["seed=4".into()], None).unwrap();
        assert_eq!((cfg.d.clone(), cfg.p.clone(), cfg.seed), (vec![5], vec![0.01, 0.02], 4));
        let cfg = ExperimentConfig::load(Mode::Sweep, Some(file), &["seed=4".into()], Some("9")).unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_bad_input() {
        let load = |o: &[&str]| {
            let o: Vec<String> = o.iter().map(|s| s.to_string()).collect();
            ExperimentConfig::load(Mode::Decode, None, &o, None)
        };
        for bad in [&["bogus=1"][..], &["d=4"], &["p=1.5"], &["trials=0"], &["d=3,5"], &["noequals"], &["mode=power"]] {
            assert!(matches!(load(bad), Err(CliError::Config(_))), "{bad:?}");
        }
        assert!(matches!(load(&["weights=/nonexistent/w.neow"]), Err(CliError::Io(_))));
        assert!(load(&["decoder=mwpm", "K=3", "T_cycles=2"]).is_ok());
        assert!(ExperimentConfig::load(Mode::GenData, None, &[], None).is_err());
    }
}
