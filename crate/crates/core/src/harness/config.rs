use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::codec::DEFAULT_SCAN_LIMIT;
use crate::error::{Error, Result};
use crate::prob::{Dist, JointDist, Kernel, PROB_TOL};
use crate::region::InnerCandidate;
use crate::typicality::AuditMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Region,
    Simulate,
    TypicalityAudit,
    PackingProbe,
    AepAudit,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Region => "region",
            Kind::Simulate => "simulate",
            Kind::TypicalityAudit => "typicality-audit",
            Kind::PackingProbe => "packing-probe",
            Kind::AepAudit => "aep-audit",
        }
    }

    pub fn all() -> [Kind; 5] {
        [
            Kind::Region,
            Kind::Simulate,
            Kind::TypicalityAudit,
            Kind::PackingProbe,
            Kind::AepAudit,
        ]
    }
}

/// Source, channel and auxiliary kernels. Kernel rows are listed row-major over
/// the conditioning symbols in subscript order, e.g. `channel` rows are keyed
/// by `(x, y')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub p_u: Vec<f64>,
    pub p_x: Vec<f64>,
    /// `W_{Y|X,Y'}`
    pub channel: Vec<Vec<f64>>,
    /// `P_{W|U,X}`
    pub p_w_given_ux: Vec<Vec<f64>>,
    /// `P_{V|Y,X,W}`
    pub p_v_given_yxw: Vec<Vec<f64>>,
    #[serde(default)]
    pub y0: usize,
    /// Flat pmf over `(U, X, Y', Y, V)`. Defaults to the candidate's marginal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        let q = 0.44;
        InstanceSpec {
            p_u: vec![0.5, 0.5],
            p_x: vec![0.5, 0.5],
            channel: vec![
                vec![0.78, 0.22],
                vec![0.7, 0.3],
                vec![0.3, 0.7],
                vec![0.22, 0.78],
            ],
            p_w_given_ux: vec![vec![1.0 - q, q], vec![1.0 - q, q], vec![q, 1.0 - q], vec![q, 1.0 - q]],
            p_v_given_yxw: (0..8)
                .map(|r| if r % 2 == 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] })
                .collect(),
            y0: 0,
            target: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceSizes {
    pub u: usize,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub v: usize,
}

fn check_pmf(name: &str, row: &[f64], len: usize, errs: &mut Vec<String>) {
    if row.len() != len {
        errs.push(format!("{name}: expected {len} entries, got {}", row.len()));
        return;
    }
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        errs.push(format!("{name}: entries must be finite and nonnegative"));
        return;
    }
    let s: f64 = row.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        errs.push(format!("{name}: sums to {s}, not 1"));
    }
}

fn check_rows(name: &str, rows: &[Vec<f64>], n_rows: usize, len: usize, errs: &mut Vec<String>) {
    if rows.len() != n_rows {
        errs.push(format!("{name}: expected {n_rows} rows, got {}", rows.len()));
        return;
    }
    for (i, r) in rows.iter().enumerate() {
        check_pmf(&format!("{name} row {i}"), r, len, errs);
    }
}

impl InstanceSpec {
    pub fn sizes(&self) -> InstanceSizes {
        let first = |rows: &[Vec<f64>]| rows.first().map_or(0, Vec::len);
        InstanceSizes {
            u: self.p_u.len(),
            x: self.p_x.len(),
            y: first(&self.channel),
            w: first(&self.p_w_given_ux),
            v: first(&self.p_v_given_yxw),
        }
    }

    fn check(&self, errs: &mut Vec<String>) {
        let s = self.sizes();
        for (name, len) in [("instance.p_u", s.u), ("instance.p_x", s.x), ("instance.channel", s.y)] {
            if len == 0 {
                errs.push(format!("{name}: empty alphabet"));
            }
        }
        if s.w == 0 {
            errs.push("instance.p_w_given_ux: empty alphabet".into());
        }
        if s.v == 0 {
            errs.push("instance.p_v_given_yxw: empty alphabet".into());
        }
        if !errs.is_empty() {
            return;
        }
        check_pmf("instance.p_u", &self.p_u, s.u, errs);
        check_pmf("instance.p_x", &self.p_x, s.x, errs);
        check_rows("instance.channel", &self.channel, s.x * s.y, s.y, errs);
        check_rows("instance.p_w_given_ux", &self.p_w_given_ux, s.u * s.x, s.w, errs);
        check_rows("instance.p_v_given_yxw", &self.p_v_given_yxw, s.y * s.x * s.w, s.v, errs);
        if self.y0 >= s.y {
            errs.push(format!("instance.y0: state {} out of range for |Y| = {}", self.y0, s.y));
        }
        if let Some(t) = &self.target {
            check_pmf("instance.target", t, s.u * s.x * s.y * s.y * s.v, errs);
        }
    }

    pub fn p_x_dist(&self) -> Result<Dist> {
        Dist::new(self.p_x.clone())
    }

    pub fn channel_kernel(&self) -> Result<Kernel> {
        let s = self.sizes();
        Kernel::new(&[s.x, s.y], s.y, self.channel.clone())
    }

    pub fn candidate(&self) -> Result<InnerCandidate> {
        let s = self.sizes();
        Ok(InnerCandidate {
            p_u: Dist::new(self.p_u.clone())?,
            p_x: self.p_x_dist()?,
            p_w_given_ux: Kernel::new(&[s.u, s.x], s.w, self.p_w_given_ux.clone())?,
            channel: self.channel_kernel()?,
            p_v_given_yxw: Kernel::new(&[s.y, s.x, s.w], s.v, self.p_v_given_yxw.clone())?,
        })
    }

    pub fn target_joint(&self) -> Result<Option<JointDist>> {
        let s = self.sizes();
        self.target
            .as_ref()
            .map(|t| JointDist::new(vec![s.u, s.x, s.y, s.y, s.v], t.clone()))
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub n: Vec<usize>,
    pub blocks: Vec<usize>,
    pub rate: Vec<f64>,
    pub eps: Vec<f64>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            n: vec![100, 300],
            blocks: vec![30],
            rate: vec![0.03],
            eps: vec![0.05, 0.1, 0.2],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    /// Auxiliary alphabet sizes to search. Defaults to `|U|·|X|`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_size: Option<Vec<usize>>,
    pub budget: usize,
    pub starts: usize,
}

impl Default for RegionSpec {
    fn default() -> Self {
        RegionSpec {
            w_size: None,
            budget: 200,
            starts: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub mode: AuditMode,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl Default for AuditSpec {
    fn default() -> Self {
        AuditSpec {
            mode: AuditMode::Auto,
            samples: 200_000,
            delta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSpec {
    pub scan_limit: u64,
    /// Re-run the encoder with a perturbed source block on every trial.
    pub causality_check: bool,
}

impl Default for SchemeSpec {
    fn default() -> Self {
        SchemeSpec {
            scan_limit: DEFAULT_SCAN_LIMIT,
            causality_check: true,
        }
    }
}

fn default_trials() -> usize {
    20
}

fn default_output() -> String {
    "mcoord-out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_output")]
    pub output_path: String,
    #[serde(default)]
    pub instance: InstanceSpec,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default)]
    pub region: RegionSpec,
    #[serde(default)]
    pub audit: AuditSpec,
    #[serde(default)]
    pub scheme: SchemeSpec,
}

impl ExperimentConfig {
    pub fn defaults(kind: Kind) -> Self {
        let mut cfg = ExperimentConfig {
            kind,
            trials: default_trials(),
            master_seed: 0,
            output_path: default_output(),
            instance: InstanceSpec::default(),
            sweep: SweepSpec::default(),
            region: RegionSpec::default(),
            audit: AuditSpec::default(),
            scheme: SchemeSpec::default(),
        };
        match kind {
            Kind::Region => cfg.trials = 1,
            Kind::TypicalityAudit => cfg.sweep.n = vec![1000, 10_000],
            Kind::AepAudit => {
                cfg.trials = 1;
                cfg.sweep.n = vec![8];
                cfg.sweep.eps = vec![0.3, 0.45];
            }
            Kind::PackingProbe => {
                cfg.trials = 100;
                cfg.sweep.n = vec![300, 600];
                cfg.sweep.rate = vec![0.0246];
                cfg.sweep.eps = vec![0.25];
            }
            Kind::Simulate => {}
        }
        cfg
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.trials == 0 {
            errs.push("trials: must be >= 1".into());
        }
        self.instance.check(&mut errs);
        let needs = |k: &[Kind]| k.contains(&self.kind);
        let sw = &self.sweep;
        if needs(&[Kind::Simulate, Kind::TypicalityAudit, Kind::AepAudit, Kind::PackingProbe]) {
            if sw.n.is_empty() {
                errs.push("sweep.n: empty".into());
            }
            if sw.n.contains(&0) {
                errs.push("sweep.n: block lengths must be >= 1".into());
            }
            if sw.eps.is_empty() {
                errs.push("sweep.eps: empty".into());
            }
            if sw.eps.iter().any(|e| !(*e > 0.0)) {
                errs.push("sweep.eps: values must be > 0".into());
            }
        }
        if needs(&[Kind::Simulate, Kind::PackingProbe]) {
            if sw.rate.is_empty() {
                errs.push("sweep.rate: empty".into());
            }
            if sw.rate.iter().any(|r| !(*r >= 0.0)) {
                errs.push("sweep.rate: values must be >= 0".into());
            }
        }
        if needs(&[Kind::Simulate]) {
            if sw.blocks.is_empty() {
                errs.push("sweep.blocks: empty".into());
            }
            if sw.blocks.iter().any(|&b| b < 2) {
                errs.push("sweep.blocks: values must be >= 2".into());
            }
        }
        if let Some(ws) = &self.region.w_size {
            if ws.is_empty() || ws.contains(&0) {
                errs.push("region.w_size: must be a nonempty list of sizes >= 1".into());
            }
        }
        if self.region.starts == 0 {
            errs.push("region.starts: must be >= 1".into());
        }
        if self.audit.samples == 0 {
            errs.push("audit.samples: must be >= 1".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation { fields: errs })
        }
    }

    pub fn w_sizes(&self) -> Vec<usize> {
        self.region.w_size.clone().unwrap_or_else(|| {
            let s = self.instance.sizes();
            vec![s.u * s.x]
        })
    }

    /// SHA-256 of the canonical serialization; key order in the source file
    /// does not matter.
    pub fn hash(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        let text = serde_json::to_string(&value).expect("config serializes");
        hex(&Sha256::digest(text.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_toml_str(&text)
}
