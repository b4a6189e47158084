use lscheme::group::Group;
use lscheme::scheme::SchemeWindow;
use serde::Serialize;

use crate::build::build;
use crate::config::{GroupConfig, RunConfig};
use crate::ops::{bernoulli_stage, cocycle_stage, dihedral_stage, lift_stage, rearrange_stage, verify_stage, Stage};
use crate::{with_window, CliError};

/// Everything one pipeline run produced, in stage order.
#[derive(Debug, Serialize)]
pub struct PipelineReport {
    pub config: RunConfig,
    pub stages: Vec<Stage>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<String>,
}

impl PipelineReport {
    fn push(&mut self, stage: Stage) -> bool {
        let ok = stage.pass;
        if !ok && self.failed_stage.is_none() {
            self.failed_stage = Some(stage.name.clone());
        }
        self.pass &= ok;
        self.stages.push(stage);
        ok
    }
}

fn stage_or_fail<T>(name: &str, r: Result<(Stage, T), lscheme::Error>) -> (Stage, Option<T>) {
    match r {
        Ok((s, t)) => (s, Some(t)),
        Err(e) => (Stage::failed(name, &e), None),
    }
}

fn downstream<G: Group>(w: &SchemeWindow<G>, cfg: &RunConfig, out: &mut PipelineReport) {
    if !out.push(verify_stage(w, &cfg.verify)) {
        return;
    }
    let (stage, f) = stage_or_fail("rearrange", rearrange_stage(w, cfg.verify.shift_bound));
    if !out.push(stage) {
        return;
    }
    let f = f.expect("stage passed");
    let stage = cocycle_stage(&f).unwrap_or_else(|e| Stage::failed("cocycle", &e));
    if !out.push(stage) {
        return;
    }
    let stage = match bernoulli_stage(&f, &cfg.bernoulli, cfg.seed) {
        Ok(s) => s,
        Err(CliError::Lib(e)) => Stage::failed("bernoulli", &e),
        Err(e) => Stage::failed("bernoulli", &lscheme::Error::Validation(e.to_string())),
    };
    if !out.push(stage) {
        return;
    }
    if let Some(lift) = &cfg.lift {
        let (stage, _) = stage_or_fail("lift", lift_stage(w, lift, cfg.verify.shift_bound, cfg.seed));
        out.push(stage);
    }
}

/// `build → verify → rearrange → cocycle → bernoulli → lift`, stopping at
/// the first failing stage. Dihedral runs its diagnostics instead.
pub fn run_pipeline(cfg: &RunConfig) -> Result<PipelineReport, CliError> {
    let mut out = PipelineReport { config: cfg.clone(), stages: Vec::new(), pass: true, failed_stage: None };
    if cfg.group == GroupConfig::Dihedral {
        let stage = dihedral_stage(&cfg.dihedral, cfg.seed).unwrap_or_else(|e| Stage::failed("dihedral", &e));
        out.push(stage);
        return Ok(out);
    }
    let built = build(cfg)?;
    let mut stage = Stage::new("build", built.tower.unwrap_or_default()).with_data(built.data);
    stage.data = serde_json::json!({ "sizes": with_window!(&built.window, w => w.sets.iter().map(|e| e.len()).collect::<Vec<_>>()), "construction": stage.data });
    if !out.push(stage) {
        return Ok(out);
    }
    with_window!(&built.window, w => downstream(w, cfg, &mut out));
    Ok(out)
}
