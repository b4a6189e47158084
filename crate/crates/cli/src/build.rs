use lscheme::group::{Abelian, Group, GroupCtx};
use lscheme::nilpotent::{build_heisenberg_scheme, find_heisenberg_direction, nil2_ctx, nil2_tower, BoxParams, MalcevPresentation};
use lscheme::scheme::{require_scheme_capable, VerifyReport};
use lscheme::semidirect::{bs_tower, profile_a, profile_q, tower_check, tower_window, wreath_tower, Profile, TowerInput};
use serde_json::{json, Value};

use crate::any::AnyWindow;
use crate::config::{GroupConfig, Nil2Preset, ProfileName, RunConfig};
use crate::CliError;

/// A built window with the construction's own hypothesis checks.
pub struct Built {
    pub window: AnyWindow,
    /// Tower hypotheses, for tower-built windows.
    pub tower: Option<VerifyReport>,
    pub data: Value,
}

fn profile(p: ProfileName) -> Profile {
    match p {
        ProfileName::Desk => Profile::Desk,
        ProfileName::Paper => Profile::Paper,
    }
}

pub fn presentation(preset: Option<Nil2Preset>, raw: Option<&Value>) -> Result<MalcevPresentation, CliError> {
    match (preset, raw) {
        (Some(_), Some(_)) => Err(CliError::Config("give either a preset or a presentation, not both".into())),
        (_, Some(v)) => Ok(MalcevPresentation::from_json(v)?),
        (Some(Nil2Preset::H3Mu2), None) => Ok(MalcevPresentation::heisenberg(2)),
        (Some(Nil2Preset::H5), None) => Ok(MalcevPresentation::heisenberg5()),
        (Some(Nil2Preset::H3) | None, None) => Ok(MalcevPresentation::heisenberg(1)),
    }
}

fn checked_tower<G: Group>(ctx: &GroupCtx<G>, input: &TowerInput<G>, n: usize, shift_bound: i64) -> Result<(lscheme::scheme::SchemeWindow<G>, VerifyReport), CliError> {
    let w = tower_window(ctx, input)?;
    let rep = tower_check(ctx, input, n, shift_bound);
    Ok((w, rep))
}

/// Build the configured scheme window. Abelian and virtually cyclic groups
/// are refused.
pub fn build(cfg: &RunConfig) -> Result<Built, CliError> {
    let n = cfg.n_max();
    if n == 0 {
        return Err(CliError::Config("n_max must be at least 1".into()));
    }
    let sb = cfg.verify.shift_bound;
    let desk_only = |kind: &str| -> Result<(), CliError> {
        if cfg.scheme.profile != ProfileName::Desk {
            return Err(CliError::Config(format!("{kind} boxes support only the desk profile")));
        }
        Ok(())
    };
    match &cfg.group {
        GroupConfig::Heisenberg => {
            desk_only("heisenberg")?;
            let w = build_heisenberg_scheme(&BoxParams::desk(n))?;
            Ok(Built { window: AnyWindow::Heisenberg(w), tower: None, data: Value::Null })
        }
        GroupConfig::Nil2 { preset, presentation: raw } => {
            desk_only("nil2")?;
            let pres = presentation(*preset, raw.as_ref())?;
            let data = find_heisenberg_direction(&pres)?;
            let ctx = nil2_ctx(&data)?;
            let (input, khat) = nil2_tower(&ctx, &data, &BoxParams::desk(n))?;
            let (w, rep) = checked_tower(&ctx, &input, n, sb)?;
            let extra = json!({ "mu": data.mu, "khat": khat });
            Ok(Built { window: AnyWindow::Nil2(w), tower: Some(rep), data: extra })
        }
        GroupConfig::Wreath { lamp } => {
            let p = profile(cfg.scheme.profile);
            let (ctx, input) = wreath_tower(Abelian::new(lamp.clone()), &profile_a(p, n), profile_q(p))?;
            let (w, rep) = checked_tower(&ctx, &input, n, sb)?;
            Ok(Built { window: AnyWindow::Wreath(w), tower: Some(rep), data: Value::Null })
        }
        GroupConfig::Bs { d } => {
            let p = profile(cfg.scheme.profile);
            let (ctx, input) = bs_tower(*d, &profile_a(p, n), profile_q(p))?;
            let (w, rep) = checked_tower(&ctx, &input, n, sb)?;
            Ok(Built { window: AnyWindow::Bs(w), tower: Some(rep), data: Value::Null })
        }
        GroupConfig::Dihedral => Err(lscheme::Error::NoScheme("D∞ is virtually cyclic; it carries no left scheme".into()).into()),
        GroupConfig::Zd { d } => {
            require_scheme_capable(&Abelian::lattice(*d).standard_ctx()?)?;
            Err(CliError::Config("no construction for ℤ^d".into()))
        }
    }
}
