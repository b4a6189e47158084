use lscheme::group::{Abelian, DirectProduct, Heisenberg};
use lscheme::nilpotent::Nil2Group;
use lscheme::scheme::SchemeWindow;
use lscheme::semidirect::{Dyadic, Lamps, Semidirect};
use serde_json::Value;

use crate::CliError;

/// A scheme window over one of the group kinds the CLI can load.
#[derive(Clone, Debug)]
pub enum AnyWindow {
    Heisenberg(SchemeWindow<Heisenberg>),
    Nil2(SchemeWindow<Nil2Group>),
    Wreath(SchemeWindow<Semidirect<Lamps>>),
    Bs(SchemeWindow<Semidirect<Dyadic>>),
    /// Lifts of Heisenberg windows through `H₃ × N → H₃`.
    HeisLift(SchemeWindow<DirectProduct<Heisenberg, Abelian>>),
}

/// Run `$body` with `$w` bound to the concrete window.
#[macro_export]
macro_rules! with_window {
    ($any:expr, $w:ident => $body:expr) => {
        match $any {
            $crate::any::AnyWindow::Heisenberg($w) => $body,
            $crate::any::AnyWindow::Nil2($w) => $body,
            $crate::any::AnyWindow::Wreath($w) => $body,
            $crate::any::AnyWindow::Bs($w) => $body,
            $crate::any::AnyWindow::HeisLift($w) => $body,
        }
    };
}

impl AnyWindow {
    pub fn from_json(v: &Value) -> Result<Self, CliError> {
        let kind = v.pointer("/group/kind").and_then(Value::as_str).unwrap_or("");
        Ok(match kind {
            "heisenberg" => Self::Heisenberg(SchemeWindow::from_json(v)?),
            "nil2" => Self::Nil2(SchemeWindow::from_json(v)?),
            "wreath" => Self::Wreath(SchemeWindow::from_json(v)?),
            "bs" => Self::Bs(SchemeWindow::from_json(v)?),
            "direct_product" => {
                let left = v.pointer("/group/structure/left/kind").and_then(Value::as_str);
                let right = v.pointer("/group/structure/right/kind").and_then(Value::as_str);
                if left != Some("heisenberg") || right != Some("abelian") {
                    return Err(CliError::Config("only heisenberg × abelian products are supported".into()));
                }
                Self::HeisLift(SchemeWindow::from_json(v)?)
            }
            other => return Err(CliError::Config(format!("unsupported group kind {other:?}"))),
        })
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&v)
    }

    pub fn to_json(&self) -> Value {
        with_window!(self, w => w.to_json())
    }
}
