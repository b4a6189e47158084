use serde::Serialize;

/// One exact check.
///
/// `pass` is `None` for informational rows (partial sums, growth figures).
/// Failed rows always carry a witness that the same check reproduces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRow {
    pub condition: String,
    pub scope: String,
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
}

impl CheckRow {
    pub fn check(condition: &str, scope: impl Into<String>, pass: bool) -> Self {
        Self { condition: condition.into(), scope: scope.into(), pass: Some(pass), witness: None, value: None }
    }

    pub fn info(condition: &str, scope: impl Into<String>, value: impl Into<String>) -> Self {
        Self {
            condition: condition.into(),
            scope: scope.into(),
            pass: None,
            witness: None,
            value: Some(value.into()),
        }
    }

    pub fn with_value(mut self, v: impl Into<String>) -> Self {
        self.value = Some(v.into());
        self
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }

    /// Attach a witness only when the check failed.
    pub fn witness_if_failed(self, w: impl FnOnce() -> String) -> Self {
        if self.pass == Some(false) {
            self.with_witness(w())
        } else {
            self
        }
    }
}

/// Truncated `Φ(g)` with its declared budget.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiRow {
    pub g: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<String>,
    pub value_f64: f64,
}

/// One point of the recurrence series `Σ_{|k|≤K} exp(-κ Φ(s_o^k))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub k: i64,
    pub phi: String,
    pub sum: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// Result of a verifier run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub rows: Vec<CheckRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub phi_partial: Vec<PhiRow>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerifyReport {
    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: VerifyReport) {
        self.rows.extend(other.rows);
        self.phi_partial.extend(other.phi_partial);
        self.series.extend(other.series);
        self.notes.extend(other.notes);
    }

    /// True iff no exact check failed.
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass != Some(false))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.pass == Some(false))
    }

    pub fn rows_for<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a CheckRow> + 'a {
        self.rows.iter().filter(move |r| r.condition == condition)
    }

    /// CSV `k,phi_partial,exp_sum` of the recurrence series.
    pub fn series_csv(&self) -> String {
        let mut out = String::from("k,phi_partial,exp_sum,delta\n");
        for p in &self.series {
            let d = p.delta.map(|d| format!("{d:.12e}")).unwrap_or_default();
            out.push_str(&format!("{},{},{:.12e},{}\n", p.k, p.phi, p.sum, d));
        }
        out
    }

    /// CSV of all check rows.
    pub fn rows_csv(&self) -> String {
        let mut out = String::from("condition,scope,pass,value,witness\n");
        let esc = |s: &str| {
            if s.contains(',') || s.contains('"') {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.to_string()
            }
        };
        for r in &self.rows {
            let pass = match r.pass {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "info",
            };
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                esc(&r.condition),
                esc(&r.scope),
                pass,
                esc(r.value.as_deref().unwrap_or("")),
                esc(r.witness.as_deref().unwrap_or(""))
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_logic_ignores_info_rows() {
        let mut r = VerifyReport::default();
        r.push(CheckRow::info("phi", "s", "7/4"));
        r.push(CheckRow::check("c1", "n=1", true));
        assert!(r.all_pass());
        r.push(CheckRow::check("c1", "n=2", false).witness_if_failed(|| "g".into()));
        assert!(!r.all_pass());
        assert_eq!(r.failures().next().unwrap().witness.as_deref(), Some("g"));
        assert!(r.rows_csv().contains("c1,n=2,fail,,g"));
    }
}
