//! Flat records for CSV output. Every float is written with 17 significant
//! digits so files are byte-stable and lossless.

use std::cmp::Ordering;

use super::config::{Kind, Shape};
use crate::fitting::{Estimate, FitResult};

/// Bump when any column layout changes.
pub const SCHEMA_VERSION: u32 = 1;

pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_float(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn opt_int(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub trait Row {
    fn header() -> &'static [&'static str];
    fn record(&self) -> Vec<String>;
    /// `(T, L₀, third column)` ordering key.
    fn key(&self) -> (f64, usize, usize);
}

pub fn sort_rows<R: Row>(rows: &mut [R]) {
    rows.sort_by(|a, b| {
        let (ka, kb) = (a.key(), b.key());
        ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1)).then(ka.2.cmp(&kb.2))
    });
}

/// One fidelity between `ρ_C` (from `L₀`) and `ρ_C′` (from `L_BC`).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalityRow {
    pub kind: Kind,
    pub t: f64,
    pub l0: usize,
    pub lbc: usize,
    pub mu_l0: f64,
    pub mu_lbc: f64,
    pub fidelity: f64,
    pub infidelity: f64,
}

impl Row for LocalityRow {
    fn header() -> &'static [&'static str] {
        &["kind", "T", "L0", "LBC", "mu_L0", "mu_LBC", "F", "one_minus_F"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.kind.to_string(),
            float(self.t),
            self.l0.to_string(),
            self.lbc.to_string(),
            float(self.mu_l0),
            float(self.mu_lbc),
            float(self.fidelity),
            float(self.infidelity),
        ]
    }

    fn key(&self) -> (f64, usize, usize) {
        (self.t, self.l0, self.lbc)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRow {
    pub t: f64,
    pub l: usize,
    pub mu: f64,
    pub condensate_fraction: f64,
}

impl Row for PhaseRow {
    fn header() -> &'static [&'static str] {
        &["kind", "T", "L", "mu", "N0_over_N"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            Kind::Phase.to_string(),
            float(self.t),
            self.l.to_string(),
            float(self.mu),
            float(self.condensate_fraction),
        ]
    }

    fn key(&self) -> (f64, usize, usize) {
        (self.t, self.l, 0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub t: f64,
    pub l0: usize,
    pub mu: f64,
    pub d: usize,
    pub value: f64,
    pub limit: f64,
}

impl Row for CorrelationRow {
    fn header() -> &'static [&'static str] {
        &["kind", "T", "L0", "mu", "d", "C", "n0_squared"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            Kind::Correlations.to_string(),
            float(self.t),
            self.l0.to_string(),
            float(self.mu),
            self.d.to_string(),
            float(self.value),
            float(self.limit),
        ]
    }

    fn key(&self) -> (f64, usize, usize) {
        (self.t, self.l0, self.d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsystemRow {
    pub shape: Shape,
    pub t: f64,
    pub l0: usize,
    pub lbc: usize,
    pub mu_l0: f64,
    pub mu_lbc: f64,
    pub fidelity: f64,
    pub infidelity: f64,
    pub purity: f64,
    pub entropy: f64,
}

impl Row for SubsystemRow {
    fn header() -> &'static [&'static str] {
        &["kind", "shape", "T", "L0", "LBC", "mu_L0", "mu_LBC", "F", "one_minus_F", "P", "S"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            Kind::Subsystems.to_string(),
            self.shape.to_string(),
            float(self.t),
            self.l0.to_string(),
            self.lbc.to_string(),
            float(self.mu_l0),
            float(self.mu_lbc),
            float(self.fidelity),
            float(self.infidelity),
            float(self.purity),
            float(self.entropy),
        ]
    }

    fn key(&self) -> (f64, usize, usize) {
        // shapes share (T, L₀, L_BC); fold the volume into the last slot
        (self.t, self.l0, self.lbc * 16 + self.shape.volume())
    }
}

/// One fitted or derived number, for the companion summary file.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub kind: Kind,
    pub quantity: String,
    pub t: Option<f64>,
    pub l0: Option<usize>,
    pub lbc: Option<usize>,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub r_squared: Option<f64>,
    pub window: Option<(f64, f64)>,
    pub points: Option<usize>,
    pub note: String,
}

impl SummaryRow {
    pub fn new(kind: Kind, quantity: &str) -> Self {
        Self {
            kind,
            quantity: quantity.into(),
            t: None,
            l0: None,
            lbc: None,
            value: None,
            stderr: None,
            r_squared: None,
            window: None,
            points: None,
            note: String::new(),
        }
    }

    pub fn at(mut self, t: Option<f64>, l0: Option<usize>, lbc: Option<usize>) -> Self {
        (self.t, self.l0, self.lbc) = (t, l0, lbc);
        self
    }

    pub fn estimate(mut self, e: Estimate) -> Self {
        self.value = Some(e.value);
        self.stderr = Some(e.stderr);
        self
    }

    pub fn value(mut self, v: f64) -> Self {
        self.value = Some(v);
        self
    }

    /// Fills the fit columns; `e` picks the reported parameter.
    pub fn fit(mut self, fit: &FitResult, e: Estimate) -> Self {
        self = self.estimate(e);
        self.r_squared = Some(fit.r_squared);
        self.window = Some((fit.window.lo, fit.window.hi));
        self.points = Some(fit.points);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn header() -> &'static [&'static str] {
        &[
            "kind", "quantity", "T", "L0", "LBC", "value", "stderr", "r_squared", "window_lo",
            "window_hi", "points", "note",
        ]
    }

    pub fn record(&self) -> Vec<String> {
        vec![
            self.kind.to_string(),
            self.quantity.clone(),
            opt_float(self.t),
            opt_int(self.l0),
            opt_int(self.lbc),
            opt_float(self.value),
            opt_float(self.stderr),
            opt_float(self.r_squared),
            opt_float(self.window.map(|w| w.0)),
            opt_float(self.window.map(|w| w.1)),
            opt_int(self.points),
            self.note.clone(),
        ]
    }

    /// Order by quantity, then `(T, L₀, L_BC)`.
    pub fn compare(&self, other: &Self) -> Ordering {
        let t = |r: &Self| r.t.unwrap_or(f64::NEG_INFINITY);
        self.quantity
            .cmp(&other.quantity)
            .then(t(self).total_cmp(&t(other)))
            .then(self.l0.cmp(&other.l0))
            .then(self.lbc.cmp(&other.lbc))
    }
}
