//! Per-route rank reports shared by the three proof routes and the CLI.

use serde::Serialize;

/// Relative residual ceiling for QR, LQ and CR reconstructions in float mode.
pub const QR_RESIDUAL_TOL: f64 = 1e-10;
/// Relative residual ceiling for three-factor products (ULV/URV, CUR, DF).
pub const PRODUCT_RESIDUAL_TOL: f64 = 1e-9;
/// Max-entry ceiling for `Q^T Q - I` in float mode.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Cr,
    Elementary,
    Oracle,
    Ulv,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Cr => "cr",
            Route::Elementary => "elementary",
            Route::Oracle => "oracle",
            Route::Ulv => "ulv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NamedResidual {
    pub name: String,
    pub value: f64,
}

/// Outcome of one route's row-rank/column-rank computation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReportEntry {
    pub route: Route,
    pub row_rank: usize,
    pub col_rank: usize,
    pub pass: bool,
    /// Named float residuals; always empty for exact computations.
    pub residuals: Vec<NamedResidual>,
    /// Names of route-specific checks that did not hold.
    pub failed_checks: Vec<String>,
    pub timing_ms: f64,
}

/// Accumulates check outcomes while a route runs.
#[derive(Debug, Default)]
pub(crate) struct CheckLog {
    residuals: Vec<NamedResidual>,
    failed: Vec<String>,
}

impl CheckLog {
    pub fn check(&mut self, name: &str, ok: bool) -> bool {
        if !ok {
            self.failed.push(name.to_string());
        }
        ok
    }

    /// Records a float residual and checks it against `limit`.
    pub fn residual(&mut self, name: &str, value: f64, limit: f64) -> bool {
        self.residuals.push(NamedResidual {
            name: name.to_string(),
            value,
        });
        self.check(name, value <= limit)
    }

    pub fn finish(
        self,
        route: Route,
        row_rank: usize,
        col_rank: usize,
        started: std::time::Instant,
    ) -> RankReportEntry {
        let mut failed = self.failed;
        if row_rank != col_rank {
            failed.push("row_rank_equals_col_rank".to_string());
        }
        RankReportEntry {
            route,
            row_rank,
            col_rank,
            pass: failed.is_empty(),
            residuals: self.residuals,
            failed_checks: failed,
            timing_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }
}

/// `||x - y||_F / max(||y||_F, 1)`; the floor keeps zero matrices finite.
pub fn relative_residual(diff_norm: f64, reference_norm: f64) -> f64 {
    diff_norm / reference_norm.max(1.0)
}
