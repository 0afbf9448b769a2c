//! Runs every rank route and factorization check on one matrix and
//! collects the outcome into a [`VerificationReport`].

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::elimination::{cr_decompose, prove_rank_equality_via_cr, rank};
use crate::matrix::Matrix;
use crate::oracle::{rank_oracle, ORACLE_LIMIT};
use crate::orthogonalization::{lq, orthogonality_defect, qr, QrMode};
use crate::report::{
    relative_residual, NamedResidual, RankReportEntry, Route, ORTHOGONALITY_TOL,
    PRODUCT_RESIDUAL_TOL, QR_RESIDUAL_TOL,
};
use crate::scalar::Scalar;
use crate::skeleton::cur_decompose;
use crate::subspaces::{four_subspaces, prove_rank_equality_elementary};
use crate::tolerance::ToleranceContext;
use crate::utv::{
    prove_rank_equality_via_ulv, rank_decompose_from, ulv, urv, RankSplit, UTVFactors,
};

/// Outcome of the checks on one factorization.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorCheck {
    /// False when the factorization does not apply to this shape
    /// (QR needs `m >= n`, LQ needs `n >= m`); such checks pass vacuously.
    pub applicable: bool,
    pub pass: bool,
    pub residuals: Vec<NamedResidual>,
    pub failed_checks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub input_digest: String,
    pub mode: String,
    pub rows: usize,
    pub cols: usize,
    /// Ordered by route name.
    pub entries: Vec<RankReportEntry>,
    pub factor_checks: BTreeMap<String, FactorCheck>,
    /// Every route reported the same rank.
    pub routes_agree: bool,
    pub overall: bool,
}

#[derive(Default)]
struct Checker {
    residuals: Vec<NamedResidual>,
    failed: Vec<String>,
}

impl Checker {
    fn flag(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    /// Exact equality in the rational regime; relative Frobenius residual
    /// against `limit` for floats.
    fn same<T: Scalar>(&mut self, name: &str, got: &Matrix<T>, want: &Matrix<T>, limit: f64) {
        if got.shape() != want.shape() {
            self.flag(name, false);
            return;
        }
        if T::EXACT {
            self.flag(name, got == want);
        } else {
            let res = relative_residual(
                got.sub(want).expect("same shape").norm_fro_f64(),
                want.norm_fro_f64(),
            );
            self.residuals.push(NamedResidual {
                name: name.to_string(),
                value: res,
            });
            self.flag(name, res <= limit);
        }
    }

    fn orthogonal<T: Scalar>(&mut self, name: &str, defect: f64) {
        if T::EXACT {
            self.flag(name, defect == 0.0);
        } else {
            self.residuals.push(NamedResidual {
                name: name.to_string(),
                value: defect,
            });
            self.flag(name, defect <= ORTHOGONALITY_TOL);
        }
    }

    fn finish(self, applicable: bool) -> FactorCheck {
        FactorCheck {
            applicable,
            pass: self.failed.is_empty(),
            residuals: self.residuals,
            failed_checks: self.failed,
        }
    }
}

fn not_applicable() -> FactorCheck {
    FactorCheck {
        applicable: false,
        pass: true,
        residuals: Vec::new(),
        failed_checks: Vec::new(),
    }
}

fn check_utv<T: Scalar>(a: &Matrix<T>, f: &UTVFactors<T>, expected_rank: usize) -> FactorCheck {
    let mut c = Checker::default();
    c.flag("rank_matches_elimination", f.rank == expected_rank);
    c.flag("core_triangular", f.has_triangular_structure());
    c.orthogonal::<T>("orthogonality", f.orthogonality_defect());
    c.same("reconstruction", &f.product(), a, PRODUCT_RESIDUAL_TOL);
    c.same("reduced_reconstruction", &f.reduced_product(), a, PRODUCT_RESIDUAL_TOL);
    c.finish(true)
}

/// Oracle entry: the column rank is the largest nonzero minor of `A`, the
/// row rank that of `A^T`.
pub fn oracle_entry<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext) -> Option<RankReportEntry> {
    if a.rows().min(a.cols()) > ORACLE_LIMIT {
        return None;
    }
    let started = Instant::now();
    let col = rank_oracle(a, tol).ok()?;
    let row = rank_oracle(&a.transpose(), tol).ok()?;
    Some(RankReportEntry {
        route: Route::Oracle,
        row_rank: row,
        col_rank: col,
        pass: row == col,
        residuals: Vec::new(),
        failed_checks: if row == col {
            Vec::new()
        } else {
            vec!["row_rank_equals_col_rank".to_string()]
        },
        timing_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn verify_all<T: Scalar>(a: &Matrix<T>, tol: &ToleranceContext, digest: String) -> VerificationReport {
    let (m, n) = a.shape();
    let mut entries = vec![
        prove_rank_equality_via_cr(a, tol),
        prove_rank_equality_elementary(a, tol),
        prove_rank_equality_via_ulv(a, tol),
    ];
    entries.extend(oracle_entry(a, tol));
    entries.sort_by_key(|e| e.route);

    let r = rank(a, tol);
    let mut checks = BTreeMap::new();

    checks.insert(
        "qr".to_string(),
        if m >= n {
            let mut c = Checker::default();
            for mode in [QrMode::Reduced, QrMode::Full] {
                let tag = if mode == QrMode::Full { "full" } else { "reduced" };
                let f = qr(a, mode, tol).expect("shape checked");
                c.same(&format!("{tag}_reconstruction"), &f.product(), a, QR_RESIDUAL_TOL);
                c.orthogonal::<T>(&format!("{tag}_orthogonality"), orthogonality_defect(&f.q, &f.col_norms_sq));
                c.flag(&format!("{tag}_r_upper_triangular"), f.r.is_upper_triangular());
            }
            c.finish(true)
        } else {
            not_applicable()
        },
    );

    checks.insert(
        "lq".to_string(),
        if n >= m {
            let mut c = Checker::default();
            for mode in [QrMode::Reduced, QrMode::Full] {
                let tag = if mode == QrMode::Full { "full" } else { "reduced" };
                let f = lq(a, mode, tol).expect("shape checked");
                c.same(&format!("{tag}_reconstruction"), &f.product(), a, QR_RESIDUAL_TOL);
                c.orthogonal::<T>(
                    &format!("{tag}_orthogonality"),
                    orthogonality_defect(&f.q.transpose(), &f.row_norms_sq),
                );
                c.flag(&format!("{tag}_l_lower_triangular"), f.l.is_lower_triangular());
            }
            c.finish(true)
        } else {
            not_applicable()
        },
    );

    let low = ulv(a, tol);
    checks.insert("ulv".to_string(), check_utv(a, &low, r));
    checks.insert("urv".to_string(), check_utv(a, &urv(a, tol), r));

    let cr = cr_decompose(a, tol);
    {
        let mut c = Checker::default();
        c.same("reconstruction", &cr.product(), a, QR_RESIDUAL_TOL);
        let block = cr.r.select_columns(&cr.pivot_cols).expect("pivots in range");
        c.flag("pivot_block_is_identity", block == Matrix::identity(cr.rank()));
        c.flag("c_is_pivot_columns", cr.c == a.select_columns(&cr.pivot_cols).expect("in range"));
        checks.insert("cr".to_string(), c.finish(true));
    }

    {
        let mut c = Checker::default();
        match cur_decompose(a, tol) {
            Ok(f) => {
                c.same("reconstruction", &f.product(), a, PRODUCT_RESIDUAL_TOL);
                c.flag("c_verbatim", f.c == a.select_columns(&f.col_idx).expect("in range"));
                c.flag("r_verbatim", f.r == a.select_rows(&f.row_idx).expect("in range"));
                c.flag("c_matches_cr", f.c == cr.c);
                if T::EXACT {
                    c.flag("per_column_identity", f.column_identity_failures(a).is_empty());
                }
            }
            Err(_) => c.flag("intersection_invertible", false),
        }
        checks.insert("cur".to_string(), c.finish(true));
    }

    {
        let mut c = Checker::default();
        for split in [RankSplit::DLF, RankSplit::DFL] {
            let tag = match split {
                RankSplit::DLF => "dl_f",
                RankSplit::DFL => "d_lf",
            };
            let f = rank_decompose_from(&low, split);
            c.same(&format!("{tag}_reconstruction"), &f.product(), a, PRODUCT_RESIDUAL_TOL);
            c.flag(&format!("{tag}_d_full_rank"), rank(&f.d, tol) == r);
            c.flag(&format!("{tag}_f_full_rank"), rank(&f.f.transpose(), tol) == r);
        }
        checks.insert("rankdec".to_string(), c.finish(true));
    }

    {
        let s = four_subspaces(a, tol);
        let mut c = Checker::default();
        for name in s.check(a, tol) {
            c.flag(name, false);
        }
        checks.insert("subspaces".to_string(), c.finish(true));
    }

    let first = entries.first().map(|e| e.col_rank);
    let routes_agree = entries
        .iter()
        .all(|e| Some(e.row_rank) == first && Some(e.col_rank) == first);
    let overall = routes_agree
        && entries.iter().all(|e| e.pass)
        && checks.values().all(|c| c.pass);

    VerificationReport {
        input_digest: digest,
        mode: if T::EXACT { "exact" } else { "float" }.to_string(),
        rows: m,
        cols: n,
        entries,
        factor_checks: checks,
        routes_agree,
        overall,
    }
}
