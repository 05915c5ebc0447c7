use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::closed_forms::{gamma_cycle, gamma_discrete, gamma_tree};
use crate::error::Result;
use crate::gap::{
    analyze, verify_gap_inequality, witness_oscillation, GapOptions, InequalityCheck,
};
use crate::linalg::{dot, norm1, SymMatrix};
use crate::metric::{power_matrix, MetricSpace, NegTypeMatrix, WeightedGraph};
use crate::negtype::{MarginalFlags, Verdict};

use super::input::{InputDocument, InputKind};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub gap: GapOptions,
    /// Overrides the document's exponent.
    pub p: Option<f64>,
    /// Treat a matrix document as `A` itself rather than as distances.
    pub raw: bool,
    pub witness: bool,
    pub timing: bool,
    /// Random trials for the gap inequality check; 0 skips it.
    pub inequality_trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CrossChecks {
    pub beta_hypercube: Option<f64>,
    pub beta_opnorm: Option<f64>,
    pub beta_binary: Option<f64>,
    pub beta_bnb: Option<f64>,
    pub certified: Option<bool>,
    /// Closed-form gap, when the input is a family with one.
    pub oracle_gamma: Option<f64>,
    pub witness_l1: Option<f64>,
    /// `(−A y₀ | y₀)`.
    pub witness_energy: Option<f64>,
    pub witness_sum: Option<f64>,
    pub witness_oscillation: Option<f64>,
    pub inequality: Option<InequalityCheck>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub projected_spectrum: Vec<f64>,
    pub min_pivot_ratio: f64,
    pub ainv_u_dot_u: Option<f64>,
    pub m: Option<f64>,
    pub z: Option<Vec<f64>>,
    pub marginal: MarginalFlags,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub input: String,
    pub n: usize,
    /// Absent in raw-matrix mode.
    pub p: Option<f64>,
    pub verdict: Verdict,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub s_star: Option<Vec<i8>>,
    pub witness: Option<Vec<f64>>,
    pub method: Option<String>,
    pub cross_checks: CrossChecks,
    pub diagnostics: Diagnostics,
    pub timing_ms: Option<f64>,
}

/// Closed-form `Γ` when the input is recognisably a discrete space, a
/// uniformly weighted cycle or a weighted tree.
fn oracle_gamma(space: &MetricSpace, graph: Option<&WeightedGraph>, p: f64) -> Option<f64> {
    let n = space.n();
    let c = space.d(0, 1);
    if (0..n).all(|i| (i + 1..n).all(|j| space.d(i, j) == c)) {
        return gamma_discrete(n).ok().map(|r| c.powf(p) * r.gamma);
    }
    if p != 1.0 {
        return None;
    }
    let g = graph?;
    if g.n() != n {
        return None;
    }
    if g.is_tree() {
        return gamma_tree(g).ok().map(|r| r.gamma);
    }
    let w = g.edges()[0].w;
    let is_cycle = g.edges().len() == n
        && (0..n).all(|v| g.degree(v) == 2)
        && g.edges().iter().all(|e| e.w == w);
    if is_cycle {
        return gamma_cycle(n).ok().map(|r| w * r.gamma);
    }
    None
}

/// Runs the whole pipeline on a document.
pub fn run_gap(doc: &InputDocument, opts: &RunOptions) -> Result<Report> {
    let p = opts.p.or(doc.p).unwrap_or(1.0);
    let (label, ntm, space, graph, warnings) = match (&doc.kind, opts.raw) {
        (InputKind::Matrix(rows), true) => {
            let a = SymMatrix::from_rows(rows)?;
            let n = a.n();
            (
                format!("raw({n})"),
                NegTypeMatrix::from_raw(a, vec![1.0; n])?,
                None,
                None,
                Vec::new(),
            )
        }
        _ => {
            let r = doc.resolve()?;
            let ntm = power_matrix(&r.space, p)?;
            let warnings = r.space.warnings().to_vec();
            (r.label, ntm, Some(r.space), r.graph, warnings)
        }
    };

    let analysis = analyze(&ntm, &opts.gap)?;
    let rep = &analysis.report;
    let mut report = Report {
        input: label,
        n: ntm.n(),
        p: (!opts.raw).then_some(p),
        verdict: rep.verdict,
        gamma: analysis.gamma(),
        beta: None,
        s_star: None,
        witness: None,
        method: None,
        cross_checks: CrossChecks {
            oracle_gamma: space
                .as_ref()
                .and_then(|x| oracle_gamma(x, graph.as_ref(), p)),
            ..Default::default()
        },
        diagnostics: Diagnostics {
            projected_spectrum: rep.projected_spectrum.clone(),
            min_pivot_ratio: rep.min_pivot_ratio,
            ainv_u_dot_u: rep.ainv_u_dot_u,
            m: rep.m,
            z: rep.z.clone(),
            marginal: rep.marginal.clone(),
            warnings,
        },
        timing_ms: None,
    };

    if let Some(g) = &analysis.gap {
        let cc = &mut report.cross_checks;
        cc.beta_hypercube = g.beta_by_hypercube;
        cc.beta_opnorm = g.beta_by_opnorm;
        cc.beta_binary = g.beta_by_binary;
        cc.beta_bnb = g.beta_by_bnb;
        cc.certified = Some(g.certified);
        let y0 = &g.witness_y0;
        cc.witness_l1 = Some(norm1(y0));
        cc.witness_energy = Some(-dot(&ntm.a.mul_vec(y0)?, y0));
        cc.witness_sum = Some(dot(y0, &ntm.u));
        cc.witness_oscillation = Some(witness_oscillation(&ntm, y0)?);
        if opts.inequality_trials > 0 {
            if let Some(space) = &space {
                cc.inequality = Some(verify_gap_inequality(
                    space,
                    p,
                    g.gamma,
                    opts.inequality_trials,
                    opts.seed,
                    Some(y0),
                )?);
            }
        }
        report.beta = Some(g.beta);
        report.s_star = Some(g.s_star.clone());
        report.witness = opts.witness.then(|| y0.clone());
        report.method = Some(g.method.clone());
        if opts.timing {
            report.timing_ms = Some(g.wall_time.as_secs_f64() * 1e3);
        }
    }
    Ok(report)
}

/// Six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_else(|| "-".into())
}

fn vec6(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| sig6(x)).collect();
    format!("[{}]", parts.join(", "))
}

impl Report {
    pub fn to_machine(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_machine(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| crate::error::Error::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "input      {}", self.input);
        let _ = writeln!(s, "points     {}", self.n);
        match self.p {
            Some(p) => {
                let _ = writeln!(s, "p          {}", sig6(p));
            }
            None => {
                let _ = writeln!(s, "p          (raw matrix)");
            }
        }
        let _ = writeln!(s, "verdict    {}", self.verdict);
        let _ = writeln!(s, "gamma      {}", opt(self.gamma));
        let _ = writeln!(s, "beta       {}", opt(self.beta));
        if let Some(sv) = &self.s_star {
            let parts: Vec<String> = sv.iter().map(|v| format!("{v:+}")).collect();
            let _ = writeln!(s, "s*         [{}]", parts.join(", "));
        }
        if let Some(m) = &self.method {
            let _ = writeln!(s, "method     {m}");
        }
        if let Some(w) = &self.witness {
            let _ = writeln!(s, "witness    {}", vec6(w));
        }
        let cc = &self.cross_checks;
        if self.beta.is_some() {
            let _ = writeln!(s, "cross-checks");
            let _ = writeln!(s, "  beta hypercube  {}", opt(cc.beta_hypercube));
            let _ = writeln!(s, "  beta opnorm     {}", opt(cc.beta_opnorm));
            let _ = writeln!(s, "  beta binary     {}", opt(cc.beta_binary));
            if cc.beta_bnb.is_some() {
                let _ = writeln!(s, "  beta bnb        {}", opt(cc.beta_bnb));
            }
            let _ = writeln!(s, "  |y0|_1          {}", opt(cc.witness_l1));
            let _ = writeln!(s, "  (-Ay0|y0)       {}", opt(cc.witness_energy));
            let _ = writeln!(s, "  o(Ay0)          {}", opt(cc.witness_oscillation));
        }
        if cc.oracle_gamma.is_some() {
            let _ = writeln!(s, "  oracle gamma    {}", opt(cc.oracle_gamma));
        }
        if let Some(chk) = &cc.inequality {
            let _ = writeln!(
                s,
                "  inequality      {}/{} trials pass, max scaled slack {}, maximality {}",
                chk.passed,
                chk.trials,
                sig6(chk.max_scaled_slack),
                match &chk.maximality {
                    Some(m) if m.violated => "confirmed",
                    Some(_) => "NOT confirmed",
                    None => "-",
                }
            );
        }
        let d = &self.diagnostics;
        let _ = writeln!(s, "diagnostics");
        let _ = writeln!(s, "  spectrum on F   {}", vec6(&d.projected_spectrum));
        let _ = writeln!(s, "  min pivot ratio {}", sig6(d.min_pivot_ratio));
        let _ = writeln!(s, "  (A^-1 u|u)      {}", opt(d.ainv_u_dot_u));
        let _ = writeln!(s, "  M               {}", opt(d.m));
        if d.marginal.any() {
            let _ = writeln!(s, "  numerically marginal: {:?}", d.marginal);
        }
        for w in &d.warnings {
            let _ = writeln!(s, "  warning: {w}");
        }
        if let Some(t) = self.timing_ms {
            let _ = writeln!(s, "time       {} ms", sig6(t));
        }
        s
    }
}
