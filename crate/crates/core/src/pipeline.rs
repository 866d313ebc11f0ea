//! Load, solve, certify and report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::catalogue::{lookup, Input};
use crate::fusion::{from_irreps, FusionError, SkeletalCategory};
use crate::groups::{GroupError, RepData};
use crate::io::{
    parse_group_file, parse_skeletal_file, write_cocycle_file, write_tensor_file, IoError,
};
use crate::solver::{
    compute, gram_from_reps, CandidateStatus, CoeffMode, Computation, Gram, SolverError,
    TensorStructure,
};
use crate::verify::{assemble, cohomologous, run_checks, GroupCocycle, VerifyError, Witness};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("unknown input `{0}`: not a catalogue name or readable file")]
    UnknownInput(String),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("{0}: {1}")]
    File(PathBuf, String),
}

/// A catalogue name, or a path to a group or skeletal file.
pub fn load_input(arg: &str) -> Result<Input, PipelineError> {
    if let Some(e) = lookup(arg) {
        return Ok(e.load()?);
    }
    let text =
        std::fs::read_to_string(arg).map_err(|_| PipelineError::UnknownInput(arg.to_string()))?;
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("skeletal") {
        Ok(Input::Skeletal(Box::new(parse_skeletal_file(&text)?)))
    } else {
        let f = parse_group_file(&text)?;
        Ok(Input::Concrete(Box::new(RepData::new(f.group, f.irreps)?)))
    }
}

/// An input with its skeletal data and, for concrete inputs, the Gram forms of its bases.
pub struct Prepared {
    pub input: Input,
    pub category: SkeletalCategory,
    pub gram: Option<Gram>,
}

pub fn prepare(input: Input) -> Result<Prepared, PipelineError> {
    let (category, gram) = match &input {
        Input::Concrete(d) => (from_irreps(d)?, Some(gram_from_reps(d)?)),
        Input::Skeletal(c) => ((**c).clone(), None),
    };
    Ok(Prepared {
        input,
        category,
        gram,
    })
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub cocycle: Option<GroupCocycle>,
    pub checks: Vec<(&'static str, Result<(), Witness>)>,
    pub unitary: bool,
}

pub struct Outcome {
    pub computation: Computation,
    pub certificates: Vec<Certificate>,
}

fn is_unitary(j: &TensorStructure, gram: Option<&Gram>) -> bool {
    j.channels().all(|(c, m)| {
        let g = gram
            .and_then(|g| g.get(c))
            .map(|g| g.embed(j.context()).expect("Gram form embeds"))
            .unwrap_or_else(|| crate::linalg::ExactMatrix::identity(j.context(), m.rows()));
        m.adjoint().mul(&g).mul(m) == g
    })
}

/// Solves, then certifies every class independently: for concrete inputs each
/// representative passes the cocycle checks and no two are cohomologous.
pub fn run(p: &Prepared, mode: CoeffMode) -> Result<Outcome, PipelineError> {
    let computation = compute(&p.category, p.gram.as_ref(), mode)?;
    let mut certificates = Vec::new();
    for (i, class) in computation.group.classes.iter().enumerate() {
        let j = &class.representative;
        let unitary = is_unitary(j, p.gram.as_ref());
        if mode == CoeffMode::Unitary && !unitary {
            return Err(PipelineError::Certification(format!(
                "class {i} representative is not unitary"
            )));
        }
        let (cocycle, checks) = match p.input.rep_data() {
            Some(d) => {
                let om = assemble(d, j)?;
                let checks = run_checks(&d.group, &om);
                (Some(om), checks)
            }
            None => (None, Vec::new()),
        };
        for (name, r) in &checks {
            if let Err(w) = r {
                if *name != "unitary" || mode == CoeffMode::Unitary {
                    return Err(PipelineError::Certification(format!(
                        "class {i}: {name} fails at {:?}",
                        w.0
                    )));
                }
            }
        }
        certificates.push(Certificate {
            cocycle,
            checks,
            unitary,
        });
    }
    if let Some(d) = p.input.rep_data() {
        for a in 0..certificates.len() {
            for b in a + 1..certificates.len() {
                let (Some(x), Some(y)) = (&certificates[a].cocycle, &certificates[b].cocycle)
                else {
                    continue;
                };
                if cohomologous(d, x, y)?.is_some() {
                    return Err(PipelineError::Certification(format!(
                        "classes {a} and {b} are cohomologous"
                    )));
                }
            }
        }
    }
    Ok(Outcome {
        computation,
        certificates,
    })
}

/// `exp(2 pi i q)` as `1`, `-1` or `e(q)`.
pub fn root_label(q: &BigRational) -> String {
    if q.is_zero() {
        "1".into()
    } else if *q == BigRational::new(1.into(), 2.into()) {
        "-1".into()
    } else {
        format!("e({q})")
    }
}

pub fn input_summary(p: &Prepared) -> String {
    let cat = &p.category;
    match &p.input {
        Input::Concrete(d) => format!(
            "{}: concrete group of order {}, {} irreps, conductor {}",
            p.input.name(),
            d.group.order(),
            d.irreps.len(),
            cat.context().conductor()
        ),
        Input::Skeletal(_) => format!(
            "{}: skeletal category of rank {}, conductor {}",
            p.input.name(),
            cat.rank(),
            cat.context().conductor()
        ),
    }
}

pub fn render_report(p: &Prepared, o: &Outcome, files: &[PathBuf], branch_report: bool) -> String {
    let c = &o.computation;
    let cat = &c.category;
    let l = cat.labels();
    let mut out = String::new();
    let _ = writeln!(out, "input: {}", input_summary(p));
    let _ = writeln!(out, "coefficients: {}", c.mode);
    let _ = writeln!(out, "working field: Q(zeta_{})", c.conductor);
    let _ = writeln!(
        out,
        "system: {} unknowns, {} monomial relations, {} block equations",
        c.unknowns, c.monomial_relations, c.block_equations
    );
    let alive: Vec<bool> = c.branches.iter().map(|b| b.dead.is_none()).collect();
    if c.families.is_empty() {
        let _ = writeln!(out, "branches: 1 (multiplicity free)");
    } else {
        let _ = writeln!(
            out,
            "branches: {} famil{}",
            c.families.len(),
            if c.families.len() == 1 { "y" } else { "ies" }
        );
    }
    for (fi, f) in c.families.iter().enumerate() {
        let (y, z, w) = c.channels[f.representative];
        let stab: Vec<&str> = f.stabilizer.iter().map(|&s| l[s].as_str()).collect();
        let survivors = (0..f.candidates.len())
            .filter(|&ci| {
                c.branches
                    .iter()
                    .zip(&alive)
                    .any(|(b, &a)| a && b.branch.choice[fi] == ci)
            })
            .count();
        let _ = writeln!(
            out,
            "  family {} {} -> {} ({} channels), stabilizer {{{}}}: {} candidates, {} survive",
            l[y],
            l[z],
            l[w],
            f.transports.len(),
            stab.join(", "),
            f.candidates.len(),
            survivors
        );
        for (ci, cand) in f.candidates.iter().enumerate() {
            let psi: Vec<String> = f
                .stabilizer
                .iter()
                .zip(&cand.psi)
                .map(|(&s, q)| format!("{}={}", l[s], root_label(q)))
                .collect();
            let status = match &cand.status {
                CandidateStatus::Alive => {
                    let dead: Vec<&str> = c
                        .branches
                        .iter()
                        .filter(|b| b.branch.choice[fi] == ci)
                        .filter_map(|b| b.dead.as_deref())
                        .collect();
                    if c.branches
                        .iter()
                        .zip(&alive)
                        .any(|(b, &a)| a && b.branch.choice[fi] == ci)
                    {
                        "survives".to_string()
                    } else {
                        format!("dies: {}", dead.first().copied().unwrap_or("no branch"))
                    }
                }
                CandidateStatus::Empty => "dies: no nonzero commuting matrix".into(),
                CandidateStatus::Singular => "dies: commuting matrices are singular".into(),
                CandidateStatus::Unsupported(d) => {
                    format!("unsupported: {d}-dimensional commutant")
                }
            };
            let _ = writeln!(out, "    psi({}): {status}", psi.join(", "));
        }
    }
    for (bi, b) in c.branches.iter().enumerate() {
        if !branch_report && b.dead.is_some() {
            continue;
        }
        let label = if b.branch.choice.is_empty() {
            "branch".to_string()
        } else {
            format!("branch {bi} {:?}", b.branch.choice)
        };
        match (&b.dead, &b.solution) {
            (Some(reason), _) => {
                let _ = writeln!(out, "  {label}: dead ({reason})");
            }
            (None, Some(s)) => {
                let torsion: Vec<String> = s.torsion.iter().map(|d| format!("Z/{d}")).collect();
                let group = match (torsion.is_empty(), s.free_rank) {
                    (true, 0) => "trivial".to_string(),
                    (_, 0) => torsion.join(" x "),
                    (_, r) => format!(
                        "infinite component, rank {r}{}",
                        if torsion.is_empty() {
                            String::new()
                        } else {
                            format!(" x {}", torsion.join(" x "))
                        }
                    ),
                };
                let _ = writeln!(
                    out,
                    "  {label}: alive, solutions modulo gauge {group}, classes {:?}",
                    b.classes
                );
                if branch_report {
                    let _ = writeln!(
                        out,
                        "    invariant monomials: {}, relations: {}",
                        s.invariants.rows(),
                        s.relations.rank()
                    );
                }
            }
            (None, None) => {}
        }
    }
    let g = &c.group;
    let n = g.classes.len();
    let _ = writeln!(
        out,
        "result: H2 = {} ({n} class{})",
        g.presentation,
        if n == 1 { "" } else { "es" }
    );
    if g.free_rank > 0 {
        let _ = writeln!(out, "  infinite component, rank {}", g.free_rank);
    }
    if g.classes.len() > 1 {
        let _ = writeln!(out, "class table:");
        for row in &g.table {
            let r: Vec<String> = row.iter().map(ToString::to_string).collect();
            let _ = writeln!(out, "  {}", r.join(" "));
        }
    }
    let _ = writeln!(out, "certification:");
    for (i, cert) in o.certificates.iter().enumerate() {
        let checks: Vec<String> = cert
            .checks
            .iter()
            .map(|(n, r)| format!("{n} {}", if r.is_ok() { "ok" } else { "FAIL" }))
            .collect();
        let coherent = "coherence ok".to_string();
        let unitary = if cert.unitary {
            "unitary"
        } else {
            "not unitary"
        };
        let extra = if checks.is_empty() {
            String::new()
        } else {
            format!(", {}", checks.join(", "))
        };
        let _ = writeln!(out, "  class {i}: {coherent}, {unitary}{extra}");
    }
    if o.certificates.len() > 1 && p.input.rep_data().is_some() {
        let _ = writeln!(out, "  representatives pairwise non-cohomologous");
    }
    if !files.is_empty() {
        let _ = writeln!(out, "representatives:");
        for f in files {
            let _ = writeln!(out, "  {}", f.display());
        }
    }
    out
}

/// Writes one tensor file per class, plus a cocycle file for concrete inputs.
pub fn write_representatives(dir: &Path, o: &Outcome) -> Result<Vec<PathBuf>, PipelineError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| PipelineError::File(dir.to_path_buf(), e.to_string()))?;
    let mut files = Vec::new();
    let cat = &o.computation.category;
    for (i, (class, cert)) in o
        .computation
        .group
        .classes
        .iter()
        .zip(&o.certificates)
        .enumerate()
    {
        let path = dir.join(format!("class{i}.tensor"));
        std::fs::write(&path, write_tensor_file(cat, &class.representative))
            .map_err(|e| PipelineError::File(path.clone(), e.to_string()))?;
        files.push(path);
        if let Some(om) = &cert.cocycle {
            let path = dir.join(format!("class{i}.cocycle"));
            std::fs::write(&path, write_cocycle_file(om))
                .map_err(|e| PipelineError::File(path.clone(), e.to_string()))?;
            files.push(path);
        }
    }
    Ok(files)
}
