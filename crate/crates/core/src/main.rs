use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use invh2::catalogue::{lookup, Input, CATALOGUE};
use invh2::fusion::from_irreps;
use invh2::groups::{
    abelian_group, abelian_invariants, h2_brute, schur_multiplier, FiniteGroup, RepData,
};
use invh2::io::{parse_cocycle_file, parse_group_file, write_skeletal_file};
use invh2::linalg::AbelianGroupPresentation;
use invh2::pipeline::{
    load_input, prepare, render_report, run, write_representatives, PipelineError,
};
use invh2::solver::CoeffMode;
use invh2::verify::run_checks;

#[derive(Parser)]
#[command(
    name = "invh2",
    version,
    about = "Invariant second cohomology of finite-dimensional Hopf algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Coeff {
    Unitary,
    Invertible,
}

impl From<Coeff> for CoeffMode {
    fn from(c: Coeff) -> Self {
        match c {
            Coeff::Unitary => CoeffMode::Unitary,
            Coeff::Invertible => CoeffMode::Invertible,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute H2_inv of a catalogue entry or input file.
    Compute {
        input: String,
        #[arg(long, value_enum, default_value = "unitary")]
        coeff: Coeff,
        /// Directory for the report and representative files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Show every branch, including dead ones.
        #[arg(long)]
        branch_report: bool,
    },
    /// Check a cocycle file: left and right cocycle, invariance, counit, unitarity.
    Verify {
        file: PathBuf,
        /// Catalogue name or group file; defaults to the group named in the file.
        #[arg(long)]
        group: Option<String>,
    },
    /// Compare the solver with the Schur multiplier formula and brute force.
    Oracle {
        /// Catalogue name, or invariant factors such as `2,4`.
        group: String,
    },
    /// Write the F-symbols of an input and check the pentagon.
    Fsymbols {
        input: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load every catalogue entry and check expected results.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Compute {
            input,
            coeff,
            out,
            branch_report,
        } => cmd_compute(&input, coeff.into(), out, branch_report),
        Command::Verify { file, group } => cmd_verify(&file, group.as_deref()),
        Command::Oracle { group } => cmd_oracle(&group),
        Command::Fsymbols { input, out } => cmd_fsymbols(&input, out),
        Command::Selftest => cmd_selftest(),
    };
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn cmd_compute(
    input: &str,
    mode: CoeffMode,
    out: Option<PathBuf>,
    branch_report: bool,
) -> Result<bool, PipelineError> {
    let p = prepare(load_input(input)?)?;
    let o = run(&p, mode)?;
    let files = match &out {
        Some(dir) => write_representatives(dir, &o)?,
        None => Vec::new(),
    };
    let report = render_report(&p, &o, &files, branch_report);
    print!("{report}");
    if let Some(dir) = out {
        let path = dir.join("report.txt");
        std::fs::write(&path, &report).map_err(|e| PipelineError::File(path, e.to_string()))?;
    }
    Ok(true)
}

fn group_of(arg: &str) -> Result<FiniteGroup, PipelineError> {
    if let Some(e) = lookup(arg) {
        return match e.load()? {
            Input::Concrete(d) => Ok(d.group),
            Input::Skeletal(_) => Err(PipelineError::UnknownInput(format!("{arg} is not a group"))),
        };
    }
    let text =
        std::fs::read_to_string(arg).map_err(|_| PipelineError::UnknownInput(arg.to_string()))?;
    Ok(parse_group_file(&text)?.group)
}

fn cmd_verify(file: &PathBuf, group: Option<&str>) -> Result<bool, PipelineError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| PipelineError::File(file.clone(), e.to_string()))?;
    let named = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("cocycle"))
        .and_then(|h| h.split_whitespace().find_map(|w| w.strip_prefix("group=")))
        .map(str::to_string);
    let name = group
        .map(str::to_string)
        .or(named)
        .ok_or_else(|| PipelineError::UnknownInput("no group given".into()))?;
    let g = group_of(&name)?;
    let omega = parse_cocycle_file(&text, &g)?;
    println!(
        "cocycle over {} (order {}), {} nonzero coefficients",
        g.name(),
        g.order(),
        omega.support().len()
    );
    let mut ok = true;
    for (check, r) in run_checks(&g, &omega) {
        match r {
            Ok(()) => println!("  {check:<24} pass"),
            Err(w) => {
                ok = false;
                println!("  {check:<24} FAIL at {:?}", w.0);
            }
        }
    }
    Ok(ok)
}

fn abelian_input(arg: &str) -> Result<(String, RepData), PipelineError> {
    if let Some(e) = lookup(arg) {
        return match e.load()? {
            Input::Concrete(d) if d.group.is_abelian() => Ok((arg.to_string(), *d)),
            _ => Err(PipelineError::UnknownInput(format!(
                "{arg} is not an abelian group"
            ))),
        };
    }
    let factors: Vec<u64> = arg
        .split([',', 'x'])
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| PipelineError::UnknownInput(arg.to_string()))?;
    let name = factors
        .iter()
        .map(|f| format!("z{f}"))
        .collect::<Vec<_>>()
        .join("x");
    let (g, irreps) = abelian_group(&name, &factors)?;
    Ok((name, RepData::new(g, irreps)?))
}

fn cmd_oracle(arg: &str) -> Result<bool, PipelineError> {
    let (name, data) = abelian_input(arg)?;
    let inv = abelian_invariants(&data.group)?;
    let formula = schur_multiplier(&inv);
    let exponent = inv.iter().copied().max().unwrap_or(1).max(1);
    let brute: Result<AbelianGroupPresentation, _> = h2_brute(&data.group, exponent);
    let p = prepare(Input::Concrete(Box::new(data)))?;
    let solver = run(&p, CoeffMode::Unitary)?.computation.group.presentation;
    println!("{name}: invariants {inv:?}");
    println!("  schur formula   {formula}");
    match &brute {
        Ok(b) => println!("  h2_brute        {b}"),
        Err(e) => println!("  h2_brute        unavailable ({e})"),
    }
    println!("  solver          {solver}");
    let agree = brute.is_ok_and(|b| b == formula) && solver == formula;
    println!("{}", if agree { "agree" } else { "DISAGREE" });
    Ok(agree)
}

fn cmd_fsymbols(input: &str, out: Option<PathBuf>) -> Result<bool, PipelineError> {
    let cat = match load_input(input)? {
        Input::Concrete(d) => from_irreps(&d)?,
        Input::Skeletal(c) => *c,
    };
    let text = write_skeletal_file(&cat);
    let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.skeletal", cat.name)));
    std::fs::write(&path, text).map_err(|e| PipelineError::File(path.clone(), e.to_string()))?;
    println!("wrote {}", path.display());
    let bad = cat.pentagon_check();
    if bad.is_empty() {
        println!("pentagon: ok");
        Ok(true)
    } else {
        println!("pentagon: {} failures, first at {:?}", bad.len(), bad[0]);
        Ok(false)
    }
}

fn cmd_selftest() -> Result<bool, PipelineError> {
    let mut ok = true;
    for e in CATALOGUE {
        let p = prepare(e.load()?)?;
        let pentagon = p.category.pentagon_check().is_empty();
        let mut line = format!(
            "{:<10} pentagon {}",
            e.name,
            if pentagon { "ok" } else { "FAIL" }
        );
        ok &= pentagon;
        if let Some(want) = e.expected() {
            let got = run(&p, CoeffMode::Unitary)?.computation.group.presentation;
            let pass = got == want;
            ok &= pass;
            line += &format!(
                ", H2 {got} (expected {want}: {})",
                if pass { "ok" } else { "FAIL" }
            );
        }
        println!("{line}");
    }
    println!("{}", if ok { "selftest: ok" } else { "selftest: FAIL" });
    Ok(ok)
}
