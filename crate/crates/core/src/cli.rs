//! The `palinverse` command-line front end.
//!
//! Every failure prints one JSON line `{"error": kind, "message": text}` on stderr.
//! Exit codes: 0 success, 2 domain or usage error, 1 internal or I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::forward::{eig_full, select_pairs, DEFAULT_TARGET_TOL};
use crate::iep::{solve_iep_partial_detailed, IepOptions, IepProblem};
use crate::io;
use crate::mup::{update_model, MupProblem};
use crate::numerics::{diag, spectral_norm, CMatrix};
use crate::system::{PalindromicSystem, SymmetryClass};

pub const SEED_ENV: &str = "PALINVERSE_SEED";

#[derive(Parser, Debug)]
#[command(name = "palinverse", version, about = "Inverse eigenvalue problems for quadratic palindromic systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a system with prescribed eigenpairs.
    Solve(SolveArgs),
    /// Replace eigenvalues of a system without disturbing the others.
    Update(UpdateArgs),
    /// List eigenvalues with their pairing.
    #[command(visible_alias = "verify")]
    Eig(EigArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// tp, ta, hp or ha.
    #[arg(long)]
    class: String,
    /// Pair file with X (n×k) and T (k×k).
    #[arg(long)]
    pairs: PathBuf,
    /// JSON list of the 2n−k eigenvalues to complete the spectrum with.
    #[arg(long)]
    remaining: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the system here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the residual report even when the system goes to stdout.
    #[arg(long)]
    report: bool,
}

#[derive(Args, Debug)]
struct UpdateArgs {
    #[arg(long)]
    system: PathBuf,
    /// Comma-separated eigenvalues to replace, closed under pairing.
    #[arg(long, allow_hyphen_values = true)]
    replace: String,
    /// Comma-separated replacement eigenvalues, in the same order.
    #[arg(long = "with", allow_hyphen_values = true)]
    with_values: String,
    /// Pair file whose X prescribes the new eigenvectors.
    #[arg(long)]
    vectors: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EigArgs {
    #[arg(long)]
    system: PathBuf,
    /// Emit the eigenvalues and pairing as JSON.
    #[arg(long)]
    json: bool,
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn sci(x: f64) -> String {
    format!("{x:.4e}")
}

/// Run the command line `args` (including the program name) and return the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(err, "{}", error_line("usage", first));
            return 2;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Update(a) => cmd_update(a, out),
        Command::Eig(a) => cmd_eig(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", error_line(e.kind(), &e.to_string()));
            e.exit_code()
        }
    }
}

fn emit_system(sys: &PalindromicSystem, path: Option<&PathBuf>, out: &mut dyn Write) -> Result<()> {
    let text = io::system_to_string(sys);
    match path {
        Some(p) => io::write_text(p, &text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn load_system(path: &Path) -> Result<PalindromicSystem> {
    io::system_from_str(&io::read_text(path)?)
}

fn residual_2norm(sys: &PalindromicSystem, x: &CMatrix, t: &CMatrix) -> Result<f64> {
    Ok(spectral_norm(&sys.pair_residual_matrix(x, t)?))
}

fn symmetry_2norm(sys: &PalindromicSystem) -> f64 {
    let class = sys.class();
    spectral_norm(&(sys.a0() - class.adj(sys.a0()) * class.eps_c()))
}

fn cmd_solve(a: SolveArgs, out: &mut dyn Write) -> Result<()> {
    let class: SymmetryClass = a.class.parse()?;
    let seed = resolve_seed(a.seed)?;
    let (x1, t1) = io::pair_from_str(&io::read_text(&a.pairs)?)?;
    let t1 = t1.ok_or_else(|| Error::Parse("pair file needs a \"T\" matrix".into()))?;
    let remaining = a.remaining.as_ref().map(|p| io::values_from_str(&io::read_text(p)?)).transpose()?;
    let options = IepOptions { seed, remaining, ..IepOptions::default() };
    let problem = IepProblem::new(class, x1.clone(), t1.clone(), options)?;
    let sol = solve_iep_partial_detailed(&problem)?;
    let sys = &sol.system;
    emit_system(sys, a.out.as_ref(), out)?;
    if a.out.is_some() || a.report {
        writeln!(out, "class: {class}")?;
        writeln!(out, "n: {}", sys.n())?;
        writeln!(out, "k: {}", problem.k())?;
        writeln!(out, "attempts: {}", sol.attempts)?;
        writeln!(out, "residual (2-norm): {}", sci(residual_2norm(sys, &x1, &t1)?))?;
        writeln!(out, "residual (relative): {}", sci(sys.pair_residual(&x1, &t1)?))?;
        writeln!(out, "symmetry defect (2-norm): {}", sci(symmetry_2norm(sys)))?;
        writeln!(out, "symmetry defect (relative): {}", sci(sys.relative_symmetry_defect()))?;
    }
    Ok(())
}

fn cmd_update(a: UpdateArgs, out: &mut dyn Write) -> Result<()> {
    let sys = load_system(&a.system)?;
    let seed = resolve_seed(a.seed)?;
    let targets = io::parse_complex_list(&a.replace)?;
    let replacement = io::parse_complex_list(&a.with_values)?;
    if targets.len() != replacement.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} eigenvalues to replace but {} replacements",
            targets.len(),
            replacement.len()
        )));
    }
    let eigs = eig_full(&sys)?;
    let sel = select_pairs(&eigs, &targets, DEFAULT_TARGET_TOL)?;
    let x1_new = match &a.vectors {
        Some(p) => Some(io::pair_from_str(&io::read_text(p)?)?.0),
        None => None,
    };
    let mut problem = MupProblem::from_selection(sys.clone(), &sel, &replacement, seed)?;
    problem.x1_new = x1_new;
    if let Some(xn) = &problem.x1_new {
        if xn.shape() != sel.x1.shape() {
            return Err(Error::DimensionMismatch(format!(
                "prescribed eigenvectors are {}x{}, expected {}x{}",
                xn.nrows(),
                xn.ncols(),
                sel.x1.nrows(),
                sel.x1.ncols()
            )));
        }
    }
    let sol = update_model(&problem)?;
    let updated = &sol.system;
    emit_system(updated, a.out.as_ref(), out)?;
    let t1_new = diag(&replacement);
    let new_abs = residual_2norm(updated, &sol.x1_new, &t1_new)?;
    let kept_abs = residual_2norm(updated, &sel.x2, &sel.t2)?;
    writeln!(out, "class: {}", sys.class())?;
    writeln!(out, "replaced: {}", sel.selected.len())?;
    writeln!(out, "update rank: {}", sol.rank)?;
    writeln!(out, "attempts: {}", sol.attempts)?;
    writeln!(out, "symmetry defect (2-norm): {}", sci(symmetry_2norm(updated)))?;
    writeln!(out, "symmetry defect (relative): {}", sci(updated.relative_symmetry_defect()))?;
    writeln!(out, "new-pair residual (2-norm): {}", sci(new_abs))?;
    writeln!(out, "new-pair residual (relative): {}", sci(updated.pair_residual(&sol.x1_new, &t1_new)?))?;
    writeln!(out, "kept-pair residual (2-norm): {}", sci(kept_abs))?;
    writeln!(out, "kept-pair residual (relative): {}", sci(updated.pair_residual(&sel.x2, &sel.t2)?))?;
    Ok(())
}

fn cmd_eig(a: EigArgs, out: &mut dyn Write) -> Result<()> {
    let sys = load_system(&a.system)?;
    let eigs = eig_full(&sys)?;
    if a.json {
        out.write_all(io::eigs_to_string(&eigs, sys.n()).as_bytes())?;
        return Ok(());
    }
    writeln!(out, "class: {}", sys.class())?;
    writeln!(out, "n: {}", sys.n())?;
    let show = |k: usize| io::format_complex_fixed(eigs.values[k], 6);
    for (p, &(i, j)) in eigs.pairs.iter().enumerate() {
        writeln!(
            out,
            "pair    {}  {}  residuals {} {}  pairing error {}",
            show(i),
            show(j),
            sci(eigs.residuals[i]),
            sci(eigs.residuals[j]),
            sci(eigs.pair_errors[p])
        )?;
    }
    for &k in &eigs.singles {
        writeln!(out, "single  {}  residual {}", show(k), sci(eigs.residuals[k]))?;
    }
    for &k in &eigs.unmatched {
        writeln!(out, "unmatched  {}  residual {}", show(k), sci(eigs.residuals[k]))?;
    }
    writeln!(out, "complete pairing: {}", eigs.is_complete())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_are_json() {
        let (code, _, err) = run_args(&["palinverse", "frobnicate"]);
        assert_eq!(code, 2);
        let v: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"], "usage");
        assert_eq!(err.trim().lines().count(), 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["palinverse", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("solve"));
    }

    #[test]
    fn missing_file_is_io() {
        let (code, _, err) = run_args(&["palinverse", "eig", "--system", "/nonexistent/sys.json"]);
        assert_eq!(code, 1);
        assert!(err.contains("\"io\""));
    }
}
