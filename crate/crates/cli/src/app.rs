//! Subcommands behind the `diffkap` binary.

use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use diffkap_core::diffpoly::eval_exponent;
use diffkap_core::newton::{lift_multivariate, lift_univariate_branches};
use diffkap_core::polyhedral::hypersurface;
use diffkap_core::random::{self, PolyShape};
use diffkap_core::residue::{IdentityField, ResidueField};
use diffkap_core::{Error, KDiffPoly, Result, RhoConstant, RhoRational};
use serde_json::{json, Value};

use crate::json::{algebraic_to_json, certificate_to_json, complex_to_json, point_to_json, rho_to_json, to_string};
use crate::parse::{parse_point, parse_poly, parse_rho};
use crate::svg;
use crate::verify::{lift_target, verify_kapranov, GridSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "diffkap", version, about = "Tropical geometry of difference polynomials over Hahn series")]
pub struct Cli {
    /// Value of the constant `r` used for ordering exponents.
    #[arg(long, global = true, value_enum, default_value_t = Rho::Pi)]
    pub rho: Rho,
    /// Output format; `svg` only for `hypersurface` in two variables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Rho {
    Pi,
    E,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Svg,
}

#[derive(Args, Debug)]
pub struct PolyArg {
    /// Polynomial such as `(1+t)*x1*s^3(x2) + t^2*s(x2) + 1`; `-` reads stdin.
    pub poly: String,
    /// Number of variables; defaults to the largest index used.
    #[arg(long)]
    pub nvars: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The tropicalization as affine pieces, and its value at `--at`.
    Trop {
        #[command(flatten)]
        poly: PolyArg,
        /// Comma-separated weight vector, e.g. `3*r^2, -2/r`.
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
    },
    /// The initial form at `--at`.
    Initial {
        #[command(flatten)]
        poly: PolyArg,
        /// Comma-separated weight vector.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
    },
    /// The tropical hypersurface as a polyhedral complex.
    Hypersurface {
        #[command(flatten)]
        poly: PolyArg,
    },
    /// Lifts a residue root of the initial form at `--at` to a root.
    Lift {
        #[command(flatten)]
        poly: PolyArg,
        /// Comma-separated weight vector.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Bound the residual valuation must exceed; defaults to
        /// `max(trop f(w), w_i) + 1`.
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        /// Explore every residue root at every step (one variable only).
        #[arg(long)]
        branch_all: bool,
        /// Node budget of the branch exploration.
        #[arg(long, default_value_t = 64)]
        budget: usize,
    },
    /// Checks the hypersurface against the initial-form test on a grid and
    /// lifts a root at every cell.
    Verify {
        /// Polynomial; omit it with `--random`.
        poly: Option<String>,
        /// Number of variables; defaults to the largest index used.
        #[arg(long)]
        nvars: Option<usize>,
        /// `lo:hi:count`, per axis or once for all, e.g. `-10:10:9`.
        #[arg(long, allow_hyphen_values = true, default_value = "-10:10:9")]
        grid: String,
        /// Offset of the lift targets above `max(trop f(w), w_i)`.
        #[arg(long, allow_hyphen_values = true, default_value = "1")]
        target: String,
        /// Verify this many seeded random bivariate polynomials instead.
        #[arg(long)]
        random: Option<usize>,
        /// Seed for `--random`.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Output of a run: text for stdout and the exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

fn code_of(e: &Error) -> i32 {
    match e {
        e if e.is_internal() => EXIT_INTERNAL,
        Error::Stalled { .. } | Error::IterationCap { .. } => EXIT_MISMATCH,
        _ => EXIT_INPUT,
    }
}

fn read_poly(p: &PolyArg) -> Result<KDiffPoly> {
    read_poly_text(&p.poly, p.nvars)
}

fn read_poly_text(text: &str, nvars: Option<usize>) -> Result<KDiffPoly> {
    let f = if text == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Precondition(format!("reading stdin: {e}")))?;
        parse_poly(&s, nvars)?
    } else {
        parse_poly(text, nvars)?
    };
    if f.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    Ok(f)
}

fn point_for(f: &KDiffPoly, s: &str) -> Result<Vec<RhoRational>> {
    let w = parse_point(s)?;
    if w.len() != f.nvars() {
        return Err(Error::DimensionMismatch {
            expected: f.nvars(),
            found: w.len(),
        });
    }
    Ok(w)
}

fn json_only(format: Format) -> Result<()> {
    match format {
        Format::Json => Ok(()),
        Format::Svg => Err(Error::Precondition("SVG output is only available for `hypersurface`".into())),
    }
}

fn trop(f: &KDiffPoly, at: Option<&str>) -> Result<Value> {
    let mut pieces = Vec::new();
    for (u, c) in f.display_order() {
        let v = match c.valuation()? {
            diffkap_core::Extended::Finite(v) => v,
            diffkap_core::Extended::Infinity => continue,
        };
        let one = KDiffPoly::from_terms(f.nvars(), vec![(u.clone(), diffkap_core::HahnSeries::one())]);
        pieces.push(json!({"monomial": one.to_string(), "constant": rho_to_json(&v), "slope": point_to_json(&eval_exponent(u))}));
    }
    let mut out = json!({"polynomial": f.to_string(), "pieces": pieces});
    if let Some(at) = at {
        let w = point_for(f, at)?;
        let (min, arg) = f.tropicalize(&w)?;
        let arg: Vec<String> = arg
            .into_iter()
            .map(|u| KDiffPoly::from_terms(f.nvars(), vec![(u, diffkap_core::HahnSeries::one())]).to_string())
            .collect();
        out["at"] = point_to_json(&w);
        out["value"] = rho_to_json(&min);
        out["argmin"] = json!(arg);
    }
    Ok(out)
}

fn lift(f: &KDiffPoly, at: &str, target: Option<&str>, branch_all: bool, budget: usize) -> Result<(Value, i32)> {
    let field = IdentityField;
    let w = point_for(f, at)?;
    let target = match target {
        Some(t) => parse_rho(t)?,
        None => lift_target(f, &w, &RhoRational::one())?,
    };
    let init = f.initial_form(&w)?;
    let alpha = field.find_root_nonmonomial(&init)?;
    let alpha_json = alpha.iter().map(algebraic_to_json).collect::<Result<Vec<_>>>()?;
    if branch_all {
        if f.nvars() != 1 {
            return Err(Error::Precondition("--branch-all needs a polynomial in one variable".into()));
        }
        // every residue root of the initial form starts its own tree
        let mut lifts = Vec::new();
        let mut stalled = Vec::new();
        for a in field.difference_roots(&init)? {
            let b = lift_univariate_branches(f, &w[0], &a, &target, &field, budget)?;
            for c in &b.lifts {
                lifts.push(certificate_to_json(c)?);
            }
            for (choices, limit) in &b.stalled {
                stalled.push(json!({
                    "branch_choices": choices.iter().map(algebraic_to_json).collect::<Result<Vec<_>>>()?,
                    "limit": rho_to_json(limit),
                }));
            }
        }
        let code = if stalled.is_empty() { EXIT_OK } else { EXIT_MISMATCH };
        return Ok((json!({"w": point_to_json(&w), "target": rho_to_json(&target), "lifts": lifts, "stalled": stalled}), code));
    }
    let certs = lift_multivariate(f, &w, &alpha, &target, &field)?;
    if certs.len() == 1 {
        return Ok((certificate_to_json(&certs[0])?, EXIT_OK));
    }
    let coords = certs.iter().map(certificate_to_json).collect::<Result<Vec<_>>>()?;
    Ok((json!({"w": point_to_json(&w), "alpha": alpha_json, "coordinates": coords}), EXIT_OK))
}

fn verify(poly: Option<&str>, nvars: Option<usize>, grid: &str, target: &str, random: Option<usize>, seed: u64) -> Result<(Value, i32)> {
    let grid: GridSpec = grid.parse()?;
    let offset = parse_rho(target)?;
    let polys = match (poly, random) {
        (Some(p), None) => vec![read_poly_text(p, nvars)?],
        (None, Some(k)) => {
            let mut rng = random::rng(seed);
            let shape = PolyShape {
                min_terms: 2,
                ..PolyShape::new(nvars.unwrap_or(2), 4, 2)
            };
            (0..k).map(|_| random::poly(&mut rng, &shape)).collect()
        }
        _ => return Err(Error::Precondition("give either a polynomial or --random".into())),
    };
    let mut reports = Vec::new();
    let mut ok = true;
    for f in &polys {
        let r = verify_kapranov(f, &grid, &offset, &IdentityField)?;
        ok &= r.ok();
        reports.push(r.to_json()?);
    }
    let code = if ok { EXIT_OK } else { EXIT_MISMATCH };
    let out = if random.is_some() { json!({"seed": seed, "reports": reports}) } else { reports.pop().expect("one report") };
    Ok((out, code))
}

fn dispatch(cli: &Cli) -> Result<(String, i32)> {
    let json_out = |v: Value, code| Ok((to_string(&v), code));
    match &cli.command {
        Command::Trop { poly, at } => {
            json_only(cli.format)?;
            json_out(trop(&read_poly(poly)?, at.as_deref())?, EXIT_OK)
        }
        Command::Initial { poly, at } => {
            json_only(cli.format)?;
            let f = read_poly(poly)?;
            let w = point_for(&f, at)?;
            let g = f.initial_form(&w)?;
            json_out(json!({"at": point_to_json(&w), "initial": g.to_string(), "monomial": g.is_monomial()}), EXIT_OK)
        }
        Command::Hypersurface { poly } => {
            let hs = hypersurface(&read_poly(poly)?)?;
            match cli.format {
                Format::Json => json_out(complex_to_json(&hs), EXIT_OK),
                Format::Svg => Ok((svg::render(&hs)?, EXIT_OK)),
            }
        }
        Command::Lift {
            poly,
            at,
            target,
            branch_all,
            budget,
        } => {
            json_only(cli.format)?;
            let (v, code) = lift(&read_poly(poly)?, at, target.as_deref(), *branch_all, *budget)?;
            json_out(v, code)
        }
        Command::Verify {
            poly,
            nvars,
            grid,
            target,
            random,
            seed,
        } => {
            json_only(cli.format)?;
            let (v, code) = verify(poly.as_deref(), *nvars, grid, target, *random, *seed)?;
            json_out(v, code)
        }
    }
}

/// Runs a parsed command line.
pub fn run(cli: &Cli) -> Outcome {
    match cli.rho {
        Rho::Pi => RhoConstant::Pi,
        Rho::E => RhoConstant::E,
    }
    .set_active();
    match dispatch(cli) {
        Ok((stdout, code)) => Outcome {
            stdout,
            stderr: String::new(),
            code,
        },
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: code_of(&e),
        },
    }
}

/// Parses `args` (without the program name) and runs them.
pub fn run_args<I: IntoIterator<Item = S>, S: Into<std::ffi::OsString> + Clone>(args: I) -> Outcome {
    let argv = std::iter::once(std::ffi::OsString::from("diffkap")).chain(args.into_iter().map(Into::into));
    match Cli::try_parse_from(argv) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let text = e.render().to_string();
            let (stdout, stderr, code) = if e.use_stderr() { (String::new(), text, EXIT_INPUT) } else { (text, String::new(), EXIT_OK) };
            Outcome { stdout, stderr, code }
        }
    }
}
