//! `varsep`: certified bounds on the distance from a point in C^2 to the
//! zero set of a bivariate polynomial, a brute-force distance estimate to
//! check them against, and a quadtree curve renderer driven by the lower
//! bound as an exclusion predicate.
//!
//! Exit codes: 0 success, 2 expression parse error, 3 point on the zero
//! set (or identically zero input), 4 failed sandwich check, 1 anything
//! else.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use varsep::bounds::{bound_report, sep_lower, sep_upper, BoundsError};
use varsep::oracle::{sep_estimate, OracleError, SamplingPlan};
use varsep::polynomial::Point2;
use varsep::subdivision::{box_list, render_svg, subdivide, BoxRegion, SubdivisionError};
use varsep::Complex64;
use varsep_cli::parse::{parse_poly, pretty, ParseError, ParsedExpression};
use varsep_cli::random;
use varsep_cli::report::{complex, fmt_f64, number, point as point_json, to_json};

#[derive(Parser)]
#[command(
    name = "varsep",
    version,
    about = "Certified distance bounds to the zero set of a bivariate polynomial"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct PolyInput {
    /// Polynomial in x and y, e.g. "x^2+y^2-1"
    #[arg(short = 'f', long = "poly", value_name = "EXPR")]
    expr: Option<String>,
    /// Read the expression from a file instead
    #[arg(long, value_name = "PATH")]
    file: Option<PathBuf>,
}

impl PolyInput {
    fn load(&self) -> Result<ParsedExpression> {
        let text = match (&self.expr, &self.file) {
            (Some(e), None) => e.clone(),
            (None, Some(path)) => std::fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?
                .trim()
                .to_string(),
            (Some(_), Some(_)) => bail!("pass either -f/--poly or --file, not both"),
            (None, None) => bail!("missing polynomial: pass -f/--poly or --file"),
        };
        Ok(parse_poly(&text)?)
    }
}

#[derive(Clone, Copy, Debug)]
struct PointArg(Point2);

fn parse_point(s: &str) -> Result<PointArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(format!(
            "expected four comma-separated reals re_x,im_x,re_y,im_y, got {} fields",
            parts.len()
        ));
    }
    let mut v = [0.0_f64; 4];
    for (k, raw) in parts.iter().enumerate() {
        v[k] = raw
            .trim()
            .parse()
            .map_err(|e| format!("field {}: {e}", k + 1))?;
        if !v[k].is_finite() {
            return Err(format!("field {} must be finite", k + 1));
        }
    }
    Ok(PointArg(Point2::new(
        Complex64::new(v[0], v[1]),
        Complex64::new(v[2], v[3]),
    )))
}

#[derive(Clone, Copy, Debug)]
struct BoxArg {
    cx: f64,
    cy: f64,
    half_width: f64,
}

fn parse_box(s: &str) -> Result<BoxArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!(
            "expected cx,cy,half_width, got {} fields",
            parts.len()
        ));
    }
    let mut v = [0.0_f64; 3];
    for (k, raw) in parts.iter().enumerate() {
        v[k] = raw
            .trim()
            .parse()
            .map_err(|e| format!("field {}: {e}", k + 1))?;
        if !v[k].is_finite() {
            return Err(format!("field {} must be finite", k + 1));
        }
    }
    if v[2] <= 0.0 {
        return Err("half_width must be positive".into());
    }
    Ok(BoxArg {
        cx: v[0],
        cy: v[1],
        half_width: v[2],
    })
}

#[derive(Args, Debug)]
struct PlanArgs {
    /// Grid points in the amplitude angle of the direction sweep
    #[arg(long, default_value_t = 64)]
    n_alpha: usize,
    /// Grid points in the first phase angle (1 loses nothing)
    #[arg(long, default_value_t = 1)]
    n_beta: usize,
    /// Grid points in the second phase angle
    #[arg(long, default_value_t = 64)]
    n_phi: usize,
    /// Local refinement passes around the best direction
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    /// Window shrink per refinement pass, strictly between 0 and 1
    #[arg(long, default_value_t = 0.2)]
    shrink: f64,
}

impl PlanArgs {
    fn to_plan(&self) -> Result<SamplingPlan> {
        if self.n_alpha < 1 || self.n_beta < 1 || self.n_phi < 1 {
            bail!("direction grid sizes must be at least 1");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            bail!("--shrink must lie strictly between 0 and 1");
        }
        Ok(SamplingPlan {
            n_alpha: self.n_alpha,
            n_beta: self.n_beta,
            n_phi: self.n_phi,
            refinement_rounds: self.rounds,
            shrink: self.shrink,
        })
    }

    fn as_json(&self) -> Value {
        json!({
            "n_alpha": self.n_alpha,
            "n_beta": self.n_beta,
            "n_phi": self.n_phi,
            "refinement_rounds": self.rounds,
            "shrink": number(self.shrink),
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Certified lower and upper distance bounds at a point
    Bounds {
        #[command(flatten)]
        input: PolyInput,
        /// Point in C^2 as re_x,im_x,re_y,im_y
        #[arg(short = 'p', long = "point", value_parser = parse_point)]
        point: PointArg,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Direction-sweep distance estimate (an upper estimate of the truth)
    Oracle {
        #[command(flatten)]
        input: PolyInput,
        /// Point in C^2 as re_x,im_x,re_y,im_y
        #[arg(short = 'p', long = "point", value_parser = parse_point)]
        point: PointArg,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Verify lower <= estimate <= upper*(1+delta), single or batch
    Check {
        #[command(flatten)]
        input: PolyInput,
        /// Point in C^2 as re_x,im_x,re_y,im_y (single-instance mode)
        #[arg(short = 'p', long = "point", value_parser = parse_point)]
        point: Option<PointArg>,
        /// Accepted relative slack on the upper bound
        #[arg(long, default_value_t = 0.05)]
        delta: f64,
        /// Batch mode: draw seeded random instances instead of -f/-p
        #[arg(long)]
        random: bool,
        /// Number of random instances in batch mode
        #[arg(short = 'n', long = "count", default_value_t = 200)]
        count: usize,
        /// Maximum total degree drawn in batch mode
        #[arg(long, default_value_t = 6)]
        degree: usize,
        /// Seed for batch mode; equal seeds give byte-identical output
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Quadtree exclusion rendering of a real curve over a square box
    Subdivide {
        #[command(flatten)]
        input: PolyInput,
        /// Root box as cx,cy,half_width
        #[arg(long = "box", value_parser = parse_box, default_value = "0,0,2")]
        root: BoxArg,
        /// Depth cap of the quadtree
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(0..=24))]
        depth: u32,
        /// Write an SVG rendering here
        #[arg(short = 'o', long = "out", value_name = "SVG")]
        out: Option<PathBuf>,
        /// Write the plain-text box list here
        #[arg(long, value_name = "PATH")]
        boxes: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(classify(&err))
        }
    }
}

fn classify(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<ParseError>().is_some() {
        return 2;
    }
    if err.downcast_ref::<BoundsError>().is_some() {
        // Both variants mean the query point sits on the zero set
        // (everywhere, for the zero polynomial).
        return 3;
    }
    if let Some(e) = err.downcast_ref::<OracleError>() {
        return match e {
            OracleError::OnVariety | OracleError::IdenticallyZero => 3,
            OracleError::EmptyVariety => 1,
        };
    }
    if let Some(e) = err.downcast_ref::<SubdivisionError>() {
        return match e {
            SubdivisionError::IdenticallyZero => 3,
            _ => 1,
        };
    }
    1
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Bounds {
            input,
            point,
            format,
        } => cmd_bounds(&input, point.0, format),
        Command::Oracle {
            input,
            point,
            plan,
            format,
        } => cmd_oracle(&input, point.0, &plan, format),
        Command::Check {
            input,
            point,
            delta,
            random,
            count,
            degree,
            seed,
            plan,
            format,
        } => {
            if random {
                if input.expr.is_some() || input.file.is_some() || point.is_some() {
                    bail!("batch mode draws its own polynomials; drop -f/-p");
                }
                cmd_check_random(count, degree, seed, delta, &plan, format)
            } else {
                let Some(point) = point else {
                    bail!("single-instance check needs -p/--point (or use --random)")
                };
                cmd_check_single(&input, point.0, delta, &plan, format)
            }
        }
        Command::Subdivide {
            input,
            root,
            depth,
            out,
            boxes,
            format,
        } => cmd_subdivide(
            &input,
            root,
            depth,
            out.as_deref(),
            boxes.as_deref(),
            format,
        ),
    }
}

fn cmd_bounds(input: &PolyInput, p: Point2, format: Format) -> Result<ExitCode> {
    let parsed = input.load()?;
    let rep = bound_report(&parsed.poly, p)?;
    match format {
        Format::Json => {
            let per: Vec<Value> = rep
                .per_order
                .iter()
                .map(|r| json!({"k": r.k, "max_ratio": number(r.max_ratio)}))
                .collect();
            let v = json!({
                "degree": rep.degree,
                "gamma": number(rep.gamma),
                "lower": number(rep.lower),
                "lower_coarse": number(rep.lower_coarse),
                "per_order": per,
                "point": point_json(p),
                "poly": pretty(&parsed.poly),
                "upper": number(rep.upper),
                "value_at_p": complex(rep.value_at_p),
            });
            print!("{}", to_json(&v));
        }
        Format::Text => {
            let mut out = String::new();
            let _ = writeln!(out, "degree {}", rep.degree);
            let _ = writeln!(
                out,
                "value_at_p {} {}",
                fmt_f64(rep.value_at_p.re),
                fmt_f64(rep.value_at_p.im)
            );
            let _ = writeln!(out, "gamma {}", fmt_f64(rep.gamma));
            let _ = writeln!(out, "lower {}", fmt_f64(rep.lower));
            let _ = writeln!(out, "lower_coarse {}", fmt_f64(rep.lower_coarse));
            let _ = writeln!(out, "upper {}", fmt_f64(rep.upper));
            for r in &rep.per_order {
                let _ = writeln!(out, "per_order {} {}", r.k, fmt_f64(r.max_ratio));
            }
            print!("{out}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(
    input: &PolyInput,
    p: Point2,
    plan_args: &PlanArgs,
    format: Format,
) -> Result<ExitCode> {
    let parsed = input.load()?;
    let plan = plan_args.to_plan()?;
    let est = sep_estimate(&parsed.poly, p, &plan)?;
    match format {
        Format::Json => {
            let v = json!({
                "directions_sampled": est.directions_sampled,
                "plan": plan_args.as_json(),
                "point": point_json(p),
                "poly": pretty(&parsed.poly),
                "refined": est.refined,
                "value": number(est.value),
                "witness": point_json(est.witness),
            });
            print!("{}", to_json(&v));
        }
        Format::Text => {
            println!("value {}", fmt_f64(est.value));
            println!(
                "witness {} {} {} {}",
                fmt_f64(est.witness.x.re),
                fmt_f64(est.witness.x.im),
                fmt_f64(est.witness.y.re),
                fmt_f64(est.witness.y.im)
            );
            println!("directions_sampled {}", est.directions_sampled);
            println!("refined {}", est.refined);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check_single(
    input: &PolyInput,
    p: Point2,
    delta: f64,
    plan_args: &PlanArgs,
    format: Format,
) -> Result<ExitCode> {
    let parsed = input.load()?;
    let plan = plan_args.to_plan()?;
    let lower = sep_lower(&parsed.poly, p)?;
    let upper = sep_upper(&parsed.poly, p)?;
    let est = sep_estimate(&parsed.poly, p, &plan)?;
    let pass = lower <= est.value + 1e-9 && est.value <= upper * (1.0 + delta);
    let verdict = if pass { "PASS" } else { "FAIL" };
    match format {
        Format::Json => {
            let v = json!({
                "delta": number(delta),
                "estimate": number(est.value),
                "lower": number(lower),
                "point": point_json(p),
                "poly": pretty(&parsed.poly),
                "upper": number(upper),
                "verdict": verdict,
                "witness": point_json(est.witness),
            });
            print!("{}", to_json(&v));
        }
        Format::Text => {
            println!(
                "verdict {verdict} lower {} estimate {} upper {}",
                fmt_f64(lower),
                fmt_f64(est.value),
                fmt_f64(upper)
            );
        }
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

fn cmd_check_random(
    count: usize,
    degree: usize,
    seed: u64,
    delta: f64,
    plan_args: &PlanArgs,
    format: Format,
) -> Result<ExitCode> {
    if degree == 0 {
        bail!("--degree must be at least 1");
    }
    let plan = plan_args.to_plan()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0_usize;
    let mut worst_lower_gap = f64::INFINITY;
    let mut worst_upper_ratio = 0.0_f64;
    for _ in 0..count {
        let (f, p) = random::instance(&mut rng, degree);
        let lower = sep_lower(&f, p)?;
        let upper = sep_upper(&f, p)?;
        let est = sep_estimate(&f, p, &plan)?.value;
        worst_lower_gap = worst_lower_gap.min(est - lower);
        if upper.is_finite() && upper > 0.0 {
            worst_upper_ratio = worst_upper_ratio.max(est / upper);
        }
        if lower > est + 1e-9 || est > upper * (1.0 + delta) {
            violations += 1;
        }
    }
    let verdict = if violations == 0 { "PASS" } else { "FAIL" };
    match format {
        Format::Json => {
            let v = json!({
                "checked": count,
                "degree_max": degree,
                "delta": number(delta),
                "seed": seed,
                "verdict": verdict,
                "violations": violations,
                "worst_lower_gap": number(worst_lower_gap),
                "worst_upper_ratio": number(worst_upper_ratio),
            });
            print!("{}", to_json(&v));
        }
        Format::Text => {
            println!(
                "verdict {verdict} checked {count} violations {violations} \
                 worst_lower_gap {} worst_upper_ratio {}",
                fmt_f64(worst_lower_gap),
                fmt_f64(worst_upper_ratio)
            );
        }
    }
    Ok(if violations == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

fn cmd_subdivide(
    input: &PolyInput,
    root: BoxArg,
    depth: u32,
    svg_path: Option<&std::path::Path>,
    boxes_path: Option<&std::path::Path>,
    format: Format,
) -> Result<ExitCode> {
    let parsed = input.load()?;
    let root_box = BoxRegion::root((root.cx, root.cy), root.half_width);
    let outcome = subdivide(&parsed.poly, root_box, depth)?;
    if let Some(path) = svg_path {
        std::fs::write(path, render_svg(&outcome, &root_box))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = boxes_path {
        std::fs::write(path, box_list(&outcome))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    match format {
        Format::Json => {
            let per: Vec<Value> = outcome
                .per_depth
                .iter()
                .map(|d| {
                    json!({
                        "depth": d.depth,
                        "excluded": d.excluded,
                        "undecided": d.undecided,
                    })
                })
                .collect();
            let v = json!({
                "box_list": boxes_path.map(|p| p.display().to_string()),
                "excluded": outcome.excluded.len(),
                "max_depth": depth,
                "per_depth": per,
                "poly": pretty(&parsed.poly),
                "predicate_evaluations": outcome.predicate_evaluations,
                "root": {
                    "center": [number(root.cx), number(root.cy)],
                    "half_width": number(root.half_width),
                },
                "svg": svg_path.map(|p| p.display().to_string()),
                "undecided": outcome.undecided.len(),
            });
            print!("{}", to_json(&v));
        }
        Format::Text => {
            println!("excluded {}", outcome.excluded.len());
            println!("undecided {}", outcome.undecided.len());
            println!("predicate_evaluations {}", outcome.predicate_evaluations);
            for d in &outcome.per_depth {
                println!(
                    "depth {} excluded {} undecided {}",
                    d.depth, d.excluded, d.undecided
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
