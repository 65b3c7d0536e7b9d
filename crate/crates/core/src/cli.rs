//! Command-line front end. `run` never exits the process; `main` prints the
//! returned streams and exits with the returned code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use crate::classify::{self, Fingerprint};
use crate::error::{Error, ErrorKind, Result};
use crate::invariants::{self, InvariantParams, Source};
use crate::isometry::{self, KappaFrame, OrbitLimits, OrbitStatus};
use crate::lattice::{homotopy_data, ClassVector, ExplicitLattice, GramLattice, SurfaceModel, SurfaceSpec, XSquare};
use crate::matrix::IntMatrix;
use crate::poly::format_rational;
use crate::walls::{self, ChamberSpace, Polarization, SuitableMode, Suitability};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "ellsurf", version, about = "Lattice, wall and invariant arithmetic for elliptic surfaces")]
struct Cli {
    /// Worker threads for wall enumeration; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct SurfaceArgs {
    /// Surface-spec file (key=value lines).
    #[arg(long, conflicts_with_all = ["pg", "m1", "m2", "r"])]
    spec: Option<PathBuf>,
    #[arg(long)]
    pg: Option<u32>,
    #[arg(long)]
    m1: Option<u64>,
    #[arg(long)]
    m2: Option<u64>,
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct LatticeArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Toy Gram matrix instead of a surface, rows separated by ';'.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "spec")]
    gram: Option<String>,
    /// kappa for --gram.
    #[arg(long, allow_hyphen_values = true, requires = "gram")]
    kappa: Option<String>,
    /// Fiber multiplicity m1 m2 for --gram.
    #[arg(long, default_value_t = 1, requires = "gram")]
    mult: u64,
}

#[derive(Args, Debug, Clone)]
struct WallType {
    #[arg(long, allow_hyphen_values = true)]
    delta: String,
    #[arg(long, allow_hyphen_values = true)]
    c: i64,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum ModeArg {
    /// `n = floor(-p (L0.f)/2) + 1`
    #[value(name = "paper-bound", alias = "explicit-bound")]
    ExplicitBound,
    Minimal,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SourceArg {
    MorganMrowka,
    MorganOgrady,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form invariant data.
    #[command(group(clap::ArgGroup::new("what").required(true).args(["t", "p", "c", "second", "constants"])))]
    Invariant {
        #[command(flatten)]
        surface: SurfaceArgs,
        /// gamma_t for t in 0..=2.
        #[arg(long)]
        t: Option<u32>,
        /// Leading SO(3) coefficient at p (one even multiplicity).
        #[arg(long, allow_hyphen_values = true)]
        p: Option<i64>,
        /// Leading SU(2) coefficient at c.
        #[arg(long, allow_hyphen_values = true)]
        c: Option<i64>,
        /// Second coefficient as printed by the given source.
        #[arg(long, value_enum)]
        second: Option<SourceArg>,
        /// C1 and C2.
        #[arg(long)]
        constants: bool,
    },
    /// Terms of the conjectural generating function up to t = order.
    Series {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        order: u32,
    },
    /// Walls of type (delta, c) separating x and y.
    Walls {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        wall: WallType,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Write the wall list here instead of stdout.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Suitability of L, or construction of a suitable L with --make.
    Suitable {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        wall: WallType,
        #[arg(long = "L", allow_hyphen_values = true)]
        l: String,
        #[arg(long)]
        make: bool,
        #[arg(long, value_enum, default_value = "paper-bound", requires = "make")]
        mode: ModeArg,
    },
    /// Whether two polarizations lie in the same chamber.
    Chamber {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        wall: WallType,
        #[arg(long = "L1", allow_hyphen_values = true)]
        l1: String,
        #[arg(long = "L2", allow_hyphen_values = true)]
        l2: String,
    },
    /// zeta = 2F - delta and l(Z) for a sub-line-bundle class F.
    Destabilize {
        #[command(flatten)]
        lattice: LatticeArgs,
        #[command(flatten)]
        wall: WallType,
        #[arg(long = "F", allow_hyphen_values = true)]
        f: String,
    },
    /// Mod-2 orbits of {w : w.kappa = 1, w^2 = a mod 4}. Generators come
    /// from tau=/ell= lines of the spec file, or the default set.
    IsometryOrbit {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        a: u8,
        #[arg(long, default_value_t = 1 << 16)]
        max_states: usize,
    },
    /// Recover multiplicities from invariant data.
    #[command(group(clap::ArgGroup::new("data").required(true).args(["a_value", "mu"])))]
    Classify {
        #[arg(long = "A", allow_hyphen_values = true, requires = "b_value")]
        a_value: Option<BigInt>,
        #[arg(long = "B", allow_hyphen_values = true)]
        b_value: Option<BigInt>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<BigInt>,
        #[arg(long = "C1", allow_hyphen_values = true, conflicts_with = "an")]
        c1: Option<BigInt>,
        /// Leading coefficient a_n (even case); needs --p.
        #[arg(long, allow_hyphen_values = true, requires = "p")]
        an: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<i64>,
        #[arg(long, default_value_t = 0)]
        pg: u32,
    },
    /// Compare two surfaces given as spec files.
    Distinguish { first: PathBuf, second: PathBuf },
    /// Bauer's f(m1, m2).
    Bauer {
        #[arg(long)]
        m1: u64,
        #[arg(long)]
        m2: u64,
    },
    /// Multiplicity m/gcd(m, d) of a fiber of J^d(S).
    Jd {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
    },
    /// (p_g, r) from b2 and the signature.
    Homotopy {
        #[arg(long)]
        b2: i64,
        #[arg(long, allow_hyphen_values = true)]
        sigma: i64,
    },
    /// Expected dimension -p - 3(p_g+1) and its parity.
    Dimension {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        p: i64,
        /// Delta^2 mod 2; derived from the canonical class when omitted.
        #[arg(long)]
        delta_square: Option<u8>,
    },
    /// Evaluate gamma_t (t <= 2) on a class.
    Evaluate {
        #[command(flatten)]
        surface: SurfaceArgs,
        #[arg(long)]
        t: u32,
        #[arg(long, allow_hyphen_values = true)]
        sigma: String,
    },
    /// Rank, signature and distinguished classes of a surface model.
    Info {
        #[command(flatten)]
        surface: SurfaceArgs,
    },
}

/// A surface spec plus isometry generators listed in the same file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSpec {
    pub spec: SurfaceSpec,
    /// `(tau, ell)`; `tau = None` means the identity.
    pub generators: Vec<(Option<IntMatrix>, Vec<BigInt>)>,
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_int_list(text: &str) -> Result<Vec<BigInt>> {
    text.split(',')
        .map(|t| t.trim().parse::<BigInt>().map_err(|_| parse_err(format!("not an integer: '{}'", t.trim()))))
        .collect()
}

pub fn parse_class(text: &str) -> Result<ClassVector> {
    Ok(ClassVector(parse_int_list(text)?))
}

pub fn parse_matrix(text: &str) -> Result<IntMatrix> {
    text.split(';').map(parse_int_list).collect()
}

/// Parses the `key=value` surface format.
pub fn parse_spec_text(text: &str) -> Result<ParsedSpec> {
    let (mut pg, mut m1, mut m2, mut r) = (None, None, None, 0usize);
    let (mut gram, mut kappa, mut x) = (None, None, None);
    let mut x_square = XSquare::Auto;
    let mut generators = Vec::new();
    // a tau= line waiting for its ell= line(s)
    let mut pending: Option<(IntMatrix, bool)> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| parse_err(format!("line {}: expected key=value", no + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let num = |v: &str| v.parse::<u64>().map_err(|_| parse_err(format!("line {}: bad number '{v}'", no + 1)));
        match key {
            "pg" => pg = Some(u32::try_from(num(value)?).map_err(|_| parse_err("pg out of range"))?),
            "m1" => m1 = Some(num(value)?),
            "m2" => m2 = Some(num(value)?),
            "r" => r = usize::try_from(num(value)?).map_err(|_| parse_err("r out of range"))?,
            "x2" => {
                x_square = match value {
                    "0" => XSquare::Zero,
                    "1" => XSquare::One,
                    "auto" => XSquare::Auto,
                    _ => return Err(parse_err(format!("line {}: x2 must be 0, 1 or auto", no + 1))),
                }
            }
            "gram" => gram = Some(parse_matrix(value)?),
            "kappa" => kappa = Some(parse_class(value)?),
            "x" => x = Some(parse_class(value)?),
            "tau" => {
                if let Some((t, false)) = pending.take() {
                    generators.push((Some(t), Vec::new()));
                }
                pending = Some((parse_matrix(value)?, false));
            }
            "ell" => {
                let ell = parse_int_list(value)?;
                let tau = match &mut pending {
                    Some((t, used)) => {
                        *used = true;
                        Some(t.clone())
                    }
                    None => None,
                };
                generators.push((tau, ell));
            }
            other => return Err(parse_err(format!("line {}: unknown key '{other}'", no + 1))),
        }
    }
    if let Some((t, false)) = pending {
        generators.push((Some(t), Vec::new()));
    }
    let missing = |k: &str| parse_err(format!("missing key '{k}'"));
    let mut spec = SurfaceSpec::new(pg.ok_or_else(|| missing("pg"))?, m1.ok_or_else(|| missing("m1"))?, m2.ok_or_else(|| missing("m2"))?, r);
    spec.x_square = x_square;
    spec.explicit = match (gram, kappa, x) {
        (None, None, None) => None,
        (Some(gram), Some(kappa), Some(x)) => Some(ExplicitLattice { gram, kappa, x }),
        _ => return Err(parse_err("gram, kappa and x must be given together")),
    };
    Ok(ParsedSpec { spec, generators })
}

/// Parses and validates a surface spec.
pub fn parse_surface_spec(text: &str) -> Result<SurfaceModel> {
    parse_spec_text(text)?.spec.build()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| parse_err(format!("cannot read {}: {e}", path.display())))
}

fn load_spec(args: &SurfaceArgs) -> Result<ParsedSpec> {
    if let Some(path) = &args.spec {
        return parse_spec_text(&read(path)?);
    }
    let need = |v: Option<u64>, k: &str| v.ok_or_else(|| parse_err(format!("give --spec or --pg/--m1/--m2 (missing --{k})")));
    let pg = args.pg.ok_or_else(|| parse_err("give --spec or --pg/--m1/--m2 (missing --pg)"))?;
    let spec = SurfaceSpec::new(pg, need(args.m1, "m1")?, need(args.m2, "m2")?, args.r.unwrap_or(0));
    Ok(ParsedSpec { spec, generators: Vec::new() })
}

fn load_model(args: &SurfaceArgs) -> Result<SurfaceModel> {
    load_spec(args)?.spec.build()
}

/// Parameters only: flags skip building the lattice; spec files are validated.
fn load_params(args: &SurfaceArgs) -> Result<InvariantParams> {
    if args.spec.is_some() {
        return Ok(InvariantParams::of_model(&load_model(args)?));
    }
    let spec = load_spec(args)?.spec;
    InvariantParams::new(spec.pg, spec.m1, spec.m2)
}

fn load_space(args: &LatticeArgs, jobs: usize) -> Result<ChamberSpace> {
    let space = match &args.gram {
        Some(g) => {
            let lattice = GramLattice::new(parse_matrix(g)?)?;
            let kappa = parse_class(args.kappa.as_deref().ok_or_else(|| parse_err("--gram needs --kappa"))?)?;
            ChamberSpace::new(lattice, kappa, BigInt::from(args.mult))?
        }
        None => ChamberSpace::from_model(&load_model(&args.surface)?)?,
    };
    Ok(space.with_jobs(jobs))
}

fn polarization(space: &ChamberSpace, text: &str) -> Result<Polarization> {
    Polarization::new(space, parse_class(text)?)
}

fn execute(cli: Cli) -> Result<String> {
    let mut out = String::new();
    let jobs = cli.jobs;
    match cli.command {
        Command::Invariant { surface, t, p, c, second, constants } => {
            let params = load_params(&surface)?;
            if let Some(t) = t {
                writeln!(out, "gamma_{t} = {}", invariants::gamma_small(&params, t)?).unwrap();
            } else if let Some(p) = p {
                let a = invariants::leading_coeff_so3_even(&params, p)?;
                writeln!(out, "a_n = {}", format_rational(&a)).unwrap();
            } else if let Some(c) = c {
                let a = invariants::leading_coeff_su2(&params, c)?;
                writeln!(out, "a_n = {}", format_rational(&a)).unwrap();
            } else if let Some(src) = second {
                let src = match src {
                    SourceArg::MorganMrowka => Source::MorganMrowka,
                    SourceArg::MorganOgrady => Source::MorganOGrady,
                };
                writeln!(out, "a_(n-1) = {}", invariants::second_coeff_printed(&params, src)?).unwrap();
            } else if constants {
                let (c1, c2) = invariants::invariant_constants(&params);
                writeln!(out, "C1 = {c1}\nC2 = {c2}").unwrap();
            }
        }
        Command::Series { surface, order } => {
            let params = load_params(&surface)?;
            for t in 0..=order {
                let g = invariants::gamma_t_conjectural(&params, t);
                let tag = if t >= 3 { "  (conjectural series term)" } else { "" };
                writeln!(out, "gamma_{t} = {g}{tag}").unwrap();
            }
        }
        Command::Walls { lattice, wall, x, y, dump } => {
            let space = load_space(&lattice, jobs)?;
            let (x, y) = (polarization(&space, &x)?, polarization(&space, &y)?);
            let found = space.separating_walls(&x, &y, &parse_class(&wall.delta)?, &BigInt::from(wall.c))?;
            let listing: String = found.iter().map(|w| format!("{w}\n")).collect();
            match dump {
                Some(path) => {
                    std::fs::write(&path, &listing)
                        .map_err(|e| parse_err(format!("cannot write {}: {e}", path.display())))?;
                    writeln!(out, "walls={} file={}", found.len(), path.display()).unwrap();
                }
                None => out.push_str(&listing),
            }
        }
        Command::Suitable { lattice, wall, l, make, mode } => {
            let space = load_space(&lattice, jobs)?;
            let l = polarization(&space, &l)?;
            let (delta, c) = (parse_class(&wall.delta)?, BigInt::from(wall.c));
            if make {
                let mode = match mode {
                    ModeArg::ExplicitBound => SuitableMode::ExplicitBound,
                    ModeArg::Minimal => SuitableMode::Minimal,
                };
                let (n, found) = space.make_suitable(&l, &delta, &c, mode)?;
                writeln!(out, "n={n} L={}", found.class()).unwrap();
            } else {
                match space.is_suitable(&l, &delta, &c)? {
                    Suitability::Suitable => writeln!(out, "suitable=true").unwrap(),
                    Suitability::Unsuitable(w) => writeln!(out, "suitable=false witness={w}").unwrap(),
                }
            }
        }
        Command::Chamber { lattice, wall, l1, l2 } => {
            let space = load_space(&lattice, jobs)?;
            let (l1, l2) = (polarization(&space, &l1)?, polarization(&space, &l2)?);
            let same = space.same_chamber(&l1, &l2, &parse_class(&wall.delta)?, &BigInt::from(wall.c))?;
            writeln!(out, "same-chamber={same}").unwrap();
        }
        Command::Destabilize { lattice, wall, f } => {
            let space = load_space(&lattice, jobs)?;
            let d = walls::destabilizing_data(space.lattice(), &parse_class(&f)?, &parse_class(&wall.delta)?, &BigInt::from(wall.c))?;
            writeln!(out, "zeta={} colength={} wall={}", d.zeta, d.colength, d.is_wall).unwrap();
        }
        Command::IsometryOrbit { surface, a, max_states } => {
            let parsed = load_spec(&surface)?;
            let model = parsed.spec.build()?;
            let frame = KappaFrame::from_model(&model)?;
            let gens = if parsed.generators.is_empty() {
                isometry::default_generators(&frame)?
            } else {
                parsed
                    .generators
                    .into_iter()
                    .map(|(tau, ell)| {
                        let tau = tau.unwrap_or_else(|| crate::matrix::identity(frame.w_rank()));
                        let ell = if ell.is_empty() { vec![BigInt::from(0); frame.w_rank()] } else { ell };
                        isometry::build_kappa_isometry(&frame, tau, ell)
                    })
                    .collect::<Result<Vec<_>>>()?
            };
            let report = isometry::model_mod2_orbit(&model, a, &gens, OrbitLimits { max_states })?;
            let status = match report.status {
                OrbitStatus::SingleOrbit => "single-orbit",
                OrbitStatus::MultipleOrbits => "multiple-orbits",
                OrbitStatus::Truncated => "truncated",
                OrbitStatus::Empty => "empty",
            };
            let candidates = report.candidates.map_or_else(|| "unknown".to_string(), |n| n.to_string());
            let sizes: Vec<String> = report.orbits.iter().map(|o| o.len().to_string()).collect();
            writeln!(out, "generators={} candidates={candidates} orbits={} status={status}", gens.len(), report.orbits.len()).unwrap();
            writeln!(out, "sizes={}", sizes.join(",")).unwrap();
            let x = model.x_class().reduce_mod2();
            let preserving: Vec<_> = gens.iter().filter(|g| g.lattice_preserving()).collect();
            let fixed = preserving.iter().all(|g| isometry::apply_mod2(&g.mod2_matrix(), &x) == x);
            writeln!(out, "x-fixed-by-lattice-preserving={fixed} ({} generators)", preserving.len()).unwrap();
        }
        Command::Classify { a_value, b_value, mu, c1, an, p, pg } => {
            let (m1, m2) = if let (Some(a), Some(b)) = (a_value, b_value) {
                classify::recover_from_ab(&a, &b)?
            } else {
                let mu = mu.expect("group requires --A or --mu");
                if let Some(c1) = c1 {
                    classify::recover_with_product(&mu, &c1, pg)?
                } else if let (Some(an), Some(p)) = (an, p) {
                    let an: num_rational::BigRational =
                        an.parse().map_err(|_| parse_err(format!("not a rational: '{an}'")))?;
                    classify::recover_even(&mu, &an, p, pg)?
                } else {
                    return Err(parse_err("--mu needs --C1, or --an with --p"));
                }
            };
            let (lo, hi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
            writeln!(out, "m = {{{lo},{hi}}}").unwrap();
        }
        Command::Distinguish { first, second } => {
            let a = parse_surface_spec(&read(&first)?)?;
            let b = parse_surface_spec(&read(&second)?)?;
            let v = classify::distinguish(&Fingerprint::of_model(&a), &Fingerprint::of_model(&b));
            writeln!(out, "{v}").unwrap();
        }
        Command::Bauer { m1, m2 } => writeln!(out, "f = {}", classify::bauer_f(m1, m2)?).unwrap(),
        Command::Jd { m, d } => {
            if m == 0 {
                return Err(Error::ZeroMultiplicity);
            }
            writeln!(out, "multiplicity = {}", classify::jd_multiplicity(m, d)).unwrap();
        }
        Command::Homotopy { b2, sigma } => {
            let (pg, r) = homotopy_data(b2, sigma)?;
            writeln!(out, "pg={pg} r={r}").unwrap();
        }
        Command::Dimension { surface, p, delta_square } => {
            let params = load_params(&surface)?;
            let rep = invariants::expected_dimension_and_parity(&params, p, delta_square);
            writeln!(
                out,
                "d={} parity={} delta_square_mod2={} p_consistent={}",
                rep.d,
                if rep.d_odd { "odd" } else { "even" },
                rep.delta_square_mod2,
                rep.p_consistent
            )
            .unwrap();
        }
        Command::Evaluate { surface, t, sigma } => {
            let model = load_model(&surface)?;
            let g = invariants::gamma_small(&InvariantParams::of_model(&model), t)?;
            let v = invariants::evaluate_on_class(&model, &g, &parse_class(&sigma)?)?;
            writeln!(out, "gamma_{t}(Sigma) = {}", format_rational(&v)).unwrap();
        }
        Command::Info { surface } => {
            let m = load_model(&surface)?;
            let (pos, neg) = m.lattice().signature();
            let xsq = m.lattice().square(m.x_class())?;
            writeln!(out, "rank={} signature=({pos},{neg}) even={}", m.rank(), m.lattice().is_even()).unwrap();
            writeln!(out, "kappa={}", m.kappa()).unwrap();
            writeln!(out, "x={} x^2={xsq}", m.x_class()).unwrap();
            writeln!(out, "K={}", m.canonical()).unwrap();
            match m.w_block() {
                Some(w) => writeln!(out, "W={}..{}", w.start, w.end).unwrap(),
                None => writeln!(out, "W=none").unwrap(),
            }
        }
    }
    Ok(out)
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                // clap's message up to the usage block, on one line
                let head: Vec<&str> =
                    text.lines().take_while(|l| !l.trim().is_empty()).map(str::trim).collect();
                Outcome { code: 2, stdout: String::new(), stderr: format!("{}\n", head.join(" ")) }
            } else {
                Outcome { code: 0, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(cli) {
        Ok(stdout) => Outcome { code: 0, stdout, stderr: String::new() },
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Domain => 3,
            };
            Outcome { code, stdout: String::new(), stderr: format!("error: {e}\n") }
        }
    }
}
