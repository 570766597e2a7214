use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quadrirational::catalog::Family;
use quadrirational::consistency::IdentityTestConfig;

mod demos;
mod input;
mod maps;
mod report;
mod verify;

use report::{Outcome, Report};

/// Exact verification and classification of quadrirational Yang-Baxter maps.
///
/// Every claim prints one JSON line. Exit status: 0 if no claim fails,
/// 1 if a claim fails, 2 on bad arguments or unusable input.
#[derive(Parser)]
#[command(name = "qrmap", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Identity checks on catalog maps
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Type, parameters and normalizing Möbius changes of a map
    Classify {
        #[arg(long)]
        map: PathBuf,
    },
    /// Writes the normal form F_T(α, β) of a map
    Canonicalize {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Builds a map from defining data
    Construct(ConstructArgs),
    /// Lax representations
    #[command(subcommand)]
    Lax(LaxCmd),
    /// Pencil-of-conics constructions
    #[command(subcommand)]
    Geometry(GeometryCmd),
    /// Exceptional curves and blow-ups
    #[command(subcommand)]
    Blow(BlowCmd),
    /// Free-point and matrix versions of the conic map
    #[command(subcommand)]
    Multifield(MultifieldCmd),
}

#[derive(Clone, Copy, ValueEnum)]
pub enum CheckMode {
    Exact,
    Random,
}

#[derive(Args, Clone, Copy)]
pub struct ModeArgs {
    #[arg(long, value_enum, default_value = "random")]
    mode: CheckMode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModeArgs {
    pub fn config(&self) -> IdentityTestConfig {
        match self.mode {
            CheckMode::Exact => IdentityTestConfig::exact(),
            CheckMode::Random => IdentityTestConfig::random(self.seed),
        }
    }

    pub fn describe(&self) -> String {
        match self.mode {
            CheckMode::Exact => "mode=exact".into(),
            CheckMode::Random => format!("mode=random seed={}", self.seed),
        }
    }
}

#[derive(Args, Clone)]
pub struct FamilyArgs {
    #[arg(long)]
    family: Family,
    #[arg(long, allow_hyphen_values = true)]
    alpha: String,
    #[arg(long, allow_hyphen_values = true)]
    beta: String,
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// R23 R13 R12 = R12 R13 R23 with R_ij = F(a_i, a_j)
    Yb {
        #[arg(long)]
        family: Family,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// 3D consistency of the cube with face maps F(a_i, a_j)
    #[command(name = "3d")]
    ThreeD {
        #[arg(long)]
        family: Family,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// 3D consistency of the cube with one [1:2] and two different face types
    MixedCube {
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// F∘F = id
    Involution {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        mode: ModeArgs,
    },
    /// The companion of F equals F
    Companion {
        #[command(flatten)]
        fam: FamilyArgs,
        #[command(flatten)]
        mode: ModeArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum ConstructMode {
    /// Φ(y, x, v) and Φ̂(y, u, v): two polynomial files
    Semilinear,
    /// Φ(y, x, v) quadratic in x and a Möbius matrix: two files
    Quadratic,
    /// The output of `classify`
    Canonical,
    /// Singularity data on x, y, u, v: four files
    EdgeData,
}

#[derive(Args)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    mode: ConstructMode,
    #[arg(long = "in", num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
    /// Write the map JSON here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compare with this map on an exact grid
    #[arg(long)]
    expect: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LaxCmd {
    /// Checks the Lax relation at random rational (x, y, λ)
    Verify {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Matrix file {"side": "L"|"M", "entries": 2×2 polynomials in (w, p, λ)}
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PencilArg {
    #[value(name = "I")]
    I,
    #[value(name = "V")]
    V,
}

#[derive(Subcommand)]
enum GeometryCmd {
    /// Incidence of the cube of conic maps on a pencil
    Incidence {
        #[arg(long = "type", value_enum)]
        ty: PencilArg,
        /// Parameters of the three conics; random projective pencils if omitted
        #[arg(long, allow_hyphen_values = true)]
        params: Option<String>,
        /// Points "w1,w2;w1,w2;w1,w2" on the three conics (with --params)
        #[arg(long, allow_hyphen_values = true, value_delimiter = ';')]
        points: Option<Vec<String>>,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// (X, Y) -> (U, V) on the conics Q(α), Q(β) of the normal pencil
    Map {
        #[arg(long = "type", value_enum)]
        ty: PencilArg,
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// SVG of the conics, the line XY and the points X, Y, U, V
    Svg {
        #[arg(long)]
        out: PathBuf,
        #[arg(long = "type", value_enum, default_value = "I")]
        ty: PencilArg,
        #[arg(long, allow_hyphen_values = true, default_value = "2")]
        alpha: String,
        #[arg(long, allow_hyphen_values = true, default_value = "3")]
        beta: String,
        /// Parameter of X on Q(α)
        #[arg(long, allow_hyphen_values = true, default_value = "1/2")]
        x: String,
        /// Parameter of Y on Q(β)
        #[arg(long, allow_hyphen_values = true, default_value = "-1")]
        y: String,
    },
}

#[derive(Subcommand)]
enum BlowCmd {
    /// Exceptional curves and the points they are contracted to
    Down {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The curve of limits at each simple singular point
    Up {
        #[command(flatten)]
        fam: FamilyArgs,
        /// Approach direction (dx, dy) as p/q
        #[arg(long, allow_hyphen_values = true)]
        slope: Option<String>,
        /// Index of the singular point (default: all)
        #[arg(long)]
        point: Option<usize>,
    },
}

#[derive(Subcommand)]
enum MultifieldCmd {
    /// 3D consistency of the free-point map on random affine pencils
    Verify {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
        n: u8,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    /// 3D consistency of the matrix map under both inverse conventions
    Matrix {
        #[arg(long, default_value_t = 2)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

fn run(cmd: Cmd) -> input::Res<Vec<Report>> {
    match cmd {
        Cmd::Verify(v) => match v {
            VerifyCmd::Yb { family, params, mode } => verify::yang_baxter(family, &params, mode),
            VerifyCmd::ThreeD { family, params, mode } => verify::three_d(family, &params, mode),
            VerifyCmd::MixedCube { params, mode } => verify::mixed_cube(&params, mode),
            VerifyCmd::Involution { fam, mode } => verify::involution(&fam, mode),
            VerifyCmd::Companion { fam, mode } => verify::companion(&fam, mode),
        },
        Cmd::Classify { map } => maps::classify(&map),
        Cmd::Canonicalize { map, out } => maps::canonicalize(&map, &out),
        Cmd::Construct(a) => maps::construct(&a),
        Cmd::Lax(LaxCmd::Verify { fam, matrix, samples, seed }) => demos::lax(&fam, matrix.as_deref(), samples, seed),
        Cmd::Geometry(g) => match g {
            GeometryCmd::Incidence { ty, params, points, count, seed } => demos::incidence(ty, params.as_deref(), points.as_deref(), count, seed),
            GeometryCmd::Map { ty, alpha, beta, x, y } => demos::conic_map(ty, &alpha, &beta, &x, &y),
            GeometryCmd::Svg { out, ty, alpha, beta, x, y } => demos::svg(&out, ty, &alpha, &beta, &x, &y),
        },
        Cmd::Blow(b) => match b {
            BlowCmd::Down { fam, seed } => demos::blow_down(&fam, seed),
            BlowCmd::Up { fam, slope, point } => demos::blow_up(&fam, slope.as_deref(), point),
        },
        Cmd::Multifield(m) => match m {
            MultifieldCmd::Verify { n, seed, count } => demos::multifield(n as usize, seed, count),
            MultifieldCmd::Matrix { size, seed, count } => demos::matrix_map(size, seed, count),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(reports) => {
            for r in &reports {
                println!("{}", r.line());
            }
            if reports.iter().any(|r| r.verdict == Outcome::Fail) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
