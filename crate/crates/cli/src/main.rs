use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cslab::config_space::{
    build_config_complex, cn_graphs, components, has_n_cycle, hypothesis_report, perfectness_check,
    sn_action_on_components, PointCloud, ReportOptions, DEFAULT_NODE_BUDGET,
};
use cslab::divided_diff::{limit_probe, regularity_verdict, ProbeConfig, ProbeReport, VerdictThresholds};
use cslab::frames::evert;
use cslab::harness::{
    collision_path_probe, cs_preserver_check, run_scenario, CollisionConfig, CollisionFamily, CsCheckConfig,
    ExperimentConfig, InputClass, MapName, Scenario,
};
use cslab::linalg::{ComplexMatrix, Frame};
use cslab::operators::{exotic_evert, exotic_polar, SemisimpleOp, SpectralDomain};
use cslab::random::{random_frame, rng_for};
use cslab::wire::{CloudJson, DomainJson, FrameJson, MatrixJson, OperatorJson, PermutationJson};
use cslab::{Complex64, Error, Exec};

const EXIT_PROPERTY: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Parser)]
#[command(name = "cslab", version, about = "Commutativity-and-spectrum preserver experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Common {
    /// circle, interval, disk or custom (custom needs --cloud)
    #[arg(long, default_value = "circle")]
    scenario: String,
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (a directory for `scenario`); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// PointCloud JSON for the custom scenario
    #[arg(long)]
    cloud: Option<PathBuf>,
    /// SpectralDomain JSON overriding the scenario's domain
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Run without the thread pool
    #[arg(long)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Evert a frame (Frame JSON via --input, or a random frame from --seed)
    Evert {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Apply the exotic preserver to a semisimple matrix by both routes
    Exotic {
        /// ComplexMatrix JSON; a random semisimple matrix from --seed otherwise
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Boundedness and limit probes of Delta^k conj near diagonal tuples
    DeltaProbe {
        /// Center as `re,im`; all default centers with a verdict otherwise
        #[arg(long)]
        center: Option<String>,
        /// Order k (default n - 1)
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Components, symmetric-group action and coincidence graphs of a cloud
    ConfigAnalyze {
        #[command(flatten)]
        common: Common,
    },
    /// Spectrum and commutativity preservation check of a named map
    CsCheck {
        #[arg(long, default_value = "exotic")]
        map: String,
        /// normal, semisimple or general
        #[arg(long, default_value = "semisimple")]
        class: String,
        #[command(flatten)]
        common: Common,
    },
    /// Follow a map along an eigenvalue-collision path
    CollisionProbe {
        /// jordan2, jordan3-disk, jordan3-circle or jordan3-interval
        #[arg(long, default_value = "jordan2")]
        family: String,
        /// Comma-separated ray angles in radians
        #[arg(long, default_value = "0")]
        rays: String,
        #[arg(long, default_value = "exotic")]
        map: String,
        #[command(flatten)]
        common: Common,
    },
    /// Hypotheses, regularity verdict and admissible preserver families
    Report {
        #[command(flatten)]
        common: Common,
    },
    /// Run a scenario's full bundle; --out names a directory
    Scenario {
        #[command(flatten)]
        common: Common,
    },
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotSemisimple { .. } | Error::Singular { .. } | Error::Degenerate { .. } => EXIT_PROPERTY,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

fn config_error(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

/// Rendered output plus whether the checked property held.
struct Outcome {
    text: String,
    pass: bool,
}

type CmdResult = Result<Outcome, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| config_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

impl Common {
    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::default()
        }
    }

    fn scenario(&self) -> Result<Scenario, Failure> {
        Ok(self.scenario.parse::<Scenario>()?)
    }

    fn cloud(&self) -> Result<PointCloud, Failure> {
        if let Some(path) = &self.cloud {
            return Ok(PointCloud::try_from(&read_json::<CloudJson>(path)?)?);
        }
        self.scenario()?
            .cloud()
            .ok_or_else(|| config_error("the custom scenario needs --cloud"))
    }

    fn domain(&self) -> Result<SpectralDomain, Failure> {
        if let Some(path) = &self.domain {
            return Ok(SpectralDomain::try_from(&read_json::<DomainJson>(path)?)?);
        }
        match self.scenario()?.domain() {
            Some(d) => Ok(d),
            None => Ok(SpectralDomain::cloud(self.cloud()?)?),
        }
    }

    fn validate(&self) -> Result<(), Failure> {
        if self.n < 2 {
            return Err(config_error("--n must be at least 2"));
        }
        if self.trials == 0 {
            return Err(config_error("--trials must be positive"));
        }
        if !(self.tol > 0.0) {
            return Err(config_error("--tol must be positive"));
        }
        Ok(())
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(path) => fs::write(path, text).map_err(|e| config_error(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn csv_unsupported(cmd: &str) -> Failure {
    config_error(format!("`{cmd}` has no CSV form; use --format json"))
}

fn parse_center(s: &str) -> Result<Complex64, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    let bad = || config_error(format!("center `{s}` is not `re,im`"));
    if parts.len() != 2 {
        return Err(bad());
    }
    let re = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let im = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

fn parse_rays(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|a| a.trim().parse::<f64>().map_err(|_| config_error(format!("ray angle `{a}` is not a number"))))
        .collect()
}

fn cmd_evert(input: Option<&Path>, common: &Common) -> CmdResult {
    let frame = match input {
        Some(path) => Frame::try_from(&read_json::<FrameJson>(path)?)?,
        None => random_frame(common.n, &mut rng_for(common.seed, 0)),
    };
    let everted = evert(&frame)?;
    #[derive(Serialize)]
    struct Out {
        input: FrameJson,
        everted: FrameJson,
        condition: f64,
    }
    let out = Out { input: (&frame).into(), everted: (&everted).into(), condition: frame.condition() };
    match common.format {
        Format::Json => Ok(Outcome { text: to_json(&out), pass: true }),
        Format::Csv => {
            let mut text = String::from("line,coordinate,re,im\n");
            for (i, line) in out.everted.lines.iter().enumerate() {
                for (j, z) in line.iter().enumerate() {
                    text.push_str(&format!("{},{},{},{}\n", i + 1, j + 1, z[0], z[1]));
                }
            }
            Ok(Outcome { text, pass: true })
        }
    }
}

fn cmd_exotic(input: Option<&Path>, common: &Common) -> CmdResult {
    let m = match input {
        Some(path) => ComplexMatrix::try_from(&read_json::<MatrixJson>(path)?)?,
        None => {
            let mut rng = rng_for(common.seed, 0);
            let domain = common.domain()?;
            let frame = random_frame(common.n, &mut rng);
            let spectrum = domain
                .sample_distinct(common.n, 0.1_f64.min(1.0 / common.n as f64), &mut rng)
                .ok_or_else(|| config_error("cannot draw a spectrum from the domain"))?;
            SemisimpleOp::new(frame, cslab::linalg::SpectrumVector::new(spectrum)?)?.to_matrix()?
        }
    };
    let op = SemisimpleOp::from_matrix(&m)?;
    let image_op = exotic_evert(&op)?;
    let by_evert = image_op.to_matrix()?;
    let by_polar = exotic_polar(&m)?;
    let route_difference = (by_evert.as_matrix() - by_polar.as_matrix()).norm();
    #[derive(Serialize)]
    struct Out {
        input: MatrixJson,
        operator: OperatorJson,
        image: OperatorJson,
        image_evert: MatrixJson,
        image_polar: MatrixJson,
        route_difference: f64,
        routes_agree: bool,
    }
    let out = Out {
        input: (&m).into(),
        operator: (&op).into(),
        image: (&image_op).into(),
        image_evert: (&by_evert).into(),
        image_polar: (&by_polar).into(),
        route_difference,
        routes_agree: route_difference <= common.tol,
    };
    if common.format == Format::Csv {
        return Err(csv_unsupported("exotic"));
    }
    Ok(Outcome { text: to_json(&out), pass: out.routes_agree })
}

fn cmd_delta_probe(center: Option<&str>, k: Option<usize>, common: &Common) -> CmdResult {
    let domain = common.domain()?;
    let k = k.unwrap_or(common.n.saturating_sub(1)).max(1);
    let probe = ProbeConfig { seed: common.seed, exec: common.exec(), ..ProbeConfig::default() };
    #[derive(Serialize)]
    struct Out {
        domain: &'static str,
        k: usize,
        heuristic: bool,
        verdict: Option<&'static str>,
        probes: Vec<ProbeReport>,
    }
    let out = match center {
        Some(s) => {
            let z = parse_center(s)?;
            let report = limit_probe(|w: Complex64| w.conj(), &domain, z, k, &probe)?;
            Out { domain: domain.kind(), k, heuristic: true, verdict: None, probes: vec![report] }
        }
        None => {
            let th = VerdictThresholds { probe, ..VerdictThresholds::default() };
            let v = regularity_verdict(&domain, k + 1, &th)?;
            Out {
                domain: domain.kind(),
                k,
                heuristic: true,
                verdict: Some(v.verdict.as_str()),
                probes: v.evidence.into_iter().map(|e| e.report).collect(),
            }
        }
    };
    let text = match common.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            if out.probes.len() == 1 {
                out.probes[0].to_csv()
            } else {
                let mut text = String::from("center_re,center_im,radius,sup,oscillation\n");
                for p in &out.probes {
                    for i in 0..p.radii.len() {
                        text.push_str(&format!(
                            "{},{},{},{},{}\n",
                            p.center.re, p.center.im, p.radii[i], p.sup_values[i], p.oscillation_values[i]
                        ));
                    }
                }
                text
            }
        }
    };
    Ok(Outcome { text, pass: true })
}

fn cmd_config_analyze(common: &Common) -> CmdResult {
    let cloud = common.cloud()?;
    let exec = common.exec();
    let complex = build_config_complex(&cloud, common.n, DEFAULT_NODE_BUDGET)?;
    let decomp = components(&complex, exec);
    let action = sn_action_on_components(&complex, &decomp)?;
    let graphs = cn_graphs(&complex, &decomp, exec)?;
    let perfect = perfectness_check(&cloud);

    #[derive(Serialize)]
    struct ComponentOut {
        id: usize,
        size: u64,
        isotropy: Vec<PermutationJson>,
        gamma_edges: Vec<[usize; 2]>,
        has_n_cycle: bool,
    }
    #[derive(Serialize)]
    struct Out {
        n: usize,
        points: usize,
        epsilon: f64,
        delta: f64,
        perfect: bool,
        nodes: u64,
        component_count: usize,
        transitive: bool,
        orbit_count: usize,
        free: bool,
        /// `generator_table[c][k]`: image of component c under (k+1 k+2).
        generator_table: Vec<Vec<u32>>,
        components: Vec<ComponentOut>,
    }
    let sizes = decomp.sizes();
    let mut comps = Vec::with_capacity(decomp.count());
    for (c, g) in graphs.iter().enumerate() {
        comps.push(ComponentOut {
            id: c,
            size: sizes[c],
            isotropy: action.isotropy[c].iter().map(PermutationJson::from).collect(),
            gamma_edges: g.edges.iter().map(|&(i, j)| [i + 1, j + 1]).collect(),
            has_n_cycle: has_n_cycle(g)?,
        });
    }
    let out = Out {
        n: common.n,
        points: cloud.len(),
        epsilon: cloud.epsilon(),
        delta: cloud.delta(),
        perfect: perfect.perfect,
        nodes: complex.node_count(),
        component_count: decomp.count(),
        transitive: action.transitive,
        orbit_count: action.orbit_count,
        free: action.free,
        generator_table: action.table.clone(),
        components: comps,
    };
    let text = match common.format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let mut text = String::from("component,size,isotropy_order,gamma_edges,has_n_cycle\n");
            for c in &out.components {
                let edges: Vec<String> = c.gamma_edges.iter().map(|e| format!("{}-{}", e[0], e[1])).collect();
                text.push_str(&format!("{},{},{},{},{}\n", c.id, c.size, c.isotropy.len(), edges.join(" "), c.has_n_cycle));
            }
            text
        }
    };
    Ok(Outcome { text, pass: out.perfect })
}

fn cmd_cs_check(map: &str, class: &str, common: &Common) -> CmdResult {
    let cfg = CsCheckConfig {
        map: map.parse::<MapName>()?,
        domain: common.domain()?,
        class: class.parse::<InputClass>()?,
        n: common.n,
        trials: common.trials,
        seed: common.seed,
        tol: common.tol,
        exec: common.exec(),
    };
    let report = cs_preserver_check(&cfg)?;
    let text = match common.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    };
    Ok(Outcome { text, pass: report.pass })
}

fn cmd_collision_probe(family: &str, rays: &str, map: &str, common: &Common) -> CmdResult {
    let family = family.parse::<CollisionFamily>()?;
    let cfg = CollisionConfig {
        map: map.parse::<MapName>()?,
        rays: parse_rays(rays)?,
        seed: common.seed,
        ..CollisionConfig::new(family)
    };
    let report = collision_path_probe(&cfg)?;
    let text = match common.format {
        Format::Json => to_json(&report),
        Format::Csv => report.to_csv(),
    };
    Ok(Outcome { text, pass: true })
}

fn cmd_report(common: &Common) -> CmdResult {
    let options = ReportOptions { exec: common.exec(), ..ReportOptions::default() }.with_seed(common.seed);
    let report = hypothesis_report(&common.cloud()?, &common.domain()?, common.n, &options)?;
    if common.format == Format::Csv {
        return Err(csv_unsupported("report"));
    }
    Ok(Outcome { text: to_json(&report), pass: report.perfect })
}

fn cmd_scenario(common: &Common) -> CmdResult {
    let scenario = common.scenario()?;
    let mut cfg = ExperimentConfig::new(scenario, common.n);
    cfg.trials = common.trials;
    cfg.seed = common.seed;
    cfg.tol = common.tol;
    cfg.exec = common.exec();
    if common.cloud.is_some() || scenario == Scenario::Custom {
        cfg.cloud = Some(common.cloud()?);
    }
    if common.domain.is_some() {
        cfg.domain = Some(common.domain()?);
    }
    let report = run_scenario(&cfg)?;
    let json = to_json(&report);
    match &common.out {
        Some(dir) => {
            let write = |name: &str, text: &str| {
                fs::write(dir.join(name), text).map_err(|e| config_error(format!("{}: {e}", dir.join(name).display())))
            };
            fs::create_dir_all(dir).map_err(|e| config_error(format!("{}: {e}", dir.display())))?;
            write("scenario.json", &json)?;
            write("probes.csv", &report.probes_csv())?;
            write("collisions.csv", &report.collisions_csv())?;
            if !report.failures.is_empty() {
                eprintln!("failures:");
                for f in &report.failures {
                    eprintln!("  {f}");
                }
            }
            Ok(Outcome { text: String::new(), pass: report.passed })
        }
        None => Ok(Outcome {
            text: match common.format {
                Format::Json => json,
                Format::Csv => report.probes_csv(),
            },
            pass: report.passed,
        }),
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let common = match &cli.command {
        Command::Evert { common, .. }
        | Command::Exotic { common, .. }
        | Command::DeltaProbe { common, .. }
        | Command::ConfigAnalyze { common }
        | Command::CsCheck { common, .. }
        | Command::CollisionProbe { common, .. }
        | Command::Report { common }
        | Command::Scenario { common } => common,
    };
    common.validate()?;
    let outcome = match &cli.command {
        Command::Evert { input, .. } => cmd_evert(input.as_deref(), common)?,
        Command::Exotic { input, .. } => cmd_exotic(input.as_deref(), common)?,
        Command::DeltaProbe { center, k, .. } => cmd_delta_probe(center.as_deref(), *k, common)?,
        Command::ConfigAnalyze { .. } => cmd_config_analyze(common)?,
        Command::CsCheck { map, class, .. } => cmd_cs_check(map, class, common)?,
        Command::CollisionProbe { family, rays, map, .. } => cmd_collision_probe(family, rays, map, common)?,
        Command::Report { .. } => cmd_report(common)?,
        Command::Scenario { .. } => {
            let outcome = cmd_scenario(common)?;
            if common.out.is_none() {
                print!("{}", outcome.text);
            }
            return Ok(outcome.pass);
        }
    };
    common.emit(&outcome.text)?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PROPERTY),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
