//! Command-line interface: analyze a configuration file, reproduce the
//! classification tables, export lattice class lists, or render dual graphs.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use delpezzo::cluster::{agp_check, ConfigSpec};
use delpezzo::corpus::{corollary_check, default_qs, run_all, RunOptions};
use delpezzo::negcurves::{ade_type, dual_graph_dot, effective_negative, enum_exceptional, enum_roots};
use delpezzo::vectorfields::{smoothness_verdict, verify_family, SmoothVerdict, StabFamily};

#[derive(Parser)]
#[command(name = "delpezzo", about = "negative curves and vector fields on weak del Pezzo surfaces", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a blow-up configuration from a JSON file.
    Analyze {
        /// configuration file (JSON)
        input: PathBuf,
        /// override the characteristic of the configuration
        #[arg(long = "char")]
        characteristic: Option<u64>,
        /// comma-separated field sizes for point counting
        #[arg(long, value_delimiter = ',')]
        q: Vec<u64>,
        /// verify a stabilizer family from a JSON file
        #[arg(long)]
        families: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// write output here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the classification tables at a characteristic.
    Tables {
        #[arg(long = "char", default_value = "0")]
        characteristic: u64,
        /// skip the point-count probe (curve data and h⁰ only)
        #[arg(long)]
        no_point_counts: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit the root and exceptional classes of the Picard lattice I_{1,n}.
    Classes {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render the dual graph of the negative curves as Graphviz DOT.
    Dot {
        input: PathBuf,
        #[arg(long = "char")]
        characteristic: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, content: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

fn load_spec(path: &PathBuf, characteristic: Option<u64>) -> anyhow::Result<ConfigSpec> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {}", path.display(), e))?;
    let mut spec: ConfigSpec = serde_json::from_str(&src)
        .map_err(|e| anyhow::anyhow!("invalid configuration {}: {}", path.display(), e))?;
    if let Some(p) = characteristic {
        spec.characteristic = p;
    }
    Ok(spec)
}

fn run() -> anyhow::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { input, characteristic, q, families, format, out } => {
            let spec = load_spec(&input, characteristic)?;
            let cfg = spec.build().map_err(|e| anyhow::anyhow!("{}", e))?;
            let violations = agp_check(&cfg).map_err(|e| anyhow::anyhow!("{}", e))?;
            if !violations.is_empty() {
                let mut msg = String::from("not in almost general position:\n");
                for v in &violations {
                    msg.push_str(&format!(
                        "  degree-{} curve {} meets the cluster in {} points (bound {})\n",
                        v.degree, v.curve, v.incidence, v.bound
                    ));
                }
                emit(&out, &msg)?;
                return Ok(1);
            }
            let set = effective_negative(&cfg).map_err(|e| anyhow::anyhow!("{}", e))?;
            let ade = ade_type(&set).map_err(|e| anyhow::anyhow!("{}", e))?;
            let qs = if q.is_empty() {
                if cfg.field.char_p() == 0 {
                    Vec::new()
                } else {
                    default_qs(cfg.field.char_p(), cfg.field.extension_degree())
                }
            } else {
                q
            };
            let report = smoothness_verdict(&cfg, &qs).map_err(|e| anyhow::anyhow!("{}", e))?;
            let fam_result = match &families {
                Some(path) => {
                    let src = std::fs::read_to_string(path)?;
                    let fam: StabFamily = serde_json::from_str(&src)?;
                    Some(verify_family(&cfg, &fam).map_err(|e| anyhow::anyhow!("{}", e))?)
                }
                None => None,
            };
            let verdict = match report.smooth {
                SmoothVerdict::Smooth => "smooth",
                SmoothVerdict::NonReduced => "NON-REDUCED",
                SmoothVerdict::Undetermined => "undetermined",
            };
            match format {
                Format::Json => {
                    let payload = serde_json::json!({
                        "degree": cfg.degree(),
                        "height": cfg.height(),
                        "agp": "ok",
                        "ade": ade,
                        "lines": set.one_curves.len(),
                        "h0": report.h0,
                        "reduced_dim_estimate": report.reduced_dim_estimate,
                        "smooth": report.smooth,
                        "point_counts": report.point_counts,
                        "family_verified": fam_result,
                    });
                    emit(&out, &format!("{}\n", serde_json::to_string_pretty(&payload)?))?;
                }
                _ => {
                    let mut msg = format!(
                        "deg {}, height {}, {}, {} lines, h0={}",
                        cfg.degree(),
                        cfg.height(),
                        ade,
                        set.one_curves.len(),
                        report.h0
                    );
                    if let Some(d) = report.reduced_dim_estimate {
                        msg.push_str(&format!(", dim={}", d));
                    }
                    msg.push_str(&format!(", {}", verdict));
                    if let Some(fr) = fam_result {
                        msg.push_str(&format!(", family {}", if fr { "verified" } else { "REJECTED" }));
                    }
                    msg.push('\n');
                    emit(&out, &msg)?;
                }
            }
            let undetermined = report.smooth == SmoothVerdict::Undetermined;
            Ok(if undetermined || fam_result == Some(false) { 1 } else { 0 })
        }
        Command::Tables { characteristic, no_point_counts, format, out } => {
            let opts = RunOptions { point_counts: !no_point_counts, families: true };
            let report = run_all(characteristic, opts).map_err(|e| anyhow::anyhow!("{}", e))?;
            let mut corollary_line = String::new();
            let mut corollary_ok = true;
            if !no_point_counts && characteristic != 0 {
                let (ok, min_deg) = corollary_check(characteristic, &report);
                corollary_ok = ok;
                corollary_line = match min_deg {
                    Some(d) => format!(
                        "corollary: minimal degree with a non-reduced case = {} ({})\n",
                        d,
                        if ok { "ok" } else { "MISMATCH" }
                    ),
                    None => format!(
                        "corollary: no non-reduced cases ({})\n",
                        if ok { "ok" } else { "MISMATCH" }
                    ),
                };
            }
            let undetermined = report
                .cases
                .iter()
                .any(|c| c.smooth == Some(SmoothVerdict::Undetermined));
            match format {
                Format::Json => {
                    emit(&out, &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
                }
                _ => {
                    let mut text = report.text_table();
                    text.push_str(&corollary_line);
                    emit(&out, &text)?;
                }
            }
            Ok(if report.all_pass() && corollary_ok && !undetermined { 0 } else { 1 })
        }
        Command::Classes { n, format, out } => {
            let roots = enum_roots(n).map_err(|e| anyhow::anyhow!("{}", e))?;
            let excs = enum_exceptional(n).map_err(|e| anyhow::anyhow!("{}", e))?;
            match format {
                Format::Text => {
                    emit(
                        &out,
                        &format!("{} roots, {} exceptional classes at n = {}\n", roots.len(), excs.len(), n),
                    )?;
                }
                _ => {
                    let payload = serde_json::json!({
                        "n": n,
                        "roots": roots.iter().map(|c| {
                            let mut v = vec![c.d];
                            v.extend(&c.m);
                            v
                        }).collect::<Vec<_>>(),
                        "exceptional": excs.iter().map(|c| {
                            let mut v = vec![c.d];
                            v.extend(&c.m);
                            v
                        }).collect::<Vec<_>>(),
                    });
                    emit(&out, &format!("{}\n", serde_json::to_string_pretty(&payload)?))?;
                }
            }
            Ok(0)
        }
        Command::Dot { input, characteristic, out } => {
            let spec = load_spec(&input, characteristic)?;
            let cfg = spec.build().map_err(|e| anyhow::anyhow!("{}", e))?;
            let set = effective_negative(&cfg).map_err(|e| anyhow::anyhow!("{}", e))?;
            emit(&out, &dual_graph_dot(&set))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}
