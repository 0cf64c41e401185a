use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use ptheta::series::{
    bilateral_series, g_tail, theta, theta_tail_bound, theta_trunc, triple_product, EvalConfig, TailedEvaluation,
};
use ptheta::spectra::{
    refine_to_full_theta, render_svg, scan_truncation_spectrum, Catalog, FigureOptions, RegionSpec, SpectralValue,
    DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL,
};
use ptheta::verify::{
    certify_separation_direct, run_k1_chain, run_k2_grid, run_sector2, to_canonical_json, ChainReport, GridSpec,
    SeparationCertificate, SCHEMA_VERSION, SECTOR1_B_RANGE,
};
use ptheta::zeros::ContourConfig;

use crate::manifest::{json_with_manifest, ManifestWriter};

/// Outcome of a command that did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or parameters: exit code 2.
    Usage(anyhow::Error),
    /// A check failed or could not be completed: exit code 1.
    Failed(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Failed(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) => write!(f, "usage error: {e:#}"),
            Failure::Failed(e) => write!(f, "error: {e:#}"),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn failed(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Failed(e.into())
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// The series `θ(q,x)`.
    Theta,
    /// The truncation `θ_k(q,x)`; the tail bound refers to `θ − θ_k`.
    Trunc,
    /// `Θ*(q,x)` summed over all integers.
    Bilateral,
    /// `Θ*(q,x)` from the triple product.
    Product,
    /// `G(q,x) = Θ* − θ`.
    G,
}

#[derive(Debug, Serialize)]
struct EvalOutput {
    schema: u32,
    form: Form,
    q: [f64; 2],
    x: [f64; 2],
    k: Option<usize>,
    value: [f64; 2],
    tail_bound: f64,
    terms_used: usize,
}

pub fn eval(q: Complex64, x: Complex64, k: Option<usize>, form: Form, tail_tol: f64, json: bool) -> CmdResult {
    let cfg = EvalConfig::new(tail_tol, EvalConfig::<f64>::default().max_terms).map_err(usage)?;
    let r: TailedEvaluation<f64> = match form {
        Form::Theta => theta(q, x, &cfg),
        Form::Bilateral => bilateral_series(q, x, &cfg),
        Form::Product => triple_product(q, x, &cfg),
        Form::G => g_tail(q, x, &cfg),
        Form::Trunc => {
            let k = k.ok_or_else(|| usage(anyhow!("--form trunc needs --k")))?;
            theta_trunc(q, x, k).and_then(|value| {
                Ok(TailedEvaluation {
                    value,
                    tail_bound: theta_tail_bound(q.norm(), x.norm(), k)?,
                    terms_used: k + 1,
                })
            })
        }
    }
    .map_err(usage)?;
    if json {
        let out = EvalOutput {
            schema: SCHEMA_VERSION,
            form,
            q: [q.re, q.im],
            x: [x.re, x.im],
            k: if form == Form::Trunc { k } else { None },
            value: [r.value.re, r.value.im],
            tail_bound: r.tail_bound,
            terms_used: r.terms_used,
        };
        print!("{}", to_canonical_json(&out).map_err(failed)?);
    } else {
        println!("value      {}", fmt_c(r.value));
        println!("|value|    {:.15e}", r.value.norm());
        println!("tail bound {:.3e}", r.tail_bound);
        println!("terms      {}", r.terms_used);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum PipelineArg {
    K1Chain,
    K2Grid,
    Sector2,
    Direct,
}

pub struct VerifyArgs {
    pub pipeline: PipelineArg,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub q: Option<Complex64>,
    pub kmax: usize,
    pub grid: GridSpec,
}

#[derive(Debug, Serialize)]
struct DirectReport {
    schema: u32,
    q: [f64; 2],
    kmax: usize,
    separated: bool,
    zeros: Vec<[f64; 2]>,
    moduli: Vec<f64>,
    annulus_index: Vec<usize>,
    warnings: Vec<String>,
    overall_pass: bool,
}

fn chain_table(r: &ChainReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<36} {:>12} {:>12} {:>10}", "constant", "value", "bound", "printed");
    for c in &r.constants {
        let _ = writeln!(s, "{:<36} {:>12.7} {:>12.5} {:>10}", c.name, c.value, c.bound, c.printed);
    }
    let _ = writeln!(s, "\n{:<20} {:>10} {:>10}", "margin", "value", "printed");
    for m in &r.margins {
        let _ = writeln!(s, "{:<20} {:>10.5} {:>10}", m.step, m.value, m.printed);
    }
    let _ = writeln!(s, "\noverall margin {:.5}", r.overall_margin);
    s
}

fn grid_table(c: &SeparationCertificate) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>4} {:>8} {:>8} {:>12} {:>12} {:>10} {:>10} {:>10} {:>10} {:>10} pass",
        "nu", "r_lo", "r_hi", "mu_lo", "mu_hi", "K", "dL", "M", "rho", "eta"
    );
    for r in &c.rows {
        let _ = writeln!(
            s,
            "{:>4} {:>8.4} {:>8.4} {:>12.8} {:>12.8} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {}",
            r.nu, r.r_lo, r.r_hi, r.mu_lo, r.mu_hi, r.k_term, r.l_diff, r.m_term, r.rho, r.eta, r.pass
        );
    }
    let _ = writeln!(
        s,
        "\nrows {}  min mu {:.8}  max mu {:.8}  min rho {:.6}  min eta {:.6}",
        c.rows.len(),
        c.mu_min,
        c.mu_max,
        c.min_rho,
        c.min_eta
    );
    s
}

fn write_json_outputs<S: Serialize>(
    out: &Path,
    value: &S,
    command: &str,
    args: &[String],
    seed: Option<u64>,
    started: Instant,
) -> anyhow::Result<()> {
    let m = ManifestWriter::new(command, args.to_vec(), seed, vec![out.to_path_buf()]);
    let text = json_with_manifest(value, &m.reference())?;
    std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    m.write(started.elapsed())?;
    Ok(())
}

pub fn verify(a: VerifyArgs, argv: &[String]) -> CmdResult {
    let started = Instant::now();
    let (pass, value, table): (bool, serde_json::Value, String) = match a.pipeline {
        PipelineArg::K1Chain => {
            let r = run_k1_chain(a.seed).map_err(failed)?;
            (r.overall_pass, serde_json::to_value(&r).map_err(failed)?, chain_table(&r))
        }
        PipelineArg::K2Grid | PipelineArg::Sector2 => {
            let c = if a.pipeline == PipelineArg::K2Grid {
                a.grid.validate().map_err(usage)?;
                run_k2_grid(&a.grid, SECTOR1_B_RANGE, a.seed)
            } else {
                run_sector2(a.seed)
            }
            .map_err(failed)?;
            (c.overall_pass, serde_json::to_value(&c).map_err(failed)?, grid_table(&c))
        }
        PipelineArg::Direct => {
            let q = a.q.ok_or_else(|| usage(anyhow!("verify direct needs --q or --q-polar")))?;
            if !(q.norm() > 0.0 && q.norm() < ptheta::series::MAX_ABS_Q) || a.kmax == 0 {
                return Err(usage(anyhow!("need 0 < |q| < {} and --kmax >= 1", ptheta::series::MAX_ABS_Q)));
            }
            let set = certify_separation_direct(q, a.kmax, &ContourConfig::default()).map_err(failed)?;
            let r = DirectReport {
                schema: SCHEMA_VERSION,
                q: [q.re, q.im],
                kmax: a.kmax,
                separated: set.separated,
                zeros: set.zeros.iter().map(|z| [z.re, z.im]).collect(),
                moduli: set.zeros.iter().map(|z| z.norm()).collect(),
                annulus_index: set.annulus_index.clone(),
                warnings: set.warnings.clone(),
                overall_pass: set.separated,
            };
            let mut t = String::new();
            for (z, i) in set.zeros.iter().zip(&set.annulus_index) {
                let _ = writeln!(t, "{:>36}  |x| = {:.10}  annulus {i}", fmt_c(*z), z.norm());
            }
            for w in &set.warnings {
                let _ = writeln!(t, "warning: {w}");
            }
            (set.separated, serde_json::to_value(&r).map_err(failed)?, t)
        }
    };
    print!("{table}");
    println!("{}", if pass { "PASS" } else { "FAIL" });
    if let Some(out) = &a.out {
        write_json_outputs(out, &value, "verify", argv, Some(a.seed), started).map_err(failed)?;
    }
    if pass {
        Ok(())
    } else {
        Err(failed(anyhow!("verification failed")))
    }
}

pub struct SpectrumArgs {
    pub k: usize,
    pub region: [f64; 4],
    pub grid: usize,
    pub seed: u64,
    pub refine_full: bool,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    source: String,
    q_re: f64,
    q_im: f64,
    x_re: f64,
    x_im: f64,
    pair_lo: Option<usize>,
    pair_hi: Option<usize>,
    residual: f64,
    would_be: bool,
}

fn dedup(mut v: Vec<SpectralValue>) -> Vec<SpectralValue> {
    v.sort_by(|a, b| a.q_star.re.total_cmp(&b.q_star.re).then(a.q_star.im.total_cmp(&b.q_star.im)));
    let mut out: Vec<SpectralValue> = Vec::with_capacity(v.len());
    for s in v {
        if !out.iter().any(|u| (u.q_star - s.q_star).norm() <= 1e-8) {
            out.push(s);
        }
    }
    out
}

pub fn spectrum(a: SpectrumArgs, argv: &[String]) -> CmdResult {
    let started = Instant::now();
    let [r0, r1, i0, i1] = a.region;
    let region = RegionSpec::new((r0, r1), (i0, i1), a.grid).map_err(usage)?;
    if !(ptheta::spectra::MIN_RESULTANT_ORDER..=ptheta::spectra::MAX_RESULTANT_ORDER).contains(&a.k) {
        return Err(usage(anyhow!(
            "--k must lie in {}..={}",
            ptheta::spectra::MIN_RESULTANT_ORDER,
            ptheta::spectra::MAX_RESULTANT_ORDER
        )));
    }
    let mut values = scan_truncation_spectrum(a.k, &region, a.seed).map_err(failed)?;
    if a.refine_full {
        let refined: Vec<SpectralValue> = values
            .iter()
            .filter_map(|v| match refine_to_full_theta(v, DEFAULT_K_SCHEDULE, DEFAULT_STABILITY_TOL) {
                Ok(r) => Some(r),
                Err(e) => {
                    eprintln!("skipping {}: {e}", fmt_c(v.q_star));
                    None
                }
            })
            .collect();
        values = dedup(refined);
    }
    let catalog = Catalog::new(a.k, region, a.seed, &values);
    println!("{:>36} {:>36} {:>8} {:>9} would-be", "q", "x", "pair", "residual");
    for e in &catalog.entries {
        let pair = e.pair.map_or("-".to_string(), |[p, q]| format!("({p},{q})"));
        println!(
            "{:>36} {:>36} {:>8} {:>9.1e} {}",
            fmt_c(Complex64::new(e.q[0], e.q[1])),
            fmt_c(Complex64::new(e.x[0], e.x[1])),
            pair,
            e.residual,
            e.would_be
        );
    }
    println!("{} spectral values", catalog.entries.len());
    let outputs: Vec<PathBuf> = a.out.iter().chain(a.csv.iter()).cloned().collect();
    if outputs.is_empty() {
        return Ok(());
    }
    let m = ManifestWriter::new("spectrum", argv.to_vec(), Some(a.seed), outputs);
    if let Some(out) = &a.out {
        let text = json_with_manifest(&catalog, &m.reference()).map_err(failed)?;
        std::fs::write(out, text).with_context(|| format!("writing {}", out.display())).map_err(failed)?;
    }
    if let Some(csv_path) = &a.csv {
        write_csv(csv_path, &catalog, &m.reference()).map_err(failed)?;
    }
    m.write(started.elapsed()).map_err(failed)?;
    Ok(())
}

fn write_csv(path: &Path, catalog: &Catalog, reference: &str) -> anyhow::Result<()> {
    let mut buf = format!("# manifest {reference}\n").into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for e in &catalog.entries {
            w.serialize(CsvRow {
                source: e.source.clone(),
                q_re: e.q[0],
                q_im: e.q[1],
                x_re: e.x[0],
                x_im: e.x[1],
                pair_lo: e.pair.map(|p| p[0]),
                pair_hi: e.pair.map(|p| p[1]),
                residual: e.residual,
                would_be: e.would_be,
            })?;
        }
        w.flush()?;
    }
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

pub fn plot(catalog: &Path, out: &Path, reference_radius: f64, argv: &[String]) -> CmdResult {
    let started = Instant::now();
    let text = std::fs::read_to_string(catalog)
        .with_context(|| format!("reading {}", catalog.display()))
        .map_err(usage)?;
    let cat: Catalog = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", catalog.display()))
        .map_err(usage)?;
    if !(reference_radius > 0.0 && reference_radius.is_finite()) {
        return Err(usage(anyhow!("--reference-radius must be positive")));
    }
    let opts = FigureOptions {
        reference_radius,
        ..FigureOptions::default()
    };
    let m = ManifestWriter::new("plot", argv.to_vec(), Some(cat.seed), vec![out.to_path_buf()]);
    let svg = render_svg(&cat.points(), &opts);
    let svg = svg.replacen('\n', &format!("\n<!-- manifest {} -->\n", m.reference()), 1);
    std::fs::write(out, svg)
        .with_context(|| format!("writing {}", out.display()))
        .map_err(failed)?;
    m.write(started.elapsed()).map_err(failed)?;
    println!("{} points written to {}", cat.entries.len(), out.display());
    Ok(())
}
