//! The `slcm` command line: gamma | slcm | plancherel | verify | table.

pub mod config;
pub mod render;
pub mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::characters::GenuineCharData;
use crate::factors::{
    epsilon, gamma_dual, l_factor, meta_gamma, meta_gamma_dual, partial_gamma, partial_gamma_dual, partial_meta_gamma,
    partial_meta_gamma_dual, shell_integral_gamma, tate_gamma, weil_indices,
};
use crate::ratfun::RatFun;
use crate::slcm::{assemble_slcm, plancherel_report, PlancherelReport, SlcmMatrix};
use crate::tame_field::TameContext;

use config::{ConfigError, Job, RawConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "slcm", about = "Exact local coefficient matrices and Plancherel measures for tame covers of SL2")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// L, epsilon, gamma, metaplectic gamma and partial factors of one character
    Gamma(JobArgs),
    /// The Slcm with its trace, determinant, characteristic polynomial and Plancherel report
    Slcm(JobArgs),
    /// The Plancherel measure along every path
    Plancherel(JobArgs),
    /// Run the identity suites on the built-in grid and/or the configured context
    Verify(JobArgs),
    /// One line per character of the configured context
    Table(JobArgs),
}

#[derive(Debug, Clone, Args)]
pub struct JobArgs {
    /// Flat `key = value` configuration file
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set n=3`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Emit JSON instead of text
    #[arg(long)]
    pub json: bool,
    /// Also evaluate the shell-integral oracle (f = 1)
    #[arg(long)]
    pub oracle: bool,
    /// Include the built-in grid (verify)
    #[arg(long)]
    pub grid: bool,
    /// Restrict verify to these suites (comma separated)
    #[arg(long, value_name = "SUITE", value_delimiter = ',')]
    pub only: Vec<String>,
}

impl JobArgs {
    fn raw(&self) -> Result<RawConfig, ConfigError> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::read(path)?,
            None => RawConfig::default(),
        };
        for pair in &self.set {
            raw.set_pair(pair)?;
        }
        Ok(raw)
    }

    fn job(&self) -> Result<Job, ConfigError> {
        self.raw()?.into_job()?.build()
    }
}

/// Output of one command: text or JSON, and the exit status.
pub struct Report {
    pub text: String,
    pub json: Value,
    pub status: i32,
}

pub fn run(cli: &Cli) -> Result<Report, ConfigError> {
    match &cli.command {
        Command::Gamma(a) => cmd_gamma(&a.job()?, a.oracle),
        Command::Slcm(a) => cmd_slcm(&a.job()?, true),
        Command::Plancherel(a) => cmd_slcm(&a.job()?, false),
        Command::Verify(a) => cmd_verify(a),
        Command::Table(a) => cmd_table(&a.job()?),
    }
}

/// Runs the parsed command line and writes the report; returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    let json = match &cli.command {
        Command::Gamma(a) | Command::Slcm(a) | Command::Plancherel(a) | Command::Verify(a) | Command::Table(a) => a.json,
    };
    match run(&cli) {
        Ok(r) => {
            let mut out = std::io::stdout().lock();
            let body = if json { serde_json::to_string_pretty(&r.json).expect("json") } else { r.text };
            let _ = writeln!(out, "{}", body.trim_end());
            r.status
        }
        Err(e) => {
            eprintln!("error: {}", e);
            EXIT_CONFIG
        }
    }
}

fn job_error(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Job(e.to_string())
}

fn head(job: &Job) -> (String, Map<String, Value>) {
    let mut m = Map::new();
    m.insert("context".into(), render::context_json(&job.ctx));
    let dj = render::data_json(&job.ctx, &job.data);
    m.insert("character".into(), dj["chi"].clone());
    m.insert("psi".into(), dj["psi"].clone());
    m.insert("decomposition".into(), json!(job.config.decomposition.name()));
    let text = format!("{}\n{}\n", render::context_line(&job.ctx), render::data_lines(&job.ctx, &job.data));
    (text, m)
}

fn line(text: &mut String, label: &str, f: &RatFun) {
    text.push_str(&format!("{:<28} = {}\n", label, render::ratfun(f)));
}

pub fn cmd_gamma(job: &Job, oracle: bool) -> Result<Report, ConfigError> {
    let (ctx, chi, psi) = (&job.ctx, &job.data.chi, &job.data.psi);
    let (mut text, mut m) = head(job);
    let mut factors: Vec<(&str, &str, RatFun)> = vec![
        ("L", "L(s, chi)", l_factor(ctx, chi)),
        ("epsilon", "epsilon(s, chi, psi)", epsilon(ctx, chi, psi)),
        ("gamma", "gamma(s, chi, psi)", tate_gamma(ctx, chi, psi)),
        ("gamma_dual", "gamma(1 - s, chi^-1, psi)", gamma_dual(ctx, chi, psi)),
    ];
    let l = &job.decomposition;
    if ctx.cover.even {
        factors.push(("meta_gamma", "gamma~(s, chi, psi)", meta_gamma(ctx, chi, psi)));
        factors.push(("meta_gamma_dual", "gamma~(1 - s, chi^-1, psi)", meta_gamma_dual(ctx, chi, psi)));
        factors.push(("partial", "gamma~_J(s, chi, psi, k)", partial_meta_gamma(ctx, l, chi, psi, job.k).map_err(job_error)?));
        factors.push((
            "partial_dual",
            "gamma~_J(1 - s, chi^-1, psi, k)",
            partial_meta_gamma_dual(ctx, l, chi, psi, job.k).map_err(job_error)?,
        ));
    } else {
        factors.push(("partial", "gamma_J(s, chi, psi, k)", partial_gamma(ctx, l, chi, psi, job.k).map_err(job_error)?));
        factors.push((
            "partial_dual",
            "gamma_J(1 - s, chi^-1, psi, k)",
            partial_gamma_dual(ctx, l, chi, psi, job.k).map_err(job_error)?,
        ));
    }
    text.push_str(&format!("k        {}\n", render::class(job.k)));
    let mut fj = Map::new();
    for (key, label, f) in &factors {
        line(&mut text, label, f);
        fj.insert(key.to_string(), json!(f.to_text()));
    }
    m.insert("k".into(), json!([job.k.val, job.k.unit_dlog]));
    m.insert("factors".into(), Value::Object(fj));
    if ctx.cover.even {
        let w = weil_indices(ctx, psi);
        let table: Vec<Value> = w.table.iter().map(|(x, g)| json!({"class": [x.val, x.unit_dlog], "gamma_psi": g.to_text()})).collect();
        text.push_str(&format!("{:<28} = {}\n", "gamma_F(psi)", render::cyc(&w.gamma_f)));
        for (x, g) in &w.table {
            text.push_str(&format!("{:<28} = {}\n", format!("gamma_psi({})", render::class(*x)), render::cyc(g)));
        }
        m.insert("weil_index".into(), json!({"gamma_f": w.gamma_f.to_text(), "table": table}));
    }
    let mut status = EXIT_OK;
    if oracle {
        let shell = shell_integral_gamma(ctx, chi, psi, job.config.oracle_depth).map_err(job_error)?;
        let formula = gamma_dual(ctx, chi, psi);
        let diff = &shell - &formula;
        text.push_str("oracle (shell integral over Q_p)\n");
        line(&mut text, "  shell sum", &shell);
        line(&mut text, "  formula", &formula);
        line(&mut text, "  difference", &diff);
        if !diff.is_zero() {
            status = EXIT_VERIFY_FAILED;
        }
        m.insert(
            "oracle".into(),
            json!({"depth": job.config.oracle_depth, "shell": shell.to_text(), "formula": formula.to_text(), "difference": diff.to_text()}),
        );
    }
    Ok(Report { text, json: Value::Object(m), status })
}

fn support_table(ctx: &TameContext, m: &SlcmMatrix) -> String {
    let labels: Vec<String> = m.kbar.iter().map(|k| format!("{},{}", k.val, k.unit_dlog)).collect();
    let w = labels.iter().map(|l| l.len()).max().unwrap_or(1).max(3);
    let mut s = format!("support (rows a, columns b in K = {{varpi^v g^u}} as v,u; * nonzero), d = {}\n", ctx.d());
    s.push_str(&format!("{:>w$} ", "", w = w));
    for l in &labels {
        s.push_str(&format!(" {:>w$}", l, w = w));
    }
    s.push('\n');
    for (l, row) in labels.iter().zip(m.support()) {
        s.push_str(&format!("{:>w$} ", l, w = w));
        for nz in row {
            s.push_str(&format!(" {:>w$}", if nz { "*" } else { "." }, w = w));
        }
        s.push('\n');
    }
    s
}

fn plancherel_json(rep: &PlancherelReport) -> Value {
    let paths: Map<String, Value> = rep.paths.iter().map(|(k, v)| (k.to_string(), json!(v.to_text()))).collect();
    json!({
        "mu_inverse": rep.mu_inverse.to_text(),
        "paths": paths,
        "paths_agree": rep.paths_agree(),
        "c_sigma": rep.c_sigma.to_text(),
        "pole_order_at_s0": rep.pole_order_at_zero(),
        "reducible": rep.reducibility.reducible,
        "self_dual": rep.reducibility.self_dual,
    })
}

fn plancherel_text(rep: &PlancherelReport) -> String {
    let mut s = String::from("Plancherel measure\n");
    line(&mut s, "  mu^-1", &rep.mu_inverse);
    for (k, v) in &rep.paths {
        s.push_str(&format!("  {:<26} {}\n", *k, if *v == rep.mu_inverse { "agrees" } else { "DIFFERS" }));
    }
    s.push_str(&format!("  {:<26} {}\n", "c(sigma)", render::cyc(&rep.c_sigma)));
    s.push_str(&format!("  {:<26} {}\n", "pole order at s = 0", rep.pole_order_at_zero()));
    s.push_str(&format!("  {:<26} {}\n", "sigma = sigma^w", rep.reducibility.self_dual));
    s.push_str(&format!("  {:<26} {}\n", "I(sigma) reducible", rep.reducibility.reducible));
    s
}

pub fn cmd_slcm(job: &Job, with_matrix: bool) -> Result<Report, ConfigError> {
    let (ctx, l, data) = (&job.ctx, &job.decomposition, &job.data);
    let (mut text, mut m) = head(job);
    let rep = plancherel_report(ctx, l, data).map_err(job_error)?;
    if with_matrix {
        let mat = assemble_slcm(ctx, l, data).map_err(job_error)?;
        text.push_str(&support_table(ctx, &mat));
        for (i, row) in mat.entries.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                if !e.is_zero() {
                    line(&mut text, &format!("tau({}, {})", render::class(mat.kbar[i]), render::class(mat.kbar[j])), e);
                }
            }
        }
        let (tr, det, cp) = (mat.trace(), mat.det(), mat.charpoly());
        line(&mut text, "T (trace)", &tr);
        line(&mut text, "D (determinant)", &det);
        for (k, c) in cp.iter().enumerate().rev() {
            line(&mut text, &format!("charpoly coefficient t^{}", k), c);
        }
        let rows: Vec<Value> = mat.entries.iter().map(|r| json!(r.iter().map(|e| e.to_text()).collect::<Vec<_>>())).collect();
        m.insert("kbar".into(), json!(mat.kbar.iter().map(|k| [k.val, k.unit_dlog as i64]).collect::<Vec<_>>()));
        m.insert("matrix".into(), Value::Array(rows));
        m.insert("trace".into(), json!(tr.to_text()));
        m.insert("det".into(), json!(det.to_text()));
        m.insert("charpoly".into(), json!(cp.iter().map(|c| c.to_text()).collect::<Vec<_>>()));
    }
    text.push_str(&plancherel_text(&rep));
    m.insert("plancherel".into(), plancherel_json(&rep));
    let status = if rep.paths_agree() && rep.reducibility.consistent() { EXIT_OK } else { EXIT_VERIFY_FAILED };
    Ok(Report { text, json: Value::Object(m), status })
}

pub fn cmd_table(job: &Job) -> Result<Report, ConfigError> {
    let ctx = &job.ctx;
    let l = &job.decomposition;
    let chars = verify::all_chars(ctx);
    let rows: Vec<Result<(GenuineCharData, SlcmMatrix, PlancherelReport), ConfigError>> = chars
        .par_iter()
        .map(|chi| {
            let data = GenuineCharData::new(*chi, job.data.psi, ctx.cover);
            let mat = assemble_slcm(ctx, l, &data).map_err(job_error)?;
            let rep = plancherel_report(ctx, l, &data).map_err(job_error)?;
            Ok((data, mat, rep))
        })
        .collect();
    let mut text = format!("{}\n", render::context_line(ctx));
    text.push_str(&format!(
        "{:>4} {:>6} {:>5} {:>8} {:>8} {:>6} {:>10} {:>9}  {}\n",
        "j", "k", "e", "chi^n", "nonzero", "paths", "pole(s=0)", "reducible", "c(sigma)"
    ));
    let mut out = Vec::new();
    let mut status = EXIT_OK;
    for r in rows {
        let (data, mat, rep) = r?;
        let nonzero: usize = mat.support().iter().map(|r| r.iter().filter(|&&b| b).count()).sum();
        let ram = data.chi.pow(ctx.n() as i64).is_ramified(ctx);
        if !rep.paths_agree() || !rep.reducibility.consistent() {
            status = EXIT_VERIFY_FAILED;
        }
        text.push_str(&format!(
            "{:>4} {:>6} {:>5} {:>8} {:>8} {:>6} {:>10} {:>9}  {}\n",
            data.chi.unit_exp,
            data.chi.varpi_exp,
            data.chi.conductor(),
            if ram { "ram" } else { "unram" },
            nonzero,
            if rep.paths_agree() { "agree" } else { "DIFFER" },
            rep.pole_order_at_zero(),
            rep.reducibility.reducible,
            render::cyc(&rep.c_sigma)
        ));
        out.push(json!({
            "unit_exp": data.chi.unit_exp,
            "varpi_exp": data.chi.varpi_exp,
            "conductor": data.chi.conductor(),
            "chi_n_ramified": ram,
            "nonzero_entries": nonzero,
            "paths_agree": rep.paths_agree(),
            "pole_order_at_s0": rep.pole_order_at_zero(),
            "reducible": rep.reducibility.reducible,
            "c_sigma": rep.c_sigma.to_text(),
        }));
    }
    let json = json!({"context": render::context_json(ctx), "psi": [job.data.psi.a.val, job.data.psi.a.unit_dlog], "rows": out});
    Ok(Report { text, json, status })
}

pub fn cmd_verify(args: &JobArgs) -> Result<Report, ConfigError> {
    let unknown = verify::unknown_suites(&args.only);
    if !unknown.is_empty() {
        return Err(ConfigError::Job(format!("unknown suite(s) {} (expected one of {})", unknown.join(", "), verify::SUITES.join(", "))));
    }
    let raw = args.raw()?;
    let mut contexts: Vec<TameContext> = Vec::new();
    if args.grid || raw.is_empty() {
        for &(p, f, n) in verify::GRID {
            contexts.push(TameContext::new(p, f, n, None).map_err(|e| ConfigError::Context(e.to_string()))?);
        }
    }
    if !raw.is_empty() {
        let job = raw.into_job()?.build()?;
        let key = (job.ctx.p(), job.ctx.field.f, job.ctx.n());
        if !contexts.iter().any(|c| (c.p(), c.field.f, c.n()) == key) || job.config.modulus.is_some() {
            contexts.push(job.ctx);
        }
    }
    let start = Instant::now();
    let results: Vec<verify::CheckResult> = contexts.par_iter().flat_map(|c| verify::run_context(c, &args.only)).collect();
    let failed = results.iter().filter(|r| !r.outcome.passed()).count();
    let mut text = String::new();
    for r in &results {
        text.push_str(&r.line());
        text.push('\n');
    }
    text.push_str(&format!(
        "{} identities on {} contexts: {} passed, {} failed ({:.1} s)\n",
        results.len(),
        contexts.len(),
        results.len() - failed,
        failed,
        start.elapsed().as_secs_f64()
    ));
    let json = json!({
        "results": results.iter().map(|r| r.json()).collect::<Vec<_>>(),
        "passed": results.len() - failed,
        "failed": failed,
    });
    Ok(Report { text, json, status: if failed == 0 { EXIT_OK } else { EXIT_VERIFY_FAILED } })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn job(text: &str) -> Job {
        RawConfig::parse_text(text).unwrap().into_job().unwrap().build().unwrap()
    }

    #[test]
    fn gamma_report_for_trivial_character() {
        let r = cmd_gamma(&job("p = 7\nn = 3"), true).unwrap();
        assert_eq!(r.status, EXIT_OK);
        let c = TameContext::new(7, 1, 3, None).unwrap();
        let x = RatFun::x(c.cyc());
        let one = RatFun::one(c.cyc());
        // gamma(s, 1, psi) = (1 - X) / (1 - q^{-1} X^{-1})
        let expect = &(&one - &x) / &(&one - &x.inv().unwrap().scale(&c.ratio(1, 7)));
        assert_eq!(RatFun::parse(r.json["factors"]["gamma"].as_str().unwrap()).unwrap(), expect);
        assert!(RatFun::parse(r.json["oracle"]["difference"].as_str().unwrap()).unwrap().is_zero());
    }

    #[test]
    fn ramified_epsilon_is_a_monomial() {
        let r = cmd_gamma(&job("p = 7\nn = 3\nchi.unit_exp = 1"), false).unwrap();
        let eps = RatFun::parse(r.json["factors"]["epsilon"].as_str().unwrap()).unwrap();
        assert_eq!(eps.as_monomial().unwrap().1, 1);
    }

    #[test]
    fn slcm_json_round_trips() {
        let j = job("p = 7\nn = 3\nchi.unit_exp = 1");
        let r = cmd_slcm(&j, true).unwrap();
        assert_eq!(r.status, EXIT_OK);
        let mat = assemble_slcm(&j.ctx, &j.decomposition, &j.data).unwrap();
        let rows = r.json["matrix"].as_array().unwrap();
        for (i, row) in rows.iter().enumerate() {
            for (k, e) in row.as_array().unwrap().iter().enumerate() {
                assert_eq!(RatFun::parse(e.as_str().unwrap()).unwrap(), mat.entries[i][k]);
            }
        }
        for key in ["trace", "det"] {
            assert!(RatFun::parse(r.json[key].as_str().unwrap()).is_ok());
        }
        let p = &r.json["plancherel"];
        assert_eq!(p["paths"].as_object().unwrap().len(), 4);
        assert!(p["c_sigma"].is_string() && p["pole_order_at_s0"].is_i64() && p["reducible"].is_boolean());
        // ramified chi^3: one nonzero entry per row
        let nonzero = rows.iter().flat_map(|r| r.as_array().unwrap()).filter(|e| !RatFun::parse(e.as_str().unwrap()).unwrap().is_zero()).count();
        assert_eq!(nonzero, 3);
    }

    #[test]
    fn output_is_deterministic() {
        let a = cmd_slcm(&job("p = 7\nn = 6\nchi.unit_exp = 3\nchi.varpi_num = 1\nchi.varpi_den = 8"), true).unwrap();
        let b = cmd_slcm(&job("p = 7\nn = 6\nchi.unit_exp = 3\nchi.varpi_num = 1\nchi.varpi_den = 8"), true).unwrap();
        assert_eq!(a.text, b.text);
        assert_eq!(serde_json::to_string(&a.json).unwrap(), serde_json::to_string(&b.json).unwrap());
    }

    #[test]
    fn n_one_plancherel_is_the_tate_ratio() {
        let r = cmd_slcm(&job("p = 7\nn = 1"), false).unwrap();
        let c = TameContext::new(7, 1, 1, None).unwrap();
        let x = RatFun::x(c.cyc());
        let one = RatFun::one(c.cyc());
        let q = c.ratio(1, 7);
        // (1 - q^{-1} X)(1 - q^{-1} X^{-1}) / ((1 - X)(1 - X^{-1}))
        let num = &(&one - &x.scale(&q)) * &(&one - &x.inv().unwrap().scale(&q));
        let den = &(&one - &x) * &(&one - &x.inv().unwrap());
        let mu = RatFun::parse(r.json["plancherel"]["mu_inverse"].as_str().unwrap()).unwrap();
        assert_eq!(mu, &num / &den);
    }

    #[test]
    fn exit_codes() {
        let bad = Cli::parse_from(["slcm", "gamma", "--set", "p=7", "--set", "n=4"]);
        assert_eq!(main_with(bad), EXIT_CONFIG);
        let bad = Cli::parse_from(["slcm", "verify", "--only", "nothing"]);
        assert_eq!(main_with(bad), EXIT_CONFIG);
        let ok = Cli::parse_from(["slcm", "verify", "--set", "p=5", "--set", "n=2", "--only", "conductor,fields"]);
        assert_eq!(run(&ok).unwrap().status, EXIT_OK);
    }

    #[test]
    fn table_lists_every_character() {
        let r = cmd_table(&job("p = 5\nn = 2")).unwrap();
        assert_eq!(r.status, EXIT_OK);
        assert_eq!(r.json["rows"].as_array().unwrap().len(), 16);
    }
}
