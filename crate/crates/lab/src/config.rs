//! Line-based run configuration.
//!
//! ```text
//! # comment
//! [section]
//! key = value
//! ```
//!
//! Values are decimal numbers, comma-separated lists, bare words or
//! expressions (see [`crate::expr`]). Unknown sections or keys and repeated
//! sections or keys are errors reported with their line number.

use std::fmt::Write as _;

use dirlab_core::arrowspec::Threshold;
use dirlab_core::dirichlet::SolverOptions;
use dirlab_core::linalg::{GmresOptions, HermMatrix};
use dirlab_core::prodgrid::{build_grid, GridConfig, Metric};
use dirlab_core::symcone::{Family, OperatorSpec};
use num_complex::Complex64;
use thiserror::Error;

use crate::expr::Expr;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    At { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn at(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::At { line, message: message.into() }
}

fn invalid(message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(message.into())
}

/// One `key = value` line.
#[derive(Clone, Debug)]
struct Entry {
    key: String,
    value: String,
    line: usize,
}

#[derive(Clone, Debug)]
struct Section {
    name: String,
    line: usize,
    entries: Vec<Entry>,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("operator", &["family", "n", "k", "l"]),
    ("grid", &["p", "torus_res", "s_res", "theta_res"]),
    ("chi", &["re", "im"]),
    ("omega", &["re", "im"]),
    ("psi", &["expr", "solution"]),
    ("phi", &["lower", "upper"]),
    (
        "solver",
        &[
            "tol_newton",
            "max_newton",
            "armijo",
            "min_step",
            "gmres_tol",
            "gmres_floor",
            "gmres_restart",
            "gmres_max_iters",
            "dt_initial",
            "dt_growth",
            "dt_min",
            "margin_target",
            "eps_schedule",
        ],
    ),
    ("run", &["seed"]),
    ("cones", &["samples"]),
    ("arrow", &["n_min", "n_max", "instances", "epsilons", "corner_factors", "threshold", "d_range", "a_radius"]),
    ("probe", &["ladder", "refine_axes", "guan_samples", "betas"]),
    ("compare", &["first", "second", "tol"]),
];

fn split_sections(text: &str) -> Result<Vec<Section>, ConfigError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| at(line, "unterminated section header"))?.trim();
            if !SECTIONS.iter().any(|(s, _)| *s == name) {
                return Err(at(line, format!("unknown section [{name}]")));
            }
            if let Some(prev) = sections.iter().find(|s| s.name == name) {
                return Err(at(line, format!("section [{name}] already opened on line {}", prev.line)));
            }
            sections.push(Section { name: name.to_string(), line, entries: Vec::new() });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| at(line, "expected `key = value` or `[section]`"))?;
        let (key, value) = (key.trim(), value.trim());
        let section = sections.last_mut().ok_or_else(|| at(line, "key outside of any section"))?;
        let allowed = SECTIONS.iter().find(|(s, _)| *s == section.name).map(|(_, k)| *k).unwrap_or(&[]);
        if !allowed.contains(&key) {
            return Err(at(line, format!("unknown key `{key}` in [{}]", section.name)));
        }
        if let Some(prev) = section.entries.iter().find(|e| e.key == key) {
            return Err(at(line, format!("duplicate key `{key}` (first set on line {})", prev.line)));
        }
        if value.is_empty() {
            return Err(at(line, format!("`{key}` has no value")));
        }
        section.entries.push(Entry { key: key.to_string(), value: value.to_string(), line });
    }
    Ok(sections)
}

/// Typed access to one parsed section.
struct Fields<'a> {
    section: Option<&'a Section>,
    name: &'static str,
}

impl<'a> Fields<'a> {
    fn entry(&self, key: &str) -> Option<&'a Entry> {
        self.section.and_then(|s| s.entries.iter().find(|e| e.key == key))
    }

    fn present(&self) -> bool {
        self.section.is_some()
    }

    fn line(&self) -> usize {
        self.section.map_or(0, |s| s.line)
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        self.entry(key).map(|e| parse(&e.value).map_err(|m| at(e.line, format!("`{key}`: {m}")))).transpose()
    }

    fn or<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        Ok(self.get(key, parse)?.unwrap_or(default))
    }

    fn require<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        self.get(key, parse)?.ok_or_else(|| match self.section {
            Some(s) => at(s.line, format!("[{}] needs `{key}`", self.name)),
            None => invalid(format!("missing [{}] with `{key}`", self.name)),
        })
    }

    /// Error pinned to the line of `key` (or of the section header).
    fn err(&self, key: &str, message: impl Into<String>) -> ConfigError {
        at(self.entry(key).map_or(self.line(), |e| e.line), message)
    }
}

fn real(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a decimal number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn count(s: &str) -> Result<usize, String> {
    s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))
}

fn seed(s: &str) -> Result<u64, String> {
    s.parse().map_err(|_| format!("`{s}` is not a 64-bit seed"))
}

fn list<T>(item: impl Fn(&str) -> Result<T, String>) -> impl Fn(&str) -> Result<Vec<T>, String> {
    move |s| s.split(',').map(|p| item(p.trim())).collect()
}

fn word(s: &str) -> Result<String, String> {
    if s.split_whitespace().count() == 1 {
        Ok(s.to_string())
    } else {
        Err(format!("`{s}` is not a single word"))
    }
}

fn expression(s: &str) -> Result<Expr, String> {
    Expr::parse(s).map_err(|e| e.to_string())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiSource {
    /// `ψ` given directly.
    Expr,
    /// `ψ = f(λ(χ + ∂∂̄u*))` for a prescribed solution `u*`, discretized on
    /// the run's grid.
    Solution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsiSpec {
    pub source: PsiSource,
    pub expr: Expr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhiSpec {
    pub lower: Expr,
    pub upper: Expr,
}

/// Constant Hermitian matrix as row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSpec {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixSpec {
    pub fn identity(n: usize) -> Self {
        let mut re = vec![0.0; n * n];
        for i in 0..n {
            re[i * n + i] = 1.0;
        }
        Self { re, im: vec![0.0; n * n] }
    }

    pub fn to_matrix(&self, n: usize) -> Result<HermMatrix, String> {
        let entries = self.re.iter().zip(&self.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        HermMatrix::from_rows(n, entries).map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub instances: usize,
    pub epsilons: Vec<f64>,
    pub corner_factors: Vec<f64>,
    pub threshold: Threshold,
    pub d_range: f64,
    pub a_radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeConfig {
    pub ladder: Vec<usize>,
    /// Axes whose resolution follows the ladder; the others keep the
    /// `[grid]` value.
    pub refine_axes: Vec<String>,
    pub guan_samples: usize,
    pub betas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareConfig {
    pub first: String,
    pub second: String,
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub operator: OperatorSpec,
    pub grid: GridConfig,
    pub chi: MatrixSpec,
    pub omega: MatrixSpec,
    pub psi: PsiSpec,
    /// Defaults to the prescribed solution, or zero.
    pub phi: Option<PhiSpec>,
    pub solver: SolverOptions,
    pub eps_schedule: Vec<f64>,
    pub seed: u64,
    pub cone_samples: usize,
    pub arrow: ArrowConfig,
    pub probe: ProbeConfig,
    pub compare: Option<CompareConfig>,
}

fn family_name(f: Family) -> &'static str {
    match f {
        Family::LogMa => "log_ma",
        Family::SigmaKRoot { .. } => "sigma_k_root",
        Family::HessianQuotient { .. } => "hessian_quotient",
    }
}

fn threshold_name(t: Threshold) -> &'static str {
    match t {
        Threshold::Main => "main",
        Threshold::Ordered => "ordered",
        Threshold::Distinct => "distinct",
    }
}

/// Coordinate names of a grid with torus dimension `p`, in storage order.
pub fn coordinate_names(p: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=p).flat_map(|j| [format!("x{j}"), format!("y{j}")]).collect();
    names.push("s".into());
    names.push("theta".into());
    names
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let sections = split_sections(text)?;
        let fields = |name: &'static str| Fields { section: sections.iter().find(|s| s.name == name), name };

        let op_f = fields("operator");
        if !op_f.present() {
            return Err(invalid("missing required section [operator]"));
        }
        let n = op_f.require("n", count)?;
        let family = op_f.require("family", word)?;
        let operator = match family.as_str() {
            "log_ma" => OperatorSpec::new(Family::LogMa, n),
            "sigma_k_root" => OperatorSpec::new(Family::SigmaKRoot { k: op_f.require("k", count)? }, n),
            "hessian_quotient" => {
                OperatorSpec::new(Family::HessianQuotient { k: op_f.require("k", count)?, l: op_f.require("l", count)? }, n)
            }
            other => return Err(op_f.err("family", format!("unknown operator family `{other}`"))),
        }
        .map_err(|e| op_f.err("k", e.to_string()))?;
        let extra = match operator.family {
            Family::LogMa => &["k", "l"][..],
            Family::SigmaKRoot { .. } => &["l"][..],
            Family::HessianQuotient { .. } => &[][..],
        };
        if let Some(key) = extra.iter().find(|k| op_f.entry(k).is_some()) {
            return Err(op_f.err(key, format!("`{key}` does not apply to {family}")));
        }

        let grid_f = fields("grid");
        if !grid_f.present() {
            return Err(invalid("missing required section [grid]"));
        }
        let grid = GridConfig {
            p: grid_f.require("p", count)?,
            torus_res: grid_f.require("torus_res", list(count))?,
            s_res: grid_f.require("s_res", count)?,
            theta_res: grid_f.require("theta_res", count)?,
        };
        build_grid(&grid).map_err(|e| at(grid_f.line(), e.to_string()))?;
        if grid.p + 1 != n {
            return Err(op_f.err("n", format!("n = {n} but the grid has p + 1 = {}", grid.p + 1)));
        }
        let names = coordinate_names(grid.p);

        let matrix = |name: &'static str| -> Result<MatrixSpec, ConfigError> {
            let f = fields(name);
            if !f.present() {
                return Ok(MatrixSpec::identity(n));
            }
            let re = f.require("re", list(real))?;
            let im = f.or("im", vec![0.0; n * n], list(real))?;
            if re.len() != n * n || im.len() != n * n {
                return Err(at(f.line(), format!("[{name}] needs {} entries in `re` and `im`", n * n)));
            }
            let spec = MatrixSpec { re, im };
            spec.to_matrix(n).map_err(|m| at(f.line(), m))?;
            Ok(spec)
        };
        let chi = matrix("chi")?;
        let omega = matrix("omega")?;
        let omega_f = fields("omega");
        Metric::new(omega.to_matrix(n).map_err(|m| at(omega_f.line(), m))?).map_err(|e| at(omega_f.line(), format!("ω: {e}")))?;

        let check_vars = |f: &Fields, key: &str, e: &Expr| -> Result<(), ConfigError> {
            e.compile(&names).map(|_| ()).map_err(|m| f.err(key, format!("`{key}`: {m}")))
        };
        let psi_f = fields("psi");
        let psi = match (psi_f.get("expr", expression)?, psi_f.get("solution", expression)?) {
            (Some(_), Some(_)) => return Err(psi_f.err("solution", "[psi] takes `expr` or `solution`, not both")),
            (Some(expr), None) => PsiSpec { source: PsiSource::Expr, expr },
            (None, Some(expr)) => PsiSpec { source: PsiSource::Solution, expr },
            (None, None) if psi_f.present() => return Err(at(psi_f.line(), "[psi] needs `expr` or `solution`")),
            (None, None) => PsiSpec { source: PsiSource::Expr, expr: Expr::constant(0.0) },
        };
        check_vars(&psi_f, if psi.source == PsiSource::Expr { "expr" } else { "solution" }, &psi.expr)?;
        let phi_f = fields("phi");
        let phi = if phi_f.present() {
            let spec = PhiSpec { lower: phi_f.require("lower", expression)?, upper: phi_f.require("upper", expression)? };
            check_vars(&phi_f, "lower", &spec.lower)?;
            check_vars(&phi_f, "upper", &spec.upper)?;
            Some(spec)
        } else {
            None
        };

        let sf = fields("solver");
        let d = SolverOptions::default();
        let solver = SolverOptions {
            tol_newton: sf.or("tol_newton", d.tol_newton, real)?,
            max_newton: sf.or("max_newton", d.max_newton, count)?,
            armijo: sf.or("armijo", d.armijo, real)?,
            min_step: sf.or("min_step", d.min_step, real)?,
            linear: GmresOptions {
                tol: sf.or("gmres_tol", d.linear.tol, real)?,
                floor: sf.or("gmres_floor", d.linear.floor, real)?,
                restart: sf.or("gmres_restart", d.linear.restart, count)?,
                max_iters: sf.or("gmres_max_iters", d.linear.max_iters, count)?,
            },
            dt_initial: sf.or("dt_initial", d.dt_initial, real)?,
            dt_growth: sf.or("dt_growth", d.dt_growth, real)?,
            dt_min: sf.or("dt_min", d.dt_min, real)?,
            margin_target: sf.or("margin_target", d.margin_target, real)?,
        };
        for (key, v) in [
            ("tol_newton", solver.tol_newton),
            ("armijo", solver.armijo),
            ("min_step", solver.min_step),
            ("gmres_tol", solver.linear.tol),
            ("gmres_floor", solver.linear.floor),
            ("dt_initial", solver.dt_initial),
            ("dt_min", solver.dt_min),
        ] {
            if !(v > 0.0) {
                return Err(sf.err(key, format!("`{key}` must be positive")));
            }
        }
        if !(solver.dt_growth >= 1.0) {
            return Err(sf.err("dt_growth", "`dt_growth` must be at least 1"));
        }
        if solver.linear.restart == 0 {
            return Err(sf.err("gmres_restart", "`gmres_restart` must be positive"));
        }
        let eps_schedule = sf.or("eps_schedule", vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5], list(real))?;
        if eps_schedule.iter().any(|e| !(*e > 0.0)) || eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(sf.err("eps_schedule", "`eps_schedule` must be positive and strictly decreasing"));
        }

        let seed = fields("run").or("seed", 0, self::seed)?;
        let cone_samples = fields("cones").or("samples", 10_000, count)?;

        let af = fields("arrow");
        let arrow = ArrowConfig {
            n_min: af.or("n_min", 2, count)?,
            n_max: af.or("n_max", 8, count)?,
            instances: af.or("instances", 100_000, count)?,
            epsilons: af.or("epsilons", vec![0.1, 0.5, 1.0, 3.0], list(real))?,
            corner_factors: af.or("corner_factors", vec![1.0, 10.0], list(real))?,
            threshold: af.or("threshold", Threshold::Main, |s| match s {
                "main" => Ok(Threshold::Main),
                "ordered" => Ok(Threshold::Ordered),
                "distinct" => Ok(Threshold::Distinct),
                _ => Err(format!("unknown threshold `{s}`")),
            })?,
            d_range: af.or("d_range", 3.0, real)?,
            a_radius: af.or("a_radius", 3.0, real)?,
        };
        if arrow.n_min < 2 || arrow.n_max < arrow.n_min {
            return Err(af.err("n_min", "need 2 ≤ n_min ≤ n_max"));
        }
        if arrow.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(af.err("epsilons", "`epsilons` must be positive"));
        }

        let pf = fields("probe");
        let probe = ProbeConfig {
            ladder: pf.or("ladder", vec![16, 32, 64], list(count))?,
            refine_axes: pf.or("refine_axes", vec!["x1".into(), "s".into(), "theta".into()], list(word))?,
            guan_samples: pf.or("guan_samples", 10_000, count)?,
            betas: pf.or("betas", vec![0.1, 0.5], list(real))?,
        };
        if probe.ladder.windows(2).any(|w| w[1] <= w[0]) {
            return Err(pf.err("ladder", "`ladder` must be strictly increasing"));
        }
        if let Some(axis) = probe.refine_axes.iter().find(|a| !names.contains(a)) {
            return Err(pf.err("refine_axes", format!("unknown axis `{axis}`")));
        }
        if probe.betas.iter().any(|b| !(*b > 0.0)) {
            return Err(pf.err("betas", "`betas` must be positive"));
        }

        let cf = fields("compare");
        let compare = if cf.present() {
            Some(CompareConfig { first: cf.require("first", word)?, second: cf.require("second", word)?, tol: cf.or("tol", 1e-7, real)? })
        } else {
            None
        };

        Ok(Self { operator, grid, chi, omega, psi, phi, solver, eps_schedule, seed, cone_samples, arrow, probe, compare })
    }

    /// Canonical text form; parsing it gives back `self`.
    pub fn serialize(&self) -> String {
        fn nums<T: std::fmt::Debug>(v: &[T]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
        }
        let mut out = String::new();
        let w = &mut out;
        let op = &self.operator;
        let _ = writeln!(w, "[operator]\nfamily = {}\nn = {}", family_name(op.family), op.n);
        match op.family {
            Family::LogMa => {}
            Family::SigmaKRoot { k } => {
                let _ = writeln!(w, "k = {k}");
            }
            Family::HessianQuotient { k, l } => {
                let _ = writeln!(w, "k = {k}\nl = {l}");
            }
        }
        let g = &self.grid;
        let _ = writeln!(w, "\n[grid]\np = {}\ntorus_res = {}\ns_res = {}\ntheta_res = {}", g.p, nums(&g.torus_res), g.s_res, g.theta_res);
        for (name, m) in [("chi", &self.chi), ("omega", &self.omega)] {
            let _ = writeln!(w, "\n[{name}]\nre = {}\nim = {}", nums(&m.re), nums(&m.im));
        }
        let key = match self.psi.source {
            PsiSource::Expr => "expr",
            PsiSource::Solution => "solution",
        };
        let _ = writeln!(w, "\n[psi]\n{key} = {}", self.psi.expr);
        if let Some(phi) = &self.phi {
            let _ = writeln!(w, "\n[phi]\nlower = {}\nupper = {}", phi.lower, phi.upper);
        }
        let s = &self.solver;
        let _ = writeln!(
            w,
            "\n[solver]\ntol_newton = {:?}\nmax_newton = {}\narmijo = {:?}\nmin_step = {:?}\ngmres_tol = {:?}\ngmres_floor = {:?}\ngmres_restart = {}\ngmres_max_iters = {}\ndt_initial = {:?}\ndt_growth = {:?}\ndt_min = {:?}\nmargin_target = {:?}\neps_schedule = {}",
            s.tol_newton,
            s.max_newton,
            s.armijo,
            s.min_step,
            s.linear.tol,
            s.linear.floor,
            s.linear.restart,
            s.linear.max_iters,
            s.dt_initial,
            s.dt_growth,
            s.dt_min,
            s.margin_target,
            nums(&self.eps_schedule)
        );
        let _ = writeln!(w, "\n[run]\nseed = {}", self.seed);
        let _ = writeln!(w, "\n[cones]\nsamples = {}", self.cone_samples);
        let a = &self.arrow;
        let _ = writeln!(
            w,
            "\n[arrow]\nn_min = {}\nn_max = {}\ninstances = {}\nepsilons = {}\ncorner_factors = {}\nthreshold = {}\nd_range = {:?}\na_radius = {:?}",
            a.n_min,
            a.n_max,
            a.instances,
            nums(&a.epsilons),
            nums(&a.corner_factors),
            threshold_name(a.threshold),
            a.d_range,
            a.a_radius
        );
        let p = &self.probe;
        let _ = writeln!(
            w,
            "\n[probe]\nladder = {}\nrefine_axes = {}\nguan_samples = {}\nbetas = {}",
            nums(&p.ladder),
            p.refine_axes.join(", "),
            p.guan_samples,
            nums(&p.betas)
        );
        if let Some(c) = &self.compare {
            let _ = writeln!(w, "\n[compare]\nfirst = {}\nsecond = {}\ntol = {:?}", c.first, c.second, c.tol);
        }
        out
    }
}

#[cfg(test)]
mod tests;
