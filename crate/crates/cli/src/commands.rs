//! Subcommands other than `verify`.

use ekdev_core::simulate::{exact_y_distribution, exact_z_distribution, sample_y, sample_z, DiscreteDistribution, Model};
use ekdev_core::{closed_form_rate, counterexample_schedule, legendre_rate, ClosedFormFamily, PrimeTable, Primes};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{render_svg, Cell, Series, Table};

/// A table plus the chart drawn from it.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub table: Table,
    pub series: Vec<Series>,
    /// False when a verification check failed.
    pub passed: bool,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.table.to_csv(),
            Format::Svg => render_svg(&self.title, &self.x_label, &self.y_label, &self.series),
        }
    }
}

/// `I(x)` over the grid: numeric transform, plus the closed form when one exists.
pub fn cmd_rate(cfg: &RunConfig) -> Result<Report, CliError> {
    let rho = cfg.require_rho()?;
    rho.validate()?;
    let grid = cfg.require_x_grid()?;
    let cutoff = cfg.cutoff()?;
    let family = if cutoff.is_infinite() {
        ClosedFormFamily::for_measure(rho)
    } else {
        None
    };
    let mut columns = vec!["x"];
    if family.is_some() {
        columns.push("I_closed_form");
    }
    columns.extend(["I_numeric", "theta_star", "status"]);
    let mut table = Table::new(columns);
    let mut numeric = Vec::new();
    let mut closed = Vec::new();
    for x in grid.points() {
        let r = legendre_rate(rho, x, cutoff)?;
        let mut row: Vec<Cell> = vec![x.into()];
        if let Some(f) = family {
            let c = closed_form_rate(f, x)?;
            closed.push((x, c.value));
            row.push(c.value.into());
        }
        numeric.push((x, r.value));
        row.push(r.value.into());
        row.push(r.theta_star.into());
        row.push(format!("{:?}", r.status).to_lowercase().into());
        table.push(row);
    }
    let mut series = vec![Series::new("numeric", numeric)];
    if let Some(f) = family {
        series.push(Series::new(format!("closed form {}", f.name()), closed));
    }
    Ok(Report {
        title: "rate function".into(),
        x_label: "x".into(),
        y_label: "I(x)".into(),
        table,
        series,
        passed: true,
    })
}

fn distribution_report(title: String, d: &DiscreteDistribution) -> Report {
    let mut table = Table::new(["value", "prob"]);
    for (v, p) in d.iter() {
        table.push(vec![v.into(), p.into()]);
    }
    Report {
        title,
        x_label: "value".into(),
        y_label: "probability".into(),
        series: vec![Series::new("law", d.iter().collect())],
        table,
        passed: true,
    }
}

/// Exact law (`exact: true`) or seeded samples of either model.
pub fn cmd_simulate(cfg: &RunConfig, seed: Option<u64>) -> Result<Report, CliError> {
    let g = cfg.require_g()?;
    let model = cfg.model.ok_or_else(|| CliError::missing("model"))?;
    if cfg.exact {
        return Ok(match model {
            Model::Y => {
                let q = cfg.require_q()?;
                let d = exact_y_distribution(&Primes::sieve(q)?, q, g, cfg.cutoff()?)?;
                distribution_report(format!("exact Y law, Q = {q}"), &d)
            }
            Model::Z => {
                let n = cfg.require_n()?;
                distribution_report(format!("exact Z law, n = {n}"), &exact_z_distribution(n, g)?)
            }
        });
    }
    let count = cfg.samples.ok_or_else(|| CliError::missing("samples"))?;
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let batch = match model {
        Model::Z => {
            let n = cfg.require_n()?;
            let limit = if g.needs_index() { n } else { (n as f64).sqrt().ceil() as u64 + 1 };
            sample_z(&PrimeTable::new(limit.max(2))?, n, g, count, seed)?
        }
        Model::Y => {
            let q = cfg.require_q()?;
            sample_y(&Primes::sieve(q)?, q, g, count, seed)?
        }
    };
    let mut table = Table::new(["index", "value"]);
    for (i, &v) in batch.values.iter().enumerate() {
        table.push(vec![Cell::Int(i as i64), v.into()]);
    }
    let mut sorted = batch.values.clone();
    sorted.sort_by(f64::total_cmp);
    let mut hist: Vec<(f64, f64)> = Vec::new();
    for v in sorted {
        match hist.last_mut() {
            Some((x, c)) if *x == v => *c += 1.0,
            _ => hist.push((v, 1.0)),
        }
    }
    let total = batch.values.len().max(1) as f64;
    let hist = hist.into_iter().map(|(x, c)| (x, c / total)).collect();
    Ok(Report {
        title: format!("{model:?} samples, seed {seed}"),
        x_label: "value".into(),
        y_label: "frequency".into(),
        table,
        series: vec![Series::new("empirical", hist)],
        passed: true,
    })
}

/// Exact laws of both models side by side: `g(V)` on `1..=n` and the
/// independent sum over `p <= Q` (default `Q = n`).
pub fn cmd_oracle(cfg: &RunConfig) -> Result<Report, CliError> {
    let g = cfg.require_g()?;
    let n = cfg.require_n()?;
    let q = cfg.q.unwrap_or(n);
    let z = exact_z_distribution(n, g)?;
    let y = exact_y_distribution(&Primes::sieve(q.max(2))?, q.max(2), g, cfg.cutoff()?)?;
    let mut rows: Vec<(f64, f64, f64)> = z.iter().map(|(v, p)| (v, p, 0.0)).collect();
    for (v, p) in y.iter() {
        let tol = 1e-9 * z.step.min(y.step);
        match rows.iter_mut().find(|r| (r.0 - v).abs() <= tol) {
            Some(r) => r.2 = p,
            None => rows.push((v, 0.0, p)),
        }
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut table = Table::new(["value", "z_prob", "y_prob"]);
    for &(v, zp, yp) in &rows {
        table.push(vec![v.into(), zp.into(), yp.into()]);
    }
    Ok(Report {
        title: format!("exact laws, n = {n}, Q = {q}"),
        x_label: "value".into(),
        y_label: "probability".into(),
        series: vec![
            Series::new("Z model", rows.iter().map(|r| (r.0, r.1)).collect()),
            Series::new("Y model", rows.iter().map(|r| (r.0, r.2)).collect()),
        ],
        table,
        passed: true,
    })
}

/// Breakpoints of the oscillating counterexample and the normalized cumulant
/// at each; the chart plots it against `log u`.
pub fn cmd_counterexample(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = cfg.counterexample.unwrap_or_default();
    let s = counterexample_schedule(p.lambda1, p.lambda2, p.delta, p.theta, p.k)?;
    let mut table = Table::new(["k", "u_k", "cumulant", "lower_threshold", "upper_threshold", "crossed"]);
    for (i, (&u, &c)) in s.breakpoints.iter().zip(&s.cumulants).enumerate() {
        let crossed = if i % 2 == 0 { c <= s.lower_threshold } else { c >= s.upper_threshold };
        table.push(vec![
            Cell::Int(i as i64 + 1),
            u.into(),
            c.into(),
            s.lower_threshold.into(),
            s.upper_threshold.into(),
            crossed.to_string().into(),
        ]);
    }
    let u_max = *s.breakpoints.last().expect("k >= 1");
    let steps = 400;
    let curve: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let t = u_max.ln() * i as f64 / steps as f64;
            (t, s.cumulant_at(t.exp()))
        })
        .collect();
    let span = (0.0, u_max.ln());
    Ok(Report {
        title: "oscillating cumulant".into(),
        x_label: "log u".into(),
        y_label: "normalized cumulant".into(),
        series: vec![
            Series::new("cumulant", curve),
            Series::new("lower threshold", vec![(span.0, s.lower_threshold), (span.1, s.lower_threshold)]),
            Series::new("upper threshold", vec![(span.0, s.upper_threshold), (span.1, s.upper_threshold)]),
        ],
        passed: s.alternates(),
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> RunConfig {
        RunConfig::from_json(json).unwrap()
    }

    #[test]
    fn rate_point_mass_table() {
        let r = cmd_rate(&cfg(
            r#"{"rho": {"kind": "atoms", "atoms": [[1.0, 1.0]]}, "x_grid": {"min": 0, "max": 3, "step": 0.5}}"#,
        ))
        .unwrap();
        assert_eq!(r.table.rows.len(), 7);
        assert_eq!(r.table.columns, ["x", "I_closed_form", "I_numeric", "theta_star", "status"]);
        assert_eq!(r.table.rows[2][2], Cell::Float(0.0));
        assert_eq!(r.table.rows[0][2], Cell::Float(1.0));
    }

    #[test]
    fn rate_without_closed_form() {
        let r = cmd_rate(&cfg(
            r#"{"rho": {"kind": "binomial", "n": 2, "beta": 0.3}, "x_grid": {"min": 0.5, "max": 1, "step": 0.5}}"#,
        ))
        .unwrap();
        assert_eq!(r.table.columns, ["x", "I_numeric", "theta_star", "status"]);
    }

    #[test]
    fn simulate_exact_y() {
        let r = cmd_simulate(
            &cfg(r#"{"g": {"kind": "constant", "lambda": 1}, "model": "y", "Q": 3, "exact": true}"#),
            None,
        )
        .unwrap();
        assert_eq!(r.table.rows.len(), 3);
        let r = cmd_simulate(&cfg(r#"{"g": {"kind": "constant", "lambda": 1}, "model": "z", "Q": 3}"#), None);
        assert!(r.is_err());
    }

    #[test]
    fn oracle_side_by_side() {
        let r = cmd_oracle(&cfg(r#"{"g": {"kind": "constant", "lambda": 1}, "n": 10}"#)).unwrap();
        assert_eq!(r.table.rows[0][1], Cell::Float(0.1));
        assert_eq!(r.table.rows.len(), 5);
    }

    #[test]
    fn counterexample_default() {
        let r = cmd_counterexample(&RunConfig::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.table.rows.len(), 6);
    }
}
