use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mco_core::Scenario;
use plotters::prelude::*;
use serde::Serialize;

use crate::config::SolverKind;
use crate::error::{HarnessError, Result};
use crate::experiment::RunRecord;

/// Means over the successful records of one (scenario, solver, qubits) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scenario: Scenario,
    pub solver: SolverKind,
    pub qubits: usize,
    pub runs: usize,
    pub mean_relative_cost: f64,
    pub mean_violations: f64,
    pub mean_solve_time: f64,
    /// Runs that returned an assignment with no violations.
    pub feasible_fraction: f64,
}

pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut cells: BTreeMap<(Scenario, SolverKind, usize), Vec<&RunRecord>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.is_ok()) {
        cells.entry((r.scenario, r.solver, r.qubits)).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((scenario, solver, qubits), rs)| {
            let n = rs.len() as f64;
            let mean = |f: &dyn Fn(&RunRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>() / n;
            SummaryRow {
                scenario,
                solver,
                qubits,
                runs: rs.len(),
                mean_relative_cost: mean(&|r| r.relative_cost.unwrap_or(0.0)),
                mean_violations: mean(&|r| f64::from(r.total_violations().unwrap_or(0))),
                mean_solve_time: mean(&|r| r.wall_time_solve),
                feasible_fraction: mean(&|r| f64::from(u8::from(r.total_violations() == Some(0)))),
            }
        })
        .collect()
}

fn plot_err<E: std::fmt::Display>(e: E) -> HarnessError {
    HarnessError::Plot(e.to_string())
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi - lo < 1e-9 {
        (lo - 1.0, hi + 1.0)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

type Series = Vec<(SolverKind, Vec<(f64, f64)>)>;

/// File stem, axis label, log scale, value.
type Metric = (&'static str, &'static str, bool, fn(&SummaryRow) -> f64);

fn line_chart(path: &Path, title: &str, y_desc: &str, series: &Series, log_y: bool) -> Result<()> {
    let pts = series.iter().flat_map(|(_, p)| p.iter().copied());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for (x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let (x0, x1) = padded(x0, x1);
    let root = SVGBackend::new(path, (800, 500)).into_drawing_area();
    root.fill(&WHITE).map_err(plot_err)?;
    let mut builder = ChartBuilder::on(&root);
    builder.caption(title, ("sans-serif", 22)).margin(12).x_label_area_size(40).y_label_area_size(70);

    macro_rules! draw {
        ($chart:expr) => {{
            let mut chart = $chart;
            chart.configure_mesh().x_desc("qubits").y_desc(y_desc).draw().map_err(plot_err)?;
            for (i, (solver, pts)) in series.iter().enumerate() {
                let color = Palette99::pick(i).to_rgba();
                chart
                    .draw_series(LineSeries::new(pts.clone(), color.stroke_width(2)))
                    .map_err(plot_err)?
                    .label(solver.name())
                    .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
                chart.draw_series(pts.iter().map(|&p| Circle::new(p, 3, color.filled()))).map_err(plot_err)?;
            }
            chart
                .configure_series_labels()
                .background_style(WHITE.mix(0.8))
                .border_style(BLACK)
                .draw()
                .map_err(plot_err)?;
        }};
    }

    if log_y {
        let lo = y0.max(1e-6);
        let hi = y1.max(lo * 10.0);
        draw!(builder.build_cartesian_2d(x0..x1, (lo..hi).log_scale()).map_err(plot_err)?);
    } else {
        let (y0, y1) = padded(y0, y1);
        draw!(builder.build_cartesian_2d(x0..x1, y0..y1).map_err(plot_err)?);
    }
    root.present().map_err(plot_err)?;
    Ok(())
}

/// Writes three SVG charts per scenario present in `records` (mean relative
/// cost, mean violations and mean solve time against qubit count, one line
/// per solver) and returns their paths.
pub fn plot_summary(records: &[RunRecord], out_dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let rows = summarize(records);
    let mut scenarios: Vec<Scenario> = rows.iter().map(|r| r.scenario).collect();
    scenarios.dedup();
    let mut written = Vec::new();
    for scenario in scenarios {
        let metrics: [Metric; 3] = [
            ("relative_cost", "mean relative cost", false, |r| r.mean_relative_cost),
            ("violations", "mean violations", false, |r| r.mean_violations),
            ("solve_time", "mean solve time [s]", true, |r| r.mean_solve_time.max(1e-6)),
        ];
        for (name, y_desc, log_y, metric) in metrics {
            let mut series: Series = Vec::new();
            for r in rows.iter().filter(|r| r.scenario == scenario) {
                match series.last_mut() {
                    Some((s, pts)) if *s == r.solver => pts.push((r.qubits as f64, metric(r))),
                    _ => series.push((r.solver, vec![(r.qubits as f64, metric(r))])),
                }
            }
            let path = out_dir.join(format!("{scenario}_{name}.svg"));
            line_chart(&path, &format!("{scenario}: {y_desc}"), y_desc, &series, log_y)?;
            written.push(path);
        }
    }
    Ok(written)
}
