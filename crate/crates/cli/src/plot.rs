//! SVG plot of `log10 δ_k` against `k` for every method of a sweep.

use std::path::Path;

use anyhow::{anyhow, Result};
use plotters::prelude::*;
use tubal::experiment::MethodRun;

pub fn convergence_svg(path: &Path, runs: &[MethodRun], caption: &str) -> Result<()> {
    let series: Vec<(String, Vec<(f64, f64)>)> = runs
        .iter()
        .map(|r| {
            let pts = r
                .history
                .delta
                .iter()
                .enumerate()
                .filter(|(_, d)| **d > 0.0 && d.is_finite())
                .map(|(k, d)| (k as f64, d.log10()))
                .collect();
            (r.method.to_string(), pts)
        })
        .collect();
    let kmax = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.0)).fold(1.0, f64::max);
    let (ylo, yhi) = series
        .iter()
        .flat_map(|(_, p)| p.iter().map(|q| q.1))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), y| (lo.min(y), hi.max(y)));
    let (ylo, yhi) = if ylo.is_finite() { (ylo.floor(), yhi.ceil().max(ylo.floor() + 1.0)) } else { (-1.0, 0.0) };

    let err = |e: &dyn std::fmt::Display| anyhow!("plot {}: {e}", path.display());
    let root = SVGBackend::new(path, (900, 600)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| err(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(caption, ("sans-serif", 16))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(50)
        .build_cartesian_2d(0.0..kmax, ylo..yhi)
        .map_err(|e| err(&e))?;
    chart
        .configure_mesh()
        .x_desc("k")
        .y_desc("log10 delta_k")
        .draw()
        .map_err(|e| err(&e))?;
    for (i, (name, pts)) in series.into_iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts, color.stroke_width(2)))
            .map_err(|e| err(&e))?
            .label(name)
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| err(&e))?;
    root.present().map_err(|e| err(&e))?;
    Ok(())
}
