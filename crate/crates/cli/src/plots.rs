use std::ops::Range;
use std::path::Path;

use plotters::prelude::*;

use crate::error::{CliError, CliResult};

const SIZE: (u32, u32) = (800, 520);

/// A named polyline.
pub struct Curve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

fn span(values: impl Iterator<Item = f64>) -> Range<f64> {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return 0.0..1.0;
    }
    let pad = ((hi - lo) * 0.05).max(1e-9 * lo.abs().max(hi.abs()).max(1.0));
    (lo - pad)..(hi + pad)
}

fn fail(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Plot { path: path.to_path_buf(), reason: e.to_string() }
}

/// Draws the curves on common axes; `reference` is drawn thick and black.
pub fn line_plot(
    path: &Path,
    title: &str,
    axes: (&str, &str),
    curves: &[Curve],
    reference: Option<&Curve>,
) -> CliResult<()> {
    let all = || curves.iter().chain(reference).flat_map(|c| c.points.iter());
    let xs = span(all().map(|p| p.0));
    let ys = span(all().map(|p| p.1));
    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| fail(path, e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 20))
        .margin(12)
        .x_label_area_size(40)
        .y_label_area_size(80)
        .build_cartesian_2d(xs, ys)
        .map_err(|e| fail(path, e))?;
    chart
        .configure_mesh()
        .x_desc(axes.0)
        .y_desc(axes.1)
        .draw()
        .map_err(|e| fail(path, e))?;
    for (k, curve) in curves.iter().enumerate() {
        let color = Palette99::pick(k).to_rgba();
        chart
            .draw_series(LineSeries::new(curve.points.iter().copied(), color.stroke_width(2)))
            .map_err(|e| fail(path, e))?
            .label(curve.label.as_str())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], color));
    }
    if let Some(r) = reference {
        chart
            .draw_series(LineSeries::new(r.points.iter().copied(), BLACK.stroke_width(3)))
            .map_err(|e| fail(path, e))?
            .label(r.label.as_str())
            .legend(|(x, y)| PathElement::new(vec![(x, y), (x + 20, y)], BLACK));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| fail(path, e))?;
    root.present().map_err(|e| fail(path, e))?;
    Ok(())
}
