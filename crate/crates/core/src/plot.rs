//! Minimal PNG chart rendering for the report command: line charts for the
//! weekly and moving-average series, stacked bars for per-company aspect
//! counts. No text labels; the CSV next to each image carries the numbers.

use std::path::Path;

use image::{Rgb, RgbImage};

use crate::analytics::{DailyPoint, WeekBucket};
use crate::analytics::DatasetStats;
use crate::error::Result;
use crate::types::{Aspect, ASPECTS};

const WIDTH: u32 = 900;
const HEIGHT: u32 = 480;
const MARGIN: u32 = 40;
const BG: Rgb<u8> = Rgb([255, 255, 255]);
const AXIS: Rgb<u8> = Rgb([40, 40, 40]);

fn aspect_color(aspect: Aspect) -> Rgb<u8> {
    match aspect {
        Aspect::E => Rgb([46, 139, 87]),
        Aspect::S => Rgb([65, 105, 225]),
        Aspect::G => Rgb([205, 92, 92]),
    }
}

fn blank() -> RgbImage {
    let mut img = RgbImage::from_pixel(WIDTH, HEIGHT, BG);
    for x in MARGIN..WIDTH - MARGIN {
        img.put_pixel(x, HEIGHT - MARGIN, AXIS);
    }
    for y in MARGIN..HEIGHT - MARGIN {
        img.put_pixel(MARGIN, y, AXIS);
    }
    img
}

fn draw_line(img: &mut RgbImage, x0: f64, y0: f64, x1: f64, y1: f64, color: Rgb<u8>) {
    let steps = ((x1 - x0).abs().max((y1 - y0).abs()).ceil() as usize).max(1);
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = (x0 + (x1 - x0) * t).round() as i64;
        let y = (y0 + (y1 - y0) * t).round() as i64;
        if x >= 0 && y >= 0 && (x as u32) < WIDTH && (y as u32) < HEIGHT {
            img.put_pixel(x as u32, y as u32, color);
        }
    }
}

fn series_lines(img: &mut RgbImage, values: &[(f64, f64)], x_range: (f64, f64), y_range: (f64, f64), color: Rgb<u8>) {
    let plot_w = (WIDTH - 2 * MARGIN) as f64;
    let plot_h = (HEIGHT - 2 * MARGIN) as f64;
    let sx = |x: f64| MARGIN as f64 + (x - x_range.0) / (x_range.1 - x_range.0).max(1e-9) * plot_w;
    let sy = |y: f64| {
        HEIGHT as f64 - MARGIN as f64 - (y - y_range.0) / (y_range.1 - y_range.0).max(1e-9) * plot_h
    };
    for pair in values.windows(2) {
        draw_line(img, sx(pair[0].0), sy(pair[0].1), sx(pair[1].0), sy(pair[1].1), color);
    }
}

/// Weekly totals and per-aspect counts as line series.
pub fn plot_weekly(path: impl AsRef<Path>, weeks: &[WeekBucket]) -> Result<()> {
    let mut img = blank();
    if !weeks.is_empty() {
        let max = weeks.iter().map(|w| w.total).max().unwrap().max(1) as f64;
        let x_range = (0.0, (weeks.len().max(2) - 1) as f64);
        let total: Vec<(f64, f64)> =
            weeks.iter().enumerate().map(|(i, w)| (i as f64, w.total as f64)).collect();
        series_lines(&mut img, &total, x_range, (0.0, max), AXIS);
        for aspect in ASPECTS {
            let series: Vec<(f64, f64)> = weeks
                .iter()
                .enumerate()
                .map(|(i, w)| (i as f64, w.per_aspect[aspect.index()] as f64))
                .collect();
            series_lines(&mut img, &series, x_range, (0.0, max), aspect_color(aspect));
        }
    }
    img.save(path.as_ref()).map_err(|e| crate::error::Error::validation(e.to_string()))?;
    Ok(())
}

/// Per-aspect moving-average sentiment in [−1, 1].
pub fn plot_moving_average(
    path: impl AsRef<Path>,
    series: &std::collections::BTreeMap<Aspect, Vec<DailyPoint>>,
) -> Result<()> {
    let mut img = blank();
    let n = series.values().map(|s| s.len()).max().unwrap_or(0);
    if n > 1 {
        let x_range = (0.0, (n - 1) as f64);
        for (aspect, points) in series {
            let values: Vec<(f64, f64)> =
                points.iter().enumerate().map(|(i, p)| (i as f64, p.value)).collect();
            series_lines(&mut img, &values, x_range, (-1.0, 1.0), aspect_color(*aspect));
        }
        // Zero line.
        let mid = HEIGHT / 2;
        for x in (MARGIN..WIDTH - MARGIN).step_by(4) {
            img.put_pixel(x, mid, Rgb([180, 180, 180]));
        }
    }
    img.save(path.as_ref()).map_err(|e| crate::error::Error::validation(e.to_string()))?;
    Ok(())
}

/// Per-company stacked aspect counts, companies ordered by total.
pub fn plot_company_aspects(path: impl AsRef<Path>, stats: &DatasetStats) -> Result<()> {
    let mut img = blank();
    let mut companies: Vec<_> = stats.per_company.values().collect();
    companies.sort_by(|a, b| b.count.cmp(&a.count));
    if !companies.is_empty() {
        let max = companies[0].count.max(1) as f64;
        let plot_w = (WIDTH - 2 * MARGIN) as usize;
        let bar_w = (plot_w / companies.len()).clamp(1, 40);
        let plot_h = (HEIGHT - 2 * MARGIN) as f64;
        for (i, c) in companies.iter().enumerate() {
            let x0 = MARGIN as usize + i * bar_w;
            let mut y_base = HEIGHT - MARGIN;
            for aspect in ASPECTS {
                let h = (c.aspect_counts[aspect.index()] as f64 / max * plot_h).round() as u32;
                for x in x0..(x0 + bar_w.saturating_sub(1)).min(WIDTH as usize - 1) {
                    for y in y_base.saturating_sub(h)..y_base {
                        img.put_pixel(x as u32, y, aspect_color(aspect));
                    }
                }
                y_base = y_base.saturating_sub(h);
            }
        }
    }
    img.save(path.as_ref()).map_err(|e| crate::error::Error::validation(e.to_string()))?;
    Ok(())
}
