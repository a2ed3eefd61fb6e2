//! PNG heatmaps: `h1` on the horizontal axis, `h0` increasing upwards.

use crate::config::Observable;
use crate::error::{CliError, CliResult};
use crate::sweep::SweepResult;
use image::{Rgb, RgbImage};
use std::path::Path;

const TARGET_PX: usize = 404;
const LEFT: u32 = 64;
const RIGHT: u32 = 96;
const TOP: u32 = 16;
const BOTTOM: u32 = 44;
const BAR_WIDTH: u32 = 14;
const FONT_SCALE: u32 = 2;
const MISSING: Rgb<u8> = Rgb([128, 128, 128]);
const INK: Rgb<u8> = Rgb([0, 0, 0]);
const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);

/// Diverging blue-white-red map on `t` in `[-1, 1]`.
pub fn diverging(t: f64) -> Rgb<u8> {
    const COLD: [f64; 3] = [59.0, 76.0, 192.0];
    const HOT: [f64; 3] = [180.0, 4.0, 38.0];
    let t = t.clamp(-1.0, 1.0);
    let end = if t < 0.0 { COLD } else { HOT };
    let a = t.abs();
    let mix = |c: f64| (255.0 + (c - 255.0) * a).round() as u8;
    Rgb([mix(end[0]), mix(end[1]), mix(end[2])])
}

/// Symmetric color limit: largest finite magnitude, or 1 for an all-zero map.
fn color_limit(values: &[f64]) -> f64 {
    let m = values
        .iter()
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

pub fn render(result: &SweepResult, obs: Observable) -> CliResult<RgbImage> {
    let values = result
        .column(obs)
        .ok_or_else(|| CliError::Config(format!("{} was not computed", obs.name())))?;
    let (n0, n1) = (result.h0_values.len(), result.h1_values.len());
    let cell = (TARGET_PX / n0.max(n1)).max(1) as u32;
    let (plot_w, plot_h) = (n1 as u32 * cell, n0 as u32 * cell);
    let mut img = RgbImage::from_pixel(LEFT + plot_w + RIGHT, TOP + plot_h + BOTTOM, BACKGROUND);
    let limit = color_limit(&values);

    for i in 0..n0 {
        for j in 0..n1 {
            let v = values[i * n1 + j];
            let color = if v.is_finite() {
                diverging(v / limit)
            } else {
                MISSING
            };
            let y0 = TOP + (n0 - 1 - i) as u32 * cell;
            fill(&mut img, LEFT + j as u32 * cell, y0, cell, cell, color);
        }
    }
    frame(&mut img, LEFT - 1, TOP - 1, plot_w + 2, plot_h + 2);

    // axis ticks at both ends
    let (h0s, h1s) = (&result.h0_values, &result.h1_values);
    let tick = |v: f64| format!("{v:.2}");
    let below = TOP + plot_h + 6;
    text(&mut img, LEFT, below, &tick(h1s[0]));
    let last = tick(h1s[n1 - 1]);
    text(&mut img, LEFT + plot_w - text_width(&last), below, &last);
    text(
        &mut img,
        LEFT + plot_w / 2 - text_width("h1") / 2,
        below + 16,
        "h1",
    );
    let top_label = tick(h0s[n0 - 1]);
    text(&mut img, LEFT - 6 - text_width(&top_label), TOP, &top_label);
    let bottom_label = tick(h0s[0]);
    text(
        &mut img,
        LEFT - 6 - text_width(&bottom_label),
        TOP + plot_h - 10,
        &bottom_label,
    );
    text(
        &mut img,
        LEFT - 6 - text_width("h0"),
        TOP + plot_h / 2 - 5,
        "h0",
    );

    // color bar with its symmetric limits
    let bar_x = LEFT + plot_w + 12;
    for y in 0..plot_h {
        let t = 1.0 - 2.0 * (y as f64 + 0.5) / plot_h as f64;
        fill(&mut img, bar_x, TOP + y, BAR_WIDTH, 1, diverging(t));
    }
    frame(&mut img, bar_x - 1, TOP - 1, BAR_WIDTH + 2, plot_h + 2);
    let label_x = bar_x + BAR_WIDTH + 4;
    text(&mut img, label_x, TOP, &bar_label(limit));
    text(&mut img, label_x, TOP + plot_h / 2 - 5, "0");
    text(&mut img, label_x, TOP + plot_h - 10, &bar_label(-limit));
    Ok(img)
}

pub fn write_png(result: &SweepResult, obs: Observable, path: &Path) -> CliResult<()> {
    render(result, obs)?.save(path)?;
    Ok(())
}

fn bar_label(v: f64) -> String {
    let a = v.abs();
    if (1e-2..1e3).contains(&a) {
        format!("{v:.3}")
    } else {
        format!("{v:.1e}")
    }
}

fn fill(img: &mut RgbImage, x: u32, y: u32, w: u32, h: u32, color: Rgb<u8>) {
    for yy in y..(y + h).min(img.height()) {
        for xx in x..(x + w).min(img.width()) {
            img.put_pixel(xx, yy, color);
        }
    }
}

fn frame(img: &mut RgbImage, x: u32, y: u32, w: u32, h: u32) {
    fill(img, x, y, w, 1, INK);
    fill(img, x, y + h - 1, w, 1, INK);
    fill(img, x, y, 1, h, INK);
    fill(img, x + w - 1, y, 1, h, INK);
}

/// 3x5 glyphs, rows top to bottom, `#` set.
fn glyph(c: char) -> Option<[&'static str; 5]> {
    Some(match c {
        '0' => ["###", "#.#", "#.#", "#.#", "###"],
        '1' => [".#.", "##.", ".#.", ".#.", "###"],
        '2' => ["###", "..#", "###", "#..", "###"],
        '3' => ["###", "..#", "###", "..#", "###"],
        '4' => ["#.#", "#.#", "###", "..#", "..#"],
        '5' => ["###", "#..", "###", "..#", "###"],
        '6' => ["###", "#..", "###", "#.#", "###"],
        '7' => ["###", "..#", ".#.", ".#.", ".#."],
        '8' => ["###", "#.#", "###", "#.#", "###"],
        '9' => ["###", "#.#", "###", "..#", "###"],
        '-' => ["...", "...", "###", "...", "..."],
        '.' => ["...", "...", "...", "...", ".#."],
        'e' => ["...", "###", "###", "#..", "###"],
        'h' => ["#..", "#..", "###", "#.#", "#.#"],
        _ => return None,
    })
}

fn text_width(s: &str) -> u32 {
    s.chars().count() as u32 * 4 * FONT_SCALE
}

fn text(img: &mut RgbImage, x: u32, y: u32, s: &str) {
    for (k, c) in s.chars().enumerate() {
        let Some(rows) = glyph(c) else { continue };
        let gx = x + k as u32 * 4 * FONT_SCALE;
        for (r, row) in rows.iter().enumerate() {
            for (col, bit) in row.chars().enumerate() {
                if bit == '#' {
                    let px = gx + col as u32 * FONT_SCALE;
                    let py = y + r as u32 * FONT_SCALE;
                    fill(img, px, py, FONT_SCALE, FONT_SCALE, INK);
                }
            }
        }
    }
}
