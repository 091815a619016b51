//! PNG rendering of a raster with raster and path overlays.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use thinlab::{PathSample, Point2, RasterSet};

use crate::error::CliError;

const TARGET_PIXELS: usize = 512;
const PALETTE: [[u8; 3]; 4] = [[214, 39, 40], [31, 119, 180], [44, 160, 44], [255, 127, 14]];

enum Overlay {
    Set(RasterSet),
    Path(PathSample),
}

fn load_overlay(base: &RasterSet, path: &Path) -> Result<Overlay, CliError> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let g = base.grid();
    match ext {
        "pgm" => {
            let set = RasterSet::read_pgm(path)?;
            if !set.grid().same_as(g) {
                return Err(CliError::Usage(format!("{}: bounding box differs from the base raster", path.display())));
            }
            Ok(Overlay::Set(set))
        }
        "csv" => {
            let p = PathSample::read_csv(path)?;
            let outside =
                p.points().iter().any(|q| q.x < g.xmin() || q.x > g.xmax() || q.y < g.ymin() || q.y > g.ymax());
            if outside {
                return Err(CliError::Usage(format!("{}: path leaves the base raster's bounding box", path.display())));
            }
            Ok(Overlay::Path(p))
        }
        _ => Err(CliError::Usage(format!("{}: expected a .pgm raster or a .csv path", path.display()))),
    }
}

struct Canvas {
    w: usize,
    h: usize,
    rgb: Vec<u8>,
}

impl Canvas {
    fn put(&mut self, x: i64, y: i64, c: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < self.w && (y as usize) < self.h {
            let k = 3 * (y as usize * self.w + x as usize);
            self.rgb[k..k + 3].copy_from_slice(&c);
        }
    }

    fn blend(&mut self, x: usize, y: usize, c: [u8; 3]) {
        let k = 3 * (y * self.w + x);
        for (d, s) in self.rgb[k..k + 3].iter_mut().zip(c) {
            *d = ((*d as u16 + s as u16) / 2) as u8;
        }
    }

    fn line(&mut self, (x0, y0): (i64, i64), (x1, y1): (i64, i64), c: [u8; 3]) {
        let (dx, dy) = ((x1 - x0).abs(), -(y1 - y0).abs());
        let (sx, sy) = (if x0 < x1 { 1 } else { -1 }, if y0 < y1 { 1 } else { -1 });
        let (mut x, mut y, mut err) = (x0, y0, dx + dy);
        loop {
            self.put(x, y, c);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }
}

/// Draws `base` in black on white, each overlay in its own colour, and
/// writes the PNG to `out`.
pub fn render(base_path: &Path, overlays: &[impl AsRef<Path>], out: &Path) -> Result<(), CliError> {
    let base = RasterSet::read_pgm(base_path)?;
    let layers = overlays.iter().map(|p| load_overlay(&base, p.as_ref())).collect::<Result<Vec<_>, _>>()?;
    let (nx, ny) = (base.nx(), base.ny());
    let scale = (TARGET_PIXELS / nx.max(ny)).max(1);
    let mut canvas = Canvas { w: nx * scale, h: ny * scale, rgb: vec![255; 3 * nx * ny * scale * scale] };
    let g = base.grid().clone();
    let to_pixel = |p: Point2| -> (i64, i64) {
        let x = (p.x - g.xmin()) / g.h() * scale as f64;
        let y = (g.ymax() - p.y) / g.h() * scale as f64;
        (x.floor() as i64, y.floor() as i64)
    };
    let fill = |canvas: &mut Canvas, set: &RasterSet, colour: Option<[u8; 3]>| {
        for (i, j) in set.occupied() {
            for dy in 0..scale {
                for dx in 0..scale {
                    let (x, y) = (i * scale + dx, (ny - 1 - j) * scale + dy);
                    match colour {
                        Some(c) => canvas.blend(x, y, c),
                        None => canvas.put(x as i64, y as i64, [0, 0, 0]),
                    }
                }
            }
        }
    };
    fill(&mut canvas, &base, None);
    for (k, layer) in layers.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        match layer {
            Overlay::Set(s) => fill(&mut canvas, s, Some(colour)),
            Overlay::Path(p) => {
                for w in p.points().windows(2) {
                    canvas.line(to_pixel(w[0]), to_pixel(w[1]), colour);
                }
            }
        }
    }

    let file = BufWriter::new(File::create(out)?);
    let mut enc = png::Encoder::new(file, canvas.w as u32, canvas.h as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut writer = enc.write_header().map_err(png_error)?;
    writer.write_image_data(&canvas.rgb).map_err(png_error)?;
    writer.finish().map_err(png_error)?;
    Ok(())
}

fn png_error(e: png::EncodingError) -> CliError {
    match e {
        png::EncodingError::IoError(io) => CliError::Io(io),
        other => CliError::Usage(format!("png encoding failed: {other}")),
    }
}
