//! PNG ingestion and emission. Pixels are scaled to `[0, 1]`; RGB channels
//! become frontal slices, and a directory of grayscale frames becomes an
//! `n1 x n2 x frames` tensor.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use image::{DynamicImage, GrayImage, ImageFormat, RgbImage};
use tubalkit::{Mask, Tensor3};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub enum Layout {
    Gray,
    Rgb,
    /// File names of the frames, in stacking order.
    Frames(Vec<String>),
}

#[derive(Debug, Clone)]
pub struct ImageData {
    pub tensor: Tensor3,
    pub layout: Layout,
}

enum Raster {
    Gray(GrayImage),
    Rgb(RgbImage),
}

fn read_png(path: &Path) -> CliResult<Raster> {
    let img = image::open(path).map_err(|e| CliError::config(format!("cannot read image {}: {e}", path.display())))?;
    match img {
        DynamicImage::ImageLuma8(g) => Ok(Raster::Gray(g)),
        DynamicImage::ImageRgb8(c) => Ok(Raster::Rgb(c)),
        other => Err(CliError::config(format!(
            "{}: unsupported pixel format {:?}; expected 8-bit grayscale or RGB",
            path.display(),
            other.color()
        ))),
    }
}

/// PNG files of a frame directory, ordered by the number in their name
/// (then by name).
fn frame_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::config(format!("cannot list {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
        .collect();
    if files.is_empty() {
        return Err(CliError::config(format!("{} contains no PNG frames", dir.display())));
    }
    let key = |p: &PathBuf| {
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        let digits: String = name.chars().filter(char::is_ascii_digit).collect();
        (digits.parse::<u128>().ok(), name)
    };
    files.sort_by_key(key);
    Ok(files)
}

fn file_name(p: &Path) -> String {
    p.file_name().unwrap().to_string_lossy().into_owned()
}

fn gray_frames(files: &[PathBuf]) -> CliResult<(Vec<GrayImage>, (u32, u32))> {
    let mut frames = Vec::with_capacity(files.len());
    for f in files {
        match read_png(f)? {
            Raster::Gray(g) => frames.push(g),
            Raster::Rgb(_) => return Err(CliError::config(format!("{}: frames must be grayscale", f.display()))),
        }
    }
    let dims = frames[0].dimensions();
    if let Some((f, _)) = files.iter().zip(&frames).find(|(_, g)| g.dimensions() != dims) {
        return Err(CliError::config(format!(
            "{}: frame size differs from the first frame",
            f.display()
        )));
    }
    Ok((frames, dims))
}

fn stack_gray(frames: &[GrayImage]) -> Tensor3 {
    let (w, h) = frames[0].dimensions();
    Tensor3::from_fn(h as usize, w as usize, frames.len(), |i, j, k| {
        frames[k].get_pixel(j as u32, i as u32)[0] as f64 / 255.0
    })
}

fn rgb_tensor(img: &RgbImage) -> Tensor3 {
    let (w, h) = img.dimensions();
    Tensor3::from_fn(h as usize, w as usize, 3, |i, j, k| {
        img.get_pixel(j as u32, i as u32)[k] as f64 / 255.0
    })
}

/// Load a PNG file or a directory of grayscale PNG frames.
pub fn load(path: &Path) -> CliResult<ImageData> {
    if path.is_dir() {
        let files = frame_files(path)?;
        let (frames, _) = gray_frames(&files)?;
        return Ok(ImageData {
            tensor: stack_gray(&frames),
            layout: Layout::Frames(files.iter().map(|f| file_name(f)).collect()),
        });
    }
    Ok(match read_png(path)? {
        Raster::Gray(g) => ImageData {
            tensor: stack_gray(std::slice::from_ref(&g)),
            layout: Layout::Gray,
        },
        Raster::Rgb(c) => ImageData {
            tensor: rgb_tensor(&c),
            layout: Layout::Rgb,
        },
    })
}

/// Load a mask image: zero pixels are missing. A grayscale mask applies to
/// every frontal slice; an RGB mask (for RGB data) or a frame directory
/// (for frame data) is matched slice by slice.
pub fn load_mask(path: &Path, dims: (usize, usize, usize)) -> CliResult<Mask> {
    let (n1, n2, n3) = dims;
    let check = |w: u32, h: u32, what: &Path| {
        if (h as usize, w as usize) != (n1, n2) {
            Err(CliError::config(format!(
                "{}: mask is {w}x{h}, data is {n2}x{n1}",
                what.display()
            )))
        } else {
            Ok(())
        }
    };
    let observed: Vec<bool> = if path.is_dir() {
        let files = frame_files(path)?;
        let (frames, (w, h)) = gray_frames(&files)?;
        check(w, h, path)?;
        if frames.len() != n3 {
            return Err(CliError::config(format!(
                "mask has {} frames, data has {n3}",
                frames.len()
            )));
        }
        stack_gray(&frames).data().iter().map(|&v| v != 0.0).collect()
    } else {
        match read_png(path)? {
            Raster::Gray(g) => {
                check(g.width(), g.height(), path)?;
                let plane: Vec<bool> = g.pixels().map(|p| p[0] != 0).collect();
                plane.iter().copied().cycle().take(n1 * n2 * n3).collect()
            }
            Raster::Rgb(c) => {
                check(c.width(), c.height(), path)?;
                if n3 != 3 {
                    return Err(CliError::config("an RGB mask needs RGB data"));
                }
                rgb_tensor(&c).data().iter().map(|&v| v != 0.0).collect()
            }
        }
    };
    Ok(Mask::from_vec(dims, observed)?)
}

fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

fn png_bytes(img: DynamicImage) -> CliResult<Vec<u8>> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| CliError::Runtime(format!("PNG encoding failed: {e}")))?;
    Ok(buf.into_inner())
}

fn gray_slice(t: &Tensor3, k: usize) -> GrayImage {
    let (n1, n2, _) = t.dims();
    GrayImage::from_fn(n2 as u32, n1 as u32, |x, y| {
        image::Luma([quantize(t.get(y as usize, x as usize, k))])
    })
}

/// Encode `t` in the layout it was loaded with. Returns `(relative path,
/// bytes)` pairs: `<stem>.png`, or `<stem>/<frame name>` for frames.
pub fn encode(t: &Tensor3, layout: &Layout, stem: &str) -> CliResult<Vec<(PathBuf, Vec<u8>)>> {
    let (n1, n2, _) = t.dims();
    match layout {
        Layout::Gray => Ok(vec![(
            format!("{stem}.png").into(),
            png_bytes(gray_slice(t, 0).into())?,
        )]),
        Layout::Rgb => {
            let img = RgbImage::from_fn(n2 as u32, n1 as u32, |x, y| {
                let (i, j) = (y as usize, x as usize);
                image::Rgb([
                    quantize(t.get(i, j, 0)),
                    quantize(t.get(i, j, 1)),
                    quantize(t.get(i, j, 2)),
                ])
            });
            Ok(vec![(format!("{stem}.png").into(), png_bytes(img.into())?)])
        }
        Layout::Frames(names) => names
            .iter()
            .enumerate()
            .map(|(k, name)| Ok((Path::new(stem).join(name), png_bytes(gray_slice(t, k).into())?)))
            .collect(),
    }
}

pub fn mask_tensor(mask: &Mask) -> Tensor3 {
    let dims = mask.dims();
    let data = mask.as_slice().iter().map(|&o| if o { 1.0 } else { 0.0 }).collect();
    Tensor3::from_vec(dims, data).expect("mask dims")
}
