//! Datasets: IDX (MNIST) files, seeded subsampling and a synthetic digit set.

use std::collections::BTreeMap;
use std::fs;
use std::io::Cursor;
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt, WriteBytesExt};
use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vecmath::RngHandle;

pub const IDX_UBYTE: u8 = 0x08;
pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// Labelled examples of uniform shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    /// `[len]` or `[channels, height, width]`.
    pub input_shape: Vec<usize>,
}

impl Dataset {
    pub fn new(inputs: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize, input_shape: Vec<usize>) -> Result<Self> {
        if inputs.len() != labels.len() {
            return Err(Error::Dimension {
                expected: inputs.len(),
                found: labels.len(),
            });
        }
        if num_classes == 0 {
            return Err(Error::arg("num_classes must be positive"));
        }
        let len: usize = input_shape.iter().product();
        if let Some(bad) = inputs.iter().find(|x| x.len() != len) {
            return Err(Error::Dimension {
                expected: len,
                found: bad.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= num_classes) {
            return Err(Error::arg(format!("label {bad} not below num_classes {num_classes}")));
        }
        Ok(Dataset {
            inputs,
            labels,
            num_classes,
            input_shape,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn input_len(&self) -> usize {
        self.input_shape.iter().product()
    }

    pub fn class_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        counts
    }

    /// Images from an IDX image array (`[count][rows][cols]`) scaled to
    /// `[0, 1]`, with labels from an IDX label array.
    pub fn from_idx(images: &IdxArray, labels: &IdxArray, num_classes: usize) -> Result<Self> {
        let [count, rows, cols] = images.dims[..] else {
            return Err(Error::arg(format!("image file must have rank 3, got {}", images.dims.len())));
        };
        if labels.dims != [count] {
            return Err(Error::Dimension {
                expected: count,
                found: labels.dims.first().copied().unwrap_or(0),
            });
        }
        let item = rows * cols;
        let inputs = images
            .data
            .chunks_exact(item)
            .map(|px| px.iter().map(|&b| f64::from(b) / 255.0).collect())
            .collect();
        let labels = labels.data.iter().map(|&b| b as usize).collect();
        Dataset::new(inputs, labels, num_classes, vec![1, rows, cols])
    }

    /// MNIST-style image and label files.
    pub fn load_idx_pair(images: impl AsRef<Path>, labels: impl AsRef<Path>) -> Result<Self> {
        Dataset::from_idx(&load_idx(images)?, &load_idx(labels)?, 10)
    }
}

/// An unsigned-byte IDX array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxArray {
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

impl IdxArray {
    pub fn new(dims: Vec<usize>, data: Vec<u8>) -> Result<Self> {
        let expected: usize = dims.iter().product();
        if expected != data.len() {
            return Err(Error::Dimension {
                expected,
                found: data.len(),
            });
        }
        Ok(IdxArray { dims, data })
    }
}

fn parse_err(offset: usize, reason: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        reason: reason.into(),
    }
}

pub fn parse_idx(bytes: &[u8]) -> Result<IdxArray> {
    let mut cur = Cursor::new(bytes);
    let magic = cur
        .read_u32::<BigEndian>()
        .map_err(|_| parse_err(bytes.len(), "file shorter than the 4-byte magic"))?;
    let [z0, z1, type_code, rank] = magic.to_be_bytes();
    if z0 != 0 || z1 != 0 {
        return Err(parse_err(0, format!("bad magic {magic:#010x}: first two bytes must be zero")));
    }
    if type_code != IDX_UBYTE {
        return Err(parse_err(2, format!("unsupported element type {type_code:#04x}")));
    }
    if rank == 0 {
        return Err(parse_err(3, "rank must be at least 1"));
    }
    let mut dims = Vec::with_capacity(rank as usize);
    for i in 0..rank as usize {
        let offset = 4 + 4 * i;
        let d = cur
            .read_u32::<BigEndian>()
            .map_err(|_| parse_err(offset, format!("truncated header: missing dimension {i}")))?;
        dims.push(d as usize);
    }
    let header = 4 + 4 * rank as usize;
    let expected = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| parse_err(4, "dimension product overflows"))?;
    let payload = &bytes[header..];
    if payload.len() < expected {
        return Err(parse_err(
            bytes.len(),
            format!("truncated payload: expected {expected} bytes, found {}", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(parse_err(
            header + expected,
            format!("{} trailing bytes after payload", payload.len() - expected),
        ));
    }
    Ok(IdxArray {
        dims,
        data: payload.to_vec(),
    })
}

pub fn load_idx(path: impl AsRef<Path>) -> Result<IdxArray> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_idx(&bytes)
}

pub fn encode_idx(array: &IdxArray) -> Vec<u8> {
    let mut out = Vec::with_capacity(4 + 4 * array.dims.len() + array.data.len());
    out.extend_from_slice(&[0, 0, IDX_UBYTE, array.dims.len() as u8]);
    for &d in &array.dims {
        out.write_u32::<BigEndian>(d as u32).expect("vec write");
    }
    out.extend_from_slice(&array.data);
    out
}

pub fn write_idx(array: &IdxArray, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_idx(array)).map_err(|e| Error::io(path, e))
}

/// Uniform `n`-subset without replacement, in sampled order.
pub fn subsample(dataset: &Dataset, n: usize, seed: u64) -> Result<Dataset> {
    if n > dataset.len() {
        return Err(Error::arg(format!("subset of {n} from a dataset of {}", dataset.len())));
    }
    let idx = rand::seq::index::sample(&mut RngHandle::new(seed, 0x7375_6273).rng(), dataset.len(), n);
    Ok(Dataset {
        inputs: idx.iter().map(|i| dataset.inputs[i].clone()).collect(),
        labels: idx.iter().map(|i| dataset.labels[i]).collect(),
        num_classes: dataset.num_classes,
        input_shape: dataset.input_shape.clone(),
    })
}

// Seven-segment masks (bits a..g = top, top-right, bottom-right, bottom,
// bottom-left, top-left, middle) for digits 0-9.
const SEGMENTS: [u8; 10] = [
    0b0111111, 0b0000110, 0b1011011, 0b1001111, 0b1100110, 0b1101101, 0b1111101, 0b0000111, 0b1111111, 0b1101111,
];

/// Noise-free glyph for `class` on a `size`×`size` grid. Classes 0-9 are
/// seven-segment digits; higher classes get a fixed pseudo-random stroke
/// pattern.
pub fn digit_template(class: usize, size: usize) -> Vec<f64> {
    let mask = match SEGMENTS.get(class) {
        Some(&m) => m,
        None => {
            // any non-empty segment set plus a class-specific pixel pattern
            let mut rng = RngHandle::new(class as u64, 0x676c_7970).rng();
            let mut img = template_from_mask(rand::Rng::random_range(&mut rng, 1..128u8), size);
            for _ in 0..size {
                let i = rand::Rng::random_range(&mut rng, 0..size * size);
                img[i] = 1.0 - img[i];
            }
            return img;
        }
    };
    template_from_mask(mask, size)
}

fn template_from_mask(mask: u8, size: usize) -> Vec<f64> {
    let mut img = vec![0.0; size * size];
    let (left, right, top, mid, bottom) = (1, size - 2, 1, size / 2, size - 2);
    let hline = |img: &mut Vec<f64>, row: usize| {
        for c in left..=right {
            img[row * size + c] = 1.0;
        }
    };
    if mask & 1 != 0 {
        hline(&mut img, top);
    }
    if mask & (1 << 3) != 0 {
        hline(&mut img, bottom);
    }
    if mask & (1 << 6) != 0 {
        hline(&mut img, mid);
    }
    let vline = |img: &mut Vec<f64>, col: usize, from: usize, to: usize| {
        for r in from..=to {
            img[r * size + col] = 1.0;
        }
    };
    if mask & (1 << 1) != 0 {
        vline(&mut img, right, top, mid);
    }
    if mask & (1 << 2) != 0 {
        vline(&mut img, right, mid, bottom);
    }
    if mask & (1 << 4) != 0 {
        vline(&mut img, left, mid, bottom);
    }
    if mask & (1 << 5) != 0 {
        vline(&mut img, left, top, mid);
    }
    img
}

/// Glyph images with additive Gaussian pixel noise of standard deviation
/// `noise` (clamped to `[0, 1]`). Labels are balanced and shuffled.
pub fn synthetic_digits(n: usize, image_size: usize, num_classes: usize, noise: f64, seed: u64) -> Result<Dataset> {
    if num_classes == 0 || n < num_classes {
        return Err(Error::arg(format!("need n >= num_classes >= 1, got n={n}, classes={num_classes}")));
    }
    if image_size < 5 {
        return Err(Error::arg("image_size must be at least 5"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::arg("noise must be a finite non-negative number"));
    }
    let templates: Vec<Vec<f64>> = (0..num_classes).map(|c| digit_template(c, image_size)).collect();
    let mut rng = RngHandle::new(seed, 0x6469_6769).rng();
    let mut labels: Vec<usize> = (0..n).map(|i| i % num_classes).collect();
    labels.shuffle(&mut rng);
    let normal = Normal::new(0.0, noise.max(f64::MIN_POSITIVE)).expect("valid std");
    let inputs = labels
        .iter()
        .map(|&l| {
            let mut img = templates[l].clone();
            if noise > 0.0 {
                for p in &mut img {
                    *p = (*p + normal.sample(&mut rng)).clamp(0.0, 1.0);
                }
            }
            img
        })
        .collect();
    Dataset::new(inputs, labels, num_classes, vec![1, image_size, image_size])
}
