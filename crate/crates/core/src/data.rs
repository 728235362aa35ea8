//! Synthetic sources and profile-driven mixture streams.
//!
//! Position `i` of a stream is drawn from `v_i P + (1 - v_i) Q`: a Bernoulli
//! draw with success probability `v_i` picks the component, then the point
//! is drawn from it. Streams keep the latent component so tests can check
//! the mixture directly.
//!
//! Streams are stored as JSON lines: a header object with the metadata, then
//! one `{"i","x","v","c"}` record per sample with floats written to 17
//! significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::adversary::{AdversarialProfile, Provenance};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

pub type Point = [f64; 2];

/// Axis-aligned box `[lo.0, hi.0] x [lo.1, hi.1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformBox {
    pub lo: Point,
    pub hi: Point,
}

impl UniformBox {
    pub fn area(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1])
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        [
            self.lo[0] + (self.hi[0] - self.lo[0]) * rng.gen::<f64>(),
            self.lo[1] + (self.hi[1] - self.lo[1]) * rng.gen::<f64>(),
        ]
    }
}

/// Pair of 2-D distributions `P` and `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSource {
    /// `P` uniform on the unit square, `Q` the same square shifted along the
    /// first axis by `intensity / 10`.
    TwoSquares { intensity: f64 },
    /// `P = N(0, I)`, `Q = N(offset, I)`.
    GaussianShift { offset: Point },
    /// Uniform on a union of disjoint boxes each (weighted by area).
    Custom { p: Vec<UniformBox>, q: Vec<UniformBox> },
}

/// Mixture component a sample was drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    P,
    Q,
}

impl Component {
    pub fn flipped(self) -> Self {
        match self {
            Component::P => Component::Q,
            Component::Q => Component::P,
        }
    }
}

/// Two-squares source with the documented shift `intensity / 10`.
pub fn two_squares(intensity: f64) -> Result<SampleSource> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(Error::invalid(format!(
            "two-squares intensity must be non-negative, got {intensity}"
        )));
    }
    Ok(SampleSource::TwoSquares { intensity })
}

fn sample_boxes<R: Rng + ?Sized>(boxes: &[UniformBox], rng: &mut R) -> Point {
    let total: f64 = boxes.iter().map(UniformBox::area).sum();
    let mut u = rng.gen::<f64>() * total;
    for b in boxes {
        if u < b.area() {
            return b.sample(rng);
        }
        u -= b.area();
    }
    boxes.last().expect("validated non-empty").sample(rng)
}

impl SampleSource {
    pub fn validate(&self) -> Result<()> {
        match self {
            SampleSource::TwoSquares { intensity } => two_squares(*intensity).map(|_| ()),
            SampleSource::GaussianShift { offset } => {
                if offset.iter().all(|x| x.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::invalid("Gaussian offset must be finite"))
                }
            }
            SampleSource::Custom { p, q } => {
                for boxes in [p, q] {
                    if boxes.is_empty()
                        || boxes
                            .iter()
                            .any(|b| b.area().partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater))
                    {
                        return Err(Error::invalid("custom sources need boxes of positive area"));
                    }
                }
                Ok(())
            }
        }
    }

    /// Shift between the squares of the two-squares source.
    pub fn shift(&self) -> Option<f64> {
        match self {
            SampleSource::TwoSquares { intensity } => Some(intensity / 10.0),
            _ => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, component: Component, rng: &mut R) -> Point {
        match (self, component) {
            (SampleSource::TwoSquares { .. }, Component::P) => [rng.gen(), rng.gen()],
            (SampleSource::TwoSquares { intensity }, Component::Q) => [intensity / 10.0 + rng.gen::<f64>(), rng.gen()],
            (SampleSource::GaussianShift { offset }, c) => {
                let z: Point = [rng.sample(StandardNormal), rng.sample(StandardNormal)];
                match c {
                    Component::P => z,
                    Component::Q => [z[0] + offset[0], z[1] + offset[1]],
                }
            }
            (SampleSource::Custom { p, .. }, Component::P) => sample_boxes(p, rng),
            (SampleSource::Custom { q, .. }, Component::Q) => sample_boxes(q, rng),
        }
    }

    /// The same source with the roles of `P` and `Q` exchanged, when that
    /// can be expressed.
    pub fn swapped(&self) -> Option<SampleSource> {
        match self {
            SampleSource::Custom { p, q } => Some(SampleSource::Custom {
                p: q.clone(),
                q: p.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSample {
    pub index: usize,
    pub x: Point,
    /// Mixture weight of `P` used for this sample.
    pub v: f64,
    pub component: Component,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamMeta {
    pub n: usize,
    pub seed: u64,
    pub source: SampleSource,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stream {
    pub meta: StreamMeta,
    pub samples: Vec<StreamSample>,
}

impl Stream {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.samples.iter().map(|s| s.x).collect()
    }

    pub fn components(&self) -> Vec<Component> {
        self.samples.iter().map(|s| s.component).collect()
    }
}

/// Draw one sample per profile position from `v_i P + (1 - v_i) Q`.
pub fn sample_stream<S: Scalar>(profile: &AdversarialProfile<S>, source: &SampleSource, seed: u64) -> Result<Stream> {
    source.validate()?;
    let mut rng = rng_from_seed(seed);
    let samples = profile
        .values()
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let v = v.to_f64();
            let component = if rng.gen::<f64>() < v {
                Component::P
            } else {
                Component::Q
            };
            StreamSample {
                index,
                x: source.sample(component, &mut rng),
                v,
                component,
            }
        })
        .collect();
    Ok(Stream {
        meta: StreamMeta {
            n: profile.n(),
            seed,
            source: source.clone(),
            provenance: profile.provenance().clone(),
        },
        samples,
    })
}

const STREAM_FORMAT: &str = "drift-gauntlet-stream";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Header {
    format: String,
    version: u32,
    #[serde(flatten)]
    meta: StreamMeta,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Record {
    i: usize,
    x: Point,
    v: f64,
    c: Component,
}

fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serialize a stream to its JSON-lines text.
pub fn stream_to_string(stream: &Stream) -> String {
    let header = Header {
        format: STREAM_FORMAT.into(),
        version: 1,
        meta: stream.meta.clone(),
    };
    let mut out = serde_json::to_string(&header).expect("headers always serialize");
    out.push('\n');
    for s in &stream.samples {
        let c = match s.component {
            Component::P => "P",
            Component::Q => "Q",
        };
        let _ = writeln!(
            out,
            r#"{{"i":{},"x":[{},{}],"v":{},"c":"{}"}}"#,
            s.index,
            fmt_float(s.x[0]),
            fmt_float(s.x[1]),
            fmt_float(s.v),
            c
        );
    }
    out
}

pub fn write_stream(path: impl AsRef<Path>, stream: &Stream) -> Result<()> {
    fs::write(path, stream_to_string(stream))?;
    Ok(())
}

/// Parse stream text; errors carry the 1-based line number.
pub fn stream_from_reader<R: BufRead>(reader: R) -> Result<Stream> {
    let mut lines = reader.lines();
    let parse_err = |line: usize, message: String| Error::Parse { line, message };

    let header_line = lines.next().ok_or_else(|| parse_err(1, "missing header".into()))??;
    let header: Header = serde_json::from_str(&header_line).map_err(|e| parse_err(1, format!("bad header: {e}")))?;
    if header.format != STREAM_FORMAT {
        return Err(parse_err(1, format!("unknown format {:?}", header.format)));
    }
    let n = header.meta.n;

    let mut samples = Vec::with_capacity(n);
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let r: Record = serde_json::from_str(&line).map_err(|e| parse_err(lineno, e.to_string()))?;
        if r.i != samples.len() {
            return Err(parse_err(
                lineno,
                format!("expected index {}, found {}", samples.len(), r.i),
            ));
        }
        if !(0.0..=1.0).contains(&r.v) {
            return Err(parse_err(lineno, format!("mixture weight {} outside [0, 1]", r.v)));
        }
        samples.push(StreamSample {
            index: r.i,
            x: r.x,
            v: r.v,
            component: r.c,
        });
    }
    if samples.len() != n {
        return Err(parse_err(
            samples.len() + 2,
            format!("header announces {n} samples, found {}", samples.len()),
        ));
    }
    Ok(Stream {
        meta: header.meta,
        samples,
    })
}

pub fn read_stream(path: impl AsRef<Path>) -> Result<Stream> {
    stream_from_reader(BufReader::new(fs::File::open(path)?))
}
