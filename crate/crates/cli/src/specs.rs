//! Inline scheme and family notation.
//!
//! Schemes: `sliding:L`, `fixed:A,L`, `growing:A,L`, `chunked:C:<scheme>`,
//! members joined with `+` for a union, or a JSON object such as
//! `{"type":"fixed","a":150,"l":100}`.
//!
//! Families: `periodic:L,DUTY`, `rand-const:A`, `rand-periodic:A,L`.

use anyhow::{anyhow, bail, Context, Result};
use drift_gauntlet::adversary::{gen_periodic, gen_rand_const, gen_rand_periodic, AdversarialProfile};
use drift_gauntlet::rng::rng_from_seed;
use drift_gauntlet::windowing::{union_scheme, WindowScheme};
use drift_gauntlet::Scalar;

fn numbers(text: &str, expected: usize, what: &str) -> Result<Vec<usize>> {
    let values: Vec<usize> = text
        .split(',')
        .map(|x| x.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("{what} expects {expected} comma-separated integers, got {text:?}"))?;
    if values.len() != expected {
        bail!("{what} expects {expected} comma-separated integers, got {text:?}");
    }
    Ok(values)
}

fn parse_member(text: &str) -> Result<WindowScheme> {
    let (kind, rest) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("scheme {text:?} lacks parameters (e.g. sliding:100)"))?;
    let scheme = match kind.trim() {
        "sliding" => WindowScheme::sliding(numbers(rest, 1, "sliding")?[0]),
        "fixed" => {
            let v = numbers(rest, 2, "fixed")?;
            WindowScheme::fixed(v[0], v[1])
        }
        "growing" | "grow" => {
            let v = numbers(rest, 2, "growing")?;
            WindowScheme::growing(v[0], v[1])
        }
        "chunked" => {
            let (c, inner) = rest
                .split_once(':')
                .ok_or_else(|| anyhow!("chunked expects chunked:C:<scheme>, got {text:?}"))?;
            let c = numbers(c, 1, "chunked")?[0];
            WindowScheme::chunked(parse_member(inner)?, c)
        }
        other => bail!("unknown scheme kind {other:?}"),
    };
    Ok(scheme)
}

/// Parse a scheme and apply `stride` to every base scheme in it.
pub fn parse_scheme(text: &str, stride: Option<usize>) -> Result<WindowScheme> {
    let text = text.trim();
    let scheme = if text.starts_with('{') {
        WindowScheme::from_json(text)?
    } else {
        let members: Vec<WindowScheme> = text.split('+').map(parse_member).collect::<Result<_>>()?;
        if members.len() == 1 {
            members.into_iter().next().unwrap()
        } else {
            union_scheme(&members)?
        }
    };
    let scheme = match stride {
        Some(s) => restride(scheme, s),
        None => scheme,
    };
    scheme.validate()?;
    Ok(scheme)
}

fn restride(scheme: WindowScheme, stride: usize) -> WindowScheme {
    match scheme {
        WindowScheme::Chunked { inner, c } => WindowScheme::chunked(restride(*inner, stride), c),
        WindowScheme::Union { members } => WindowScheme::Union {
            members: members.into_iter().map(|m| restride(m, stride)).collect(),
        },
        base => base.with_stride(stride),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Periodic { l: usize, duty: usize },
    RandConst { a: usize },
    RandPeriodic { a: usize, l: usize },
}

impl Family {
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| anyhow!("family {text:?} lacks parameters (e.g. periodic:100,50)"))?;
        Ok(match kind.trim() {
            "periodic" => {
                let v = numbers(rest, 2, "periodic")?;
                Family::Periodic { l: v[0], duty: v[1] }
            }
            "rand-const" => Family::RandConst {
                a: numbers(rest, 1, "rand-const")?[0],
            },
            "rand-periodic" => {
                let v = numbers(rest, 2, "rand-periodic")?;
                Family::RandPeriodic { a: v[0], l: v[1] }
            }
            other => bail!("unknown family {other:?}"),
        })
    }

    pub fn generate<S: Scalar>(&self, n: usize, seed: u64) -> drift_gauntlet::Result<AdversarialProfile<S>> {
        let mut rng = rng_from_seed(seed);
        match *self {
            Family::Periodic { l, duty } => gen_periodic(l, duty, n),
            Family::RandConst { a } => gen_rand_const(a, n, &mut rng),
            Family::RandPeriodic { a, l } => gen_rand_periodic(a, l, n, &mut rng),
        }
    }

    /// The scheme the family is built to hide from, used for certificates
    /// when no scheme is given.
    pub fn natural_scheme(&self) -> WindowScheme {
        match *self {
            Family::Periodic { l, .. } => WindowScheme::sliding(l),
            Family::RandConst { a } => WindowScheme::growing(a, a),
            Family::RandPeriodic { a, l } => WindowScheme::fixed(a, l),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_schemes() {
        assert_eq!(parse_scheme("sliding:100", None).unwrap(), WindowScheme::sliding(100));
        assert_eq!(
            parse_scheme("fixed:150,100", None).unwrap(),
            WindowScheme::fixed(150, 100)
        );
        assert_eq!(
            parse_scheme("growing:1, 2", Some(3)).unwrap(),
            WindowScheme::growing(1, 2).with_stride(3)
        );
        assert_eq!(
            parse_scheme("chunked:5:sliding:2", None).unwrap(),
            WindowScheme::chunked(WindowScheme::sliding(2), 5)
        );
        assert_eq!(
            parse_scheme("sliding:2+growing:1,1", Some(2)).unwrap(),
            union_scheme(&[
                WindowScheme::sliding(2).with_stride(2),
                WindowScheme::growing(1, 1).with_stride(2)
            ])
            .unwrap()
        );
        assert_eq!(
            parse_scheme(r#"{"type":"fixed","a":3,"l":2}"#, None).unwrap(),
            WindowScheme::fixed(3, 2)
        );
    }

    #[test]
    fn malformed_schemes() {
        for bad in [
            "sliding",
            "sliding:0",
            "fixed:1",
            "hopping:3",
            "fixed:a,b",
            "{\"type\":\"x\"}",
            "chunked:2",
        ] {
            assert!(parse_scheme(bad, None).is_err(), "{bad}");
        }
    }

    #[test]
    fn families() {
        assert_eq!(
            Family::parse("periodic:100,50").unwrap(),
            Family::Periodic { l: 100, duty: 50 }
        );
        assert_eq!(Family::parse("rand-const:100").unwrap(), Family::RandConst { a: 100 });
        assert_eq!(
            Family::parse("rand-periodic:150,100").unwrap(),
            Family::RandPeriodic { a: 150, l: 100 }
        );
        assert!(Family::parse("periodic:100").is_err());
        assert!(Family::parse("sine:3").is_err());
    }
}
