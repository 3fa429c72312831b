//! Line-oriented text form of [`ConvexBody`]:
//!
//! ```text
//! interval lo hi
//! box d lo_1 .. lo_d hi_1 .. hi_d
//! polytope d k v_11 .. v_1d .. v_k1 .. v_kd
//! ellipsoid d c_1 .. c_d a_1 .. a_d
//! embedded d m u_11 .. u_md s_1 .. s_m
//! ```
//!
//! Numbers are written in Rust's shortest round-trip form, so
//! `parse(display(body)) == body` bit for bit.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::body::ConvexBody;
use super::direction::{Direction, DirectionGrid};
use crate::{Error, Result};

fn write_all(f: &mut fmt::Formatter<'_>, values: impl IntoIterator<Item = f64>) -> fmt::Result {
    for x in values {
        write!(f, " {x}")?;
    }
    Ok(())
}

impl fmt::Display for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConvexBody::Interval(iv) => write!(f, "interval {} {}", iv.lo(), iv.hi()),
            ConvexBody::Box(b) => {
                write!(f, "box {}", b.lo().len())?;
                write_all(f, b.lo().iter().chain(b.hi()).copied())
            }
            ConvexBody::Polytope(p) => {
                write!(f, "polytope {} {}", p.dim(), p.vertex_count())?;
                write_all(f, p.vertices().flatten().copied())
            }
            ConvexBody::Ellipsoid(e) => {
                write!(f, "ellipsoid {}", e.center().len())?;
                write_all(f, e.center().iter().chain(e.semi_axes()).copied())
            }
            ConvexBody::Embedded(e) => {
                write!(f, "embedded {} {}", e.grid().dim(), e.grid().len())?;
                write_all(f, e.grid().iter().flatten().copied())?;
                write_all(f, e.values().iter().copied())
            }
        }
    }
}

struct Tokens<'a> {
    inner: std::str::SplitWhitespace<'a>,
}

impl<'a> Tokens<'a> {
    fn word(&mut self, what: &str) -> Result<&'a str> {
        self.inner.next().ok_or_else(|| Error::Parse(format!("missing {what}")))
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let w = self.word(what)?;
        w.parse()
            .map_err(|_| Error::Parse(format!("{what} must be a non-negative integer, got {w:?}")))
    }

    fn reals(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        (0..n)
            .map(|_| {
                let w = self.word(what)?;
                w.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{what}: {w:?} is not a number")))
            })
            .collect()
    }

    fn finish(mut self) -> Result<()> {
        match self.inner.next() {
            None => Ok(()),
            Some(extra) => Err(Error::Parse(format!("unexpected trailing token {extra:?}"))),
        }
    }
}

impl FromStr for ConvexBody {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut t = Tokens {
            inner: s.split_whitespace(),
        };
        let body = match t.word("body kind")? {
            "interval" => {
                let v = t.reals(2, "interval endpoints")?;
                ConvexBody::interval(v[0], v[1])?
            }
            "box" => {
                let d = t.count("dimension")?;
                let lo = t.reals(d, "box lower corner")?;
                let hi = t.reals(d, "box upper corner")?;
                ConvexBody::axis_box(lo, hi)?
            }
            "polytope" => {
                let d = t.count("dimension")?;
                let k = t.count("vertex count")?;
                if d == 0 || k == 0 {
                    return Err(Error::Parse("polytope needs d >= 1 and k >= 1".into()));
                }
                let flat = t.reals(d * k, "polytope vertices")?;
                ConvexBody::polytope(flat.chunks_exact(d).map(<[f64]>::to_vec).collect())?
            }
            "ellipsoid" => {
                let d = t.count("dimension")?;
                let c = t.reals(d, "ellipsoid center")?;
                let a = t.reals(d, "ellipsoid semi-axes")?;
                ConvexBody::ellipsoid(c, a)?
            }
            "embedded" => {
                let d = t.count("dimension")?;
                let m = t.count("direction count")?;
                if d == 0 {
                    return Err(Error::Parse("embedded body needs d >= 1".into()));
                }
                let dirs = t
                    .reals(d * m, "grid directions")?
                    .chunks_exact(d)
                    .map(|u| Direction::new(u.to_vec()))
                    .collect::<Result<Vec<_>>>()?;
                let values = t.reals(m, "support values")?;
                let grid = DirectionGrid::from_directions(d, &dirs, format!("parsed(dim={d},count={m})"))?;
                ConvexBody::embedded(Arc::new(grid), values)?
            }
            other => return Err(Error::Parse(format!("unknown body kind {other:?}"))),
        };
        t.finish()?;
        Ok(body)
    }
}
