use std::fmt::Write as _;

use super::seed::SeedSpec;
use crate::convex_sets::ConvexBody;
use crate::{Error, Result};

/// A finite draw `V_1, ..., V_n` of convex bodies, in draw order.
#[derive(Clone, Debug, PartialEq)]
pub struct SetSample {
    bodies: Vec<ConvexBody>,
    seed: SeedSpec,
    family_tag: String,
    expectations: Option<Vec<ConvexBody>>,
}

impl SetSample {
    pub fn new(bodies: Vec<ConvexBody>, seed: SeedSpec, family_tag: impl Into<String>) -> Result<Self> {
        if let Some(first) = bodies.first() {
            let d = first.dim();
            if let Some(b) = bodies.iter().find(|b| b.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: b.dim(),
                });
            }
        }
        Ok(Self {
            bodies,
            seed,
            family_tag: family_tag.into(),
            expectations: None,
        })
    }

    /// Attaches the analytic Aumann expectations `E[V_k]`, one per body.
    pub fn with_expectations(mut self, expectations: Vec<ConvexBody>) -> Result<Self> {
        if expectations.len() != self.bodies.len() {
            return Err(Error::InvalidFamily(format!(
                "{} expectations for {} bodies",
                expectations.len(),
                self.bodies.len()
            )));
        }
        if let Some(d) = self.dim() {
            if let Some(e) = expectations.iter().find(|e| e.dim() != d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: e.dim(),
                });
            }
        }
        self.expectations = Some(expectations);
        Ok(self)
    }

    pub fn bodies(&self) -> &[ConvexBody] {
        &self.bodies
    }

    pub fn len(&self) -> usize {
        self.bodies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bodies.is_empty()
    }

    /// Common dimension of the bodies; `None` for an empty sample.
    pub fn dim(&self) -> Option<usize> {
        self.bodies.first().map(ConvexBody::dim)
    }

    pub fn seed(&self) -> SeedSpec {
        self.seed
    }

    pub fn family_tag(&self) -> &str {
        &self.family_tag
    }

    pub fn expectations(&self) -> Option<&[ConvexBody]> {
        self.expectations.as_deref()
    }

    /// Header line with the seed metadata followed by one body per line.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# setsample master_seed={} stream_index={} count={} family={}\n",
            self.seed.master_seed,
            self.seed.stream_index,
            self.bodies.len(),
            self.family_tag
        );
        for b in &self.bodies {
            writeln!(out, "{b}").expect("writing to a String");
        }
        out
    }

    /// Inverse of [`SetSample::to_text`]. Expectations are not part of the
    /// text form.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|h| h.strip_prefix("# setsample "))
            .ok_or_else(|| Error::Parse("missing '# setsample' header".into()))?;
        let (fields, family) = header
            .split_once(" family=")
            .ok_or_else(|| Error::Parse("header lacks family=".into()))?;
        let mut master = None;
        let mut stream = None;
        let mut count = None;
        for field in fields.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed header field {field:?}")))?;
            let v: u64 = v
                .parse()
                .map_err(|_| Error::Parse(format!("header field {k} is not an integer")))?;
            match k {
                "master_seed" => master = Some(v),
                "stream_index" => stream = Some(v),
                "count" => count = Some(v as usize),
                _ => return Err(Error::Parse(format!("unknown header field {k:?}"))),
            }
        }
        let (Some(master), Some(stream), Some(count)) = (master, stream, count) else {
            return Err(Error::Parse("header needs master_seed, stream_index and count".into()));
        };
        let bodies = lines
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<ConvexBody>>>()?;
        if bodies.len() != count {
            return Err(Error::Parse(format!(
                "header announces {count} bodies, found {}",
                bodies.len()
            )));
        }
        Self::new(bodies, SeedSpec::with_stream(master, stream), family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let bodies = vec![
            ConvexBody::interval(0.0, 0.1).unwrap(),
            ConvexBody::interval(0.0, 1.0 / 3.0).unwrap(),
        ];
        let s = SetSample::new(bodies, SeedSpec::with_stream(9, 12345), "test family(a=1)").unwrap();
        let text = s.to_text();
        assert!(text.starts_with("# setsample master_seed=9 stream_index=12345 count=2"));
        assert_eq!(SetSample::from_text(&text).unwrap(), s);
    }

    #[test]
    fn rejects_mixed_dimensions_and_bad_text() {
        let mixed = vec![ConvexBody::interval(0.0, 1.0).unwrap(), ConvexBody::origin(2).unwrap()];
        assert!(SetSample::new(mixed, SeedSpec::new(0), "x").is_err());
        assert!(SetSample::from_text("interval 0 1\n").is_err());
        assert!(
            SetSample::from_text("# setsample master_seed=1 stream_index=0 count=2 family=x\ninterval 0 1\n").is_err()
        );
    }
}
