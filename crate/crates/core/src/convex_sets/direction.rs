use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Error, Result};

/// Relative tolerance on the Euclidean norm of a [`Direction`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// Two grid directions closer than this (in Euclidean distance, which matches
/// angular distance at this scale) are treated as the same direction.
pub const DIRECTION_MATCH_TOL: f64 = 1e-9;

/// A unit vector of the dual space, i.e. a point of the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct Direction(Vec<f64>);

impl Direction {
    /// Wraps `components`, which must already have unit Euclidean norm.
    pub fn new(components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDirection("zero-dimensional direction".into()));
        }
        if components.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDirection("non-finite component".into()));
        }
        let norm = euclidean_norm(&components);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::InvalidDirection(format!(
                "norm {norm} is not 1 within {UNIT_NORM_TOL}"
            )));
        }
        Ok(Self(components))
    }

    /// Rescales a nonzero finite vector onto the unit sphere.
    pub fn normalized(mut components: Vec<f64>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidDirection("zero-dimensional direction".into()));
        }
        let norm = euclidean_norm(&components);
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidDirection(format!(
                "cannot normalize a vector of norm {norm}"
            )));
        }
        components.iter_mut().for_each(|x| *x /= norm);
        Ok(Self(components))
    }

    /// The positive unit direction of the real line.
    pub fn plus() -> Self {
        Self(vec![1.0])
    }

    /// The negative unit direction of the real line.
    pub fn minus() -> Self {
        Self(vec![-1.0])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }

    pub fn antipode(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }
}

pub(crate) fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Content fingerprint of a [`DirectionGrid`]; support vectors carry it to
/// refer back to the grid they were evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridId(pub u64);

impl fmt::Display for GridId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Discretization scheme for [`make_direction_grid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridScheme {
    /// `{+1, -1}`; the whole unit sphere of the real line.
    Exact1d,
    /// Equally spaced angles on the circle.
    UniformAngles2d,
    /// Fibonacci lattice on the upper hemisphere plus antipodes.
    Fibonacci3d,
    /// Gaussian directions in any dimension `>= 2` plus antipodes.
    SeededRandom { seed: u64 },
}

impl GridScheme {
    pub fn name(&self) -> &'static str {
        match self {
            GridScheme::Exact1d => "exact1d",
            GridScheme::UniformAngles2d => "uniform_angles_2d",
            GridScheme::Fibonacci3d => "fibonacci_3d",
            GridScheme::SeededRandom { .. } => "seeded_random",
        }
    }
}

/// A finite, duplicate-free set of unit directions.
///
/// Directions are stored contiguously (`dim` components each). When the grid
/// is closed under `u -> -u` the index of every antipode is precomputed.
#[derive(Clone, Debug)]
pub struct DirectionGrid {
    dim: usize,
    data: Vec<f64>,
    antipodes: Option<Vec<usize>>,
    id: GridId,
    description: String,
}

impl PartialEq for DirectionGrid {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.data == other.data
    }
}

impl DirectionGrid {
    /// Builds a grid from explicit directions, validating all invariants.
    pub fn from_directions(dim: usize, directions: &[Direction], description: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if directions.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let mut data = Vec::with_capacity(dim * directions.len());
        for u in directions {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: u.dim(),
                });
            }
            data.extend_from_slice(u.components());
        }
        Self::from_flat(dim, data, description.into())
    }

    fn from_flat(dim: usize, data: Vec<f64>, description: String) -> Result<Self> {
        let m = data.len() / dim;
        let at = |i: usize| &data[i * dim..(i + 1) * dim];

        if dim == 1 {
            let mut values: Vec<f64> = data.clone();
            values.sort_by(f64::total_cmp);
            if values != [-1.0, 1.0] {
                return Err(Error::InvalidGrid(
                    "a one-dimensional grid must be exactly {+1, -1}".into(),
                ));
            }
        }

        for i in 0..m {
            for j in (i + 1)..m {
                if distance(at(i), at(j)) <= DIRECTION_MATCH_TOL {
                    return Err(Error::InvalidGrid(format!("directions {i} and {j} coincide")));
                }
            }
        }

        let mut antipodes = Vec::with_capacity(m);
        for i in 0..m {
            let neg: Vec<f64> = at(i).iter().map(|x| -x).collect();
            match (0..m).find(|&j| distance(&neg, at(j)) <= DIRECTION_MATCH_TOL) {
                Some(j) => antipodes.push(j),
                None => break,
            }
        }
        let antipodes = (antipodes.len() == m).then_some(antipodes);

        let id = GridId(fingerprint(dim, &data));
        Ok(Self {
            dim,
            data,
            antipodes,
            id,
            description,
        })
    }

    /// The exact grid of the real line, `{+1, -1}`.
    pub fn exact_1d() -> Self {
        Self::from_flat(1, vec![1.0, -1.0], "exact1d".into()).expect("the two-point grid is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn id(&self) -> GridId {
        self.id
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn is_antipodal_closed(&self) -> bool {
        self.antipodes.is_some()
    }

    /// Index of `-u_i`, when the grid is antipodal-closed.
    pub fn antipode_index(&self, i: usize) -> Option<usize> {
        self.antipodes.as_ref().map(|a| a[i])
    }

    pub fn direction(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn directions(&self) -> Vec<Direction> {
        self.iter().map(|u| Direction(u.to_vec())).collect()
    }

    /// Index of the grid direction matching `u` within [`DIRECTION_MATCH_TOL`].
    pub fn index_of(&self, u: &[f64]) -> Option<usize> {
        if u.len() != self.dim {
            return None;
        }
        self.iter().position(|g| distance(g, u) <= DIRECTION_MATCH_TOL)
    }

    /// Hash index keyed on rounded coordinates. Lookups may miss directions
    /// that straddle a rounding boundary, so it is only used where a miss
    /// merely skips a check.
    pub(crate) fn rounded_index(&self) -> HashMap<Vec<i64>, usize> {
        self.iter().enumerate().map(|(i, u)| (round_key(u), i)).collect()
    }
}

pub(crate) fn round_key(u: &[f64]) -> Vec<i64> {
    u.iter().map(|x| (x * 1e9).round() as i64).collect()
}

// FNV-1a over the dimension and the raw bits of every component.
fn fingerprint(dim: usize, data: &[f64]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |word: u64| {
        for byte in word.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(PRIME);
        }
    };
    feed(dim as u64);
    for x in data {
        feed(x.to_bits());
    }
    h
}

/// Builds a deterministic antipodal-closed grid on the unit sphere of `R^dim`.
///
/// Apart from [`GridScheme::Exact1d`], every scheme generates `count / 2`
/// directions and appends their negations, so `count` must be even. The
/// antipode of direction `i` is direction `i + count / 2`.
pub fn make_direction_grid(dim: usize, count: usize, scheme: GridScheme) -> Result<DirectionGrid> {
    if dim == 0 {
        return Err(Error::InvalidGrid("dimension must be at least 1".into()));
    }
    if count < 2 {
        return Err(Error::InvalidGrid(format!(
            "grid needs at least 2 directions, got {count}"
        )));
    }
    let incompatible = || Error::InvalidGrid(format!("scheme {} is not available in dimension {dim}", scheme.name()));
    match (scheme, dim) {
        (GridScheme::Exact1d, 1) => return Ok(DirectionGrid::exact_1d()),
        (GridScheme::Exact1d, _) | (_, 1) => return Err(incompatible()),
        (GridScheme::UniformAngles2d, 2) | (GridScheme::Fibonacci3d, 3) => {}
        (GridScheme::SeededRandom { .. }, _) => {}
        _ => return Err(incompatible()),
    }
    if !count.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "antipodal-closed grids need an even direction count, got {count}"
        )));
    }

    let half = count / 2;
    let mut data = Vec::with_capacity(count * dim);
    match scheme {
        GridScheme::UniformAngles2d => {
            for k in 0..half {
                let (s, c) = (2.0 * PI * k as f64 / count as f64).sin_cos();
                data.extend_from_slice(&[c, s]);
            }
        }
        GridScheme::Fibonacci3d => {
            let golden_angle = PI * (3.0 - 5f64.sqrt());
            for i in 0..half {
                let z = 1.0 - (2 * i + 1) as f64 / count as f64;
                let r = (1.0 - z * z).sqrt();
                let (s, c) = (golden_angle * i as f64).sin_cos();
                data.extend_from_slice(&[r * c, r * s, z]);
            }
        }
        GridScheme::SeededRandom { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut g = vec![0.0; dim];
            for _ in 0..half {
                let norm = loop {
                    g.iter_mut().for_each(|x| *x = StandardNormal.sample(&mut rng));
                    let norm = euclidean_norm(&g);
                    if norm > 1e-12 {
                        break norm;
                    }
                };
                data.extend(g.iter().map(|x| x / norm));
            }
        }
        GridScheme::Exact1d => unreachable!(),
    }
    let negated: Vec<f64> = data.iter().map(|x| -x).collect();
    data.extend(negated);

    let description = match scheme {
        GridScheme::SeededRandom { seed } => {
            format!("seeded_random(dim={dim},count={count},seed={seed})")
        }
        _ => format!("{}(dim={dim},count={count})", scheme.name()),
    };
    DirectionGrid::from_flat(dim, data, description)
}

/// Grid used when an operation needs one and the caller supplied none.
pub fn default_grid(dim: usize) -> Result<DirectionGrid> {
    match dim {
        1 => Ok(DirectionGrid::exact_1d()),
        2 => make_direction_grid(2, 720, GridScheme::UniformAngles2d),
        3 => make_direction_grid(3, 2000, GridScheme::Fibonacci3d),
        _ => make_direction_grid(dim, 2048, GridScheme::SeededRandom { seed: 0 }),
    }
}
