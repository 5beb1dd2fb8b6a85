//! Multi-indices, direction sets, shift operators and the finite domain.
//!
//! A site is addressed by a multi-index `k = (k0, k1, k2, k3)` with `k0` the
//! time index. Interior sites satisfy `1 <= k_i <= N_i`. In `ZeroPadded` mode
//! storage carries one ghost site on each side of every axis so shifted reads
//! never branch; in `Periodic` mode index arithmetic wraps modulo the extents.

use std::fmt;

use crate::error::{Error, Result};

/// Number of lattice axes.
pub const AXES: usize = 4;

/// Lattice site address; `k0` is the time index. Negative components are
/// legal (shifts may leave the domain).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(pub [i64; AXES]);

impl MultiIndex {
    pub fn new(k0: i64, k1: i64, k2: i64, k3: i64) -> Self {
        MultiIndex([k0, k1, k2, k3])
    }

    /// Component along `axis`.
    pub fn get(&self, axis: usize) -> i64 {
        self.0[axis]
    }

    /// Copy with `axis` moved by `by` (`+1` is the forward shift τ, `-1` the
    /// backward shift σ).
    pub fn shifted(&self, axis: usize, by: i64) -> Self {
        let mut k = self.0;
        k[axis] += by;
        MultiIndex(k)
    }

    /// Copy with every axis of `dirs` moved by `by` (the τ_J / σ_J shifts).
    pub fn shifted_by_set(&self, dirs: DirectionSet, by: i64) -> Self {
        let mut k = self.0;
        for axis in dirs.iter() {
            k[axis] += by;
        }
        MultiIndex(k)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{},{})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// Sorted subset of `{0,1,2,3}`; labels a basis cochain class. The number of
/// axes in the set is the degree of the class it labels.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DirectionSet(u8);

/// All direction sets of each size, in lexicographic order of the sorted
/// axis lists. This is the canonical enumeration order used everywhere
/// (component planes, matrix columns, file output).
static SETS_BY_DEGREE: [&[DirectionSet]; 5] = [
    &[DirectionSet(0b0000)],
    &[
        DirectionSet(0b0001),
        DirectionSet(0b0010),
        DirectionSet(0b0100),
        DirectionSet(0b1000),
    ],
    &[
        DirectionSet(0b0011),
        DirectionSet(0b0101),
        DirectionSet(0b1001),
        DirectionSet(0b0110),
        DirectionSet(0b1010),
        DirectionSet(0b1100),
    ],
    &[
        DirectionSet(0b0111),
        DirectionSet(0b1011),
        DirectionSet(0b1101),
        DirectionSet(0b1110),
    ],
    &[DirectionSet(0b1111)],
];

impl DirectionSet {
    pub const EMPTY: DirectionSet = DirectionSet(0);
    pub const FULL: DirectionSet = DirectionSet(0b1111);

    /// Build from a strictly increasing list of axes.
    pub fn from_dirs(dirs: &[usize]) -> Result<Self> {
        let mut bits = 0u8;
        let mut last: Option<usize> = None;
        for &d in dirs {
            if d >= AXES {
                return Err(Error::InvalidDirections(format!("axis {d} out of range")));
            }
            if let Some(prev) = last {
                if d <= prev {
                    return Err(Error::InvalidDirections(format!(
                        "axes must be strictly increasing, got {dirs:?}"
                    )));
                }
            }
            bits |= 1 << d;
            last = Some(d);
        }
        Ok(DirectionSet(bits))
    }

    /// All sets with `degree` axes, lexicographically ordered.
    pub fn by_degree(degree: usize) -> &'static [DirectionSet] {
        SETS_BY_DEGREE[degree]
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.0 & (1 << axis) != 0
    }

    /// Whether the set contains the time axis; decides the metric sign of
    /// the class and its role in the marching solver.
    pub fn is_timelike(&self) -> bool {
        self.contains(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..AXES).filter(move |&a| self.contains(a))
    }

    pub fn complement(&self) -> Self {
        DirectionSet(!self.0 & 0b1111)
    }

    pub fn with(&self, axis: usize) -> Self {
        DirectionSet(self.0 | (1 << axis))
    }

    pub fn without(&self, axis: usize) -> Self {
        DirectionSet(self.0 & !(1 << axis))
    }

    /// Number of axes in the set smaller than `axis`.
    pub fn pos(&self, axis: usize) -> usize {
        (self.0 & ((1u8 << axis) - 1)).count_ones() as usize
    }

    /// Position of this set inside [`DirectionSet::by_degree`] of its size.
    pub fn lex_rank(&self) -> usize {
        SETS_BY_DEGREE[self.len()]
            .iter()
            .position(|s| s == self)
            .expect("every 4-bit mask is listed")
    }

    pub fn dirs_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "{{}}");
        }
        write!(f, "{{")?;
        for (n, a) in self.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// How index arithmetic treats the edge of the box.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BoundaryMode {
    /// Coefficients vanish outside the interior; storage keeps one ghost
    /// layer per side so shifted reads stay in bounds.
    ZeroPadded,
    /// Index arithmetic wraps modulo the extents (torus).
    Periodic,
}

/// The finite domain: extents per axis plus the boundary convention.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Domain {
    extents: [usize; AXES],
    mode: BoundaryMode,
}

impl Domain {
    pub fn new(extents: [usize; AXES], mode: BoundaryMode) -> Result<Self> {
        if extents.iter().any(|&n| n == 0) {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain { extents, mode })
    }

    pub fn extents(&self) -> [usize; AXES] {
        self.extents
    }

    pub fn extent(&self, axis: usize) -> usize {
        self.extents[axis]
    }

    pub fn mode(&self) -> BoundaryMode {
        self.mode
    }

    pub fn interior_site_count(&self) -> usize {
        self.extents.iter().product()
    }

    /// Sites stored per component plane (padded box or the full torus).
    pub fn storage_site_count(&self) -> usize {
        match self.mode {
            BoundaryMode::ZeroPadded => self.extents.iter().map(|n| n + 2).product(),
            BoundaryMode::Periodic => self.interior_site_count(),
        }
    }

    /// The shift operators: forward adds one, backward subtracts one along
    /// `axis`. Periodic mode wraps back into `1..=N_i`; zero-padded mode
    /// returns the raw shifted index, which may leave the interior.
    pub fn shift(&self, k: MultiIndex, axis: usize, forward: bool) -> MultiIndex {
        let moved = k.shifted(axis, if forward { 1 } else { -1 });
        match self.mode {
            BoundaryMode::ZeroPadded => moved,
            BoundaryMode::Periodic => {
                let mut c = moved.0;
                let n = self.extents[axis] as i64;
                c[axis] = (c[axis] - 1).rem_euclid(n) + 1;
                MultiIndex(c)
            }
        }
    }

    pub fn is_interior(&self, k: MultiIndex) -> bool {
        (0..AXES).all(|a| {
            let c = k.get(a);
            c >= 1 && c <= self.extents[a] as i64
        })
    }

    /// Wrap a site into the canonical range `1..=N_i` (Periodic) or return it
    /// unchanged (ZeroPadded).
    pub fn canonical(&self, k: MultiIndex) -> MultiIndex {
        match self.mode {
            BoundaryMode::ZeroPadded => k,
            BoundaryMode::Periodic => {
                let mut c = k.0;
                for a in 0..AXES {
                    let n = self.extents[a] as i64;
                    c[a] = (c[a] - 1).rem_euclid(n) + 1;
                }
                MultiIndex(c)
            }
        }
    }

    /// Storage slot of a site, or `None` when the site falls outside the
    /// padded box (zero-padded mode only; periodic sites always resolve).
    pub fn storage_index(&self, k: MultiIndex) -> Option<usize> {
        let mut idx = 0usize;
        match self.mode {
            BoundaryMode::ZeroPadded => {
                for a in 0..AXES {
                    let c = k.get(a);
                    if c < 0 || c > self.extents[a] as i64 + 1 {
                        return None;
                    }
                    idx = idx * (self.extents[a] + 2) + c as usize;
                }
            }
            BoundaryMode::Periodic => {
                for a in 0..AXES {
                    let n = self.extents[a] as i64;
                    let c = (k.get(a) - 1).rem_euclid(n);
                    idx = idx * self.extents[a] + c as usize;
                }
            }
        }
        Some(idx)
    }

    /// Interior sites in row-major order: `k3` varies fastest, `k0` slowest,
    /// so a time slice is a contiguous block.
    pub fn interior_sites(&self) -> impl Iterator<Item = MultiIndex> + '_ {
        let [n0, n1, n2, n3] = self.extents;
        (1..=n0 as i64).flat_map(move |k0| {
            (1..=n1 as i64).flat_map(move |k1| {
                (1..=n2 as i64)
                    .flat_map(move |k2| (1..=n3 as i64).map(move |k3| MultiIndex([k0, k1, k2, k3])))
            })
        })
    }

    /// Every stored site (ghost layers included in zero-padded mode), same
    /// ordering convention as [`Domain::interior_sites`].
    pub fn storage_sites(&self) -> Vec<MultiIndex> {
        match self.mode {
            BoundaryMode::Periodic => self.interior_sites().collect(),
            BoundaryMode::ZeroPadded => {
                let [n0, n1, n2, n3] = self.extents;
                let mut out = Vec::with_capacity(self.storage_site_count());
                for k0 in 0..=n0 as i64 + 1 {
                    for k1 in 0..=n1 as i64 + 1 {
                        for k2 in 0..=n2 as i64 + 1 {
                            for k3 in 0..=n3 as i64 + 1 {
                                out.push(MultiIndex([k0, k1, k2, k3]));
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Interior sites of one time slice, spatial axes row-major.
    pub fn slice_sites(&self, k0: i64) -> impl Iterator<Item = MultiIndex> + '_ {
        let [_, n1, n2, n3] = self.extents;
        (1..=n1 as i64).flat_map(move |k1| {
            (1..=n2 as i64)
                .flat_map(move |k2| (1..=n3 as i64).map(move |k3| MultiIndex([k0, k1, k2, k3])))
        })
    }
}
