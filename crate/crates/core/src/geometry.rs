//! Points, canonical directions and complete line enumeration for the
//! affine spaces F_p^2 and F_p^3.
//!
//! A line is the point set {a + t*v : t in F_p} for some nonzero v. Each
//! geometric line has exactly one canonical `Line` value: the direction is
//! scaled so its first nonzero coordinate is 1, and the base point is the
//! unique point of the line whose coordinate at the direction's pivot is 0
//! (equivalently, the lexicographically smallest point of the line).

use crate::field::PrimeModulus;

/// Supported ambient dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dim {
    Two,
    Three,
}

impl Dim {
    #[inline]
    pub fn n(self) -> usize {
        match self {
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn from_u8(n: u8) -> Option<Dim> {
        match n {
            2 => Some(Dim::Two),
            3 => Some(Dim::Three),
            _ => None,
        }
    }

    /// p^n, the number of points of F_p^n.
    #[inline]
    pub fn space_size(self, p: u32) -> u64 {
        (p as u64).pow(self.n() as u32)
    }
}

/// A point of F_p^n. Coordinate order is (x, y, z); x is the layer index
/// when 3-dimensional sets are viewed as stacks of planes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    coords: [u32; 3],
    dim: Dim,
}

impl Point {
    /// Builds a point, validating the coordinate count and range.
    pub fn new(coords: &[u32], m: PrimeModulus) -> Point {
        let dim = Dim::from_u8(coords.len() as u8)
            .unwrap_or_else(|| panic!("unsupported dimension {}", coords.len()));
        assert!(
            coords.iter().all(|&c| c < m.p()),
            "coordinate out of range for p = {}",
            m.p()
        );
        let mut arr = [0u32; 3];
        arr[..coords.len()].copy_from_slice(coords);
        Point { coords: arr, dim }
    }

    pub(crate) fn from_array(coords: [u32; 3], dim: Dim) -> Point {
        Point { coords, dim }
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords[..self.dim.n()]
    }

    /// Dense index of the point: the last coordinate varies fastest,
    /// so index = x*p^2 + y*p + z in dimension 3 and x*p + y in dimension 2.
    #[inline]
    pub fn index(&self, m: PrimeModulus) -> u64 {
        let p = m.p() as u64;
        self.coords().iter().fold(0u64, |acc, &c| acc * p + c as u64)
    }

    /// Inverse of [`Point::index`].
    pub fn from_index(mut idx: u64, dim: Dim, m: PrimeModulus) -> Point {
        let p = m.p() as u64;
        debug_assert!(idx < dim.space_size(m.p()));
        let mut arr = [0u32; 3];
        for slot in (0..dim.n()).rev() {
            arr[slot] = (idx % p) as u32;
            idx /= p;
        }
        Point { coords: arr, dim }
    }
}

/// A canonical direction: the first nonzero coordinate equals 1, so two
/// parallel lines always share the same `Direction` value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Direction {
    coords: [u32; 3],
    dim: Dim,
    pivot: u8,
}

impl Direction {
    /// Canonical representative of the parallel class of `v`. Returns
    /// `None` when `v` is the zero vector.
    pub fn canonicalize(v: &[u32], m: PrimeModulus) -> Option<Direction> {
        let dim = Dim::from_u8(v.len() as u8)
            .unwrap_or_else(|| panic!("unsupported dimension {}", v.len()));
        let pivot = v.iter().position(|&c| c != 0)?;
        let scale = m.inv(v[pivot]).expect("pivot coordinate is nonzero");
        let mut arr = [0u32; 3];
        for (slot, &c) in v.iter().enumerate() {
            arr[slot] = m.mul(c, scale);
        }
        debug_assert_eq!(arr[pivot], 1);
        Some(Direction {
            coords: arr,
            dim,
            pivot: pivot as u8,
        })
    }

    pub(crate) fn from_canonical(coords: [u32; 3], dim: Dim, pivot: u8) -> Direction {
        debug_assert_eq!(coords[pivot as usize], 1);
        debug_assert!((0..pivot as usize).all(|i| coords[i] == 0));
        Direction { coords, dim, pivot }
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn coords(&self) -> &[u32] {
        &self.coords[..self.dim.n()]
    }

    /// Position of the leading 1.
    #[inline]
    pub fn pivot(&self) -> usize {
        self.pivot as usize
    }

    /// Rank of this direction in the generation order of
    /// [`canonical_directions`].
    pub fn rank(&self, m: PrimeModulus) -> u64 {
        let p = m.p() as u64;
        let n = self.dim.n();
        let mut rank = 0u64;
        for &c in &self.coords[self.pivot() + 1..n] {
            rank = rank * p + c as u64;
        }
        // directions with a smaller pivot come first, p^(n-1-j) of them for pivot j
        for j in 0..self.pivot() {
            rank += p.pow((n - 1 - j) as u32);
        }
        rank
    }
}

/// A canonical affine line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Line {
    base: Point,
    dir: Direction,
}

impl Line {
    /// Canonical line through `point` with direction `dir`: the stored base
    /// is the unique point of the line with zero pivot coordinate.
    pub fn new(point: Point, dir: Direction, m: PrimeModulus) -> Line {
        assert_eq!(point.dim(), dir.dim(), "point and direction dimensions differ");
        let t = point.coords[dir.pivot()];
        let mut base = [0u32; 3];
        for i in 0..point.dim().n() {
            base[i] = m.sub(point.coords[i], m.mul(t, dir.coords[i]));
        }
        debug_assert_eq!(base[dir.pivot()], 0);
        Line {
            base: Point::from_array(base, point.dim()),
            dir,
        }
    }

    /// The unique line through two distinct points; `None` if they coincide.
    pub fn through(a: &Point, b: &Point, m: PrimeModulus) -> Option<Line> {
        assert_eq!(a.dim(), b.dim());
        let mut v = [0u32; 3];
        for i in 0..a.dim().n() {
            v[i] = m.sub(b.coords[i], a.coords[i]);
        }
        let dir = Direction::canonicalize(&v[..a.dim().n()], m)?;
        Some(Line::new(*a, dir, m))
    }

    #[inline]
    pub fn base(&self) -> &Point {
        &self.base
    }

    #[inline]
    pub fn dir(&self) -> &Direction {
        &self.dir
    }

    /// The p points of the line, in parameter order starting at the base.
    pub fn points(&self, m: PrimeModulus) -> Vec<Point> {
        let n = self.base.dim().n();
        let mut out = Vec::with_capacity(m.p() as usize);
        let mut cur = self.base.coords;
        for _ in 0..m.p() {
            out.push(Point::from_array(cur, self.base.dim()));
            for i in 0..n {
                cur[i] = m.add(cur[i], self.dir.coords[i]);
            }
        }
        out
    }

    /// Position of this line in the order produced by [`enumerate_lines`]:
    /// lines are grouped by direction rank, and within one direction the
    /// bases are enumerated in lexicographic coordinate order.
    pub fn global_index(&self, m: PrimeModulus) -> u64 {
        let p = m.p() as u64;
        let n = self.base.dim().n();
        let per_dir = p.pow((n - 1) as u32);
        let mut local = 0u64;
        for i in 0..n {
            if i != self.dir.pivot() {
                local = local * p + self.base.coords[i] as u64;
            }
        }
        self.dir.rank(m) * per_dir + local
    }
}

/// Number of canonical directions, (p^n - 1) / (p - 1).
pub fn direction_count(dim: Dim, p: u32) -> u64 {
    (dim.space_size(p) - 1) / (p as u64 - 1)
}

/// Total number of distinct lines, p^(n-1) * (p^n - 1) / (p - 1).
pub fn line_count(dim: Dim, p: u32) -> u64 {
    (p as u64).pow(dim.n() as u32 - 1) * direction_count(dim, p)
}

/// All canonical directions in generation order: pivot position ascending,
/// free coordinates in lexicographic order.
pub fn canonical_directions(dim: Dim, m: PrimeModulus) -> Vec<Direction> {
    let p = m.p();
    let n = dim.n();
    let mut out = Vec::with_capacity(direction_count(dim, p) as usize);
    for pivot in 0..n {
        let free = n - 1 - pivot;
        let combos = (p as u64).pow(free as u32);
        for mut t in 0..combos {
            let mut coords = [0u32; 3];
            coords[pivot] = 1;
            for slot in (pivot + 1..n).rev() {
                coords[slot] = (t % p as u64) as u32;
                t /= p as u64;
            }
            out.push(Direction::from_canonical(coords, dim, pivot as u8));
        }
    }
    out
}

/// Base points of the lines with direction pivot `pivot`: the transversal
/// hyperplane {x_pivot = 0}, in lexicographic coordinate order.
pub(crate) fn transversal_base(dim: Dim, p: u32, pivot: usize, local: u64) -> [u32; 3] {
    let n = dim.n();
    let mut coords = [0u32; 3];
    let mut t = local;
    for slot in (0..n).rev() {
        if slot == pivot {
            continue;
        }
        coords[slot] = (t % p as u64) as u32;
        t /= p as u64;
    }
    coords
}

/// Every line of F_p^n exactly once, grouped by direction.
pub fn enumerate_lines(dim: Dim, m: PrimeModulus) -> impl Iterator<Item = Line> {
    let p = m.p();
    let per_dir = (p as u64).pow(dim.n() as u32 - 1);
    canonical_directions(dim, m).into_iter().flat_map(move |dir| {
        (0..per_dir).map(move |local| {
            let base = transversal_base(dim, p, dir.pivot(), local);
            Line {
                base: Point::from_array(base, dim),
                dir,
            }
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn direction_counts() {
        assert_eq!(direction_count(Dim::Two, 3), 4);
        assert_eq!(direction_count(Dim::Three, 3), 13);
        assert_eq!(direction_count(Dim::Three, 17), 307);
    }

    #[test]
    fn directions_p3_plane() {
        let dirs = canonical_directions(Dim::Two, m(3));
        let got: Vec<Vec<u32>> = dirs.iter().map(|d| d.coords().to_vec()).collect();
        assert_eq!(
            got,
            vec![vec![1, 0], vec![1, 1], vec![1, 2], vec![0, 1]]
        );
    }

    #[test]
    fn directions_pairwise_nonproportional() {
        for (dim, p) in [(Dim::Two, 3), (Dim::Two, 5), (Dim::Three, 3), (Dim::Three, 5)] {
            let mm = m(p);
            let dirs = canonical_directions(dim, mm);
            assert_eq!(dirs.len() as u64, direction_count(dim, mm.p()));
            for (i, a) in dirs.iter().enumerate() {
                assert_eq!(a.rank(mm), i as u64);
                assert_eq!(a.coords()[a.pivot()], 1);
                for b in &dirs[i + 1..] {
                    // proportional canonical directions would be equal
                    assert_ne!(a.coords(), b.coords());
                }
            }
        }
    }

    #[test]
    fn line_counts() {
        assert_eq!(line_count(Dim::Two, 3), 12);
        assert_eq!(line_count(Dim::Three, 3), 117);
        assert_eq!(line_count(Dim::Three, 17), 88_723);
        assert_eq!(line_count(Dim::Three, 17), 289 * 307);
        for (dim, p) in [(Dim::Two, 3), (Dim::Two, 5), (Dim::Three, 3), (Dim::Three, 5)] {
            assert_eq!(enumerate_lines(dim, m(p)).count() as u64, line_count(dim, p as u32));
        }
    }

    #[test]
    fn line_points_examples() {
        let m5 = m(5);
        let axis = Line::new(
            Point::new(&[0, 0, 0], m5),
            Direction::canonicalize(&[0, 0, 1], m5).unwrap(),
            m5,
        );
        let pts = axis.points(m5);
        assert_eq!(pts.len(), 5);
        for (z, pt) in pts.iter().enumerate() {
            assert_eq!(pt.coords(), &[0, 0, z as u32]);
        }

        let m3 = m(3);
        let diag = Line::new(
            Point::new(&[0, 0], m3),
            Direction::canonicalize(&[1, 1], m3).unwrap(),
            m3,
        );
        let got: HashSet<Vec<u32>> = diag.points(m3).iter().map(|q| q.coords().to_vec()).collect();
        let want: HashSet<Vec<u32>> =
            [vec![0, 0], vec![1, 1], vec![2, 2]].into_iter().collect();
        assert_eq!(got, want);
    }

    #[test]
    fn lines_have_p_distinct_points() {
        for (dim, p) in [(Dim::Two, 5), (Dim::Three, 3)] {
            let mm = m(p);
            for line in enumerate_lines(dim, mm) {
                let pts: HashSet<u64> = line.points(mm).iter().map(|q| q.index(mm)).collect();
                assert_eq!(pts.len(), p as usize);
            }
        }
    }

    #[test]
    fn enumerated_lines_have_distinct_point_sets() {
        for (dim, p) in [(Dim::Two, 3), (Dim::Two, 5), (Dim::Three, 3), (Dim::Three, 5)] {
            let mm = m(p);
            let mut seen = HashSet::new();
            for line in enumerate_lines(dim, mm) {
                let mut pts: Vec<u64> = line.points(mm).iter().map(|q| q.index(mm)).collect();
                pts.sort_unstable();
                assert!(seen.insert(pts), "duplicate line at p={p} dim={dim:?}");
            }
            assert_eq!(seen.len() as u64, line_count(dim, mm.p()));
        }
    }

    #[test]
    fn global_index_matches_enumeration_order() {
        for (dim, p) in [(Dim::Two, 5), (Dim::Three, 3)] {
            let mm = m(p);
            for (i, line) in enumerate_lines(dim, mm).enumerate() {
                assert_eq!(line.global_index(mm), i as u64);
            }
        }
    }

    #[test]
    fn every_point_pair_spans_exactly_one_enumerated_line() {
        // exhaustive at p = 3 in both dimensions
        for dim in [Dim::Two, Dim::Three] {
            let mm = m(3);
            let lines: Vec<Vec<u64>> = enumerate_lines(dim, mm)
                .map(|l| l.points(mm).iter().map(|q| q.index(mm)).collect())
                .collect();
            let size = dim.space_size(3);
            for a in 0..size {
                for b in a + 1..size {
                    let through = lines
                        .iter()
                        .filter(|pts| pts.contains(&a) && pts.contains(&b))
                        .count();
                    assert_eq!(through, 1, "pair ({a},{b}) dim={dim:?}");
                }
            }
        }
    }

    #[test]
    fn sampled_point_pairs_at_p7() {
        let mm = m(7);
        let dim = Dim::Three;
        // deterministic sample of pairs
        let size = dim.space_size(7);
        let pairs = (0..40u64).map(|i| ((i * 97) % size, (i * 41 + 13) % size));
        for (a, b) in pairs {
            if a == b {
                continue;
            }
            let pa = Point::from_index(a, dim, mm);
            let pb = Point::from_index(b, dim, mm);
            let line = Line::through(&pa, &pb, mm).unwrap();
            let pts: Vec<u64> = line.points(mm).iter().map(|q| q.index(mm)).collect();
            assert!(pts.contains(&a) && pts.contains(&b));
            // the canonical form is independent of the spanning pair
            let again = Line::through(&pb, &pa, mm).unwrap();
            assert_eq!(line, again);
        }
    }

    #[test]
    fn parallel_classes_partition_the_space() {
        for (dim, p) in [(Dim::Two, 5), (Dim::Three, 3), (Dim::Three, 5)] {
            let mm = m(p);
            let per_dir = (p as u64).pow(dim.n() as u32 - 1);
            for dir in canonical_directions(dim, mm) {
                let mut covered = vec![false; dim.space_size(p as u32) as usize];
                let mut count = 0u64;
                for local in 0..per_dir {
                    let base = transversal_base(dim, p as u32, dir.pivot(), local);
                    let line = Line {
                        base: Point::from_array(base, dim),
                        dir,
                    };
                    for q in line.points(mm) {
                        let idx = q.index(mm) as usize;
                        assert!(!covered[idx], "overlap in class of {:?}", dir.coords());
                        covered[idx] = true;
                        count += 1;
                    }
                }
                assert_eq!(count, dim.space_size(p as u32));
            }
        }
    }

    #[test]
    fn point_index_roundtrip() {
        for (dim, p) in [(Dim::Two, 7), (Dim::Three, 5)] {
            let mm = m(p);
            for idx in 0..dim.space_size(p as u32) {
                let q = Point::from_index(idx, dim, mm);
                assert_eq!(q.index(mm), idx);
            }
        }
    }
}
