//! The layered line-free construction in F_p^3 and its building blocks:
//! derived parameters, planar blocking sets built from a diagonal plus a
//! grid, per-layer exclusion sets, the initial layered set, and the final
//! set obtained by deleting the collinearity repair points.
//!
//! All parameter arithmetic is exact integer arithmetic; no floating
//! point is involved anywhere.

use thiserror::Error;

use crate::field::PrimeModulus;
use crate::geometry::{Dim, Point};
use crate::pointset::PointSet;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("t = {t} is out of range; need 0 <= t <= {max}")]
    TOutOfRange { t: u32, max: u32 },
    #[error("layer {i} is not a special layer (range is [{lo}, {hi}])")]
    LayerOutOfRange { i: u32, lo: u32, hi: u32 },
}

/// Derived construction parameters.
///
/// * `r` — grid stride, the integer square root of p;
/// * `s` — grid height index, floor((p-2)/r), so the column values are
///   {0, r, 2r, ..., sr};
/// * `l` — number of special layers, the largest integer with 16*l^2 <= p
///   (which equals floor(sqrt(p)/4)).
///
/// `degenerate` is set when `l` is zero (p <= 13); the construction then
/// collapses to the hypercube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructionParams {
    m: PrimeModulus,
    r: u32,
    s: u32,
    l: u32,
    degenerate: bool,
}

impl ConstructionParams {
    pub fn modulus(&self) -> PrimeModulus {
        self.m
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn s(&self) -> u32 {
        self.s
    }
    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn degenerate(&self) -> bool {
        self.degenerate
    }

    /// The special layer indices [p-l-1, p-2]; empty when degenerate.
    pub fn special_layers(&self) -> std::ops::Range<u32> {
        let p = self.m.p();
        (p - self.l - 1)..(p - 1)
    }

    /// Grid column values {0, r, 2r, ..., sr}.
    pub fn grid_columns(&self) -> impl Iterator<Item = u32> {
        let r = self.r;
        (0..=self.s).map(move |c| c * r)
    }

    /// Strip offset for a special layer: t = (i - (p-l-1)) * r.
    pub fn strip_offset(&self, i: u32) -> u32 {
        (i - self.special_layers().start) * self.r
    }
}

/// Computes (r, s, l) from p by exact integer floors.
pub fn derive_params(m: PrimeModulus) -> ConstructionParams {
    let p = m.p() as u64;
    let r = p.isqrt();
    let s = (p - 2) / r;
    // largest l with 16*l^2 <= p; since l^2 is an integer this is
    // exactly isqrt(floor(p/16))
    let l = (p / 16).isqrt();

    assert!(r * r <= p && p < (r + 1) * (r + 1));
    assert!(s * r <= p - 2 && p - 2 < (s + 1) * r);
    assert!(16 * l * l <= p && p < 16 * (l + 1) * (l + 1));
    // 16 l^2 <= p and r^2 <= p give (4 l r)^2 <= p^2, so l*r <= p/4
    assert!(4 * l * r <= p);
    assert!(s * r < p - 1);
    if p >= 17 {
        assert!(r >= 4 && s >= 1 && l >= 1);
    }

    ConstructionParams {
        m,
        r: r as u32,
        s: s as u32,
        l: l as u32,
        degenerate: l == 0,
    }
}

/// The classical line-free set [0, p-2]^n.
pub fn hypercube(m: PrimeModulus, dim: Dim) -> PointSet {
    let p = m.p();
    let mut s = PointSet::empty(dim, m);
    match dim {
        Dim::Two => {
            for x in 0..p - 1 {
                for y in 0..p - 1 {
                    s.insert_index(x as u64 * p as u64 + y as u64);
                }
            }
        }
        Dim::Three => {
            let p64 = p as u64;
            for x in 0..p - 1 {
                for y in 0..p - 1 {
                    let base = (x as u64 * p64 + y as u64) * p64;
                    for z in 0..p - 1 {
                        s.insert_index(base + z as u64);
                    }
                }
            }
        }
    }
    s
}

/// Planar blocking set: the main diagonal {(x, x)} together with the grid
/// [t, t+r-1] x {0, r, 2r, ..., sr, p-1}. Valid for 0 <= t <= p-r.
pub fn planar_blocking_set(m: PrimeModulus, t: u32) -> Result<PointSet, ConstructionError> {
    let params = derive_params(m);
    let p = m.p();
    let r = params.r();
    if t > p - r {
        return Err(ConstructionError::TOutOfRange { t, max: p - r });
    }
    let mut b = PointSet::empty(Dim::Two, m);
    for x in 0..p {
        b.insert_index(x as u64 * p as u64 + x as u64);
    }
    for x in t..t + r {
        for y in params.grid_columns().chain(std::iter::once(p - 1)) {
            b.insert_index(x as u64 * p as u64 + y as u64);
        }
    }
    Ok(b)
}

/// Size of one special-layer exclusion set: p + (s+1)(r+1) + l*r - 1.
pub fn exclusion_size(params: &ConstructionParams) -> u64 {
    let (p, r, s, l) = (
        params.m.p() as u64,
        params.r as u64,
        params.s as u64,
        params.l as u64,
    );
    p + (s + 1) * (r + 1) + l * r - 1
}

/// Size of one special layer: p^2 - p - (s+1)(r+1) - l*r + 1.
pub fn special_layer_size(params: &ConstructionParams) -> u64 {
    let p = params.m.p() as u64;
    p * p - exclusion_size(params)
}

/// Closed form for the size of the initial layered set:
/// (p-l-1)(p-1)^2 + l(p^2 - p - (s+1)(r+1) - l*r + 1) + (s+1)*l*r.
pub fn initial_size_formula(params: &ConstructionParams) -> u64 {
    let (p, r, s, l) = (
        params.m.p() as u64,
        params.r as u64,
        params.s as u64,
        params.l as u64,
    );
    (p - l - 1) * (p - 1) * (p - 1) + l * special_layer_size(params) + (s + 1) * l * r
}

/// Upper bound on the number of repair deletions: l(l-1)(s+1).
pub fn removal_bound(params: &ConstructionParams) -> u64 {
    let (s, l) = (params.s as u64, params.l as u64);
    l * (l.saturating_sub(1)) * (s + 1)
}

/// The exclusion set A for special layer `i`, in the (y, z) plane:
/// the main diagonal, the grid ([t, t+r-1] ∪ {p-1}) x {0, r, ..., sr}
/// with t = (i - (p-l-1)) * r, and the strip [0, l*r-1] x {p-1}.
pub fn layer_exclusion(
    params: &ConstructionParams,
    i: u32,
) -> Result<PointSet, ConstructionError> {
    let range = params.special_layers();
    if !range.contains(&i) {
        return Err(ConstructionError::LayerOutOfRange {
            i,
            lo: range.start,
            hi: range.end.saturating_sub(1),
        });
    }
    let m = params.m;
    let p = m.p();
    let (r, l) = (params.r(), params.l());
    let t = params.strip_offset(i);
    // all intervals stay strictly inside [0, p-1]; no wraparound
    assert!(t + r - 1 < p - 1);
    assert!(l * r - 1 < p - 1);

    let mut a = PointSet::empty(Dim::Two, m);
    let p64 = p as u64;
    for y in 0..p {
        a.insert_index(y as u64 * p64 + y as u64);
    }
    for y in (t..t + r).chain(std::iter::once(p - 1)) {
        for z in params.grid_columns() {
            a.insert_index(y as u64 * p64 + z as u64);
        }
    }
    for y in 0..l * r {
        a.insert_index(y as u64 * p64 + (p - 1) as u64);
    }
    Ok(a)
}

/// The initial layered set: standard squares in layers [0, p-l-2],
/// complements of the exclusion sets in the special layers, and the strip
/// grid [0, l*r-1] x {0, r, ..., sr} in layer p-1. Contains full lines in
/// general; see [`removal_targets`].
pub fn initial_set(params: &ConstructionParams) -> PointSet {
    let m = params.m;
    let p = m.p();
    let p64 = p as u64;
    let plane = p64 * p64;
    let (r, l) = (params.r(), params.l());
    let special = params.special_layers();
    let mut s = PointSet::empty(Dim::Three, m);
    for x in 0..p {
        let offset = x as u64 * plane;
        if x == p - 1 {
            for y in 0..l * r {
                for z in params.grid_columns() {
                    s.insert_index(offset + y as u64 * p64 + z as u64);
                }
            }
        } else if special.contains(&x) {
            let a = layer_exclusion(params, x).expect("x is a special layer");
            for plane_idx in 0..plane {
                if !a.contains_index(plane_idx) {
                    s.insert_index(offset + plane_idx);
                }
            }
        } else {
            for y in 0..p - 1 {
                for z in 0..p - 1 {
                    s.insert_index(offset + y as u64 * p64 + z as u64);
                }
            }
        }
    }
    s
}

/// One candidate full line through layer p-1 and the repair point that
/// kills it. The line meets layer p-1 in (p-1, j, k), has y = p-1 in layer
/// `i1` and z = p-1 in layer `i2`; collinearity forces the z-coordinate of
/// the y = p-1 point to be `k1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RemovalTriple {
    pub i1: u32,
    pub i2: u32,
    pub k: u32,
    pub k1: u32,
}

impl RemovalTriple {
    /// The point (i1, p-1, k1) deleted from the initial set.
    pub fn target(&self, m: PrimeModulus) -> Point {
        Point::new(&[self.i1, m.p() - 1, self.k1], m)
    }
}

/// All repair triples: i1, i2 ranging over distinct special layers and k
/// over the grid columns, with k1 = (p-1) + (i1-i2)/((p-1)-i2) * (k-(p-1))
/// computed in F_p. Empty when l <= 1.
pub fn removal_triples(params: &ConstructionParams) -> Vec<RemovalTriple> {
    let m = params.m;
    let pm1 = m.p() - 1;
    let mut out = Vec::new();
    for i1 in params.special_layers() {
        for i2 in params.special_layers().filter(|&i2| i2 != i1) {
            // i2 <= p-2, so (p-1) - i2 is nonzero
            let denom_inv = m
                .inv(m.sub(pm1, i2))
                .expect("denominator (p-1)-i2 is nonzero");
            let slope = m.mul(m.sub(i1, i2), denom_inv);
            for k in params.grid_columns() {
                let k1 = m.add(pm1, m.mul(slope, m.sub(k, pm1)));
                debug_assert_ne!(k1, pm1);
                out.push(RemovalTriple { i1, i2, k, k1 });
            }
        }
    }
    out
}

/// The deduplicated set of repair points {(i1, p-1, k1)}.
pub fn removal_targets(params: &ConstructionParams) -> PointSet {
    let m = params.m;
    let mut s = PointSet::empty(Dim::Three, m);
    for triple in removal_triples(params) {
        s.insert(&triple.target(m));
    }
    s
}

/// The full construction with its intermediate artifacts.
#[derive(Debug, Clone)]
pub struct Construction {
    pub params: ConstructionParams,
    /// The layered set before repairs.
    pub initial: PointSet,
    /// Deduplicated repair points; targets already outside `initial` are
    /// harmless no-ops.
    pub targets: PointSet,
    /// The final line-free set.
    pub set: PointSet,
}

impl Construction {
    pub fn build(m: PrimeModulus) -> Construction {
        let params = derive_params(m);
        let initial = initial_set(&params);
        let targets = removal_targets(&params);
        let set = initial
            .difference(&targets)
            .expect("initial set and targets share dimension and modulus");
        Construction {
            params,
            initial,
            targets,
            set,
        }
    }

    /// Number of points actually deleted from the initial set.
    pub fn removed(&self) -> u64 {
        self.initial.cardinality() - self.set.cardinality()
    }
}

/// Convenience wrapper: the final line-free set for `m`.
pub fn line_free_set(m: PrimeModulus) -> PointSet {
    Construction::build(m).set
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::primes_in;

    fn m(p: u64) -> PrimeModulus {
        PrimeModulus::new(p).unwrap()
    }

    #[test]
    fn params_examples() {
        let q = derive_params(m(17));
        assert_eq!((q.r(), q.s(), q.l(), q.degenerate()), (4, 3, 1, false));
        let q = derive_params(m(13));
        assert_eq!((q.r(), q.s(), q.l(), q.degenerate()), (3, 3, 0, true));
        let q = derive_params(m(101));
        assert_eq!((q.r(), q.s(), q.l(), q.degenerate()), (10, 9, 2, false));
        let q = derive_params(m(5));
        assert_eq!((q.r(), q.s(), q.l()), (2, 1, 0));
    }

    #[test]
    fn special_layer_count_is_l() {
        for p in primes_in(3, 101) {
            let q = derive_params(m(p));
            assert_eq!(q.special_layers().len() as u32, q.l());
        }
    }

    #[test]
    fn l_agrees_with_floored_isqrt_quarter() {
        // the two candidate formulas agree; checked exhaustively
        for p in 1u64..=1_000_000 {
            assert_eq!((p / 16).isqrt(), p.isqrt() / 4, "p={p}");
        }
    }

    #[test]
    fn hypercube_sizes() {
        assert_eq!(hypercube(m(3), Dim::Three).cardinality(), 8);
        assert_eq!(hypercube(m(5), Dim::Two).cardinality(), 16);
        assert_eq!(hypercube(m(17), Dim::Three).cardinality(), 4096);
    }

    #[test]
    fn blocking_set_respects_t_range() {
        assert!(planar_blocking_set(m(17), 0).is_ok());
        assert!(planar_blocking_set(m(17), 13).is_ok());
        assert_eq!(
            planar_blocking_set(m(17), 14).unwrap_err(),
            ConstructionError::TOutOfRange { t: 14, max: 13 }
        );
    }

    #[test]
    fn blocking_set_shape_p17_t0() {
        let b = planar_blocking_set(m(17), 0).unwrap();
        // diagonal: 17 points; grid [0,3] x {0,4,8,12,16}: 20 points;
        // the single overlap is (0,0)
        assert_eq!(b.cardinality(), 17 + 20 - 1);
    }

    #[test]
    fn exclusion_layer_examples() {
        let q17 = derive_params(m(17));
        let a = layer_exclusion(&q17, 15).unwrap();
        assert_eq!(q17.strip_offset(15), 0);
        assert_eq!(a.cardinality(), 40);
        assert_eq!(exclusion_size(&q17), 40);

        let q101 = derive_params(m(101));
        let a = layer_exclusion(&q101, 98).unwrap();
        assert_eq!(a.cardinality(), 230);
        assert_eq!(exclusion_size(&q101), 230);

        assert!(matches!(
            layer_exclusion(&q17, 14),
            Err(ConstructionError::LayerOutOfRange { .. })
        ));
        assert!(matches!(
            layer_exclusion(&q17, 16),
            Err(ConstructionError::LayerOutOfRange { .. })
        ));
        let q13 = derive_params(m(13));
        assert!(layer_exclusion(&q13, 11).is_err());
    }

    #[test]
    fn exclusion_diagonal_meets_grid_once() {
        for p in primes_in(17, 101) {
            let q = derive_params(m(p));
            let r = q.r();
            for i in q.special_layers() {
                let t = q.strip_offset(i);
                let hits: Vec<u32> = (t..t + r)
                    .filter(|&j| j % r == 0 && j <= q.s() * r)
                    .collect();
                assert_eq!(hits.len(), 1, "p={p} i={i}");
            }
        }
    }

    #[test]
    fn exclusion_contains_a_planar_blocking_instance() {
        for p in [17u64, 19, 67, 101] {
            let q = derive_params(m(p));
            for i in q.special_layers() {
                let a = layer_exclusion(&q, i).unwrap();
                let b = planar_blocking_set(m(p), q.strip_offset(i)).unwrap();
                assert!(b.is_subset(&a).unwrap(), "p={p} i={i}");
            }
        }
    }

    #[test]
    fn initial_set_size_p17() {
        let q = derive_params(m(17));
        let s = initial_set(&q);
        assert_eq!(initial_size_formula(&q), 4105);
        assert_eq!(s.cardinality(), 4105);
    }

    #[test]
    fn initial_set_collapses_to_hypercube_when_degenerate() {
        for p in primes_in(3, 13) {
            let q = derive_params(m(p));
            assert!(q.degenerate());
            let s = initial_set(&q);
            assert_eq!(s.cardinality(), (p - 1).pow(3));
            assert_eq!(s, hypercube(m(p), Dim::Three));
        }
    }

    #[test]
    fn layers_match_their_definitions() {
        for p in [13u64, 17, 19, 101] {
            let mm = m(p);
            let q = derive_params(mm);
            let s = initial_set(&q);
            for x in 0..mm.p() {
                let got = s.layer(x);
                let want = if x == mm.p() - 1 {
                    let mut strip = PointSet::empty(Dim::Two, mm);
                    for y in 0..q.l() * q.r() {
                        for z in q.grid_columns() {
                            strip.insert_index(y as u64 * p + z as u64);
                        }
                    }
                    strip
                } else if q.special_layers().contains(&x) {
                    layer_exclusion(&q, x).unwrap().complement()
                } else {
                    hypercube(mm, Dim::Two)
                };
                assert_eq!(got, want, "p={p} layer={x}");
            }
        }
    }

    #[test]
    fn strips_of_distinct_special_layers_are_disjoint() {
        for p in primes_in(17, 101) {
            let q = derive_params(m(p));
            let strips: Vec<(u32, u32)> = q
                .special_layers()
                .map(|i| {
                    let t = q.strip_offset(i);
                    (t, t + q.r() - 1)
                })
                .collect();
            for (a, sa) in strips.iter().enumerate() {
                for sb in &strips[a + 1..] {
                    assert!(sa.1 < sb.0 || sb.1 < sa.0, "p={p}");
                }
            }
        }
    }

    #[test]
    fn difference_coverage_of_the_grid() {
        // the grid differences x - y cover (s+1)r consecutive residues,
        // and (s+1)r >= p-1; when equality holds the extra point
        // (t+r-1, p-1) supplies the missing residue t+r
        for p in primes_in(5, 101) {
            let mm = m(p);
            let q = derive_params(mm);
            let (r, s) = (q.r(), q.s());
            let covered = (s as u64 + 1) * r as u64;
            assert!(covered >= p - 1, "p={p}");
            for t in 0..=(mm.p() - r) {
                let mut seen = vec![false; p as usize];
                for x in t..t + r {
                    for y in q.grid_columns() {
                        seen[mm.sub(x, y) as usize] = true;
                    }
                }
                let count = seen.iter().filter(|&&b| b).count() as u64;
                assert_eq!(count, covered.min(p), "p={p} t={t}");
                // consecutive window from t-sr down to t+r-1
                let lo = mm.sub(t, s * r);
                for off in 0..covered.min(p) {
                    let v = (lo as u64 + off) % p;
                    assert!(seen[v as usize], "p={p} t={t} missing {v}");
                }
                if covered == p - 1 {
                    let missing = mm.add(t, r);
                    assert!(!seen[missing as usize], "p={p} t={t}");
                    assert_eq!(mm.sub(mm.add(t, r - 1), mm.p() - 1), missing);
                }
            }
        }
    }

    #[test]
    fn removal_triples_examples() {
        let q17 = derive_params(m(17));
        assert!(removal_triples(&q17).is_empty());
        assert!(removal_targets(&q17).is_empty());

        let q101 = derive_params(m(101));
        let triples = removal_triples(&q101);
        assert_eq!(triples.len() as u64, removal_bound(&q101));
        assert_eq!(removal_bound(&q101), 20);
        let targets = removal_targets(&q101);
        assert!(targets.cardinality() <= 20);
        for t in &triples {
            assert_eq!(
                t.k1,
                {
                    let mm = m(101);
                    let pm1 = 100;
                    mm.add(
                        pm1,
                        mm.mul(
                            mm.mul(mm.sub(t.i1, t.i2), mm.inv(mm.sub(pm1, t.i2)).unwrap()),
                            mm.sub(t.k, pm1),
                        ),
                    )
                },
                "recomputation must agree"
            );
            assert_ne!(t.k1, 100);
        }
        for q in targets.points() {
            let c = q.coords();
            assert_eq!(c[1], 100);
            assert_ne!(c[2], 100);
        }
    }

    #[test]
    fn final_set_examples() {
        let c = Construction::build(m(17));
        assert_eq!(c.set.cardinality(), 4105);
        assert_eq!(c.removed(), 0);
        assert_eq!(
            c.set.cardinality() - hypercube(m(17), Dim::Three).cardinality(),
            9
        );

        for p in primes_in(3, 13) {
            let c = Construction::build(m(p));
            assert_eq!(c.set, hypercube(m(p), Dim::Three));
        }

        let c = Construction::build(m(101));
        assert!(c.set.cardinality() >= c.initial.cardinality() - 20);
        assert!(c.set.is_subset(&c.initial).unwrap());
        // everything deleted sits in a special layer with y = p-1
        let gone = c.initial.difference(&c.set).unwrap();
        for q in gone.points() {
            let coords = q.coords();
            assert!(c.params.special_layers().contains(&coords[0]));
            assert_eq!(coords[1], 100);
        }
    }
}
