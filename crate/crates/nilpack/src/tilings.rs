//! Regular prism tilings of the discrete groups pq2_1.
//!
//! The group is generated by a rotation `a` of order p about the fibre
//! of the origin and a rotation `b` of order q about the fibre of the
//! second base vertex. The screw motion tau = abab = baba is a pure
//! fibre translation and carries the bottom cover of the prism to the
//! top. A compatible tiling requires the base vertex fibres of adjacent
//! prisms to line up, which pins
//!
//! ```text
//!   cos^2(pi/p) + cos^2(pi/q) = 1,
//! ```
//!
//! an equation with exactly three integer solutions: (3,6), (4,4), (6,3).
//!
//! The prism cell is combinatorially a p-gonal prism, but its "top" and
//! "bottom" faces are not flat: they are pieces of the surface z = xy/2
//! (zero linearized height) swept between the vertex fibres.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::NilError;
use crate::geodesics::distance;
use crate::nil::{NilIsometry, NilPoint};

/// Whether the regular prism tiling with a p-gonal base and q prisms
/// around each side edge exists.
pub fn tiling_exists(p: u32, q: u32) -> bool {
    if p < 3 || q < 3 {
        return false;
    }
    let cp = (PI / f64::from(p)).cos();
    let cq = (PI / f64::from(q)).cos();
    (cp * cp + cq * cq - 1.0).abs() < 1e-12
}

/// A regular prism tiling instance: combinatorial type (p, q) and base
/// circumradius x, with its generators and screw translation.
#[derive(Debug, Clone)]
pub struct PrismTiling {
    p: u32,
    q: u32,
    x: f64,
    gen_a: NilIsometry,
    gen_b: NilIsometry,
    tau: NilIsometry,
    base: Vec<NilPoint>,
}

/// One point of the orbit of the origin under the tiling group.
#[derive(Debug, Clone, Copy)]
pub struct OrbitPoint {
    pub point: NilPoint,
    /// A group element realizing the point (not unique).
    pub isometry: NilIsometry,
    /// Word length of that element in the generators.
    pub word_length: u32,
    /// Geodesic distance from the origin; None when it exceeds the
    /// solver's 2*pi search cap.
    pub distance: Option<f64>,
}

/// Maximal deviations measured while checking the group presentation on
/// random probe points. All entries are max-norm coordinate errors.
#[derive(Debug, Clone, Copy)]
pub struct RelationReport {
    /// a^p versus the identity.
    pub order_a: f64,
    /// b^q versus the identity.
    pub order_b: f64,
    /// abab (baba)^-1 versus the identity.
    pub screw_relator: f64,
    /// Pointwise abab versus baba.
    pub tau_match: f64,
    /// Rotation angle and planar translation left in tau, which must be
    /// a pure fibre translation.
    pub tau_planar_drift: f64,
    /// Planar mismatch between a(A2) and b^-1(A1): the tiling closes only
    /// if those vertices share a fibre.
    pub fibre_alignment: f64,
}

impl RelationReport {
    pub fn max_deviation(&self) -> f64 {
        self.order_a
            .max(self.order_b)
            .max(self.screw_relator)
            .max(self.tau_match)
            .max(self.tau_planar_drift)
            .max(self.fibre_alignment)
    }
}

impl PrismTiling {
    /// Builds the tiling with base circumradius `x`.
    pub fn build(p: u32, q: u32, x: f64) -> Result<Self, NilError> {
        if p < 3 || q < 3 {
            return Err(NilError::domain(format!(
                "prism tilings need p, q >= 3; got ({p}, {q})"
            )));
        }
        if !x.is_finite() || x <= 0.0 {
            return Err(NilError::domain(format!(
                "base circumradius must be positive; got {x}"
            )));
        }
        if !tiling_exists(p, q) {
            return Err(NilError::NoSuchTiling { p, q });
        }
        let a1 = NilPoint::new(x, 0.0, 0.0);
        let base: Vec<NilPoint> = (0..p)
            .map(|k| a1.rotate_about_origin(TAU * f64::from(k) / f64::from(p)))
            .collect();
        let gen_a = NilIsometry::rotation(TAU / f64::from(p));
        let gen_b = NilIsometry::rotation_about_fibre(base[1], TAU / f64::from(q));
        let tau = gen_a.then(gen_b).then(gen_a).then(gen_b);
        Ok(PrismTiling {
            p,
            q,
            x,
            gen_a,
            gen_b,
            tau,
            base,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Order-p rotation about the origin's fibre.
    pub fn gen_a(&self) -> NilIsometry {
        self.gen_a
    }

    /// Order-q rotation about the fibre of the second base vertex.
    pub fn gen_b(&self) -> NilIsometry {
        self.gen_b
    }

    /// The screw translation abab, a pure fibre translation.
    pub fn tau(&self) -> NilIsometry {
        self.tau
    }

    /// Base vertices A1..Ap, all with zero linearized height.
    pub fn base_vertices(&self) -> &[NilPoint] {
        &self.base
    }

    /// Top vertices: the tau image of the base ring.
    pub fn top_vertices(&self) -> Vec<NilPoint> {
        self.base.iter().map(|&v| self.tau.apply(v)).collect()
    }

    /// Signed fibre displacement of tau (negative: the screw moves the
    /// cell downward for the counterclockwise generator orientation).
    pub fn fibre_displacement(&self) -> f64 {
        self.tau.trans.z
    }

    /// Height of the prism cell: the geodesic distance between the two
    /// cover faces along the vertex fibre, d(O, tau(O)).
    pub fn prism_height(&self) -> Result<f64, NilError> {
        Ok(distance(NilPoint::ORIGIN, self.tau.apply(NilPoint::ORIGIN))?.length)
    }

    /// Volume of the prism cell. The model is volume-normalized, and the
    /// cell projects to the regular p-gon of circumradius x swept
    /// between two cover surfaces one screw step apart, so the volume is
    /// the polygon area times the fibre step (closed form in x, valid
    /// for every cell size, unlike the capped geodesic height).
    pub fn prism_volume(&self) -> f64 {
        let area = 0.5 * f64::from(self.p) * self.x * self.x * (TAU / f64::from(self.p)).sin();
        area * self.fibre_displacement().abs()
    }

    /// Checks the group presentation on `samples` random probe points.
    pub fn verify_relations(&self, samples: usize, seed: u64) -> RelationReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let probes: Vec<NilPoint> = (0..samples.max(1))
            .map(|_| {
                NilPoint::new(
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                    rng.random_range(-2.0..2.0),
                )
            })
            .collect();

        let pow = |g: NilIsometry, n: u32| -> NilIsometry {
            let mut acc = NilIsometry::IDENTITY;
            for _ in 0..n {
                acc = acc.then(g);
            }
            acc
        };
        let a = self.gen_a;
        let b = self.gen_b;
        let abab = a.then(b).then(a).then(b);
        let baba = b.then(a).then(b).then(a);

        let a2_next = a.apply(self.base[1]);
        let a1_prev = b.inverse().apply(self.base[0]);

        RelationReport {
            order_a: pow(a, self.p).deviation_from_identity(&probes),
            order_b: pow(b, self.q).deviation_from_identity(&probes),
            screw_relator: abab.then(baba.inverse()).deviation_from_identity(&probes),
            tau_match: probes
                .iter()
                .map(|&pt| abab.apply(pt).coord_distance(baba.apply(pt)))
                .fold(0.0, f64::max),
            tau_planar_drift: self
                .tau
                .trans
                .x
                .hypot(self.tau.trans.y)
                .max(self.tau.omega.abs()),
            fibre_alignment: (a2_next.a - a1_prev.a).abs().max((a2_next.b - a1_prev.b).abs()),
        }
    }

    /// Orbit of the origin under group words up to the given length,
    /// deduplicated (the origin itself excluded) and sorted by geodesic
    /// distance from the origin; points beyond the distance solver's cap
    /// sort last by Euclidean coordinate norm.
    pub fn orbit(&self, depth: u32) -> Vec<OrbitPoint> {
        let raw = self.orbit_raw(depth);
        let mut out: Vec<OrbitPoint> = raw
            .into_iter()
            .map(|(point, isometry, word_length)| OrbitPoint {
                point,
                isometry,
                word_length,
                distance: distance(NilPoint::ORIGIN, point).ok().map(|d| d.length),
            })
            .collect();
        out.sort_by(|u, v| {
            let key = |o: &OrbitPoint| {
                (
                    o.distance.is_none(),
                    o.distance.unwrap_or(f64::INFINITY),
                    (o.point.a * o.point.a + o.point.b * o.point.b + o.point.c * o.point.c),
                    o.point.a,
                    o.point.b,
                    o.point.c,
                )
            };
            key(u).partial_cmp(&key(v)).unwrap()
        });
        out
    }

    /// Orbit points without distances: breadth-first closure over the
    /// generators with a coordinate-hash dedup of group elements per
    /// level (performance only) and a tolerance-based dedup of the final
    /// point list (correctness).
    pub(crate) fn orbit_raw(&self, depth: u32) -> Vec<(NilPoint, NilIsometry, u32)> {
        let gens = [
            self.gen_a,
            self.gen_a.inverse(),
            self.gen_b,
            self.gen_b.inverse(),
        ];

        let key = |g: &NilIsometry| -> [i64; 5] {
            let q = 1e7;
            [
                (g.omega.cos() * q).round() as i64,
                (g.omega.sin() * q).round() as i64,
                (g.trans.x * q).round() as i64,
                (g.trans.y * q).round() as i64,
                (g.trans.z * q).round() as i64,
            ]
        };

        let mut seen = std::collections::HashSet::new();
        seen.insert(key(&NilIsometry::IDENTITY));
        let mut frontier = vec![NilIsometry::IDENTITY];
        let mut elements: Vec<(NilIsometry, u32)> = Vec::new();
        for level in 1..=depth {
            let mut next = Vec::new();
            for g in &frontier {
                for gen in &gens {
                    let h = g.then(*gen);
                    if seen.insert(key(&h)) {
                        next.push(h);
                        elements.push((h, level));
                    }
                }
            }
            frontier = next;
        }

        let origin = NilPoint::ORIGIN;
        let mut pts: Vec<(NilPoint, NilIsometry, u32)> = elements
            .into_iter()
            .map(|(g, l)| (g.apply(origin), g, l))
            .collect();
        // tolerance dedup: sort on the first coordinate, compare within
        // the window it admits
        pts.sort_by(|u, v| {
            (u.0.a, u.0.b, u.0.c)
                .partial_cmp(&(v.0.a, v.0.b, v.0.c))
                .unwrap()
        });
        let tol = 1e-8;
        let mut out: Vec<(NilPoint, NilIsometry, u32)> = Vec::with_capacity(pts.len());
        for cand in pts {
            if cand.0.coord_distance(origin) <= tol {
                continue;
            }
            let dup = out
                .iter()
                .rev()
                .take_while(|kept| cand.0.a - kept.0.a <= tol)
                .any(|kept| kept.0.coord_distance(cand.0) <= tol);
            if !dup {
                out.push(cand);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
        assert!(
            (got - want).abs() <= tol,
            "{what}: got {got}, want {want} (tol {tol})"
        );
    }

    const PAIRS: [(u32, u32); 3] = [(3, 6), (4, 4), (6, 3)];

    #[test]
    fn existence_is_limited_to_three_pairs() {
        assert!(tiling_exists(3, 6));
        assert!(tiling_exists(4, 4));
        assert!(tiling_exists(6, 3));
        for &(p, q) in &[(3, 3), (5, 5), (6, 6), (3, 7), (4, 5), (2, 6), (100, 3)] {
            assert!(!tiling_exists(p, q), "({p},{q}) must not exist");
        }
    }

    #[test]
    fn build_rejects_bad_arguments() {
        assert!(matches!(
            PrismTiling::build(5, 5, 1.0),
            Err(NilError::NoSuchTiling { p: 5, q: 5 })
        ));
        assert!(matches!(
            PrismTiling::build(2, 6, 1.0),
            Err(NilError::Domain(_))
        ));
        assert!(matches!(
            PrismTiling::build(4, 4, 0.0),
            Err(NilError::Domain(_))
        ));
        assert!(matches!(
            PrismTiling::build(4, 4, -1.0),
            Err(NilError::Domain(_))
        ));
    }

    #[test]
    fn base_vertices_form_a_closed_regular_ring() {
        for &(p, q) in &PAIRS {
            let t = PrismTiling::build(p, q, 1.3).unwrap();
            let base = t.base_vertices();
            assert_eq!(base.len(), p as usize);
            assert_close(base[0].a, 1.3, 1e-15, "A1.x");
            assert_close(base[0].b, 0.0, 1e-15, "A1.y");
            for v in base {
                // the base ring lies on the zero-height cover surface
                assert_close(v.to_linearized().c, 0.0, 1e-12, "base height");
                assert_close(v.a.hypot(v.b), 1.3, 1e-12, "circumradius");
            }
            let closed = base[p as usize - 1].rotate_about_origin(TAU / f64::from(p));
            assert!(closed.coord_distance(base[0]) <= 1e-12, "ring closure");
        }
    }

    #[test]
    fn square_tiling_second_vertex() {
        let x = 2.0f64.sqrt();
        let t = PrismTiling::build(4, 4, x).unwrap();
        let a2 = t.base_vertices()[1];
        assert_close(a2.a, 0.0, 1e-15, "A2.x");
        assert_close(a2.b, x, 1e-15, "A2.y");
        assert_close(a2.c, 0.0, 1e-15, "A2.z");
    }

    #[test]
    fn screw_is_a_downward_fibre_translation() {
        let t = PrismTiling::build(3, 6, 1.0).unwrap();
        let tau = t.tau();
        assert_close(tau.omega, 0.0, 1e-12, "tau angle");
        assert_close(tau.trans.x, 0.0, 1e-12, "tau x");
        assert_close(tau.trans.y, 0.0, 1e-12, "tau y");
        // height (sqrt3/2 + sqrt3/2)/2 = sqrt3/2, downward
        assert_close(tau.trans.z, -0.8660254037844386, 1e-12, "tau z");
    }

    #[test]
    fn fibre_displacement_matches_closed_form() {
        // |tau_z| = x^2 (sin(2pi/p) + sin(2pi/q)) / 2, derived from the
        // commutator geometry of the two rotations.
        for &(p, q) in &PAIRS {
            for &x in &[0.4, 1.0, 1.7, 2.3] {
                let t = PrismTiling::build(p, q, x).unwrap();
                let want = 0.5
                    * x
                    * x
                    * ((TAU / f64::from(p)).sin() + (TAU / f64::from(q)).sin());
                assert_close(t.fibre_displacement().abs(), want, 1e-10, "closed form height");
                assert!(t.fibre_displacement() < 0.0, "screw must move downward");
            }
        }
    }

    #[test]
    fn prism_height_is_the_fibre_gap() {
        for &(p, q) in &PAIRS {
            let t = PrismTiling::build(p, q, 1.1).unwrap();
            assert_close(
                t.prism_height().unwrap(),
                t.fibre_displacement().abs(),
                1e-10,
                "height vs displacement",
            );
        }
    }

    #[test]
    fn prism_volume_closed_forms() {
        // volume = K x^4 with K = (p/2) sin(2pi/p) * (sin(2pi/p) + sin(2pi/q))/2
        let cases = [(3u32, 6u32, 1.125), (4, 4, 2.0), (6, 3, 2.25)];
        for &(p, q, k) in &cases {
            for &x in &[0.7, 1.3, 2.0] {
                let t = PrismTiling::build(p, q, x).unwrap();
                assert_close(
                    t.prism_volume(),
                    k * x.powi(4),
                    1e-9 * x.powi(4),
                    "K x^4",
                );
            }
        }
        // frozen: the square tiling at x = sqrt2 has volume exactly 8
        let t = PrismTiling::build(4, 4, 2.0f64.sqrt()).unwrap();
        assert_close(t.prism_volume(), 8.0, 1e-10, "square cell volume");
    }

    #[test]
    fn top_face_is_the_screwed_base() {
        let t = PrismTiling::build(4, 4, 1.0).unwrap();
        let top = t.top_vertices();
        for (bottom, top) in t.base_vertices().iter().zip(&top) {
            assert_close(top.a, bottom.a, 1e-12, "top planar x");
            assert_close(top.b, bottom.b, 1e-12, "top planar y");
            assert_close(
                top.c - bottom.c,
                t.fibre_displacement(),
                1e-12,
                "top height offset",
            );
        }
    }

    #[test]
    fn relations_hold_on_random_points() {
        for &(p, q) in &PAIRS {
            for &x in &[0.8, 1.5] {
                let t = PrismTiling::build(p, q, x).unwrap();
                let report = t.verify_relations(50, 7);
                assert!(
                    report.max_deviation() <= 1e-10,
                    "({p},{q}) x={x}: {report:?}"
                );
            }
        }
    }

    #[test]
    fn neighbour_orbit_points_match_hand_values() {
        // image of the origin under ab (= under b; a fixes the origin)
        let t = PrismTiling::build(3, 6, 1.0).unwrap();
        let oab = t.gen_a().then(t.gen_b()).apply(NilPoint::ORIGIN);
        assert!(oab.coord_distance(NilPoint::new(0.5, 0.8660254037844387, -0.21650635094610965)) <= 1e-12);

        let t = PrismTiling::build(4, 4, 1.0).unwrap();
        let oab = t.gen_a().then(t.gen_b()).apply(NilPoint::ORIGIN);
        assert!(oab.coord_distance(NilPoint::new(1.0, 1.0, 0.0)) <= 1e-12);

        let t = PrismTiling::build(6, 3, 1.0).unwrap();
        let oab = t.gen_a().then(t.gen_b()).apply(NilPoint::ORIGIN);
        assert!(oab.coord_distance(NilPoint::new(1.5, 0.8660254037844387, 0.21650635094610965)) <= 1e-12);
    }

    #[test]
    fn orbit_excludes_origin_and_deduplicates() {
        let t = PrismTiling::build(4, 4, 2.0f64.sqrt()).unwrap();
        let orbit = t.orbit(4);
        let origin = NilPoint::ORIGIN;
        for o in &orbit {
            assert!(o.point.coord_distance(origin) > 1e-8, "origin leaked into orbit");
        }
        for (i, u) in orbit.iter().enumerate() {
            for v in &orbit[i + 1..] {
                assert!(
                    u.point.coord_distance(v.point) > 1e-8,
                    "duplicate orbit points {:?} {:?}",
                    u.point,
                    v.point
                );
            }
        }
    }

    #[test]
    fn orbit_depth_one_is_the_b_pair() {
        // a and a^-1 fix the origin, so depth 1 contributes exactly the
        // two b-rotation images.
        let t = PrismTiling::build(4, 4, 1.0).unwrap();
        let pts = t.orbit(1);
        assert_eq!(pts.len(), 2);
        for o in &pts {
            assert_eq!(o.word_length, 1);
        }
    }

    #[test]
    fn orbit_contains_the_screw_translates() {
        let x = 2.0f64.sqrt();
        let t = PrismTiling::build(4, 4, x).unwrap();
        let orbit = t.orbit(4);
        let down = NilPoint::new(0.0, 0.0, -2.0);
        let up = NilPoint::new(0.0, 0.0, 2.0);
        for target in [down, up] {
            assert!(
                orbit.iter().any(|o| o.point.coord_distance(target) <= 1e-9),
                "missing screw translate {target:?}"
            );
        }
    }

    #[test]
    fn orbit_is_sorted_by_distance() {
        let t = PrismTiling::build(6, 3, 1.2).unwrap();
        let orbit = t.orbit(4);
        let mut last = 0.0;
        let mut seen_none = false;
        for o in &orbit {
            match o.distance {
                Some(d) => {
                    assert!(!seen_none, "computable distance after a capped one");
                    assert!(d >= last - 1e-12, "distances not ascending");
                    last = d;
                }
                None => seen_none = true,
            }
        }
    }

    #[test]
    fn vertex_fibres_meet_q_prisms() {
        // going around a side edge: the base vertex ring of each of the
        // q prisms shares the fibre of A2; the fibre alignment entry of
        // the relation report is the direct witness
        for &(p, q) in &PAIRS {
            let t = PrismTiling::build(p, q, FRAC_PI_2).unwrap();
            let report = t.verify_relations(10, 3);
            assert!(report.fibre_alignment <= 1e-10);
        }
    }
}
