//! The rank-3 polar space as an explicit incidence structure.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{all_vectors, projective_span, Vector};
use crate::form::{Form, FormKind, FormSpec};

pub type PointId = u32;
pub type LineId = u32;
pub type PlaneId = u32;

pub const NONE: u32 = u32::MAX;

pub const CACHE_SCHEMA: &str = "geom/1";

/// Points, lines and planes of a polar space of rank 3 with lookup tables.
#[derive(Debug, Clone)]
pub struct PolarSpace {
    form: Form,
    points: Vec<Vector>,
    index: Vec<u32>,
    perp: Vec<FixedBitSet>,
    lines: Vec<Vec<PointId>>,
    planes: Vec<Vec<PointId>>,
    line_of_pair: Vec<LineId>,
    lines_through: Vec<Vec<LineId>>,
    planes_through_point: Vec<Vec<PlaneId>>,
    planes_through_line: Vec<Vec<PlaneId>>,
    lines_in_plane: Vec<Vec<LineId>>,
}

/// Counts gathered by a passing axiom check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomSummary {
    pub points: usize,
    pub lines: usize,
    pub planes: usize,
    pub incidence_tests: usize,
    pub min_planes_per_line: usize,
    pub min_lines_per_point: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeomCache {
    pub schema: String,
    pub form: FormSpec,
    pub q: u8,
    pub points: Vec<Vec<u8>>,
    pub lines: Vec<Vec<PointId>>,
    pub planes: Vec<Vec<PointId>>,
}

impl PolarSpace {
    /// Enumerate all singular points, lines and planes of the polar space of `spec`.
    pub fn build(spec: &FormSpec) -> Result<Self> {
        let form = spec.compile()?;
        let f = form.field().clone();
        let q = f.q();
        let dim = form.dim();

        let mut index = vec![NONE; (q as usize).pow(dim as u32)];
        let mut points = Vec::new();
        for v in all_vectors(q, dim) {
            if v.is_normalized() && form.is_singular(&v) {
                index[v.code(q)] = points.len() as u32;
                points.push(v);
            }
        }
        let n = points.len();

        let mut perp = vec![FixedBitSet::with_capacity(n); n];
        for x in 0..n {
            perp[x].insert(x);
            for y in (x + 1)..n {
                if form.bilinear(&points[x], &points[y]) == 0 {
                    perp[x].insert(y);
                    perp[y].insert(x);
                }
            }
        }

        let lookup = |v: &Vector| index[v.normalized(&f).code(q)];

        let mut line_of_pair = vec![NONE; n * n];
        let mut raw_lines: Vec<Vec<PointId>> = Vec::new();
        for x in 0..n {
            for y in perp[x].ones().filter(|&y| y > x) {
                if line_of_pair[x * n + y] != NONE {
                    continue;
                }
                let mut pts: Vec<PointId> = vec![x as u32, y as u32];
                for t in 1..q {
                    pts.push(lookup(&points[y].axpy(&f, t, &points[x])));
                }
                pts.sort_unstable();
                let id = raw_lines.len() as u32;
                for &a in &pts {
                    for &b in &pts {
                        if a != b {
                            line_of_pair[a as usize * n + b as usize] = id;
                        }
                    }
                }
                raw_lines.push(pts);
            }
        }
        raw_lines.sort();
        let lines = raw_lines;
        for (id, pts) in lines.iter().enumerate() {
            for &a in pts {
                for &b in pts {
                    if a != b {
                        line_of_pair[a as usize * n + b as usize] = id as u32;
                    }
                }
            }
        }

        let mut planes: Vec<Vec<PointId>> = Vec::new();
        let mut covered = FixedBitSet::with_capacity(n);
        for (lid, pts) in lines.iter().enumerate() {
            let (a, b) = (pts[0] as usize, pts[1] as usize);
            let mut cand = perp[a].clone();
            cand.intersect_with(&perp[b]);
            covered.clear();
            for &p in pts {
                covered.insert(p as usize);
            }
            for z in cand.ones() {
                if covered.contains(z) {
                    continue;
                }
                let span = projective_span(&f, &[points[a], points[b], points[z]]);
                let mut plane: Vec<PointId> = span.iter().map(&lookup).collect();
                plane.sort_unstable();
                for &p in &plane {
                    covered.insert(p as usize);
                }
                if line_of_pair[plane[0] as usize * n + plane[1] as usize] == lid as u32 {
                    planes.push(plane);
                }
            }
        }
        planes.sort();

        let mut lines_through = vec![Vec::new(); n];
        for (id, pts) in lines.iter().enumerate() {
            for &p in pts {
                lines_through[p as usize].push(id as u32);
            }
        }
        let mut planes_through_point = vec![Vec::new(); n];
        let mut planes_through_line = vec![Vec::new(); lines.len()];
        let mut lines_in_plane = vec![Vec::new(); planes.len()];
        for (id, pts) in planes.iter().enumerate() {
            for &p in pts {
                planes_through_point[p as usize].push(id as u32);
            }
            let mut ls: Vec<LineId> = Vec::new();
            for (i, &a) in pts.iter().enumerate() {
                for &b in &pts[i + 1..] {
                    ls.push(line_of_pair[a as usize * n + b as usize]);
                }
            }
            ls.sort_unstable();
            ls.dedup();
            for &l in &ls {
                planes_through_line[l as usize].push(id as u32);
            }
            lines_in_plane[id] = ls;
        }

        Ok(Self {
            form,
            points,
            index,
            perp,
            lines,
            planes,
            line_of_pair,
            lines_through,
            planes_through_point,
            planes_through_line,
            lines_in_plane,
        })
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn q(&self) -> u8 {
        self.form.field().q()
    }

    pub fn kind(&self) -> FormKind {
        self.form.kind()
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn num_planes(&self) -> usize {
        self.planes.len()
    }

    pub fn point(&self, id: PointId) -> &Vector {
        &self.points[id as usize]
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    /// Id of the point spanned by a nonzero vector, if it is singular.
    pub fn point_id(&self, v: &Vector) -> Option<PointId> {
        if v.is_zero() || v.len() != self.form.dim() {
            return None;
        }
        let id = self.index[v.normalized(self.form.field()).code(self.q())];
        (id != NONE).then_some(id)
    }

    /// Collinear or equal.
    #[inline]
    pub fn collinear(&self, x: PointId, y: PointId) -> bool {
        self.perp[x as usize].contains(y as usize)
    }

    #[inline]
    pub fn opposite(&self, x: PointId, y: PointId) -> bool {
        !self.collinear(x, y)
    }

    pub fn perp(&self, x: PointId) -> &FixedBitSet {
        &self.perp[x as usize]
    }

    pub fn adjacency(&self) -> &[FixedBitSet] {
        &self.perp
    }

    pub fn perp_set(&self, pts: &[PointId]) -> FixedBitSet {
        let mut acc = FixedBitSet::with_capacity(self.num_points());
        acc.insert_range(..);
        for &p in pts {
            acc.intersect_with(&self.perp[p as usize]);
        }
        acc
    }

    pub fn line(&self, id: LineId) -> &[PointId] {
        &self.lines[id as usize]
    }

    pub fn lines(&self) -> &[Vec<PointId>] {
        &self.lines
    }

    pub fn plane(&self, id: PlaneId) -> &[PointId] {
        &self.planes[id as usize]
    }

    pub fn planes(&self) -> &[Vec<PointId>] {
        &self.planes
    }

    pub fn line_through(&self, x: PointId, y: PointId) -> Option<LineId> {
        let id = self.line_of_pair[x as usize * self.num_points() + y as usize];
        (id != NONE).then_some(id)
    }

    pub fn lines_through(&self, x: PointId) -> &[LineId] {
        &self.lines_through[x as usize]
    }

    pub fn planes_through_point(&self, x: PointId) -> &[PlaneId] {
        &self.planes_through_point[x as usize]
    }

    pub fn planes_through_line(&self, l: LineId) -> &[PlaneId] {
        &self.planes_through_line[l as usize]
    }

    pub fn lines_in_plane(&self, pi: PlaneId) -> &[LineId] {
        &self.lines_in_plane[pi as usize]
    }

    pub fn line_contains(&self, l: LineId, x: PointId) -> bool {
        self.lines[l as usize].binary_search(&x).is_ok()
    }

    pub fn plane_contains(&self, pi: PlaneId, x: PointId) -> bool {
        self.planes[pi as usize].binary_search(&x).is_ok()
    }

    /// The plane spanned by a line and a point off it, if singular.
    pub fn plane_through(&self, l: LineId, x: PointId) -> Option<PlaneId> {
        self.planes_through_line[l as usize].iter().copied().find(|&pi| self.plane_contains(pi, x))
    }

    /// The plane spanned by three non-collinear pairwise collinear points.
    pub fn plane_of(&self, a: PointId, b: PointId, c: PointId) -> Option<PlaneId> {
        let l = self.line_through(a, b)?;
        if self.line_contains(l, c) {
            return None;
        }
        self.plane_through(l, c)
    }

    pub fn line_id(&self, pts: &[PointId]) -> Option<LineId> {
        if pts.len() != self.q() as usize + 1 {
            return None;
        }
        let l = self.line_through(pts[0], pts[1])?;
        let mut sorted = pts.to_vec();
        sorted.sort_unstable();
        (self.lines[l as usize] == sorted).then_some(l)
    }

    pub fn plane_id(&self, pts: &[PointId]) -> Option<PlaneId> {
        let mut sorted = pts.to_vec();
        sorted.sort_unstable();
        self.planes.binary_search(&sorted).ok().map(|i| i as u32)
    }

    /// Points of `l` collinear to `x`: one point, or all of `l`.
    pub fn points_on_line_collinear_to(&self, l: LineId, x: PointId) -> Vec<PointId> {
        self.lines[l as usize].iter().copied().filter(|&y| self.collinear(x, y)).collect()
    }

    /// The unique point of `l` collinear to `x`, if it is unique.
    pub fn proj_point_to_line(&self, x: PointId, l: LineId) -> Option<PointId> {
        let mut found = None;
        for &y in &self.lines[l as usize] {
            if self.collinear(x, y) {
                if found.is_some() {
                    return None;
                }
                found = Some(y);
            }
        }
        found
    }

    /// Two lines are opposite when no point of one is collinear to all of the other.
    pub fn lines_opposite(&self, k: LineId, m: LineId) -> bool {
        self.lines[k as usize].iter().all(|&x| self.proj_point_to_line(x, m).is_some())
            && self.lines[m as usize].iter().all(|&x| self.proj_point_to_line(x, k).is_some())
    }

    pub fn cache(&self) -> GeomCache {
        GeomCache {
            schema: CACHE_SCHEMA.into(),
            form: self.form.spec().clone(),
            q: self.q(),
            points: self.points.iter().map(|v| v.as_slice().to_vec()).collect(),
            lines: self.lines.clone(),
            planes: self.planes.clone(),
        }
    }

    pub fn to_cache_json(&self) -> String {
        serde_json::to_string(&self.cache()).expect("cache serialization")
    }

    /// Load a cache, validating it against a fresh build of its form.
    pub fn from_cache_json(s: &str) -> Result<Self> {
        let cache: GeomCache = serde_json::from_str(s).map_err(|e| Error::Cache(format!("unparsable cache: {e}")))?;
        if cache.schema != CACHE_SCHEMA {
            return Err(Error::Cache(format!("schema {} is not {CACHE_SCHEMA}", cache.schema)));
        }
        if cache.q != cache.form.q {
            return Err(Error::Cache("field order disagrees with form".into()));
        }
        let built = Self::build(&cache.form).map_err(|e| Error::Cache(format!("cached form invalid: {e}")))?;
        if built.cache() != cache {
            return Err(Error::Cache("cached tables differ from the rebuilt geometry".into()));
        }
        Ok(built)
    }

    /// Bit-exact agreement between the adjacency table and the form.
    pub fn check_form_agreement(&self) -> Result<usize> {
        let n = self.num_points();
        let mut tests = 0;
        for x in 0..n {
            for y in 0..n {
                tests += 1;
                let form_says = self.form.bilinear(&self.points[x], &self.points[y]) == 0;
                if form_says != self.perp[x].contains(y) {
                    return Err(Error::AxiomViolation {
                        point: x as u32,
                        line: NONE,
                        reason: format!("adjacency disagrees with the form at ({x}, {y})"),
                    });
                }
            }
        }
        Ok(tests)
    }
}

/// One-or-all axiom, partial linearity and thickness over the tables of `geom`.
pub fn axiom_check(geom: &PolarSpace) -> Result<AxiomSummary> {
    axiom_check_adjacency(geom, geom.adjacency())
}

/// As [`axiom_check`], but with the collinearity relation taken from `adj`.
pub fn axiom_check_adjacency(geom: &PolarSpace, adj: &[FixedBitSet]) -> Result<AxiomSummary> {
    let n = geom.num_points();
    let q = geom.q() as usize;
    let violation = |point: usize, line: u32, reason: String| Error::AxiomViolation {
        point: point as u32,
        line,
        reason,
    };
    let mut tests = 0usize;

    for x in 0..n {
        if !adj[x].contains(x) {
            return Err(violation(x, NONE, "point not in its own perp".into()));
        }
        if adj[x].count_ones(..) == n {
            return Err(violation(x, NONE, "perp is the whole point set".into()));
        }
        for (lid, pts) in geom.lines().iter().enumerate() {
            tests += 1;
            let c = pts.iter().filter(|&&y| adj[x].contains(y as usize)).count();
            if c == 0 {
                return Err(violation(x, lid as u32, "perp misses the line".into()));
            }
            if c != 1 && c != q + 1 {
                return Err(violation(x, lid as u32, format!("perp meets the line in {c} points")));
            }
        }
    }

    for x in 0..n {
        for y in adj[x].ones() {
            if !adj[y].contains(x) {
                return Err(violation(x, NONE, format!("adjacency not symmetric at {y}")));
            }
            if x == y {
                continue;
            }
            let Some(l) = geom.line_through(x as u32, y as u32) else {
                return Err(violation(x, NONE, format!("collinear pair with {y} has no line")));
            };
            let containing = geom.lines_through(x as u32).iter().filter(|&&m| geom.line_contains(m, y as u32)).count();
            if containing != 1 {
                return Err(violation(x, l, format!("{containing} lines through the pair with {y}")));
            }
        }
    }

    for (lid, pts) in geom.lines().iter().enumerate() {
        if pts.len() != q + 1 {
            return Err(violation(pts[0] as usize, lid as u32, "wrong line size".into()));
        }
        for &a in pts {
            for &b in pts {
                if !adj[a as usize].contains(b as usize) {
                    return Err(violation(a as usize, lid as u32, format!("line points {a}, {b} not collinear")));
                }
            }
        }
    }

    let mut min_planes = usize::MAX;
    for lid in 0..geom.num_lines() {
        let k = geom.planes_through_line(lid as u32).len();
        min_planes = min_planes.min(k);
        if k < 3 {
            return Err(violation(geom.line(lid as u32)[0] as usize, lid as u32, format!("line lies in {k} planes")));
        }
    }
    let plane_size = q * q + q + 1;
    for (pid, pts) in geom.planes().iter().enumerate() {
        if pts.len() != plane_size {
            return Err(violation(pts[0] as usize, NONE, format!("plane {pid} has {} points", pts.len())));
        }
        let mut common = FixedBitSet::with_capacity(n);
        common.insert_range(..);
        for &a in pts {
            common.intersect_with(&adj[a as usize]);
        }
        if common.count_ones(..) != plane_size {
            return Err(violation(pts[0] as usize, NONE, format!("plane {pid} is not a maximal singular subspace")));
        }
    }
    let min_lines = (0..n).map(|x| geom.lines_through(x as u32).len()).min().unwrap_or(0);

    Ok(AxiomSummary {
        points: n,
        lines: geom.num_lines(),
        planes: geom.num_planes(),
        incidence_tests: tests,
        min_planes_per_line: min_planes,
        min_lines_per_point: min_lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w52() -> PolarSpace {
        PolarSpace::build(&FormSpec::symplectic(2)).unwrap()
    }

    #[test]
    fn ids_are_lexicographic() {
        let g = w52();
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert!(g.points().iter().all(|v| v.is_normalized()));
        for (i, v) in g.points().iter().enumerate() {
            assert_eq!(g.point_id(v), Some(i as u32));
        }
    }

    #[test]
    fn perp_sizes_w52() {
        let g = w52();
        for x in 0..g.num_points() as u32 {
            assert_eq!(g.perp(x).count_ones(..), 31);
            assert!(g.collinear(x, x));
        }
    }

    #[test]
    fn perp_of_line_is_union_of_planes_through_it() {
        let g = w52();
        for lid in 0..g.num_lines() as u32 {
            let perp = g.perp_set(g.line(lid));
            let mut union: Vec<u32> = g.planes_through_line(lid).iter().flat_map(|&p| g.plane(p).to_vec()).collect();
            union.sort_unstable();
            union.dedup();
            let perp: Vec<u32> = perp.ones().map(|x| x as u32).collect();
            assert_eq!(perp, union);
        }
    }

    #[test]
    fn opposite_pair_perp_has_fifteen_points() {
        let g = w52();
        let b = (1..63).find(|&b| g.opposite(0, b)).unwrap();
        assert_eq!(g.perp_set(&[0, b]).count_ones(..), 15);
    }

    #[test]
    fn flipped_bit_is_caught() {
        let g = w52();
        let y = (1..63).find(|&y| g.opposite(0, y)).unwrap() as usize;
        let mut adj = g.adjacency().to_vec();
        adj[0].insert(y);
        assert!(matches!(axiom_check_adjacency(&g, &adj), Err(Error::AxiomViolation { .. })));

        let z = (1..63).find(|&z| g.collinear(0, z)).unwrap() as usize;
        let mut adj = g.adjacency().to_vec();
        adj[z].set(0, false);
        assert!(matches!(axiom_check_adjacency(&g, &adj), Err(Error::AxiomViolation { .. })));
    }

    #[test]
    fn cache_round_trip_and_corruption() {
        let g = w52();
        let json = g.to_cache_json();
        assert_eq!(json, w52().to_cache_json());
        let back = PolarSpace::from_cache_json(&json).unwrap();
        assert_eq!(back.num_lines(), 315);
        let corrupted = json.replacen("[0,0,0,0,0,1]", "[0,0,0,0,1,1]", 1);
        assert!(matches!(PolarSpace::from_cache_json(&corrupted), Err(Error::Cache(_))));
        assert!(matches!(PolarSpace::from_cache_json("{not json"), Err(Error::Cache(_))));
    }
}
