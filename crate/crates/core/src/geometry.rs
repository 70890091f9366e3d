//! Point configurations: reconstruction from unlabeled squared distances,
//! embedding of labeled distance matrices, and comparison modulo rigid
//! motions (rotations, reflections, translations) and relabeling.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{svd, symmetric_eigen, Matrix};
use crate::scalar::{compensated_sum, Real};

fn cmp<T: Real>(a: &T, b: &T) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

/// `k` labeled points in `R^d`; label `i` is the index.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig<T> {
    points: Vec<Vec<T>>,
}

impl<T: Real> PointConfig<T> {
    pub fn new(points: Vec<Vec<T>>) -> Result<Self> {
        let d = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::Shape("no points".into()))?;
        if d == 0 {
            return Err(Error::Shape("points have no coordinates".into()));
        }
        if let Some(p) = points.iter().find(|p| p.len() != d) {
            return Err(Error::Dimension {
                expected: d,
                got: p.len(),
            });
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Shape("non-finite coordinate".into()));
        }
        Ok(PointConfig { points })
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn d(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Vec<T>> {
        self.points
    }

    /// Euclidean squared distances between all pairs.
    pub fn sq_distances(&self) -> Matrix<T> {
        let k = self.k();
        Matrix::from_fn(k, k, |i, j| sq_dist(&self.points[i], &self.points[j]))
    }

    pub fn distance_multiset(&self) -> DistanceMultiset<T> {
        let mut values = Vec::with_capacity(self.k() * (self.k() - 1) / 2);
        for i in 0..self.k() {
            for j in i + 1..self.k() {
                values.push(sq_dist(&self.points[i], &self.points[j]));
            }
        }
        values.sort_by(cmp);
        DistanceMultiset { values, k: self.k() }
    }

    /// Applies `x ↦ Q x + shift` to every point.
    pub fn transformed(&self, q: &Matrix<T>, shift: &[T]) -> Self {
        PointConfig {
            points: self
                .points
                .iter()
                .map(|p| q.matvec(p).into_iter().zip(shift).map(|(x, &s)| x + s).collect())
                .collect(),
        }
    }

    /// Point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        PointConfig {
            points: perm.iter().map(|&p| self.points[p].clone()).collect(),
        }
    }

    pub fn cast<U: Real>(&self) -> PointConfig<U> {
        PointConfig {
            points: self
                .points
                .iter()
                .map(|p| p.iter().map(|&x| crate::model::cast_scalar(x)).collect())
                .collect(),
        }
    }
}

/// Unlabeled squared distances of `k` points, stored ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMultiset<T> {
    values: Vec<T>,
    k: usize,
}

impl<T: Real> DistanceMultiset<T> {
    /// Requires `k(k−1)/2` finite values for some integer `k ≥ 1`.
    pub fn new(mut values: Vec<T>) -> Result<Self> {
        let m = values.len();
        let k = (1..).find(|k| k * (k - 1) / 2 >= m).unwrap_or(1);
        if k * (k - 1) / 2 != m {
            return Err(Error::Shape(format!("{m} values is not a triangular count")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("non-finite distance".into()));
        }
        values.sort_by(cmp);
        Ok(DistanceMultiset { values, k })
    }

    /// Like [`DistanceMultiset::new`], additionally requiring positive values.
    pub fn euclidean(values: Vec<T>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(**v > T::zero())) {
            return Err(Error::Domain(format!("squared distance {v} is not positive")));
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> Option<T> {
        self.values.last().copied()
    }

    /// Largest entrywise gap after sorting, or `None` on a size mismatch.
    pub fn max_gap(&self, other: &Self) -> Option<T> {
        (self.len() == other.len()).then(|| {
            self.values
                .iter()
                .zip(&other.values)
                .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs()))
        })
    }
}

/// Options for [`reconstruct_unlabeled`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Matching tolerance relative to the largest distance.
    pub tol: f64,
    /// Maximum number of search nodes.
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            tol: 1e-6,
            budget: 10_000_000,
        }
    }
}

/// A configuration together with the multiset slot used by each pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution<T> {
    pub config: PointConfig<T>,
    /// `slots[i][j]` (for `i ≠ j`) indexes the sorted multiset value that
    /// realizes the pair; the diagonal is `usize::MAX`.
    pub slots: Vec<Vec<usize>>,
}

impl<T> Solution<T> {
    /// `(i, j, slot)` for `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize, usize)> {
        let k = self.slots.len();
        let mut out = Vec::with_capacity(k * k.saturating_sub(1) / 2);
        for i in 0..k {
            for j in i + 1..k {
                out.push((i, j, self.slots[i][j]));
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<T> {
    /// Pairwise non-congruent solutions, in discovery order.
    pub solutions: Vec<Solution<T>>,
    /// Search nodes visited (see [`reconstruct_unlabeled`]).
    pub nodes: u64,
    /// False when the budget ran out before the search finished.
    pub complete: bool,
}

/// Rebuilds point configurations in `R^d` whose squared-distance multiset
/// matches `ms` within `opts.tol · max(ms)` per entry.
///
/// Branch and prune over assignments of multiset values to pairs. Point 0
/// sits at the origin and point 1 at `(√δ_min, 0, …)`, using the smallest
/// value. Each later point is labeled by the rule of [`Search::place`] and
/// located by intersecting spheres around placed points: the feasible set
/// is kept as a sphere inside an affine subspace, and the placed point
/// whose distance range over it admits the fewest unused values is
/// branched on next. A range with no admissible value prunes the branch.
/// When the placed points do not span `R^d` the new point is put on the
/// next free axis; otherwise the two mirror positions are tried and the
/// remaining distances are looked up in the multiset. Solutions congruent
/// to an earlier one are dropped.
///
/// A search node is one branch: a starting sphere, a refinement that left
/// a nonempty feasible set, or a lookup hit. When `opts.budget` nodes are
/// used up the search stops; solutions found so far are returned with
/// `complete = false`, and [`Error::Budget`] is raised if there are none.
pub fn reconstruct_unlabeled<T: Real>(
    ms: &DistanceMultiset<T>,
    d: usize,
    opts: &SearchOptions,
) -> Result<Reconstruction<T>> {
    if d == 0 {
        return Err(Error::Dimension { expected: 1, got: 0 });
    }
    if let Some(v) = ms.values.iter().find(|v| !(**v > T::zero())) {
        return Err(Error::Domain(format!("squared distance {v} is not positive")));
    }
    let k = ms.k;
    if k == 1 {
        return Ok(Reconstruction {
            solutions: vec![Solution {
                config: PointConfig {
                    points: vec![vec![T::zero(); d]],
                },
                slots: vec![vec![usize::MAX]],
            }],
            nodes: 0,
            complete: true,
        });
    }
    let m = ms.len();
    let dmax = ms.values[m - 1];
    let tol = T::lit(opts.tol) * dmax;
    let mut s = Search {
        vals: &ms.values,
        used: vec![false; m],
        k,
        d,
        tol,
        dedup_tol: T::lit(opts.tol).sqrt() * dmax.sqrt(),
        budget: opts.budget,
        nodes: 0,
        exhausted: false,
        points: Vec::with_capacity(k),
        span: 1,
        lb: vec![T::zero(); k],
        slots: vec![vec![FREE; k]; k],
        scratch: Vec::new(),
        pool: Vec::new(),
        spare: Vec::new(),
        solutions: Vec::new(),
    };
    s.used[0] = true;
    s.slots[0][1] = 0;
    s.slots[1][0] = 0;
    s.points.push(vec![T::zero(); d]);
    let mut p1 = vec![T::zero(); d];
    p1[0] = ms.values[0].sqrt();
    s.points.push(p1);
    s.place();
    if s.solutions.is_empty() {
        return Err(if s.exhausted {
            Error::Budget(opts.budget)
        } else {
            Error::Infeasible
        });
    }
    Ok(Reconstruction {
        solutions: s.solutions,
        nodes: s.nodes,
        complete: !s.exhausted,
    })
}

/// Feasible set of a point being located: the sphere of squared radius
/// `rho2` around `c` inside the affine space `c + span(e)`. The `m` rows of
/// `e` (each of length `d`, stored flat) are orthonormal. `g` and `w` are
/// scratch space reused by [`Shell::refine_into`].
#[derive(Clone)]
struct Shell<T> {
    c: Vec<T>,
    e: Vec<T>,
    m: usize,
    rho2: T,
    g: Vec<T>,
    w: Vec<T>,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

impl<T: Real> Shell<T> {
    fn sphere(center: &[T], r2: T) -> Self {
        let d = center.len();
        let mut e = vec![T::zero(); d * d];
        for i in 0..d {
            e[i * d + i] = T::one();
        }
        Shell {
            c: center.to_vec(),
            e,
            m: d,
            rho2: r2,
            g: Vec::with_capacity(d),
            w: Vec::with_capacity(d),
        }
    }

    fn axis(&self, r: usize) -> &[T] {
        let d = self.c.len();
        &self.e[r * d..(r + 1) * d]
    }

    fn rho(&self) -> T {
        self.rho2.max(T::zero()).sqrt()
    }

    /// Components of `c − p` along the rows of `e`, written to `g`, and
    /// `|c − p|²`.
    fn project(&self, p: &[T], g: &mut [T]) -> T {
        let d = self.c.len();
        let mut vv = T::zero();
        for l in 0..d {
            let v = self.c[l] - p[l];
            vv += v * v;
        }
        for (r, gr) in g.iter_mut().enumerate().take(self.m) {
            let e = &self.e[r * d..(r + 1) * d];
            *gr = (0..d).fold(T::zero(), |acc, l| acc + e[l] * (self.c[l] - p[l]));
        }
        vv
    }

    /// Interval `(mid, half)` of squared distances to `p` over the shell.
    fn range(&self, p: &[T], g: &mut [T]) -> (T, T) {
        let vv = self.project(p, g);
        let gg = dot(&g[..self.m], &g[..self.m]);
        (vv + self.rho2, T::lit(2.0) * self.rho() * gg.sqrt())
    }

    /// Writes to `out` the intersection with the sphere of squared radius
    /// `delta` around `p`; false if it is empty.
    fn refine_into(&self, p: &[T], delta: T, tol: T, out: &mut Shell<T>) -> bool {
        let d = self.c.len();
        let m = self.m;
        out.g.clear();
        out.g.resize(m, T::zero());
        let vv = self.project(p, &mut out.g);
        let gn2 = dot(&out.g, &out.g);
        if gn2 == T::zero() {
            return false;
        }
        let beta = (delta - vv - self.rho2) / T::lit(2.0);
        let rho2 = self.rho2 - beta * beta / gn2;
        if rho2 < -tol {
            return false;
        }
        let gn = gn2.sqrt();
        out.c.clear();
        out.c.extend_from_slice(&self.c);
        out.w.clear();
        out.w.resize(d, T::zero());
        for r in 0..m {
            let e = self.axis(r);
            let (a, b) = (beta / gn2 * out.g[r], out.g[r] / gn);
            for l in 0..d {
                out.c[l] += a * e[l];
                out.w[l] += b * e[l];
            }
        }
        // basis of span(e) ∩ w⊥: drop the row most aligned with w, project
        // the others and orthonormalize
        let mut drop = 0;
        for r in 1..m {
            if out.g[r].abs() > out.g[drop].abs() {
                drop = r;
            }
        }
        out.e.clear();
        for (rows, r) in (0..m).filter(|&r| r != drop).enumerate() {
            let row = self.axis(r);
            let a = dot(row, &out.w);
            let start = out.e.len();
            out.e.extend(row.iter().zip(&out.w).map(|(&x, &y)| x - a * y));
            let (head, u) = out.e.split_at_mut(start);
            for q in 0..rows {
                let prev = &head[q * d..(q + 1) * d];
                let b = dot(u, prev);
                for (x, &y) in u.iter_mut().zip(prev) {
                    *x -= b * y;
                }
            }
            let n = dot(u, u).sqrt();
            if n == T::zero() {
                return false;
            }
            u.iter_mut().for_each(|x| *x /= n);
        }
        out.m = m - 1;
        out.rho2 = rho2;
        true
    }
}

struct Search<'a, T> {
    vals: &'a [T],
    used: Vec<bool>,
    k: usize,
    d: usize,
    tol: T,
    dedup_tol: T,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    points: Vec<Vec<T>>,
    /// Dimension of the affine span of the placed points; they lie in the
    /// span of the first `span` axes.
    span: usize,
    /// Lower bounds on squared distances from each placed point to points
    /// placed later.
    lb: Vec<T>,
    slots: Vec<Vec<usize>>,
    scratch: Vec<T>,
    /// Spare shells, reused across refinements.
    pool: Vec<Shell<T>>,
    /// Spare coordinate buffers.
    spare: Vec<Vec<T>>,
    solutions: Vec<Solution<T>>,
}

const FREE: usize = usize::MAX;

impl<T: Real> Search<'_, T> {
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.exhausted = true;
        }
        !self.exhausted
    }

    fn take(&mut self, slot: usize, a: usize, b: usize) {
        self.used[slot] = true;
        self.slots[a][b] = slot;
        self.slots[b][a] = slot;
    }

    fn give_back(&mut self, slot: usize, a: usize, b: usize) {
        self.used[slot] = false;
        self.slots[a][b] = FREE;
        self.slots[b][a] = FREE;
    }

    /// Next unused slot in `from..to` whose value differs from `prev`.
    fn next_distinct(&self, from: usize, to: usize, prev: Option<usize>) -> Option<usize> {
        (from..to).find(|&s| !self.used[s] && prev.is_none_or(|p| self.vals[p] != self.vals[s]))
    }

    fn count_distinct(&self, from: usize, to: usize) -> usize {
        let mut n = 0;
        let mut prev = None;
        let mut s = from;
        while let Some(x) = self.next_distinct(s, to, prev) {
            n += 1;
            prev = Some(x);
            s = x + 1;
        }
        n
    }

    /// Slot range holding the values in `[lo − tol, hi + tol]` that pairs
    /// with placed point `j` may still take.
    fn window(&self, j: usize, lo: T, hi: T) -> (usize, usize) {
        let lo = lo.max(self.lb[j]) - self.tol;
        let hi = hi + self.tol;
        let a = self.vals.partition_point(|v| *v < lo);
        let b = self.vals.partition_point(|v| *v <= hi);
        (a, b.max(a))
    }

    /// Whether enough unused values remain above the lower bounds for every
    /// pair between the `t` placed points and the unplaced ones.
    fn bounds_feasible(&self, t: usize) -> bool {
        let per = self.k - t;
        let mut lbs: Vec<T> = self.lb[..t].to_vec();
        lbs.sort_by(|a, b| cmp(b, a));
        let mut need = 0;
        for lb in lbs {
            need += per;
            let from = self.vals.partition_point(|v| *v < lb - self.tol);
            let have = (from..self.vals.len()).filter(|&s| !self.used[s]).count();
            if have < need {
                return false;
            }
        }
        true
    }

    /// Places point `t = self.points.len()`.
    ///
    /// Let `S` be the smallest unused value. If `S` joins a placed point
    /// `i` to an unplaced one, that point is labeled `t` and `(i, t)` takes
    /// `S`. Otherwise `t` is the unplaced point nearest to the placed set,
    /// at squared distance `s > S` from its nearest placed point `i`; from
    /// then on every pair between a point placed before `t` and a later
    /// point is at least `s`. Either way the labels of points `2 … k−1`
    /// are fixed up to ties.
    fn place(&mut self) {
        let t = self.points.len();
        if t == self.k {
            self.record();
            return;
        }
        let Some(low) = self.next_distinct(0, self.vals.len(), None) else {
            return;
        };
        for i in 0..t {
            if self.vals[low] < self.lb[i] - self.tol {
                continue;
            }
            self.take(low, i, t);
            self.locate(t, i);
            self.give_back(low, i, t);
            if self.exhausted {
                return;
            }
        }
        if t + 1 >= self.k {
            return;
        }
        let end = self.vals.len();
        let mut prev = Some(low);
        let mut from = low + 1;
        while let Some(s) = self.next_distinct(from, end, prev) {
            prev = Some(s);
            from = s + 1;
            let v = self.vals[s];
            let saved = self.lb.clone();
            for j in 0..t {
                self.lb[j] = self.lb[j].max(v);
            }
            if !self.bounds_feasible(t) {
                // larger values only raise the bounds further
                self.lb = saved;
                return;
            }
            for i in 0..t {
                self.take(s, i, t);
                self.locate(t, i);
                self.give_back(s, i, t);
                if self.exhausted {
                    break;
                }
            }
            self.lb = saved;
            if self.exhausted {
                return;
            }
        }
    }

    /// Starts the feasible set of point `t` from its assigned distance to
    /// `partner`.
    fn locate(&mut self, t: usize, partner: usize) {
        if !self.tick() {
            return;
        }
        let shell = Shell::sphere(&self.points[partner], self.vals[self.slots[partner][t]]);
        self.narrow(t, &shell);
    }

    /// Intersects the feasible set with the spheres of the remaining placed
    /// points, most constrained first. Every unassigned pair must keep at
    /// least one candidate value in range.
    fn narrow(&mut self, t: usize, shell: &Shell<T>) {
        if shell.m <= 1 || shell.rho2 <= self.tol {
            self.settle(t, shell);
            return;
        }
        let mut g = std::mem::take(&mut self.scratch);
        g.resize(self.d, T::zero());
        // (ref, slot range, candidate count, range within tolerance)
        let mut best: Option<(usize, usize, usize, usize, bool)> = None;
        let mut dead = false;
        for j in 0..t {
            if self.slots[j][t] != FREE {
                continue;
            }
            let (mid, half) = shell.range(&self.points[j], &mut g);
            let (a, b) = self.window(j, mid - half, mid + half);
            let n = self.count_distinct(a, b);
            if n == 0 {
                dead = true;
                break;
            }
            let check = half <= self.tol;
            let better = match best {
                None => true,
                Some((_, _, _, bn, bc)) => (check && !bc) || (check == bc && n < bn),
            };
            if better {
                best = Some((j, a, b, n, check));
            }
        }
        self.scratch = g;
        if dead {
            return;
        }
        let Some((j, a, b, _, check)) = best else {
            self.settle(t, shell);
            return;
        };
        let mut child = self.pool.pop().unwrap_or_else(|| Shell::sphere(&shell.c, T::zero()));
        let mut prev = None;
        let mut from = a;
        while let Some(s) = self.next_distinct(from, b, prev) {
            prev = Some(s);
            from = s + 1;
            let next = if check {
                shell
            } else if shell.refine_into(&self.points[j], self.vals[s], self.tol, &mut child) {
                &child
            } else {
                continue;
            };
            if !self.tick() {
                break;
            }
            self.take(s, j, t);
            self.narrow(t, next);
            self.give_back(s, j, t);
            if self.exhausted {
                break;
            }
        }
        self.pool.push(child);
    }

    /// Turns the feasible set into concrete positions: a point, a mirror
    /// pair, or (when the placed points do not span `R^d`) the point on
    /// the next free axis.
    fn settle(&mut self, t: usize, shell: &Shell<T>) {
        let rho = shell.rho();
        if shell.rho2 <= self.tol || shell.m == 0 {
            let mut x = self.spare.pop().unwrap_or_default();
            x.clear();
            x.extend_from_slice(&shell.c);
            self.finish(t, x, false);
            return;
        }
        let open = (0..t).any(|j| self.slots[j][t] == FREE);
        if self.span < self.d && !open {
            // gauge: rotations fixing the placed points act transitively
            // on the feasible sphere
            let r = self.span;
            let mut dir = vec![T::zero(); self.d];
            for q in 0..shell.m {
                let e = shell.axis(q);
                for (x, &y) in dir.iter_mut().zip(e) {
                    *x += e[r] * y;
                }
            }
            let n = dot(&dir, &dir).sqrt();
            if n < T::lit(0.5) {
                dir = shell.axis(0).to_vec();
            } else {
                dir.iter_mut().for_each(|x| *x /= n);
            }
            let mut x = self.spare.pop().unwrap_or_default();
            x.clear();
            x.extend(shell.c.iter().zip(&dir).map(|(&c, &u)| c + rho * u));
            self.finish(t, x, true);
            return;
        }
        let u = shell.axis(0);
        for sg in [T::one(), -T::one()] {
            let mut x = self.spare.pop().unwrap_or_default();
            x.clear();
            x.extend(shell.c.iter().zip(u).map(|(&c, &v)| c + sg * rho * v));
            self.finish(t, x, false);
            if self.exhausted {
                return;
            }
        }
    }

    /// Checks the assigned pairs of the new point, looks up the others in
    /// the multiset, then recurses to the next point.
    fn finish(&mut self, t: usize, x: Vec<T>, extends: bool) {
        let fits = (0..t).all(|i| {
            let s = self.slots[i][t];
            s == FREE || (sq_dist(&self.points[i], &x) - self.vals[s]).abs() <= self.tol
        });
        if !fits {
            self.spare.push(x);
            return;
        }
        self.points.push(x);
        if extends {
            self.span += 1;
        }
        self.lookup_from(t, 0);
        if extends {
            self.span -= 1;
        }
        if let Some(x) = self.points.pop() {
            self.spare.push(x);
        }
    }

    /// Assigns multiset slots to the unassigned pairs `(i, t)` with
    /// `i ≥ from`.
    fn lookup_from(&mut self, t: usize, from: usize) {
        let Some(i) = (from..t).find(|&i| self.slots[i][t] == FREE) else {
            self.place();
            return;
        };
        let target = sq_dist(&self.points[i], &self.points[t]);
        let (a, b) = self.window(i, target, target);
        let mut prev = None;
        let mut next = a;
        while let Some(s) = self.next_distinct(next, b, prev) {
            prev = Some(s);
            next = s + 1;
            if !self.tick() {
                return;
            }
            self.take(s, i, t);
            self.lookup_from(t, i + 1);
            self.give_back(s, i, t);
            if self.exhausted {
                return;
            }
        }
    }

    fn record(&mut self) {
        let config = PointConfig {
            points: self.points.clone(),
        };
        let regenerated = config.distance_multiset();
        let sound = regenerated
            .values
            .iter()
            .zip(self.vals)
            .all(|(a, b)| (*a - *b).abs() <= self.tol);
        if !sound {
            return;
        }
        let duplicate = self
            .solutions
            .iter()
            .any(|s| shape_distance(&s.config, &config).is_ok_and(|r| r <= self.dedup_tol));
        if !duplicate {
            self.solutions.push(Solution {
                config,
                slots: self.slots.clone(),
            });
        }
    }
}

/// Classical embedding of a labeled squared-distance matrix.
///
/// The Gram matrix `G_ij = (δ_0i + δ_0j − δ_ij) / 2` is anchored at point 0.
/// With signature `(p, q)` the coordinates use the `p` largest positive and
/// `q` most negative eigenpairs, scaled by `√|λ|`, so that the diagonal form
/// with `p` plus signs then `q` minus signs reproduces the distances.
/// Eigenvalues below `tol · max|λ|` count as zero; any other eigenvalue
/// left out (including a negative one when `q = 0`) is an error.
pub fn embed_labeled<T: Real>(
    sqdist: &Matrix<T>,
    d: usize,
    signature: (usize, usize),
    tol: f64,
) -> Result<PointConfig<T>> {
    let k = sqdist.rows();
    if k == 0 || sqdist.cols() != k {
        return Err(Error::Shape(format!("{}×{} distance matrix", k, sqdist.cols())));
    }
    let (p, q) = signature;
    if p + q != d {
        return Err(Error::Dimension {
            expected: d,
            got: p + q,
        });
    }
    let scale = sqdist.max_abs();
    let sym_tol = T::lit(1e-12) * scale.max(T::one());
    if !sqdist.is_symmetric(sym_tol) || (0..k).any(|i| sqdist[(i, i)].abs() > sym_tol) {
        return Err(Error::Shape(
            "distance matrix must be symmetric with zero diagonal".into(),
        ));
    }
    let g = Matrix::from_fn(k, k, |i, j| {
        (sqdist[(0, i)] + sqdist[(0, j)] - sqdist[(i, j)]) / T::lit(2.0)
    });
    let (values, vectors) = symmetric_eigen(&g);
    let lmax = values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let cut = T::lit(tol) * lmax.max(T::min_positive_value());
    // values are descending: positives at the front, negatives at the back
    let pos: Vec<usize> = (0..k).filter(|&i| values[i] > cut).collect();
    let neg: Vec<usize> = (0..k).rev().filter(|&i| values[i] < -cut).collect();
    if neg.len() > q {
        return Err(Error::NotEmbeddable(format!(
            "eigenvalue {} is negative beyond tolerance",
            values[neg[q]]
        )));
    }
    if pos.len() > p {
        return Err(Error::NotEmbeddable(format!(
            "{} significant positive eigenvalues exceed {p} dimensions",
            pos.len()
        )));
    }
    let mut points = vec![vec![T::zero(); d]; k];
    for (axis, &e) in pos.iter().enumerate() {
        let s = values[e].sqrt();
        for (i, pt) in points.iter_mut().enumerate() {
            pt[axis] = s * vectors[(i, e)];
        }
    }
    for (n, &e) in neg.iter().enumerate() {
        let s = (-values[e]).sqrt();
        for (i, pt) in points.iter_mut().enumerate() {
            pt[p + n] = s * vectors[(i, e)];
        }
    }
    // anchor point 0 at the origin exactly
    let origin = points[0].clone();
    for pt in &mut points {
        for (x, o) in pt.iter_mut().zip(&origin) {
            *x -= *o;
        }
    }
    PointConfig::new(points)
}

/// Best rigid alignment of two labeled configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct Alignment<T> {
    /// Root-mean-square distance between `Q a_i + t` and `b_{σ(i)}`.
    pub rms: T,
    /// Orthogonal `Q`, possibly a reflection.
    pub rotation: Matrix<T>,
    pub translation: Vec<T>,
    /// `σ`: point `i` of `A` matches point `permutation[i]` of `B`.
    pub permutation: Vec<usize>,
}

/// Largest `k` for which every compatible permutation is tried when the
/// distance profiles do not single out a matching.
pub const EXHAUSTIVE_LIMIT: usize = 8;

/// Minimizes the rms point distance between `A` and `B` over orthogonal
/// maps, translations and permutations.
pub fn align<T: Real>(a: &PointConfig<T>, b: &PointConfig<T>) -> Result<Alignment<T>> {
    align_with(a, b, |_, _| true)
}

/// [`align`] restricted to permutations with `compatible(i, σ(i))` for
/// every `i`.
///
/// Candidates are searched in two passes. First only matchings whose
/// sorted distance-to-others profiles agree (relative `1e-6`) are tried;
/// if none exists, every permutation is tried for `k ≤ 8` and a greedy
/// nearest-profile matching is used above that.
pub fn align_with<T: Real, F>(a: &PointConfig<T>, b: &PointConfig<T>, compatible: F) -> Result<Alignment<T>>
where
    F: Fn(usize, usize) -> bool,
{
    if a.k() != b.k() || a.d() != b.d() {
        return Err(Error::Shape(format!(
            "cannot align {} points in R^{} with {} points in R^{}",
            a.k(),
            a.d(),
            b.k(),
            b.d()
        )));
    }
    let k = a.k();
    let pa = profiles(a);
    let pb = profiles(b);
    let scale = pa.iter().chain(&pb).flatten().fold(T::one(), |m, v| m.max(v.abs()));
    let ptol = T::lit(1e-6) * scale;
    let gap = |i: usize, j: usize| {
        pa[i]
            .iter()
            .zip(&pb[j])
            .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    };
    let consider = |best: &mut Option<Alignment<T>>, perm: &[usize]| {
        let al = kabsch(a, b, perm);
        if best.as_ref().is_none_or(|cur| al.rms < cur.rms) {
            *best = Some(al);
        }
    };
    let mut best: Option<Alignment<T>> = None;
    let tight: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| compatible(i, j) && gap(i, j) <= ptol).collect())
        .collect();
    enumerate(&tight, &mut |perm| consider(&mut best, perm));
    if best.is_none() {
        let loose: Vec<Vec<bool>> = (0..k).map(|i| (0..k).map(|j| compatible(i, j)).collect()).collect();
        if k <= EXHAUSTIVE_LIMIT {
            enumerate(&loose, &mut |perm| consider(&mut best, perm));
        } else {
            let mut perm = vec![usize::MAX; k];
            let mut taken = vec![false; k];
            for i in 0..k {
                let j = (0..k)
                    .filter(|&j| !taken[j] && loose[i][j])
                    .min_by(|&x, &y| cmp(&gap(i, x), &gap(i, y)))
                    .or_else(|| (0..k).find(|&j| !taken[j]))
                    .expect("a free slot remains");
                taken[j] = true;
                perm[i] = j;
            }
            consider(&mut best, &perm);
        }
    }
    best.ok_or_else(|| Error::Shape("no permutation satisfies the compatibility predicate".into()))
}

/// Root-mean-square distance after the best alignment.
pub fn shape_distance<T: Real>(a: &PointConfig<T>, b: &PointConfig<T>) -> Result<T> {
    align(a, b).map(|al| al.rms)
}

fn profiles<T: Real>(c: &PointConfig<T>) -> Vec<Vec<T>> {
    let k = c.k();
    (0..k)
        .map(|i| {
            let mut row: Vec<T> = (0..k)
                .filter(|&j| j != i)
                .map(|j| sq_dist(&c.points[i], &c.points[j]))
                .collect();
            row.sort_by(cmp);
            row
        })
        .collect()
}

fn enumerate(allowed: &[Vec<bool>], visit: &mut impl FnMut(&[usize])) {
    fn go(
        i: usize,
        allowed: &[Vec<bool>],
        perm: &mut Vec<usize>,
        taken: &mut [bool],
        visit: &mut impl FnMut(&[usize]),
    ) {
        if i == allowed.len() {
            visit(perm);
            return;
        }
        for j in 0..allowed.len() {
            if !taken[j] && allowed[i][j] {
                taken[j] = true;
                perm.push(j);
                go(i + 1, allowed, perm, taken, visit);
                perm.pop();
                taken[j] = false;
            }
        }
    }
    let k = allowed.len();
    go(0, allowed, &mut Vec::with_capacity(k), &mut vec![false; k], visit);
}

fn centroid<T: Real>(pts: &[&Vec<T>], d: usize) -> Vec<T> {
    let n = T::from_count(pts.len());
    (0..d).map(|l| compensated_sum(pts.iter().map(|p| p[l])) / n).collect()
}

/// Orthogonal Procrustes with reflections allowed for a fixed matching.
fn kabsch<T: Real>(a: &PointConfig<T>, b: &PointConfig<T>, perm: &[usize]) -> Alignment<T> {
    let d = a.d();
    let k = a.k();
    let pa: Vec<&Vec<T>> = a.points.iter().collect();
    let pb: Vec<&Vec<T>> = perm.iter().map(|&j| &b.points[j]).collect();
    let ca = centroid(&pa, d);
    let cb = centroid(&pb, d);
    // H = Σ (a_i − ca)(b_i − cb)ᵀ
    let h = Matrix::from_fn(d, d, |r, c| {
        compensated_sum((0..k).map(|i| (pa[i][r] - ca[r]) * (pb[i][c] - cb[c])))
    });
    let f = svd(&h, true);
    // Q = V Uᵀ maps centered a onto centered b
    let q = f.v.matmul(&f.u.transpose());
    let qa = q.matvec(&ca);
    let translation: Vec<T> = cb.iter().zip(&qa).map(|(&x, &y)| x - y).collect();
    let total = compensated_sum((0..k).map(|i| {
        let img = q.matvec(pa[i]);
        compensated_sum((0..d).map(|l| {
            let e = img[l] + translation[l] - pb[i][l];
            e * e
        }))
    }));
    Alignment {
        rms: (total / T::from_count(k)).sqrt(),
        rotation: q,
        translation,
        permutation: perm.to_vec(),
    }
}
