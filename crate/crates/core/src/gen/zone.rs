//! Difference-bound matrices over clock values, used while generating
//! feasible random timing bounds.
//!
//! Row/column 0 is the zero reference; entry `(i, j)` bounds `x_i - x_j`
//! from above (inclusive; +inf means unbounded). Canonical form closes the
//! matrix under path tightening, after which emptiness shows up as a
//! negative diagonal.

#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    dim: usize,
    m: Vec<f64>,
}

impl Zone {
    /// All clock vectors with every clock >= 0.
    pub fn universe(clocks: usize) -> Self {
        let dim = clocks + 1;
        let mut m = vec![f64::INFINITY; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 0.0;
            // x_0 - x_i <= 0, i.e. clocks are non-negative.
            m[i] = 0.0;
        }
        Zone { dim, m }
    }

    /// The single point where every clock equals 0.
    pub fn origin(clocks: usize) -> Self {
        let dim = clocks + 1;
        Zone {
            dim,
            m: vec![0.0; dim * dim],
        }
    }

    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.m[i * self.dim + j] = v;
    }

    /// Upper bound on `x_i - x_j` in canonical form (clock indices 1-based;
    /// 0 is the reference).
    pub fn bound(&self, i: usize, j: usize) -> f64 {
        self.at(i, j)
    }

    /// Feasible interval of clock `c` (1-based): `(lo, hi)`.
    pub fn clock_range(&self, c: usize) -> (f64, f64) {
        (-self.at(0, c), self.at(c, 0))
    }

    /// Adds `x_i - x_j <= v`. Call [`Zone::canonicalize`] before reading.
    pub fn constrain(&mut self, i: usize, j: usize, v: f64) {
        if v < self.at(i, j) {
            self.set(i, j, v);
        }
    }

    /// Adds `lo <= x_c <= hi` for clock `c` (1-based).
    pub fn constrain_clock(&mut self, c: usize, lo: f64, hi: f64) {
        self.constrain(0, c, -lo);
        if hi.is_finite() {
            self.constrain(c, 0, hi);
        }
    }

    /// Floyd-Warshall tightening. Idempotent; an empty zone collapses to
    /// the canonical empty form (all bounds -inf), which behaves as the
    /// identity under [`Zone::union_relax`].
    pub fn canonicalize(&mut self) {
        let d = self.dim;
        for k in 0..d {
            for i in 0..d {
                let ik = self.at(i, k);
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..d {
                    let through = ik + self.at(k, j);
                    if through < self.at(i, j) {
                        self.set(i, j, through);
                    }
                }
            }
            if (0..d).any(|i| self.at(i, i) < 0.0) {
                self.m.fill(f64::NEG_INFINITY);
                return;
            }
        }
    }

    /// Empty iff some diagonal entry went negative after tightening.
    pub fn is_empty(&self) -> bool {
        (0..self.dim).any(|i| self.at(i, i) < 0.0)
    }

    /// Time elapse: every clock grows by the same unknown delay, so the
    /// individual upper bounds open up while differences stay.
    pub fn elapse(&mut self) {
        for i in 1..self.dim {
            self.set(i, 0, f64::INFINITY);
        }
    }

    /// Clock `c` (1-based) jumps to 0; other clocks keep their values.
    pub fn reset(&mut self, c: usize) {
        for j in 0..self.dim {
            let v0 = self.at(0, j);
            self.set(c, j, v0);
            let v1 = self.at(j, 0);
            self.set(j, c, v1);
        }
        self.set(c, c, 0.0);
    }

    /// Smallest zone containing both (elementwise max of the bounds), for
    /// joining branches at a node with several incoming edges.
    pub fn union_relax(&mut self, other: &Zone) {
        debug_assert_eq!(self.dim, other.dim);
        for k in 0..self.m.len() {
            self.m[k] = self.m[k].max(other.m[k]);
        }
    }

    pub fn intersect(&mut self, other: &Zone) {
        debug_assert_eq!(self.dim, other.dim);
        for k in 0..self.m.len() {
            self.m[k] = self.m[k].min(other.m[k]);
        }
    }
}
