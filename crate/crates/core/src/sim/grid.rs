/// Uniform bucket grid over a centered square, stored in CSR layout.
///
/// Point coordinates live with the caller; the grid only keeps indices.
#[derive(Debug, Clone)]
pub struct SpatialGrid {
    origin: f64,
    cell: f64,
    dim: usize,
    starts: Vec<u32>,
    items: Vec<u32>,
}

impl SpatialGrid {
    /// Buckets `points` lying in `[-half_side, half_side]²`. Points outside
    /// the square are clamped into the border cells.
    pub fn build(points: &[[f64; 2]], half_side: f64, cell_size: f64) -> Self {
        let side = 2.0 * half_side;
        let dim = ((side / cell_size).ceil() as usize).clamp(1, 4096);
        let cell = side.max(f64::MIN_POSITIVE) / dim as f64;
        let origin = -half_side;
        let mut grid = SpatialGrid { origin, cell, dim, starts: vec![0; dim * dim + 1], items: vec![0; points.len()] };
        let cells: Vec<usize> = points.iter().map(|p| grid.cell_index(*p)).collect();
        for &c in &cells {
            grid.starts[c + 1] += 1;
        }
        for i in 0..dim * dim {
            grid.starts[i + 1] += grid.starts[i];
        }
        let mut fill = grid.starts.clone();
        for (i, &c) in cells.iter().enumerate() {
            grid.items[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        grid
    }

    fn coord(&self, v: f64) -> usize {
        let c = ((v - self.origin) / self.cell).floor();
        if c <= 0.0 {
            0
        } else {
            (c as usize).min(self.dim - 1)
        }
    }

    fn cell_index(&self, p: [f64; 2]) -> usize {
        self.coord(p[1]) * self.dim + self.coord(p[0])
    }

    fn bucket(&self, cx: usize, cy: usize) -> &[u32] {
        let c = cy * self.dim + cx;
        &self.items[self.starts[c] as usize..self.starts[c + 1] as usize]
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Nearest point to `q` as `(index, squared distance)`; ties go to the
    /// lower index.
    pub fn nearest(&self, points: &[[f64; 2]], q: [f64; 2]) -> Option<(usize, f64)> {
        if self.items.is_empty() {
            return None;
        }
        let (cx, cy) = (self.coord(q[0]) as isize, self.coord(q[1]) as isize);
        let dim = self.dim as isize;
        let mut best: Option<(usize, f64)> = None;
        for ring in 0..dim {
            let (x0, x1, y0, y1) = (cx - ring, cx + ring, cy - ring, cy + ring);
            for y in y0.max(0)..=y1.min(dim - 1) {
                let full_row = y == y0 || y == y1;
                let mut x = x0.max(0);
                while x <= x1.min(dim - 1) {
                    for &i in self.bucket(x as usize, y as usize) {
                        let p = points[i as usize];
                        let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                        let i = i as usize;
                        if best.is_none_or(|(bi, bd)| d2 < bd || (d2 == bd && i < bi)) {
                            best = Some((i, d2));
                        }
                    }
                    // Interior rows only contribute their two edge cells.
                    x = if full_row || x == x1 { x + 1 } else { x1 };
                }
            }
            // Distance from q to the nearest cell not yet scanned.
            let mut margin = f64::INFINITY;
            if x0 > 0 {
                margin = margin.min(q[0] - (self.origin + x0 as f64 * self.cell));
            }
            if x1 < dim - 1 {
                margin = margin.min(self.origin + (x1 + 1) as f64 * self.cell - q[0]);
            }
            if y0 > 0 {
                margin = margin.min(q[1] - (self.origin + y0 as f64 * self.cell));
            }
            if y1 < dim - 1 {
                margin = margin.min(self.origin + (y1 + 1) as f64 * self.cell - q[1]);
            }
            if margin == f64::INFINITY {
                break;
            }
            if let Some((_, bd)) = best {
                if margin > 0.0 && bd < margin * margin {
                    break;
                }
            }
        }
        best
    }

    /// Calls `f(index, squared distance)` for every point within `radius` of `q`.
    pub fn for_each_within(&self, points: &[[f64; 2]], q: [f64; 2], radius: f64, mut f: impl FnMut(usize, f64)) {
        if self.items.is_empty() || radius < 0.0 {
            return;
        }
        let r2 = radius * radius;
        let (xa, xb) = (self.coord(q[0] - radius), self.coord(q[0] + radius));
        let (ya, yb) = (self.coord(q[1] - radius), self.coord(q[1] + radius));
        for y in ya..=yb {
            for x in xa..=xb {
                for &i in self.bucket(x, y) {
                    let p = points[i as usize];
                    let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2);
                    if d2 <= r2 {
                        f(i as usize, d2);
                    }
                }
            }
        }
    }
}
