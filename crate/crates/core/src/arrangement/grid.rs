use std::collections::HashMap;

use crate::geom::{hyperbolic_distance, Point};

/// Bucket grid over the upper half-plane whose cells have hyperbolic
/// diameter of order `cell`: rows are slabs of `ln v`, columns are `u`
/// slices scaled by the row height.
#[derive(Debug, Clone)]
pub(crate) struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl PointGrid {
    pub fn new(cell: f64) -> Self {
        PointGrid {
            cell,
            buckets: HashMap::new(),
        }
    }

    fn row(&self, p: &Point) -> i64 {
        (p.v.ln() / self.cell).floor() as i64
    }

    fn col(&self, p: &Point, row: i64) -> i64 {
        (p.u / (self.cell * (row as f64 * self.cell).exp())).floor() as i64
    }

    pub fn insert(&mut self, p: &Point, id: usize) {
        let row = self.row(p);
        let key = (row, self.col(p, row));
        self.buckets.entry(key).or_default().push(id);
    }

    /// Ids stored in the cells around `p`; a superset of everything within
    /// hyperbolic distance `cell / 2` of `p`.
    pub fn candidates<'a>(&'a self, p: &Point) -> impl Iterator<Item = usize> + 'a {
        let row = self.row(p);
        let p = *p;
        (row - 1..=row + 1).flat_map(move |r| {
            let col = self.col(&p, r);
            (col - 1..=col + 1).flat_map(move |c| {
                self.buckets
                    .get(&(r, c))
                    .map(|v| v.as_slice())
                    .unwrap_or(&[])
                    .iter()
                    .copied()
            })
        })
    }

    /// Smallest distance between two distinct stored points, among pairs in
    /// neighbouring cells, with the pair.
    pub fn closest_pair(&self, points: &[Point]) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for (i, p) in points.iter().enumerate() {
            for j in self.candidates(p) {
                if j <= i {
                    continue;
                }
                let d = hyperbolic_distance(p, &points[j]);
                if best.is_none_or(|(bd, _, _)| d < bd) {
                    best = Some((d, i, j));
                }
            }
        }
        best
    }
}
