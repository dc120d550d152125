//! Breadth-first enumeration of group elements by word length, with
//! sign-identified matrix deduplication.

use std::collections::HashMap;

use super::word::{Letter, Word};
use super::{GroupError, TriangleGroup};
use crate::geom::{hyperbolic_distance, Isometry, Point, EPS_MAT};

/// Default element cap for ball enumeration.
pub const DEFAULT_ELEMENT_CAP: usize = 200_000;

const CELL: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct BallElement {
    pub isometry: Isometry,
    /// Word length of the stored witness.
    pub length: usize,
    parent: Option<usize>,
    letter: Option<Letter>,
}

/// Deduplicating element store. Elements are bucketed by the image of a
/// point with trivial stabilizer, so lookups only compare matrices of
/// elements that move that point to nearly the same place.
#[derive(Debug, Clone)]
struct ElementStore {
    elements: Vec<BallElement>,
    cells: HashMap<(i64, i64), Vec<usize>>,
    probe: Point,
    warnings: Vec<String>,
}

fn row_of(p: &Point) -> i64 {
    (p.v.ln() / CELL).floor() as i64
}

fn col_of(p: &Point, row: i64) -> i64 {
    (p.u / (CELL * (row as f64 * CELL).exp())).floor() as i64
}

impl ElementStore {
    fn new(probe: Point) -> Self {
        ElementStore {
            elements: Vec::new(),
            cells: HashMap::new(),
            probe,
            warnings: Vec::new(),
        }
    }

    fn find(&mut self, g: &Isometry) -> Option<usize> {
        let p = g.apply(&self.probe);
        let row = row_of(&p);
        let scale = g
            .matrix()
            .iter()
            .flatten()
            .fold(1.0f64, |acc, x| acc.max(x.abs()));
        let tol = EPS_MAT * scale;
        for r in row - 1..=row + 1 {
            let col = col_of(&p, r);
            for c in col - 1..=col + 1 {
                let Some(bucket) = self.cells.get(&(r, c)) else {
                    continue;
                };
                for &i in bucket {
                    let d = self.elements[i].isometry.distance(g);
                    if d <= tol {
                        if d > tol / 10.0 {
                            self.warnings.push(format!(
                                "marginal merge: matrices {d:.3e} apart merged under tolerance {tol:.1e}"
                            ));
                        }
                        return Some(i);
                    }
                    if d <= 1e3 * tol {
                        self.warnings.push(format!(
                            "near collision: distinct elements only {d:.3e} apart"
                        ));
                    }
                }
            }
        }
        None
    }

    fn push(&mut self, e: BallElement) -> usize {
        let p = e.isometry.apply(&self.probe);
        let row = row_of(&p);
        let key = (row, col_of(&p, row));
        let idx = self.elements.len();
        self.elements.push(e);
        self.cells.entry(key).or_default().push(idx);
        idx
    }

    fn word(&self, mut i: usize) -> Word {
        let mut letters = Vec::with_capacity(self.elements[i].length);
        while let (Some(parent), Some(l)) = (self.elements[i].parent, self.elements[i].letter) {
            letters.push(l);
            i = parent;
        }
        letters.reverse();
        Word::new(letters)
    }
}

/// All distinct elements of word length at most `radius`.
#[derive(Debug, Clone)]
pub struct GroupBall {
    store: ElementStore,
    pub radius: usize,
}

impl GroupBall {
    pub fn len(&self) -> usize {
        self.store.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.elements.is_empty()
    }

    pub fn elements(&self) -> &[BallElement] {
        &self.store.elements
    }

    /// Shortest witness word of element `i` (lexicographically least among
    /// shortest words).
    pub fn word(&self, i: usize) -> Word {
        self.store.word(i)
    }

    pub fn warnings(&self) -> &[String] {
        &self.store.warnings
    }
}

/// Level-by-level breadth-first exploration of the Cayley graph over the
/// letters `x, x^-1, y, y^-1, z, z^-1`.
///
/// With a prune bound `(center, radius)`, only elements `g` with
/// `d(center, g.probe) <= radius` are kept and expanded. When the frontier
/// empties, every element within the bound has been found, provided the
/// bound includes a slack of two triangle diameters (see
/// [`TriangleGroup::prune_slack`]).
#[derive(Debug, Clone)]
pub struct BallExplorer<'g> {
    group: &'g TriangleGroup,
    store: ElementStore,
    frontier: Vec<usize>,
    level: usize,
    bound: Option<(Point, f64)>,
    cap: usize,
}

impl<'g> BallExplorer<'g> {
    pub fn new(group: &'g TriangleGroup, bound: Option<(Point, f64)>, cap: usize) -> Self {
        let mut store = ElementStore::new(group.probe_point());
        let id = store.push(BallElement {
            isometry: Isometry::IDENTITY,
            length: 0,
            parent: None,
            letter: None,
        });
        BallExplorer {
            group,
            store,
            frontier: vec![id],
            level: 0,
            bound,
            cap,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// True once no element of the current level has an unexplored neighbor
    /// inside the bound.
    pub fn exhausted(&self) -> bool {
        self.frontier.is_empty()
    }

    pub fn len(&self) -> usize {
        self.store.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.elements.is_empty()
    }

    pub fn elements(&self) -> &[BallElement] {
        &self.store.elements
    }

    pub fn word(&self, i: usize) -> Word {
        self.store.word(i)
    }

    pub fn warnings(&self) -> &[String] {
        &self.store.warnings
    }

    /// Adds all elements of word length `level + 1`; returns their indices.
    pub fn step(&mut self) -> Result<std::ops::Range<usize>, GroupError> {
        let start = self.store.elements.len();
        let frontier = std::mem::take(&mut self.frontier);
        for &i in &frontier {
            let g = self.store.elements[i].isometry;
            let last = self.store.elements[i].letter;
            for l in Letter::ALL {
                if last == Some(l.inv()) {
                    continue;
                }
                let h = g * self.group.letter(l);
                if let Some((center, radius)) = self.bound {
                    let image = h.apply(&self.store.probe);
                    if hyperbolic_distance(&center, &image) > radius {
                        continue;
                    }
                }
                if self.store.find(&h).is_some() {
                    continue;
                }
                if self.store.elements.len() >= self.cap {
                    return Err(GroupError::BallTooLarge { cap: self.cap });
                }
                let id = self.store.push(BallElement {
                    isometry: h,
                    length: self.level + 1,
                    parent: Some(i),
                    letter: Some(l),
                });
                self.frontier.push(id);
            }
        }
        self.level += 1;
        Ok(start..self.store.elements.len())
    }

    pub fn into_ball(self) -> GroupBall {
        GroupBall {
            store: self.store,
            radius: self.level,
        }
    }
}

/// All distinct elements expressible by freely reduced words of length at
/// most `n`, each with its shortest (then lexicographically least) witness.
pub fn group_ball(group: &TriangleGroup, n: usize) -> Result<GroupBall, GroupError> {
    group_ball_with_cap(group, n, DEFAULT_ELEMENT_CAP)
}

pub fn group_ball_with_cap(
    group: &TriangleGroup,
    n: usize,
    cap: usize,
) -> Result<GroupBall, GroupError> {
    let mut ex = BallExplorer::new(group, None, cap);
    while ex.level() < n {
        ex.step()?;
    }
    Ok(ex.into_ball())
}
