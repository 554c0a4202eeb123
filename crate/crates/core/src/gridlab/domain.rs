use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};

/// `(x, y)`; one-dimensional domains keep `y = 0`.
pub type Point = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }
}

/// A labelled piece of the boundary: one side of one tile.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub tile: i64,
    pub side: Side,
    /// Indices into [`GridDomain::boundary`].
    pub points: Vec<usize>,
}

impl Face {
    pub fn label(&self) -> String {
        format!("{}:{}", self.tile, self.side.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    /// `{0, …, n}`.
    Interval(i64),
    /// `{0, …, w} × {0, …, h}`.
    Rectangle { w: i64, h: i64 },
    /// `{x0, …, x0+w} × {y0, …, y0+h}`.
    RectangleAt { x0: i64, y0: i64, w: i64, h: i64 },
    /// `count` tiles of size `w × h` side by side along the x axis; `h = 0`
    /// gives a one-dimensional strip. Boundary faces are labelled by tile.
    Tiles { w: i64, h: i64, count: i64 },
    /// Rows of `#` (cell) and `.` (hole); the first row is `y = 0`.
    Mask(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct TileLayout {
    pub w: i64,
    pub h: i64,
    pub count: i64,
}

#[derive(Clone, Debug)]
pub struct GridDomain {
    dim: usize,
    cells: BTreeSet<(i64, i64)>,
    interior: Vec<Point>,
    boundary: Vec<Point>,
    interior_index: HashMap<Point, usize>,
    boundary_index: HashMap<Point, usize>,
    faces: Option<Vec<Face>>,
    tiles: Option<TileLayout>,
}

impl GridDomain {
    pub fn build(spec: &DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::Interval(n) => {
                if *n < 2 {
                    return Err(Error::usage("interval(n) needs n >= 2"));
                }
                Self::from_cells(1, (0..=*n).map(|x| (x, 0)))
            }
            DomainSpec::Rectangle { w, h } => {
                Self::build(&DomainSpec::RectangleAt { x0: 0, y0: 0, w: *w, h: *h })
            }
            DomainSpec::RectangleAt { x0, y0, w, h } => {
                if *w < 2 || *h < 2 {
                    return Err(Error::usage("rectangle needs w, h >= 2"));
                }
                let cells = (*y0..=y0 + h).flat_map(|y| (*x0..=x0 + w).map(move |x| (x, y)));
                Self::from_cells(2, cells)
            }
            DomainSpec::Tiles { w, h, count } => {
                if *w < 2 || *count < 1 || *h == 1 || *h < 0 {
                    return Err(Error::usage("tiles need w >= 2, h = 0 or h >= 2, count >= 1"));
                }
                let width = w * count;
                let mut d = if *h == 0 {
                    Self::build(&DomainSpec::Interval(width))?
                } else {
                    Self::build(&DomainSpec::Rectangle { w: width, h: *h })?
                };
                d.tiles = Some(TileLayout { w: *w, h: *h, count: *count });
                d.faces = Some(d.tile_faces());
                Ok(d)
            }
            DomainSpec::Mask(text) => {
                let mut cells = Vec::new();
                let rows: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
                for (y, line) in rows.iter().enumerate() {
                    for (x, c) in line.trim_end().chars().enumerate() {
                        match c {
                            '#' => cells.push((x as i64, y as i64)),
                            '.' | ' ' => {}
                            other => {
                                return Err(Error::usage(format!(
                                    "mask line {}: unexpected character {other:?}",
                                    y + 1
                                )))
                            }
                        }
                    }
                }
                let dim = if rows.len() == 1 { 1 } else { 2 };
                Self::from_cells(dim, cells)
            }
        }
    }

    /// Domain from an explicit cell set.
    pub fn from_cells(dim: usize, cells: impl IntoIterator<Item = Point>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::usage("grid dimension must be 1 or 2"));
        }
        // Ordered by (y, x): row-major.
        let cells: BTreeSet<(i64, i64)> = cells.into_iter().map(|(x, y)| (y, x)).collect();
        if dim == 1 && cells.iter().any(|c| c.0 != 0) {
            return Err(Error::usage("one-dimensional domains live on y = 0"));
        }
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for &(y, x) in &cells {
            let inside = neighbours(dim, (x, y)).all(|(a, b)| cells.contains(&(b, a)));
            if inside {
                interior.push((x, y));
            } else {
                boundary.push((x, y));
            }
        }
        if interior.is_empty() {
            return Err(Error::usage("domain has an empty interior"));
        }
        if interior.len() > super::INTERIOR_BUDGET {
            return Err(Error::Budget {
                what: "interior point",
                limit: super::INTERIOR_BUDGET,
                achieved: 0,
            });
        }
        let interior_index = interior.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let boundary_index = boundary.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        Ok(GridDomain {
            dim,
            cells,
            interior,
            boundary,
            interior_index,
            boundary_index,
            faces: None,
            tiles: None,
        })
    }

    fn tile_faces(&self) -> Vec<Face> {
        let t = self.tiles.expect("tiled domain");
        let right_end = t.w * t.count;
        let mut faces: Vec<Face> = Vec::new();
        let mut push = |tile: i64, side: Side, p: usize| {
            match faces.iter_mut().find(|f| f.tile == tile && f.side == side) {
                Some(f) => f.points.push(p),
                None => faces.push(Face { tile, side, points: alloc::vec![p] }),
            }
        };
        for (i, &(x, y)) in self.boundary.iter().enumerate() {
            let tile = (x / t.w).min(t.count - 1);
            if t.h == 0 {
                push(tile, if x == 0 { Side::Left } else { Side::Right }, i);
            } else if y == 0 {
                push(tile, Side::Bottom, i);
            } else if y == t.h {
                push(tile, Side::Top, i);
            } else if x == 0 {
                push(0, Side::Left, i);
            } else {
                debug_assert_eq!(x, right_end);
                push(t.count - 1, Side::Right, i);
            }
        }
        faces.sort_by_key(|f| (f.tile, f.side));
        faces
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.cells.contains(&(p.1, p.0))
    }

    /// Interior points in row-major order.
    pub fn interior(&self) -> &[Point] {
        &self.interior
    }

    /// Boundary points in row-major order.
    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    pub fn interior_index(&self, p: Point) -> Option<usize> {
        self.interior_index.get(&p).copied()
    }

    pub fn boundary_index(&self, p: Point) -> Option<usize> {
        self.boundary_index.get(&p).copied()
    }

    pub fn is_interior(&self, p: Point) -> bool {
        self.interior_index.contains_key(&p)
    }

    pub fn faces(&self) -> Option<&[Face]> {
        self.faces.as_deref()
    }

    pub(crate) fn tiles(&self) -> Option<TileLayout> {
        self.tiles
    }

    /// Lattice neighbours of `p`.
    pub fn neighbours(&self, p: Point) -> impl Iterator<Item = Point> {
        neighbours(self.dim, p)
    }

    /// The cell nearest the centre of the bounding box (ties to lower
    /// coordinates), if interior.
    pub fn center(&self) -> Option<Point> {
        let xs = self.cells.iter().map(|c| c.1);
        let (x0, x1) = (xs.clone().min()?, xs.max()?);
        let (y0, y1) = (self.cells.first()?.0, self.cells.last()?.0);
        let p = (x0 + (x1 - x0) / 2, y0 + (y1 - y0) / 2);
        self.is_interior(p).then_some(p)
    }

    /// `self ⊆ other` with nested interiors.
    pub fn nested_in(&self, other: &GridDomain) -> bool {
        self.dim == other.dim
            && self.cells.is_subset(&other.cells)
            && self.interior.iter().all(|p| other.is_interior(*p))
    }
}

fn neighbours(dim: usize, (x, y): Point) -> impl Iterator<Item = Point> {
    let steps: &[(i64, i64)] = if dim == 1 {
        &[(-1, 0), (1, 0)]
    } else {
        &[(0, -1), (-1, 0), (1, 0), (0, 1)]
    };
    steps.iter().map(move |(dx, dy)| (x + dx, y + dy))
}
