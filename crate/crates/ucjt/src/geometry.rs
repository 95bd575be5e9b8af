//! Spatial point processes: Poisson fields of access points, hard-core
//! co-channel user sets, and virtual-cell membership.
//!
//! All coordinates are in meters, with the simulation window centered at the
//! origin. The window metric is toroidal by default so that the probe user
//! at the center sees a statistically unbiased environment; a plain
//! Euclidean mode exists for guard-region sensitivity checks.

use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// Distance convention applied inside the simulation window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Wrap-around (torus) distances; removes window-edge bias.
    Toroidal,
    /// Plain Euclidean distances; callers are expected to discard a guard
    /// margin themselves when using this mode.
    EuclideanWithGuard,
}

/// Rectangular simulation window centered at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    /// Side length along x, in meters.
    pub width_m: f64,
    /// Side length along y, in meters.
    pub height_m: f64,
    /// Distance convention.
    pub metric: Metric,
}

impl Window {
    /// Square toroidal window with the given side length in meters.
    pub fn square(side_m: f64) -> Self {
        Window { width_m: side_m, height_m: side_m, metric: Metric::Toroidal }
    }

    /// Window area in square meters.
    pub fn area_m2(&self) -> f64 {
        self.width_m * self.height_m
    }

    /// Distance between two points under the window metric.
    pub fn distance(&self, a: Point, b: Point) -> f64 {
        let mut dx = (a.x - b.x).abs();
        let mut dy = (a.y - b.y).abs();
        if self.metric == Metric::Toroidal {
            dx = dx.min(self.width_m - dx);
            dy = dy.min(self.height_m - dy);
        }
        dx.hypot(dy)
    }

    /// Whether `p` lies inside the window (half-open on the upper edges).
    pub fn contains(&self, p: Point) -> bool {
        let hw = self.width_m / 2.0;
        let hh = self.height_m / 2.0;
        (-hw..hw).contains(&p.x) && (-hh..hh).contains(&p.y)
    }

    fn validate(&self) -> Result<()> {
        if !(self.width_m > 0.0) || !(self.height_m > 0.0) {
            return Err(Error::Config(format!(
                "window sides must be positive, got {} x {} m",
                self.width_m, self.height_m
            )));
        }
        Ok(())
    }
}

/// Planar point in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }
}

/// A finite point pattern together with the window it lives in.
#[derive(Debug, Clone)]
pub struct PointSet {
    pub points: Vec<Point>,
    pub window: Window,
}

impl PointSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Result of hard-core thinning: the retained points plus the guaranteed
/// minimum pairwise separation.
#[derive(Debug, Clone)]
pub struct HardCoreSet {
    pub retained: PointSet,
    pub min_separation_m: f64,
}

/// The set of access points serving one user: all points of the parent
/// pattern within `radius_m` of the user.
#[derive(Debug, Clone)]
pub struct VirtualCellGeometry {
    /// The served user's location.
    pub user: Point,
    /// Indices into the parent access-point `PointSet`.
    pub member_indices: Vec<usize>,
    /// Distance (window metric) from the user to each member, same order.
    pub member_distances_m: Vec<f64>,
    /// Cell radius in meters.
    pub radius_m: f64,
}

impl VirtualCellGeometry {
    pub fn is_empty(&self) -> bool {
        self.member_indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.member_indices.len()
    }
}

/// Samples a homogeneous Poisson point process of the given intensity
/// (points per square meter) in the window.
pub fn sample_ppp<R: Rng + ?Sized>(
    intensity_per_m2: f64,
    window: Window,
    rng: &mut R,
) -> Result<PointSet> {
    window.validate()?;
    if !(intensity_per_m2 >= 0.0) {
        return Err(Error::Config(format!(
            "point process intensity must be nonnegative, got {intensity_per_m2}"
        )));
    }
    let mean = intensity_per_m2 * window.area_m2();
    let count = if mean == 0.0 {
        0
    } else {
        Poisson::new(mean)
            .map_err(|e| Error::Config(format!("invalid Poisson mean {mean}: {e}")))?
            .sample(rng) as usize
    };
    let hw = window.width_m / 2.0;
    let hh = window.height_m / 2.0;
    let points = (0..count)
        .map(|_| Point { x: rng.random_range(-hw..hw), y: rng.random_range(-hh..hh) })
        .collect();
    Ok(PointSet { points, window })
}

/// Uniform-grid spatial index for fixed-radius neighbor queries. The cell
/// size is at least the query radius, so scanning the 3x3 block of cells
/// around a point covers every neighbor within that radius (with wrap-around
/// on toroidal windows).
struct CellGrid {
    nx: usize,
    ny: usize,
    inv_cell_w: f64,
    inv_cell_h: f64,
    wrap: bool,
    /// `cells[cy * nx + cx]` holds indices of the points in that cell.
    cells: Vec<Vec<usize>>,
    half_w: f64,
    half_h: f64,
}

impl CellGrid {
    fn build(points: &[Point], window: &Window, radius_m: f64) -> CellGrid {
        // Cap the grid so degenerate radii don't allocate unbounded cells.
        let dim = |side: f64| -> usize {
            if radius_m <= 0.0 {
                256
            } else {
                ((side / radius_m).floor() as usize).clamp(1, 256)
            }
        };
        let nx = dim(window.width_m);
        let ny = dim(window.height_m);
        let mut grid = CellGrid {
            nx,
            ny,
            inv_cell_w: nx as f64 / window.width_m,
            inv_cell_h: ny as f64 / window.height_m,
            wrap: window.metric == Metric::Toroidal,
            cells: vec![Vec::new(); nx * ny],
            half_w: window.width_m / 2.0,
            half_h: window.height_m / 2.0,
        };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = grid.cell_of(*p);
            grid.cells[cy * grid.nx + cx].push(i);
        }
        grid
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = (((p.x + self.half_w) * self.inv_cell_w) as usize).min(self.nx - 1);
        let cy = (((p.y + self.half_h) * self.inv_cell_h) as usize).min(self.ny - 1);
        (cx, cy)
    }

    /// Visits the indices of all points in the 3x3 cell block around `p`.
    fn for_each_neighbor(&self, p: Point, mut f: impl FnMut(usize)) {
        let (cx, cy) = self.cell_of(p);
        let mut xs = [usize::MAX; 3];
        let mut ys = [usize::MAX; 3];
        let mut n_xs = 0;
        let mut n_ys = 0;
        for d in -1i64..=1 {
            let (x, y);
            if self.wrap {
                x = (cx as i64 + d).rem_euclid(self.nx as i64) as usize;
                y = (cy as i64 + d).rem_euclid(self.ny as i64) as usize;
            } else {
                x = (cx as i64 + d).clamp(0, self.nx as i64 - 1) as usize;
                y = (cy as i64 + d).clamp(0, self.ny as i64 - 1) as usize;
            }
            // Tiny grids make shifted cells coincide; keep each once.
            if !xs[..n_xs].contains(&x) {
                xs[n_xs] = x;
                n_xs += 1;
            }
            if !ys[..n_ys].contains(&y) {
                ys[n_ys] = y;
                n_ys += 1;
            }
        }
        for &y in &ys[..n_ys] {
            for &x in &xs[..n_xs] {
                for &idx in &self.cells[y * self.nx + x] {
                    f(idx);
                }
            }
        }
    }
}

/// Matérn type-II dependent thinning with explicit marks.
///
/// Candidate `i` is retained iff no other candidate within `min_sep_m` has a
/// lexicographically smaller `(mark, index)` pair; the index tiebreak makes
/// the outcome deterministic even for coincident marks. Returns retention
/// flags aligned with `points`.
fn matern_retention_flags(
    points: &[Point],
    marks: &[f64],
    window: &Window,
    min_sep_m: f64,
) -> Vec<bool> {
    if min_sep_m <= 0.0 {
        return vec![true; points.len()];
    }
    let grid = CellGrid::build(points, window, min_sep_m);
    let mut retained = vec![true; points.len()];
    for (i, p) in points.iter().enumerate() {
        grid.for_each_neighbor(*p, |j| {
            if retained[i] && j != i && (marks[j], j) < (marks[i], i) {
                if window.distance(*p, points[j]) < min_sep_m {
                    retained[i] = false;
                }
            }
        });
    }
    retained
}

/// Matérn type-II hard-core thinning with independent uniform marks.
///
/// Every candidate draws a uniform mark; a point survives iff no other
/// candidate within `min_sep_m` has a smaller mark. The long-run retention
/// frequency equals [`scheduling_probability`].
pub fn matern_hardcore_thinning<R: Rng + ?Sized>(
    candidates: &PointSet,
    min_sep_m: f64,
    rng: &mut R,
) -> Result<HardCoreSet> {
    if !(min_sep_m >= 0.0) {
        return Err(Error::Config(format!(
            "hard-core separation must be nonnegative, got {min_sep_m}"
        )));
    }
    let marks: Vec<f64> = (0..candidates.len()).map(|_| rng.random::<f64>()).collect();
    let flags = matern_retention_flags(&candidates.points, &marks, &candidates.window, min_sep_m);
    let points = candidates
        .points
        .iter()
        .zip(&flags)
        .filter_map(|(p, &keep)| keep.then_some(*p))
        .collect();
    Ok(HardCoreSet {
        retained: PointSet { points, window: candidates.window },
        min_separation_m: min_sep_m,
    })
}

/// Probability that a contending user wins channel access under the
/// exclusion rule with separation `d`: `(1 - e^(-m)) / m` with
/// `m = lambda_u * pi * d^2`, continuously extended to 1 at `m = 0`.
pub fn scheduling_probability(lambda_u_per_m2: f64, d_m: f64) -> f64 {
    let m = lambda_u_per_m2 * std::f64::consts::PI * d_m * d_m;
    if m == 0.0 {
        1.0
    } else {
        -(-m).exp_m1() / m
    }
}

/// One geometric realization around the probe user.
#[derive(Debug, Clone)]
pub struct TypicalUserScenario {
    /// The probe user, always at the window center.
    pub typical_user: Point,
    /// Co-channel users that won channel access, all at distance >= D from
    /// the probe.
    pub cochannel_users: HardCoreSet,
    /// The access-point field.
    pub raps: PointSet,
}

/// Samples the network as seen by a probe user at the window center.
///
/// Contending users form a Poisson field; the probe participates in the
/// hard-core thinning with a mark smaller than every competitor's, so it is
/// always scheduled and no co-channel user survives within `D` of it. The
/// retained field at distances beyond `D` is statistically identical to an
/// unconditioned thinning. Access points are sampled independently.
pub fn typical_user_scenario<R: Rng + ?Sized>(
    cfg: &NetworkConfig,
    rng: &mut R,
) -> Result<TypicalUserScenario> {
    let raps = sample_ppp(cfg.lambda_r_per_m2, cfg.window, rng)?;
    let candidates = sample_ppp(cfg.lambda_u_per_m2, cfg.window, rng)?;

    let probe = Point::ORIGIN;
    let mut points = candidates.points;
    points.push(probe);
    let mut marks: Vec<f64> = (0..points.len() - 1).map(|_| rng.random::<f64>()).collect();
    marks.push(-1.0); // the probe outranks every competitor
    let flags = matern_retention_flags(&points, &marks, &cfg.window, cfg.min_separation_m);

    // Drop the probe itself (last entry) from the co-channel set.
    let cochannel = points[..points.len() - 1]
        .iter()
        .zip(&flags)
        .filter_map(|(p, &keep)| keep.then_some(*p))
        .collect();

    Ok(TypicalUserScenario {
        typical_user: probe,
        cochannel_users: HardCoreSet {
            retained: PointSet { points: cochannel, window: cfg.window },
            min_separation_m: cfg.min_separation_m,
        },
        raps,
    })
}

/// Collects the access points within `radius_m` of `user` (window metric).
pub fn form_virtual_cell(user: Point, raps: &PointSet, radius_m: f64) -> VirtualCellGeometry {
    form_virtual_cells(std::slice::from_ref(&user), raps, radius_m)
        .pop()
        .expect("one user in, one cell out")
}

/// Forms the virtual cell of every user against the same access-point set,
/// sharing one spatial index across the batch.
pub fn form_virtual_cells(
    users: &[Point],
    raps: &PointSet,
    radius_m: f64,
) -> Vec<VirtualCellGeometry> {
    let grid = if radius_m >= 0.0 {
        Some(CellGrid::build(&raps.points, &raps.window, radius_m))
    } else {
        None
    };
    users
        .iter()
        .map(|&user| {
            let mut member_indices = Vec::new();
            let mut member_distances_m = Vec::new();
            if let Some(grid) = &grid {
                grid.for_each_neighbor(user, |i| {
                    let d = raps.window.distance(user, raps.points[i]);
                    if d <= radius_m {
                        member_indices.push(i);
                        member_distances_m.push(d);
                    }
                });
            }
            // Grid traversal order depends on the cell layout; sort for
            // determinism.
            let mut order: Vec<usize> = (0..member_indices.len()).collect();
            order.sort_unstable_by_key(|&k| member_indices[k]);
            VirtualCellGeometry {
                user,
                member_indices: order.iter().map(|&k| member_indices[k]).collect(),
                member_distances_m: order.iter().map(|&k| member_distances_m[k]).collect(),
                radius_m,
            }
        })
        .collect()
}
