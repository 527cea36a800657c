//! Grid world, circuit hierarchy and placement state.
//!
//! A circuit is a list of primitive groups; each group holds devices and each
//! device is split into identical unit cells occupying one grid cell apiece.
//! Moves operate at two levels: rigid group translations (top) and single-unit
//! displacements inside a group (bottom). All units of a group must stay
//! 8-connected at all times.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("grid {width}x{height} too small for constructive packing")]
    GridTooSmall { width: u32, height: u32 },
    #[error("illegal move: {0:?}")]
    IllegalMove(MoveAction),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub width: u32,
    pub height: u32,
}

impl GridSpec {
    pub fn contains(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height
    }

    pub fn cells(&self) -> u64 {
        self.width as u64 * self.height as u64
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeviceSpec {
    pub name: String,
    pub units: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSpec {
    pub name: String,
    pub devices: Vec<DeviceSpec>,
}

impl GroupSpec {
    pub fn total_units(&self) -> u32 {
        self.devices.iter().map(|d| d.units).sum()
    }
}

/// A matched device pair with its offset sensitivity (offset contribution per
/// unit of fractional parameter mismatch).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSpec {
    pub device_a: String,
    pub device_b: String,
    #[serde(default = "default_sensitivity")]
    pub sensitivity: f64,
}

fn default_sensitivity() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub grid: GridSpec,
    pub groups: Vec<GroupSpec>,
    #[serde(default)]
    pub match_pairs: Vec<PairSpec>,
}

impl CircuitSpec {
    pub fn total_units(&self) -> u32 {
        self.groups.iter().map(|g| g.total_units()).sum()
    }

    /// Looks up a device by its circuit-wide unique name.
    pub fn device_index(&self, name: &str) -> Option<(usize, usize)> {
        for (gi, g) in self.groups.iter().enumerate() {
            for (di, d) in g.devices.iter().enumerate() {
                if d.name == name {
                    return Some((gi, di));
                }
            }
        }
        None
    }

    /// Collects every invariant violation; empty means valid.
    pub fn validation_errors(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.grid.width < 1 || self.grid.height < 1 {
            errs.push(format!(
                "grid: width and height must be >= 1 (got {}x{})",
                self.grid.width, self.grid.height
            ));
        }
        if self.groups.is_empty() {
            errs.push("groups: at least one group required".to_string());
        }
        let mut seen = HashSet::new();
        for (gi, g) in self.groups.iter().enumerate() {
            if g.devices.is_empty() {
                errs.push(format!("groups[{gi}] ({}): no devices", g.name));
            }
            for (di, d) in g.devices.iter().enumerate() {
                if d.units < 1 {
                    errs.push(format!(
                        "groups[{gi}].devices[{di}] ({}): unit_count must be >= 1",
                        d.name
                    ));
                }
                if !seen.insert(d.name.clone()) {
                    errs.push(format!(
                        "groups[{gi}].devices[{di}]: duplicate device name '{}'",
                        d.name
                    ));
                }
            }
        }
        for (pi, p) in self.match_pairs.iter().enumerate() {
            if p.device_a == p.device_b {
                errs.push(format!(
                    "match_pairs[{pi}]: device_a and device_b must differ ('{}')",
                    p.device_a
                ));
            }
            for name in [&p.device_a, &p.device_b] {
                if self.device_index(name).is_none() {
                    errs.push(format!("match_pairs[{pi}]: unknown device '{name}'"));
                }
            }
            if p.sensitivity < 0.0 || !p.sensitivity.is_finite() {
                errs.push(format!(
                    "match_pairs[{pi}]: sensitivity must be finite and >= 0 (got {})",
                    p.sensitivity
                ));
            }
        }
        errs
    }
}

/// Identifies one unit cell: (group index, device index, unit index).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct UnitId {
    pub group: usize,
    pub device: usize,
    pub unit: usize,
}

/// The eight compass directions in their fixed enumeration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    N,
    NE,
    E,
    SE,
    S,
    SW,
    W,
    NW,
}

pub const ALL_DIRS: [Dir; 8] = [
    Dir::N,
    Dir::NE,
    Dir::E,
    Dir::SE,
    Dir::S,
    Dir::SW,
    Dir::W,
    Dir::NW,
];

impl Dir {
    pub fn delta(self) -> (i32, i32) {
        match self {
            Dir::N => (0, 1),
            Dir::NE => (1, 1),
            Dir::E => (1, 0),
            Dir::SE => (1, -1),
            Dir::S => (0, -1),
            Dir::SW => (-1, -1),
            Dir::W => (-1, 0),
            Dir::NW => (-1, 1),
        }
    }

    pub fn index(self) -> u8 {
        ALL_DIRS.iter().position(|&d| d == self).unwrap() as u8
    }
}

/// One acting entity: the single top-level agent or a per-group bottom agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Agent {
    Top,
    Group(usize),
}

/// A candidate displacement: a rigid group translation (top level) or a
/// single-unit step within its group (bottom level).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveAction {
    Top { group: usize, dir: Dir },
    Bottom { unit: UnitId, dir: Dir },
}

impl MoveAction {
    pub fn agent(&self) -> Agent {
        match self {
            MoveAction::Top { .. } => Agent::Top,
            MoveAction::Bottom { unit, .. } => Agent::Group(unit.group),
        }
    }
}

/// Full assignment of unit cells to grid coordinates. Immutable value type:
/// `apply_move` returns a new placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    grid: GridSpec,
    // positions[group][device][unit]
    positions: Vec<Vec<Vec<(i32, i32)>>>,
}

impl Placement {
    pub fn new(grid: GridSpec, positions: Vec<Vec<Vec<(i32, i32)>>>) -> Self {
        Placement { grid, positions }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn num_groups(&self) -> usize {
        self.positions.len()
    }

    pub fn num_devices(&self, group: usize) -> usize {
        self.positions[group].len()
    }

    pub fn position(&self, u: UnitId) -> (i32, i32) {
        self.positions[u.group][u.device][u.unit]
    }

    pub fn device_cells(&self, group: usize, device: usize) -> &[(i32, i32)] {
        &self.positions[group][device]
    }

    pub fn group_cells(&self, group: usize) -> Vec<(i32, i32)> {
        self.positions[group].iter().flatten().copied().collect()
    }

    /// Units in canonical (group, device, unit) order.
    pub fn iter_units(&self) -> impl Iterator<Item = (UnitId, (i32, i32))> + '_ {
        self.positions.iter().enumerate().flat_map(|(gi, g)| {
            g.iter().enumerate().flat_map(move |(di, d)| {
                d.iter().enumerate().map(move |(ui, &pos)| {
                    (
                        UnitId {
                            group: gi,
                            device: di,
                            unit: ui,
                        },
                        pos,
                    )
                })
            })
        })
    }

    pub fn occupied(&self) -> HashSet<(i32, i32)> {
        self.iter_units().map(|(_, p)| p).collect()
    }

    /// Mean of the unit-cell centers of one device; cell (x, y) has center
    /// (x + 0.5, y + 0.5).
    pub fn device_centroid(&self, group: usize, device: usize) -> (f64, f64) {
        let cells = self.device_cells(group, device);
        let n = cells.len() as f64;
        let (sx, sy) = cells.iter().fold((0.0, 0.0), |(sx, sy), &(x, y)| {
            (sx + x as f64 + 0.5, sy + y as f64 + 0.5)
        });
        (sx / n, sy / n)
    }

    /// (min-x, min-y) of a group's bounding box.
    pub fn group_anchor(&self, group: usize) -> (i32, i32) {
        let cells = self.group_cells(group);
        let min_x = cells.iter().map(|c| c.0).min().unwrap();
        let min_y = cells.iter().map(|c| c.1).min().unwrap();
        (min_x, min_y)
    }

    /// In-bounds, overlap-free and per-group 8-connected.
    pub fn is_valid(&self) -> bool {
        let mut seen = HashSet::new();
        for (_, (x, y)) in self.iter_units() {
            if !self.grid.contains(x, y) || !seen.insert((x, y)) {
                return false;
            }
        }
        (0..self.num_groups()).all(|g| is_connected_8(&self.group_cells(g)))
    }

    fn is_legal(&self, m: &MoveAction) -> bool {
        match *m {
            MoveAction::Top { group, dir } => {
                if group >= self.num_groups() {
                    return false;
                }
                let (dx, dy) = dir.delta();
                let others: HashSet<(i32, i32)> = self
                    .iter_units()
                    .filter(|(u, _)| u.group != group)
                    .map(|(_, p)| p)
                    .collect();
                self.group_cells(group).iter().all(|&(x, y)| {
                    let (nx, ny) = (x + dx, y + dy);
                    self.grid.contains(nx, ny) && !others.contains(&(nx, ny))
                })
            }
            MoveAction::Bottom { unit, dir } => {
                if unit.group >= self.num_groups()
                    || unit.device >= self.num_devices(unit.group)
                    || unit.unit >= self.positions[unit.group][unit.device].len()
                {
                    return false;
                }
                let (x, y) = self.position(unit);
                let (dx, dy) = dir.delta();
                let (nx, ny) = (x + dx, y + dy);
                if !self.grid.contains(nx, ny) {
                    return false;
                }
                if self.occupied().contains(&(nx, ny)) {
                    return false;
                }
                let mut cells = self.group_cells(unit.group);
                let idx = cells.iter().position(|&c| c == (x, y)).unwrap();
                cells[idx] = (nx, ny);
                is_connected_8(&cells)
            }
        }
    }

    /// All legal moves of one agent, in deterministic order: movers in index
    /// order, directions in the fixed compass order.
    pub fn legal_moves(&self, agent: Agent) -> Vec<MoveAction> {
        let mut out = Vec::new();
        match agent {
            Agent::Top => {
                for group in 0..self.num_groups() {
                    for dir in ALL_DIRS {
                        let m = MoveAction::Top { group, dir };
                        if self.is_legal(&m) {
                            out.push(m);
                        }
                    }
                }
            }
            Agent::Group(group) => {
                for device in 0..self.num_devices(group) {
                    for unit in 0..self.positions[group][device].len() {
                        for dir in ALL_DIRS {
                            let m = MoveAction::Bottom {
                                unit: UnitId {
                                    group,
                                    device,
                                    unit,
                                },
                                dir,
                            };
                            if self.is_legal(&m) {
                                out.push(m);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Returns the placement with the mover displaced. The input is left
    /// unmodified; callers are expected to pre-filter via `legal_moves`.
    pub fn apply_move(&self, m: &MoveAction) -> Result<Placement, ModelError> {
        if !self.is_legal(m) {
            return Err(ModelError::IllegalMove(*m));
        }
        let mut next = self.clone();
        match *m {
            MoveAction::Top { group, dir } => {
                let (dx, dy) = dir.delta();
                for dev in &mut next.positions[group] {
                    for cell in dev.iter_mut() {
                        cell.0 += dx;
                        cell.1 += dy;
                    }
                }
            }
            MoveAction::Bottom { unit, dir } => {
                let (dx, dy) = dir.delta();
                let cell = &mut next.positions[unit.group][unit.device][unit.unit];
                cell.0 += dx;
                cell.1 += dy;
            }
        }
        debug_assert!(next.is_valid());
        Ok(next)
    }

    /// Area in cells of the axis-aligned bounding box of all occupied cells.
    pub fn bounding_area(&self) -> u64 {
        let (mut min_x, mut min_y) = (i32::MAX, i32::MAX);
        let (mut max_x, mut max_y) = (i32::MIN, i32::MIN);
        for (_, (x, y)) in self.iter_units() {
            min_x = min_x.min(x);
            min_y = min_y.min(y);
            max_x = max_x.max(x);
            max_y = max_y.max(y);
        }
        (max_x - min_x + 1) as u64 * (max_y - min_y + 1) as u64
    }

    /// Half-perimeter wirelength over device centroids: for each matched pair
    /// and for each group, the semiperimeter of the bounding box of the
    /// involved centroids, summed.
    pub fn wirelength(&self, spec: &CircuitSpec) -> f64 {
        let mut total = 0.0;
        for pair in &spec.match_pairs {
            let (ga, da) = spec.device_index(&pair.device_a).expect("unknown device");
            let (gb, db) = spec.device_index(&pair.device_b).expect("unknown device");
            let ca = self.device_centroid(ga, da);
            let cb = self.device_centroid(gb, db);
            total += hpwl(&[ca, cb]);
        }
        for (gi, g) in spec.groups.iter().enumerate() {
            let centroids: Vec<(f64, f64)> = (0..g.devices.len())
                .map(|di| self.device_centroid(gi, di))
                .collect();
            total += hpwl(&centroids);
        }
        total
    }
}

fn hpwl(points: &[(f64, f64)]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let min_x = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let max_x = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let min_y = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_y = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    (max_x - min_x) + (max_y - min_y)
}

/// Flood fill under 8-neighborhood adjacency.
pub fn is_connected_8(cells: &[(i32, i32)]) -> bool {
    if cells.is_empty() {
        return true;
    }
    let set: HashSet<(i32, i32)> = cells.iter().copied().collect();
    let mut visited = HashSet::new();
    let mut stack = vec![cells[0]];
    visited.insert(cells[0]);
    while let Some((x, y)) = stack.pop() {
        for dy in -1..=1 {
            for dx in -1..=1 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let n = (x + dx, y + dy);
                if set.contains(&n) && visited.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
    visited.len() == set.len()
}

/// Constructive initial placement: groups laid out left-to-right in spec order
/// as near-square blocks separated by one empty column; units inside a block
/// placed row-major in device order.
pub fn initial_placement(spec: &CircuitSpec) -> Result<Placement, ModelError> {
    let grid = spec.grid;
    let too_small = || ModelError::GridTooSmall {
        width: grid.width,
        height: grid.height,
    };
    if spec.total_units() as u64 > grid.cells() {
        return Err(too_small());
    }
    let mut positions = Vec::with_capacity(spec.groups.len());
    let mut x_offset: i32 = 0;
    for g in &spec.groups {
        let n = g.total_units();
        let block_w = (n as f64).sqrt().ceil() as i32;
        let block_h = (n as i32 + block_w - 1) / block_w;
        if x_offset + block_w > grid.width as i32 || block_h > grid.height as i32 {
            return Err(too_small());
        }
        let mut group_pos = Vec::with_capacity(g.devices.len());
        let mut k: i32 = 0;
        for d in &g.devices {
            let mut dev_pos = Vec::with_capacity(d.units as usize);
            for _ in 0..d.units {
                dev_pos.push((x_offset + k % block_w, k / block_w));
                k += 1;
            }
            group_pos.push(dev_pos);
        }
        positions.push(group_pos);
        x_offset += block_w + 1;
    }
    let p = Placement::new(grid, positions);
    debug_assert!(p.is_valid());
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn spec_1x1(width: u32, height: u32) -> CircuitSpec {
        CircuitSpec {
            grid: GridSpec { width, height },
            groups: vec![GroupSpec {
                name: "g0".into(),
                devices: vec![DeviceSpec {
                    name: "d0".into(),
                    units: 1,
                }],
            }],
            match_pairs: vec![],
        }
    }

    fn fig2a_scale_spec() -> CircuitSpec {
        let mut groups = Vec::new();
        for gi in 0..3 {
            groups.push(GroupSpec {
                name: format!("g{gi}"),
                devices: (0..2)
                    .map(|di| DeviceSpec {
                        name: format!("g{gi}d{di}"),
                        units: 2,
                    })
                    .collect(),
            });
        }
        CircuitSpec {
            grid: GridSpec {
                width: 8,
                height: 8,
            },
            groups,
            match_pairs: vec![],
        }
    }

    #[test]
    fn initial_placement_smallest_case() {
        let p = initial_placement(&spec_1x1(4, 4)).unwrap();
        assert_eq!(
            p.position(UnitId {
                group: 0,
                device: 0,
                unit: 0
            }),
            (0, 0)
        );
    }

    #[test]
    fn initial_placement_three_blocks() {
        let p = initial_placement(&fig2a_scale_spec()).unwrap();
        assert!(p.is_valid());
        for (gi, expected_x) in [(0usize, 0), (1, 3), (2, 6)] {
            assert_eq!(p.group_anchor(gi), (expected_x, 0));
            let cells = p.group_cells(gi);
            assert_eq!(cells.len(), 4);
            for (x, y) in cells {
                assert!(x >= expected_x && x < expected_x + 2);
                assert!((0..2).contains(&y));
            }
        }
    }

    #[test]
    fn initial_placement_pigeonhole() {
        let mut spec = spec_1x1(4, 4);
        spec.groups[0].devices[0].units = 17;
        assert!(matches!(
            initial_placement(&spec),
            Err(ModelError::GridTooSmall { .. })
        ));
    }

    #[test]
    fn bounding_area_examples() {
        let grid = GridSpec {
            width: 8,
            height: 8,
        };
        let p = Placement::new(grid, vec![vec![vec![(0, 0)]]]);
        assert_eq!(p.bounding_area(), 1);
        let p = Placement::new(grid, vec![vec![vec![(0, 0), (3, 3)]]]);
        assert_eq!(p.bounding_area(), 16);
        let p = initial_placement(&fig2a_scale_spec()).unwrap();
        assert_eq!(p.bounding_area(), 16);
    }

    #[test]
    fn single_unit_center_has_8_moves() {
        let p = initial_placement(&spec_1x1(5, 5)).unwrap();
        let m = MoveAction::Bottom {
            unit: UnitId {
                group: 0,
                device: 0,
                unit: 0,
            },
            dir: Dir::NE,
        };
        let p = p.apply_move(&m).unwrap().apply_move(&m).unwrap(); // to (2,2)
        assert_eq!(p.legal_moves(Agent::Group(0)).len(), 8);
    }

    #[test]
    fn single_unit_corner_has_3_moves() {
        let p = initial_placement(&spec_1x1(5, 5)).unwrap();
        let moves = p.legal_moves(Agent::Group(0));
        let dirs: Vec<Dir> = moves
            .iter()
            .map(|m| match m {
                MoveAction::Bottom { dir, .. } => *dir,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(dirs, vec![Dir::N, Dir::NE, Dir::E]);
    }

    // Frozen occupancy reproducing the five-of-eight legal move count: an
    // L-shaped 3-unit group, mover at the corner cell.
    #[test]
    fn l_shape_mover_has_5_of_8_moves() {
        let grid = GridSpec {
            width: 4,
            height: 4,
        };
        let p = Placement::new(grid, vec![vec![vec![(1, 1), (1, 2), (2, 1)]]]);
        assert!(p.is_valid());
        let mover = UnitId {
            group: 0,
            device: 0,
            unit: 0,
        };
        let legal: Vec<Dir> = p
            .legal_moves(Agent::Group(0))
            .into_iter()
            .filter_map(|m| match m {
                MoveAction::Bottom { unit, dir } if unit == mover => Some(dir),
                _ => None,
            })
            .collect();
        assert_eq!(legal, vec![Dir::NE, Dir::SE, Dir::S, Dir::W, Dir::NW]);
    }

    #[test]
    fn apply_move_examples() {
        let grid = GridSpec {
            width: 5,
            height: 5,
        };
        let p = Placement::new(grid, vec![vec![vec![(1, 1)]]]);
        let u = UnitId {
            group: 0,
            device: 0,
            unit: 0,
        };
        let q = p
            .apply_move(&MoveAction::Bottom { unit: u, dir: Dir::E })
            .unwrap();
        assert_eq!(q.position(u), (2, 1));
        assert_eq!(p.position(u), (1, 1)); // value semantics

        let p2 = Placement::new(grid, vec![vec![vec![(1, 1), (2, 1)]]]);
        let q2 = p2
            .apply_move(&MoveAction::Top {
                group: 0,
                dir: Dir::N,
            })
            .unwrap();
        assert_eq!(q2.group_cells(0), vec![(1, 2), (2, 2)]);
    }

    #[test]
    fn illegal_move_rejected() {
        let grid = GridSpec {
            width: 2,
            height: 1,
        };
        let p = Placement::new(grid, vec![vec![vec![(0, 0)]]]);
        let m = MoveAction::Bottom {
            unit: UnitId {
                group: 0,
                device: 0,
                unit: 0,
            },
            dir: Dir::W,
        };
        assert!(matches!(p.apply_move(&m), Err(ModelError::IllegalMove(_))));
    }

    #[test]
    fn wirelength_examples() {
        let grid = GridSpec {
            width: 8,
            height: 8,
        };
        let spec = CircuitSpec {
            grid,
            groups: vec![GroupSpec {
                name: "g0".into(),
                devices: vec![
                    DeviceSpec {
                        name: "a".into(),
                        units: 1,
                    },
                    DeviceSpec {
                        name: "b".into(),
                        units: 1,
                    },
                ],
            }],
            match_pairs: vec![PairSpec {
                device_a: "a".into(),
                device_b: "b".into(),
                sensitivity: 1.0,
            }],
        };
        // centroids (0.5,0.5) and (2.5,3.5): pair HPWL 5, group HPWL 5
        let p = Placement::new(grid, vec![vec![vec![(0, 0)], vec![(2, 3)]]]);
        assert!((p.wirelength(&spec) - 10.0).abs() < 1e-12);

        // translation invariance
        let q = Placement::new(grid, vec![vec![vec![(1, 1)], vec![(3, 4)]]]);
        assert!((p.wirelength(&spec) - q.wirelength(&spec)).abs() < 1e-12);
        assert_eq!(p.bounding_area(), q.bounding_area());
    }

    #[test]
    fn legal_moves_deterministic() {
        let p = initial_placement(&fig2a_scale_spec()).unwrap();
        assert_eq!(p.legal_moves(Agent::Top), p.legal_moves(Agent::Top));
        assert_eq!(
            p.legal_moves(Agent::Group(1)),
            p.legal_moves(Agent::Group(1))
        );
    }

    #[test]
    fn top_move_preserves_relative_geometry() {
        let p = initial_placement(&fig2a_scale_spec()).unwrap();
        for m in p.legal_moves(Agent::Top) {
            let q = p.apply_move(&m).unwrap();
            let g = match m {
                MoveAction::Top { group, .. } => group,
                _ => unreachable!(),
            };
            let (ax, ay) = p.group_anchor(g);
            let (bx, by) = q.group_anchor(g);
            let before: HashSet<(i32, i32)> = p
                .group_cells(g)
                .iter()
                .map(|&(x, y)| (x - ax, y - ay))
                .collect();
            let after: HashSet<(i32, i32)> = q
                .group_cells(g)
                .iter()
                .map(|&(x, y)| (x - bx, y - by))
                .collect();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn validation_catches_duplicates_and_bad_pairs() {
        let mut spec = fig2a_scale_spec();
        spec.groups[1].devices[0].name = "g0d0".into();
        spec.match_pairs.push(PairSpec {
            device_a: "nope".into(),
            device_b: "nope".into(),
            sensitivity: -1.0,
        });
        let errs = spec.validation_errors();
        assert!(errs.iter().any(|e| e.contains("duplicate device name")));
        assert!(errs.iter().any(|e| e.contains("unknown device")));
        assert!(errs.iter().any(|e| e.contains("must differ")));
        assert!(errs.iter().any(|e| e.contains("sensitivity")));
    }
}
