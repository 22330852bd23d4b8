//! Finite metric measure spaces, open balls and document ingestion.

use std::collections::BTreeMap;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute slack allowed on the triangle inequality when validating
/// hand-entered distance matrices.
pub const TRIANGLE_TOLERANCE: f64 = 1e-12;

/// An undirected edge `(a, b)` of positive length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "(usize, usize, f64)", into = "(usize, usize, f64)")]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

impl From<(usize, usize, f64)> for Edge {
    fn from((a, b, length): (usize, usize, f64)) -> Self {
        Edge { a, b, length }
    }
}

impl From<Edge> for (usize, usize, f64) {
    fn from(e: Edge) -> Self {
        (e.a, e.b, e.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    /// Distances given explicitly.
    Matrix,
    /// Distances are shortest-path lengths along the stored edges.
    Graph,
}

/// Marks a space as an axis-aligned, cell-centred grid sample. Point
/// `row * cols + col` sits at `((col + 1/2) h, (row + 1/2) h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridShape {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
}

impl GridShape {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    /// Cell-centre coordinates `(x, y)` of point `i`.
    pub fn coords(&self, i: usize) -> (f64, f64) {
        let (row, col) = (i / self.cols, i % self.cols);
        (
            (col as f64 + 0.5) * self.spacing,
            (row as f64 + 0.5) * self.spacing,
        )
    }
}

/// Distances from one center, grouped into shells of equal distance.
///
/// Shell `i` holds the points at distance exactly `radii[i]`; the closed
/// set `{y : d(x, y) <= radii[i]}` is `order[..ends[i]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Shells {
    order: Vec<u32>,
    ends: Vec<u32>,
    radii: Vec<f64>,
    cum_mass: Vec<f64>,
}

impl Shells {
    fn build(row: &[f64], mass: &[f64]) -> Self {
        let mut order: Vec<u32> = (0..row.len() as u32).collect();
        order.sort_by(|&a, &b| row[a as usize].total_cmp(&row[b as usize]).then(a.cmp(&b)));
        let mut ends = Vec::new();
        let mut radii = Vec::new();
        let mut cum_mass = Vec::new();
        let mut acc = 0.0;
        for (pos, &p) in order.iter().enumerate() {
            acc += mass[p as usize];
            let d = row[p as usize];
            let last_of_shell = order.get(pos + 1).is_none_or(|&q| row[q as usize] != d);
            if last_of_shell {
                ends.push(pos as u32 + 1);
                radii.push(d);
                cum_mass.push(acc);
            }
        }
        Shells {
            order,
            ends,
            radii,
            cum_mass,
        }
    }

    /// Points ordered by (distance, index).
    pub fn order(&self) -> &[u32] {
        &self.order
    }

    /// Distinct distances, ascending; `radii()[0] == 0`.
    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Exclusive end in [`Shells::order`] of each closed ball.
    pub fn ends(&self) -> &[u32] {
        &self.ends
    }

    /// `μ({y : d(x, y) <= radii()[i]})`.
    pub fn cumulative_mass(&self) -> &[f64] {
        &self.cum_mass
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Members of the closed ball of shell `i`.
    pub fn members(&self, i: usize) -> &[u32] {
        &self.order[..self.ends[i] as usize]
    }

    /// Number of shells realizable by an open ball of radius at most `r_max`,
    /// i.e. shells with radius strictly below `r_max`.
    pub fn realizable(&self, r_max: f64) -> usize {
        self.radii.partition_point(|&t| t < r_max)
    }

    /// Number of shells with radius `<= t`.
    pub fn up_to(&self, t: f64) -> usize {
        self.radii.partition_point(|&s| s <= t)
    }

    /// Shell index of the open ball `B(x, r)`, `None` when `r <= 0`.
    pub fn open_ball_shell(&self, r: f64) -> Option<usize> {
        self.realizable(r).checked_sub(1)
    }
}

/// A finite metric measure space with strictly positive point masses.
///
/// Immutable after construction; per-center distance shells are computed
/// eagerly so that every ball query is a binary search.
#[derive(Debug, Clone)]
pub struct MetricMeasureSpace {
    name: String,
    labels: Vec<String>,
    dist: Vec<f64>,
    mass: Vec<f64>,
    kind: MetricKind,
    edges: Option<Vec<Edge>>,
    grid: Option<GridShape>,
    shells: Vec<Shells>,
}

impl PartialEq for MetricMeasureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.labels == other.labels
            && self.kind == other.kind
            && self.edges == other.edges
            && self.grid == other.grid
            && self.mass.len() == other.mass.len()
            && self
                .mass
                .iter()
                .zip(&other.mass)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self
                .dist
                .iter()
                .zip(&other.dist)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

fn validate_masses(mass: &[f64]) -> Result<()> {
    for (index, &m) in mass.iter().enumerate() {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::NonPositiveMass { index, mass: m });
        }
    }
    Ok(())
}

fn validate_edges(n: usize, edges: &[Edge]) -> Result<()> {
    for e in edges {
        if e.a >= n || e.b >= n {
            return Err(Error::Schema(format!(
                "edge ({}, {}) references a point outside 0..{n}",
                e.a, e.b
            )));
        }
        if e.a == e.b {
            return Err(Error::Schema(format!("self-loop at point {}", e.a)));
        }
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(Error::Schema(format!(
                "edge ({}, {}) has non-positive length {}",
                e.a, e.b, e.length
            )));
        }
    }
    Ok(())
}

/// All-pairs shortest-path lengths, symmetrized by taking the smaller of the
/// two directed results.
pub(crate) fn shortest_paths(n: usize, edges: &[Edge]) -> Result<Vec<f64>> {
    let mut graph = UnGraph::<(), f64>::with_capacity(n, edges.len());
    for _ in 0..n {
        graph.add_node(());
    }
    for e in edges {
        graph.add_edge(NodeIndex::new(e.a), NodeIndex::new(e.b), e.length);
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let reached = dijkstra(&graph, NodeIndex::new(s), None, |e| *e.weight());
            let mut row = vec![f64::INFINITY; n];
            for (node, d) in reached {
                row[node.index()] = d;
            }
            row
        })
        .collect();
    if let Some(j) = rows
        .first()
        .and_then(|r| r.iter().position(|d| d.is_infinite()))
    {
        return Err(Error::Disconnected(j));
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            dist[i * n + j] = rows[i][j].min(rows[j][i]);
        }
    }
    Ok(dist)
}

fn validate_matrix(dist: &[f64], n: usize) -> Result<()> {
    for i in 0..n {
        if dist[i * n + i] != 0.0 {
            return Err(Error::Metric(format!(
                "d({i},{i}) = {} is not 0",
                dist[i * n + i]
            )));
        }
        for j in 0..n {
            let d = dist[i * n + j];
            if !d.is_finite() {
                return Err(Error::Metric(format!("d({i},{j}) is not finite")));
            }
            if d != dist[j * n + i] {
                return Err(Error::Metric(format!("d({i},{j}) != d({j},{i})")));
            }
            if i != j && d <= 0.0 {
                return Err(Error::Metric(format!("d({i},{j}) = {d} is not positive")));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            let dij = dist[i * n + j];
            for k in 0..n {
                let via = dij + dist[j * n + k];
                if dist[i * n + k] > via + TRIANGLE_TOLERANCE {
                    return Err(Error::Metric(format!(
                        "triangle inequality fails: d({i},{k}) = {} > d({i},{j}) + d({j},{k}) = {via}",
                        dist[i * n + k]
                    )));
                }
            }
        }
    }
    Ok(())
}

impl MetricMeasureSpace {
    fn assemble(
        name: String,
        dist: Vec<f64>,
        mass: Vec<f64>,
        kind: MetricKind,
        edges: Option<Vec<Edge>>,
    ) -> Self {
        let n = mass.len();
        let shells = (0..n)
            .into_par_iter()
            .map(|x| Shells::build(&dist[x * n..(x + 1) * n], &mass))
            .collect();
        MetricMeasureSpace {
            name,
            labels: (0..n).map(|i| i.to_string()).collect(),
            dist,
            mass,
            kind,
            edges,
            grid: None,
            shells,
        }
    }

    /// A space with an explicit distance matrix. `edges`, when given, record
    /// an ambient graph structure (see [`crate::geometry::length_metric`]).
    pub fn from_matrix(
        name: impl Into<String>,
        d: &[Vec<f64>],
        mass: Vec<f64>,
        edges: Option<Vec<Edge>>,
    ) -> Result<Self> {
        let n = d.len();
        if n == 0 {
            return Err(Error::Schema("space has no points".into()));
        }
        if let Some(row) = d.iter().position(|row| row.len() != n) {
            return Err(Error::Schema(format!(
                "distance matrix row {row} has length {}, expected {n}",
                d[row].len()
            )));
        }
        if mass.len() != n {
            return Err(Error::Schema(format!(
                "mu has {} entries, expected {n}",
                mass.len()
            )));
        }
        validate_masses(&mass)?;
        if let Some(edges) = &edges {
            validate_edges(n, edges)?;
        }
        let dist: Vec<f64> = d.iter().flatten().copied().collect();
        validate_matrix(&dist, n)?;
        Ok(Self::assemble(
            name.into(),
            dist,
            mass,
            MetricKind::Matrix,
            edges,
        ))
    }

    /// A graph-backed space whose metric is the shortest-path length.
    pub fn from_graph(
        name: impl Into<String>,
        n: usize,
        edges: Vec<Edge>,
        mass: Vec<f64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Schema("space has no points".into()));
        }
        if mass.len() != n {
            return Err(Error::Schema(format!(
                "mu has {} entries, expected {n}",
                mass.len()
            )));
        }
        validate_masses(&mass)?;
        validate_edges(n, &edges)?;
        // shortest-path metrics satisfy the metric axioms by construction
        let dist = shortest_paths(n, &edges)?;
        Ok(Self::assemble(
            name.into(),
            dist,
            mass,
            MetricKind::Graph,
            Some(edges),
        ))
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Schema(format!(
                "{} labels for {} points",
                labels.len(),
                self.n()
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_grid(mut self, grid: GridShape) -> Result<Self> {
        if grid.len() != self.n() || !(grid.spacing.is_finite() && grid.spacing > 0.0) {
            return Err(Error::Schema(format!(
                "grid {}x{} with spacing {} does not describe {} points",
                grid.rows,
                grid.cols,
                grid.spacing,
                self.n()
            )));
        }
        self.grid = Some(grid);
        Ok(self)
    }

    pub(crate) fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Same points, masses and decorations, with distances replaced.
    pub(crate) fn with_distances(&self, dist: Vec<f64>, kind: MetricKind) -> Self {
        let mut out = Self::assemble(
            self.name.clone(),
            dist,
            self.mass.clone(),
            kind,
            self.edges.clone(),
        );
        out.labels = self.labels.clone();
        out.grid = self.grid;
        out
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.mass.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n() + j]
    }

    /// Row `i` of the distance matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.dist[i * n..(i + 1) * n]
    }

    #[inline]
    pub fn mass(&self, i: usize) -> f64 {
        self.mass[i]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().fold(0.0, |a, b| a + b)
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    /// True when the metric is the shortest-path metric of the stored edges.
    pub fn is_length_metric(&self) -> bool {
        self.kind == MetricKind::Graph
    }

    pub fn edges(&self) -> Option<&[Edge]> {
        self.edges.as_deref()
    }

    pub fn grid(&self) -> Option<&GridShape> {
        self.grid.as_ref()
    }

    pub fn shells(&self, center: usize) -> &Shells {
        &self.shells[center]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// Mass of an arbitrary point set.
    pub fn measure_of(&self, points: &[usize]) -> f64 {
        points.iter().map(|&i| self.mass[i]).fold(0.0, |a, b| a + b)
    }
}

/// A function on the points of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarField(Vec<f64>);

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Schema(format!(
                "field value at point {i} is not finite"
            )));
        }
        Ok(ScalarField(values))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        ScalarField(vec![c; n])
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Self {
        ScalarField((0..n).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField(self.0.iter().map(|&v| f(v)).collect())
    }

    pub(crate) fn check_len(&self, space: &MetricMeasureSpace, what: &str) -> Result<()> {
        if self.len() != space.n() {
            return Err(Error::Schema(format!(
                "{what} has {} values, space has {} points",
                self.len(),
                space.n()
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for ScalarField {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A nonnegative measure given by its point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointMeasure(Vec<f64>);

impl PointMeasure {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if let Some(i) = masses.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Schema(format!(
                "measure mass at point {i} is negative or not finite"
            )));
        }
        Ok(PointMeasure(masses))
    }

    pub fn zero(n: usize) -> Self {
        PointMeasure(vec![0.0; n])
    }

    pub fn masses(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.iter().fold(0.0, |a, b| a + b)
    }

    /// `t · ν` for `t >= 0`.
    pub fn scaled(&self, t: f64) -> Self {
        assert!(t >= 0.0, "measures scale by nonnegative factors");
        PointMeasure(self.0.iter().map(|w| w * t).collect())
    }

    /// `ν` restricted to the given points.
    pub fn restricted(&self, points: &[usize]) -> Self {
        let mut out = vec![0.0; self.0.len()];
        for &i in points {
            out[i] = self.0[i];
        }
        PointMeasure(out)
    }

    pub fn measure_of(&self, points: &[usize]) -> f64 {
        points.iter().map(|&i| self.0[i]).fold(0.0, |a, b| a + b)
    }

    pub(crate) fn check_len(&self, space: &MetricMeasureSpace, what: &str) -> Result<()> {
        if self.len() != space.n() {
            return Err(Error::Schema(format!(
                "{what} has {} masses, space has {} points",
                self.len(),
                space.n()
            )));
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for PointMeasure {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// An open ball `B(center, radius) = {y : d(y, center) < radius}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
    /// Member indices, ascending.
    pub members: Vec<usize>,
}

impl Ball {
    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn mass(&self, space: &MetricMeasureSpace) -> f64 {
        space.measure_of(&self.members)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// The open ball `B(center, r)`.
pub fn ball(space: &MetricMeasureSpace, center: usize, r: f64) -> Result<Ball> {
    if !(r > 0.0) {
        return Err(Error::NonPositiveRadius(r));
    }
    if center >= space.n() {
        return Err(Error::Precondition(format!(
            "center {center} is not a point"
        )));
    }
    let shells = space.shells(center);
    let shell = shells
        .open_ball_shell(r)
        .expect("the center is at distance 0 < r");
    let mut members: Vec<usize> = shells.members(shell).iter().map(|&p| p as usize).collect();
    members.sort_unstable();
    Ok(Ball {
        center,
        radius: r,
        members,
    })
}

/// Distinct distances `t < r_max` from `center`, ascending and starting at 0.
///
/// The open balls `B(center, r)` with `0 < r <= r_max` are exactly the
/// closed sets `{y : d(center, y) <= t}` for `t` in the returned list.
pub fn candidate_radii(space: &MetricMeasureSpace, center: usize, r_max: f64) -> Result<Vec<f64>> {
    if !(r_max > 0.0) {
        return Err(Error::NonPositiveRadius(r_max));
    }
    let shells = space.shells(center);
    Ok(shells.radii()[..shells.realizable(r_max)].to_vec())
}

/// Metric section of a space document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MetricSpec {
    Matrix {
        d: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<Edge>>,
    },
    Graph {
        n: usize,
        edges: Vec<Edge>,
    },
}

/// The JSON space document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDocument {
    pub name: String,
    pub metric: MetricSpec,
    pub mu: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridShape>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functions: BTreeMap<String, Vec<f64>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub measures: BTreeMap<String, Vec<f64>>,
}

/// A loaded space together with its named functions and measures.
#[derive(Debug, Clone)]
pub struct Document {
    pub space: MetricMeasureSpace,
    pub functions: BTreeMap<String, ScalarField>,
    pub measures: BTreeMap<String, PointMeasure>,
}

impl Document {
    pub fn function(&self, name: &str) -> Result<&ScalarField> {
        self.functions
            .get(name)
            .ok_or_else(|| Error::Schema(format!("no function named {name:?}")))
    }

    pub fn measure(&self, name: &str) -> Result<&PointMeasure> {
        self.measures
            .get(name)
            .ok_or_else(|| Error::Schema(format!("no measure named {name:?}")))
    }
}

impl SpaceDocument {
    pub fn build(&self) -> Result<Document> {
        let space = match &self.metric {
            MetricSpec::Matrix { d, edges } => {
                MetricMeasureSpace::from_matrix(&self.name, d, self.mu.clone(), edges.clone())?
            }
            MetricSpec::Graph { n, edges } => {
                MetricMeasureSpace::from_graph(&self.name, *n, edges.clone(), self.mu.clone())?
            }
        };
        let space = match &self.labels {
            Some(labels) => space.with_labels(labels.clone())?,
            None => space,
        };
        let space = match self.grid {
            Some(grid) => space.with_grid(grid)?,
            None => space,
        };
        let mut functions = BTreeMap::new();
        for (name, values) in &self.functions {
            let f = ScalarField::new(values.clone())?;
            f.check_len(&space, &format!("function {name:?}"))?;
            functions.insert(name.clone(), f);
        }
        let mut measures = BTreeMap::new();
        for (name, values) in &self.measures {
            let m = PointMeasure::new(values.clone())?;
            m.check_len(&space, &format!("measure {name:?}"))?;
            measures.insert(name.clone(), m);
        }
        Ok(Document {
            space,
            functions,
            measures,
        })
    }

    /// Document describing `space` with the given named data attached.
    pub fn describe(
        space: &MetricMeasureSpace,
        functions: &[(&str, &ScalarField)],
        measures: &[(&str, &PointMeasure)],
    ) -> Self {
        let metric = match (space.kind(), space.edges()) {
            (MetricKind::Graph, Some(edges)) => MetricSpec::Graph {
                n: space.n(),
                edges: edges.to_vec(),
            },
            (_, edges) => MetricSpec::Matrix {
                d: (0..space.n()).map(|i| space.row(i).to_vec()).collect(),
                edges: edges.map(<[Edge]>::to_vec),
            },
        };
        let default_labels = space
            .labels()
            .iter()
            .enumerate()
            .all(|(i, l)| *l == i.to_string());
        SpaceDocument {
            name: space.name().to_string(),
            metric,
            mu: space.masses().to_vec(),
            labels: (!default_labels).then(|| space.labels().to_vec()),
            grid: space.grid().copied(),
            functions: functions
                .iter()
                .map(|(k, v)| (k.to_string(), v.values().to_vec()))
                .collect(),
            measures: measures
                .iter()
                .map(|(k, v)| (k.to_string(), v.masses().to_vec()))
                .collect(),
        }
    }
}

/// Parses and validates a space document.
pub fn load_document(text: &str) -> Result<Document> {
    let doc: SpaceDocument = serde_json::from_str(text)?;
    doc.build()
}

/// Parses and validates a space document, discarding attached data.
pub fn load_space(text: &str) -> Result<MetricMeasureSpace> {
    Ok(load_document(text)?.space)
}

#[cfg(test)]
mod tests {
    use super::*;

    const S2: &str = r#"{"name":"S2","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,1]}"#;

    fn s2() -> MetricMeasureSpace {
        load_space(S2).unwrap()
    }

    #[test]
    fn loads_two_point_space() {
        let s = s2();
        assert_eq!(s.name(), "S2");
        assert_eq!(s.n(), 2);
        assert_eq!(s.dist(0, 1), 1.0);
        assert_eq!(s.kind(), MetricKind::Matrix);
    }

    #[test]
    fn path_graph_distance_is_sum_of_edges() {
        let doc = r#"{"name":"P3","metric":{"type":"graph","n":3,"edges":[[0,1,1],[1,2,1]]},"mu":[1,1,1]}"#;
        let s = load_space(doc).unwrap();
        assert_eq!(s.dist(0, 2), 2.0);
        assert!(s.is_length_metric());
    }

    #[test]
    fn triangle_violation_is_rejected() {
        let doc = r#"{"name":"bad","metric":{"type":"matrix","d":[[0,5,1],[5,0,1],[1,1,0]]},"mu":[1,1,1]}"#;
        assert!(matches!(load_space(doc), Err(Error::Metric(_))));
    }

    #[test]
    fn schema_errors() {
        let asym = r#"{"name":"x","metric":{"type":"matrix","d":[[0,1],[2,0]]},"mu":[1,1]}"#;
        assert!(matches!(load_space(asym), Err(Error::Metric(_))));
        let zero_mass = r#"{"name":"x","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,0]}"#;
        assert!(matches!(
            load_space(zero_mass),
            Err(Error::NonPositiveMass { index: 1, .. })
        ));
        let disconnected =
            r#"{"name":"x","metric":{"type":"graph","n":3,"edges":[[0,1,1]]},"mu":[1,1,1]}"#;
        assert!(matches!(
            load_space(disconnected),
            Err(Error::Disconnected(2))
        ));
        let unknown = r#"{"name":"x","metric":{"type":"matrix","d":[[0]]},"mu":[1],"extra":1}"#;
        assert!(matches!(load_space(unknown), Err(Error::Json(_))));
        let coincident = r#"{"name":"x","metric":{"type":"matrix","d":[[0,0],[0,0]]},"mu":[1,1]}"#;
        assert!(matches!(load_space(coincident), Err(Error::Metric(_))));
        let short_field =
            r#"{"name":"x","metric":{"type":"matrix","d":[[0]]},"mu":[1],"functions":{"u":[1,2]}}"#;
        assert!(matches!(load_document(short_field), Err(Error::Schema(_))));
    }

    #[test]
    fn open_ball_excludes_boundary() {
        let s = s2();
        assert_eq!(ball(&s, 0, 1.0).unwrap().members, vec![0]);
        assert_eq!(ball(&s, 0, 1.5).unwrap().members, vec![0, 1]);
        assert!(matches!(ball(&s, 0, 0.0), Err(Error::NonPositiveRadius(_))));
    }

    #[test]
    fn candidate_radii_examples() {
        let s = s2();
        assert_eq!(candidate_radii(&s, 0, 1.0).unwrap(), vec![0.0]);
        assert_eq!(candidate_radii(&s, 0, 2.0).unwrap(), vec![0.0, 1.0]);
        assert_eq!(
            candidate_radii(&s, 0, f64::INFINITY).unwrap(),
            vec![0.0, 1.0]
        );
        assert!(candidate_radii(&s, 0, -1.0).is_err());
    }

    #[test]
    fn document_round_trip() {
        let doc = load_document(
            r#"{"name":"S2","metric":{"type":"graph","n":2,"edges":[[0,1,1]]},"mu":[1,1],
                "labels":["a","b"],"functions":{"u":[0,2]},"measures":{"nu":[1,1]}}"#,
        )
        .unwrap();
        let described = SpaceDocument::describe(
            &doc.space,
            &[("u", doc.function("u").unwrap())],
            &[("nu", doc.measure("nu").unwrap())],
        );
        let again = described.build().unwrap();
        assert_eq!(again.space, doc.space);
        assert_eq!(again.space.label(1), "b");
    }
}
