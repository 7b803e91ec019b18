//! Line-oriented text formats for costmaps, roadmaps, routes, and run
//! manifests. All floats are written with the shortest round-trip
//! representation, so save/load/save is byte-stable and loaded values
//! are bit-identical to what was saved.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use wayscout_core::{CellIndex, Point, Rect, Roadmap, Route, RouteEdge, TwoValueCostmap};

use crate::config::{parse_pairs, Config};

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|_| anyhow!("bad float `{s}`"))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse::<usize>().map_err(|_| anyhow!("bad integer `{s}`"))
}

/// Lines of a file with comments and blanks removed. The `#` header
/// line identifying the format is kept.
fn data_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .filter(|&(i, l)| i == 0 || !l.starts_with('#'))
        .map(|(_, l)| l)
}

fn check_header(line: Option<&str>, want: &str) -> Result<()> {
    match line {
        Some(got) if got == format!("# {want}") => Ok(()),
        Some(got) => bail!("expected header `# {want}`, got `{got}`"),
        None => bail!("empty file, expected header `# {want}`"),
    }
}

fn keyed<'a>(line: &'a str, key: &str) -> Result<&'a str> {
    let (k, v) = line.split_once('=').ok_or_else(|| anyhow!("expected `{key} = ...`"))?;
    if k.trim() != key {
        bail!("expected key `{key}`, got `{}`", k.trim());
    }
    Ok(v.trim())
}

const COSTMAP_HEADER: &str = "wayscout costmap v1";

/// Costmap as one `cell` line per cell: row, column, stored mean and
/// variance, surveyed flags as a 0/1 string, then the subcell values.
pub fn costmap_to_string(map: &TwoValueCostmap) -> String {
    let n = map.grid_dim();
    let mut s = String::new();
    let _ = writeln!(s, "# {COSTMAP_HEADER}");
    let _ = writeln!(s, "grid_dim = {n}");
    let _ = writeln!(s, "subcell_count = {}", map.subcell_count());
    let _ = writeln!(s, "cell_size = {}", fmt_f64(map.cell_size()));
    let _ = writeln!(s, "seed = {}", map.seed());
    for row in 0..n {
        for col in 0..n {
            let cell = CellIndex::new(row, col);
            let _ = write!(
                s,
                "cell {row} {col} {} {} ",
                fmt_f64(map.cell_mean(cell)),
                fmt_f64(map.cell_variance(cell))
            );
            for &f in map.surveyed_flags(cell) {
                s.push(if f { '1' } else { '0' });
            }
            for &v in map.cell_subcells(cell) {
                let _ = write!(s, " {}", fmt_f64(v));
            }
            s.push('\n');
        }
    }
    s
}

pub fn costmap_from_string(text: &str) -> Result<TwoValueCostmap> {
    let mut lines = data_lines(text);
    check_header(lines.next(), COSTMAP_HEADER)?;
    let grid_dim = parse_usize(keyed(lines.next().unwrap_or(""), "grid_dim")?)?;
    let subcell_count = parse_usize(keyed(lines.next().unwrap_or(""), "subcell_count")?)?;
    let cell_size = parse_f64(keyed(lines.next().unwrap_or(""), "cell_size")?)?;
    let seed = keyed(lines.next().unwrap_or(""), "seed")?
        .parse::<u64>()
        .map_err(|_| anyhow!("bad seed"))?;

    let n_cells = grid_dim
        .checked_mul(grid_dim)
        .ok_or_else(|| anyhow!("grid_dim {grid_dim} overflows"))?;
    let mut subcells = vec![0.0; n_cells * subcell_count];
    let mut mean = vec![0.0; n_cells];
    let mut variance = vec![0.0; n_cells];
    let mut surveyed = vec![false; n_cells * subcell_count];
    let mut seen = vec![false; n_cells];

    for line in lines {
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("cell") => {}
            other => bail!("expected `cell` line, got `{}`", other.unwrap_or("")),
        }
        let row = parse_usize(parts.next().ok_or_else(|| anyhow!("cell line missing row"))?)?;
        let col = parse_usize(parts.next().ok_or_else(|| anyhow!("cell line missing column"))?)?;
        if row >= grid_dim || col >= grid_dim {
            bail!("cell ({row}, {col}) outside {grid_dim}x{grid_dim} grid");
        }
        let idx = row * grid_dim + col;
        if seen[idx] {
            bail!("cell ({row}, {col}) appears twice");
        }
        seen[idx] = true;
        mean[idx] = parse_f64(parts.next().ok_or_else(|| anyhow!("cell line missing mean"))?)?;
        variance[idx] = parse_f64(parts.next().ok_or_else(|| anyhow!("cell line missing variance"))?)?;
        let flags = parts.next().ok_or_else(|| anyhow!("cell line missing surveyed flags"))?;
        if flags.len() != subcell_count {
            bail!("expected {subcell_count} surveyed flags, got `{flags}`");
        }
        for (k, ch) in flags.chars().enumerate() {
            surveyed[idx * subcell_count + k] = match ch {
                '0' => false,
                '1' => true,
                other => bail!("surveyed flag must be 0 or 1, got `{other}`"),
            };
        }
        for k in 0..subcell_count {
            let v = parts.next().ok_or_else(|| anyhow!("cell ({row}, {col}) has too few subcells"))?;
            subcells[idx * subcell_count + k] = parse_f64(v)?;
        }
        if parts.next().is_some() {
            bail!("cell ({row}, {col}) has trailing fields");
        }
    }
    if let Some(idx) = seen.iter().position(|&s| !s) {
        bail!("cell ({}, {}) missing", idx / grid_dim, idx % grid_dim);
    }
    Ok(TwoValueCostmap::from_stored(
        grid_dim,
        subcell_count,
        cell_size,
        seed,
        subcells,
        mean,
        variance,
        surveyed,
    )?)
}

const ROADMAP_HEADER: &str = "wayscout roadmap v1";

pub fn roadmap_to_string(rm: &Roadmap) -> String {
    let b = rm.bounds();
    let mut s = String::new();
    let _ = writeln!(s, "# {ROADMAP_HEADER}");
    let _ = writeln!(
        s,
        "bounds = {} {} {} {}",
        fmt_f64(b.min().x),
        fmt_f64(b.min().y),
        fmt_f64(b.max().x),
        fmt_f64(b.max().y)
    );
    let _ = writeln!(s, "vertices = {}", rm.vertex_count());
    for v in rm.vertices() {
        let _ = writeln!(s, "v {} {}", fmt_f64(v.x), fmt_f64(v.y));
    }
    let pairs = rm.edge_pairs();
    let _ = writeln!(s, "edges = {}", pairs.len());
    for (i, j) in pairs {
        let _ = writeln!(s, "e {i} {j} {}", fmt_f64(rm.edge_cost(i, j)));
    }
    match rm.endpoints() {
        Some((si, gi)) => {
            let _ = writeln!(s, "endpoints = {si} {gi}");
        }
        None => {
            let _ = writeln!(s, "endpoints = none");
        }
    }
    s
}

pub fn roadmap_from_string(text: &str) -> Result<Roadmap> {
    let mut lines = data_lines(text);
    check_header(lines.next(), ROADMAP_HEADER)?;
    let bounds_fields: Vec<&str> =
        keyed(lines.next().unwrap_or(""), "bounds")?.split_whitespace().collect();
    if bounds_fields.len() != 4 {
        bail!("bounds needs four numbers");
    }
    let bounds = Rect::new(
        parse_f64(bounds_fields[0])?,
        parse_f64(bounds_fields[1])?,
        parse_f64(bounds_fields[2])?,
        parse_f64(bounds_fields[3])?,
    )?;
    let n = parse_usize(keyed(lines.next().unwrap_or(""), "vertices")?)?;
    let mut vertices = Vec::with_capacity(n);
    for _ in 0..n {
        let line = lines.next().ok_or_else(|| anyhow!("vertex list truncated"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some("v") {
            bail!("expected `v x y`, got `{line}`");
        }
        let x = parse_f64(parts.next().ok_or_else(|| anyhow!("vertex missing x"))?)?;
        let y = parse_f64(parts.next().ok_or_else(|| anyhow!("vertex missing y"))?)?;
        vertices.push(Point::new(x, y));
    }
    let m = parse_usize(keyed(lines.next().unwrap_or(""), "edges")?)?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or_else(|| anyhow!("edge list truncated"))?;
        let mut parts = line.split_whitespace();
        if parts.next() != Some("e") {
            bail!("expected `e i j cost`, got `{line}`");
        }
        let i = parse_usize(parts.next().ok_or_else(|| anyhow!("edge missing endpoint"))?)?;
        let j = parse_usize(parts.next().ok_or_else(|| anyhow!("edge missing endpoint"))?)?;
        let cost = parse_f64(parts.next().ok_or_else(|| anyhow!("edge missing cost"))?)?;
        edges.push((i, j, cost));
    }
    let rm = Roadmap::from_parts(vertices, &edges, bounds)?;
    match keyed(lines.next().unwrap_or("endpoints = none"), "endpoints")? {
        "none" => Ok(rm),
        pair => {
            let mut parts = pair.split_whitespace();
            let si = parse_usize(parts.next().ok_or_else(|| anyhow!("endpoints missing index"))?)?;
            let gi = parse_usize(parts.next().ok_or_else(|| anyhow!("endpoints missing index"))?)?;
            Ok(rm.with_endpoints(si, gi)?)
        }
    }
}

const ROUTE_HEADER: &str = "wayscout route v1";

pub fn route_to_string(route: &Route) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {ROUTE_HEADER}");
    let verts: Vec<String> = route.vertices.iter().map(usize::to_string).collect();
    let _ = writeln!(s, "vertices = {}", verts.join(" "));
    let _ = writeln!(s, "total_cost = {}", fmt_f64(route.total_cost));
    let _ = writeln!(s, "total_base_cost = {}", fmt_f64(route.total_base_cost));
    let _ = writeln!(s, "total_length = {}", fmt_f64(route.total_length));
    for e in &route.edges {
        let _ = writeln!(
            s,
            "edge {} {} {} {} {} {} {} {} {}",
            e.from,
            e.to,
            fmt_f64(e.a.x),
            fmt_f64(e.a.y),
            fmt_f64(e.b.x),
            fmt_f64(e.b.y),
            fmt_f64(e.length),
            fmt_f64(e.cost),
            fmt_f64(e.base_cost)
        );
    }
    s
}

pub fn route_from_string(text: &str) -> Result<Route> {
    let mut lines = data_lines(text);
    check_header(lines.next(), ROUTE_HEADER)?;
    let verts_field = keyed(lines.next().unwrap_or(""), "vertices")?;
    let vertices: Vec<usize> =
        verts_field.split_whitespace().map(parse_usize).collect::<Result<_>>()?;
    let total_cost = parse_f64(keyed(lines.next().unwrap_or(""), "total_cost")?)?;
    let total_base_cost = parse_f64(keyed(lines.next().unwrap_or(""), "total_base_cost")?)?;
    let total_length = parse_f64(keyed(lines.next().unwrap_or(""), "total_length")?)?;
    let mut edges = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 10 || fields[0] != "edge" {
            bail!("expected `edge from to ax ay bx by length cost base_cost`, got `{line}`");
        }
        edges.push(RouteEdge {
            from: parse_usize(fields[1])?,
            to: parse_usize(fields[2])?,
            a: Point::new(parse_f64(fields[3])?, parse_f64(fields[4])?),
            b: Point::new(parse_f64(fields[5])?, parse_f64(fields[6])?),
            length: parse_f64(fields[7])?,
            cost: parse_f64(fields[8])?,
            base_cost: parse_f64(fields[9])?,
        });
    }
    if edges.len() + 1 != vertices.len() && !(vertices.is_empty() && edges.is_empty()) {
        bail!("route has {} vertices but {} edges", vertices.len(), edges.len());
    }
    Ok(Route { vertices, edges, total_cost, total_base_cost, total_length })
}

const MANIFEST_HEADER: &str = "wayscout manifest v1";

/// A manifest freezes everything needed to reproduce a run: the
/// subcommand, the seed list, and the full configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub experiment: String,
    pub seeds: Vec<u64>,
    pub config: Config,
}

pub fn manifest_to_string(m: &Manifest) -> String {
    let seeds: Vec<String> = m.seeds.iter().map(u64::to_string).collect();
    format!(
        "# {MANIFEST_HEADER}\nexperiment = {}\nseeds = {}\n{}",
        m.experiment,
        seeds.join(","),
        m.config.emit()
    )
}

pub fn manifest_from_string(text: &str) -> Result<Manifest> {
    let pairs = parse_pairs(text)?;
    let mut experiment = None;
    let mut seeds = None;
    let mut config = Config::default();
    for (key, value) in &pairs {
        match key.as_str() {
            "experiment" => experiment = Some(value.clone()),
            "seeds" => {
                let parsed: Result<Vec<u64>> = value
                    .split(',')
                    .map(|s| s.trim().parse::<u64>().map_err(|_| anyhow!("bad seed `{s}`")))
                    .collect();
                seeds = Some(parsed?);
            }
            _ => config.apply(key, value).context("manifest config entry")?,
        }
    }
    Ok(Manifest {
        experiment: experiment.ok_or_else(|| anyhow!("manifest missing `experiment`"))?,
        seeds: seeds.ok_or_else(|| anyhow!("manifest missing `seeds`"))?,
        config,
    })
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

/// Rows of tab-separated values under a `#`-prefixed column header.
pub struct TsvWriter {
    out: String,
    columns: usize,
}

impl TsvWriter {
    pub fn new(columns: &[&str]) -> Self {
        TsvWriter { out: format!("# {}\n", columns.join("\t")), columns: columns.len() }
    }

    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(fields.len(), self.columns, "row width mismatch");
        self.out.push_str(&fields.join("\t"));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}
