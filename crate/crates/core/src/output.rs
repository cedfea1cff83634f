//! Output files: time-series and snapshot CSV, JSON checkpoints, and the
//! table and SVG renderings used by the `report` command.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so a file
//! is a pure function of the run and re-reading it recovers every value bit
//! for bit.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::dynamics::{Observer, Record, SimState};
use crate::error::{Error, Result};
use crate::geometry::Mode;

/// First line of every CSV file.
pub const UNITS_HEADER: &str = "# units: SI. Planar runs report per unit depth (areas m^2/m, energies J/m, \
dissipation W/m); axisymmetric runs report full 3-D values. Angles in degrees.";

pub const CHECKPOINT_MAGIC: &str = "triline-checkpoint 1";

fn io(e: std::io::Error) -> Error {
    Error::InvalidInput(format!("i/o: {e}"))
}

fn num(x: f64) -> String {
    format!("{x:e}")
}

fn mode_line(mode: Mode) -> String {
    format!("# mode: {}", if mode == Mode::Planar { "planar" } else { "axisymmetric" })
}

/// Column names of the time series for this state's phases and junctions.
pub fn timeseries_columns(state: &SimState) -> Vec<String> {
    let mut cols: Vec<String> = [
        "step",
        "t",
        "e_kinetic_bulk",
        "e_kinetic_interface",
        "e_bulk",
        "e_interface",
        "e_line",
        "e_total",
        "d_normal",
        "d_slip",
        "d_sorption",
        "d_junction",
        "d_total",
        "total_mass",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for p in &state.phases {
        cols.push(format!("mass_{}", p.label));
    }
    for jn in &state.junctions {
        for phase in junction_phases(state, jn) {
            cols.push(format!("angle_{}_{}", jn.id, phase));
        }
        cols.push(format!("kirchhoff_{}", jn.id));
    }
    cols.push("max_speed".into());
    cols.push("max_flux".into());
    cols.push("remeshed".into());
    cols
}

/// The three phases around a junction, sorted, so columns do not depend on
/// the arms' angular order.
fn junction_phases(state: &SimState, jn: &crate::geometry::TripleJunction) -> Vec<String> {
    let mut v: Vec<String> = jn
        .incident
        .iter()
        .flat_map(|&(c, _)| [state.curves[c].side_minus.clone(), state.curves[c].side_plus.clone()])
        .collect();
    v.sort();
    v.dedup();
    v
}

pub fn timeseries_row(record: &Record) -> String {
    let l = &record.ledger;
    let mut v = vec![
        record.step.to_string(),
        num(l.t),
        num(l.e_kinetic_bulk),
        num(l.e_kinetic_interface),
        num(l.e_bulk),
        num(l.e_interface),
        num(l.e_line),
        num(l.e_total),
        num(l.d_normal),
        num(l.d_slip),
        num(l.d_sorption),
        num(l.d_junction),
        num(l.dissipation()),
        num(record.total_mass),
    ];
    v.extend(record.phase_mass.iter().map(|m| num(*m)));
    for (angles, k) in record.angles.iter().zip(&record.kirchhoff) {
        let mut a: Vec<_> = angles.iter().collect();
        a.sort_by(|x, y| x.phase.cmp(&y.phase));
        v.extend(a.iter().map(|s| num(s.degrees())));
        v.push(num(*k));
    }
    v.push(num(record.max_speed));
    v.push(num(record.max_flux));
    v.push(u8::from(record.remeshed).to_string());
    v.join(",")
}

/// Markers of every curve with their last velocity and the density of the
/// segment that starts at each marker.
pub fn snapshot_csv(state: &SimState) -> String {
    let mut s = String::new();
    writeln!(s, "{UNITS_HEADER}").unwrap();
    writeln!(s, "{}", mode_line(state.mode)).unwrap();
    writeln!(s, "# step {} t {}", state.step, num(state.t)).unwrap();
    writeln!(s, "curve,marker,x,y,vx,vy,segment_density").unwrap();
    for (ci, c) in state.curves.iter().enumerate() {
        let rho = c.densities();
        for (i, p) in c.markers.iter().enumerate() {
            let v = state.velocity.get(ci).and_then(|v| v.get(i)).copied().unwrap_or_default();
            let d = rho.get(i).map_or(String::new(), |r| num(*r));
            writeln!(s, "{},{},{},{},{},{},{}", c.id, i, num(p.x), num(p.y), num(v.x), num(v.y), d).unwrap();
        }
    }
    s
}

pub fn write_checkpoint(path: &Path, state: &SimState) -> Result<()> {
    let json = serde_json::to_string(state).map_err(|e| Error::InvalidInput(format!("checkpoint encode: {e}")))?;
    std::fs::write(path, format!("{CHECKPOINT_MAGIC}\n{json}\n")).map_err(io)
}

pub fn read_checkpoint(path: &Path) -> Result<SimState> {
    let text = std::fs::read_to_string(path).map_err(io)?;
    let (head, body) = text.split_once('\n').unwrap_or((&text, ""));
    if head.trim() != CHECKPOINT_MAGIC {
        return Err(Error::InvalidInput(format!("{} is not a triline checkpoint", path.display())));
    }
    let state: SimState =
        serde_json::from_str(body).map_err(|e| Error::InvalidInput(format!("checkpoint decode: {e}")))?;
    state.validate()?;
    Ok(state)
}

/// Writes `timeseries.csv`, `snapshot_<step>.csv` and `checkpoint_<step>.json`
/// into one directory.
pub struct CsvObserver {
    dir: PathBuf,
    series: Option<BufWriter<File>>,
    pub last_checkpoint: Option<PathBuf>,
    pub snapshots: Vec<PathBuf>,
}

impl CsvObserver {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(io)?;
        Ok(CsvObserver { dir: dir.to_path_buf(), series: None, last_checkpoint: None, snapshots: vec![] })
    }

    pub fn timeseries_path(&self) -> PathBuf {
        self.dir.join("timeseries.csv")
    }

    /// Writes a checkpoint of `state` now, e.g. after a failure.
    pub fn emergency_checkpoint(&mut self, state: &SimState) -> Result<PathBuf> {
        let path = self.dir.join(format!("checkpoint_{:08}_failed.json", state.step));
        write_checkpoint(&path, state)?;
        self.last_checkpoint = Some(path.clone());
        Ok(path)
    }

    pub fn finish(&mut self) -> Result<()> {
        if let Some(w) = self.series.as_mut() {
            w.flush().map_err(io)?;
        }
        Ok(())
    }

    fn open_series(&mut self, layout: &SimState) -> Result<&mut BufWriter<File>> {
        if self.series.is_none() {
            let mut w = BufWriter::new(File::create(self.timeseries_path()).map_err(io)?);
            writeln!(w, "{UNITS_HEADER}").map_err(io)?;
            writeln!(w, "{}", mode_line(layout.mode)).map_err(io)?;
            writeln!(w, "{}", timeseries_columns(layout).join(",")).map_err(io)?;
            self.series = Some(w);
        }
        Ok(self.series.as_mut().unwrap())
    }
}

/// Ties a [`CsvObserver`] to the state layout so the header can be written.
pub struct RunWriter<'a> {
    pub csv: &'a mut CsvObserver,
    pub layout: SimState,
}

impl Observer for RunWriter<'_> {
    fn record(&mut self, record: &Record) -> Result<()> {
        let w = self.csv.open_series(&self.layout)?;
        writeln!(w, "{}", timeseries_row(record)).map_err(io)
    }

    fn snapshot(&mut self, state: &SimState) -> Result<()> {
        let path = self.csv.dir.join(format!("snapshot_{:08}.csv", state.step));
        std::fs::write(&path, snapshot_csv(state)).map_err(io)?;
        if !self.csv.snapshots.contains(&path) {
            self.csv.snapshots.push(path);
        }
        Ok(())
    }

    fn checkpoint(&mut self, state: &SimState) -> Result<()> {
        let path = self.csv.dir.join(format!("checkpoint_{:08}.json", state.step));
        write_checkpoint(&path, state)?;
        self.csv.last_checkpoint = Some(path);
        Ok(())
    }
}

/// A CSV file read back as named numeric columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_table(path: &Path) -> Result<Table> {
    let f = File::open(path).map_err(io)?;
    let mut columns: Option<Vec<String>> = None;
    let mut rows = vec![];
    for (n, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(io)?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        match &columns {
            None => columns = Some(fields.iter().map(|s| s.to_string()).collect()),
            Some(cols) => {
                if fields.len() != cols.len() {
                    return Err(Error::InvalidInput(format!("line {}: expected {} fields", n + 1, cols.len())));
                }
                let row = fields
                    .iter()
                    .map(|f| f.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::InvalidInput(format!("line {}: {e}", n + 1)))?;
                rows.push(row);
            }
        }
    }
    let columns = columns.ok_or_else(|| Error::InvalidInput(format!("{} has no header", path.display())))?;
    Ok(Table { columns, rows })
}

const REPORT_COLUMNS: [&str; 8] =
    ["step", "t", "e_total", "d_normal", "d_slip", "d_sorption", "d_junction", "total_mass"];

/// Human-readable summary of a time series: a sampled table plus decay and
/// conservation figures.
pub fn render_report(table: &Table, max_rows: usize) -> Result<String> {
    let cols: Vec<Vec<f64>> = REPORT_COLUMNS
        .iter()
        .map(|c| table.column(c).ok_or_else(|| Error::InvalidInput(format!("missing column {c}"))))
        .collect::<Result<_>>()?;
    let n = table.rows.len();
    let mut s = String::new();
    for c in REPORT_COLUMNS {
        write!(s, "{c:>14}").unwrap();
    }
    s.push('\n');
    let stride = n.div_ceil(max_rows.max(1)).max(1);
    let mut picks: Vec<usize> = (0..n).step_by(stride).collect();
    if n > 0 && picks.last() != Some(&(n - 1)) {
        picks.push(n - 1);
    }
    for i in picks {
        write!(s, "{:>14}", cols[0][i] as u64).unwrap();
        for col in &cols[1..] {
            write!(s, "{:>14.6e}", col[i]).unwrap();
        }
        s.push('\n');
    }
    let e = &cols[2];
    let worst_rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let mass = &cols[7];
    let drift = mass.iter().map(|m| (m - mass[0]).abs()).fold(0.0, f64::max) / mass.first().map_or(1.0, |m| m.abs());
    let min_channel = cols[3..7].iter().flatten().fold(f64::INFINITY, |a, b| a.min(*b));
    writeln!(s, "\nrows: {n}").unwrap();
    if n >= 2 {
        writeln!(s, "energy: {:.9e} -> {:.9e}", e[0], e[n - 1]).unwrap();
        writeln!(s, "largest step-to-step energy change: {worst_rise:.3e} ({})", if worst_rise <= 0.0 { "nonincreasing" } else { "INCREASE" }).unwrap();
    }
    writeln!(s, "relative mass drift: {drift:.3e}").unwrap();
    writeln!(s, "smallest dissipation channel value: {min_channel:.3e}").unwrap();
    Ok(s)
}

/// A self-contained SVG line chart.
pub fn svg_chart(title: &str, x_label: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let (w, h, ml, mr, mt, mb) = (720.0, 420.0, 80.0, 150.0, 40.0, 50.0);
    let finite = |v: &f64| v.is_finite();
    let xmin = x.iter().copied().filter(finite).fold(f64::INFINITY, f64::min);
    let xmax = x.iter().copied().filter(finite).fold(f64::NEG_INFINITY, f64::max);
    let ys = series.iter().flat_map(|s| s.1.iter().copied()).filter(finite);
    let (mut ymin, mut ymax) = ys.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), y| (a.min(y), b.max(y)));
    if !(ymax > ymin) {
        let pad = if ymin.is_finite() { ymin.abs().max(1.0) * 0.5 } else { 1.0 };
        ymin = if ymin.is_finite() { ymin - pad } else { -1.0 };
        ymax = ymin + 2.0 * pad;
    }
    let (xmin, xmax) = if xmax > xmin { (xmin, xmax) } else { (xmin - 0.5, xmin + 0.5) };
    let px = |v: f64| ml + (v - xmin) / (xmax - xmin) * (w - ml - mr);
    let py = |v: f64| h - mb - (v - ymin) / (ymax - ymin) * (h - mt - mb);
    let colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" font-size="15" text-anchor="middle">{}</text>"#, (w - mr + ml) / 2.0, escape(title)).unwrap();
    writeln!(s, r##"<rect x="{ml}" y="{mt}" width="{}" height="{}" fill="none" stroke="#444"/>"##, w - ml - mr, h - mt - mb).unwrap();
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let yv = ymin + f * (ymax - ymin);
        let xv = xmin + f * (xmax - xmin);
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{:.4e}</text>"#, ml - 6.0, py(yv) + 4.0, yv).unwrap();
        writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{:.3e}</text>"#, px(xv), h - mb + 16.0, xv).unwrap();
        writeln!(s, r##"<line x1="{ml}" x2="{}" y1="{y}" y2="{y}" stroke="#ddd"/>"##, w - mr, y = py(yv)).unwrap();
    }
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, (w - mr + ml) / 2.0, h - 10.0, escape(x_label)).unwrap();
    for (i, (name, ys)) in series.iter().enumerate() {
        let color = colors[i % colors.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(ys)
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .map(|(a, b)| format!("{:.2},{:.2}", px(*a), py(*b)))
            .collect();
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, pts.join(" ")).unwrap();
        let ly = mt + 16.0 + 18.0 * i as f64;
        writeln!(s, r#"<line x1="{}" x2="{}" y1="{ly}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#, w - mr + 10.0, w - mr + 30.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, w - mr + 36.0, ly + 4.0, escape(name)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Energy and dissipation charts for a time series.
pub fn report_charts(table: &Table) -> Result<(String, String)> {
    let col = |c: &str| table.column(c).ok_or_else(|| Error::InvalidInput(format!("missing column {c}")));
    let t = col("t")?;
    let energy = svg_chart("Available energy", "t", &t, &[("E_total", col("e_total")?)]);
    let channels = svg_chart(
        "Dissipation channels",
        "t",
        &t,
        &[
            ("D_normal", col("d_normal")?),
            ("D_slip", col("d_slip")?),
            ("D_sorption", col("d_sorption")?),
            ("D_junction", col("d_junction")?),
        ],
    );
    Ok((energy, channels))
}
