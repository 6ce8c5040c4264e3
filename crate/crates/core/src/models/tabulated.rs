//! Birth function given as a table on an `(s, u)` grid.

use std::io::BufRead;

use crate::error::{Error, Result};
use crate::models::reaction::{ScalarReaction, Side};
use crate::real::Real;

/// Bilinear interpolation of tabulated `f(s, u)`. Outside the table the value
/// is held constant in `s` (so the end rows are the limits `f_+-`) and
/// extended linearly in `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedReaction<T = f64> {
    s: Vec<T>,
    u: Vec<T>,
    /// Row-major: `values[i * u.len() + j] = f(s[i], u[j])`.
    values: Vec<T>,
}

fn check_nodes<T: Real>(name: &str, nodes: &[T]) -> Result<()> {
    if nodes.len() < 2 {
        return Err(Error::config(format!("table needs at least two {name} nodes")));
    }
    if nodes.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config(format!("table {name} nodes must increase strictly")));
    }
    Ok(())
}

/// Index `k` of the cell `[nodes[k], nodes[k+1]]` used for `x`, and the local weight.
fn locate<T: Real>(nodes: &[T], x: T) -> (usize, T) {
    let last = nodes.len() - 2;
    let k = match nodes.iter().rposition(|&n| n <= x) {
        None => 0,
        Some(k) => k.min(last),
    };
    let t = (x - nodes[k]) / (nodes[k + 1] - nodes[k]);
    (k, t)
}

impl<T: Real> TabulatedReaction<T> {
    pub fn new(s: Vec<T>, u: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_nodes("s", &s)?;
        check_nodes("u", &u)?;
        if values.len() != s.len() * u.len() {
            return Err(Error::config(format!(
                "table has {} values, expected {} x {}",
                values.len(),
                s.len(),
                u.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("table contains non-finite values"));
        }
        Ok(Self { s, u, values })
    }

    /// Samples a closure on the given nodes.
    pub fn from_fn(s: Vec<T>, u: Vec<T>, f: impl Fn(T, T) -> T) -> Result<Self> {
        let values = s
            .iter()
            .flat_map(|&si| u.iter().map(move |&uj| (si, uj)))
            .map(|(si, uj)| f(si, uj))
            .collect();
        Self::new(s, u, values)
    }

    /// Reads long-format text with header `s,u,f`. Rows may come in any order
    /// but must cover the full product grid.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::config(format!("table read: {e}")))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 && line.replace(' ', "") == "s,u,f" {
                continue;
            }
            let parts: Vec<&str> = line.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(Error::config(format!(
                    "table line {}: expected 3 columns",
                    lineno + 1
                )));
            }
            let num = |p: &str| {
                p.parse::<f64>()
                    .map_err(|_| Error::config(format!("table line {}: bad number {p:?}", lineno + 1)))
            };
            rows.push((num(parts[0])?, num(parts[1])?, num(parts[2])?));
        }
        let mut s: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let mut u: Vec<f64> = rows.iter().map(|r| r.1).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        u.sort_by(f64::total_cmp);
        u.dedup();
        let mut values = vec![f64::NAN; s.len() * u.len()];
        for (si, ui, fi) in rows {
            let i = s.binary_search_by(|v| v.total_cmp(&si)).unwrap();
            let j = u.binary_search_by(|v| v.total_cmp(&ui)).unwrap();
            values[i * u.len() + j] = fi;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::config("table does not cover the full (s, u) grid"));
        }
        Self::new(
            s.into_iter().map(T::lit).collect(),
            u.into_iter().map(T::lit).collect(),
            values.into_iter().map(T::lit).collect(),
        )
    }

    fn row_value(&self, i: usize, u: T) -> T {
        let nu = self.u.len();
        let (j, t) = locate(&self.u, u);
        let row = &self.values[i * nu..(i + 1) * nu];
        row[j] + t * (row[j + 1] - row[j])
    }

    pub fn s_range(&self) -> (T, T) {
        (self.s[0], *self.s.last().unwrap())
    }

    pub fn u_max(&self) -> T {
        *self.u.last().unwrap()
    }
}

impl<T: Real> ScalarReaction<T> for TabulatedReaction<T> {
    fn eval(&self, s: T, u: T) -> T {
        let (lo, hi) = self.s_range();
        let sc = s.max(lo).min(hi);
        let (i, t) = locate(&self.s, sc);
        let a = self.row_value(i, u);
        let b = self.row_value(i + 1, u);
        a + t * (b - a)
    }

    fn limit(&self, side: Side, u: T) -> T {
        match side {
            Side::Plus => self.row_value(self.s.len() - 1, u),
            Side::Minus => self.row_value(0, u),
        }
    }

    fn transition_width(&self) -> T {
        let (lo, hi) = self.s_range();
        (hi - lo) / T::lit(8.0)
    }

    fn name(&self) -> &str {
        "tabulated"
    }
}
