use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::PotentialSnapshot;
use crate::{Error, Result};

/// Minima, barriers and local trap frequencies of a potential.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrapGeometry {
    pub minima_positions: Vec<f64>,
    pub minima_values: Vec<f64>,
    /// Location of the maximum between minima `i` and `i + 1`.
    pub barrier_positions: Vec<f64>,
    /// Maximum between minima `i` and `i + 1`, relative to the higher one.
    pub barrier_heights: Vec<f64>,
    /// Harmonic angular frequency `sqrt(V'' / m)` at each minimum.
    pub curvatures: Vec<f64>,
}

impl TrapGeometry {
    pub fn len(&self) -> usize {
        self.minima_positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.minima_positions.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryOptions {
    /// Fewer minima than this is an error.
    pub expected_minima: usize,
    /// Minimum/maximum pairs that differ by less than this are merged away.
    /// `None` uses `1e-3` of the potential's range.
    pub min_prominence: Option<f64>,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        GeometryOptions {
            expected_minima: 1,
            min_prominence: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Min,
    Max,
}

#[derive(Debug, Clone, Copy)]
struct Extremum {
    index: usize,
    kind: Kind,
    value: f64,
}

/// Local minima (refined by a three-point quadratic fit), barriers between
/// neighbouring minima and harmonic frequencies for atoms of mass `mass`.
pub fn trap_geometry(
    snapshot: &PotentialSnapshot,
    mass: f64,
    options: &GeometryOptions,
) -> Result<TrapGeometry> {
    let v = &snapshot.values;
    let n = v.len();
    if n != snapshot.positions.len() {
        return Err(Error::InvalidGrid("positions and values differ in length".into()));
    }
    if n < 3 {
        return Err(Error::Geometry {
            found: 0,
            requested: options.expected_minima,
        });
    }
    let dx = snapshot.spacing();
    let x0 = snapshot.positions[0];
    for (i, x) in snapshot.positions.iter().enumerate() {
        if (x - (x0 + dx * i as f64)).abs() > 1e-9 * dx.abs().max(x.abs()) + 1e-12 * dx.abs() {
            return Err(Error::InvalidGrid("positions must be uniformly spaced".into()));
        }
    }

    let extrema = simplify(alternating_extrema(v), prominence(v, options));

    let minima: Vec<usize> = extrema
        .iter()
        .filter(|e| e.kind == Kind::Min)
        .map(|e| e.index)
        .collect();
    if minima.len() < options.expected_minima {
        return Err(Error::Geometry {
            found: minima.len(),
            requested: options.expected_minima,
        });
    }

    let mut geometry = TrapGeometry::default();
    for &i in &minima {
        let (offset, value, second) = quadratic_fit(v, i);
        geometry.minima_positions.push(x0 + dx * (i as f64 + offset));
        geometry.minima_values.push(value);
        geometry.curvatures.push((second / (dx * dx) / mass).max(0.0).sqrt());
    }
    for (k, pair) in minima.windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        let top = (a..=b)
            .max_by(|i, j| v[*i].total_cmp(&v[*j]))
            .unwrap_or(a);
        let (offset, value) = if top > 0 && top + 1 < n {
            let (o, val, _) = quadratic_fit(v, top);
            (o, val)
        } else {
            (0.0, v[top])
        };
        let higher = geometry.minima_values[k].max(geometry.minima_values[k + 1]);
        geometry.barrier_positions.push(x0 + dx * (top as f64 + offset));
        geometry.barrier_heights.push((value - higher).max(0.0));
    }
    Ok(geometry)
}

fn prominence(v: &[f64], options: &GeometryOptions) -> f64 {
    options.min_prominence.unwrap_or_else(|| {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(*x), hi.max(*x)));
        1e-3 * (hi - lo)
    })
}

/// Interior extrema, forced to alternate between minima and maxima.
fn alternating_extrema(v: &[f64]) -> Vec<Extremum> {
    let mut out: Vec<Extremum> = Vec::new();
    for i in 1..v.len() - 1 {
        let kind = if v[i] < v[i - 1] && v[i] <= v[i + 1] {
            Kind::Min
        } else if v[i] > v[i - 1] && v[i] >= v[i + 1] {
            Kind::Max
        } else {
            continue;
        };
        let e = Extremum {
            index: i,
            kind,
            value: v[i],
        };
        match out.last_mut() {
            Some(last) if last.kind == kind => {
                let better = match kind {
                    Kind::Min => e.value < last.value,
                    Kind::Max => e.value > last.value,
                };
                if better {
                    *last = e;
                }
            }
            _ => out.push(e),
        }
    }
    out
}

/// Repeatedly removes the adjacent min/max pair with the smallest height
/// difference until every remaining pair differs by at least `threshold`.
fn simplify(mut extrema: Vec<Extremum>, threshold: f64) -> Vec<Extremum> {
    loop {
        let smallest = extrema
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i, (w[0].value - w[1].value).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match smallest {
            Some((i, diff)) if diff < threshold => {
                extrema.drain(i..i + 2);
            }
            _ => return extrema,
        }
    }
}

/// Offset (in grid steps), value and second difference of the parabola
/// through `i - 1, i, i + 1`.
fn quadratic_fit(v: &[f64], i: usize) -> (f64, f64, f64) {
    let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
    let second = a - 2.0 * b + c;
    if second == 0.0 {
        return (0.0, b, 0.0);
    }
    let slope = 0.5 * (c - a);
    let offset = -slope / second;
    (offset, b - 0.5 * slope * slope / second, second)
}
