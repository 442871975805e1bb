use serde::Serialize;

use super::GraphSpec;

/// Tabulated constants of a graph. Absent fields are unknown, not zero.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnownConstants {
    pub degree: usize,
    pub cheeger: Option<f64>,
    pub spectral_radius: Option<f64>,
}

pub fn known_constants(g: &GraphSpec) -> KnownConstants {
    let degree = g.degree();
    let (cheeger, spectral_radius) = match g {
        GraphSpec::RegularTree(d) => {
            let d = *d as f64;
            (Some(d - 2.0), Some(2.0 * (d - 1.0).sqrt() / d))
        }
        GraphSpec::Lattice(_) | GraphSpec::Line | GraphSpec::Cycle(_) => (Some(0.0), Some(1.0)),
        GraphSpec::FreeProduct(a, b) => {
            let rho = match (a.as_ref(), b.as_ref()) {
                (GraphSpec::Line, GraphSpec::Line) => Some(3f64.sqrt() / 2.0),
                _ => None,
            };
            (free_cycles_cheeger(a, b), rho)
        }
        GraphSpec::DirectProduct(a, b) => {
            let (ka, kb) = (known_constants(a), known_constants(b));
            let rho = match (ka.spectral_radius, kb.spectral_radius) {
                (Some(ra), Some(rb)) => {
                    let (da, db) = (ka.degree as f64, kb.degree as f64);
                    Some((da * ra + db * rb) / (da + db))
                }
                _ => None,
            };
            let cheeger = match (ka.cheeger, kb.cheeger) {
                (Some(x), Some(y)) if x == 0.0 && y == 0.0 => Some(0.0),
                _ => None,
            };
            (cheeger, rho)
        }
        GraphSpec::GrandparentTree(_) => (None, None),
    };
    KnownConstants { degree, cheeger, spectral_radius }
}

/// Boundary cost inside one block when the set covers an arc of `j` vertices.
fn arc_cost(n: Option<u32>, j: u32) -> f64 {
    match n {
        Some(n) if j >= n => 0.0,
        Some(n) if j + 1 == n => 1.0,
        _ => 2.0,
    }
}

fn block_size(g: &GraphSpec) -> Option<Option<u32>> {
    match g {
        GraphSpec::Cycle(n) => Some(Some(*n)),
        GraphSpec::Line => Some(None),
        _ => None,
    }
}

/// Exact Cheeger constant of a free product whose factors are cycles or lines.
///
/// Every vertex lies in one block of each factor and a finite connected set
/// meets a tree of blocks, each in an arc. With `t_j` (resp. `s_j`) the number
/// of left (right) blocks met in an arc of `j` vertices, per unit of `|A|`, the
/// boundary ratio tends to the linear program
/// `min sum f(j) t_j + g(j) s_j` subject to `sum j t_j = 1`,
/// `sum j s_j = 1`, `sum t_j + sum s_j = 1`, solved here by enumerating
/// basic solutions.
pub fn free_cycles_cheeger(a: &GraphSpec, b: &GraphSpec) -> Option<f64> {
    let (na, nb) = (block_size(a)?, block_size(b)?);
    let span = |n: Option<u32>| n.unwrap_or(8);
    let mut cols: Vec<[f64; 4]> = Vec::new();
    for j in 1..=span(na) {
        cols.push([j as f64, 0.0, 1.0, arc_cost(na, j)]);
    }
    for j in 1..=span(nb) {
        cols.push([0.0, j as f64, 1.0, arc_cost(nb, j)]);
    }
    let rhs = [1.0, 1.0, 1.0];
    let mut best = f64::INFINITY;
    let m = cols.len();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let mat = [
                    [cols[i][0], cols[j][0], cols[k][0]],
                    [cols[i][1], cols[j][1], cols[k][1]],
                    [cols[i][2], cols[j][2], cols[k][2]],
                ];
                if let Some(x) = solve3(mat, rhs) {
                    if x.iter().all(|&v| v >= -1e-12) {
                        let cost = x[0] * cols[i][3] + x[1] * cols[j][3] + x[2] * cols[k][3];
                        best = best.min(cost);
                    }
                }
            }
        }
    }
    best.is_finite().then_some(best)
}

fn solve3(m: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(m);
    if d.abs() < 1e-12 {
        return None;
    }
    let mut x = [0.0; 3];
    for (c, xc) in x.iter_mut().enumerate() {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        *xc = det(mc) / d;
    }
    Some(x)
}
