//! Integer lattice utilities for the free abelian backend: Hermite normal
//! form, fundamental domain boxes, sublattice enumeration, intersections and
//! preimages.
//!
//! A full-rank sublattice of Z^d is always kept as its row-style Hermite
//! normal form: an upper triangular d x d matrix with positive diagonal in
//! which every entry above a pivot is reduced modulo that pivot. The form is
//! unique per sublattice, so matrix equality decides lattice equality.

use crate::error::{Error, Result};

/// Row-style Hermite normal form of the lattice spanned by `rows`.
/// Errors when the span has rank below `dim`.
pub fn hnf(rows: &[Vec<i64>], dim: usize) -> Result<Vec<Vec<i64>>> {
    for row in rows {
        if row.len() != dim {
            return Err(Error::InvalidModel(format!(
                "basis row of length {} in dimension {dim}",
                row.len()
            )));
        }
    }
    let mut m: Vec<Vec<i64>> = rows.to_vec();
    let mut r = 0;
    for c in 0..dim {
        loop {
            let mut nz: Vec<usize> = (r..m.len()).filter(|&i| m[i][c] != 0).collect();
            match nz.len() {
                0 => break,
                1 => {
                    m.swap(r, nz[0]);
                    break;
                }
                _ => {
                    nz.sort_by_key(|&i| m[i][c].unsigned_abs());
                    let pivot = nz[0];
                    for &i in &nz[1..] {
                        let q = m[i][c].div_euclid(m[pivot][c]);
                        for j in 0..dim {
                            m[i][j] -= q * m[pivot][j];
                        }
                    }
                }
            }
        }
        if r < m.len() && m[r][c] != 0 {
            if m[r][c] < 0 {
                for j in 0..dim {
                    m[r][j] = -m[r][j];
                }
            }
            for i in 0..r {
                let q = m[i][c].div_euclid(m[r][c]);
                for j in 0..dim {
                    m[i][j] -= q * m[r][j];
                }
            }
            r += 1;
        }
    }
    if r < dim {
        return Err(Error::InfiniteIndex(format!(
            "basis spans rank {r} inside Z^{dim}"
        )));
    }
    m.truncate(dim);
    Ok(m)
}

/// Index of the sublattice, i.e. the determinant of its HNF basis.
pub fn index(h: &[Vec<i64>]) -> u64 {
    h.iter().enumerate().map(|(i, row)| row[i] as u64).product()
}

/// Canonical representative of `v` modulo the lattice: each coordinate i is
/// reduced into [0, h[i][i]) in ascending order.
pub fn box_reduce(h: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    let mut out = v.to_vec();
    for i in 0..h.len() {
        let q = out[i].div_euclid(h[i][i]);
        for j in i..h.len() {
            out[j] -= q * h[i][j];
        }
    }
    out
}

pub fn contains(h: &[Vec<i64>], v: &[i64]) -> bool {
    box_reduce(h, v).iter().all(|&x| x == 0)
}

/// All canonical representatives of Z^d modulo the lattice, in the product
/// order of the box (last coordinate fastest).
pub fn box_cells(h: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let dim = h.len();
    let mut out = vec![vec![0i64; dim]];
    for i in 0..dim {
        let mut next = Vec::with_capacity(out.len() * h[i][i] as usize);
        for cell in &out {
            for x in 0..h[i][i] {
                let mut c = cell.clone();
                c[i] = x;
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Writes `v` in the HNF basis, if it lies in the lattice.
pub fn coordinates(h: &[Vec<i64>], v: &[i64]) -> Option<Vec<i64>> {
    let dim = h.len();
    let mut rem = v.to_vec();
    let mut coords = vec![0i64; dim];
    for i in 0..dim {
        if rem[i] % h[i][i] != 0 {
            return None;
        }
        let q = rem[i] / h[i][i];
        coords[i] = q;
        for j in i..dim {
            rem[j] -= q * h[i][j];
        }
    }
    if rem.iter().all(|&x| x == 0) {
        Some(coords)
    } else {
        None
    }
}

/// All sublattices of Z^dim of the given index, as HNF matrices sorted
/// lexicographically by their flattened entries.
pub fn sublattices_of_index(dim: usize, idx: u64) -> Vec<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    let mut diag = vec![0u64; dim];
    fill_diagonal(dim, idx, 0, &mut diag, &mut out);
    out.sort();
    out
}

fn fill_diagonal(dim: usize, rem: u64, pos: usize, diag: &mut Vec<u64>, out: &mut Vec<Vec<Vec<i64>>>) {
    if pos == dim {
        if rem == 1 {
            let mut m: Vec<Vec<i64>> = (0..dim)
                .map(|i| {
                    let mut row = vec![0i64; dim];
                    row[i] = diag[i] as i64;
                    row
                })
                .collect();
            fill_above(dim, 1, 0, &mut m, out);
        }
        return;
    }
    for d in 1..=rem {
        if rem % d == 0 {
            diag[pos] = d;
            fill_diagonal(dim, rem / d, pos + 1, diag, out);
        }
    }
}

fn fill_above(dim: usize, col: usize, row: usize, m: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
    if col == dim {
        out.push(m.clone());
        return;
    }
    if row == col {
        fill_above(dim, col + 1, 0, m, out);
        return;
    }
    for x in 0..m[col][col] {
        m[row][col] = x;
        fill_above(dim, col, row + 1, m, out);
    }
    m[row][col] = 0;
}

const GENERATE_CAP: u64 = 4_000_000;

/// HNF basis of the lattice of all v in [0, modulus)^dim with pred(v),
/// assuming that set together with modulus * Z^dim is closed under addition
/// modulo the box. Used for kernels, intersections and preimages, which are
/// all lattices containing modulus * Z^dim.
pub fn lattice_from_box(dim: usize, modulus: u64, mut pred: impl FnMut(&[i64]) -> bool) -> Result<Vec<Vec<i64>>> {
    if modulus == 0 {
        return Err(Error::InvalidModel("box modulus must be positive".into()));
    }
    let count = (modulus as f64).powi(dim as i32);
    if count > GENERATE_CAP as f64 {
        return Err(Error::CapExceeded(format!(
            "box of size {modulus}^{dim} is too large to scan"
        )));
    }
    let mut gens: Vec<Vec<i64>> = Vec::new();
    for i in 0..dim {
        let mut row = vec![0i64; dim];
        row[i] = modulus as i64;
        gens.push(row);
    }
    let mut cell = vec![0i64; dim];
    loop {
        if pred(&cell) {
            gens.push(cell.clone());
        }
        let mut i = dim;
        loop {
            if i == 0 {
                return hnf(&gens, dim);
            }
            i -= 1;
            cell[i] += 1;
            if cell[i] < modulus as i64 {
                break;
            }
            cell[i] = 0;
        }
    }
}

/// Intersection of two full-rank sublattices given in HNF.
pub fn intersect(h1: &[Vec<i64>], h2: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let dim = h1.len();
    let modulus = index(h1) * index(h2);
    lattice_from_box(dim, modulus, |v| contains(h1, v) && contains(h2, v))
}
