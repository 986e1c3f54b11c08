//! Exact linear algebra over ℚ by fraction-exact Gaussian elimination.

use rug::{Integer, Rational};

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c].cmp0().is_ne()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Rational::from(1) / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && m[i][c].cmp0().is_ne() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = Rational::from(&f * &m[r][j]);
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Basis of `{x : rows · x = 0}` in `ncols` unknowns, one vector per free
/// column (the free coordinate set to 1).
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let mut m = rows.to_vec();
    if m.is_empty() {
        m.push(vec![Rational::new(); ncols]);
    }
    let pivots = rref(&mut m);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::new(); ncols];
        v[free] = Rational::from(1);
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Unique solution of the square system `a · x = b`, if `a` is invertible.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().any(|&c| c >= n) {
        return None;
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn det(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Rational::from(1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| m[i][c].cmp0().is_ne()) else {
            return Rational::new();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        for i in c + 1..n {
            if m[i][c].cmp0().is_ne() {
                let f = Rational::from(&m[i][c] / &m[c][c]);
                for j in c..n {
                    let t = Rational::from(&f * &m[c][j]);
                    m[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(a: &[Vec<Rational>]) -> Option<Matrix> {
    let n = a.len();
    let mut m: Matrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| Rational::from(u8::from(i == j))));
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let k = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Rational::new();
                    for t in 0..k {
                        s += Rational::from(&row[t] * &b[t][j]);
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Rational>], x: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn transpose(a: &[Vec<Rational>]) -> Matrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut s = Rational::new();
    for (x, y) in a.iter().zip(b) {
        if x.cmp0().is_ne() && y.cmp0().is_ne() {
            s += Rational::from(x * y);
        }
    }
    s
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| Rational::from(x - y)).collect()
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| Rational::from(u8::from(i == j))).collect())
        .collect()
}

/// Scales `v` to a primitive integer vector pointing the same way.
/// The zero vector maps to itself.
pub fn primitive(v: &[Rational]) -> Vec<Integer> {
    let mut l = Integer::from(1);
    for x in v {
        l.lcm_mut(x.denom());
    }
    let ints: Vec<Integer> = v
        .iter()
        .map(|x| x.numer() * Integer::from(&l / x.denom()))
        .collect();
    let mut g = Integer::new();
    for x in &ints {
        g.gcd_mut(x);
    }
    if g == 0 {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn is_integral(v: &[Rational]) -> bool {
    v.iter().all(|x| *x.denom() == 1)
}
