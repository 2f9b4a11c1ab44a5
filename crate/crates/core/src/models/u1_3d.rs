//! Compact U(1) in 3D: the 3L^3-variable integer constraint system whose
//! nullspace parameterizes the surviving Fourier modes, and the restricted
//! Fourier sum enumerated over nullspace-coefficient boxes.

use super::fourier::FourierTable;
use crate::error::{Error, Result};
use crate::numerics::scalar::Real;
use crate::numerics::scaled::ScaledValue;

/// The integer linear system over h = (h^a, h^b, h^c) in Z^{3L^3} together
/// with an integer basis of its nullspace.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub l: usize,
    /// 3L^3 coefficient rows over 3L^3 variables.
    pub rows: Vec<Vec<i64>>,
    /// Integer nullspace basis; every vector annihilates every row exactly.
    pub basis: Vec<Vec<i64>>,
}

impl ConstraintSystem {
    pub fn variables(&self) -> usize {
        3 * self.l * self.l * self.l
    }

    pub fn nullity(&self) -> usize {
        self.basis.len()
    }
}

/// Flat index of site (i,j,k) within one field, indices taken modulo L.
fn site(l: usize, i: isize, j: isize, k: isize) -> usize {
    let m = l as isize;
    let w = |x: isize| x.rem_euclid(m) as usize;
    (w(i) * l + w(j)) * l + w(k)
}

/// Assembles the constraint rows and computes an integer nullspace basis by
/// exact rational elimination, verifying annihilation in integer arithmetic.
pub fn u1_3d_nullspace(l: usize) -> Result<ConstraintSystem> {
    if l < 1 || l > 4 {
        return Err(Error::InvalidArgument(
            "u1_3d_nullspace: supported range is 1 <= L <= 4 (3L^3 <= 192 variables)".into(),
        ));
    }
    let l3 = l * l * l;
    let nv = 3 * l3;
    let (a0, b0, c0) = (0usize, l3, 2 * l3);
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(nv);
    for i in 0..l as isize {
        for j in 0..l as isize {
            for k in 0..l as isize {
                // h^c_{i,j,k} - h^c_{i,j-1,k} - h^b_{i,j,k} + h^b_{i,j,k-1} = 0
                let mut r1 = vec![0i64; nv];
                r1[c0 + site(l, i, j, k)] += 1;
                r1[c0 + site(l, i, j - 1, k)] -= 1;
                r1[b0 + site(l, i, j, k)] -= 1;
                r1[b0 + site(l, i, j, k - 1)] += 1;
                rows.push(r1);
                // h^a_{i,j,k} - h^a_{i,j,k-1} - h^c_{i,j,k} + h^c_{i-1,j,k} = 0
                let mut r2 = vec![0i64; nv];
                r2[a0 + site(l, i, j, k)] += 1;
                r2[a0 + site(l, i, j, k - 1)] -= 1;
                r2[c0 + site(l, i, j, k)] -= 1;
                r2[c0 + site(l, i - 1, j, k)] += 1;
                rows.push(r2);
                // h^b_{i,j,k} - h^b_{i-1,j,k} - h^a_{i,j,k} + h^a_{i,j-1,k} = 0
                let mut r3 = vec![0i64; nv];
                r3[b0 + site(l, i, j, k)] += 1;
                r3[b0 + site(l, i - 1, j, k)] -= 1;
                r3[a0 + site(l, i, j, k)] -= 1;
                r3[a0 + site(l, i, j - 1, k)] += 1;
                rows.push(r3);
            }
        }
    }
    let basis = integer_nullspace(&rows, nv)?;
    // exact verification: every basis vector annihilates every row
    for b in &basis {
        for row in &rows {
            let dot: i128 = row
                .iter()
                .zip(b)
                .map(|(&r, &x)| r as i128 * x as i128)
                .sum();
            if dot != 0 {
                return Err(Error::InvalidArgument(
                    "u1_3d_nullspace: basis verification failed".into(),
                ));
            }
        }
    }
    Ok(ConstraintSystem { l, rows, basis })
}

/// Exact rational arithmetic on i128 (entries stay tiny for these systems).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Rat {
    num: i128,
    den: i128, // > 0
}

impl Rat {
    fn int(n: i128) -> Rat {
        Rat { num: n, den: 1 }
    }

    fn is_zero(self) -> bool {
        self.num == 0
    }

    fn normalize(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd128(num.abs(), den.abs()).max(1);
        Rat {
            num: sign * num / g,
            den: den.abs() / g,
        }
    }

    fn sub_mul(self, a: Rat, b: Rat) -> Rat {
        // self - a*b
        let num = self.num * a.den * b.den - a.num * b.num * self.den;
        let den = self.den * a.den * b.den;
        Rat::normalize(num, den)
    }

    fn div(self, o: Rat) -> Rat {
        Rat::normalize(self.num * o.den, self.den * o.num)
    }
}

fn gcd128(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.abs()
}

/// Reduced row echelon form over the rationals, then one integer basis
/// vector per free column.
fn integer_nullspace(rows: &[Vec<i64>], nv: usize) -> Result<Vec<Vec<i64>>> {
    let mut m: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rat::int(x as i128)).collect())
        .collect();
    let nr = m.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; nv];
    let mut rank = 0usize;
    for col in 0..nv {
        // find a pivot row
        let mut pr = None;
        for r in rank..nr {
            if !m[r][col].is_zero() {
                pr = Some(r);
                break;
            }
        }
        let Some(pr) = pr else { continue };
        m.swap(rank, pr);
        let p = m[rank][col];
        for c in col..nv {
            m[rank][c] = m[rank][c].div(p);
        }
        for r in 0..nr {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col];
                for c in col..nv {
                    let v = m[rank][c];
                    m[r][c] = m[r][c].sub_mul(factor, v);
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
        if rank == nr {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..nv {
        if pivot_of_col[free].is_some() {
            continue;
        }
        // rational solution: x_free = 1, x_pivotcol = -m[pivrow][free]
        let mut sol: Vec<Rat> = vec![Rat::int(0); nv];
        sol[free] = Rat::int(1);
        for col in 0..nv {
            if let Some(r) = pivot_of_col[col] {
                sol[col] = Rat::normalize(-m[r][free].num, m[r][free].den);
            }
        }
        // clear denominators and divide by the content
        let mut lcm: i128 = 1;
        for s in &sol {
            lcm = lcm / gcd128(lcm, s.den) * s.den;
        }
        let ints: Vec<i128> = sol.iter().map(|s| s.num * (lcm / s.den)).collect();
        let content = ints.iter().fold(0i128, |g, &x| gcd128(g, x)).max(1);
        let vec: Vec<i64> = ints
            .iter()
            .map(|&x| {
                i64::try_from(x / content)
                    .map_err(|_| Error::InvalidArgument("nullspace entry overflow".into()))
            })
            .collect::<Result<_>>()?;
        basis.push(vec);
    }
    Ok(basis)
}

/// Restricted Fourier sum: enumerates `h = sum_m c_m b_m` over coefficient
/// boxes `|c_m| <= coeff_bound`, keeps modes inside the table window, and
/// sums the 3L^3-fold coefficient products. Monotone in `coeff_bound`.
pub fn u1_3d_fourier_sum<R: Real>(
    cs: &ConstraintSystem,
    table: &FourierTable<R>,
    coeff_bound: i64,
) -> Result<R> {
    let dim = cs.nullity();
    let nv = cs.variables();
    if coeff_bound < 0 {
        return Err(Error::InvalidArgument("u1_3d_fourier_sum: negative bound".into()));
    }
    let width = 2 * coeff_bound as u128 + 1;
    let mut budget: u128 = 1;
    for _ in 0..dim {
        budget = budget.saturating_mul(width);
        if budget > 1_000_000_000 {
            return Err(Error::Capacity(format!(
                "u1_3d_fourier_sum: enumeration count (2*{coeff_bound}+1)^{dim} exceeds 1e9"
            )));
        }
    }
    let l_max = table.l_max();
    // start at all coefficients = -bound; maintain h incrementally
    let mut coeff = vec![-coeff_bound; dim];
    let mut h = vec![0i64; nv];
    for (c, b) in coeff.iter().zip(&cs.basis) {
        for (ht, &bt) in h.iter_mut().zip(b) {
            *ht += c * bt;
        }
    }
    let mut total = ScaledValue::zero();
    'outer: loop {
        // contribution of the current h
        let mut in_window = true;
        for &ht in &h {
            if ht.abs() > l_max {
                in_window = false;
                break;
            }
        }
        if in_window {
            let mut term = R::one();
            for &ht in &h {
                term *= table.get(ht);
            }
            total = total.add(&ScaledValue::from_real(term));
        }
        // odometer step with incremental h updates
        let mut d = 0usize;
        loop {
            if d == dim {
                break 'outer;
            }
            if coeff[d] < coeff_bound {
                coeff[d] += 1;
                for (ht, &bt) in h.iter_mut().zip(&cs.basis[d]) {
                    *ht += bt;
                }
                break;
            }
            // reset digit d from +bound to -bound
            coeff[d] = -coeff_bound;
            let back = 2 * coeff_bound;
            for (ht, &bt) in h.iter_mut().zip(&cs.basis[d]) {
                *ht -= back * bt;
            }
            d += 1;
        }
    }
    Ok(total.real())
}
