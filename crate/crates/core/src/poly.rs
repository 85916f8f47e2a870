//! Dense bivariate polynomials with `f64` coefficients.

use alloc::vec;
use alloc::vec::Vec;

/// Polynomial `Σ c[i][j] xⁱ yʲ`, stored densely in a square `(d+1)²` table.
#[derive(Debug, Clone)]
pub struct Poly {
    dim: usize,
    coeffs: Vec<f64>,
}

/// Equality of coefficients, regardless of table size.
impl PartialEq for Poly {
    fn eq(&self, o: &Poly) -> bool {
        let d = self.dim.max(o.dim);
        (0..d).all(|i| (0..d).all(|j| self.coeff(i, j) == o.coeff(i, j)))
    }
}

impl Default for Poly {
    fn default() -> Self {
        Poly::zero()
    }
}

impl Poly {
    pub fn zero() -> Self {
        Self {
            dim: 1,
            coeffs: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self {
            dim: 1,
            coeffs: vec![c],
        }
    }

    /// Builds a polynomial from `(i, j, c)` triples; repeated monomials add.
    pub fn from_terms(terms: &[(u32, u32, f64)]) -> Self {
        let mut p = Poly::zero();
        for &(i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    fn with_dim(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![0.0; dim * dim],
        }
    }

    fn grow(&mut self, dim: usize) {
        if dim <= self.dim {
            return;
        }
        let mut next = Poly::with_dim(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                next.coeffs[i * dim + j] = self.coeffs[i * self.dim + j];
            }
        }
        *self = next;
    }

    /// Coefficient of `xⁱ yʲ` (zero outside the stored table).
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i < self.dim && j < self.dim {
            self.coeffs[i * self.dim + j]
        } else {
            0.0
        }
    }

    pub fn set_coeff(&mut self, i: u32, j: u32, c: f64) {
        let (i, j) = (i as usize, j as usize);
        self.grow(i.max(j) + 1);
        self.coeffs[i * self.dim + j] = c;
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: f64) {
        let (iu, ju) = (i as usize, j as usize);
        self.grow(iu.max(ju) + 1);
        self.coeffs[iu * self.dim + ju] += c;
    }

    /// Nonzero terms in `(i, j)` lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            (0..self.dim).filter_map(move |j| {
                let c = self.coeffs[i * self.dim + j];
                (c != 0.0).then_some((i, j, c))
            })
        })
    }

    /// Total degree; zero polynomial has degree 0.
    pub fn degree(&self) -> usize {
        self.terms().map(|(i, j, _)| i + j).max().unwrap_or(0)
    }

    /// Largest exponent of `x` or `y` that can carry a coefficient.
    pub fn max_exponent(&self) -> usize {
        self.dim - 1
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Horner evaluation: inner in `y`, outer in `x`.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in (0..d).rev() {
            let row = &self.coeffs[i * d..(i + 1) * d];
            let mut r = 0.0;
            for &c in row.iter().rev() {
                r = r * y + c;
            }
            acc = acc * x + r;
        }
        acc
    }

    pub fn d_dx(&self) -> Poly {
        let mut out = Poly::with_dim(self.dim);
        for i in 1..self.dim {
            for j in 0..self.dim {
                out.coeffs[(i - 1) * self.dim + j] = i as f64 * self.coeffs[i * self.dim + j];
            }
        }
        out
    }

    pub fn d_dy(&self) -> Poly {
        let mut out = Poly::with_dim(self.dim);
        for i in 0..self.dim {
            for j in 1..self.dim {
                out.coeffs[i * self.dim + j - 1] = j as f64 * self.coeffs[i * self.dim + j];
            }
        }
        out
    }

    /// Antiderivative in `y` with zero integration constant.
    pub fn integrate_y(&self) -> Poly {
        let mut out = Poly::with_dim(self.dim + 1);
        for (i, j, c) in self.terms() {
            out.coeffs[i * out.dim + j + 1] = c / (j + 1) as f64;
        }
        out
    }

    /// Antiderivative in `x` with zero integration constant.
    pub fn integrate_x(&self) -> Poly {
        let mut out = Poly::with_dim(self.dim + 1);
        for (i, j, c) in self.terms() {
            out.coeffs[(i + 1) * out.dim + j] = c / (i + 1) as f64;
        }
        out
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.axpy(1.0, o)
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.axpy(-1.0, o)
    }

    /// `self + s · o`.
    pub fn axpy(&self, s: f64, o: &Poly) -> Poly {
        let dim = self.dim.max(o.dim);
        let mut out = self.clone();
        out.grow(dim);
        for i in 0..o.dim {
            for j in 0..o.dim {
                out.coeffs[i * dim + j] += s * o.coeffs[i * o.dim + j];
            }
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let dim = self.dim + o.dim - 1;
        let mut out = Poly::with_dim(dim);
        for (i, j, a) in self.terms() {
            for (k, l, b) in o.terms() {
                out.coeffs[(i + k) * dim + j + l] += a * b;
            }
        }
        out
    }

    /// Drops coefficients with magnitude at most `tol`.
    pub fn chop(&self, tol: f64) -> Poly {
        Poly {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .map(|&c| if c.abs() <= tol { 0.0 } else { c })
                .collect(),
        }
    }

    /// Taylor shift: the polynomial `q(X, Y) = p(x0 + X, y0 + Y)`.
    pub fn shifted(&self, x0: f64, y0: f64) -> Poly {
        let d = self.dim;
        let binom = binomials(d);
        let mut pow_x = vec![1.0; d];
        let mut pow_y = vec![1.0; d];
        for k in 1..d {
            pow_x[k] = pow_x[k - 1] * x0;
            pow_y[k] = pow_y[k - 1] * y0;
        }
        // shift in x column by column
        let mut tmp = vec![0.0; d * d];
        for j in 0..d {
            for i in 0..d {
                let c = self.coeffs[i * d + j];
                if c == 0.0 {
                    continue;
                }
                for a in 0..=i {
                    tmp[a * d + j] += c * binom[i][a] * pow_x[i - a];
                }
            }
        }
        let mut out = Poly::with_dim(d);
        for i in 0..d {
            for j in 0..d {
                let c = tmp[i * d + j];
                if c == 0.0 {
                    continue;
                }
                for b in 0..=j {
                    out.coeffs[i * d + b] += c * binom[j][b] * pow_y[j - b];
                }
            }
        }
        out
    }

    /// Linear substitution `q(X, Y) = p(a X + b Y, c X + d Y)`.
    pub fn linear_substitution(&self, a: f64, b: f64, c: f64, d: f64) -> Poly {
        let lx = Poly::from_terms(&[(1, 0, a), (0, 1, b)]);
        let ly = Poly::from_terms(&[(1, 0, c), (0, 1, d)]);
        // exponents of the result are bounded by the total degree
        let n = self.degree() + 1;
        let mut px = Vec::with_capacity(n);
        let mut py = Vec::with_capacity(n);
        px.push(Poly::constant(1.0));
        py.push(Poly::constant(1.0));
        for k in 1..n {
            px.push(px[k - 1].mul(&lx));
            py.push(py[k - 1].mul(&ly));
        }
        let mut out = Poly::with_dim(n);
        for (i, j, coef) in self.terms() {
            let term = px[i].mul(&py[j]);
            for (k, l, t) in term.terms() {
                out.coeffs[k * n + l] += coef * t;
            }
        }
        out
    }

    /// Lower bound of `|p|` over `[-hx, hx] × [-hy, hy]` from the centred form
    /// `|c₀₀| − Σ |cᵢⱼ| hxⁱ hyʲ`. Negative when zero cannot be excluded.
    pub fn centered_lower_bound(&self, hx: f64, hy: f64) -> f64 {
        let d = self.dim;
        let mut rest = 0.0;
        let mut px = 1.0;
        for i in 0..d {
            let mut py = 1.0;
            for j in 0..d {
                if i + j > 0 {
                    rest += self.coeffs[i * d + j].abs() * px * py;
                }
                py *= hy;
            }
            px *= hx;
        }
        self.coeffs[0].abs() - rest
    }
}

/// Pascal triangle `C(n, k)` for `n < size`.
pub(crate) fn binomials(size: usize) -> Vec<Vec<f64>> {
    let mut t: Vec<Vec<f64>> = Vec::with_capacity(size);
    for n in 0..size {
        let mut row = vec![1.0; n + 1];
        for k in 1..n {
            row[k] = t[n - 1][k - 1] + t[n - 1][k];
        }
        t.push(row);
    }
    t
}
