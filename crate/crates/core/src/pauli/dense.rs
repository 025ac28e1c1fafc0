use num_complex::Complex;

use crate::scalar::Scalar;

/// Row-major square complex matrix, used for small-register checks.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    dim: usize,
    data: Vec<Complex<T>>,
}

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn cabs_max<T: Scalar>(c: Complex<T>) -> T {
    let (a, b) = (c.re.abs(), c.im.abs());
    if a > b {
        a
    } else {
        b
    }
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![czero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex::new(T::one(), T::zero()));
        }
        m
    }

    /// Permutation matrix sending basis state `b` to `f(b)`.
    pub fn permutation(dim: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(dim);
        for col in 0..dim {
            m.set(f(col), col, Complex::new(T::one(), T::zero()));
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> Complex<T> {
        self.data[r * self.dim + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex<T>) {
        self.data[r * self.dim + c] = v;
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: Complex<T>) {
        let e = &mut self.data[r * self.dim + c];
        *e = *e + v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.re.is_zero() && a.im.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out.add_to(i, j, a * other.get(k, j));
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim)
            .map(|r| (0..self.dim).fold(czero(), |acc, c| acc + self.get(r, c) * v[c]))
            .collect()
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    /// Largest componentwise deviation between two matrices.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| cabs_max(*a - *b))
            .fold(T::zero(), |m, x| if x > m { x } else { m })
    }

    /// `max |M - M^dagger|` over entries and real/imaginary parts.
    pub fn hermitian_residual(&self) -> T {
        self.max_abs_diff(&self.conj_transpose())
    }

    /// True when every column holds a single exact 1 and all other entries are 0.
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.dim];
        for c in 0..self.dim {
            let mut hit = None;
            for r in 0..self.dim {
                let v = self.get(r, c);
                if v.re.is_zero() && v.im.is_zero() {
                    continue;
                }
                if v != Complex::new(T::one(), T::zero()) || hit.is_some() {
                    return false;
                }
                hit = Some(r);
            }
            match hit {
                Some(r) if !seen[r] => seen[r] = true,
                _ => return false,
            }
        }
        true
    }

    /// Off-block norm `max |P M (1 - P)|` for the projector onto basis states
    /// selected by `inside`.
    pub fn leakage_norm(&self, inside: impl Fn(usize) -> bool) -> T {
        let mut worst = T::zero();
        for r in (0..self.dim).filter(|&r| inside(r)) {
            for c in (0..self.dim).filter(|&c| !inside(c)) {
                let v = cabs_max(self.get(r, c));
                if v > worst {
                    worst = v;
                }
            }
        }
        worst
    }
}
