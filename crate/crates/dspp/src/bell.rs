//! Partial and complete Bell polynomials over generic scalars.
//!
//! Three independent evaluation routes are provided for the complete
//! polynomials: an explicit sum over integer partitions with exact
//! multinomial coefficients, a determinant of the standard almost-triangular
//! matrix, and the binomial convolution recurrence. The recurrence is the
//! cheapest and is what the rest of the crate uses; the other two exist so
//! they can be cross-checked against each other exactly.

use crate::error::{Error, Result};
use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};

/// Largest polynomial order accepted by every evaluator in this module.
///
/// The partition-sum coefficients are n!/(prod_m j_m! (m!)^{j_m}); keeping
/// n <= 32 means n! (and every denominator, which divides it) fits in u128,
/// so the combinatorial factors are computed without rounding.
pub const MAX_BELL_ORDER: usize = 32;

/// Scalar types the Bell evaluators work over.
///
/// `magnitude` only has to be monotone in "size" — it drives pivot selection
/// in the determinant route and nothing else.
pub trait BellScalar: Num + Copy + FromPrimitive + std::fmt::Debug {
    fn magnitude(self) -> f64;
}

impl BellScalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl BellScalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

impl BellScalar for i128 {
    fn magnitude(self) -> f64 {
        (self.unsigned_abs()) as f64
    }
}

/// Scalars that additionally support exponentiation, for the Riordan-type
/// derivative formula d^k/dx^k e^{psi(x)} = e^{psi(x)} B_k(psi', psi'', ...).
pub trait ExpScalar: BellScalar {
    fn exp_value(self) -> Self;
}

impl ExpScalar for f64 {
    fn exp_value(self) -> Self {
        self.exp()
    }
}

impl ExpScalar for Complex64 {
    fn exp_value(self) -> Self {
        self.exp()
    }
}

pub(crate) fn factorial_u128(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    factorial_u128(n) / (factorial_u128(k) * factorial_u128(n - k))
}

fn scalar_from_u128<S: BellScalar>(v: u128) -> Result<S> {
    S::from_u128(v).ok_or_else(|| {
        Error::InvalidArgument(format!("coefficient {} not representable in scalar type", v))
    })
}

fn check_order(n: usize, k: usize, xs_len: usize, needed: usize) -> Result<()> {
    if n > MAX_BELL_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Bell polynomial order {} exceeds the supported maximum {}",
            n, MAX_BELL_ORDER
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "partial Bell polynomial needs k <= n, got n = {}, k = {}",
            n, k
        )));
    }
    if xs_len < needed {
        return Err(Error::InvalidArgument(format!(
            "Bell polynomial of order {} needs {} arguments, got {}",
            n, needed, xs_len
        )));
    }
    Ok(())
}

/// Partial (incomplete) exponential Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}).
///
/// Evaluated as the explicit sum over nonnegative integer sequences
/// (j_1, ..., j_{n-k+1}) with sum j_m = k and sum m j_m = n, with exact
/// integer multinomial coefficients. `xs[m-1]` holds x_m.
pub fn partial_bell<S: BellScalar>(n: usize, k: usize, xs: &[S]) -> Result<S> {
    let needed = if n == 0 || k == 0 { 0 } else { n - k + 1 };
    check_order(n, k, xs.len(), needed)?;
    if n == 0 {
        // B_{0,0} = 1 by convention; k > 0 was rejected above.
        return Ok(S::one());
    }
    if k == 0 {
        // No blocks can absorb n >= 1 elements.
        return Ok(S::zero());
    }

    let n_fact = factorial_u128(n);
    let mut total = S::zero();
    // DFS over the block-size multiplicities j_m. `denom` accumulates
    // j_m! (m!)^{j_m}, `power` the running product of x_m^{j_m}.
    let mut stack: Vec<(usize, usize, usize, u128, S)> = vec![(1, k, n, 1, S::one())];
    while let Some((m, blocks_left, weight_left, denom, power)) = stack.pop() {
        if blocks_left == 0 {
            if weight_left == 0 {
                total = total + power * scalar_from_u128::<S>(n_fact / denom)?;
            }
            continue;
        }
        if m > n - k + 1 || weight_left < blocks_left * m {
            continue;
        }
        let j_max = (weight_left / m).min(blocks_left);
        let m_fact = factorial_u128(m);
        let mut denom_m = denom;
        let mut power_m = power;
        for j in 0..=j_max {
            if j > 0 {
                // Stepping j_m from j-1 to j multiplies j_m! by j and
                // (m!)^{j_m} by m!.
                denom_m *= j as u128;
                denom_m *= m_fact;
                power_m = power_m * xs[m - 1];
            }
            stack.push((m + 1, blocks_left - j, weight_left - m * j, denom_m, power_m));
        }
    }
    Ok(total)
}

/// Complete exponential Bell polynomial B_n(x_1, ..., x_n) as the sum of the
/// partial polynomials over all block counts k.
pub fn complete_bell_sum<S: BellScalar>(n: usize, xs: &[S]) -> Result<S> {
    check_order(n, 0, xs.len(), n)?;
    let mut total = S::zero();
    for k in 0..=n {
        total = total + partial_bell(n, k, xs)?;
    }
    Ok(total)
}

/// Complete Bell polynomials B_0, ..., B_n via the binomial convolution
/// B_{m+1} = sum_{k=0}^{m} C(m,k) B_{m-k} x_{k+1}.
pub fn bell_sequence<S: BellScalar>(n: usize, xs: &[S]) -> Result<Vec<S>> {
    check_order(n, 0, xs.len(), n)?;
    let mut seq = Vec::with_capacity(n + 1);
    seq.push(S::one());
    for m in 0..n {
        let mut next = S::zero();
        for k in 0..=m {
            let coeff = scalar_from_u128::<S>(binomial_u128(m, k))?;
            next = next + coeff * seq[m - k] * xs[k];
        }
        seq.push(next);
    }
    Ok(seq)
}

/// Complete Bell polynomial B_n via the recurrence route.
pub fn complete_bell_recurrence<S: BellScalar>(n: usize, xs: &[S]) -> Result<S> {
    Ok(bell_sequence(n, xs)?.pop().expect("sequence is never empty"))
}

/// Complete Bell polynomial B_n as the determinant of the classical
/// n x n almost-triangular matrix.
///
/// Row 0 carries C(n-1, c) x_{c+1}; each later row r has -1 on the
/// subdiagonal and C(n-1-r, c-r) x_{c-r+1} on and above the diagonal.
/// The determinant is taken by fraction-free (Bareiss) elimination with
/// partial pivoting, so integer inputs are evaluated exactly.
pub fn complete_bell_det<S: BellScalar>(n: usize, xs: &[S]) -> Result<S> {
    check_order(n, 0, xs.len(), n)?;
    if n == 0 {
        return Ok(S::one());
    }
    let minus_one = S::zero() - S::one();
    let mut m = vec![vec![S::zero(); n]; n];
    for r in 0..n {
        for c in 0..n {
            if c >= r {
                let coeff = scalar_from_u128::<S>(binomial_u128(n - 1 - r, c - r))?;
                m[r][c] = coeff * xs[c - r];
            } else if c + 1 == r {
                m[r][c] = minus_one;
            }
        }
    }

    let mut sign = S::one();
    let mut prev = S::one();
    for k in 0..n - 1 {
        let pivot = (k..n)
            .max_by(|&a, &b| {
                m[a][k]
                    .magnitude()
                    .partial_cmp(&m[b][k].magnitude())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty pivot range");
        if m[pivot][k] == S::zero() {
            return Ok(S::zero());
        }
        if pivot != k {
            m.swap(pivot, k);
            sign = S::zero() - sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
            m[i][k] = S::zero();
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// Derivatives of x -> exp(psi(x)) from the derivatives of psi.
///
/// Given psi(x0) and psi^{(1..n)}(x0), returns the n+1 values
/// d^k/dx^k e^{psi(x)} |_{x0} = e^{psi(x0)} B_k(psi', ..., psi^{(k)})
/// for k = 0..n, where n = `psi_derivs.len()`.
pub fn riordan_exp_derivatives<S: ExpScalar>(psi_derivs: &[S], psi_value: S) -> Result<Vec<S>> {
    let bells = bell_sequence(psi_derivs.len(), psi_derivs)?;
    let factor = psi_value.exp_value();
    Ok(bells.into_iter().map(|b| factor * b).collect())
}
