use super::{Matrix, NumericsError};

/// Matrix exponential by scaling and squaring with a Taylor kernel.
///
/// The argument is scaled so its infinity norm is at most 1/2; 20 Taylor
/// terms then leave a truncation error below machine precision.
pub fn expm(a: &Matrix) -> Result<Matrix, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let norm = a.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(0.5_f64.powi(squarings));

    let mut result = Matrix::identity(n);
    let mut term = Matrix::identity(n);
    for k in 1..=20 {
        term = term.matmul(&scaled).scale(1.0 / k as f64);
        result = result.add(&term);
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    Ok(result)
}

/// Zero-order-hold discretization of `x' = A x + B u` with sample time `ts`.
///
/// Uses the augmented exponential `exp([[A, B], [0, 0]] ts) = [[Ad, Bd], [0, I]]`.
pub fn zoh_discretize(
    a_cont: &Matrix,
    b_cont: &Matrix,
    ts: f64,
) -> Result<(Matrix, Matrix), NumericsError> {
    if !a_cont.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a_cont.rows(),
            cols: a_cont.cols(),
        });
    }
    if !(ts > 0.0 && ts.is_finite()) {
        return Err(NumericsError::SampleTime(ts));
    }
    let n = a_cont.rows();
    let m = b_cont.cols();
    assert_eq!(b_cont.rows(), n, "B must have as many rows as A");

    let mut aug = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = a_cont[(i, j)] * ts;
        }
        for j in 0..m {
            aug[(i, n + j)] = b_cont[(i, j)] * ts;
        }
    }
    let e = expm(&aug)?;
    Ok((e.submatrix(0, 0, n, n), e.submatrix(0, n, n, m)))
}
