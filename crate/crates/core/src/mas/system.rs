use crate::numerics::{dot, zoh_discretize, Matrix};

use super::MasError;

/// Stable discrete-time plant with a scalar tracking output and optional
/// constrained outputs:
///
/// ```text
/// x(t+1) = A x(t) + B v(t)
/// y_tr(t) = C_tr x(t)
/// y_st(t) = C_st x(t) + D_st v(t)
/// ```
#[derive(Clone, Debug)]
pub struct DiscreteLtiSystem {
    a: Matrix,
    b: Vec<f64>,
    c_tr: Vec<f64>,
    c_st: Matrix,
    d_st: Vec<f64>,
    ts: f64,
    /// (I - A)^{-1} B, the steady state reached under a unit constant input.
    ss_gain: Vec<f64>,
}

/// Tolerance on the unit DC gain from `v` to `y_tr`.
pub const DC_GAIN_TOL: f64 = 1e-9;

impl DiscreteLtiSystem {
    pub fn new(
        a: Matrix,
        b: Vec<f64>,
        c_tr: Vec<f64>,
        c_st: Matrix,
        d_st: Vec<f64>,
        ts: f64,
    ) -> Result<Self, MasError> {
        let sys = Self::new_unchecked(a, b, c_tr, c_st, d_st, ts)?;
        let rho = sys.spectral_radius();
        if rho >= 1.0 {
            return Err(MasError::Unstable {
                spectral_radius: rho,
            });
        }
        let gain = sys.dc_gain();
        if (gain - 1.0).abs() > DC_GAIN_TOL {
            return Err(MasError::DcGain { gain });
        }
        Ok(sys)
    }

    /// Checks dimensions only; stability and DC gain are left to the caller.
    pub fn new_unchecked(
        a: Matrix,
        b: Vec<f64>,
        c_tr: Vec<f64>,
        c_st: Matrix,
        d_st: Vec<f64>,
        ts: f64,
    ) -> Result<Self, MasError> {
        let n = a.rows();
        if !a.is_square() || n == 0 {
            return Err(MasError::Dimension(format!(
                "A must be square and non-empty, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.len() != n || c_tr.len() != n {
            return Err(MasError::Dimension(format!(
                "B and C_tr must have length {n}, got {} and {}",
                b.len(),
                c_tr.len()
            )));
        }
        let c_st = if c_st.rows() == 0 {
            Matrix::zeros(0, n)
        } else {
            c_st
        };
        if c_st.cols() != n || d_st.len() != c_st.rows() {
            return Err(MasError::Dimension(format!(
                "C_st must be px{n} and D_st of length p, got {}x{} and {}",
                c_st.rows(),
                c_st.cols(),
                d_st.len()
            )));
        }
        if !(ts > 0.0 && ts.is_finite()) {
            return Err(MasError::Dimension(format!(
                "sample time must be positive, got {ts}"
            )));
        }
        if b.iter().chain(&c_tr).chain(&d_st).any(|v| !v.is_finite()) {
            return Err(MasError::Dimension("non-finite system entry".into()));
        }
        let i_minus_a = Matrix::identity(n).sub(&a);
        let ss_gain = i_minus_a
            .solve(&Matrix::column(&b)?)
            .map_err(|_| MasError::Unstable {
                spectral_radius: 1.0,
            })?
            .col(0);
        Ok(Self {
            a,
            b,
            c_tr,
            c_st,
            d_st,
            ts,
            ss_gain,
        })
    }

    /// Closed-loop PLL with loop-filter gain `g_lp` and VCO gain `g_vco`,
    /// states `x1 = y`, `x2 = dy/dt`, discretized by zero-order hold.
    ///
    /// The constrained output is the slew rate `y_st = x2`.
    pub fn pll(g_lp: f64, g_vco: f64, ts: f64) -> Result<Self, MasError> {
        let (a_c, b_c) = pll_continuous(g_lp, g_vco);
        let (a, b) = zoh_discretize(&a_c, &b_c, ts)?;
        Self::new(
            a,
            b.col(0),
            vec![1.0, 0.0],
            Matrix::from_rows(&[[0.0, 1.0]])?,
            vec![0.0],
            ts,
        )
    }

    /// Same plant with the constrained outputs removed.
    pub fn without_constrained_outputs(&self) -> Self {
        Self {
            c_st: Matrix::zeros(0, self.order()),
            d_st: Vec::new(),
            ..self.clone()
        }
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn constrained_outputs(&self) -> usize {
        self.c_st.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c_tr(&self) -> &[f64] {
        &self.c_tr
    }

    pub fn c_st(&self) -> &Matrix {
        &self.c_st
    }

    pub fn d_st(&self) -> &[f64] {
        &self.d_st
    }

    pub fn ts(&self) -> f64 {
        self.ts
    }

    pub fn steady_state_gain(&self) -> &[f64] {
        &self.ss_gain
    }

    /// Equilibrium state for a constant input `v`.
    pub fn steady_state(&self, v: f64) -> Vec<f64> {
        self.ss_gain.iter().map(|g| g * v).collect()
    }

    pub fn dc_gain(&self) -> f64 {
        dot(&self.c_tr, &self.ss_gain)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.a.spectral_radius().expect("A is square")
    }

    pub fn step(&self, x: &[f64], v: f64) -> Vec<f64> {
        let mut next = self.a.mul_vec(x);
        for (n, b) in next.iter_mut().zip(&self.b) {
            *n += b * v;
        }
        next
    }

    pub fn y_tr(&self, x: &[f64]) -> f64 {
        dot(&self.c_tr, x)
    }

    pub fn y_st(&self, x: &[f64], v: f64) -> Vec<f64> {
        self.c_st
            .row_iter()
            .zip(&self.d_st)
            .map(|(c, d)| dot(c, x) + d * v)
            .collect()
    }

    /// Augmented dynamics of `(x, v)` with `v` held constant.
    pub fn augmented(&self) -> Matrix {
        let n = self.order();
        let mut m = Matrix::zeros(n + 1, n + 1);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = self.a[(i, j)];
            }
            m[(i, n)] = self.b[i];
        }
        m[(n, n)] = 1.0;
        m
    }
}

/// Continuous-time PLL `G_lp G_vco / (s^2 + G_lp s + G_lp G_vco)` in
/// controllable states.
pub fn pll_continuous(g_lp: f64, g_vco: f64) -> (Matrix, Matrix) {
    let k = g_lp * g_vco;
    let a = Matrix::from_rows(&[[0.0, 1.0], [-k, -g_lp]]).expect("finite gains");
    let b = Matrix::from_rows(&[[0.0], [k]]).expect("finite gains");
    (a, b)
}

/// Polyhedral output constraint `S y <= s`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSet {
    matrix: Matrix,
    bound: Vec<f64>,
}

impl ConstraintSet {
    pub fn new(matrix: Matrix, bound: Vec<f64>) -> Result<Self, MasError> {
        if matrix.rows() == 0 {
            return Err(MasError::EmptyConstraints);
        }
        if bound.len() != matrix.rows() {
            return Err(MasError::Dimension(format!(
                "constraint matrix has {} rows but {} bounds",
                matrix.rows(),
                bound.len()
            )));
        }
        if let Some(i) = matrix.row_iter().position(|r| r.iter().all(|v| *v == 0.0)) {
            return Err(MasError::Dimension(format!("constraint row {i} is zero")));
        }
        if bound.iter().any(|v| !v.is_finite()) {
            return Err(MasError::Dimension("non-finite constraint bound".into()));
        }
        Ok(Self { matrix, bound })
    }

    /// `lo <= y_i <= hi` for every output `i` of a `p`-output system.
    pub fn symmetric_box(p: usize, limit: f64) -> Result<Self, MasError> {
        let mut m = Matrix::zeros(2 * p, p);
        for i in 0..p {
            m[(2 * i, i)] = 1.0;
            m[(2 * i + 1, i)] = -1.0;
        }
        Self::new(m, vec![limit; 2 * p])
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn bound(&self) -> &[f64] {
        &self.bound
    }

    pub fn len(&self) -> usize {
        self.bound.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bound.is_empty()
    }
}

/// Polytopic family of plants given by its vertices.
#[derive(Clone, Debug)]
pub struct UncertainSystem {
    vertices: Vec<DiscreteLtiSystem>,
    nominal: usize,
}

impl UncertainSystem {
    pub fn new(vertices: Vec<DiscreteLtiSystem>, nominal: usize) -> Result<Self, MasError> {
        let first = vertices.first().ok_or(MasError::NoVertices)?;
        let (n, p) = (first.order(), first.constrained_outputs());
        if vertices
            .iter()
            .any(|s| s.order() != n || s.constrained_outputs() != p)
        {
            return Err(MasError::Dimension(
                "vertex systems must share state and output dimensions".into(),
            ));
        }
        if nominal >= vertices.len() {
            return Err(MasError::Dimension(format!(
                "nominal index {nominal} out of range"
            )));
        }
        for s in &vertices {
            let rho = s.spectral_radius();
            if rho >= 1.0 {
                return Err(MasError::Unstable {
                    spectral_radius: rho,
                });
            }
        }
        Ok(Self { vertices, nominal })
    }

    /// PLL with the VCO gain ranging over `g_vco_vertices`.
    pub fn pll(
        g_lp: f64,
        g_vco_vertices: &[f64],
        g_vco_nominal: f64,
        ts: f64,
    ) -> Result<Self, MasError> {
        let mut vertices = Vec::with_capacity(g_vco_vertices.len() + 1);
        for &g in g_vco_vertices {
            vertices.push(DiscreteLtiSystem::pll(g_lp, g, ts)?);
        }
        vertices.push(DiscreteLtiSystem::pll(g_lp, g_vco_nominal, ts)?);
        let nominal = vertices.len() - 1;
        Self::new(vertices, nominal)
    }

    pub fn vertices(&self) -> &[DiscreteLtiSystem] {
        &self.vertices
    }

    pub fn nominal(&self) -> &DiscreteLtiSystem {
        &self.vertices[self.nominal]
    }

    pub fn nominal_index(&self) -> usize {
        self.nominal
    }
}
