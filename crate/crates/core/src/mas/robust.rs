use crate::numerics::Matrix;

use super::build::{build_mas_for_output, output_map, BuildOptions, Output, Partial};
use super::representation::{DynamicMasPair, MasRepresentation, Orientation, RowTag};
use super::system::{ConstraintSet, UncertainSystem};
use super::MasError;

/// Cap on the number of vertex products explored.
pub const DEFAULT_MAX_DEPTH: usize = 5000;
/// Cap on the number of rows held by the polytopic construction.
pub const DEFAULT_MAX_ROWS: usize = 20_000;

/// Constraint handled by the robust builders.
#[derive(Clone, Debug, PartialEq)]
pub enum RobustConstraint {
    /// `S y_st <= s`.
    Static(ConstraintSet),
    /// `y_tr <= r`, stored with `h = bound / r`.
    Tracking { r: f64 },
}

/// How uncertainty between the vertices is interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RobustMethod {
    /// The plant may switch between vertices at every step; the set is
    /// invariant under all vertex products.
    Polytopic,
    /// The plant is one of the vertices, fixed but unknown; the set is the
    /// intersection of the per-vertex sets.
    Vertexwise,
}

struct Resolved {
    output: Output,
    constraints: ConstraintSet,
    h_scale: f64,
}

fn resolve(constraint: &RobustConstraint, epsilon: f64) -> Result<Resolved, MasError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(MasError::Epsilon(epsilon));
    }
    Ok(match constraint {
        RobustConstraint::Static(cs) => Resolved {
            output: Output::Constrained,
            constraints: cs.clone(),
            h_scale: 1.0,
        },
        RobustConstraint::Tracking { r } => {
            if *r == 0.0 || !r.is_finite() {
                return Err(MasError::ZeroReference);
            }
            Resolved {
                output: Output::Tracking,
                constraints: ConstraintSet::new(Matrix::from_rows(&[[1.0]])?, vec![*r])?,
                h_scale: *r,
            }
        }
    })
}

/// MAS invariant under every vertex of a polytopic family.
///
/// Rows are propagated breadth first: the rows at depth `d + 1` are
/// `row * Abar_j` for every accepted row at depth `d` and every vertex `j`,
/// where `Abar_j = [[A_j, B_j], [0, 1]]`. Rows implied by those already
/// accepted are dropped and never expanded. Construction ends at the first
/// depth that contributes nothing.
pub fn build_robust_mas_polytopic(
    usys: &UncertainSystem,
    constraint: &RobustConstraint,
    epsilon: f64,
) -> Result<MasRepresentation, MasError> {
    build_robust_polytopic_capped(
        usys,
        constraint,
        epsilon,
        DEFAULT_MAX_DEPTH,
        DEFAULT_MAX_ROWS,
    )
}

/// [`build_robust_mas_polytopic`] with explicit depth and row caps.
pub fn build_robust_polytopic_capped(
    usys: &UncertainSystem,
    constraint: &RobustConstraint,
    epsilon: f64,
    max_depth: usize,
    max_rows: usize,
) -> Result<MasRepresentation, MasError> {
    let Resolved {
        output,
        constraints,
        h_scale,
    } = resolve(constraint, epsilon)?;
    let vertices = usys.vertices();
    let s = constraints.matrix();
    let bounds = constraints.bound();
    let n = usys.nominal().order();

    let mut partial = Partial::new(n + 1, Orientation::Le);
    let mut seeds: Vec<(Vec<f64>, usize)> = Vec::new();
    let mut ss_gains: Vec<f64> = Vec::new();
    let mut ss_bounds: Vec<f64> = Vec::new();
    for sys in vertices {
        let (c, d) = output_map(sys, output);
        if s.cols() != c.rows() {
            return Err(MasError::Dimension(format!(
                "constraint matrix has {} columns but the output has {} entries",
                s.cols(),
                c.rows()
            )));
        }
        let sc = s.matmul(&c);
        let sd = s.mul_vec(&d);
        for i in 0..s.rows() {
            let g = crate::numerics::dot(sc.row(i), sys.steady_state_gain()) + sd[i];
            let b = bounds[i] - epsilon * bounds[i].abs();
            let dup = ss_gains
                .iter()
                .zip(&ss_bounds)
                .any(|(&g0, &b0)| (g0 - g).abs() <= 1e-12 * (1.0 + g.abs()) && b0 == b);
            if !dup {
                ss_gains.push(g);
                ss_bounds.push(b);
            }
            let mut row = sc.row(i).to_vec();
            row.push(sd[i]);
            seeds.push((row, i));
        }
    }
    partial.push_steady_state(&ss_gains, &ss_bounds)?;

    let augmented: Vec<Matrix> = vertices.iter().map(|v| v.augmented()).collect();
    let mut frontier = seeds;
    let mut last_productive = None;
    for depth in 0..=max_depth {
        let mut accepted = Vec::new();
        for (row, src) in frontier {
            let bound = bounds[src];
            if !partial.redundant(&row, bound)? {
                partial.push(&row, bound, RowTag::at(depth, src))?;
                if partial.len() > max_rows {
                    return Err(MasError::RowLimit { limit: max_rows });
                }
                accepted.push((row, src));
            }
        }
        if accepted.is_empty() {
            let j_star = last_productive.unwrap_or(0);
            partial.prune()?;
            return Ok(partial.into_representation(j_star, epsilon, h_scale));
        }
        last_productive = Some(depth);
        frontier = accepted
            .iter()
            .flat_map(|(row, src)| augmented.iter().map(move |ab| (ab.vec_mul(row), *src)))
            .collect();
    }
    Err(MasError::NotFinitelyDetermined { cap: max_depth })
}

/// Intersection of the MAS of every vertex plant, with rows implied by the
/// others removed. The admissibility index is the largest vertex index.
pub fn build_robust_mas_vertexwise(
    usys: &UncertainSystem,
    constraint: &RobustConstraint,
    epsilon: f64,
) -> Result<MasRepresentation, MasError> {
    let Resolved {
        output,
        constraints,
        h_scale,
    } = resolve(constraint, epsilon)?;
    let n = usys.nominal().order();
    let mut partial = Partial::new(n + 1, Orientation::Le);
    let mut j_star = 0;
    for sys in usys.vertices() {
        let rep = build_mas_for_output(
            sys,
            output,
            &constraints,
            Orientation::Le,
            epsilon,
            BuildOptions::default(),
        )?;
        j_star = j_star.max(rep.admissibility_index());
        for (i, tag) in rep.tags().iter().enumerate() {
            let row = rep.row(i);
            let bound = rep.h()[i];
            if tag.is_steady_state() && partial.has_row(row, bound) {
                continue;
            }
            partial.push(row, bound, *tag)?;
        }
    }
    partial.prune()?;
    Ok(partial.into_representation(j_star, epsilon, h_scale))
}

/// Dispatches on `method`.
pub fn build_robust_mas(
    usys: &UncertainSystem,
    constraint: &RobustConstraint,
    epsilon: f64,
    method: RobustMethod,
) -> Result<MasRepresentation, MasError> {
    match method {
        RobustMethod::Polytopic => build_robust_mas_polytopic(usys, constraint, epsilon),
        RobustMethod::Vertexwise => build_robust_mas_vertexwise(usys, constraint, epsilon),
    }
}

/// Robust counterpart of the dynamic pair: tracking sets at `r = 1` and
/// `r = -1`.
pub fn build_robust_dynamic_pair(
    usys: &UncertainSystem,
    epsilon: f64,
    method: RobustMethod,
) -> Result<DynamicMasPair, MasError> {
    Ok(DynamicMasPair {
        minus: build_robust_mas(
            usys,
            &RobustConstraint::Tracking { r: 1.0 },
            epsilon,
            method,
        )?,
        plus: build_robust_mas(
            usys,
            &RobustConstraint::Tracking { r: -1.0 },
            epsilon,
            method,
        )?,
    })
}
