//! Polytope tensegrities: edge cables, central struts, first-order flexes,
//! the Izmestiev self-stress, central symmetry, vertex cones and an
//! empirical local-rigidity probe.

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::GraphEmbedding;
use crate::fixtures::shapes::random_unit_vector;
use crate::geometry::Polytope;
use crate::linalg::{gram, max_abs, null_space, skew_basis, Point};
use crate::lp::positive_combination_margin;
use crate::wachspress::izmestiev;

/// Slack above which the flex LP reports a strict flex.
pub const FLEX_SLACK_TOL: f64 = 1e-7;

/// Relative constraint residual at which a probe sample counts as feasible.
pub const FEASIBILITY_TOL: f64 = 1e-7;

/// Relative Gram deviation above which a feasible sample is a violation.
pub const VIOLATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MemberKind {
    /// May contract but not expand.
    Cable,
    /// May expand but not contract.
    Strut,
    Bar,
}

#[derive(Debug, Clone, Serialize)]
pub struct Member {
    pub i: usize,
    pub j: usize,
    pub kind: MemberKind,
    pub rest_length: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Tensegrity {
    #[serde(serialize_with = "crate::io::ser_points")]
    pub nodes: Vec<Point>,
    pub members: Vec<Member>,
    /// Index of the immobile node.
    pub pinned: usize,
}

impl Tensegrity {
    pub fn new(nodes: Vec<Point>, members: Vec<(usize, usize, MemberKind)>, pinned: usize) -> Result<Self> {
        let n = nodes.len();
        if pinned >= n {
            return Err(Error::Invalid(format!("pinned node {pinned} out of range")));
        }
        let members = members
            .into_iter()
            .map(|(i, j, kind)| {
                if i >= n || j >= n || i == j {
                    return Err(Error::Invalid(format!("member {i}-{j} is not a pair of distinct nodes")));
                }
                Ok(Member { i, j, kind, rest_length: (&nodes[i] - &nodes[j]).norm() })
            })
            .collect::<Result<_>>()?;
        Ok(Tensegrity { nodes, members, pinned })
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].len()
    }

    pub fn count(&self, kind: MemberKind) -> usize {
        self.members.iter().filter(|m| m.kind == kind).count()
    }

    /// `<x_i - x_j, v_i - v_j>` per member.
    pub fn rates(&self, v: &[Point]) -> Vec<f64> {
        self.members.iter().map(|m| (&self.nodes[m.i] - &self.nodes[m.j]).dot(&(&v[m.i] - &v[m.j]))).collect()
    }

    /// Velocity fields of infinitesimal rotations about the pinned node.
    pub fn trivial_flexes(&self) -> Vec<Vec<Point>> {
        let o = &self.nodes[self.pinned];
        skew_basis(self.dim()).into_iter().map(|s| self.nodes.iter().map(|x| &s * (x - o)).collect()).collect()
    }

    fn free_nodes(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&k| k != self.pinned).collect()
    }
}

/// Edges become cables and vertex-to-origin members struts; `swapped`
/// exchanges the two kinds. The origin is the last node.
pub fn build_tensegrity(p: &Polytope, swapped: bool) -> Result<Tensegrity> {
    let d = p.dim();
    if !p.contains_interior(&Point::zeros(d)) {
        return Err(Error::OriginNotInterior);
    }
    let (edge_kind, central_kind) =
        if swapped { (MemberKind::Strut, MemberKind::Cable) } else { (MemberKind::Cable, MemberKind::Strut) };
    let n = p.vertex_count();
    let mut nodes = p.vertices().to_vec();
    nodes.push(Point::zeros(d));
    let members =
        p.edges().iter().map(|&(i, j)| (i, j, edge_kind)).chain((0..n).map(|i| (i, n, central_kind))).collect();
    Tensegrity::new(nodes, members, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlexClass {
    TrivialOnly,
    NontrivialFlex,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlexResult {
    #[serde(serialize_with = "crate::io::ser_points")]
    pub flex: Vec<Point>,
    pub rates: Vec<f64>,
    pub classification: FlexClass,
    /// Optimal total slack of the sign-constrained program.
    pub slack: f64,
}

/// Linear constraints on the free velocities: one row per member rate.
fn rigidity_matrix(t: &Tensegrity) -> DMatrix<f64> {
    let d = t.dim();
    let free = t.free_nodes();
    let col = |k: usize| free.iter().position(|&f| f == k).map(|c| c * d);
    let mut r = DMatrix::zeros(t.members.len(), free.len() * d);
    for (row, m) in t.members.iter().enumerate() {
        let e = &t.nodes[m.i] - &t.nodes[m.j];
        for a in 0..d {
            if let Some(c) = col(m.i) {
                r[(row, c + a)] += e[a];
            }
            if let Some(c) = col(m.j) {
                r[(row, c + a)] -= e[a];
            }
        }
    }
    r
}

fn trivial_matrix(t: &Tensegrity) -> DMatrix<f64> {
    let d = t.dim();
    let free = t.free_nodes();
    let triv = t.trivial_flexes();
    DMatrix::from_fn(triv.len(), free.len() * d, |r, c| triv[r][free[c / d]][c % d])
}

fn unpack(t: &Tensegrity, x: &[f64]) -> Vec<Point> {
    let d = t.dim();
    let mut v = vec![Point::zeros(d); t.nodes.len()];
    for (k, &node) in t.free_nodes().iter().enumerate() {
        v[node] = Point::from_column_slice(&x[k * d..(k + 1) * d]);
    }
    v
}

/// Sign-constrained first-order flex modulo rotations. A linear program
/// maximising the total member slack finds strict flexes; when none exist
/// the kernel of the rigidity matrix is checked for flexes that keep every
/// member length fixed to first order.
pub fn first_order_flex(t: &Tensegrity) -> FlexResult {
    let r = rigidity_matrix(t);
    let triv = trivial_matrix(t);
    let nv = r.ncols();

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = (0..nv).map(|_| lp.add_var(0.0, (-1.0, 1.0))).collect();
    for (row, m) in t.members.iter().enumerate() {
        let mut terms: Vec<_> = (0..nv).filter(|&c| r[(row, c)] != 0.0).map(|c| (vars[c], r[(row, c)])).collect();
        match m.kind {
            MemberKind::Bar => lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, 0.0),
            MemberKind::Cable => {
                terms.push((lp.add_var(1.0, (0.0, 1.0)), 1.0));
                lp.add_constraint(terms.as_slice(), ComparisonOp::Le, 0.0);
            }
            MemberKind::Strut => {
                terms.push((lp.add_var(1.0, (0.0, 1.0)), -1.0));
                lp.add_constraint(terms.as_slice(), ComparisonOp::Ge, 0.0);
            }
        }
    }
    for row in 0..triv.nrows() {
        let terms: Vec<_> = (0..nv).filter(|&c| triv[(row, c)] != 0.0).map(|c| (vars[c], triv[(row, c)])).collect();
        lp.add_constraint(terms.as_slice(), ComparisonOp::Eq, 0.0);
    }
    if let Ok(sol) = lp.solve() {
        if sol.objective() > FLEX_SLACK_TOL {
            let x: Vec<f64> = vars.iter().map(|&v| sol[v]).collect();
            let flex = unpack(t, &x);
            return FlexResult {
                rates: t.rates(&flex),
                flex,
                classification: FlexClass::NontrivialFlex,
                slack: sol.objective(),
            };
        }
    }

    let mut stacked = DMatrix::zeros(r.nrows() + triv.nrows(), nv);
    stacked.view_mut((0, 0), (r.nrows(), nv)).copy_from(&r);
    stacked.view_mut((r.nrows(), 0), (triv.nrows(), nv)).copy_from(&triv);
    let kernel = null_space(&stacked, 1e-9);
    let (flex, classification) = if kernel.ncols() > 0 {
        let x: Vec<f64> = kernel.column(0).iter().copied().collect();
        let s = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (unpack(t, &x.iter().map(|v| v / s).collect::<Vec<_>>()), FlexClass::NontrivialFlex)
    } else {
        (vec![Point::zeros(t.dim()); t.nodes.len()], FlexClass::TrivialOnly)
    };
    FlexResult { rates: t.rates(&flex), flex, classification, slack: 0.0 }
}

#[derive(Debug, Clone, Serialize)]
pub struct FlexCheck {
    pub rates: Vec<f64>,
    pub signs_ok: bool,
    /// Norm of the part of the field orthogonal to all rotations.
    pub nontrivial_part: f64,
    pub nontrivial: bool,
}

/// Re-verifies a velocity field by direct substitution.
pub fn check_flex(t: &Tensegrity, v: &[Point]) -> FlexCheck {
    let rates = t.rates(v);
    let size = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let scale = t.members.iter().map(|m| m.rest_length).fold(0.0, f64::max);
    let tol = 1e-9 * (1.0 + size * scale);
    let signs_ok = v[t.pinned].norm() <= tol
        && t.members.iter().zip(&rates).all(|(m, &r)| match m.kind {
            MemberKind::Cable => r <= tol,
            MemberKind::Strut => r >= -tol,
            MemberKind::Bar => r.abs() <= tol,
        });
    let flat =
        |f: &[Point]| -> Point { Point::from_iterator(f.len() * t.dim(), f.iter().flat_map(|p| p.iter().copied())) };
    let triv: Vec<Point> = t.trivial_flexes().iter().map(|f| flat(f)).collect();
    let x = flat(v);
    let basis = DMatrix::from_columns(&triv);
    let nontrivial_part = if triv.is_empty() {
        x.norm()
    } else {
        let coef = crate::linalg::pinv(&basis, 1e-12) * &x;
        (&x - &basis * coef).norm()
    };
    FlexCheck { rates, signs_ok, nontrivial_part, nontrivial: nontrivial_part > 1e-6 * x.norm().max(f64::MIN_POSITIVE) }
}

/// The twist of `[-1,1]^3` about the last axis: the faces `x_d = +1` and
/// `x_d = -1` rotate in opposite directions. The origin gets zero velocity.
pub fn cube_twist_field(p: &Polytope) -> Vec<Point> {
    let d = p.dim();
    let mut v: Vec<Point> = p
        .vertices()
        .iter()
        .map(|x| {
            let mut w = Point::zeros(d);
            w[0] = -x[1] * x[d - 1].signum();
            w[1] = x[0] * x[d - 1].signum();
            w
        })
        .collect();
    v.push(Point::zeros(d));
    v
}

/// The centrally symmetric twist of `[-1,1]^4`: the facet `x_4 = 1` is
/// twisted like the 3-cube inside its hyperplane, and the facet `x_4 = -1`
/// follows so that `v(-p) = -v(p)`.
pub fn fourcube_twist_field(p: &Polytope) -> Vec<Point> {
    let mut v: Vec<Point> = p
        .vertices()
        .iter()
        .map(|x| {
            let (s, y) = if x[3] > 0.0 { (1.0, x.clone()) } else { (-1.0, -x) };
            let mut w = Point::zeros(4);
            w[0] = -y[1] * y[2].signum();
            w[1] = y[0] * y[2].signum();
            w * s
        })
        .collect();
    v.push(Point::zeros(4));
    v
}

#[derive(Debug, Clone, Serialize)]
pub struct StressMatrix {
    /// Rows and columns follow the vertices, then the origin.
    #[serde(serialize_with = "crate::io::ser_matrix")]
    pub omega: DMatrix<f64>,
    /// Relative size of `Omega X` for the placement `X`.
    pub equilibrium_residual: f64,
}

/// Stress matrix of the polytope tensegrity with edge stresses `M_ij` and
/// strut stresses `-alpha_i`.
pub fn stress_matrix(p: &Polytope) -> Result<StressMatrix> {
    let data = izmestiev(p)?;
    let m = &data.normalized;
    let alpha = data.row_sums();
    let n = p.vertex_count();
    let mut omega = DMatrix::zeros(n + 1, n + 1);
    let mut put = |i: usize, j: usize, w: f64| {
        omega[(i, j)] -= w;
        omega[(j, i)] -= w;
        omega[(i, i)] += w;
        omega[(j, j)] += w;
    };
    for &(i, j) in p.edges() {
        put(i, j, m[(i, j)]);
    }
    for (i, a) in alpha.iter().enumerate() {
        put(i, n, -a);
    }
    let mut x = DMatrix::zeros(n + 1, p.dim());
    x.view_mut((0, 0), (n, p.dim())).copy_from(&p.coords());
    let equilibrium_residual = max_abs(&(&omega * &x)) / (max_abs(&omega) * max_abs(&x));
    Ok(StressMatrix { omega, equilibrium_residual })
}

/// The pairing `i -> j` with `p_j = -p_i`, if every vertex has an antipode.
pub fn central_involution(p: &Polytope) -> Option<Vec<usize>> {
    let v = p.vertices();
    let tol = 10.0 * p.tol() * (1.0 + p.scale());
    let map: Vec<usize> =
        (0..v.len()).map(|i| (0..v.len()).find(|&j| (&v[j] + &v[i]).norm() <= tol)).collect::<Option<_>>()?;
    map.iter().enumerate().all(|(i, &j)| map[j] == i).then_some(map)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConeReport {
    /// Whether the origin lies in the interior of the vertex cone.
    pub interior: Vec<bool>,
    pub margins: Vec<f64>,
}

impl ConeReport {
    pub fn all_hold(&self) -> bool {
        self.interior.iter().all(|&b| b)
    }

    pub fn failing(&self) -> Vec<usize> {
        (0..self.interior.len()).filter(|&i| !self.interior[i]).collect()
    }
}

/// Decides `0 in int(q_i + cone{q_j - q_i : ij in E})` for every vertex.
pub fn cone_condition(q: &GraphEmbedding) -> ConeReport {
    let e = q.ambient();
    let scale = q.scale().max(f64::MIN_POSITIVE);
    let mut interior = Vec::new();
    let mut margins = Vec::new();
    for (i, qi) in q.points.iter().enumerate() {
        let gens: Vec<Point> = q
            .graph
            .neighbors(i)
            .iter()
            .map(|&j| &q.points[j] - qi)
            .filter(|u| u.norm() > 1e-12 * scale)
            .map(|u| u.normalize())
            .collect();
        let target = if qi.norm() > 1e-12 * scale { -qi / qi.norm() } else { Point::zeros(e) };
        let spans = !gens.is_empty() && null_space(&DMatrix::from_columns(&gens).transpose(), 1e-9).ncols() == 0;
        let margin = positive_combination_margin(&gens, &target, false, 1.0).unwrap_or(-1.0);
        interior.push(spans && margin > 1e-9);
        margins.push(margin);
    }
    ConeReport { interior, margins }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeReport {
    pub seed: u64,
    pub trials: usize,
    pub radius: f64,
    /// Trials whose corrected embedding met every constraint.
    pub feasible: usize,
    /// Feasible embeddings not congruent to the reference.
    pub violations: usize,
    pub mean_sweeps: f64,
    pub max_gram_deviation: f64,
}

/// Empirical local-rigidity probe around the skeleton of `P`.
pub fn local_probe(p: &Polytope, trials: usize, radius: f64, seed: u64) -> Result<ProbeReport> {
    if !p.contains_interior(&Point::zeros(p.dim())) {
        return Err(Error::OriginNotInterior);
    }
    Ok(probe_embedding(&GraphEmbedding::skeleton(p), trials, radius, seed))
}

/// Samples perturbations of `reference` within `radius`, corrects them
/// toward `{edges not longer, norms not shorter}` and counts feasible
/// embeddings whose Gram matrix differs from the reference.
pub fn probe_embedding(reference: &GraphEmbedding, trials: usize, radius: f64, seed: u64) -> ProbeReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = reference.edge_lengths();
    let norms: Vec<f64> = reference.points.iter().map(|x| x.norm()).collect();
    let scale = reference.points.iter().map(|x| x.norm()).fold(0.0, f64::max).max(reference.scale());
    let feas_tol = FEASIBILITY_TOL * scale;
    let g0 = gram(&reference.points);
    let e = reference.ambient();
    let (mut feasible, mut violations, mut sweeps_total) = (0, 0, 0usize);
    let mut max_dev = 0.0f64;
    for _ in 0..trials {
        let mut q: Vec<Point> = reference
            .points
            .iter()
            .map(|x| x + random_unit_vector(e, &mut rng) * (radius * rng.random::<f64>()))
            .collect();
        let mut ok = false;
        for sweep in 0..200 {
            sweeps_total += 1;
            let mut worst = 0.0f64;
            for (&(i, j), &l) in reference.graph.edges().iter().zip(&lengths) {
                let diff = &q[i] - &q[j];
                let len = diff.norm();
                if len > l {
                    worst = worst.max(len - l);
                    let shift = diff * ((len - l) / (2.0 * len));
                    q[i] -= &shift;
                    q[j] += &shift;
                }
            }
            for (x, &r) in q.iter_mut().zip(&norms) {
                let len = x.norm();
                if len < r {
                    worst = worst.max(r - len);
                    if len > 0.0 {
                        *x *= r / len;
                    }
                }
            }
            if worst <= feas_tol && sweep > 0 {
                ok = true;
                break;
            }
        }
        if ok {
            feasible += 1;
            let dev = max_abs(&(gram(&q) - &g0));
            max_dev = max_dev.max(dev);
            if dev > VIOLATION_TOL * scale * scale {
                violations += 1;
            }
        }
    }
    ProbeReport {
        seed,
        trials,
        radius,
        feasible,
        violations,
        mean_sweeps: sweeps_total as f64 / trials.max(1) as f64,
        max_gram_deviation: max_dev,
    }
}
