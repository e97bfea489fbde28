//! Discretized electromagnetic-fluid ODE systems on periodic grids: the
//! energy-motivated variable transform, system builders for 1D/2D/3D, the
//! classical nonlinear right-hand side, and structural validation.

use crate::error::{Error, Result};
use std::fmt::Write as _;

/// Field component: velocity, electric, or magnetic, with a 1-based axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Component {
    U(u8),
    E(u8),
    B(u8),
}

impl Component {
    pub fn label(self) -> String {
        match self {
            Component::U(i) => format!("u{i}"),
            Component::E(i) => format!("E{i}"),
            Component::B(i) => format!("B{i}"),
        }
    }
}

/// Per-dimension component layout: block order of the flat state vector.
pub fn components_for_dim(dim: usize) -> Result<&'static [Component]> {
    use Component::*;
    match dim {
        1 => Ok(&[U(1), E(1)]),
        2 => Ok(&[U(1), U(2), E(1), E(2), B(3)]),
        3 => Ok(&[U(1), U(2), U(3), E(1), E(2), E(3), B(1), B(2), B(3)]),
        _ => Err(Error::Config(format!("unsupported spatial dimension {dim}"))),
    }
}

/// Periodic rectangular grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
}

impl GridSpec {
    pub fn new(shape: &[usize], spacing: &[f64]) -> Result<Self> {
        let dim = shape.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::Config(format!("grid dimension must be 1..=3, got {dim}")));
        }
        if spacing.len() != dim {
            return Err(Error::Config("spacing length must match grid dimension".into()));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::Config("grid axes must be non-empty".into()));
        }
        if spacing.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::Config("grid spacings must be positive".into()));
        }
        Ok(GridSpec { dim, shape: shape.to_vec(), spacing: spacing.to_vec() })
    }

    pub fn n_points(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..].iter().product()
    }

    /// Flat point index with periodic wrap on each axis.
    pub fn flat_point(&self, idx: &[i64]) -> usize {
        debug_assert_eq!(idx.len(), self.dim);
        let mut flat = 0;
        for (a, &i) in idx.iter().enumerate() {
            let n = self.shape[a] as i64;
            flat += (i.rem_euclid(n) as usize) * self.stride(a);
        }
        flat
    }

    pub fn point_coords(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for a in 0..self.dim {
            let s = self.stride(a);
            out[a] = flat / s;
            flat %= s;
        }
        out
    }

    /// Shift a flat point index by `off` cells along `axis` (periodic).
    pub fn shift(&self, flat: usize, axis: usize, off: i64) -> usize {
        let mut c: Vec<i64> = self.point_coords(flat).iter().map(|&v| v as i64).collect();
        c[axis] += off;
        self.flat_point(&c)
    }
}

/// Physical constants and the (time-stationary) density field.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    pub q: f64,
    pub m_q: f64,
    pub eps0: f64,
    pub mu0: f64,
    /// Density per grid point, flattened; must be strictly positive.
    pub density: Vec<f64>,
}

impl PhysicalParams {
    pub fn new(q: f64, m_q: f64, eps0: f64, mu0: f64, density: Vec<f64>) -> Result<Self> {
        if !(m_q > 0.0 && eps0 > 0.0 && mu0 > 0.0) {
            return Err(Error::Parameter("m_q, eps0, mu0 must be positive".into()));
        }
        if density.iter().any(|&n| !(n > 0.0)) {
            return Err(Error::Domain("density must be strictly positive everywhere".into()));
        }
        Ok(PhysicalParams { q, m_q, eps0, mu0, density })
    }

    /// Nondimensional convention: unit constants, uniform unit density, and
    /// the plasma frequency supplied directly through q.
    pub fn nondimensional(n_points: usize, omega_p: f64) -> Self {
        PhysicalParams { q: omega_p, m_q: 1.0, eps0: 1.0, mu0: 1.0, density: vec![1.0; n_points] }
    }

    /// sqrt(n_j/(eps0 m_q)) * q at grid point j (the local plasma frequency).
    pub fn omega_tilde(&self, point: usize) -> f64 {
        (self.density[point] / (self.eps0 * self.m_q)).sqrt() * self.q
    }

    /// sqrt(mu0/m_q) * q (the Lorentz coupling).
    pub fn q_tilde(&self) -> f64 {
        (self.mu0 / self.m_q).sqrt() * self.q
    }

    /// 1/sqrt(eps0 mu0) (the wave speed).
    pub fn c_tilde(&self) -> f64 {
        1.0 / (self.eps0 * self.mu0).sqrt()
    }
}

/// Transformed field data (ũ, Ẽ, B̃), one flat array per layout component.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub grid: GridSpec,
    pub comps: Vec<Vec<f64>>,
}

impl FieldGrid {
    pub fn zeros(grid: GridSpec) -> Result<Self> {
        let n = grid.n_points();
        let k = components_for_dim(grid.dim)?.len();
        Ok(FieldGrid { grid, comps: vec![vec![0.0; n]; k] })
    }

    fn comp_slot(&self, comp: Component) -> Result<usize> {
        components_for_dim(self.grid.dim)?
            .iter()
            .position(|&c| c == comp)
            .ok_or_else(|| Error::Config(format!("component {} absent in {}D", comp.label(), self.grid.dim)))
    }

    pub fn get(&self, comp: Component, point: usize) -> f64 {
        let slot = self.comp_slot(comp).expect("component present");
        self.comps[slot][point]
    }

    pub fn set(&mut self, comp: Component, point: usize, v: f64) {
        let slot = self.comp_slot(comp).expect("component present");
        self.comps[slot][point] = v;
    }

    /// Flatten into the variable layout of the matching OdeSystem.
    pub fn to_state(&self) -> Vec<f64> {
        self.comps.concat()
    }

    pub fn from_state(grid: GridSpec, x: &[f64]) -> Result<Self> {
        let mut fg = FieldGrid::zeros(grid)?;
        let n = fg.grid.n_points();
        let expected = n * fg.comps.len();
        if x.len() != expected {
            return Err(Error::LengthMismatch { expected, got: x.len() });
        }
        for (s, comp) in fg.comps.iter_mut().enumerate() {
            comp.copy_from_slice(&x[s * n..(s + 1) * n]);
        }
        Ok(fg)
    }
}

/// ũ = √n·u, Ẽ = √(ε0/m_q)·E, B̃ = √(1/(μ0 m_q))·B pointwise.
pub fn transform_fields(
    u: &[Vec<f64>],
    e: &[Vec<f64>],
    b: &[Vec<f64>],
    grid: &GridSpec,
    params: &PhysicalParams,
) -> Result<FieldGrid> {
    let mut fg = FieldGrid::zeros(grid.clone())?;
    let n = grid.n_points();
    let eu = (params.eps0 / params.m_q).sqrt();
    let bu = (1.0 / (params.mu0 * params.m_q)).sqrt();
    for (slot, &comp) in components_for_dim(grid.dim)?.iter().enumerate() {
        let (src, scale): (&Vec<f64>, Box<dyn Fn(usize) -> f64>) = match comp {
            Component::U(i) => {
                let d = &params.density;
                (&u[(i - 1) as usize], Box::new(move |p| d[p].sqrt()))
            }
            Component::E(i) => (&e[(i - 1) as usize], Box::new(move |_| eu)),
            Component::B(i) => (&b[(i - 1) as usize], Box::new(move |_| bu)),
        };
        if src.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: src.len() });
        }
        for p in 0..n {
            fg.comps[slot][p] = scale(p) * src[p];
        }
    }
    Ok(fg)
}

/// Exact inverse of [`transform_fields`]; returns (u, E, B) component lists.
pub fn inverse_transform(
    fg: &FieldGrid,
    params: &PhysicalParams,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = fg.grid.n_points();
    let eu = (params.eps0 / params.m_q).sqrt();
    let bu = (1.0 / (params.mu0 * params.m_q)).sqrt();
    let (mut u, mut e, mut b) = (Vec::new(), Vec::new(), Vec::new());
    for (slot, &comp) in components_for_dim(fg.grid.dim)?.iter().enumerate() {
        let mut out = vec![0.0; n];
        match comp {
            Component::U(_) => {
                for p in 0..n {
                    out[p] = fg.comps[slot][p] / params.density[p].sqrt();
                }
                u.push(out);
            }
            Component::E(_) => {
                for p in 0..n {
                    out[p] = fg.comps[slot][p] / eu;
                }
                e.push(out);
            }
            Component::B(_) => {
                for p in 0..n {
                    out[p] = fg.comps[slot][p] / bu;
                }
                b.push(out);
            }
        }
    }
    Ok((u, e, b))
}

/// The advection stencil at component i, point j:
/// −Σ_k (1/(4Δr_k)) [ ũ_{k,j+e_k} ũ_{i,j+2e_k}/√n_{j+e_k}
///                  − ũ_{k,j−e_k} ũ_{i,j−2e_k}/√n_{j−e_k} ].
pub fn discrete_nonlinear_term(
    fg: &FieldGrid,
    grid: &GridSpec,
    params: &PhysicalParams,
    comp_axis: u8,
    point: usize,
) -> f64 {
    let mut acc = 0.0;
    for k in 0..grid.dim {
        let h = 1.0 / (4.0 * grid.spacing[k]);
        let pf = grid.shift(point, k, 1);
        let pf2 = grid.shift(point, k, 2);
        let pb = grid.shift(point, k, -1);
        let pb2 = grid.shift(point, k, -2);
        let uk = Component::U((k + 1) as u8);
        let ui = Component::U(comp_axis);
        acc -= h
            * (fg.get(uk, pf) * fg.get(ui, pf2) / params.density[pf].sqrt()
                - fg.get(uk, pb) * fg.get(ui, pb2) / params.density[pb].sqrt());
    }
    acc
}

/// The Levi-Civita symbol on indices in {1,2,3}.
pub fn levi_civita(k1: u8, k2: u8, k3: u8) -> Result<i32> {
    for k in [k1, k2, k3] {
        if !(1..=3).contains(&k) {
            return Err(Error::Parameter(format!("Levi-Civita index {k} out of range 1..=3")));
        }
    }
    Ok(match (k1, k2, k3) {
        (1, 2, 3) | (2, 3, 1) | (3, 1, 2) => 1,
        (1, 3, 2) | (2, 1, 3) | (3, 2, 1) => -1,
        _ => 0,
    })
}

/// One monomial interaction: a sorted variable index set with its signed
/// couplings, Σ α = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Interaction {
    /// Strictly increasing variable indices.
    pub indices: Vec<usize>,
    /// Couplings aligned with `indices`.
    pub alphas: Vec<f64>,
}

impl Interaction {
    /// Build from unsorted (index, coupling) pairs; rejects duplicates.
    pub fn new(mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.sort_by_key(|&(i, _)| i);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Config(
                "interaction index set has duplicate variables; grid too small (need N_x >= 5)".into(),
            ));
        }
        let (indices, alphas) = pairs.into_iter().unzip();
        Ok(Interaction { indices, alphas })
    }
}

/// Variable-layout descriptor: (component, grid point) ↔ flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub grid: GridSpec,
}

impl Layout {
    pub fn n_vars(&self) -> usize {
        components_for_dim(self.grid.dim).expect("valid dim").len() * self.grid.n_points()
    }

    /// Flat variable index of `comp` at flat grid point `point`.
    pub fn var(&self, comp: Component, point: usize) -> usize {
        let slot = components_for_dim(self.grid.dim)
            .expect("valid dim")
            .iter()
            .position(|&c| c == comp)
            .unwrap_or_else(|| panic!("component {} absent in {}D", comp.label(), self.grid.dim));
        slot * self.grid.n_points() + point
    }

    /// Same, addressing the grid point by (wrapped) coordinates.
    pub fn var_at(&self, comp: Component, idx: &[i64]) -> usize {
        self.var(comp, self.grid.flat_point(idx))
    }

    pub fn split(&self, flat: usize) -> (Component, usize) {
        let n = self.grid.n_points();
        let comps = components_for_dim(self.grid.dim).expect("valid dim");
        (comps[flat / n], flat % n)
    }
}

/// A divergence-free polynomial ODE system dx_j/dt = Σ_{p∋j} α_{p→j} Π_{l∈p\{j}} x_l.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSystem {
    pub n_vars: usize,
    pub interactions: Vec<Interaction>,
    /// Per-variable incidence bound.
    pub c: usize,
    /// Polynomial degree bound (|p| ≤ d).
    pub d: usize,
    pub layout: Option<Layout>,
}

/// One structural defect found by [`validate_system`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ArityOutOfRange { interaction: usize, arity: usize },
    CouplingSumNonzero { interaction: usize, sum: f64 },
    IndexOutOfRange { interaction: usize, index: usize },
    IncidenceOutOfRange { variable: usize, count: usize },
}

/// Checks 2 ≤ |p| ≤ d, per-interaction Σα = 0 (tolerance 1e-12·max|α|),
/// index ranges, and per-variable incidence in [1, c]. Collects every
/// violation instead of stopping at the first.
pub fn validate_system(sys: &OdeSystem) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut incidence = vec![0usize; sys.n_vars];
    for (t, ia) in sys.interactions.iter().enumerate() {
        let arity = ia.indices.len();
        if !(2..=sys.d).contains(&arity) {
            out.push(Violation::ArityOutOfRange { interaction: t, arity });
        }
        let max_a = ia.alphas.iter().fold(0.0f64, |m, &a| m.max(a.abs()));
        let sum: f64 = ia.alphas.iter().sum();
        if sum.abs() > 1e-12 * max_a.max(1e-300) {
            out.push(Violation::CouplingSumNonzero { interaction: t, sum });
        }
        for &j in &ia.indices {
            if j >= sys.n_vars {
                out.push(Violation::IndexOutOfRange { interaction: t, index: j });
            } else {
                incidence[j] += 1;
            }
        }
    }
    for (v, &count) in incidence.iter().enumerate() {
        if count == 0 || count > sys.c {
            out.push(Violation::IncidenceOutOfRange { variable: v, count });
        }
    }
    out
}

/// F_j(x) = Σ_{p∋j} α_{p→j} Π_{l∈p\{j}} x_l for all j.
pub fn classical_rhs(sys: &OdeSystem, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != sys.n_vars {
        return Err(Error::LengthMismatch { expected: sys.n_vars, got: x.len() });
    }
    let mut f = vec![0.0; sys.n_vars];
    for ia in &sys.interactions {
        match ia.indices.len() {
            2 => {
                let (a, b) = (ia.indices[0], ia.indices[1]);
                f[a] += ia.alphas[0] * x[b];
                f[b] += ia.alphas[1] * x[a];
            }
            3 => {
                let (a, b, c) = (ia.indices[0], ia.indices[1], ia.indices[2]);
                f[a] += ia.alphas[0] * x[b] * x[c];
                f[b] += ia.alphas[1] * x[a] * x[c];
                f[c] += ia.alphas[2] * x[a] * x[b];
            }
            _ => {
                for (slot, &j) in ia.indices.iter().enumerate() {
                    let prod: f64 = ia
                        .indices
                        .iter()
                        .enumerate()
                        .filter(|&(s, _)| s != slot)
                        .map(|(_, &l)| x[l])
                        .product();
                    f[j] += ia.alphas[slot] * prod;
                }
            }
        }
    }
    Ok(f)
}

/// Analytic Jacobian J_{ij} = ∂F_i/∂x_j assembled from the interaction lists
/// (dense row-major, n_vars × n_vars).
pub fn jacobian(sys: &OdeSystem, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != sys.n_vars {
        return Err(Error::LengthMismatch { expected: sys.n_vars, got: x.len() });
    }
    let n = sys.n_vars;
    let mut jm = vec![0.0; n * n];
    for ia in &sys.interactions {
        for (si, &i) in ia.indices.iter().enumerate() {
            for (sj, &j) in ia.indices.iter().enumerate() {
                if si == sj {
                    continue; // F_i never contains x_i
                }
                let prod: f64 = ia
                    .indices
                    .iter()
                    .enumerate()
                    .filter(|&(s, _)| s != si && s != sj)
                    .map(|(_, &l)| x[l])
                    .product();
                jm[i * n + j] += ia.alphas[si] * prod;
            }
        }
    }
    Ok(jm)
}

/// Total field energy Σ ½ m_q (|ũ|²+|Ẽ|²+|B̃|²) ΔV = ½ m_q ‖x‖² ΔV.
pub fn energy(x: &[f64], grid: &GridSpec, m_q: f64) -> f64 {
    0.5 * m_q * x.iter().map(|v| v * v).sum::<f64>() * grid.cell_volume()
}

fn check_grid(grid: &GridSpec, dim: usize, params: &PhysicalParams) -> Result<()> {
    if grid.dim != dim {
        return Err(Error::Config(format!("expected a {dim}D grid, got {}D", grid.dim)));
    }
    if grid.shape.iter().any(|&n| n < 5) {
        return Err(Error::Config("grid needs at least 5 points per axis".into()));
    }
    if params.density.len() != grid.n_points() {
        return Err(Error::LengthMismatch { expected: grid.n_points(), got: params.density.len() });
    }
    Ok(())
}

/// Advection triples for every velocity component and axis:
/// {(−a, ũ_{i,j}), (0, ũ_{k,j+e_k}), (+a, ũ_{i,j+2e_k})},
/// a = 1/(4Δr_k √n_{j+e_k}).
fn push_advection(
    out: &mut Vec<Interaction>,
    lay: &Layout,
    params: &PhysicalParams,
    axes: u8,
) -> Result<()> {
    let grid = &lay.grid;
    for j in 0..grid.n_points() {
        for i in 1..=axes {
            for k in 0..grid.dim {
                let jf = grid.shift(j, k, 1);
                let jf2 = grid.shift(j, k, 2);
                let a = 1.0 / (4.0 * grid.spacing[k] * params.density[jf].sqrt());
                out.push(Interaction::new(vec![
                    (lay.var(Component::U(i), j), -a),
                    (lay.var(Component::U((k + 1) as u8), jf), 0.0),
                    (lay.var(Component::U(i), jf2), a),
                ])?);
            }
        }
    }
    Ok(())
}

/// Plasma-oscillation pairs {(ω̃_j, ũ_{i,j}), (−ω̃_j, Ẽ_{i,j})}.
fn push_plasma(out: &mut Vec<Interaction>, lay: &Layout, params: &PhysicalParams, axes: u8) -> Result<()> {
    for j in 0..lay.grid.n_points() {
        let w = params.omega_tilde(j);
        for i in 1..=axes {
            out.push(Interaction::new(vec![
                (lay.var(Component::U(i), j), w),
                (lay.var(Component::E(i), j), -w),
            ])?);
        }
    }
    Ok(())
}

/// Maxwell ± pair families linking Ẽ_{k1,j} with B̃_{k3,j±e_{k2}} for every
/// nonzero Levi-Civita triple whose components exist in the layout.
fn push_maxwell(out: &mut Vec<Interaction>, lay: &Layout, params: &PhysicalParams) -> Result<()> {
    let grid = &lay.grid;
    let comps = components_for_dim(grid.dim)?;
    let ct = params.c_tilde();
    for k1 in 1..=3u8 {
        for k2 in 1..=3u8 {
            for k3 in 1..=3u8 {
                let eps = levi_civita(k1, k2, k3)?;
                if eps == 0
                    || !comps.contains(&Component::E(k1))
                    || !comps.contains(&Component::B(k3))
                    || (k2 as usize) > grid.dim
                {
                    continue;
                }
                let axis = (k2 - 1) as usize;
                let b = ct / (2.0 * grid.spacing[axis]);
                let (ae, ab) = (b * eps as f64, b * levi_civita(k3, k2, k1)? as f64);
                for j in 0..grid.n_points() {
                    out.push(Interaction::new(vec![
                        (lay.var(Component::E(k1), j), ae),
                        (lay.var(Component::B(k3), grid.shift(j, axis, 1)), ab),
                    ])?);
                    out.push(Interaction::new(vec![
                        (lay.var(Component::E(k1), j), -ae),
                        (lay.var(Component::B(k3), grid.shift(j, axis, -1)), -ab),
                    ])?);
                }
            }
        }
    }
    Ok(())
}

/// 1D system: ũ1 and Ẽ1 on N_x points, N = 2N_x, incidence bound c = 4.
pub fn build_system_1d(grid: &GridSpec, params: &PhysicalParams) -> Result<OdeSystem> {
    check_grid(grid, 1, params)?;
    let lay = Layout { grid: grid.clone() };
    let mut interactions = Vec::new();
    push_advection(&mut interactions, &lay, params, 1)?;
    push_plasma(&mut interactions, &lay, params, 1)?;
    Ok(OdeSystem { n_vars: lay.n_vars(), interactions, c: 4, d: 3, layout: Some(lay) })
}

/// 2D system: (ũ1, ũ2, Ẽ1, Ẽ2, B̃3), N = 5·N_x·N_y, incidence bound c = 8.
pub fn build_system_2d(grid: &GridSpec, params: &PhysicalParams) -> Result<OdeSystem> {
    check_grid(grid, 2, params)?;
    let lay = Layout { grid: grid.clone() };
    let qt = params.q_tilde();
    let mut interactions = Vec::new();
    push_advection(&mut interactions, &lay, params, 2)?;
    push_plasma(&mut interactions, &lay, params, 2)?;
    for j in 0..grid.n_points() {
        interactions.push(Interaction::new(vec![
            (lay.var(Component::U(1), j), qt),
            (lay.var(Component::U(2), j), -qt),
            (lay.var(Component::B(3), j), 0.0),
        ])?);
    }
    push_maxwell(&mut interactions, &lay, params)?;
    Ok(OdeSystem { n_vars: lay.n_vars(), interactions, c: 8, d: 3, layout: Some(lay) })
}

/// 3D system: all nine components, N = 9·N_x·N_y·N_z, incidence bound c = 14.
pub fn build_system_3d(grid: &GridSpec, params: &PhysicalParams) -> Result<OdeSystem> {
    check_grid(grid, 3, params)?;
    let lay = Layout { grid: grid.clone() };
    let qt = params.q_tilde();
    let mut interactions = Vec::new();
    push_advection(&mut interactions, &lay, params, 3)?;
    push_plasma(&mut interactions, &lay, params, 3)?;
    for j in 0..grid.n_points() {
        // Lorentz triples per axis pair, zero coupling on the magnetic leg.
        interactions.push(Interaction::new(vec![
            (lay.var(Component::U(1), j), qt),
            (lay.var(Component::U(2), j), -qt),
            (lay.var(Component::B(3), j), 0.0),
        ])?);
        interactions.push(Interaction::new(vec![
            (lay.var(Component::U(1), j), -qt),
            (lay.var(Component::U(3), j), qt),
            (lay.var(Component::B(2), j), 0.0),
        ])?);
        interactions.push(Interaction::new(vec![
            (lay.var(Component::U(2), j), qt),
            (lay.var(Component::U(3), j), -qt),
            (lay.var(Component::B(1), j), 0.0),
        ])?);
    }
    push_maxwell(&mut interactions, &lay, params)?;
    Ok(OdeSystem { n_vars: lay.n_vars(), interactions, c: 14, d: 3, layout: Some(lay) })
}

/// One interaction per line, `index:coupling` pairs separated by spaces.
pub fn system_to_text(sys: &OdeSystem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# n_vars={} c={} d={}", sys.n_vars, sys.c, sys.d);
    for ia in &sys.interactions {
        let line: Vec<String> = ia
            .indices
            .iter()
            .zip(&ia.alphas)
            .map(|(j, a)| format!("{j}:{a:.17e}"))
            .collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

pub fn system_from_text(text: &str) -> Result<OdeSystem> {
    let mut n_vars = 0;
    let mut c = 0;
    let mut d = 0;
    let mut interactions = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let bad = |what: &str| Error::Config(format!("system text line {}: {what}", ln + 1));
        if let Some(hdr) = line.strip_prefix('#') {
            for tok in hdr.split_whitespace() {
                let (k, v) = tok.split_once('=').ok_or_else(|| bad("malformed header"))?;
                let v: usize = v.parse().map_err(|_| bad("malformed header value"))?;
                match k {
                    "n_vars" => n_vars = v,
                    "c" => c = v,
                    "d" => d = v,
                    _ => return Err(bad("unknown header key")),
                }
            }
            continue;
        }
        let mut pairs = Vec::new();
        for tok in line.split_whitespace() {
            let (j, a) = tok.split_once(':').ok_or_else(|| bad("expected index:coupling"))?;
            pairs.push((
                j.parse().map_err(|_| bad("bad index"))?,
                a.parse().map_err(|_| bad("bad coupling"))?,
            ));
        }
        interactions.push(Interaction::new(pairs)?);
    }
    if n_vars == 0 || d == 0 {
        return Err(Error::Config("system text missing header".into()));
    }
    Ok(OdeSystem { n_vars, interactions, c, d, layout: None })
}
