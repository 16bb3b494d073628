use crate::problem::{NonlinearProblem, OdeProblem};
use crate::scalar::Scalar;

/// Time at which the localized source switches on.
pub const SOURCE_ONSET: f64 = 1.1;

const SOURCE_CENTER: (f64, f64) = (0.3, 0.6);
const SOURCE_RADIUS: f64 = 0.1;
const SOURCE_STRENGTH: f64 = 5.0;

/// 2D Brusselator on the periodic unit square, `K × K` grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrusselatorConfig {
    pub k: usize,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub source_active: bool,
}

impl BrusselatorConfig {
    pub fn new(k: usize) -> Self {
        BrusselatorConfig {
            k,
            a: 3.4,
            b: 1.0,
            alpha: 10.0,
            source_active: true,
        }
    }

    pub fn without_source(mut self) -> Self {
        self.source_active = false;
        self
    }

    /// Number of unknowns, `2K²`.
    pub fn dim(&self) -> usize {
        2 * self.k * self.k
    }

    fn validate(&self) {
        assert!(self.k >= 3, "Brusselator grid needs K >= 3, got {}", self.k);
        assert!(
            self.a > 0.0 && self.b > 0.0 && self.alpha > 0.0,
            "Brusselator parameters must be positive"
        );
    }
}

/// The localized forcing: 5 inside the disk of radius 0.1 around (0.3, 0.6)
/// once `t >= 1.1`, zero otherwise.
pub fn source_term(x: f64, y: f64, t: f64) -> f64 {
    let (cx, cy) = SOURCE_CENTER;
    let inside = (x - cx).powi(2) + (y - cy).powi(2) <= SOURCE_RADIUS.powi(2);
    if t >= SOURCE_ONSET && inside {
        SOURCE_STRENGTH
    } else {
        0.0
    }
}

/// Shared spatial discretization. Nodes are `i/K`, spacing `1/K`, indices
/// wrap around. State layout: `u[ix*K + iy]` for all nodes, then `v` likewise.
#[derive(Debug, Clone)]
struct Grid {
    cfg: BrusselatorConfig,
    inv_h2: f64,
}

impl Grid {
    fn new(cfg: BrusselatorConfig) -> Self {
        cfg.validate();
        let k = cfg.k as f64;
        Grid { cfg, inv_h2: k * k }
    }

    fn node(&self, i: usize) -> f64 {
        i as f64 / self.cfg.k as f64
    }

    fn initial_state(&self) -> Vec<f64> {
        let k = self.cfg.k;
        let mut y = vec![0.0; 2 * k * k];
        let (u, v) = y.split_at_mut(k * k);
        for ix in 0..k {
            let x = self.node(ix);
            for iy in 0..k {
                let yy = self.node(iy);
                u[ix * k + iy] = 22.0 * (yy * (1.0 - yy)).powf(1.5);
                v[ix * k + iy] = 27.0 * (x * (1.0 - x)).powf(1.5);
            }
        }
        y
    }

    /// Writes `du/dt, dv/dt` with the source evaluated at time `t`
    /// (`None` disables it).
    fn eval<S: Scalar>(&self, t: Option<f64>, state: &[S], out: &mut [S]) {
        let k = self.cfg.k;
        let kk = k * k;
        let BrusselatorConfig { a, b, alpha, .. } = self.cfg;
        let (u, v) = state.split_at(kk);
        let (du, dv) = out.split_at_mut(kk);
        let scale = alpha * self.inv_h2;
        for ix in 0..k {
            let ixp = (ix + 1) % k;
            let ixm = (ix + k - 1) % k;
            for iy in 0..k {
                let iyp = (iy + 1) % k;
                let iym = (iy + k - 1) % k;
                let c = ix * k + iy;
                let nb = [ixp * k + iy, ixm * k + iy, ix * k + iyp, ix * k + iym];
                let lap_u = laplacian(u, c, &nb) * scale;
                let lap_v = laplacian(v, c, &nb) * scale;
                let uuv = u[c].clone() * u[c].clone() * v[c].clone();
                let mut fu = (uuv.clone() + b) - u[c].clone() * (a + 1.0) + lap_u;
                if let Some(t) = t {
                    let s = source_term(self.node(ix), self.node(iy), t);
                    if s != 0.0 {
                        fu = fu + s;
                    }
                }
                du[c] = fu;
                dv[c] = u[c].clone() * a - uuv + lap_v;
            }
        }
    }
}

/// Sum of differences to the four neighbours, so a constant field gives
/// exactly zero.
fn laplacian<S: Scalar>(w: &[S], c: usize, nb: &[usize; 4]) -> S {
    let wc = &w[c];
    let [e, west, n, s] = *nb;
    (w[e].clone() - wc.clone())
        + (w[west].clone() - wc.clone())
        + (w[n].clone() - wc.clone())
        + (w[s].clone() - wc.clone())
}

/// Steady-state system `u_t = v_t = 0` with the source in its switched-on
/// state (when `source_active`).
#[derive(Debug, Clone)]
pub struct BrusselatorSteady {
    grid: Grid,
}

impl BrusselatorSteady {
    pub fn config(&self) -> BrusselatorConfig {
        self.grid.cfg
    }
}

/// Panics if `K < 3` or a parameter is not positive.
pub fn brusselator_steady(cfg: BrusselatorConfig) -> BrusselatorSteady {
    BrusselatorSteady { grid: Grid::new(cfg) }
}

impl NonlinearProblem for BrusselatorSteady {
    fn dim(&self) -> usize {
        self.grid.cfg.dim()
    }

    fn initial_guess(&self) -> Vec<f64> {
        self.grid.initial_state()
    }

    fn residual<S: Scalar>(&self, x: &[S], out: &mut [S]) {
        let t = self.grid.cfg.source_active.then_some(f64::INFINITY);
        self.grid.eval(t, x, out);
    }
}

/// Method-of-lines semi-discretization on `[0, 11.5]`.
#[derive(Debug, Clone)]
pub struct BrusselatorOde {
    grid: Grid,
    t_end: f64,
}

impl BrusselatorOde {
    pub fn config(&self) -> BrusselatorConfig {
        self.grid.cfg
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }
}

/// Panics if `K < 3` or a parameter is not positive.
pub fn brusselator_rhs(cfg: BrusselatorConfig) -> BrusselatorOde {
    BrusselatorOde {
        grid: Grid::new(cfg),
        t_end: 11.5,
    }
}

impl OdeProblem for BrusselatorOde {
    fn dim(&self) -> usize {
        self.grid.cfg.dim()
    }

    fn t0(&self) -> f64 {
        0.0
    }

    fn t_end(&self) -> f64 {
        self.t_end
    }

    fn y0(&self) -> Vec<f64> {
        self.grid.initial_state()
    }

    fn rhs<S: Scalar>(&self, t: f64, y: &[S], out: &mut [S]) {
        let t = self.grid.cfg.source_active.then_some(t);
        self.grid.eval(t, y, out);
    }
}
