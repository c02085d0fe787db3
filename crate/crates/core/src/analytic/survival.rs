//! Probability that a single UAV lies beyond a given distance with a given LOS class.

use std::f64::consts::PI;

use crate::channel::{los_prob_access_unchecked, LinkClass};
use crate::error::Result;
use crate::geometry::{distance_pdf_unchecked, DeploymentGeometry};
use crate::numerics::{integrate, QuadratureSpec};

use super::NetworkParams;

/// Interpolation nodes per LOS class.
pub const CACHE_NODES: usize = 512;

/// Tail masses `T(lo) = ∫_{max(lo, h_u)}^{w_p} f_W(w) κ(w) dw` for both LOS classes.
#[derive(Debug, Clone)]
pub(crate) struct Survival {
    geometry: DeploymentGeometry,
    los: crate::channel::AccessLosParams,
    spec: QuadratureSpec,
    tables: Option<[Table; 2]>,
}

/// Piecewise cubic Hermite table of one tail mass on Chebyshev–Lobatto nodes.
///
/// With an off-center UE the distance law has square-root ends, so the table
/// interpolates in the angle `θ` of `w = c − h·cos θ`, which smooths them.
#[derive(Debug, Clone)]
struct Table {
    segments: Vec<Segment>,
}

#[derive(Debug, Clone)]
struct Segment {
    center: f64,
    half: f64,
    /// Upper end of the segment in `w`.
    upper: f64,
    values: Vec<f64>,
    nodes: Vec<f64>,
    /// dT/dθ at the nodes if `angular`, dT/dw otherwise.
    slopes: Vec<f64>,
    angular: bool,
}

impl Survival {
    pub fn new(p: &NetworkParams, cached: bool, spec: &QuadratureSpec) -> Result<Self> {
        let mut s = Survival {
            geometry: p.geometry,
            los: p.access_los,
            spec: *spec,
            tables: None,
        };
        if cached {
            s.tables = Some([s.build(LinkClass::Los)?, s.build(LinkClass::Nlos)?]);
        }
        Ok(s)
    }

    /// Joint density of distance and LOS class of one UAV.
    #[inline]
    pub fn density(&self, class: LinkClass, w: f64) -> f64 {
        let f = distance_pdf_unchecked(w, &self.geometry);
        if f == 0.0 {
            return 0.0;
        }
        let k = los_prob_access_unchecked(w, self.geometry.h_u, &self.los);
        match class {
            LinkClass::Los => f * k,
            LinkClass::Nlos => f * (1.0 - k),
        }
    }

    pub fn lower(&self) -> f64 {
        self.geometry.h_u
    }

    pub fn upper(&self) -> f64 {
        self.geometry.w_p()
    }

    /// Integrates `g` over `[a, b] ⊂ [h_u, w_p]`, splitting at the kink of the distance law.
    pub fn integrate_support<F: FnMut(f64) -> f64>(
        &self,
        mut g: F,
        a: f64,
        b: f64,
        spec: &QuadratureSpec,
    ) -> Result<f64> {
        let a = a.max(self.lower());
        let b = b.min(self.upper());
        if a >= b {
            return Ok(0.0);
        }
        let w_m = self.geometry.w_m();
        if a < w_m && w_m < b {
            Ok(integrate(&mut g, a, w_m, spec)? + integrate(&mut g, w_m, b, spec)?)
        } else {
            integrate(g, a, b, spec)
        }
    }

    fn exact(&self, class: LinkClass, lo: f64) -> Result<f64> {
        self.integrate_support(|w| self.density(class, w), lo, self.upper(), &self.spec)
    }

    fn build(&self, class: LinkClass) -> Result<Table> {
        let (a, b) = (self.lower(), self.upper());
        let w_m = self.geometry.w_m();
        // The density has a kink at w_m, so each side gets its own segment.
        let bounds: Vec<(f64, f64, usize)> = if a < w_m && w_m < b {
            vec![(a, w_m, CACHE_NODES / 2), (w_m, b, CACHE_NODES / 2)]
        } else {
            vec![(a, b, CACHE_NODES)]
        };
        let piece_spec = QuadratureSpec {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_subdivisions: 200,
        };
        let mut segments = Vec::with_capacity(bounds.len());
        // Build from the top so each segment starts from the mass above it.
        let angular = self.geometry.v_0 > 0.0;
        let mut above = 0.0;
        for &(lo, hi, n) in bounds.iter().rev() {
            let center = 0.5 * (lo + hi);
            let half = 0.5 * (hi - lo);
            let step = PI / (n - 1) as f64;
            let node = |j: usize| {
                if j == 0 {
                    lo
                } else if j == n - 1 {
                    hi
                } else {
                    center - half * (step * j as f64).cos()
                }
            };
            let mut values = vec![0.0; n];
            values[n - 1] = above;
            for j in (0..n - 1).rev() {
                let piece = self.integrate_support(|w| self.density(class, w), node(j), node(j + 1), &piece_spec)?;
                values[j] = values[j + 1] + piece;
            }
            let slopes = (0..n)
                .map(|j| {
                    let dw = if angular { half * (step * j as f64).sin() } else { 1.0 };
                    -self.density(class, node(j)) * dw
                })
                .collect();
            above = values[0];
            segments.push(Segment {
                center,
                half,
                upper: hi,
                values,
                nodes: (0..n).map(node).collect(),
                slopes,
                angular,
            });
        }
        segments.reverse();
        Ok(Table { segments })
    }

    /// `T_class(lo)`.
    pub fn tail(&self, class: LinkClass, lo: f64) -> Result<f64> {
        if lo >= self.upper() {
            return Ok(0.0);
        }
        let lo = lo.max(self.lower());
        match &self.tables {
            Some(t) => Ok(t[class as usize].eval(lo)),
            None => self.exact(class, lo),
        }
    }

    /// Probability that a UAV is not closer than `lo_l` if LOS, nor closer than `lo_n` if NLOS.
    pub fn stay(&self, lo_l: f64, lo_n: f64) -> Result<f64> {
        Ok(self.tail(LinkClass::Los, lo_l)? + self.tail(LinkClass::Nlos, lo_n)?)
    }
}

impl Table {
    fn eval(&self, x: f64) -> f64 {
        let seg = self
            .segments
            .iter()
            .find(|g| x <= g.upper)
            .unwrap_or_else(|| &self.segments[self.segments.len() - 1]);
        seg.eval(x)
    }
}

impl Segment {
    fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let step = PI / (n - 1) as f64;
        let theta = ((self.center - x) / self.half).clamp(-1.0, 1.0).acos();
        let mut j = ((theta / step) as usize).min(n - 2);
        // Rounding in acos can put x one node off.
        while j > 0 && self.nodes[j] > x {
            j -= 1;
        }
        while j < n - 2 && self.nodes[j + 1] < x {
            j += 1;
        }
        let (t, width) = if self.angular {
            ((theta - step * j as f64) / step, step)
        } else {
            let width = self.nodes[j + 1] - self.nodes[j];
            ((x - self.nodes[j]) / width, width)
        };
        let t = t.clamp(0.0, 1.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        (h00 * self.values[j]
            + h10 * width * self.slopes[j]
            + h01 * self.values[j + 1]
            + h11 * width * self.slopes[j + 1])
            .max(0.0)
    }
}
