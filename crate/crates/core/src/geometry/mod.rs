//! Deployment geometry: point-process samplers, the UAV distance law and exclusion regions.

mod exclusion;

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub(crate) use exclusion::exclusion_unchecked;
pub use exclusion::{exclusion_region, ExclusionKind};

/// Spatial layout of the terrestrial and aerial tiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentGeometry {
    /// BS density in BS/m².
    pub lambda_g: f64,
    pub h_g: f64,
    /// Fraction of BSs able to backhaul UAVs.
    pub delta_b: f64,
    pub n_u: usize,
    pub h_u: f64,
    /// Radius of the disk the UAVs hover over.
    pub r_u: f64,
    /// Horizontal offset of the UE from the disk center.
    pub v_0: f64,
    /// Radius of the disk on which the simulator drops BSs.
    pub sim_radius: f64,
}

impl Default for DeploymentGeometry {
    fn default() -> Self {
        Self {
            lambda_g: 1e-5,
            h_g: 25.0,
            delta_b: 1.0,
            n_u: 10,
            h_u: 100.0,
            r_u: 1000.0,
            v_0: 0.0,
            sim_radius: 5000.0,
        }
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(field, format!("must be positive and finite, got {v}")))
    }
}

impl DeploymentGeometry {
    pub fn validate(&self) -> Result<()> {
        positive("lambda_g", self.lambda_g)?;
        positive("h_g", self.h_g)?;
        positive("h_u", self.h_u)?;
        positive("r_u", self.r_u)?;
        if !(0.0..=1.0).contains(&self.delta_b) {
            return Err(Error::invalid("delta_b", format!("must lie in [0, 1], got {}", self.delta_b)));
        }
        if !(0.0..=self.r_u).contains(&self.v_0) {
            return Err(Error::invalid("v_0", format!("must lie in [0, r_u], got {}", self.v_0)));
        }
        if !(self.sim_radius >= 3.0 * self.r_u) || !self.sim_radius.is_finite() {
            return Err(Error::invalid(
                "sim_radius",
                format!("must be at least 3·r_u = {}, got {}", 3.0 * self.r_u, self.sim_radius),
            ));
        }
        Ok(())
    }

    /// Density of backhaul-enabled BSs.
    pub fn lambda_b(&self) -> f64 {
        self.delta_b * self.lambda_g
    }

    /// Vertical separation between the BS and UAV tiers.
    pub fn delta_h(&self) -> f64 {
        (self.h_u - self.h_g).abs()
    }

    /// Distance from the UE to the nearest point of the disk rim.
    pub fn w_m(&self) -> f64 {
        let d = self.r_u - self.v_0;
        (d * d + self.h_u * self.h_u).sqrt()
    }

    /// Distance from the UE to the farthest point of the disk rim.
    pub fn w_p(&self) -> f64 {
        let d = self.r_u + self.v_0;
        (d * d + self.h_u * self.h_u).sqrt()
    }

    /// Position of the reference UE.
    pub fn ue(&self) -> Point3 {
        Point3::new(self.v_0, 0.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn horizontal_distance(&self, other: &Point3) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        (dx * dx + dy * dy).sqrt()
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// Node positions of one network drop.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PointDrop {
    pub bs_positions: Vec<Point3>,
    pub bs_backhaul_flag: Vec<bool>,
    pub uav_positions: Vec<Point3>,
}

fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> (f64, f64) {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = 2.0 * PI * rng.random::<f64>();
    (r * phi.cos(), r * phi.sin())
}

/// BS tier on the simulation disk; only the BS fields of the drop are filled.
pub fn sample_bs_ppp<R: Rng + ?Sized>(geom: &DeploymentGeometry, rng: &mut R) -> PointDrop {
    let mean = geom.lambda_g * PI * geom.sim_radius * geom.sim_radius;
    let count = Poisson::new(mean).map_or(0, |d| d.sample(rng) as usize);
    let mut drop = PointDrop {
        bs_positions: Vec::with_capacity(count),
        bs_backhaul_flag: Vec::with_capacity(count),
        uav_positions: Vec::new(),
    };
    for _ in 0..count {
        let (x, y) = uniform_in_disk(geom.sim_radius, rng);
        drop.bs_positions.push(Point3::new(x, y, geom.h_g));
        let flag = geom.delta_b >= 1.0 || rng.random::<f64>() < geom.delta_b;
        drop.bs_backhaul_flag.push(flag);
    }
    drop
}

/// Exactly `n_u` UAVs uniform on the hovering disk.
pub fn sample_uav_bpp<R: Rng + ?Sized>(geom: &DeploymentGeometry, rng: &mut R) -> Vec<Point3> {
    (0..geom.n_u)
        .map(|_| {
            let (x, y) = uniform_in_disk(geom.r_u, rng);
            Point3::new(x, y, geom.h_u)
        })
        .collect()
}

/// Density of the distance from the UE to a uniformly placed UAV.
pub fn distance_pdf_fw(w: f64, geom: &DeploymentGeometry) -> Result<f64> {
    if w < 0.0 {
        return Err(Error::domain(format!("negative distance {w}")));
    }
    Ok(distance_pdf_unchecked(w, geom))
}

#[inline]
pub(crate) fn distance_pdf_unchecked(w: f64, geom: &DeploymentGeometry) -> f64 {
    let r_u2 = geom.r_u * geom.r_u;
    let (w_m, w_p) = (geom.w_m(), geom.w_p());
    if w < geom.h_u || w > w_p {
        0.0
    } else if w <= w_m {
        2.0 * w / r_u2
    } else {
        // Rim-clipped annulus: only part of the circle of this radius lies in the disk.
        let rho2 = w * w - geom.h_u * geom.h_u;
        let arg = (rho2 + geom.v_0 * geom.v_0 - r_u2) / (2.0 * geom.v_0 * rho2.sqrt());
        2.0 * w / (PI * r_u2) * arg.clamp(-1.0, 1.0).acos()
    }
}
