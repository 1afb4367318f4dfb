//! The cyclic group `Z_k`, its rotation action on the plane and its characters.

use nalgebra::Complex;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::{Error, Result};

/// An element of `Z_k`, always stored reduced into `0..k`.
pub type Gain = u32;

pub type Rot = [[f64; 2]; 2];

pub fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// The residue `i` in the definition of the sets `S_i(k, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Residue {
    Zero,
    PlusOne,
    MinusOne,
}

impl Residue {
    pub const ALL: [Residue; 3] = [Residue::Zero, Residue::PlusOne, Residue::MinusOne];

    fn value(self) -> i64 {
        match self {
            Residue::Zero => 0,
            Residue::PlusOne => 1,
            Residue::MinusOne => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CyclicGroup {
    k: u32,
}

impl CyclicGroup {
    pub fn new(k: u32) -> Result<Self> {
        if k < 2 {
            return Err(Error::input(format!(
                "group order must be at least 2, got {k}"
            )));
        }
        Ok(CyclicGroup { k })
    }

    pub fn order(&self) -> u32 {
        self.k
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.k
    }

    pub fn reduce(&self, a: i64) -> Gain {
        a.rem_euclid(self.k as i64) as Gain
    }

    pub fn add(&self, a: Gain, b: Gain) -> Gain {
        ((a as u64 + b as u64) % self.k as u64) as Gain
    }

    pub fn neg(&self, a: Gain) -> Gain {
        (self.k - a % self.k) % self.k
    }

    pub fn sub(&self, a: Gain, b: Gain) -> Gain {
        self.add(a, self.neg(b))
    }

    /// Representative of `{a, -a}`; loops with these gains lift identically.
    pub fn unsigned(&self, a: Gain) -> Gain {
        a.min(self.neg(a))
    }

    pub fn element_order(&self, a: Gain) -> u32 {
        self.k / gcd(self.k, a)
    }

    /// Order of the subgroup generated by `gens`; the empty set generates the trivial group.
    pub fn subgroup_order<I: IntoIterator<Item = Gain>>(&self, gens: I) -> u32 {
        let g = gens.into_iter().fold(self.k, gcd);
        self.k / g
    }

    /// Whether `n` lies in `S_i(k, j)`.
    pub fn in_s(&self, i: Residue, n: u32, j: u32) -> bool {
        n >= 2
            && self.k.is_multiple_of(n)
            && (j as i64 - i.value()).rem_euclid(n as i64) == 0
            && !(j % 2 == 1 && n == 2)
    }

    pub fn s_set(&self, i: Residue, j: u32) -> Vec<u32> {
        (2..=self.k).filter(|&n| self.in_s(i, n, j)).collect()
    }

    /// Rotation by `2*pi*delta/k`, evaluated directly rather than by repeated products.
    pub fn rotation(&self, delta: Gain) -> Rot {
        let theta = TAU * (delta % self.k) as f64 / self.k as f64;
        let (s, c) = theta.sin_cos();
        [[c, -s], [s, c]]
    }

    /// `rho_j(delta) = exp(2*pi*i*j*delta/k)`.
    pub fn character(&self, j: u32, delta: Gain) -> Complex<f64> {
        let e = (j as u64 * delta as u64) % self.k as u64;
        Complex::from_polar(1.0, TAU * e as f64 / self.k as f64)
    }

    /// Dimension of the `rho_j`-symmetric motions of a point fixed at the origin.
    pub fn fixed_point_dimension(&self, j: u32) -> usize {
        let j = j % self.k;
        let plus = (j + self.k - 1).is_multiple_of(self.k);
        let minus = (j + 1).is_multiple_of(self.k);
        plus as usize + minus as usize
    }

    /// Dimension of trivial `rho_j`-symmetric motions of a framework whose points span the plane.
    pub fn trivial_dimension(&self, j: u32) -> usize {
        j.is_multiple_of(self.k) as usize + self.fixed_point_dimension(j)
    }
}

pub fn apply(r: &Rot, p: [f64; 2]) -> [f64; 2] {
    [
        r[0][0] * p[0] + r[0][1] * p[1],
        r[1][0] * p[0] + r[1][1] * p[1],
    ]
}
