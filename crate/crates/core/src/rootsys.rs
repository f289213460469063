//! Root systems, their Weyl groups, and the weight function `w_k`.
//!
//! Normalizations (fixed per family):
//!
//! * `Z2^n`: positive roots `e_1..e_n`, each its own orbit (`n` multiplicities).
//! * `B2`: simple roots `e1-e2` (long) and `e2` (short); positive roots
//!   `e1-e2, e2, e1, e1+e2`; multiplicities are given as `(long, short)`.
//! * `I2(m)`: unit roots at angles `πj/m`, `j = 0..m-1`; simple roots at angles
//!   `0` and `π - π/m`. One orbit for odd `m`, two (even `j`, odd `j`) for even `m`.
//! * `A2` is `I2(3)` in the plane.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DunklError, Result};
use crate::linalg::{self, dot, from_columns, mat_vec};

/// Tolerance for identifying two group elements by their matrices.
pub const GROUP_TOL: f64 = 1e-10;
/// Default cap on the closure size in [`ReflectionGroup::generate`].
pub const DEFAULT_GROUP_CAP: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Z2n { n: usize },
    A2,
    B2,
    I2m { m: usize },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Z2n { .. } => "z2n",
            Family::A2 => "a2",
            Family::B2 => "b2",
            Family::I2m { .. } => "i2m",
        }
    }

    /// Builds a family from its name and the size parameter (`n` for `z2n`,
    /// `m` for `i2m`, ignored otherwise).
    pub fn from_name(name: &str, param: Option<usize>) -> Result<Self> {
        let fam: Family = name.parse()?;
        Ok(match fam {
            Family::Z2n { .. } => Family::Z2n {
                n: param.ok_or_else(|| {
                    DunklError::InvalidFamilyParameter("z2n needs --n".into())
                })?,
            },
            Family::I2m { .. } => Family::I2m {
                m: param.ok_or_else(|| {
                    DunklError::InvalidFamilyParameter("i2m needs --m".into())
                })?,
            },
            other => other,
        })
    }

    pub fn orbit_count(&self) -> usize {
        match *self {
            Family::Z2n { n } => n,
            Family::A2 => 1,
            Family::B2 => 2,
            Family::I2m { m } => {
                if m % 2 == 0 {
                    2
                } else {
                    1
                }
            }
        }
    }

    pub fn param(&self) -> Option<usize> {
        match *self {
            Family::Z2n { n } => Some(n),
            Family::I2m { m } => Some(m),
            _ => None,
        }
    }
}

impl FromStr for Family {
    type Err = DunklError;

    /// Parses the bare family name; size parameters default to placeholders
    /// and must be filled in by [`Family::from_name`].
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z2n" | "z2^n" | "z2" => Ok(Family::Z2n { n: 0 }),
            "a2" => Ok(Family::A2),
            "b2" => Ok(Family::B2),
            "i2m" | "i2(m)" => Ok(Family::I2m { m: 0 }),
            other => Err(DunklError::UnknownFamily(other.to_string())),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Family::Z2n { n } => write!(f, "Z2^{n}"),
            Family::A2 => write!(f, "A2"),
            Family::B2 => write!(f, "B2"),
            Family::I2m { m } => write!(f, "I2({m})"),
        }
    }
}

/// A reduced root system together with a multiplicity function.
#[derive(Debug, Clone, Serialize)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub positive_roots: Vec<Vec<f64>>,
    /// Indices into `positive_roots`.
    pub simple: Vec<usize>,
    /// Orbit class of each positive root.
    pub orbit_of: Vec<usize>,
    pub orbit_names: Vec<String>,
    /// One multiplicity per orbit class.
    pub multiplicities: Vec<f64>,
}

impl RootSystem {
    pub fn build(family: Family, multiplicities: &[f64]) -> Result<Self> {
        let (rank, positive_roots, simple, orbit_of, orbit_names) = match family {
            Family::Z2n { n } => {
                if !(1..=4).contains(&n) {
                    return Err(DunklError::InvalidFamilyParameter(format!(
                        "z2n needs 1 <= n <= 4, got {n}"
                    )));
                }
                let roots = (0..n)
                    .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                    .collect();
                (
                    n,
                    roots,
                    (0..n).collect(),
                    (0..n).collect(),
                    (1..=n).map(|i| format!("e{i}")).collect(),
                )
            }
            Family::B2 => (
                2,
                vec![
                    vec![1.0, -1.0],
                    vec![0.0, 1.0],
                    vec![1.0, 0.0],
                    vec![1.0, 1.0],
                ],
                vec![0, 1],
                vec![0, 1, 1, 0],
                vec!["long".to_string(), "short".to_string()],
            ),
            Family::A2 => dihedral(3),
            Family::I2m { m } => {
                if m < 2 {
                    return Err(DunklError::InvalidFamilyParameter(format!(
                        "i2m needs m >= 2, got {m}"
                    )));
                }
                dihedral(m)
            }
        };
        let expected = orbit_names.len();
        if multiplicities.len() != expected {
            return Err(DunklError::MultiplicityCount {
                family: family.to_string(),
                expected,
                got: multiplicities.len(),
            });
        }
        for (name, &k) in orbit_names.iter().zip(multiplicities) {
            if !(k.is_finite() && k >= 0.0) {
                return Err(DunklError::NegativeMultiplicity {
                    orbit: name.clone(),
                    value: k,
                });
            }
        }
        Ok(RootSystem {
            family,
            rank,
            positive_roots,
            simple,
            orbit_of,
            orbit_names,
            multiplicities: multiplicities.to_vec(),
        })
    }

    /// Multiplicity of the `r`-th positive root.
    pub fn k(&self, r: usize) -> f64 {
        self.multiplicities[self.orbit_of[r]]
    }

    /// `γ_k = Σ_{α∈R⁺} k(α)`.
    pub fn gamma_k(&self) -> f64 {
        (0..self.positive_roots.len()).map(|r| self.k(r)).sum()
    }

    pub fn simple_roots(&self) -> Vec<Vec<f64>> {
        self.simple
            .iter()
            .map(|&i| self.positive_roots[i].clone())
            .collect()
    }

    /// Fundamental coweights `λ_i` with `⟨λ_i, α_j⟩ = δ_ij`.
    pub fn dual_basis(&self) -> Result<Vec<Vec<f64>>> {
        // Rows of A are the simple roots; columns of A^{-1} are the λ_i.
        let a = from_columns(&self.simple_roots()).transpose();
        let inv = linalg::checked_inverse(&a, 1e-12)?;
        Ok((0..self.rank)
            .map(|i| inv.column(i).iter().copied().collect())
            .collect())
    }

    /// `ρ = Σ λ_i`, an interior point of the fundamental chamber.
    pub fn chamber_center(&self) -> Result<Vec<f64>> {
        let lam = self.dual_basis()?;
        Ok((0..self.rank)
            .map(|c| lam.iter().map(|l| l[c]).sum())
            .collect())
    }

    /// `w_k(x) = Π_{υ∈R⁺} |⟨υ,x⟩|^{2k(υ)}`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.positive_roots
            .iter()
            .enumerate()
            .map(|(r, a)| dot(a, x).abs().powf(2.0 * self.k(r)))
            .product()
    }

    /// `ln w_k(x)`; `-inf` on a hyperplane with positive multiplicity.
    pub fn log_weight(&self, x: &[f64]) -> f64 {
        self.positive_roots
            .iter()
            .enumerate()
            .map(|(r, a)| {
                let k = self.k(r);
                if k == 0.0 {
                    0.0
                } else {
                    2.0 * k * dot(a, x).abs().ln()
                }
            })
            .sum()
    }

    /// `+1` for `β ∈ R⁺`, `-1` for `β ∈ R⁻`, read off the signs of the
    /// coefficients of `β` in the simple roots.
    pub fn sign_of_root(&self, beta: &[f64]) -> Result<i8> {
        linalg::check_dim(self.rank, beta.len())?;
        let is_root = self.positive_roots.iter().any(|a| {
            linalg::max_abs_diff(a, beta) <= GROUP_TOL
                || a.iter().zip(beta).all(|(p, q)| (p + q).abs() <= GROUP_TOL)
        });
        if !is_root {
            return Err(DunklError::NotARoot(beta.to_vec()));
        }
        let basis = from_columns(&self.simple_roots());
        let inv = linalg::checked_inverse(&basis, 1e-12)?;
        let coeffs = mat_vec(&inv, beta);
        if coeffs.iter().all(|&c| c >= -GROUP_TOL) {
            Ok(1)
        } else if coeffs.iter().all(|&c| c <= GROUP_TOL) {
            Ok(-1)
        } else {
            Err(DunklError::NotARoot(beta.to_vec()))
        }
    }
}

type Layout = (usize, Vec<Vec<f64>>, Vec<usize>, Vec<usize>, Vec<String>);

fn dihedral(m: usize) -> Layout {
    let roots = (0..m)
        .map(|j| {
            let th = PI * j as f64 / m as f64;
            vec![th.cos(), th.sin()]
        })
        .collect();
    let (orbit_of, names) = if m % 2 == 0 {
        (
            (0..m).map(|j| j % 2).collect(),
            vec!["even".to_string(), "odd".to_string()],
        )
    } else {
        (vec![0; m], vec!["all".to_string()])
    };
    (2, roots, vec![0, m - 1], orbit_of, names)
}

/// Orthogonal reflection matrix `σ_α = I - 2 αα^T / ⟨α,α⟩`.
pub fn reflection(alpha: &[f64]) -> Result<GroupElement> {
    let nn = dot(alpha, alpha);
    if nn == 0.0 || !nn.is_finite() {
        return Err(DunklError::ZeroVector);
    }
    let n = alpha.len();
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - 2.0 * alpha[i] * alpha[j] / nn
    });
    Ok(GroupElement {
        matrix,
        word: Vec::new(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub matrix: DMatrix<f64>,
    /// Simple-reflection indices; the matrix is `s_{w0} s_{w1} ...`.
    pub word: Vec<usize>,
}

impl GroupElement {
    pub fn identity(n: usize) -> Self {
        GroupElement {
            matrix: DMatrix::identity(n, n),
            word: Vec::new(),
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        mat_vec(&self.matrix, v)
    }

    pub fn apply_c(&self, v: &[Complex64]) -> Vec<Complex64> {
        linalg::mat_vec_c(&self.matrix, v)
    }

    pub fn approx_eq(&self, other: &DMatrix<f64>) -> bool {
        (&self.matrix - other).amax() <= GROUP_TOL
    }
}

/// The finite group generated by the simple reflections, with index tables
/// for left multiplication by the reflections in the positive roots.
#[derive(Debug, Clone)]
pub struct ReflectionGroup {
    pub elements: Vec<GroupElement>,
    /// `left_reflect[r][g]` is the index of `σ_{α_r} g`.
    pub left_reflect: Vec<Vec<usize>>,
    /// `inverse[g]` is the index of `g^{-1}`.
    pub inverse: Vec<usize>,
}

impl ReflectionGroup {
    pub fn generate(rs: &RootSystem) -> Result<Self> {
        Self::generate_with_cap(rs, DEFAULT_GROUP_CAP)
    }

    /// Breadth-first closure of the simple reflections under left multiplication.
    pub fn generate_with_cap(rs: &RootSystem, cap: usize) -> Result<Self> {
        let gens = rs
            .simple_roots()
            .iter()
            .map(|a| reflection(a))
            .collect::<Result<Vec<_>>>()?;
        let mut elements = vec![GroupElement::identity(rs.rank)];
        let mut head = 0;
        while head < elements.len() {
            for (i, s) in gens.iter().enumerate() {
                let m = &s.matrix * &elements[head].matrix;
                if !elements.iter().any(|e| e.approx_eq(&m)) {
                    if elements.len() == cap {
                        return Err(DunklError::GroupTooLarge { cap });
                    }
                    let mut word = vec![i];
                    word.extend_from_slice(&elements[head].word);
                    elements.push(GroupElement { matrix: m, word });
                }
            }
            head += 1;
        }
        let mut group = ReflectionGroup {
            elements,
            left_reflect: Vec::new(),
            inverse: Vec::new(),
        };
        let mut left_reflect = Vec::with_capacity(rs.positive_roots.len());
        for a in &rs.positive_roots {
            let s = reflection(a)?;
            let row = group
                .elements
                .iter()
                .map(|g| group.index_of(&(&s.matrix * &g.matrix)))
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| {
                    DunklError::InvalidArgument("positive root reflection not in group".into())
                })?;
            left_reflect.push(row);
        }
        let inverse = group
            .elements
            .iter()
            .map(|g| group.index_of(&g.matrix.transpose()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| DunklError::InvalidArgument("group not closed under inverse".into()))?;
        group.left_reflect = left_reflect;
        group.inverse = inverse;
        Ok(group)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &DMatrix<f64>) -> Option<usize> {
        self.elements.iter().position(|e| e.approx_eq(m))
    }

    /// Index of the product `g h`.
    pub fn compose(&self, g: usize, h: usize) -> usize {
        let m = &self.elements[g].matrix * &self.elements[h].matrix;
        self.index_of(&m).expect("group is closed under composition")
    }

    /// Group element mapping `x` into the closed fundamental chamber, and the image.
    pub fn to_chamber(&self, rs: &RootSystem, x: &[f64]) -> Result<(usize, Vec<f64>)> {
        linalg::check_dim(rs.rank, x.len())?;
        let rho = rs.chamber_center()?;
        let mut best = (0, f64::NEG_INFINITY);
        for (i, g) in self.elements.iter().enumerate() {
            let v = dot(&g.apply(x), &rho);
            if v > best.1 + 1e-14 * (1.0 + v.abs()) {
                best = (i, v);
            }
        }
        Ok((best.0, self.elements[best.0].apply(x)))
    }

    /// `x⁺`: the intersection of the orbit `G·x` with the closed chamber.
    pub fn orbit_rep_plus(&self, rs: &RootSystem, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.to_chamber(rs, x)?.1)
    }
}
