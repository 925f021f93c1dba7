//! Splitting schemes as explicit sequences of frozen-flow factors.
//!
//! A [`Scheme`] stores its factors in chronological order: the first entry is
//! the first frozen map applied to the state. Every constructor in this module
//! produces the merged (normalized) form in which no two neighbouring factors
//! act on the same coordinate.
//!
//! Coordinates are 1-based throughout, so a two-operator scheme acts on
//! coordinates 1 and 2.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Merged coefficients with a magnitude below this are removed.
pub const MERGE_DROP_THRESHOLD: f64 = 1e-15;

/// Tolerance on the per-coordinate coefficient sums of a consistent scheme.
pub const CONSISTENCY_TOL: f64 = 1e-12;

/// Largest scheme [`named`] will expand to, in factors per step.
pub const MAX_EXPANDED_FACTORS: u64 = 5_000_000;

/// One frozen-flow application: coordinate `coord` advanced by `coeff * h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub coord: usize,
    pub coeff: Complex64,
}

impl Factor {
    pub fn new(coord: usize, coeff: Complex64) -> Self {
        Self { coord, coeff }
    }

    pub fn real(coord: usize, coeff: f64) -> Self {
        Self::new(coord, Complex64::new(coeff, 0.0))
    }
}

/// An ordered product of frozen flows with a nominal algebraic order.
#[derive(Debug, Clone, PartialEq)]
pub struct Scheme {
    dim: usize,
    factors: Vec<Factor>,
    declared_order: u32,
    label: String,
}

impl Scheme {
    /// Builds a scheme from a raw chronological factor list.
    ///
    /// Only the structural invariants are checked here (coordinates in
    /// `1..=dim`, finite coefficients, `declared_order >= 1`). The list is not
    /// merged; use [`Scheme::merged`] or [`Scheme::validate`] for that.
    pub fn new(
        dim: usize,
        factors: Vec<Factor>,
        declared_order: u32,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if declared_order == 0 {
            return Err(Error::InvalidScheme(
                "declared order must be at least 1".into(),
            ));
        }
        for (idx, f) in factors.iter().enumerate() {
            if f.coord == 0 || f.coord > dim {
                return Err(Error::InvalidScheme(format!(
                    "factor {idx} has coordinate {} outside 1..={dim}",
                    f.coord
                )));
            }
            if !f.coeff.re.is_finite() || !f.coeff.im.is_finite() {
                return Err(Error::InvalidScheme(format!(
                    "factor {idx} has a non-finite coefficient"
                )));
            }
        }
        Ok(Self {
            dim,
            factors,
            declared_order,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn declared_order(&self) -> u32 {
        self.declared_order
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// True if any coefficient has a nonzero imaginary part.
    pub fn has_complex_coefficients(&self) -> bool {
        self.factors.iter().any(|f| f.coeff.im != 0.0)
    }

    /// Number of factors acting on each coordinate, indexed `0..dim`.
    pub fn multiplicities(&self) -> Vec<usize> {
        let mut counts = vec![0; self.dim];
        for f in &self.factors {
            counts[f.coord - 1] += 1;
        }
        counts
    }

    /// Sum of the coefficients acting on each coordinate, indexed `0..dim`.
    /// Uses compensated summation, since expanded schemes run to millions of
    /// factors.
    pub fn coefficient_sums(&self) -> Vec<Complex64> {
        let mut re = vec![Neumaier::default(); self.dim];
        let mut im = vec![Neumaier::default(); self.dim];
        for f in &self.factors {
            re[f.coord - 1].add(f.coeff.re);
            im[f.coord - 1].add(f.coeff.im);
        }
        re.iter()
            .zip(&im)
            .map(|(r, i)| Complex64::new(r.value(), i.value()))
            .collect()
    }

    /// No neighbouring factors share a coordinate.
    pub fn is_normalized(&self) -> bool {
        self.factors.windows(2).all(|w| w[0].coord != w[1].coord)
    }

    /// Checks the full set of scheme invariants: merged form and first-order
    /// consistency (every coordinate's coefficients sum to one).
    pub fn validate(&self) -> Result<()> {
        if !self.is_normalized() {
            return Err(Error::InvalidScheme(
                "adjacent factors act on the same coordinate".into(),
            ));
        }
        for (i, s) in self.coefficient_sums().iter().enumerate() {
            if (s - Complex64::new(1.0, 0.0)).norm() > CONSISTENCY_TOL {
                return Err(Error::InvalidScheme(format!(
                    "coefficients of coordinate {} sum to {s}, expected 1",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Combines neighbouring same-coordinate factors by adding coefficients.
    ///
    /// Factors whose combined coefficient is smaller than
    /// [`MERGE_DROP_THRESHOLD`] vanish, which may in turn bring two more
    /// same-coordinate factors together; those are merged as well.
    pub fn merged(&self) -> Scheme {
        Scheme {
            dim: self.dim,
            factors: merge_factors(self.factors.iter().copied()),
            declared_order: self.declared_order,
            label: self.label.clone(),
        }
    }

    /// The same scheme with every coefficient multiplied by `scale`.
    pub fn scaled(&self, scale: Complex64) -> Scheme {
        Scheme {
            dim: self.dim,
            factors: self
                .factors
                .iter()
                .map(|f| Factor::new(f.coord, f.coeff * scale))
                .collect(),
            declared_order: self.declared_order,
            label: self.label.clone(),
        }
    }

    fn is_two_operator(&self) -> bool {
        self.dim == 2 && self.is_normalized() && self.factors.iter().all(|f| f.coord <= 2)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

fn merge_factors(input: impl IntoIterator<Item = Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::new();
    for f in input {
        match out.last_mut() {
            Some(last) if last.coord == f.coord => {
                last.coeff += f.coeff;
                if last.coeff.norm() < MERGE_DROP_THRESHOLD {
                    out.pop();
                }
            }
            _ => {
                if f.coeff.norm() >= MERGE_DROP_THRESHOLD {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Free-function form of [`Scheme::merged`].
pub fn merge_adjacent(s: &Scheme) -> Scheme {
    s.merged()
}

/// Free-function form of [`Scheme::coefficient_sums`].
pub fn coefficient_sums(s: &Scheme) -> Vec<Complex64> {
    s.coefficient_sums()
}

/// First-order product of all coordinate flows with full steps.
///
/// In two dimensions coordinate 1 is applied first; from three dimensions on
/// the coordinates run from `N` down to 1.
pub fn lie_trotter(n: usize) -> Result<Scheme> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let factors = if n <= 2 {
        (1..=n).map(|c| Factor::real(c, 1.0)).collect()
    } else {
        (1..=n).rev().map(|c| Factor::real(c, 1.0)).collect()
    };
    Scheme::new(n, factors, 1, "lie-trotter")
}

/// Symmetric second-order product: half steps around one full step.
///
/// In two dimensions coordinate 1 carries the half steps. From three
/// dimensions on coordinate `N` is outermost and coordinate 1 takes the full
/// central step, e.g. `z/2, y/2, x, y/2, z/2` for `N = 3`.
pub fn strang(n: usize) -> Result<Scheme> {
    if n == 0 {
        return Err(Error::InvalidDimension(n));
    }
    let (outer, center): (Vec<usize>, usize) = match n {
        1 => (Vec::new(), 1),
        2 => (vec![1], 2),
        _ => ((2..=n).rev().collect(), 1),
    };
    let mut factors: Vec<Factor> = outer.iter().map(|&c| Factor::real(c, 0.5)).collect();
    factors.push(Factor::real(center, 1.0));
    factors.extend(outer.iter().rev().map(|&c| Factor::real(c, 0.5)));
    Scheme::new(n, factors, 2, "strang")
}

/// The two-operator Strang base `K2/2, K1, K2/2` shared by the recursive
/// families.
fn strang_base() -> Scheme {
    let factors = vec![
        Factor::real(2, 0.5),
        Factor::real(1, 1.0),
        Factor::real(2, 0.5),
    ];
    Scheme::new(2, factors, 2, "strang-base").expect("static scheme")
}

/// Chronological concatenation of `base(c_1 t), base(c_2 t), ...`, merged.
fn compose(base: &Scheme, scales: &[Complex64], order: u32, label: String) -> Scheme {
    let raw = scales.iter().flat_map(|&c| {
        base.factors
            .iter()
            .map(move |f| Factor::new(f.coord, f.coeff * c))
    });
    Scheme {
        dim: base.dim,
        factors: merge_factors(raw),
        declared_order: order,
        label,
    }
}

fn check_depth(family: &'static str, k: usize, max: usize) -> Result<()> {
    if k > max {
        Err(Error::UnsupportedOrder { family, k, max })
    } else {
        Ok(())
    }
}

/// Coefficient of the `U` recursion at level `k`.
pub fn u_coefficient(k: usize) -> Complex64 {
    let theta = PI / (k as f64 + 2.0);
    Complex64::new(0.5, theta.sin() / (2.0 + 2.0 * theta.cos()))
}

/// Coefficient of the `W` recursion at level `k`.
///
/// With `m = 2k + 1`, `a = e^{i pi/m} / (2^{1/m} + 2 e^{i pi/m})` solves the
/// triple-jump conditions `2a + b = 1` and `2a^m + b^m = 0` for `b = 1 - 2a`.
pub fn w_coefficient(k: usize) -> Complex64 {
    let m = 2.0 * k as f64 + 1.0;
    let e = Complex64::from_polar(1.0, PI / m);
    e / (Complex64::new(2f64.powf(1.0 / m), 0.0) + 2.0 * e)
}

/// Coefficient of the `Z` recursion at level `k`.
pub fn z_coefficient(k: usize) -> Complex64 {
    let theta = PI / (2.0 * k as f64 + 1.0);
    Complex64::new(0.25, theta.sin() / (4.0 + 4.0 * theta.cos()))
}

/// Conjugate-pair recursion `U[k](t) = U[k-1](conj(a_k) t) U[k-1](a_k t)`.
///
/// Order `k + 2` with `2^(k+1) + 1` merged factors, `0 <= k <= 4`.
pub fn u_family(k: usize) -> Result<Scheme> {
    check_depth("U", k, 4)?;
    let mut s = strang_base();
    for j in 1..=k {
        let a = u_coefficient(j);
        s = compose(&s, &[a.conj(), a], j as u32 + 2, String::new());
    }
    Ok(s.with_label(format!("U{k}")))
}

/// Triple-jump recursion `W[k](t) = W[k-1](a_k t) W[k-1]((1-2a_k) t) W[k-1](a_k t)`.
///
/// Order `2k + 2` with `2 * 3^k + 1` merged factors, `0 <= k <= 3`.
pub fn w_family(k: usize) -> Result<Scheme> {
    check_depth("W", k, 3)?;
    let mut s = strang_base();
    for j in 1..=k {
        let a = w_coefficient(j);
        let mid = Complex64::new(1.0, 0.0) - 2.0 * a;
        s = compose(&s, &[a, mid, a], 2 * j as u32 + 2, String::new());
    }
    Ok(s.with_label(format!("W{k}")))
}

/// Four-fold recursion `Z[k](t) = Z[k-1](a t) Z[k-1](conj(a) t) Z[k-1](conj(a) t) Z[k-1](a t)`.
///
/// Order `2k + 2` with `2 * 4^k + 1` merged factors, `0 <= k <= 6`.
pub fn z_family(k: usize) -> Result<Scheme> {
    check_depth("Z", k, 6)?;
    let mut s = strang_base();
    for j in 1..=k {
        let a = z_coefficient(j);
        s = compose(
            &s,
            &[a, a.conj(), a.conj(), a],
            2 * j as u32 + 2,
            String::new(),
        );
    }
    Ok(s.with_label(format!("Z{k}")))
}

/// Replaces every factor `(old, c)` of `s` by the two-operator `base` scaled
/// by `c`, with base coordinate 1 mapped to `old` and base coordinate 2 mapped
/// to `new`. The result acts on `s.dim() + 1` coordinates.
pub fn substitute_coordinate(s: &Scheme, base: &Scheme, old: usize, new: usize) -> Result<Scheme> {
    if !base.is_two_operator() {
        return Err(Error::InvalidScheme(
            "substitution base must be a merged two-operator scheme".into(),
        ));
    }
    if new != s.dim + 1 {
        return Err(Error::InvalidArgument(format!(
            "new coordinate must be {} (got {new})",
            s.dim + 1
        )));
    }
    if !s.factors.iter().any(|f| f.coord == old) {
        return Err(Error::CoordinateNotPresent { coord: old });
    }
    let raw = s.factors.iter().flat_map(|f| {
        let replaced: Vec<Factor> = if f.coord == old {
            base.factors
                .iter()
                .map(|b| {
                    let coord = if b.coord == 1 { old } else { new };
                    Factor::new(coord, b.coeff * f.coeff)
                })
                .collect()
        } else {
            vec![*f]
        };
        replaced
    });
    Ok(Scheme {
        dim: s.dim + 1,
        factors: merge_factors(raw),
        declared_order: s.declared_order,
        label: s.label.clone(),
    })
}

/// Extends a two-operator scheme to `n` coordinates by repeated coordinate
/// substitution, always substituting into the least frequent coordinate
/// (lowest index on ties).
///
/// The base must have an odd factor count `q` with coordinate 1 occurring
/// `(q - 1) / 2` times. The declared order of the result is the base's
/// nominal order; it is not established for `n >= 3`.
pub fn expand_to_dimension(base: &Scheme, n: usize) -> Result<Scheme> {
    if !base.is_two_operator() {
        return Err(Error::InvalidScheme(
            "expansion base must be a merged two-operator scheme".into(),
        ));
    }
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let q = base.len();
    if q.is_multiple_of(2) {
        return Err(Error::InvalidScheme(format!(
            "expansion needs an odd base factor count (got {q})"
        )));
    }
    if base.multiplicities()[0] != (q - 1) / 2 {
        return Err(Error::InvalidScheme(
            "coordinate 1 must be the less frequent operator of the base".into(),
        ));
    }
    let mut s = base.clone();
    for m in 3..=n {
        let counts = s.multiplicities();
        let (old_idx, _) = counts
            .iter()
            .enumerate()
            .min_by_key(|&(i, &c)| (c, i))
            .expect("dim >= 2");
        s = substitute_coordinate(&s, base, old_idx + 1, m)?;
    }
    Ok(s)
}

/// Merged factor count of the recursive coordinate substitution for a
/// two-operator base with `q` factors, extended to `n` coordinates.
pub fn count_factors(n: usize, q: usize) -> Result<u64> {
    if n < 2 || q < 3 || q.is_multiple_of(2) {
        return Err(Error::InvalidCount { n, q });
    }
    let a = (q as u64 - 1) / 2;
    let b = (q as u64).div_ceil(2);
    let mut counts = vec![a, b];
    for _ in 3..=n {
        counts.sort_unstable();
        let r = counts.remove(0);
        let overflow = || Error::CountOverflow { n, q };
        counts.push(a.checked_mul(r).ok_or_else(overflow)?);
        counts.push(b.checked_mul(r).ok_or_else(overflow)?);
    }
    counts
        .iter()
        .try_fold(0u64, |acc, &c| acc.checked_add(c))
        .ok_or(Error::CountOverflow { n, q })
}

/// Named schemes understood by [`named`].
pub const SCHEME_NAMES: &[&str] = &[
    "lie-trotter",
    "strang",
    "3rd",
    "4th",
    "6th",
    "8th",
    "10th",
    "12th",
    "14th",
];

/// The two-operator base behind a named higher-order scheme.
pub fn named_base(name: &str) -> Result<Scheme> {
    let s = match name {
        "3rd" => u_family(1)?,
        "4th" => w_family(1)?,
        "6th" => w_family(2)?,
        "8th" => w_family(3)?,
        "10th" => z_family(4)?,
        "12th" => z_family(5)?,
        "14th" => z_family(6)?,
        _ => return Err(Error::UnknownName(name.to_string())),
    };
    Ok(s.with_label(name))
}

/// Resolves a scheme name for a system of dimension `dim`.
///
/// Higher-order names are two-operator bases; for `dim >= 3` they are
/// expanded by coordinate substitution.
pub fn named(name: &str, dim: usize) -> Result<Scheme> {
    match name {
        "lie-trotter" | "lt" => return lie_trotter(dim),
        "strang" => return strang(dim),
        _ => {}
    }
    let base = named_base(name)?;
    match dim {
        0 => Err(Error::InvalidDimension(0)),
        1 => Err(Error::InvalidArgument(format!(
            "scheme `{name}` needs at least two coordinates"
        ))),
        2 => Ok(base),
        _ => {
            let expected = count_factors(dim, base.len())?;
            if expected > MAX_EXPANDED_FACTORS {
                return Err(Error::InvalidArgument(format!(
                    "scheme `{name}` in dimension {dim} needs {expected} factors per step"
                )));
            }
            expand_to_dimension(&base, dim)
        }
    }
}

/// One row of the factor-count table.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRow {
    pub name: &'static str,
    pub order: u32,
    /// Counts for `N = 2, 3, ...`.
    pub counts: Vec<u64>,
}

/// Base factor counts `q` of the higher-order table rows.
pub const TABLE_BASES: &[(&str, u32, usize)] = &[
    ("3rd", 3, 5),
    ("4th", 4, 7),
    ("6th", 6, 17),
    ("8th", 8, 55),
    ("10th", 10, 513),
    ("12th", 12, 2049),
    ("14th", 14, 8193),
];

/// Factor counts per step for `N = 2..=max_n` for Lie-Trotter, Strang and
/// every entry of [`TABLE_BASES`].
pub fn factor_count_table(max_n: usize) -> Vec<CountRow> {
    let ns = 2..=max_n.max(2);
    let mut rows = vec![
        CountRow {
            name: "lie-trotter",
            order: 1,
            counts: ns.clone().map(|n| n as u64).collect(),
        },
        CountRow {
            name: "strang",
            order: 2,
            counts: ns.clone().map(|n| 2 * n as u64 - 1).collect(),
        },
    ];
    for &(name, order, q) in TABLE_BASES {
        rows.push(CountRow {
            name,
            order,
            counts: ns
                .clone()
                .map(|n| count_factors(n, q).expect("table bases are odd"))
                .collect(),
        });
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coords(s: &Scheme) -> Vec<usize> {
        s.factors().iter().map(|f| f.coord).collect()
    }

    fn assert_coeffs(s: &Scheme, expected: &[Complex64], tol: f64) {
        assert_eq!(s.len(), expected.len());
        for (f, e) in s.factors().iter().zip(expected) {
            assert!((f.coeff - e).norm() <= tol, "{} vs {}", f.coeff, e);
        }
    }

    #[test]
    fn lie_trotter_orderings() {
        assert_eq!(coords(&lie_trotter(1).unwrap()), [1]);
        assert_eq!(coords(&lie_trotter(2).unwrap()), [1, 2]);
        assert_eq!(coords(&lie_trotter(3).unwrap()), [3, 2, 1]);
        assert!(lie_trotter(3)
            .unwrap()
            .factors()
            .iter()
            .all(|f| f.coeff == c(1.0, 0.0)));
        assert_eq!(lie_trotter(0), Err(Error::InvalidDimension(0)));
    }

    #[test]
    fn strang_orderings() {
        let s2 = strang(2).unwrap();
        assert_eq!(coords(&s2), [1, 2, 1]);
        assert_coeffs(&s2, &[c(0.5, 0.0), c(1.0, 0.0), c(0.5, 0.0)], 0.0);
        let s3 = strang(3).unwrap();
        assert_eq!(coords(&s3), [3, 2, 1, 2, 3]);
        assert_coeffs(
            &s3,
            &[
                c(0.5, 0.0),
                c(0.5, 0.0),
                c(1.0, 0.0),
                c(0.5, 0.0),
                c(0.5, 0.0),
            ],
            0.0,
        );
        assert_eq!(coords(&strang(4).unwrap()), [4, 3, 2, 1, 2, 3, 4]);
        assert_eq!(coords(&strang(1).unwrap()), [1]);
        assert!(strang(0).is_err());
        assert_eq!(strang(3).unwrap().declared_order(), 2);
    }

    #[test]
    fn u1_matches_display() {
        let a = c(0.5, 3f64.sqrt() / 6.0);
        let s = u_family(1).unwrap();
        assert_eq!(coords(&s), [2, 1, 2, 1, 2]);
        assert_coeffs(
            &s,
            &[a.conj() / 2.0, a.conj(), c(0.5, 0.0), a, a / 2.0],
            1e-15,
        );
        assert_eq!(s.declared_order(), 3);
    }

    #[test]
    fn w1_matches_display() {
        let e = Complex64::from_polar(1.0, PI / 3.0);
        let a = e / (c(2f64.cbrt(), 0.0) + 2.0 * e);
        // triple-jump order conditions
        let b = c(1.0, 0.0) - 2.0 * a;
        assert!((2.0 * a.powi(3) + b.powi(3)).norm() < 1e-15);
        let one = c(1.0, 0.0);
        let s = w_family(1).unwrap();
        assert_eq!(coords(&s), [2, 1, 2, 1, 2, 1, 2]);
        assert_coeffs(
            &s,
            &[
                a / 2.0,
                a,
                (one - a) / 2.0,
                one - 2.0 * a,
                (one - a) / 2.0,
                a,
                a / 2.0,
            ],
            1e-15,
        );
        assert_eq!(s.declared_order(), 4);
    }

    #[test]
    fn z1_prefix_matches_display() {
        let a = c(0.25, 3f64.sqrt() / 12.0);
        let s = z_family(1).unwrap();
        assert_eq!(s.len(), 9);
        let head = &s.factors()[..4];
        let expected = [(2, a / 2.0), (1, a), (2, c(0.25, 0.0)), (1, a.conj())];
        for (f, (cd, cf)) in head.iter().zip(expected) {
            assert_eq!(f.coord, cd);
            assert!((f.coeff - cf).norm() < 1e-15);
        }
    }

    #[test]
    fn family_counts() {
        for k in 0..=4 {
            assert_eq!(u_family(k).unwrap().len(), (1 << (k + 1)) + 1);
        }
        for k in 0..=3 {
            assert_eq!(w_family(k).unwrap().len(), 2 * 3usize.pow(k as u32) + 1);
        }
        for k in 0..=6 {
            assert_eq!(z_family(k).unwrap().len(), 2 * 4usize.pow(k as u32) + 1);
        }
        assert_eq!(u_family(2).unwrap().len(), 9);
        assert_eq!(w_family(3).unwrap().len(), 55);
        assert_eq!(z_family(4).unwrap().len(), 513);
    }

    #[test]
    fn family_depth_limits() {
        assert!(matches!(
            u_family(5),
            Err(Error::UnsupportedOrder { max: 4, .. })
        ));
        assert!(matches!(
            w_family(4),
            Err(Error::UnsupportedOrder { max: 3, .. })
        ));
        assert!(matches!(
            z_family(7),
            Err(Error::UnsupportedOrder { max: 6, .. })
        ));
        for s in [u_family(0), w_family(0), z_family(0)] {
            assert_eq!(s.unwrap().factors(), strang_base().factors());
        }
    }

    #[test]
    fn merge_examples() {
        let s = Scheme::new(
            2,
            vec![
                Factor::real(1, 0.5),
                Factor::real(1, 0.5),
                Factor::real(2, 1.0),
            ],
            1,
            "raw",
        )
        .unwrap();
        let m = s.merged();
        assert_eq!(m.factors(), &[Factor::real(1, 1.0), Factor::real(2, 1.0)]);

        let single = Scheme::new(1, vec![Factor::real(1, 1.0)], 1, "one").unwrap();
        assert_eq!(single.merged(), single);

        // cancellation removes a factor and exposes another merge
        let s = Scheme::new(
            2,
            vec![
                Factor::real(1, 0.25),
                Factor::real(2, 1.0),
                Factor::real(2, -1.0),
                Factor::real(1, 0.75),
                Factor::real(2, 1.0),
            ],
            1,
            "raw",
        )
        .unwrap();
        assert_eq!(
            s.merged().factors(),
            &[Factor::real(1, 1.0), Factor::real(2, 1.0)]
        );
    }

    #[test]
    fn unmerged_u1_merges_to_five() {
        let a = u_coefficient(1);
        let base = strang_base();
        let mut raw = base.scaled(a.conj()).factors().to_vec();
        raw.extend_from_slice(base.scaled(a).factors());
        let s = Scheme::new(2, raw, 3, "raw").unwrap();
        assert_eq!(s.len(), 6);
        let m = s.merged();
        assert_eq!(m.len(), 5);
        assert_eq!(m.factors(), u_family(1).unwrap().factors());
    }

    #[test]
    fn substitution_examples() {
        let one = Scheme::new(1, vec![Factor::real(1, 1.0)], 1, "x").unwrap();
        let s = substitute_coordinate(&one, &u_family(0).unwrap(), 1, 2).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.factors(), strang_base().factors());

        let u1 = u_family(1).unwrap();
        assert_eq!(
            substitute_coordinate(&u1, &u1, 3, 3),
            Err(Error::CoordinateNotPresent { coord: 3 })
        );
        assert!(substitute_coordinate(&u1, &strang(3).unwrap(), 1, 3).is_err());
        assert!(substitute_coordinate(&u1, &u1, 1, 4).is_err());
    }

    #[test]
    fn golden_thirteen_factor_sequence() {
        let a = c(0.5, 3f64.sqrt() / 6.0);
        let ab = a.conj();
        let aa = a * ab;
        let expected = [
            (2, ab / 2.0),
            (3, ab * ab / 2.0),
            (1, ab * ab),
            (3, ab / 2.0),
            (1, aa),
            (3, aa / 2.0),
            (2, c(0.5, 0.0)),
            (3, aa / 2.0),
            (1, aa),
            (3, a / 2.0),
            (1, a * a),
            (3, a * a / 2.0),
            (2, a / 2.0),
        ];
        let u1 = u_family(1).unwrap();
        let direct = substitute_coordinate(&u1, &u1, 1, 3).unwrap();
        let expanded = expand_to_dimension(&u1, 3).unwrap();
        assert_eq!(direct, expanded);
        assert_eq!(expanded.len(), 13);
        for (f, (cd, cf)) in expanded.factors().iter().zip(expected) {
            assert_eq!(f.coord, cd);
            assert!((f.coeff - cf).norm() <= 1e-15);
        }
        for s in expanded.coefficient_sums() {
            assert!((s - 1.0).norm() < 1e-12);
        }
    }

    #[test]
    fn expansion_counts() {
        assert_eq!(
            expand_to_dimension(&u_family(1).unwrap(), 3).unwrap().len(),
            13
        );
        assert_eq!(
            expand_to_dimension(&w_family(1).unwrap(), 4).unwrap().len(),
            49
        );
        let u1 = u_family(1).unwrap();
        assert_eq!(expand_to_dimension(&u1, 2).unwrap(), u1);
        // even base
        let even =
            Scheme::new(2, vec![Factor::real(1, 1.0), Factor::real(2, 1.0)], 1, "lt").unwrap();
        assert!(expand_to_dimension(&even, 3).is_err());
        // coordinate 1 is the frequent operator here
        assert!(expand_to_dimension(&strang(2).unwrap(), 3).is_err());
    }

    #[test]
    fn count_examples() {
        assert_eq!(count_factors(2, 5).unwrap(), 5);
        assert_eq!(count_factors(5, 5).unwrap(), 41);
        assert_eq!(count_factors(3, 17).unwrap(), 145);
        assert_eq!(count_factors(6, 7).unwrap(), 175);
        assert!(count_factors(3, 4).is_err());
        assert!(count_factors(1, 5).is_err());
        let five: Vec<u64> = (2..=6).map(|n| count_factors(n, 5).unwrap()).collect();
        assert_eq!(five, [5, 13, 25, 41, 65]);
        let seven: Vec<u64> = (2..=6).map(|n| count_factors(n, 7).unwrap()).collect();
        assert_eq!(seven, [7, 25, 49, 103, 175]);
        assert_eq!(
            count_factors(60, 8193),
            Err(Error::CountOverflow { n: 60, q: 8193 })
        );
    }

    #[test]
    fn coefficient_sum_examples() {
        for s in [
            strang(3).unwrap(),
            u_family(1).unwrap(),
            expand_to_dimension(&u_family(1).unwrap(), 3).unwrap(),
        ] {
            for v in s.coefficient_sums() {
                assert!((v - 1.0).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn named_registry() {
        let expect = [
            ("3rd", 5),
            ("4th", 7),
            ("6th", 19),
            ("8th", 55),
            ("10th", 513),
            ("12th", 2049),
            ("14th", 8193),
        ];
        for (name, q) in expect {
            let s = named(name, 2).unwrap();
            assert_eq!(s.len(), q, "{name}");
            assert_eq!(s.label(), name);
        }
        assert_eq!(named("3rd", 3).unwrap().len(), 13);
        assert_eq!(named("strang", 3).unwrap().len(), 5);
        assert!(matches!(named("7th", 2), Err(Error::UnknownName(_))));
        assert!(named("3rd", 1).is_err());
        assert!(named("14th", 3).is_err());
    }

    #[test]
    fn count_table_shape() {
        let rows = factor_count_table(8);
        assert_eq!(rows.len(), 9);
        assert_eq!(rows[0].counts, [2, 3, 4, 5, 6, 7, 8]);
        assert_eq!(rows[1].counts, [3, 5, 7, 9, 11, 13, 15]);
    }
}
