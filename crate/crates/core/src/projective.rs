//! Points of products of projective spaces and block-diagonal polynomial self-maps.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{log_abs_int, AlgNum, Rat, LOG_EVAL_ERROR};
use crate::error::{DynError, Result};
use crate::heights::HeightValue;
use crate::linalg::{self, IntMatrix};
use crate::poly::{default_var_names, HomPoly};

/// `P^{n_1} x ... x P^{n_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ambient {
    factors: Vec<usize>,
}

impl Ambient {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(DynError::InvalidInput(format!(
                "ambient needs at least one factor, each of dimension >= 1 (got {:?})",
                factors
            )));
        }
        Ok(Ambient { factors })
    }

    pub fn projective(n: usize) -> Self {
        Ambient::new(vec![n]).expect("dimension >= 1")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn is_single(&self) -> bool {
        self.factors.len() == 1
    }

    pub fn is_p1(&self) -> bool {
        self.factors == [1]
    }
}

impl fmt::Display for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|n| format!("P{}", n)).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// A point in canonical form: in every block the leftmost nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    blocks: Vec<Vec<AlgNum>>,
    field: Option<i64>,
}

impl ProjPoint {
    pub fn new(blocks: Vec<Vec<AlgNum>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(DynError::InvalidPoint("no coordinate blocks".into()));
        }
        let mut out = Vec::with_capacity(blocks.len());
        for block in blocks {
            if block.len() < 2 {
                return Err(DynError::InvalidPoint(
                    "each block needs at least two coordinates".into(),
                ));
            }
            let Some(lead) = block.iter().find(|c| !c.is_zero()) else {
                return Err(DynError::InvalidPoint("all-zero coordinate block".into()));
            };
            let inv = lead.inv()?;
            let normalized = block
                .iter()
                .map(|c| c.try_mul(&inv))
                .collect::<Result<Vec<_>>>()?;
            out.push(normalized);
        }
        let mut field = None;
        for c in out.iter().flatten() {
            if let Some(d) = c.field() {
                match field {
                    None => field = Some(d),
                    Some(e) if e != d => return Err(DynError::FieldMismatch { left: e, right: d }),
                    _ => {}
                }
            }
        }
        Ok(ProjPoint { blocks: out, field })
    }

    pub fn single(coords: Vec<AlgNum>) -> Result<Self> {
        ProjPoint::new(vec![coords])
    }

    pub fn from_ints(coords: &[i64]) -> Result<Self> {
        ProjPoint::single(coords.iter().map(|&c| AlgNum::from(c)).collect())
    }

    /// The point `(alpha : 1)` of P^1.
    pub fn affine(alpha: AlgNum) -> Self {
        ProjPoint::single(vec![alpha, AlgNum::one()]).expect("second coordinate is 1")
    }

    pub fn infinity() -> Self {
        ProjPoint::from_ints(&[1, 0]).unwrap()
    }

    pub fn blocks(&self) -> &[Vec<AlgNum>] {
        &self.blocks
    }

    pub fn block_point(&self, i: usize) -> ProjPoint {
        ProjPoint::single(self.blocks[i].clone()).expect("block of a canonical point")
    }

    pub fn product(parts: &[ProjPoint]) -> Result<Self> {
        ProjPoint::new(
            parts
                .iter()
                .flat_map(|p| p.blocks.iter().cloned())
                .collect(),
        )
    }

    pub fn ambient(&self) -> Ambient {
        Ambient::new(self.blocks.iter().map(|b| b.len() - 1).collect()).unwrap()
    }

    /// Squarefree `D` when some coordinate is irrational.
    pub fn field(&self) -> Option<i64> {
        self.field
    }

    pub fn is_rational(&self) -> bool {
        self.field.is_none()
    }

    /// For a point of P^1, the affine coordinate `x/y`, or `None` at infinity.
    pub fn affine_coordinate(&self) -> Option<AlgNum> {
        let b = &self.blocks[0];
        if b[1].is_zero() {
            None
        } else {
            Some(b[0].try_div(&b[1]).expect("same field"))
        }
    }

    pub fn bits(&self) -> u64 {
        self.blocks
            .iter()
            .flatten()
            .map(|c| c.bits())
            .max()
            .unwrap_or(0)
    }

    /// Coprime integer representative of a rational block.
    pub fn primitive_ints(block: &[AlgNum]) -> Option<Vec<BigInt>> {
        let rats: Vec<&Rat> = block.iter().map(|c| c.as_rat()).collect::<Option<_>>()?;
        let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints: Vec<BigInt> = rats
            .iter()
            .map(|r| (*r * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        Some(ints.into_iter().map(|v| v / &g).collect())
    }

    pub fn galois_conjugate(&self) -> ProjPoint {
        if self.is_rational() {
            return self.clone();
        }
        ProjPoint::new(
            self.blocks
                .iter()
                .map(|b| b.iter().map(|c| c.conjugate()).collect())
                .collect(),
        )
        .expect("conjugation preserves canonical form")
    }

    /// Text form accepted by the point parser: `1:2;1:5`. Rational blocks are written as
    /// coprime integers with the last nonzero coordinate positive.
    pub fn notation(&self) -> String {
        self.blocks
            .iter()
            .map(|b| match ProjPoint::primitive_ints(b) {
                Some(mut ints) => {
                    if ints
                        .iter()
                        .rev()
                        .find(|v| !v.is_zero())
                        .is_some_and(|v| v.is_negative())
                    {
                        ints.iter_mut().for_each(|v| *v = -&*v);
                    }
                    ints.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(":")
                }
                None => b
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(":"),
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                format!(
                    "({})",
                    b.iter()
                        .map(|c| c.to_string())
                        .collect::<Vec<_>>()
                        .join(" : ")
                )
            })
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

pub fn point_canonicalize(blocks: Vec<Vec<AlgNum>>) -> Result<ProjPoint> {
    ProjPoint::new(blocks)
}

/// Height of one block.
pub fn block_height(block: &[AlgNum]) -> Result<HeightValue> {
    if let Some(ints) = ProjPoint::primitive_ints(block) {
        let m = ints.iter().map(|v| v.abs()).max().unwrap();
        return Ok(HeightValue::new(log_abs_int(&m), LOG_EVAL_ERROR));
    }
    if block.len() != 2 {
        return Err(DynError::UnsupportedField(format!(
            "heights of quadratic points are only available on P1 factors (block has {} coordinates)",
            block.len()
        )));
    }
    if block[1].is_zero() {
        return Ok(HeightValue::exact(0.0));
    }
    Ok(block[0].try_div(&block[1])?.abs_height())
}

/// Weil height: the sum of the factor heights.
pub fn point_height(p: &ProjPoint) -> Result<HeightValue> {
    p.blocks
        .iter()
        .map(|b| block_height(b))
        .try_fold(HeightValue::exact(0.0), |acc, h| Ok(acc.add(&h?)))
}

/// Alternative ample height on products: the largest factor height.
pub fn point_height_max(p: &ProjPoint) -> Result<HeightValue> {
    let mut best = HeightValue::exact(0.0);
    for b in &p.blocks {
        let h = block_height(b)?;
        if h.value > best.value {
            best = h;
        }
    }
    Ok(best)
}

/// Block-diagonal self-map of a product of projective spaces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyEndo {
    ambient: Ambient,
    blocks: Vec<Vec<HomPoly>>,
    degrees: Vec<u32>,
    declared_polarization: Option<u32>,
    ns_matrix: Option<IntMatrix>,
}

impl PolyEndo {
    pub fn new(blocks: Vec<Vec<HomPoly>>) -> Result<Self> {
        let mut dims = Vec::with_capacity(blocks.len());
        let mut degrees = Vec::with_capacity(blocks.len());
        for (i, block) in blocks.iter().enumerate() {
            let n = block.len();
            if n < 2 {
                return Err(DynError::InvalidInput(format!(
                    "block {} needs at least two polynomials",
                    i + 1
                )));
            }
            let mut deg = None;
            for (j, p) in block.iter().enumerate() {
                if p.nvars() != n {
                    return Err(DynError::InvalidInput(format!(
                        "block {} polynomial {} uses {} variables, expected {}",
                        i + 1,
                        j + 1,
                        p.nvars(),
                        n
                    )));
                }
                if p.is_zero() {
                    continue;
                }
                let Some(d) = p.homogeneous_degree() else {
                    return Err(DynError::InvalidInput(format!(
                        "block {} polynomial {} is not homogeneous",
                        i + 1,
                        j + 1
                    )));
                };
                match deg {
                    None => deg = Some(d),
                    Some(e) if e != d => {
                        return Err(DynError::InvalidInput(format!(
                            "block {} mixes degrees {} and {}",
                            i + 1,
                            e,
                            d
                        )))
                    }
                    _ => {}
                }
            }
            let d = deg.ok_or_else(|| {
                DynError::InvalidInput(format!("block {} is identically zero", i + 1))
            })?;
            if d == 0 {
                return Err(DynError::InvalidInput(format!(
                    "block {} is constant (degree 0)",
                    i + 1
                )));
            }
            dims.push(n - 1);
            degrees.push(d);
        }
        Ok(PolyEndo {
            ambient: Ambient::new(dims)?,
            blocks,
            degrees,
            declared_polarization: None,
            ns_matrix: None,
        })
    }

    pub fn single(polys: Vec<HomPoly>) -> Result<Self> {
        PolyEndo::new(vec![polys])
    }

    pub fn product(factors: &[PolyEndo]) -> Result<Self> {
        PolyEndo::new(
            factors
                .iter()
                .flat_map(|f| f.blocks.iter().cloned())
                .collect(),
        )
    }

    /// `x -> p(x)` on P^1 for a rational univariate polynomial (ascending coefficients),
    /// homogenized and cleared to integer coefficients.
    pub fn from_affine_poly(coeffs: &[Rat]) -> Result<Self> {
        let mut coeffs = coeffs.to_vec();
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        let r = coeffs.len() as u32 - 1;
        if r == 0 {
            return Err(DynError::InvalidInput("constant affine map".into()));
        }
        let lcm = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scale = Rat::from_integer(lcm.clone());
        let num = HomPoly::from_terms(
            2,
            coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| (vec![k as u32, r - k as u32], (c * &scale).to_integer())),
        );
        let den = HomPoly::monomial(vec![0, r], lcm);
        PolyEndo::single(vec![num, den])
    }

    pub fn with_polarization(mut self, q: u32) -> Result<Self> {
        if q < 2 {
            return Err(DynError::InvalidInput(format!(
                "polarization degree must exceed 1, got {}",
                q
            )));
        }
        if self.ambient.is_single() && self.degrees[0] != q {
            return Err(DynError::InvalidInput(format!(
                "declared polarization {} differs from the map degree {}",
                q, self.degrees[0]
            )));
        }
        self.declared_polarization = Some(q);
        Ok(self)
    }

    pub fn with_ns_matrix(mut self, m: IntMatrix) -> Result<Self> {
        let n = m.len();
        if n == 0 || m.iter().any(|row| row.len() != n) {
            return Err(DynError::InvalidInput(
                "NS matrix must be square and nonempty".into(),
            ));
        }
        self.ns_matrix = Some(m);
        Ok(self)
    }

    /// Marks a single-factor map of degree >= 2 as polarized by the hyperplane class.
    pub fn polarized(self) -> Result<Self> {
        if !self.ambient.is_single() {
            return Err(DynError::Unsupported(
                "products of projective spaces are polarized only when all factor degrees agree"
                    .into(),
            ));
        }
        let d = self.degrees[0];
        self.with_polarization(d)
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn blocks(&self) -> &[Vec<HomPoly>] {
        &self.blocks
    }

    pub fn block_degrees(&self) -> &[u32] {
        &self.degrees
    }

    /// Degree of a single-factor map.
    pub fn degree(&self) -> u32 {
        self.degrees[0]
    }

    pub fn declared_polarization(&self) -> Option<u32> {
        self.declared_polarization
    }

    pub fn ns_matrix(&self) -> Option<&IntMatrix> {
        self.ns_matrix.as_ref()
    }

    /// Polarization degree if declared, or the degree of a single-factor map of degree >= 2.
    pub fn polarization_degree(&self) -> Option<u32> {
        self.declared_polarization.or_else(|| {
            (self.ambient.is_single() && self.degrees[0] >= 2).then_some(self.degrees[0])
        })
    }

    pub fn factor(&self, i: usize) -> PolyEndo {
        PolyEndo::single(self.blocks[i].clone()).expect("factor of a valid map")
    }

    /// Largest number of monomials in one coordinate polynomial.
    pub fn max_monomials(&self) -> usize {
        self.blocks
            .iter()
            .flatten()
            .map(|p| p.num_terms())
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.blocks
            .iter()
            .flatten()
            .map(|p| p.max_abs_coeff())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PolyEndo) -> Result<PolyEndo> {
        if self.ambient != other.ambient {
            return Err(DynError::InvalidInput(
                "cannot compose maps on different ambients".into(),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(outer, inner)| outer.iter().map(|p| p.compose(inner)).collect())
            .collect();
        let mut out = PolyEndo::new(blocks)?;
        if let (Some(a), Some(b)) = (self.declared_polarization, other.declared_polarization) {
            out.declared_polarization = Some(a * b);
        }
        if let (Some(a), Some(b)) = (&self.ns_matrix, &other.ns_matrix) {
            // pullback reverses order: (f∘g)^* = g^* f^*
            out.ns_matrix = Some(linalg::mat_mul(b, a));
        }
        Ok(out)
    }

    /// `f^n` for `n >= 1`.
    pub fn iterate(&self, n: u32) -> Result<PolyEndo> {
        assert!(n >= 1, "iterate needs n >= 1");
        let mut acc = self.clone();
        for _ in 1..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// Human-readable notation accepted by the map parser.
    pub fn notation(&self) -> String {
        let blocks: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let names = default_var_names(b.len());
                format!(
                    "[{}]",
                    b.iter()
                        .map(|p| p.display_with(&names).to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        format!("{}:{}", self.ambient, blocks.join(";"))
    }
}

impl fmt::Display for PolyEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.notation())
    }
}

/// Resultant of two binary forms of common degree `r` (Sylvester determinant).
pub fn binary_resultant(f: &HomPoly, g: &HomPoly, r: u32) -> BigInt {
    linalg::determinant(&sylvester_matrix(f, g, r))
}

/// `2r x 2r` Sylvester matrix; column `c` is the coefficient of `x^(2r-1-c) y^c`.
pub fn sylvester_matrix(f: &HomPoly, g: &HomPoly, r: u32) -> IntMatrix {
    let n = 2 * r as usize;
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (row_offset, p) in [(0usize, f), (r as usize, g)] {
        for shift in 0..r as usize {
            for k in 0..=r {
                // coefficient of x^(r-k) y^k placed at column shift + k
                m[row_offset + shift][shift + k as usize] = p.binary_coeff(r - k, r);
            }
        }
    }
    m
}

fn monomials_of_degree(nvars: usize, deg: u32) -> Vec<Vec<u32>> {
    if nvars == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in (0..=deg).rev() {
        for mut rest in monomials_of_degree(nvars - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// True iff the forms of one block have no common zero over the algebraic closure.
fn block_is_morphism(block: &[HomPoly], r: u32) -> Result<bool> {
    let n = block.len() - 1;
    match n {
        1 => Ok(!binary_resultant(&block[0], &block[1], r).is_zero()),
        2 => {
            // Macaulay: no common zero iff every form of degree 3(r-1)+1 lies in the ideal.
            let target = 3 * (r - 1) + 1;
            let cols = monomials_of_degree(3, target);
            let col_index: std::collections::HashMap<&Vec<u32>, usize> =
                cols.iter().enumerate().map(|(i, m)| (m, i)).collect();
            let mut rows = Vec::new();
            for mult in monomials_of_degree(3, target - r) {
                for p in block {
                    let mut row = vec![BigInt::zero(); cols.len()];
                    for (e, c) in p.terms() {
                        let m: Vec<u32> = e.iter().zip(&mult).map(|(a, b)| a + b).collect();
                        row[col_index[&m]] = c.clone();
                    }
                    rows.push(row);
                }
            }
            Ok(linalg::rank(&rows) == cols.len())
        }
        _ => Err(DynError::Unverified(format!(
            "well-definedness on P{} is not checked; assert it explicitly",
            n
        ))),
    }
}

pub fn morphism_check(f: &PolyEndo) -> Result<bool> {
    for (block, &r) in f.blocks.iter().zip(&f.degrees) {
        if !block_is_morphism(block, r)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn eval_block(polys: &[HomPoly], coords: &[AlgNum]) -> Result<Vec<AlgNum>> {
    if let Some(ints) = ProjPoint::primitive_ints(coords) {
        return Ok(polys
            .iter()
            .map(|p| AlgNum::from(p.eval_int(&ints)))
            .collect());
    }
    polys.iter().map(|p| p.eval_alg(coords)).collect()
}

pub fn evaluate(f: &PolyEndo, p: &ProjPoint) -> Result<ProjPoint> {
    if f.ambient != p.ambient() {
        return Err(DynError::InvalidInput(format!(
            "point {} does not live on {}",
            p, f.ambient
        )));
    }
    let mut blocks = Vec::with_capacity(f.blocks.len());
    for (polys, coords) in f.blocks.iter().zip(&p.blocks) {
        let image = eval_block(polys, coords)?;
        if image.iter().all(|c| c.is_zero()) {
            return Err(DynError::NotAMorphismAtPoint(p.to_string()));
        }
        blocks.push(image);
    }
    ProjPoint::new(blocks)
}

pub fn galois_conjugate(p: &ProjPoint) -> ProjPoint {
    p.galois_conjugate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::quad_reduce;
    use crate::parse::{parse_map, parse_point};
    use proptest::prelude::*;

    fn pt(s: &str) -> ProjPoint {
        parse_point(s).unwrap()
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(pt("2:4"), pt("1:2"));
        assert_eq!(pt("0:-3").notation(), "0:1");
        assert_eq!(pt("4:6:10"), pt("1:3/2:5/2"));
        assert_eq!(pt("4:6:10").notation(), "2:3:5");
        assert_eq!(pt("1:-1/2").notation(), "-2:1");
        assert!(matches!(
            ProjPoint::from_ints(&[0, 0]),
            Err(DynError::InvalidPoint(_))
        ));
    }

    #[test]
    fn height_examples() {
        assert_eq!(point_height(&pt("1:1")).unwrap().value, 0.0);
        assert!((point_height(&pt("2:3")).unwrap().value - 3f64.ln()).abs() < 1e-12);
        let prod = point_height(&pt("1:2;1:5")).unwrap().value;
        assert!((prod - 2f64.ln() - 5f64.ln()).abs() < 1e-12);
        let q = pt("1:sqrt(2):1");
        assert!(matches!(
            point_height(&q),
            Err(DynError::UnsupportedField(_))
        ));
    }

    #[test]
    fn morphism_examples() {
        assert!(morphism_check(&parse_map("P1:[x^2, y^2]").unwrap()).unwrap());
        assert!(!morphism_check(&parse_map("P1:[x*y, y^2]").unwrap()).unwrap());
        assert!(morphism_check(&parse_map("P1:[x^2+y^2, x*y]").unwrap()).unwrap());
        assert!(morphism_check(&parse_map("P2:[x^2, y^2, z^2]").unwrap()).unwrap());
        assert!(!morphism_check(&parse_map("P2:[x^2, x*y, x*z]").unwrap()).unwrap());
        assert!(!morphism_check(&parse_map("P2:[x^2-y^2, y^2-z^2, x^2-z^2]").unwrap()).unwrap());
        assert!(matches!(
            morphism_check(&parse_map("P3:[x^2, y^2, z^2, w^2]").unwrap()),
            Err(DynError::Unverified(_))
        ));
    }

    #[test]
    fn sylvester_oracle_for_x2_y2() {
        // Res(x^2, y^2): the 4x4 Sylvester matrix is a permutation-free identity pattern.
        let f = parse_map("P1:[x^2, y^2]").unwrap();
        let r = binary_resultant(&f.blocks()[0][0], &f.blocks()[0][1], 2);
        assert_eq!(r, BigInt::one());
        let g = parse_map("P1:[x^2-y^2, x*y]").unwrap();
        let r = binary_resultant(&g.blocks()[0][0], &g.blocks()[0][1], 2);
        assert_eq!(r.abs(), BigInt::one());
    }

    #[test]
    fn evaluation_examples() {
        let sq = parse_map("P1:[x^2, y^2]").unwrap();
        assert_eq!(evaluate(&sq, &pt("2:1")).unwrap(), pt("4:1"));
        assert_eq!(evaluate(&sq, &pt("1:1")).unwrap(), pt("1:1"));
        let prod = parse_map("P1xP1:[x^2, y^2];[x^3, y^3]").unwrap();
        assert_eq!(evaluate(&prod, &pt("2:1;2:1")).unwrap(), pt("4:1;8:1"));
        let bad = parse_map("P1:[x*y, y^2]").unwrap();
        assert!(matches!(
            evaluate(&bad, &pt("1:0")),
            Err(DynError::NotAMorphismAtPoint(_))
        ));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(pt("sqrt(2):1").galois_conjugate(), pt("-sqrt(2):1"));
        assert_eq!(pt("1:3").galois_conjugate(), pt("1:3"));
        let g = ProjPoint::affine(quad_reduce(
            Rat::new(1.into(), 2.into()),
            Rat::new(1.into(), 2.into()),
            5,
        ));
        let gbar = ProjPoint::affine(quad_reduce(
            Rat::new(1.into(), 2.into()),
            Rat::new((-1).into(), 2.into()),
            5,
        ));
        assert_eq!(g.galois_conjugate(), gbar);
    }

    #[test]
    fn iterate_degree_and_polarization() {
        let f = parse_map("P1:[x^2, y^2]").unwrap().polarized().unwrap();
        let f3 = f.iterate(3).unwrap();
        assert_eq!(f3.degree(), 8);
        assert_eq!(f3.declared_polarization(), Some(8));
        assert_eq!(evaluate(&f3, &pt("2:1")).unwrap(), pt("256:1"));
    }

    fn small_map() -> impl Strategy<Value = PolyEndo> {
        (2u32..4, proptest::collection::vec(-5i64..=5, 8)).prop_filter_map("morphism", |(r, cs)| {
            let mk = |off: usize| {
                HomPoly::from_terms(
                    2,
                    (0..=r).map(|k| {
                        (
                            vec![k, r - k],
                            BigInt::from(cs[(off + k as usize) % cs.len()]),
                        )
                    }),
                )
            };
            let f = PolyEndo::single(vec![mk(0), mk(4)]).ok()?;
            morphism_check(&f).ok()?.then_some(f)
        })
    }

    proptest! {
        #[test]
        fn height_is_scale_invariant(a in -50i64..50, b in -50i64..50, k in 1i64..30) {
            prop_assume!(a != 0 || b != 0);
            let p = ProjPoint::from_ints(&[a, b]).unwrap();
            let q = ProjPoint::from_ints(&[a * k, b * k]).unwrap();
            prop_assert_eq!(point_height(&p).unwrap().value, point_height(&q).unwrap().value);
        }

        #[test]
        fn height_growth_is_bounded_by_triangle_inequality(f in small_map(), a in -40i64..40, b in 1i64..40) {
            let p = ProjPoint::from_ints(&[a, b]).unwrap();
            let fp = evaluate(&f, &p).unwrap();
            let r = f.degree() as f64;
            let m = f.max_monomials() as f64;
            let norm = crate::arith::log_abs_int(&f.max_abs_coeff());
            let lhs = point_height(&fp).unwrap().value;
            let rhs = r * point_height(&p).unwrap().value + m.ln() + norm + 1e-9;
            prop_assert!(lhs <= rhs);
        }

        #[test]
        fn evaluation_commutes_with_conjugation(f in small_map(), a in -6i64..6, b in 1i64..6, d in prop::sample::select(vec![-1i64, 2, 3, 5, -3])) {
            let alpha = quad_reduce(Rat::from_integer(a.into()), Rat::from_integer(b.into()), d);
            let p = ProjPoint::affine(alpha);
            if let Ok(fp) = evaluate(&f, &p) {
                prop_assert_eq!(evaluate(&f, &p.galois_conjugate()).unwrap(), fp.galois_conjugate());
            }
        }

        #[test]
        fn block_maps_evaluate_factorwise(a in -9i64..9, b in 1i64..9, c in -9i64..9, d in 1i64..9) {
            let f = parse_map("P1xP1:[x^2-y^2, x*y];[x^3+y^3, y^3]").unwrap();
            let p = ProjPoint::new(vec![
                vec![AlgNum::from(a), AlgNum::from(b)],
                vec![AlgNum::from(c), AlgNum::from(d)],
            ]).unwrap();
            let whole = evaluate(&f, &p).unwrap();
            let parts = ProjPoint::product(&[
                evaluate(&f.factor(0), &p.block_point(0)).unwrap(),
                evaluate(&f.factor(1), &p.block_point(1)).unwrap(),
            ]).unwrap();
            prop_assert_eq!(whole, parts);
        }
    }
}
