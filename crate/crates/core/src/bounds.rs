//! Lower bounds on m for m-ovoids, evaluated exactly.
//!
//! Every bound has the shape (A + sqrt(R))/D with rational A, R, D; the
//! smallest admissible integer is extracted by pure integer comparison, so
//! no floating point enters any threshold.

use crate::exact::{ceil_radical, half_power, rational_string, sci3};
use crate::gf::factor_prime_power;
use crate::polar::SpaceKind;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("hermitian bounds need a square field order, got {0}")]
    NotSquareOrder(u64),
    #[error("the rank-3 elliptic bound needs q > 2, got {0}")]
    SmallQ(u64),
}

/// The real bound (a + sqrt(radicand))/d, or an inapplicability record.
#[derive(Debug, Clone)]
pub struct RadicalBound {
    pub theorem: &'static str,
    pub a: BigRational,
    pub radicand: BigRational,
    pub d: BigRational,
    pub applicable: bool,
    pub reason: Option<String>,
    /// Smallest integer t with t >= (a + sqrt(radicand))/d, clamped at 0.
    pub threshold: Option<BigInt>,
}

impl RadicalBound {
    fn evaluate(
        theorem: &'static str,
        a: BigRational,
        radicand: BigRational,
        d: BigRational,
    ) -> RadicalBound {
        let threshold = ceil_radical(&a, &radicand, &d);
        RadicalBound {
            theorem,
            a,
            radicand,
            d,
            applicable: true,
            reason: None,
            threshold: Some(threshold),
        }
    }

    fn inapplicable(theorem: &'static str, reason: String) -> RadicalBound {
        RadicalBound {
            theorem,
            a: BigRational::zero(),
            radicand: BigRational::zero(),
            d: BigRational::one(),
            applicable: false,
            reason: Some(reason),
            threshold: None,
        }
    }

    pub fn entry(&self) -> BoundEntry {
        BoundEntry {
            theorem: self.theorem.to_string(),
            a: self.applicable.then(|| rational_string(&self.a)),
            r: self.applicable.then(|| rational_string(&self.radicand)),
            d: self.applicable.then(|| rational_string(&self.d)),
            threshold: self.threshold.as_ref().map(|t| t.to_string()),
            applicable: self.applicable,
            reason: self.reason.clone(),
        }
    }
}

/// One bound (a + sqrt(r))/d as exact fraction strings.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub theorem: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<String>,
    pub applicable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BestBound {
    pub threshold: String,
    pub theorem: String,
    #[serde(skip)]
    pub value: BigInt,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub space: String,
    pub r: u32,
    pub q: u64,
    pub e: String,
    pub bounds: Vec<BoundEntry>,
    pub best: BestBound,
    pub notes: Vec<String>,
}

fn pk(q: u64) -> Result<(u64, u32), BoundsError> {
    factor_prime_power(q).ok_or(BoundsError::NotPrimePower(q))
}

fn qpow(p: u64, k: u32, x2: i64) -> BigRational {
    half_power(p, k, x2)
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratq(q: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(q))
}

/// Doubled exponent of the leading radicand power q^X: elliptic q^{r+1},
/// symplectic q^r, Hermitian q^{r+1/2} in the ambient order.
fn radicand_power(kind: SpaceKind, r: u32) -> i64 {
    let r = r as i64;
    match kind {
        SpaceKind::Elliptic => 2 * r + 2,
        SpaceKind::Symplectic => 2 * r,
        SpaceKind::Hermitian => 2 * r + 1,
    }
}

fn check_hermitian_square(kind: SpaceKind, q: u64) -> Result<(), BoundsError> {
    if kind == SpaceKind::Hermitian {
        let (_, k) = pk(q)?;
        if k % 2 != 0 {
            return Err(BoundsError::NotSquareOrder(q));
        }
    }
    Ok(())
}

/// Eigenvalue bound: (-3 + sqrt(9 + 4 q^X))/(2(q-1)) with X from
/// [`radicand_power`], q always the ambient field order.
pub fn bound_bklp(kind: SpaceKind, r: u32, q: u64) -> Result<RadicalBound, BoundsError> {
    check_hermitian_square(kind, q)?;
    let (p, k) = pk(q)?;
    let radicand = rat(9) + rat(4) * qpow(p, k, radicand_power(kind, r));
    Ok(RadicalBound::evaluate(
        "bklp",
        rat(-3),
        radicand,
        rat(2) * (ratq(q) - BigRational::one()),
    ))
}

/// Refinement adding 4(q-2) under the root: radicand 9 + 4(q^X + q - 2).
/// For the symplectic rank-2 case the bound is exactly 1.
pub fn bound_small_improv(kind: SpaceKind, r: u32, q: u64) -> Result<RadicalBound, BoundsError> {
    check_hermitian_square(kind, q)?;
    let (p, k) = pk(q)?;
    let radicand =
        rat(9) + rat(4) * (qpow(p, k, radicand_power(kind, r)) + ratq(q) - rat(2));
    Ok(RadicalBound::evaluate(
        "small",
        rat(-3),
        radicand,
        rat(2) * (ratq(q) - BigRational::one()),
    ))
}

/// Rank-2 Hermitian bound in the base order b = sqrt(q):
/// (-3b-3 + sqrt(4b^5-4b^4+5b^2-2b+1))/(2(b^2-b-2)) for b > 2,
/// and the constant 2 at b = 2.
pub fn bound_bds_h4(q_ambient: u64) -> Result<RadicalBound, BoundsError> {
    let (p, k) = pk(q_ambient)?;
    if k % 2 != 0 {
        return Err(BoundsError::NotSquareOrder(q_ambient));
    }
    let b = p.pow(k / 2);
    if b == 2 {
        let mut rb = RadicalBound::evaluate("bds-h4", rat(2), rat(0), rat(1));
        rb.reason = Some("constant bound at base order 2".to_string());
        return Ok(rb);
    }
    let bb = ratq(b);
    let radicand = rat(4) * &bb * &bb * &bb * &bb * &bb - rat(4) * &bb * &bb * &bb * &bb
        + rat(5) * &bb * &bb
        - rat(2) * &bb
        + rat(1);
    let a = rat(-3) * &bb - rat(3);
    let d = rat(2) * (&bb * &bb - &bb - rat(2));
    Ok(RadicalBound::evaluate("bds-h4", a, radicand, d))
}

fn main_applicable(kind: SpaceKind, r: u32, q: u64) -> Option<String> {
    if q <= 2 {
        return Some(format!("needs q > 2, got q = {q}"));
    }
    if r < 3 {
        return Some(format!("needs r >= 3, got r = {r}"));
    }
    if r == 3 {
        if kind == SpaceKind::Elliptic {
            return Some("rank 3 needs e in {1, 3/2}".to_string());
        }
        if kind == SpaceKind::Symplectic && q == 3 {
            return Some("the case (r, q, e) = (3, 3, 1) is excluded".to_string());
        }
    }
    None
}

/// The quadratic-root bound through a cone vertex of weight r-1:
///
///   ( -r(1 + 2/q^{r-e-1} + 1/q^{r-2})
///     + sqrt(r^2 (1 + 1/q^{r-e-1})^2
///            + 4(q-2)(r-1)(q^{e+1}(q^{r-2}-1)/(q-1) + q^e + 1)) )
///   / (2(q-1)),
///
/// applicable for q > 2 with r >= 4, or r = 3 with e in {1, 3/2} except
/// (r, q, e) = (3, 3, 1).
pub fn bound_main(kind: SpaceKind, r: u32, q: u64) -> Result<RadicalBound, BoundsError> {
    check_hermitian_square(kind, q)?;
    let (p, k) = pk(q)?;
    if let Some(reason) = main_applicable(kind, r, q) {
        return Ok(RadicalBound::inapplicable("main", reason));
    }
    let e2 = kind.e2();
    let ri = r as i64;
    let rr = rat(ri);
    let inv_re1 = qpow(p, k, -(2 * ri - e2 - 2)); // 1/q^{r-e-1}
    let inv_r2 = qpow(p, k, -2 * (ri - 2)); // 1/q^{r-2}
    let a = -&rr * (BigRational::one() + rat(2) * &inv_re1 + &inv_r2);
    let lin = BigRational::one() + &inv_re1;
    let geom = qpow(p, k, e2 + 2) * (qpow(p, k, 2 * (ri - 2)) - BigRational::one())
        / (ratq(q) - BigRational::one())
        + qpow(p, k, e2)
        + BigRational::one();
    let radicand = &rr * &rr * &lin * &lin + rat(4) * (ratq(q) - rat(2)) * rat(ri - 1) * geom;
    let d = rat(2) * (ratq(q) - BigRational::one());
    Ok(RadicalBound::evaluate("main", a, radicand, d))
}

/// Large-r limit of [`bound_main`]: (-r + sqrt(r^2 + 4(r-1)(q-2)q^{r+e-2}))
/// / (2(q-1)). Reported for comparison, never used as a bound.
pub fn bound_main_asymptotic(
    kind: SpaceKind,
    r: u32,
    q: u64,
) -> Result<RadicalBound, BoundsError> {
    check_hermitian_square(kind, q)?;
    let (p, k) = pk(q)?;
    if let Some(reason) = main_applicable(kind, r, q) {
        return Ok(RadicalBound::inapplicable("asymptotic", reason));
    }
    let ri = r as i64;
    let rr = rat(ri);
    let radicand = &rr * &rr
        + rat(4) * rat(ri - 1) * (ratq(q) - rat(2)) * qpow(p, k, 2 * ri + kind.e2() - 4);
    let d = rat(2) * (ratq(q) - BigRational::one());
    Ok(RadicalBound::evaluate("asymptotic", -rr, radicand, d))
}

/// Sharper rank-3 elliptic bound:
/// (-3(3 + 1/q) + sqrt(36 + 8(q - 7/3)(q^3 + q^2 + 1)))/(2(q-1)), q > 2.
pub fn bound_q7(q: u64) -> Result<RadicalBound, BoundsError> {
    if q <= 2 {
        return Err(BoundsError::SmallQ(q));
    }
    pk(q)?;
    let qq = ratq(q);
    let a = rat(-3) * (rat(3) + BigRational::one() / &qq);
    let radicand = rat(36)
        + rat(8) * (&qq - BigRational::new(BigInt::from(7), BigInt::from(3)))
            * (&qq * &qq * &qq + &qq * &qq + rat(1));
    let d = rat(2) * (&qq - BigRational::one());
    Ok(RadicalBound::evaluate("q7", a, radicand, d))
}

/// Evaluates every applicable bound and keeps the maximum threshold;
/// on ties the later theorem in evaluation order wins.
pub fn best_bound(kind: SpaceKind, r: u32, q: u64) -> Result<BoundReport, BoundsError> {
    let mut bounds: Vec<RadicalBound> = vec![
        bound_bklp(kind, r, q)?,
        bound_small_improv(kind, r, q)?,
    ];
    if kind == SpaceKind::Hermitian && r == 2 {
        bounds.push(bound_bds_h4(q)?);
    }
    bounds.push(bound_main(kind, r, q)?);
    bounds.push(bound_main_asymptotic(kind, r, q)?);
    if kind == SpaceKind::Elliptic && r == 3 && q > 2 {
        bounds.push(bound_q7(q)?);
    }

    let mut best: Option<(BigInt, &'static str)> = None;
    for b in &bounds {
        if b.theorem == "asymptotic" {
            continue;
        }
        if let Some(t) = &b.threshold {
            match &best {
                Some((cur, _)) if t < cur => {}
                _ => best = Some((t.clone(), b.theorem)),
            }
        }
    }
    let (best_t, best_theorem) = best.expect("bklp always applies");

    let mut notes = Vec::new();
    if kind == SpaceKind::Symplectic && r == 2 {
        notes.push(
            "rank-2 symplectic spaces have 1-ovoids exactly when q is even; the bound 1 is sharp"
                .to_string(),
        );
    } else if best_t >= BigInt::from(2) {
        notes.push("1-ovoids are excluded".to_string());
    }

    Ok(BoundReport {
        space: kind.name(r, q),
        r,
        q,
        e: kind.e_str().to_string(),
        bounds: bounds.iter().map(|b| b.entry()).collect(),
        best: BestBound {
            threshold: best_t.to_string(),
            theorem: best_theorem.to_string(),
            value: best_t,
        },
        notes,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub param: String,
    pub first: String,
    pub first_sci: String,
    pub second: String,
    pub second_sci: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: [String; 3],
    pub rows: Vec<TableRow>,
}

fn table_row(param: String, first: &RadicalBound, second: &RadicalBound) -> TableRow {
    let f = first.threshold.clone().expect("applicable");
    let s = second.threshold.clone().expect("applicable");
    TableRow {
        param,
        first_sci: sci3(&f),
        first: f.to_string(),
        second_sci: sci3(&s),
        second: s.to_string(),
    }
}

/// The four comparison tables: main vs refined bound over q = 3 (all three
/// kinds, Hermitian ambient order 9) and the rank-3 elliptic bound over q.
pub fn emit_tables() -> Result<Vec<Table>, BoundsError> {
    let mut tables = Vec::new();
    let kinds = [
        (SpaceKind::Symplectic, 3u64, "W(2r-1,3)", vec![4u32, 5, 6, 7, 100]),
        (SpaceKind::Elliptic, 3, "Q-(2r+1,3)", vec![4, 5, 6, 7, 100]),
        (SpaceKind::Hermitian, 9, "H(2r,9)", vec![3, 4, 5, 6, 7, 100]),
    ];
    for (kind, q, title, rs) in kinds {
        let mut rows = Vec::new();
        for r in rs {
            rows.push(table_row(
                format!("{r}"),
                &bound_main(kind, r, q)?,
                &bound_small_improv(kind, r, q)?,
            ));
        }
        tables.push(Table {
            title: title.to_string(),
            columns: ["r".to_string(), "main".to_string(), "small".to_string()],
            rows,
        });
    }
    let mut rows = Vec::new();
    for q in [3u64, 4, 5, 7, 8, 243] {
        rows.push(table_row(
            format!("{q}"),
            &bound_q7(q)?,
            &bound_small_improv(SpaceKind::Elliptic, 3, q)?,
        ));
    }
    tables.push(Table {
        title: "Q-(7,q)".to_string(),
        columns: ["q".to_string(), "q7".to_string(), "small".to_string()],
        rows,
    });
    Ok(tables)
}
