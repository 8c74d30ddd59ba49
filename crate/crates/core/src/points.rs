//! Small-height points of algebras with values in ℚ or 𝔽ₚ.
//!
//! Points are used only for refutations: two points of B that agree on a
//! subalgebra A but not on B show that Spec B → Spec A is not injective on
//! points, which no universal homeomorphism allows.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::algebra::FpAlgebra;
use crate::certificate::{Obligation, PointContext};
use crate::coeff::{Coeff, CoeffRing};
use crate::error::Result;
use crate::poly::Polynomial;

/// Default search box radius for rational points.
pub const DEFAULT_RADIUS: i64 = 2;
/// Default bound on the number of candidate points examined.
pub const DEFAULT_POINT_LIMIT: usize = 20_000;

/// Fields in which points of an algebra over `base` can be looked for.
pub fn point_fields(base: CoeffRing, extra_primes: &[u64]) -> Vec<CoeffRing> {
    let mut out = Vec::new();
    match base {
        CoeffRing::Integer => {
            out.push(CoeffRing::Rational);
            out.extend(extra_primes.iter().map(|&p| CoeffRing::PrimeField(p)));
        }
        CoeffRing::IntegerLocalizedAt(p) => {
            out.push(CoeffRing::Rational);
            out.push(CoeffRing::PrimeField(p));
        }
        CoeffRing::Rational => out.push(CoeffRing::Rational),
        CoeffRing::IntegerModPrimePower { p, .. } | CoeffRing::PrimeField(p) => {
            out.push(CoeffRing::PrimeField(p))
        }
    }
    out
}

/// Points of `alg` with coordinates in `field`: integers in `[-radius, radius]`
/// for ℚ, all residues for 𝔽ₚ. Returns at most `limit` candidates' worth.
pub fn points(
    alg: &FpAlgebra,
    field: CoeffRing,
    radius: i64,
    limit: usize,
) -> Result<Vec<Vec<Coeff>>> {
    let n = alg.nvars();
    let values: Vec<Coeff> = match field {
        CoeffRing::PrimeField(p) => (0..p as i64)
            .map(|v| BigRational::from_integer(v.into()))
            .collect(),
        _ => {
            let mut v = vec![BigRational::from_integer(0.into())];
            for k in 1..=radius {
                v.push(BigRational::from_integer(k.into()));
                v.push(BigRational::from_integer((-k).into()));
            }
            v
        }
    };
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    let mut visited = 0usize;
    loop {
        visited += 1;
        if visited > limit {
            break;
        }
        let pt: Vec<Coeff> = idx.iter().map(|&i| values[i].clone()).collect();
        let ctx = PointContext::from_values(alg, field, pt.clone());
        if ctx.is_point()? {
            out.push(pt);
        }
        let mut k = 0;
        loop {
            if k == n {
                return Ok(out);
            }
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
    Ok(out)
}

pub fn render_point(pt: &[Coeff]) -> Vec<String> {
    pt.iter().map(|c| c.to_string()).collect()
}

/// Looks for two points of `alg` agreeing on `equal_on` but differing on
/// one of `targets`; returns the replayable obligation.
pub fn separating_points(
    alg: &FpAlgebra,
    fields: &[CoeffRing],
    equal_on: &[Polynomial],
    targets: &[Polynomial],
    radius: i64,
    limit: usize,
) -> Result<Option<Obligation>> {
    for &field in fields {
        let pts = points(alg, field, radius, limit)?;
        let mut seen: BTreeMap<Vec<Coeff>, Vec<Coeff>> = BTreeMap::new();
        for pt in pts {
            let ctx = PointContext::from_values(alg, field, pt.clone());
            let key = equal_on
                .iter()
                .map(|g| ctx.eval_poly(g))
                .collect::<Result<Vec<_>>>()?;
            if let Some(other) = seen.get(&key) {
                let octx = PointContext::from_values(alg, field, other.clone());
                for t in targets {
                    if ctx.eval_poly(t)? != octx.eval_poly(t)? {
                        return Ok(Some(Obligation::PointObstruction {
                            ring: alg.spec(),
                            field: field.to_string(),
                            p1: render_point(other),
                            p2: render_point(&pt),
                            equal_on: equal_on.iter().map(|g| alg.render(g)).collect(),
                            differ_on: alg.render(t),
                        }));
                    }
                }
            } else {
                seen.insert(key, pt);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_on_a_conic() {
        let a = FpAlgebra::parse(CoeffRing::Rational, &["x", "y"], &["x^2 + y^2 - 1"]).unwrap();
        let pts = points(&a, CoeffRing::Rational, 2, 1000).unwrap();
        assert_eq!(pts.len(), 4);
        let b =
            FpAlgebra::parse(CoeffRing::PrimeField(5), &["x", "y"], &["x^2 + y^2 - 1"]).unwrap();
        assert_eq!(
            points(&b, CoeffRing::PrimeField(5), 0, 1000).unwrap().len(),
            4
        );
    }

    #[test]
    fn separating_square_map() {
        let a = FpAlgebra::polynomial_ring(CoeffRing::Integer, &["x"]);
        let x = a.element("x").unwrap();
        let x2 = a.element("x^2").unwrap();
        let ob = separating_points(
            &a,
            &[CoeffRing::Rational],
            &[x2],
            std::slice::from_ref(&x),
            2,
            1000,
        )
        .unwrap();
        let ob = ob.expect("x and -x separate");
        let mut c = crate::certificate::Certificate::new("t");
        c.verdict = crate::certificate::Verdict::Refuted;
        c.obligations.push(ob);
        crate::certificate::replay(&c).unwrap();
        assert!(separating_points(
            &a,
            &[CoeffRing::Rational],
            std::slice::from_ref(&x),
            std::slice::from_ref(&x),
            2,
            1000
        )
        .unwrap()
        .is_none());
    }
}
