//! Integral averages and restricted maximal operators.
//!
//! On a finite space the supremum over `0 < r <= R` is a maximum over the
//! closed balls `{y : d(x, y) <= t}` with `t` a distance value below `R`
//! (see [`crate::space::candidate_radii`]). `R = f64::INFINITY` gives the
//! unrestricted operators.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::space::{Ball, MetricMeasureSpace, PointMeasure, ScalarField, Shells};

/// `μ`-average of `values` over `points`, summed in the order given.
///
/// The result is clamped to the range of the averaged values, so the
/// average of a constant is exactly that constant.
pub fn average_over(space: &MetricMeasureSpace, values: &[f64], points: &[usize]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &i in points {
        let m = space.mass(i);
        num += values[i] * m;
        den += m;
        lo = lo.min(values[i]);
        hi = hi.max(values[i]);
    }
    (num / den).clamp(lo, hi)
}

/// `u_B`, the `μ`-average of `u` over `B`.
pub fn ball_average(space: &MetricMeasureSpace, u: &ScalarField, b: &Ball) -> f64 {
    average_over(space, u.values(), &b.members)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

/// Running averages of `values` over the closed balls of each shell,
/// clamped to the running range.
fn shell_averages(
    space: &MetricMeasureSpace,
    shells: &Shells,
    values: &[f64],
    upto: usize,
) -> Vec<f64> {
    let order = shells.order();
    let mut out = Vec::with_capacity(upto);
    let (mut num, mut den) = (0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut pos = 0;
    for &end in &shells.ends()[..upto] {
        while pos < end as usize {
            let p = order[pos] as usize;
            let m = space.mass(p);
            num += values[p] * m;
            den += m;
            lo = lo.min(values[p]);
            hi = hi.max(values[p]);
            pos += 1;
        }
        out.push((num / den).clamp(lo, hi));
    }
    out
}

/// Running ratios `ν(ball) / μ(ball)` over the closed balls of each shell.
fn shell_ratios(nu: &[f64], shells: &Shells, upto: usize) -> Vec<f64> {
    let order = shells.order();
    let cum_mass = shells.cumulative_mass();
    let mut out = Vec::with_capacity(upto);
    let mut acc = 0.0;
    let mut pos = 0;
    for (i, &end) in shells.ends()[..upto].iter().enumerate() {
        while pos < end as usize {
            acc += nu[order[pos] as usize];
            pos += 1;
        }
        out.push(acc / cum_mass[i]);
    }
    out
}

fn running_max(mut v: Vec<f64>) -> Vec<f64> {
    for i in 1..v.len() {
        v[i] = v[i].max(v[i - 1]);
    }
    v
}

/// `M_R u(x) = sup_{0 < r <= R} ⨍_{B(x, r)} |u| dμ`.
pub fn restricted_maximal(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    x: usize,
    r_max: f64,
) -> Result<f64> {
    check_radius(r_max)?;
    u.check_len(space, "function")?;
    let abs: Vec<f64> = u.values().iter().map(|v| v.abs()).collect();
    let shells = space.shells(x);
    let upto = shells.realizable(r_max);
    Ok(shell_averages(space, shells, &abs, upto)
        .into_iter()
        .fold(0.0, f64::max))
}

/// `M_{R,ν}(x) = sup_{0 < r <= R} ν(B(x, r)) / μ(B(x, r))`.
pub fn restricted_maximal_measure(
    space: &MetricMeasureSpace,
    nu: &PointMeasure,
    x: usize,
    r_max: f64,
) -> Result<f64> {
    check_radius(r_max)?;
    nu.check_len(space, "measure")?;
    let shells = space.shells(x);
    let upto = shells.realizable(r_max);
    Ok(shell_ratios(nu.masses(), shells, upto)
        .into_iter()
        .fold(0.0, f64::max))
}

/// `M_R u` at every point.
pub fn maximal_function(
    space: &MetricMeasureSpace,
    u: &ScalarField,
    r_max: f64,
) -> Result<ScalarField> {
    check_radius(r_max)?;
    u.check_len(space, "function")?;
    let table = MaximalTable::of_function(space, u);
    Ok(ScalarField::from_fn(space.n(), |x| {
        table.query(space, x, r_max)
    }))
}

/// `M_{R,ν}` at every point.
pub fn maximal_function_measure(
    space: &MetricMeasureSpace,
    nu: &PointMeasure,
    r_max: f64,
) -> Result<ScalarField> {
    check_radius(r_max)?;
    nu.check_len(space, "measure")?;
    let table = MaximalTable::of_measure(space, nu);
    Ok(ScalarField::from_fn(space.n(), |x| {
        table.query(space, x, r_max)
    }))
}

/// Per-center running maxima over shells, answering `M_R(x)` for any `R`
/// with one binary search.
#[derive(Debug, Clone)]
pub struct MaximalTable {
    prefix_max: Vec<Vec<f64>>,
}

impl MaximalTable {
    /// Table for `M_R |u|`.
    pub fn of_function(space: &MetricMeasureSpace, u: &ScalarField) -> Self {
        let abs: Vec<f64> = u.values().iter().map(|v| v.abs()).collect();
        let prefix_max = (0..space.n())
            .into_par_iter()
            .map(|x| {
                let shells = space.shells(x);
                running_max(shell_averages(space, shells, &abs, shells.len()))
            })
            .collect();
        MaximalTable { prefix_max }
    }

    /// Table for `M_{R,ν}`.
    pub fn of_measure(space: &MetricMeasureSpace, nu: &PointMeasure) -> Self {
        let prefix_max = (0..space.n())
            .into_par_iter()
            .map(|x| {
                let shells = space.shells(x);
                running_max(shell_ratios(nu.masses(), shells, shells.len()))
            })
            .collect();
        MaximalTable { prefix_max }
    }

    /// The restricted maximal value at `x` for radius bound `r_max > 0`.
    pub fn query(&self, space: &MetricMeasureSpace, x: usize, r_max: f64) -> f64 {
        let k = space.shells(x).realizable(r_max);
        debug_assert!(k > 0, "r_max must be positive");
        self.prefix_max[x][k - 1]
    }

    /// The unrestricted maximal value at `x`.
    pub fn unrestricted(&self, x: usize) -> f64 {
        *self.prefix_max[x].last().expect("every center has a shell")
    }
}

/// Covering constant of the weak-type estimate for `M_ν`.
///
/// Returns `max_{x, t} μ(B̄(x, 3t)) / μ(B̄(x, t))` over closed balls with
/// `t` a distance value. A greedy disjoint selection among the balls
/// witnessing `M_ν > s` covers the superlevel set by the tripled balls,
/// which gives `μ({M_ν > s}) <= C · ν(X) / s` with this `C`.
pub fn weak_type_constant(space: &MetricMeasureSpace) -> f64 {
    (0..space.n())
        .into_par_iter()
        .map(|x| {
            let shells = space.shells(x);
            let cum = shells.cumulative_mass();
            shells
                .radii()
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    let k = shells.up_to(3.0 * t);
                    cum[k - 1] / cum[i]
                })
                .fold(1.0, f64::max)
        })
        .reduce(|| 1.0, f64::max)
}

/// `μ({x : M_ν(x) > level})`, summed in point-index order.
pub fn superlevel_mass(space: &MetricMeasureSpace, maximal: &ScalarField, level: f64) -> f64 {
    (0..space.n())
        .filter(|&x| maximal[x] > level)
        .map(|x| space.mass(x))
        .fold(0.0, |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{ball, load_space};

    fn s2() -> MetricMeasureSpace {
        load_space(r#"{"name":"S2","metric":{"type":"matrix","d":[[0,1],[1,0]]},"mu":[1,1]}"#)
            .unwrap()
    }

    #[test]
    fn averages() {
        let s = s2();
        let u = ScalarField::new(vec![0.0, 2.0]).unwrap();
        assert_eq!(ball_average(&s, &u, &ball(&s, 0, 1.5).unwrap()), 1.0);
        let c = ScalarField::constant(2, 0.1);
        assert_eq!(ball_average(&s, &c, &ball(&s, 1, 1.5).unwrap()), 0.1);
    }

    #[test]
    fn maximal_function_examples() {
        let s = s2();
        let u = ScalarField::new(vec![0.0, 2.0]).unwrap();
        assert_eq!(restricted_maximal(&s, &u, 0, 1.0).unwrap(), 0.0);
        assert_eq!(restricted_maximal(&s, &u, 0, 2.0).unwrap(), 1.0);
        let c = ScalarField::constant(2, -0.3);
        for r in [0.5, 1.0, 7.0, f64::INFINITY] {
            assert_eq!(restricted_maximal(&s, &c, 1, r).unwrap(), 0.3);
        }
        assert!(restricted_maximal(&s, &u, 0, 0.0).is_err());
    }

    #[test]
    fn maximal_measure_examples() {
        let s = s2();
        let nu = PointMeasure::new(vec![3.0, 0.0]).unwrap();
        assert_eq!(restricted_maximal_measure(&s, &nu, 0, 2.0).unwrap(), 3.0);
        assert_eq!(restricted_maximal_measure(&s, &nu, 1, 2.0).unwrap(), 1.5);
        assert_eq!(restricted_maximal_measure(&s, &nu, 1, 1.0).unwrap(), 0.0);
        let zero = PointMeasure::zero(2);
        assert_eq!(
            restricted_maximal_measure(&s, &zero, 0, f64::INFINITY).unwrap(),
            0.0
        );
    }

    #[test]
    fn table_matches_pointwise_queries() {
        let s = s2();
        let nu = PointMeasure::new(vec![3.0, 1.0]).unwrap();
        let table = MaximalTable::of_measure(&s, &nu);
        for x in 0..2 {
            for r in [0.5, 1.0, 1.5] {
                assert_eq!(
                    table.query(&s, x, r),
                    restricted_maximal_measure(&s, &nu, x, r).unwrap()
                );
            }
        }
    }

    #[test]
    fn covering_constant_of_two_points() {
        // closed balls: t = 0 gives {x} -> {x}; t = 1 gives X -> X
        assert_eq!(weak_type_constant(&s2()), 1.0);
    }
}
