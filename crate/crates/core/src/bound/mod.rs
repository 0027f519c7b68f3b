//! Numerical lower bound on the probability that the greedy rule selects a
//! fixed element of the offline optimum.
//!
//! For threshold `t0` and an element arriving at `t*`, the failure
//! probability is bounded by `Σ_i F(ln(t*/t0); i, i)` where `F(·; i, i)` is
//! the Gamma CDF with shape and rate `i`. Integrating the complement over
//! `t* ∈ [t0, 1]` gives the selection-probability bound; its reciprocal is
//! the competitive ratio.
//!
//! For unbounded rank the sum is truncated at `K` terms. The remainder is
//! bounded with `F(x; i, i) <= (e x)^i`, a geometric series that converges
//! only while `e · ln(1/t0) < 1`, i.e. `t0 > e^{-1/e}`. That remainder is
//! subtracted from the reported bound, so the bound is certified up to the
//! quadrature tolerance.

mod gamma;
mod quadrature;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

pub use gamma::{erlang_cdf, gamma_cdf, ln_gamma, regularized_lower_gamma};
pub use quadrature::{adaptive_simpson, Quadrature};

use crate::error::BoundError;

pub const DEFAULT_TRUNCATION: u32 = 3000;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-9;

/// `e^{-1/e}`: the smallest admissible threshold when rank is unbounded.
pub fn convergence_threshold() -> f64 {
    (-1.0 / std::f64::consts::E).exp()
}

/// Number of capacity levels the union bound sums over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxRank {
    Finite(u32),
    Infinite,
}

impl fmt::Display for MaxRank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxRank::Finite(k) => write!(f, "{k}"),
            MaxRank::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for MaxRank {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinite" | "infinity" | "∞" => Ok(MaxRank::Infinite),
            t => match t.parse::<u32>() {
                Ok(0) => Err("rank must be >= 1".to_string()),
                Ok(k) => Ok(MaxRank::Finite(k)),
                Err(_) => Err(format!("expected a positive integer or `inf`, got `{t}`")),
            },
        }
    }
}

impl Serialize for MaxRank {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            MaxRank::Finite(k) => s.serialize_u32(*k),
            MaxRank::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Parse a rank list such as `1..10`, `1..=10`, `1,2,5` or `3`.
///
/// `a..b` is inclusive of both ends, matching how the figure is described
/// on the command line.
pub fn parse_rank_list(s: &str) -> Result<Vec<u32>, String> {
    const MAX_LEN: u64 = 100_000;
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim) {
        if part.is_empty() {
            return Err("empty rank entry".into());
        }
        if let Some((lo, hi)) = part.split_once("..") {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            let lo: u32 = lo.trim().parse().map_err(|_| format!("bad range start in `{part}`"))?;
            let hi: u32 = hi.trim().parse().map_err(|_| format!("bad range end in `{part}`"))?;
            if lo == 0 || hi < lo {
                return Err(format!("range `{part}` must satisfy 1 <= start <= end"));
            }
            if u64::from(hi - lo) + out.len() as u64 >= MAX_LEN {
                return Err("rank list too long".into());
            }
            out.extend(lo..=hi);
        } else {
            let k: u32 = part.parse().map_err(|_| format!("bad rank `{part}`"))?;
            if k == 0 {
                return Err("rank must be >= 1".into());
            }
            out.push(k);
        }
        if out.len() as u64 > MAX_LEN {
            return Err("rank list too long".into());
        }
    }
    Ok(out)
}

/// Truncated sum `Σ_{i<=n} F(x; i, i)` plus a bound on what was left out.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SurvivalSum {
    pub partial: f64,
    /// Upper bound on the omitted terms; zero when nothing was omitted.
    pub tail: f64,
}

/// Sum the Gamma CDFs up to `min(truncation, rank)` and bound the rest.
///
/// For unbounded rank the omitted terms are bounded by the geometric series
/// `Σ_{i>K} (e x)^i`, which requires `e x < 1`. For a finite rank above the
/// truncation the same bound is summed only up to the rank.
pub fn survival_sum(x: f64, truncation: u32, rank: MaxRank) -> Result<SurvivalSum, BoundError> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(BoundError::Domain(format!("x must be finite and >= 0, got {x}")));
    }
    if truncation == 0 {
        return Err(BoundError::Domain("truncation must be >= 1".into()));
    }
    let ex = std::f64::consts::E * x;
    if rank == MaxRank::Infinite && ex >= 1.0 {
        return Err(BoundError::Convergence { ex });
    }
    let terms = match rank {
        MaxRank::Finite(k) => k.min(truncation),
        MaxRank::Infinite => truncation,
    };
    let partial = partial_sum(x, terms);
    let tail = if x == 0.0 {
        0.0
    } else {
        match rank {
            MaxRank::Finite(k) if k <= truncation => 0.0,
            MaxRank::Finite(k) => {
                let omitted = f64::from(k - truncation);
                if ex < 1.0 {
                    // Σ_{i=K+1}^{k} (ex)^i
                    ex.powf(f64::from(truncation) + 1.0) * (1.0 - ex.powf(omitted)) / (1.0 - ex)
                } else {
                    omitted
                }
            }
            MaxRank::Infinite => ex.powf(f64::from(truncation) + 1.0) / (1.0 - ex),
        }
    };
    Ok(SurvivalSum { partial, tail })
}

fn partial_sum(x: f64, terms: u32) -> f64 {
    let mut sum = 0.0;
    for i in 1..=terms {
        let f = gamma_cdf(x, i).expect("arguments checked by caller");
        // Below x = 1 the terms decrease in i, so once one underflows the
        // rest cannot change the sum.
        if f == 0.0 && x < 1.0 {
            break;
        }
        sum += f;
    }
    sum
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundQuery {
    pub t0: f64,
    pub max_rank: MaxRank,
    pub truncation: u32,
    pub quadrature_tol: f64,
}

impl BoundQuery {
    pub fn new(t0: f64, max_rank: MaxRank) -> Self {
        Self { t0, max_rank, truncation: DEFAULT_TRUNCATION, quadrature_tol: DEFAULT_QUADRATURE_TOL }
    }

    fn check(&self) -> Result<(), BoundError> {
        if !(self.t0 > 0.0 && self.t0 < 1.0) {
            return Err(BoundError::Domain(format!("t0 must lie in (0, 1), got {}", self.t0)));
        }
        if self.truncation == 0 {
            return Err(BoundError::Domain("truncation must be >= 1".into()));
        }
        if !(self.quadrature_tol > 0.0 && self.quadrature_tol.is_finite()) {
            return Err(BoundError::Domain("quadrature tolerance must be positive".into()));
        }
        if self.max_rank == MaxRank::Infinite {
            let ex = std::f64::consts::E * (1.0 / self.t0).ln();
            if ex >= 1.0 {
                return Err(BoundError::Convergence { ex });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundResult {
    pub t0: f64,
    pub max_rank: MaxRank,
    pub truncation: u32,
    /// Integral minus `tail_error`.
    pub lower_bound: f64,
    /// Upper bound on the integrated truncation remainder.
    pub tail_error: f64,
    pub quadrature_error: f64,
    pub ratio: f64,
}

/// Certified lower bound on the selection probability of an optimal element.
pub fn selection_prob_lower_bound(q: &BoundQuery) -> Result<BoundResult, BoundError> {
    q.check()?;
    let t0 = q.t0;
    let quad = adaptive_simpson(
        |t| {
            let x = (t / t0).ln().max(0.0);
            1.0 - partial_sum(x, effective_terms(q))
        },
        t0,
        1.0,
        q.quadrature_tol,
    );
    // The remainder bound grows with t*, so its value at t* = 1 bounds it
    // over the whole interval.
    let tail = survival_sum((1.0 / t0).ln(), q.truncation, q.max_rank)?.tail;
    let tail_error = (1.0 - t0) * tail;
    let lower_bound = quad.value - tail_error;
    Ok(BoundResult {
        t0,
        max_rank: q.max_rank,
        truncation: q.truncation,
        lower_bound,
        tail_error,
        quadrature_error: quad.error_estimate,
        ratio: 1.0 / lower_bound,
    })
}

fn effective_terms(q: &BoundQuery) -> u32 {
    match q.max_rank {
        MaxRank::Finite(k) => k.min(q.truncation),
        MaxRank::Infinite => q.truncation,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeResult {
    pub max_rank: MaxRank,
    pub t0_star: f64,
    pub lower_bound: f64,
    pub ratio: f64,
}

const GRID_POINTS: usize = 48;
const T0_TOL: f64 = 1e-7;
const EDGE: f64 = 1e-6;

/// Threshold maximizing [`selection_prob_lower_bound`].
///
/// A coarse grid scan over the admissible interval locates the best cell,
/// then golden-section search refines within its neighbours.
pub fn optimize_t0(max_rank: MaxRank, truncation: u32, tol: f64) -> Result<OptimizeResult, BoundError> {
    let lo = match max_rank {
        MaxRank::Finite(_) => EDGE,
        MaxRank::Infinite => convergence_threshold() + EDGE,
    };
    let hi = 1.0 - EDGE;
    let eval = |t0: f64| -> Result<f64, BoundError> {
        let q = BoundQuery { t0, max_rank, truncation, quadrature_tol: tol };
        Ok(selection_prob_lower_bound(&q)?.lower_bound)
    };

    let step = (hi - lo) / (GRID_POINTS as f64 + 1.0);
    let grid: Vec<f64> = (1..=GRID_POINTS).map(|k| lo + step * k as f64).collect();
    let values = grid.par_iter().map(|&t| eval(t)).collect::<Result<Vec<f64>, _>>()?;
    let best = (0..grid.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    let mut a = if best == 0 { lo } else { grid[best - 1] };
    let mut b = if best + 1 == grid.len() { hi } else { grid[best + 1] };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > T0_TOL {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d)?;
        }
    }
    let t0_star = 0.5 * (a + b);
    let lower_bound = eval(t0_star)?;
    Ok(OptimizeResult { max_rank, t0_star, lower_bound, ratio: 1.0 / lower_bound })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub rank: MaxRank,
    pub t0_star: f64,
    pub ratio: f64,
}

/// Optimized ratio for each rank, plus an unbounded-rank row on request.
pub fn ratio_table(
    ranks: &[u32],
    include_infinite: bool,
    truncation: u32,
    tol: f64,
) -> Result<Vec<RatioRow>, BoundError> {
    if ranks.is_empty() && !include_infinite {
        return Err(BoundError::Domain("rank list is empty".into()));
    }
    if ranks.contains(&0) {
        return Err(BoundError::Domain("ranks must be >= 1".into()));
    }
    let mut all: Vec<MaxRank> = ranks.iter().map(|&k| MaxRank::Finite(k)).collect();
    if include_infinite {
        all.push(MaxRank::Infinite);
    }
    all.par_iter()
        .map(|&r| {
            let o = optimize_t0(r, truncation, tol)?;
            Ok(RatioRow { rank: r, t0_star: o.t0_star, ratio: o.ratio })
        })
        .collect()
}

/// CSV with header `rank,t0_star,ratio`.
pub fn ratio_table_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from("rank,t0_star,ratio\n");
    for r in rows {
        out.push_str(&format!("{},{:.6},{:.6}\n", r.rank, r.t0_star, r.ratio));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_sum_at_zero() {
        let s = survival_sum(0.0, 3000, MaxRank::Infinite).unwrap();
        assert_eq!(s, SurvivalSum { partial: 0.0, tail: 0.0 });
    }

    #[test]
    fn tail_at_headline_threshold_is_tiny() {
        let s = survival_sum((1.0f64 / 0.7).ln(), 3000, MaxRank::Infinite).unwrap();
        assert!(s.tail < 1e-38, "{}", s.tail);
        assert!(s.tail > 0.0);
    }

    #[test]
    fn divergent_tail_is_rejected() {
        let x = (1.0f64 / 0.65).ln();
        assert!(matches!(survival_sum(x, 3000, MaxRank::Infinite), Err(BoundError::Convergence { .. })));
        // a finite rank has nothing to converge
        assert!(survival_sum(x, 3000, MaxRank::Finite(10)).is_ok());
    }

    #[test]
    fn finite_rank_above_truncation_gets_tail() {
        let x = 0.2;
        let s = survival_sum(x, 5, MaxRank::Finite(8)).unwrap();
        let exact: f64 = (6..=8).map(|i| gamma_cdf(x, i).unwrap()).sum();
        assert!(s.tail >= exact);
        let full = survival_sum(x, 8, MaxRank::Finite(8)).unwrap();
        assert_eq!(full.tail, 0.0);
        assert!((full.partial - s.partial - exact).abs() < 1e-15);
    }

    #[test]
    fn rank_one_closed_form() {
        for t0 in [0.3, 1.0 / std::f64::consts::E, 0.5, 0.7, 0.9] {
            let r = selection_prob_lower_bound(&BoundQuery::new(t0, MaxRank::Finite(1))).unwrap();
            assert!((r.lower_bound - t0 * (1.0 / t0).ln()).abs() < 1e-8, "t0={t0}");
            assert!(r.lower_bound <= 1.0 - t0);
        }
    }

    #[test]
    fn near_one_bound_vanishes() {
        let r = selection_prob_lower_bound(&BoundQuery::new(0.999_999, MaxRank::Infinite)).unwrap();
        assert!(r.lower_bound >= 0.0 && r.lower_bound < 1e-5);
    }

    #[test]
    fn query_domain() {
        assert!(matches!(
            selection_prob_lower_bound(&BoundQuery::new(1.5, MaxRank::Finite(1))),
            Err(BoundError::Domain(_))
        ));
        assert!(matches!(
            selection_prob_lower_bound(&BoundQuery::new(0.65, MaxRank::Infinite)),
            Err(BoundError::Convergence { .. })
        ));
    }

    #[test]
    fn max_rank_parsing() {
        assert_eq!("inf".parse::<MaxRank>().unwrap(), MaxRank::Infinite);
        assert_eq!("12".parse::<MaxRank>().unwrap(), MaxRank::Finite(12));
        assert!("0".parse::<MaxRank>().is_err());
        assert!("x".parse::<MaxRank>().is_err());
    }

    #[test]
    fn rank_list_parsing() {
        assert_eq!(parse_rank_list("1..4").unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(parse_rank_list("1..=2,7").unwrap(), vec![1, 2, 7]);
        assert_eq!(parse_rank_list("3").unwrap(), vec![3]);
        assert!(parse_rank_list("0..3").is_err());
        assert!(parse_rank_list("4..2").is_err());
        assert!(parse_rank_list("1,,2").is_err());
        assert!(parse_rank_list("1..4000000000").is_err());
    }

    #[test]
    fn csv_shape() {
        let rows = [
            RatioRow { rank: MaxRank::Finite(1), t0_star: 0.367879, ratio: 2.718282 },
            RatioRow { rank: MaxRank::Infinite, t0_star: 0.69, ratio: 4.73 },
        ];
        assert_eq!(
            ratio_table_csv(&rows),
            "rank,t0_star,ratio\n1,0.367879,2.718282\ninf,0.690000,4.730000\n"
        );
    }
}
