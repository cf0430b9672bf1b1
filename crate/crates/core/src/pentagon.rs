//! Feasibility of generalized pentagons of order (s, t) from the eigenvalue multiplicities of the
//! point graph, which is strongly regular with k = s(t+1), λ = s−1, μ = 1.
//!
//! A point has k neighbours and k·(k−λ−1)/μ = s²t(t+1) points at distance 2, so
//! v = 1 + s(t+1)(1+st). The multiplicities of the two nontrivial eigenvalues are
//! ((v−1) ∓ (2k + (v−1)(λ−μ))/√D)/2 with D = (λ−μ)² + 4(k−μ). The dual pentagon has order
//! (t, s), so both point graphs must pass.

use num_integer::Roots;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PentagonParams {
    pub s: i64,
    pub t: i64,
}

impl PentagonParams {
    pub fn new(s: i64, t: i64) -> Self {
        assert!(s >= 1 && t >= 1, "order must be positive");
        Self { s, t }
    }

    pub fn v(&self) -> i64 {
        1 + self.s * (self.t + 1) * (1 + self.s * self.t)
    }

    pub fn k(&self) -> i64 {
        self.s * (self.t + 1)
    }

    pub fn lambda(&self) -> i64 {
        self.s - 1
    }

    pub fn mu(&self) -> i64 {
        1
    }

    pub fn dual(&self) -> Self {
        Self { s: self.t, t: self.s }
    }
}

/// r + c·√d, exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Surd {
    pub rational: Ratio<i64>,
    pub coeff: Ratio<i64>,
    pub radicand: i64,
}

impl Surd {
    pub fn is_nonnegative_integer(&self) -> bool {
        *self.coeff.numer() == 0 && self.rational.is_integer() && *self.rational.numer() >= 0
    }
}

impl std::fmt::Display for Surd {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if *self.coeff.numer() == 0 {
            write!(f, "{}", self.rational)
        } else {
            let (sign, c) = if *self.coeff.numer() < 0 { ('-', -self.coeff) } else { ('+', self.coeff) };
            write!(f, "{} {sign} {c}·√{}", self.rational, self.radicand)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SrgCheck {
    pub v: i64,
    pub k: i64,
    pub lambda: i64,
    pub mu: i64,
    pub multiplicities: [Surd; 2],
    pub integral: bool,
}

/// Multiplicities of the restricted eigenvalues of a strongly regular graph, positive eigenvalue first.
pub fn srg_multiplicities(v: i64, k: i64, lambda: i64, mu: i64) -> SrgCheck {
    let disc = (lambda - mu).pow(2) + 4 * (k - mu);
    let half = Ratio::new(v - 1, 2);
    let num = 2 * k + (v - 1) * (lambda - mu);
    // num/(2√D) = num·√D/(2D)
    let mut coeff = Ratio::new(num, 2 * disc);
    let mut rational = [half, half];
    let root = disc.sqrt();
    let radicand = if root * root == disc {
        let shift = coeff * root;
        rational = [half - shift, half + shift];
        coeff = Ratio::from_integer(0);
        1
    } else {
        disc
    };
    let multiplicities = [
        Surd {
            rational: rational[0],
            coeff: -coeff,
            radicand,
        },
        Surd {
            rational: rational[1],
            coeff,
            radicand,
        },
    ];
    let integral = multiplicities.iter().all(Surd::is_nonnegative_integer);
    SrgCheck {
        v,
        k,
        lambda,
        mu,
        multiplicities,
        integral,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Feasibility {
    pub params: PentagonParams,
    pub point_graph: SrgCheck,
    pub dual_point_graph: SrgCheck,
    pub feasible: bool,
    pub reason: Option<String>,
}

pub fn pentagon_feasibility(params: PentagonParams) -> Feasibility {
    let check = |p: PentagonParams| srg_multiplicities(p.v(), p.k(), p.lambda(), p.mu());
    let point_graph = check(params);
    let dual_point_graph = check(params.dual());
    let reason = match (point_graph.integral, dual_point_graph.integral) {
        (true, true) => None,
        (false, _) => Some(format!(
            "point graph multiplicities {} and {}",
            point_graph.multiplicities[0], point_graph.multiplicities[1]
        )),
        (true, false) => Some(format!(
            "dual point graph multiplicities {} and {}",
            dual_point_graph.multiplicities[0], dual_point_graph.multiplicities[1]
        )),
    };
    Feasibility {
        params,
        point_graph,
        dual_point_graph,
        feasible: reason.is_none(),
        reason,
    }
}

/// Every (s, t) with both in `range`.
pub fn feasibility_sweep(range: std::ops::RangeInclusive<i64>) -> Vec<Feasibility> {
    range
        .clone()
        .flat_map(|s| range.clone().map(move |t| pentagon_feasibility(PentagonParams::new(s, t))))
        .collect()
}

/// Plain-text table: s, t, multiplicities of both graphs, verdict.
pub fn sweep_table(rows: &[Feasibility]) -> String {
    let mut out = String::from("s\tt\tpoint graph\tdual point graph\tverdict\n");
    for r in rows {
        let m = |c: &SrgCheck| format!("{}, {}", c.multiplicities[0], c.multiplicities[1]);
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            r.params.s,
            r.params.t,
            m(&r.point_graph),
            m(&r.dual_point_graph),
            if r.feasible { "feasible" } else { "infeasible" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn petersen_graph_multiplicities() {
        let c = srg_multiplicities(10, 3, 0, 1);
        assert!(c.integral);
        assert_eq!(c.multiplicities[0].rational, Ratio::from_integer(5));
        assert_eq!(c.multiplicities[1].rational, Ratio::from_integer(4));
    }

    #[test]
    fn ordinary_pentagon_is_a_conference_graph() {
        let f = pentagon_feasibility(PentagonParams::new(1, 1));
        assert_eq!(f.point_graph.v, 5);
        assert!(f.feasible);
        assert_eq!(f.point_graph.multiplicities[0].rational, Ratio::from_integer(2));
    }
}
