//! Flow-based pairwise spanner ILP.
//!
//! For each unordered pair (u, v) with u < v in the vertex order, a unit of
//! flow is routed from u to v over the bidirected edge set; a budget row caps
//! the routed length at f(d_G(u,v)), out-degree rows keep the route simple,
//! and linking rows charge used arcs to the undirected edge variables being
//! minimized.

use crate::distortion::DistortionFn;
use crate::graph::Graph;
use crate::oracle::{OracleError, PairSet};
use crate::shortest::apsp;
use crate::weight::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSense {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
pub struct IlpConstraint {
    pub name: String,
    /// (coefficient, variable index) pairs, emitted in the stored order.
    pub terms: Vec<(Weight, usize)>,
    pub sense: ConstraintSense,
    pub rhs: Weight,
}

/// The assembled model. All variables are binary; the objective minimizes
/// Σ w(e)·x_e over the undirected edge variables.
#[derive(Debug, Clone)]
pub struct IlpModel {
    pub variable_names: Vec<String>,
    pub objective: Vec<(Weight, usize)>,
    pub budget: Vec<IlpConstraint>,
    pub flow: Vec<IlpConstraint>,
    pub out_degree: Vec<IlpConstraint>,
    pub link: Vec<IlpConstraint>,
}

impl IlpModel {
    pub fn variable_count(&self) -> usize {
        self.variable_names.len()
    }

    pub fn constraint_count(&self) -> usize {
        self.budget.len() + self.flow.len() + self.out_degree.len() + self.link.len()
    }

    pub fn constraints(&self) -> impl Iterator<Item = &IlpConstraint> {
        self.budget
            .iter()
            .chain(self.flow.iter())
            .chain(self.out_degree.iter())
            .chain(self.link.iter())
    }
}

/// Index of the arc variable x^{uv}_{(i,j)}.
///
/// Layout: the |E| edge variables first, then per pair, per edge, the forward
/// arc (lower dense endpoint to higher) followed by the reverse arc.
fn arc_var(edge_count: usize, pair_idx: usize, edge_id: usize, reverse: bool) -> usize {
    edge_count + pair_idx * 2 * edge_count + 2 * edge_id + usize::from(reverse)
}

pub fn build_ilp(g: &Graph, pairs: &PairSet, f: &DistortionFn) -> Result<IlpModel, OracleError> {
    if pairs.is_empty() {
        return Err(OracleError::EmptyPairs);
    }
    g.ensure_connected()?;
    let table = apsp(g)?;
    let m = g.edge_count();
    let n = g.vertex_count();

    let mut variable_names = Vec::with_capacity(m + 2 * m * pairs.len());
    for eid in 0..m {
        variable_names.push(format!("x_e_{eid}"));
    }
    for &(pu, pv) in pairs.iter() {
        let (u_id, v_id) = (g.id_of(pu), g.id_of(pv));
        for eid in 0..m {
            let e = g.edge(eid);
            let (a, b) = (g.id_of(e.u), g.id_of(e.v));
            variable_names.push(format!("xp_{u_id}_{v_id}_{a}_{b}"));
            variable_names.push(format!("xp_{u_id}_{v_id}_{b}_{a}"));
        }
    }

    let objective: Vec<(Weight, usize)> =
        (0..m).map(|eid| (*g.edge_weight(eid), eid)).collect();

    let mut budget = Vec::with_capacity(pairs.len());
    let mut flow = Vec::with_capacity(pairs.len() * n);
    let mut out_degree = Vec::with_capacity(pairs.len() * n);
    let mut link = Vec::with_capacity(pairs.len() * m);

    for (p, &(pu, pv)) in pairs.iter().enumerate() {
        let (u_id, v_id) = (g.id_of(pu), g.id_of(pv));
        // Budget: the selected u-v route is no longer than f(d_G(u,v)).
        let rhs = f.eval(table.dist(pu, pv))?;
        let mut terms = Vec::with_capacity(2 * m);
        for eid in 0..m {
            terms.push((*g.edge_weight(eid), arc_var(m, p, eid, false)));
            terms.push((*g.edge_weight(eid), arc_var(m, p, eid, true)));
        }
        budget.push(IlpConstraint {
            name: format!("budget_{u_id}_{v_id}"),
            terms,
            sense: ConstraintSense::Le,
            rhs,
        });

        for i in 0..n {
            let i_id = g.id_of(i);
            let mut flow_terms = Vec::new();
            let mut out_terms = Vec::new();
            for &(j, eid) in g.neighbors(i) {
                let e = g.edge(eid);
                // Forward arc runs from the lower dense endpoint.
                let outgoing = arc_var(m, p, eid, e.u != i);
                let incoming = arc_var(m, p, eid, e.u != j);
                flow_terms.push((Weight::from_integer(1), outgoing));
                flow_terms.push((Weight::from_integer(-1), incoming));
                out_terms.push((Weight::from_integer(1), outgoing));
            }
            let rhs = if i == pu {
                Weight::from_integer(1)
            } else if i == pv {
                Weight::from_integer(-1)
            } else {
                Weight::from_integer(0)
            };
            flow.push(IlpConstraint {
                name: format!("flow_{u_id}_{v_id}_{i_id}"),
                terms: flow_terms,
                sense: ConstraintSense::Eq,
                rhs,
            });
            out_degree.push(IlpConstraint {
                name: format!("outdeg_{u_id}_{v_id}_{i_id}"),
                terms: out_terms,
                sense: ConstraintSense::Le,
                rhs: Weight::from_integer(1),
            });
        }

        // Linking: an arc may be used only if its undirected edge is bought.
        for eid in 0..m {
            link.push(IlpConstraint {
                name: format!("link_{u_id}_{v_id}_e{eid}"),
                terms: vec![
                    (Weight::from_integer(1), arc_var(m, p, eid, false)),
                    (Weight::from_integer(1), arc_var(m, p, eid, true)),
                    (Weight::from_integer(-1), eid),
                ],
                sense: ConstraintSense::Le,
                rhs: Weight::from_integer(0),
            });
        }
    }

    Ok(IlpModel { variable_names, objective, budget, flow, out_degree, link })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn tri_single_pair_has_nine_variables() {
        let g = tri();
        let pairs = PairSet::from_ids(&g, &[(0, 2)]).unwrap();
        let model = build_ilp(&g, &pairs, &DistortionFn::identity()).unwrap();
        // |E| + 2|E||P| = 3 + 2*3*1
        assert_eq!(model.variable_count(), 9);
        assert_eq!(model.budget.len(), 1);
        assert_eq!(model.flow.len(), 3);
        assert_eq!(model.out_degree.len(), 3);
        assert_eq!(model.link.len(), 3);
    }

    #[test]
    fn path3_all_pairs_has_fourteen_variables() {
        let g = path3();
        let pairs = PairSet::all_pairs(&g);
        let model = build_ilp(&g, &pairs, &DistortionFn::identity()).unwrap();
        // 2*2*3 + 2
        assert_eq!(model.variable_count(), 14);
    }

    #[test]
    fn empty_pair_set_is_rejected() {
        let g = tri();
        let pairs = PairSet::from_ids(&g, &[]).unwrap();
        assert!(matches!(
            build_ilp(&g, &pairs, &DistortionFn::identity()),
            Err(OracleError::EmptyPairs)
        ));
    }

    #[test]
    fn counts_match_closed_forms_on_random_instances() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..20 {
            let n: u32 = rng.gen_range(4..9);
            let mut g = Graph::new(0..n);
            for v in 1..n {
                let u = rng.gen_range(0..v);
                g.add_edge(u, v, Weight::from_integer(rng.gen_range(1..6))).unwrap();
            }
            for _ in 0..4 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    let _ = g.add_edge(u, v, Weight::from_integer(rng.gen_range(1..6)));
                }
            }
            let mut raw = Vec::new();
            for _ in 0..rng.gen_range(1..5) {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v {
                    raw.push((u, v));
                }
            }
            if raw.is_empty() {
                raw.push((0, 1));
            }
            let pairs = PairSet::from_ids(&g, &raw).unwrap();
            let model = build_ilp(&g, &pairs, &DistortionFn::identity()).unwrap();
            let (m, p, nn) = (g.edge_count(), pairs.len(), g.vertex_count());
            assert_eq!(model.variable_count(), m + 2 * m * p);
            assert_eq!(model.budget.len(), p);
            assert_eq!(model.flow.len(), p * nn);
            assert_eq!(model.out_degree.len(), p * nn);
            assert_eq!(model.link.len(), p * m);
            assert_eq!(model.constraint_count(), p * (1 + 2 * nn + m));
        }
    }
}
