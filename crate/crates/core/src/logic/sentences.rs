//! Named sentences: subclass definitions and the events used in experiments.

use super::formula::{var, Formula};

/// Every edge has exactly two members.
pub fn phi_multigraph() -> Formula {
    Formula::forall("e", Formula::IsEdge(var("e")).implies(Formula::Size(var("e"), 2)))
}

/// A multigraph in which no two distinct edges share two distinct vertices.
pub fn phi_graph() -> Formula {
    let second = Formula::exists(
        "e2",
        Formula::And(vec![Formula::is_in("u", "e2"), Formula::is_in("w", "e2"), Formula::ne("e1", "e2")]),
    );
    let shared = Formula::exists(
        "e1",
        Formula::exists(
            "u",
            Formula::And(vec![
                Formula::is_in("u", "e1"),
                Formula::exists(
                    "w",
                    Formula::And(vec![Formula::is_in("w", "e1"), Formula::ne("u", "w"), second]),
                ),
            ]),
        ),
    );
    Formula::And(vec![phi_multigraph(), shared.not()])
}

/// No two distinct edges have the same members.
pub fn phi_hypergraph() -> Formula {
    double_hyperedge().not()
}

/// Two distinct edges with the same member set. The first quantified member
/// guards the search for the second edge.
pub fn double_hyperedge() -> Formula {
    let same_members = Formula::And(vec![
        Formula::forall("w", Formula::is_in("w", "e1").implies(Formula::is_in("w", "e2"))),
        Formula::forall("w", Formula::is_in("w", "e2").implies(Formula::is_in("w", "e1"))),
    ]);
    Formula::exists(
        "e1",
        Formula::exists(
            "u",
            Formula::And(vec![
                Formula::is_in("u", "e1"),
                Formula::exists(
                    "e2",
                    Formula::And(vec![Formula::is_in("u", "e2"), Formula::ne("e1", "e2"), same_members]),
                ),
            ]),
        ),
    )
}

/// The literal form of [`double_hyperedge`], quantifying both edges first.
pub fn double_hyperedge_unguarded() -> Formula {
    Formula::exists_all(
        &["e1", "e2"],
        Formula::And(vec![
            Formula::IsEdge(var("e1")),
            Formula::IsEdge(var("e2")),
            Formula::ne("e1", "e2"),
            Formula::forall(
                "w",
                Formula::And(vec![
                    Formula::is_in("w", "e1").implies(Formula::is_in("w", "e2")),
                    Formula::is_in("w", "e2").implies(Formula::is_in("w", "e1")),
                ]),
            ),
        ]),
    )
}

pub fn isolated_vertex() -> Formula {
    Formula::exists("x", Formula::And(vec![Formula::IsVertex(var("x")), Formula::Deg(var("x"), 0)]))
}

pub fn tautology() -> Formula {
    Formula::forall("x", Formula::eq("x", "x"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::tests::{arb_fragment, double_edge_and_triangle};
    use crate::incidence::IncidenceGraph;
    use crate::logic::eval::evaluate;
    use proptest::prelude::*;

    #[test]
    fn small_hypergraph_is_neither_graph_nor_hypergraph() {
        let g = double_edge_and_triangle().to_incidence();
        assert!(!evaluate(&phi_multigraph(), &g).unwrap());
        assert!(!evaluate(&phi_graph(), &g).unwrap());
        assert!(!evaluate(&phi_hypergraph(), &g).unwrap());
        assert!(evaluate(&double_hyperedge(), &g).unwrap());
    }

    #[test]
    fn subclass_examples() {
        // Path v0 - v1 - v2 as a graph.
        let path = IncidenceGraph::new(3, 2, [(0, 0), (1, 0), (1, 1), (2, 1)]).unwrap();
        assert!(evaluate(&phi_graph(), &path).unwrap());
        assert!(evaluate(&phi_hypergraph(), &path).unwrap());
        let tri = IncidenceGraph::new(3, 1, [(0, 0), (1, 0), (2, 0)]).unwrap();
        assert!(!evaluate(&phi_multigraph(), &tri).unwrap());
        assert!(evaluate(&phi_hypergraph(), &tri).unwrap());
        assert!(evaluate(&isolated_vertex(), &IncidenceGraph::empty(1)).unwrap());
        assert!(!evaluate(&isolated_vertex(), &tri).unwrap());
        assert!(evaluate(&tautology(), &IncidenceGraph::empty(0)).unwrap());
    }

    proptest! {
        #[test]
        fn subclass_sentences_match_structure(g in arb_fragment(5, 4, 10)) {
            let sets: Vec<Vec<usize>> = (0..g.n_e())
                .map(|e| g.e_neighbors(e).iter().map(|p| p.0).collect())
                .collect();
            let nonempty: Vec<&Vec<usize>> = sets.iter().filter(|s| !s.is_empty()).collect();
            let duplicate = nonempty.iter().enumerate().any(|(i, a)| nonempty[i + 1..].contains(a));
            prop_assert_eq!(evaluate(&double_hyperedge(), &g).unwrap(), duplicate);
            prop_assert_eq!(evaluate(&double_hyperedge_unguarded(), &g).unwrap(), duplicate);
            let multigraph = nonempty.iter().all(|s| s.len() == 2);
            prop_assert_eq!(evaluate(&phi_multigraph(), &g).unwrap(), multigraph);
            prop_assert_eq!(evaluate(&phi_graph(), &g).unwrap(), multigraph && !duplicate);
        }
    }
}
