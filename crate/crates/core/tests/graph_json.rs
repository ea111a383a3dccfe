use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;
use semifb::gen::{random_graph, GraphShape};
use semifb::graph::{ComputationGraph, GraphDoc, GraphError};

fn parse(text: &str) -> Result<ComputationGraph, GraphError> {
    serde_json::from_str::<GraphDoc>(text).unwrap().to_graph()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn json_round_trip(seed in any::<u64>()) {
        let g = random_graph(&mut StdRng::seed_from_u64(seed), GraphShape::default());
        let text = serde_json::to_string(&g.to_doc()).unwrap();
        let back = parse(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(serde_json::to_string(&back.to_doc()).unwrap(), text);
    }
}

#[test]
fn malformed_graphs() {
    let cyclic = r#"{"nodes": [{"id": 0}, {"id": 1, "op": "add"}, {"id": 2, "op": "add"}],
        "arcs": [{"id": 0, "tail": 0, "head": 1}, {"id": 1, "tail": 1, "head": 2}, {"id": 2, "tail": 2, "head": 1}]}"#;
    assert!(matches!(parse(cyclic), Err(GraphError::CycleDetected)));

    let untagged = r#"{"nodes": [{"id": 0}, {"id": 1}],
        "arcs": [{"id": 0, "tail": 0, "head": 1}]}"#;
    assert!(matches!(parse(untagged), Err(GraphError::MissingOpTag(_))));

    let tagged_source = r#"{"nodes": [{"id": 0, "op": "mul"}], "arcs": []}"#;
    assert!(matches!(
        parse(tagged_source),
        Err(GraphError::OpOnSource(_))
    ));

    let dangling = r#"{"nodes": [{"id": 0}, {"id": 1, "op": "add"}],
        "arcs": [{"id": 0, "tail": 5, "head": 1}]}"#;
    assert!(matches!(
        parse(dangling),
        Err(GraphError::UnknownEndpoint { .. })
    ));

    let bad_order = r#"{"nodes": [{"id": 0}, {"id": 1}, {"id": 2, "op": "add"}],
        "arcs": [{"id": 0, "tail": 0, "head": 2}, {"id": 1, "tail": 1, "head": 2}],
        "source_order": [0]}"#;
    assert!(matches!(
        parse(bad_order),
        Err(GraphError::BadSourceOrder(_))
    ));
}
