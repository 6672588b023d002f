use sigman::graphembed::{self, EmbedOptions, WeightedGraph};
use sigman::mesh::{PolylinePath, TriMesh};
use sigman::{ConfigPath, ManifoldSpec};

// Unit square with both diagonals: ratios 1, 1, 1, 1, sqrt 2, sqrt 2.
const K4_PLANAR_FLOOR: f64 = 0.17662350913715658;

#[test]
fn k4_planar_floor_is_the_square() {
    let g = WeightedGraph::complete(4).unwrap();
    let plane = ManifoldSpec::Euclidean { dim: 2 };
    let mut objectives = Vec::new();
    for seed in 0..4 {
        let opts = EmbedOptions { seed, restarts: 20, ..EmbedOptions::default() };
        let r = graphembed::minimize_ratio_variance(&g, &plane, &opts).unwrap();
        assert!((r.objective - K4_PLANAR_FLOOR).abs() < 1e-6, "seed {seed}: {}", r.objective);
        objectives.extend(r.restart_objectives.iter().copied().filter(|o| o.is_finite()));
    }
    let best = objectives.iter().copied().fold(f64::INFINITY, f64::min);
    let near = objectives.iter().filter(|&&o| o <= best * 1.1).count();
    assert!(near * 2 >= objectives.len(), "only {near} of {} restarts within 10% of the floor", objectives.len());
}

#[test]
fn json_round_trips() {
    let graph = r#"{"n":3,"edges":[[0,1,1.0],[1,2,2.0],[0,2,1.5]]}"#;
    let g: WeightedGraph = serde_json::from_str(graph).unwrap();
    let back: WeightedGraph = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
    assert_eq!(g.edges(), back.edges());

    let path = r#"{"manifold":{"kind":"euclidean","dim":2},"params":[0,1],"samples":[[0,0],[1,1]]}"#;
    let p: PolylinePath = serde_json::from_str(path).unwrap();
    let back: PolylinePath = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(p.params(), back.params());

    let mesh = r#"{"manifold":{"kind":"euclidean","dim":2},"vertices":[[0,0],[1,0],[0,1]],"faces":[[0,1,2]],"sources":[0]}"#;
    let m: TriMesh = serde_json::from_str(mesh).unwrap();
    let back: TriMesh = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(m.sources(), back.sources());

    let config = r#"{"manifold":{"kind":"euclidean","dim":2},"n":2,"params":[0,1],"configs":[[[0,0],[1,0]],[[0,1],[1,1]]]}"#;
    let c: ConfigPath = serde_json::from_str(config).unwrap();
    let back: ConfigPath = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(c.particles(), back.particles());
}

#[test]
fn invalid_inputs_are_rejected() {
    for bad in [
        r#"{"n":2,"edges":[[0,0,1.0]]}"#,
        r#"{"n":3,"edges":[[0,1,1.0]]}"#,
        r#"{"n":2,"edges":[[0,1,-1.0]]}"#,
        r#"{"n":2,"edges":[[0,1,1.0],[1,0,1.0]]}"#,
    ] {
        assert!(serde_json::from_str::<WeightedGraph>(bad).is_err(), "{bad}");
    }
    let crossing = r#"{"manifold":{"kind":"euclidean","dim":1},"n":2,"params":[0,1],"configs":[[[0],[1]],[[1],[0]]]}"#;
    assert!(serde_json::from_str::<ConfigPath>(crossing).is_err());
}
