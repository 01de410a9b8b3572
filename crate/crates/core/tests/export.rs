use connotation::encoder::config::{Mode, ModelConfig};
use connotation::encoder::train::{export_embeddings, trained_aspects, TrainedModel};
use connotation::eval::space::{EmbeddingSpace, SpaceTag};
use connotation::synthetic::planted_lexicon;

#[test]
fn exported_vectors_are_unit_and_keyed_by_pos() {
    let data = planted_lexicon(30, 8, 2);
    let cfg = ModelConfig { hidden: 4, ..ModelConfig::default() };
    let aspects = trained_aspects(&data);
    let model = TrainedModel::init(&cfg, 8, &aspects).unwrap();
    let inputs: Vec<_> = data.iter().map(|e| e.input.clone()).collect();
    let emb = export_embeddings(&model, &inputs).unwrap();
    assert_eq!(emb.len(), data.len());
    assert_eq!(emb.dim(), 8);
    for (_, v) in emb.iter() {
        let n: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((n - 1.0).abs() < 1e-6, "{n}");
    }
    let space = EmbeddingSpace::from_keyed(&emb, SpaceTag::Connotation).unwrap();
    assert_eq!(space.len(), data.len());

    let sep = TrainedModel::init(&ModelConfig { mode: Mode::Separate, ..cfg }, 8, &aspects).unwrap();
    assert!(export_embeddings(&sep, &inputs).is_err());
}
