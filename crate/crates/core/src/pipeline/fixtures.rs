//! Data bundled with the crate.
//!
//! * the published per-person feature table with outcomes and step counts;
//! * the published sequence metadata (frame ranges, direction, outcome),
//!   without landmarks;
//! * a synthetic three-person document with full landmarks, generated by
//!   [`crate::synth::demo_scene`] with seed [`SYNTHETIC_SEED`].

use super::{parse_annotations, AnnotationDocument, FeatureTable};

pub const PUBLISHED_FEATURES_CSV: &str = include_str!("../../fixtures/published_features.csv");
pub const PUBLISHED_SEQUENCES_JSON: &str = include_str!("../../fixtures/published_sequences.json");
pub const SYNTHETIC_WALKS_JSON: &str = include_str!("../../fixtures/synthetic_walks.json");

pub const SYNTHETIC_SEED: u64 = 7;

pub fn load_feature_fixture() -> FeatureTable {
    FeatureTable::read_csv(PUBLISHED_FEATURES_CSV.as_bytes())
        .expect("bundled feature table is valid")
}

pub fn published_sequences() -> AnnotationDocument {
    parse_annotations(PUBLISHED_SEQUENCES_JSON.as_bytes()).expect("bundled sequences are valid")
}

pub fn synthetic_walks() -> AnnotationDocument {
    parse_annotations(SYNTHETIC_WALKS_JSON.as_bytes()).expect("bundled synthetic walks are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gait::Outcome;
    use crate::pipeline::emit_annotations;
    use crate::synth;
    use rand::SeedableRng;

    #[test]
    fn feature_table_rows() {
        let t = load_feature_fixture();
        assert_eq!(t.len(), 14);
        let r1 = t.get(1).unwrap();
        assert_eq!(
            (r1.stride_length, r1.head_range, r1.outcome),
            (85.2, 7.6, Outcome::Fall)
        );
        let r5 = t.get(5).unwrap();
        assert_eq!(
            (r5.stride_length, r5.head_range, r5.outcome),
            (36.2, 2.1, Outcome::Fall)
        );
        let r7 = t.get(7).unwrap();
        assert_eq!(
            (r7.stride_length, r7.head_range, r7.outcome),
            (130.2, 7.1, Outcome::NoFall)
        );
        let r12 = t.get(12).unwrap();
        assert_eq!(
            (r12.stride_length, r12.head_range, r12.outcome),
            (101.1, 1.7, Outcome::Fall)
        );
        let falls = t.rows().iter().filter(|r| r.outcome.is_fall()).count();
        assert_eq!((falls, t.len() - falls), (6, 8));
    }

    #[test]
    fn sequence_metadata() {
        let doc = published_sequences();
        assert_eq!(doc.sequences.len(), 14);
        assert_eq!(doc.sequences[0].start_frame, 1);
        assert_eq!(doc.sequences[1].start_frame, 351);
        assert_eq!(doc.sequences[2].start_frame, 1063);
        assert_eq!(doc.sequences[13].start_frame, 4080);
        let outcomes: String = doc
            .sequences
            .iter()
            .map(|s| if s.outcome.is_fall() { 'F' } else { 'N' })
            .collect();
        assert_eq!(outcomes, "FFNFFNNNFNNFNN");
        let table = load_feature_fixture();
        for s in &doc.sequences {
            let row = table.get(s.person_id).unwrap();
            assert_eq!(row.outcome, s.outcome);
            assert_eq!(Some(row.stride_count), s.steps_before_obstacle);
        }
    }

    #[test]
    fn synthetic_fixture_matches_generator() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SYNTHETIC_SEED);
        let scene = synth::demo_scene(&mut rng);
        let text = emit_annotations(&scene.document);
        if std::env::var_os("GAITSCOPE_BLESS").is_some() {
            let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic_walks.json");
            std::fs::write(path, &text).unwrap();
        }
        assert_eq!(synthetic_walks(), scene.document);
        assert_eq!(text, SYNTHETIC_WALKS_JSON);
    }
}
