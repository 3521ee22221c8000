use std::collections::BTreeSet;

use batchsim::codec::{BatchId, CodecConfig};
use batchsim::model::EventTypeId;
use proptest::prelude::*;

fn ty(v: u32) -> EventTypeId {
    EventTypeId::new(v).unwrap()
}

/// All sequences over `1..=types` with lengths `1..=n`.
fn all_sequences(types: u32, n: u32) -> Vec<Vec<EventTypeId>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<EventTypeId>> = vec![Vec::new()];
    for _ in 0..n {
        layer = layer
            .iter()
            .flat_map(|prefix| {
                (1..=types).map(move |t| {
                    let mut next = prefix.clone();
                    next.push(ty(t));
                    next
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

#[test]
fn roundtrip_for_every_sequence() {
    for types in 1..=4 {
        for n in 1..=4 {
            let cfg = CodecConfig::new(types, n).unwrap();
            for seq in all_sequences(types, n) {
                let id = cfg.encode(&seq).unwrap();
                assert!(id.0 >= 1 && id.0 <= cfg.total_batch_count());
                assert_eq!(cfg.decode(id).unwrap(), seq, "types={types} n={n}");
            }
        }
    }
}

#[test]
fn contraction_holds_for_every_id() {
    for types in 1..=4 {
        for n in 1..=4 {
            let cfg = CodecConfig::new(types, n).unwrap();
            for raw in 0..=cfg.total_batch_count() {
                let id = BatchId(raw);
                let decoded = cfg.decode(id).unwrap();
                assert!(decoded.len() <= n as usize);
                let back = cfg.encode(&decoded).unwrap();
                assert!(back <= id);
                let reachable = cfg.is_reachable(id).unwrap();
                assert_eq!(back == id, reachable || raw == 0, "types={types} n={n} id={raw}");
            }
        }
    }
}

#[test]
fn reachable_ids_are_exactly_the_encoded_sequences() {
    for types in 1..=4 {
        for n in 1..=4 {
            let cfg = CodecConfig::new(types, n).unwrap();
            let encoded: BTreeSet<u64> =
                all_sequences(types, n).iter().map(|s| cfg.encode(s).unwrap().0).collect();
            let reachable: BTreeSet<u64> = (0..=cfg.total_batch_count())
                .filter(|&id| cfg.is_reachable(BatchId(id)).unwrap())
                .collect();
            assert_eq!(encoded, reachable);
            assert_eq!(reachable.len() as u64, cfg.reachable_batch_count());
            assert_eq!(
                reachable.len() as u64,
                cfg.total_batch_count() - cfg.redundant_batch_count().redundant
            );
        }
    }
}

#[test]
fn worked_id_space_for_two_types() {
    // Words over {nu, a, b} of length <= 2 map onto ids 0..=12; the six
    // nu-free ones are a, b, aa, ba, ab, bb.
    let cfg = CodecConfig::new(2, 2).unwrap();
    let reachable: Vec<u64> =
        (0..=12).filter(|&id| cfg.is_reachable(BatchId(id)).unwrap()).collect();
    assert_eq!(reachable, vec![1, 2, 4, 5, 7, 8]);
}

proptest! {
    #[test]
    fn encode_is_injective(
        types in 1u32..=6,
        a in prop::collection::vec(1u32..=6, 0..=5),
        b in prop::collection::vec(1u32..=6, 0..=5),
    ) {
        let cfg = CodecConfig::new(types, 5).unwrap();
        let a: Vec<_> = a.into_iter().map(|t| ty((t - 1) % types + 1)).collect();
        let b: Vec<_> = b.into_iter().map(|t| ty((t - 1) % types + 1)).collect();
        let (ea, eb) = (cfg.encode(&a).unwrap(), cfg.encode(&b).unwrap());
        prop_assert_eq!(ea == eb, a == b);
    }

    #[test]
    fn decode_never_grows_the_id(types in 1u32..=9, n in 1u32..=7, frac in 0.0f64..=1.0) {
        let cfg = CodecConfig::new(types, n).unwrap();
        let id = BatchId((cfg.total_batch_count() as f64 * frac) as u64);
        let decoded = cfg.decode(id).unwrap();
        prop_assert!(decoded.len() <= n as usize);
        prop_assert!(cfg.encode(&decoded).unwrap() <= id);
    }
}
