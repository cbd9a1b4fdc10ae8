use mvlab::PartitionScheme;
use proptest::prelude::*;

fn scheme() -> impl Strategy<Value = PartitionScheme> {
    prop_oneof![Just(PartitionScheme::Dyadic), Just(PartitionScheme::Cantor)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn decode_then_encode_is_identity(s in scheme(), n in 1u64..) {
        let b = s.decode(n).unwrap();
        prop_assert!(b.block >= 1 && b.position >= 1);
        prop_assert_eq!(s.encode(b.block, b.position).unwrap(), n);
    }

    #[test]
    fn encode_then_decode_is_identity(s in scheme(), block in 1u64..40, position in 1u64..1_000_000) {
        let n = s.encode(block, position).unwrap();
        let b = s.decode(n).unwrap();
        prop_assert_eq!((b.block, b.position), (block, position));
    }

    #[test]
    fn blocks_are_increasing(s in scheme(), block in 1u64..30, position in 1u64..100_000) {
        prop_assert!(s.encode(block, position + 1).unwrap() > s.encode(block, position).unwrap());
    }
}

#[test]
fn blocks_cover_an_initial_segment_exactly_once() {
    const N: u64 = 20_000;
    for s in PartitionScheme::ALL {
        let mut hits = vec![0u8; N as usize + 1];
        for block in 1.. {
            let members: Vec<u64> = s.block_members(block).take_while(|&n| n <= N).collect();
            if members.is_empty() {
                break;
            }
            for n in members {
                hits[n as usize] += 1;
            }
        }
        assert!(hits[1..].iter().all(|&h| h == 1), "{s}");
    }
}
