//! Deciding membership in a fixed set from three order bits.

use super::perm::Permutation;
use crate::error::{Error, Result};

/// For `C ⊆ V` returns `π(C)π(V−C)`, `π*(C)π(V−C)` and `π(C)π*(V−C)`, where
/// `π` lists `V` by increasing id.
pub fn set_membership_build(domain: &[usize], set: &[usize]) -> Result<[Permutation; 3]> {
    let base = {
        let mut v = domain.to_vec();
        v.sort_unstable();
        Permutation::new(v)?
    };
    for &c in set {
        if !base.contains(c) {
            return Err(Error::NotASubset(c));
        }
    }
    let inside = base.project(set);
    let outside = base.filter(|z| !inside.contains(z));
    Ok([
        inside.concat(&outside)?,
        inside.reverse().concat(&outside)?,
        inside.concat(&outside.reverse())?,
    ])
}

/// Recovers `(x ∈ C, y ∈ C)` from the bits of a pair `x != y`.
///
/// Equal bits mean the pair is split by `C`, and the first bit tells which
/// side `x` is on. Only the middle permutation disagreeing means both are in
/// `C`; only the last disagreeing means both are outside.
pub fn set_membership_decode(bits: [bool; 3]) -> Result<(bool, bool)> {
    let [b1, b2, b3] = bits;
    if b1 == b2 && b2 == b3 {
        Ok((b1, !b1))
    } else if b1 == b3 {
        Ok((true, true))
    } else if b1 == b2 {
        Ok((false, false))
    } else {
        Err(Error::ImpossiblePattern(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(perms: &[Permutation; 3], x: usize, y: usize) -> [bool; 3] {
        [perms[0].before(x, y), perms[1].before(x, y), perms[2].before(x, y)]
    }

    #[test]
    fn worked_example() {
        let v = [1, 2, 3, 4, 5];
        let perms = set_membership_build(&v, &[2, 4]).unwrap();
        assert_eq!(perms[0].as_slice(), &[2, 4, 1, 3, 5]);
        assert_eq!(perms[1].as_slice(), &[4, 2, 1, 3, 5]);
        assert_eq!(perms[2].as_slice(), &[2, 4, 5, 3, 1]);
        assert_eq!(bits(&perms, 2, 4), [true, false, true]);
        assert_eq!(set_membership_decode(bits(&perms, 2, 4)).unwrap(), (true, true));
        assert_eq!(bits(&perms, 1, 3), [true, true, false]);
        assert_eq!(set_membership_decode(bits(&perms, 1, 3)).unwrap(), (false, false));
        assert_eq!(set_membership_decode([true, true, true]).unwrap(), (true, false));
        assert!(matches!(
            set_membership_decode([true, false, false]),
            Err(Error::ImpossiblePattern(_))
        ));
    }

    #[test]
    fn degenerate_sets() {
        let v = [0, 1, 2, 3];
        let empty = set_membership_build(&v, &[]).unwrap();
        let full = set_membership_build(&v, &v).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    assert_eq!(set_membership_decode(bits(&empty, x, y)).unwrap(), (false, false));
                    assert_eq!(set_membership_decode(bits(&full, x, y)).unwrap(), (true, true));
                }
            }
        }
        assert!(matches!(set_membership_build(&v, &[7]), Err(Error::NotASubset(7))));
    }
}
