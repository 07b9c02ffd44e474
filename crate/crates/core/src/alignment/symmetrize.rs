use alloc::vec;

use super::{AlignError, AlignmentLinks};

const NEIGHBORS: [(isize, isize); 8] = [
    (-1, 0),
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, -1),
    (-1, 1),
    (1, -1),
    (1, 1),
];

/// grow-diag-final-and.
///
/// Start from the intersection, repeatedly add union links adjacent
/// (including diagonally) to an existing link when either of their words is
/// still unaligned, then add links of `fwd` and then of `rev` whose source and
/// target words are both unaligned.
pub fn symmetrize(fwd: &AlignmentLinks, rev: &AlignmentLinks) -> Result<AlignmentLinks, AlignError> {
    let dims = (fwd.src_len(), fwd.tgt_len());
    if dims != (rev.src_len(), rev.tgt_len()) {
        return Err(AlignError::DimensionMismatch {
            left: dims,
            right: (rev.src_len(), rev.tgt_len()),
        });
    }
    let (n, m) = dims;
    let mut out = AlignmentLinks::new(n, m);
    let mut src_aligned = vec![false; n + 1];
    let mut tgt_aligned = vec![false; m + 1];
    let add = |out: &mut AlignmentLinks, src: &mut [bool], tgt: &mut [bool], i: usize, j: usize| {
        out.insert(i, j).expect("links share dimensions");
        src[i] = true;
        tgt[j] = true;
    };

    for (i, j) in fwd.iter().filter(|&(i, j)| rev.contains(i, j)) {
        add(&mut out, &mut src_aligned, &mut tgt_aligned, i, j);
    }

    let in_union = |i: usize, j: usize| fwd.contains(i, j) || rev.contains(i, j);
    loop {
        let mut grew = false;
        for i in 1..=n {
            for j in 1..=m {
                if !out.contains(i, j) {
                    continue;
                }
                for (di, dj) in NEIGHBORS {
                    let (Some(ni), Some(nj)) = (i.checked_add_signed(di), j.checked_add_signed(dj)) else {
                        continue;
                    };
                    if ni == 0 || nj == 0 || ni > n || nj > m {
                        continue;
                    }
                    if (!src_aligned[ni] || !tgt_aligned[nj]) && in_union(ni, nj) && !out.contains(ni, nj) {
                        add(&mut out, &mut src_aligned, &mut tgt_aligned, ni, nj);
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }

    for side in [fwd, rev] {
        for i in 1..=n {
            for j in 1..=m {
                if !src_aligned[i] && !tgt_aligned[j] && side.contains(i, j) {
                    add(&mut out, &mut src_aligned, &mut tgt_aligned, i, j);
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn links(n: usize, m: usize, l: &[(usize, usize)]) -> AlignmentLinks {
        AlignmentLinks::from_links(n, m, l.iter().copied()).unwrap()
    }

    /// Step-by-step reference written against a plain boolean grid.
    fn reference(n: usize, m: usize, fwd: &[(usize, usize)], rev: &[(usize, usize)]) -> Vec<(usize, usize)> {
        let mut a = vec![vec![false; m]; n];
        let mut f = vec![vec![false; m]; n];
        let mut r = vec![vec![false; m]; n];
        for &(i, j) in fwd {
            f[i - 1][j - 1] = true;
        }
        for &(i, j) in rev {
            r[i - 1][j - 1] = true;
        }
        for i in 0..n {
            for j in 0..m {
                a[i][j] = f[i][j] && r[i][j];
            }
        }
        let src_al = |a: &Vec<Vec<bool>>, i: usize| a[i].iter().any(|&x| x);
        let tgt_al = |a: &Vec<Vec<bool>>, j: usize| (0..n).any(|k| a[k][j]);
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..n {
                for j in 0..m {
                    if !a[i][j] {
                        continue;
                    }
                    for (di, dj) in NEIGHBORS {
                        let ni = i as isize + di;
                        let nj = j as isize + dj;
                        if ni < 0 || nj < 0 || ni >= n as isize || nj >= m as isize {
                            continue;
                        }
                        let (ni, nj) = (ni as usize, nj as usize);
                        if (!src_al(&a, ni) || !tgt_al(&a, nj)) && (f[ni][nj] || r[ni][nj]) && !a[ni][nj] {
                            a[ni][nj] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        for grid in [&f, &r] {
            for i in 0..n {
                for j in 0..m {
                    if !src_al(&a, i) && !tgt_al(&a, j) && grid[i][j] {
                        a[i][j] = true;
                    }
                }
            }
        }
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..m {
                if a[i][j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    #[test]
    fn identical_inputs_are_unchanged() {
        let l = links(3, 3, &[(1, 1), (2, 3), (3, 2)]);
        assert_eq!(symmetrize(&l, &l).unwrap(), l);
    }

    #[test]
    fn disjoint_inputs_only_gain_from_final_step() {
        let fwd = links(4, 4, &[(1, 1), (3, 3)]);
        let rev = links(4, 4, &[(1, 3), (4, 1)]);
        let out = symmetrize(&fwd, &rev).unwrap();
        // (1,1) and (3,3) from fwd first; then rev's (1,3) has both words aligned and
        // (4,1) has target 1 aligned.
        assert_eq!(out.iter().collect::<Vec<_>>(), vec![(1, 1), (3, 3)]);
    }

    #[test]
    fn grows_along_the_diagonal() {
        let fwd = links(3, 3, &[(1, 1), (2, 2), (3, 3)]);
        let rev = links(3, 3, &[(1, 1)]);
        let out = symmetrize(&fwd, &rev).unwrap();
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn dimension_mismatch() {
        let a = AlignmentLinks::new(2, 3);
        let b = AlignmentLinks::new(3, 2);
        assert!(matches!(symmetrize(&a, &b), Err(AlignError::DimensionMismatch { .. })));
    }

    fn arb_links(n: usize, m: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
        prop::collection::btree_set((1..=n, 1..=m), 0..(n * m)).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn matches_reference_on_5x5((fwd, rev) in (arb_links(5, 5), arb_links(5, 5))) {
            let out = symmetrize(&links(5, 5, &fwd), &links(5, 5, &rev)).unwrap();
            prop_assert_eq!(out.iter().collect::<Vec<_>>(), reference(5, 5, &fwd, &rev));
        }

        #[test]
        fn bounded_by_intersection_and_union(
            (n, m) in (1usize..7, 1usize..7),
            seed in any::<u64>(),
        ) {
            let mut rng = seed;
            let mut next = || { rng ^= rng << 13; rng ^= rng >> 7; rng ^= rng << 17; rng };
            let mut f = Vec::new();
            let mut r = Vec::new();
            for i in 1..=n { for j in 1..=m {
                if next() % 3 == 0 { f.push((i, j)); }
                if next() % 3 == 0 { r.push((i, j)); }
            }}
            let (fl, rl) = (links(n, m, &f), links(n, m, &r));
            let out = symmetrize(&fl, &rl).unwrap();
            for (i, j) in out.iter() {
                prop_assert!(fl.contains(i, j) || rl.contains(i, j));
            }
            for (i, j) in fl.iter() {
                if rl.contains(i, j) { prop_assert!(out.contains(i, j)); }
            }
        }
    }
}
