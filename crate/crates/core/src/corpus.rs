//! The fourteen groups of order at most 8, one per isomorphism class.

use crate::group::Group;
use crate::perm::Perm;

/// S3 as permutations of {0,1,2}: 1, 2, 3 are transpositions, 4 and 5 are
/// the 3-cycles.
pub fn symmetric3() -> Group {
    let els: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
    let idx = |p: [usize; 3]| els.iter().position(|q| *q == p).expect("closed") as u32;
    let n = 6;
    let mut t = Vec::with_capacity(n * n);
    for x in &els {
        for y in &els {
            t.push(idx([y[x[0]], y[x[1]], y[x[2]]]));
        }
    }
    Group::from_table_unchecked(n, t)
}

/// Dihedral group of order 2n: index `s*n + r` stands for r^r s^s.
pub fn dihedral(n: usize) -> Group {
    let m = 2 * n;
    let mut t = Vec::with_capacity(m * m);
    for x in 0..m {
        let (r1, s1) = (x % n, x / n);
        for y in 0..m {
            let (r2, s2) = (y % n, y / n);
            let r = if s1 == 0 { (r1 + r2) % n } else { (r1 + n - r2) % n };
            let s = (s1 + s2) % 2;
            t.push((s * n + r) as u32);
        }
    }
    Group::from_table_unchecked(m, t)
}

/// Quaternion group: 0=1, 1=-1, 2=i, 3=-i, 4=j, 5=-j, 6=k, 7=-k.
pub fn quaternion() -> Group {
    // unit products: (unit, sign) for units 1,i,j,k = 0..4
    let unit = |a: usize, b: usize| -> (usize, bool) {
        match (a, b) {
            (0, x) | (x, 0) => (x, false),
            (x, y) if x == y => (0, true),
            (1, 2) => (3, false),
            (2, 3) => (1, false),
            (3, 1) => (2, false),
            (2, 1) => (3, true),
            (3, 2) => (1, true),
            (1, 3) => (2, true),
            _ => unreachable!(),
        }
    };
    let mut t = Vec::with_capacity(64);
    for x in 0..8 {
        for y in 0..8 {
            let (u, neg) = unit(x / 2, y / 2);
            let sign = (x % 2 == 1) ^ (y % 2 == 1) ^ neg;
            t.push((2 * u + sign as usize) as u32);
        }
    }
    Group::from_table_unchecked(8, t)
}

/// Symmetric group on n points, tabled from a transposition and an n-cycle.
pub fn symmetric(n: usize) -> Group {
    if n <= 1 {
        return Group::trivial();
    }
    let mut cyc: Vec<u32> = (1..n as u32).collect();
    cyc.push(0);
    let mut tr: Vec<u32> = (0..n as u32).collect();
    tr.swap(0, 1);
    let gens = [Perm::from_images_unchecked(tr), Perm::from_images_unchecked(cyc)];
    Group::from_perms(&gens).0
}

pub fn product(gs: &[Group]) -> Group {
    gs.iter().fold(Group::trivial(), |acc, g| Group::direct_product(&acc, g))
}

/// Named representatives of all groups of order ≤ 8, ordered by order.
pub fn small_groups() -> Vec<(&'static str, Group)> {
    let z = Group::cyclic;
    vec![
        ("Z1", Group::trivial()),
        ("Z2", z(2)),
        ("Z3", z(3)),
        ("Z4", z(4)),
        ("Z2xZ2", product(&[z(2), z(2)])),
        ("Z5", z(5)),
        ("Z6", z(6)),
        ("S3", symmetric3()),
        ("Z7", z(7)),
        ("Z8", z(8)),
        ("Z4xZ2", product(&[z(4), z(2)])),
        ("Z2xZ2xZ2", product(&[z(2), z(2), z(2)])),
        ("D4", dihedral(4)),
        ("Q8", quaternion()),
    ]
}

pub fn by_name(name: &str) -> Option<Group> {
    small_groups().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::enumerate_embeddings;

    #[test]
    fn corpus_is_complete_and_irredundant() {
        let gs = small_groups();
        assert_eq!(gs.len(), 14);
        let mut per_order = [0usize; 9];
        for (_, g) in &gs {
            per_order[g.order()] += 1;
            // validated tables
            assert!(Group::from_table(&g.rows().iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect::<Vec<_>>()).is_ok());
        }
        assert_eq!(per_order, [0, 1, 1, 1, 2, 1, 2, 1, 5]);
        for (i, (_, a)) in gs.iter().enumerate() {
            for (_, b) in &gs[i + 1..] {
                if a.order() == b.order() {
                    assert!(enumerate_embeddings(a, b).is_empty());
                }
            }
        }
    }

    #[test]
    fn named_structure() {
        let d4 = dihedral(4);
        assert!(!d4.is_abelian());
        assert_eq!(crate::group::center(&d4).members(), &[0, 2]);
        let q = quaternion();
        assert_eq!((1..8).filter(|&x| q.elem_order(x) == 2).count(), 1);
        assert_eq!(symmetric(4).order(), 24);
    }
}
