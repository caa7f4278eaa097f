//! Amalgamation keeping a designated subgroup of G1 commuting with the
//! centralizer of H0 in G2.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::amalgam::{amalgam_over, enumerate_tries, make_try, AmalgamError, AmalgamTry, Budget, Shape, StableAmalgam};
use crate::group::{centralizer, generated_subgroup, left_cosets, Embedding, Group, GroupError, Subgroup};
use crate::perm::Perm;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Nf3Error {
    #[error("invariant violated: {0}")]
    InvariantViolation(&'static str),
    #[error(transparent)]
    Amalgam(#[from] AmalgamError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// G0 ≤ G1, G2 with L ≤ G1 and H0 ≤ G0. Derived: H1 = ⟨H0 ∪ L⟩ in G1 and
/// H2 = Cm_{G2}(H0).
#[derive(Debug, Clone)]
pub struct Nf3Request {
    pub shape: Arc<Shape>,
    pub l: Subgroup,
    pub h0: Subgroup,
    h1: Subgroup,
    h1_plus: Subgroup,
    h2: Subgroup,
}

impl Nf3Request {
    pub fn new(shape: Arc<Shape>, l: Subgroup, h0: Subgroup) -> Result<Nf3Request, Nf3Error> {
        let s = &shape;
        if l.members().iter().any(|&x| x as usize >= s.g1.order())
            || h0.members().iter().any(|&x| x as usize >= s.g0.order())
        {
            return Err(Nf3Error::InvariantViolation("subgroups lie in their groups"));
        }
        let g0_in_1 = s.emb1.image();
        let h0_in_1: Vec<u32> = h0.members().iter().map(|&x| s.emb1.apply(x)).collect();
        let h0_in_2: Vec<u32> = h0.members().iter().map(|&x| s.emb2.apply(x)).collect();
        let h1 = generated_subgroup(&s.g1, &[l.members(), &h0_in_1].concat())?;
        let h1_plus = generated_subgroup(&s.g1, &[l.members(), g0_in_1.members()].concat())?;
        let h2 = centralizer(&s.g2, &h0_in_2)?;
        if l.intersect(&g0_in_1).order() != 1 {
            return Err(Nf3Error::InvariantViolation("A(d): L meets G0"));
        }
        let cm = centralizer(&s.g1, g0_in_1.members())?;
        if !h1.is_subset(&cm) {
            return Err(Nf3Error::InvariantViolation("A(d): H1 centralizes G0"));
        }
        if h1.intersect(&g0_in_1).members() != Subgroup::new(&s.g1, &h0_in_1)?.members() {
            return Err(Nf3Error::InvariantViolation("A(d): H1 meets G0 in H0"));
        }
        Ok(Nf3Request { shape, l, h0, h1, h1_plus, h2 })
    }

    pub fn h1(&self) -> &Subgroup {
        &self.h1
    }

    pub fn h2(&self) -> &Subgroup {
        &self.h2
    }

    /// Transversals I1 = J1·L, one per choice of J1 (identity pinned),
    /// earlier cosets varying slowest.
    pub fn side1_family(&self) -> Result<Vec<Vec<u32>>, Nf3Error> {
        let g1 = &self.shape.g1;
        let cosets = left_cosets(g1, &self.h1_plus)?;
        let mut out = Vec::new();
        for j1 in choices(&cosets) {
            let mut t: Vec<u32> =
                j1.iter().flat_map(|&j| self.l.members().iter().map(move |&b| g1.mul(j, b))).collect();
            t.sort_unstable();
            out.push(t);
        }
        Ok(out)
    }

    /// Transversals of G0 in G2 that pick inside H2 whenever a coset meets it.
    pub fn side2_family(&self) -> Vec<Vec<u32>> {
        let cands: Vec<Vec<u32>> = self
            .shape
            .cosets(2)
            .iter()
            .map(|c| {
                let inside: Vec<u32> = c.iter().copied().filter(|&x| self.h2.contains(x)).collect();
                if inside.is_empty() {
                    c.clone()
                } else {
                    inside
                }
            })
            .collect();
        choices(&cands)
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect()
    }
}

/// One element from each block; the block containing the identity
/// contributes the identity.
fn choices(blocks: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let blocks: Vec<Vec<u32>> =
        blocks.iter().map(|b| if b.contains(&0) { vec![0] } else { b.clone() }).collect();
    let mut out = Vec::new();
    let mut c = vec![0usize; blocks.len()];
    loop {
        out.push(blocks.iter().zip(&c).map(|(b, &i)| b[i]).collect());
        let mut i = blocks.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            c[i] += 1;
            if c[i] < blocks[i].len() {
                break;
            }
            c[i] = 0;
        }
    }
}

/// The least-index member of the family.
pub fn build_commuting_transversals(req: &Nf3Request) -> Result<AmalgamTry, Nf3Error> {
    let i1 = req.side1_family()?.swap_remove(0);
    let i2 = req.side2_family().swap_remove(0);
    Ok(make_try(&req.shape, Some(&i1), Some(&i2))?)
}

/// Each clause of the commutation hypotheses, checked on one try.
pub fn clause_checks(req: &Nf3Request, x: &AmalgamTry) -> Vec<(char, bool)> {
    let s = &req.shape;
    let (g1, g2) = (&s.g1, &s.g2);
    let g0_in_1 = s.emb1.image();
    let g0_in_2 = s.emb2.image();
    let valid = make_try(&req.shape, Some(&x.i1), Some(&x.i2)).is_ok();
    let i1_cap: Vec<u32> = x.i1.iter().copied().filter(|&b| req.h1.contains(b)).collect();
    let i2_cap: Vec<u32> = x.i2.iter().copied().filter(|&b| req.h2.contains(b)).collect();
    let h0_in_1: Vec<u32> = req.h0.members().iter().map(|&a| s.emb1.apply(a)).collect();
    let h0_in_2: Vec<u32> = req.h0.members().iter().map(|&a| s.emb2.apply(a)).collect();
    let covers = |g: &Group, reps: &[u32], part: &[u32], whole: &Subgroup| {
        let mut got: Vec<u32> = reps.iter().flat_map(|&b| part.iter().map(move |&h| g.mul(b, h))).collect();
        got.sort_unstable();
        let n = got.len();
        got.dedup();
        got.len() == n && got == whole.members()
    };
    let g02: Vec<u32> = req.h2.intersect(&g0_in_2).members().to_vec();
    let h0_ok = req.h1.intersect(&g0_in_1).members() == {
        let mut v = h0_in_1.clone();
        v.sort_unstable();
        v
    };
    let fixes_base = s.g0.generators().iter().all(|&g| {
        let p0 = x.perm(0, g);
        p0 == x.perm(1, s.emb1.apply(g)) && p0 == x.perm(2, s.emb2.apply(g))
    });
    vec![
        ('a', valid),
        ('b', x.shape.g1.order() == g1.order() && x.shape.g2.order() == g2.order()),
        ('c', valid),
        ('d', req.h1.is_subset(&Subgroup::whole(g1)) && h0_ok),
        ('e', covers(g1, &i1_cap, &h0_in_1, &req.h1)),
        ('f', x.i1.iter().all(|&g| i1_cap.iter().all(|&b| x.i1.binary_search(&g1.mul(g, b)).is_ok()))),
        ('g', g0_in_1.members().iter().all(|&a| req.h1.members().iter().all(|&b| g1.commute(a, b)))),
        ('h', req.h2.members().iter().all(|&a| h0_in_2.iter().all(|&b| g2.commute(a, b)))),
        ('i', covers(g2, &i2_cap, &g02, &req.h2)),
        ('j', fixes_base),
    ]
}

/// Element-wise commutation of j1(H1) and j2(H2) inside G3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutationCertificate {
    pub pairs_checked: usize,
    pub failures: Vec<(u32, u32)>,
}

impl CommutationCertificate {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub struct Nf3Result {
    pub amalgam: StableAmalgam,
    pub certificate: CommutationCertificate,
    /// Tries whose clause check failed; empty when the family is correct.
    pub clause_failures: Vec<(usize, char)>,
}

/// G3 over the compatible try family only.
pub fn nf3_amalgam(req: &Nf3Request, budget: Budget) -> Result<Nf3Result, Nf3Error> {
    let side1 = req.side1_family()?;
    let side2 = req.side2_family();
    let sa = amalgam_over(&req.shape, &side1, &side2, budget)?;
    let mut clause_failures = Vec::new();
    let mut n = 0;
    for a in &side1 {
        for b in &side2 {
            let x = make_try(&req.shape, Some(a), Some(b))?;
            for (c, ok) in clause_checks(req, &x) {
                if !ok {
                    clause_failures.push((n, c));
                }
            }
            n += 1;
        }
    }
    let p1: Vec<(u32, Perm)> = req.h1.members().iter().map(|&h| (h, sa.image1(h))).collect();
    let p2: Vec<(u32, Perm)> = req.h2.members().iter().map(|&h| (h, sa.image2(h))).collect();
    let mut failures = Vec::new();
    for (a, pa) in &p1 {
        for (b, pb) in &p2 {
            if pa.then(pb) != pb.then(pa) {
                failures.push((*a, *b));
            }
        }
    }
    let certificate = CommutationCertificate { pairs_checked: p1.len() * p2.len(), failures };
    Ok(Nf3Result { amalgam: sa, certificate, clause_failures })
}

/// Does the generated family contain every try satisfying the clauses?
/// Enumerates all tries, so only for tiny shapes.
pub fn family_is_exhaustive(req: &Nf3Request) -> Result<bool, Nf3Error> {
    let side1 = req.side1_family()?;
    let side2 = req.side2_family();
    let ours: BTreeSet<(Vec<u32>, Vec<u32>)> =
        side1.iter().flat_map(|a| side2.iter().map(move |b| (a.clone(), b.clone()))).collect();
    let all: BTreeSet<(Vec<u32>, Vec<u32>)> = enumerate_tries(&req.shape)
        .filter(|x| clause_checks(req, x).iter().all(|(_, ok)| *ok))
        .map(|x| (x.i1.clone(), x.i2.clone()))
        .collect();
    Ok(ours == all)
}

/// The request with G1 relabelled by `sigma` (sigma[0] = 0).
pub fn relabel_side1(req: &Nf3Request, sigma: &[u32]) -> Result<Nf3Request, Nf3Error> {
    let s = &req.shape;
    let g1 = s.g1.relabel(sigma);
    let emb1 = Embedding::new(&s.g0, &g1, s.emb1.map.iter().map(|&x| sigma[x as usize]).collect())?;
    let shape = Shape::new(s.g0.clone(), g1.clone(), s.g2.clone(), emb1, s.emb2.clone())?;
    let l: Vec<u32> = req.l.members().iter().map(|&x| sigma[x as usize]).collect();
    Nf3Request::new(shape, Subgroup::new(&g1, &l)?, req.h0.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amalgam::stable_amalgam;
    use crate::corpus;

    fn v4() -> Group {
        Group::direct_product(&Group::cyclic(2), &Group::cyclic(2))
    }

    /// G0 = Z2 as the first factor of both Klein groups.
    fn klein_shape() -> Arc<Shape> {
        let z2 = Group::cyclic(2);
        let g = v4();
        let e = Embedding::new(&z2, &g, vec![0, 2]).unwrap();
        Shape::new(z2, g.clone(), g, e.clone(), e).unwrap()
    }

    #[test]
    fn trivial_l_gives_default_try() {
        let shape = klein_shape();
        let req = Nf3Request::new(shape.clone(), Subgroup::trivial(), Subgroup::trivial()).unwrap();
        let x = build_commuting_transversals(&req).unwrap();
        let d = make_try(&shape, None, None).unwrap();
        assert_eq!((x.i1, x.i2), (d.i1, d.i2));
    }

    #[test]
    fn klein_example() {
        let shape = klein_shape();
        let l = Subgroup::new(&shape.g1, &[0, 1]).unwrap();
        let req = Nf3Request::new(shape.clone(), l, Subgroup::trivial()).unwrap();
        let x = build_commuting_transversals(&req).unwrap();
        assert_eq!(x.i1, vec![0, 1]);
        for &g in &x.i1 {
            for &b in &[0u32, 1] {
                assert!(x.i1.contains(&shape.g1.mul(g, b)));
            }
        }
        assert!(clause_checks(&req, &x).iter().all(|(_, ok)| *ok));
        let r = nf3_amalgam(&req, Budget::default()).unwrap();
        assert!(r.certificate.holds());
        assert!(r.clause_failures.is_empty());
        // j1(L) commutes with all of j2(G2)
        let la = r.amalgam.image1(1);
        assert!(shape.g2.elements().all(|g| {
            let p = r.amalgam.image2(g);
            la.then(&p) == p.then(&la)
        }));
        assert!(family_is_exhaustive(&req).unwrap());
    }

    #[test]
    fn l_meeting_base_is_rejected() {
        let shape = klein_shape();
        let l = Subgroup::new(&shape.g1, &[0, 2]).unwrap();
        let err = Nf3Request::new(shape, l, Subgroup::trivial()).unwrap_err();
        assert_eq!(err, Nf3Error::InvariantViolation("A(d): L meets G0"));
    }

    #[test]
    fn noncentral_l_is_rejected() {
        let s3 = corpus::symmetric3();
        let z2 = Group::cyclic(2);
        let e = Embedding::new(&z2, &s3, vec![0, 1]).unwrap();
        let shape = Shape::new(z2, s3.clone(), s3.clone(), e.clone(), e).unwrap();
        let l = Subgroup::new(&s3, &[0, 2]).unwrap();
        let err = Nf3Request::new(shape, l, Subgroup::trivial()).unwrap_err();
        assert_eq!(err, Nf3Error::InvariantViolation("A(d): H1 centralizes G0"));
    }

    #[test]
    fn abelian_base_matches_plain_amalgam() {
        let shape = klein_shape();
        let h0 = Subgroup::whole(&shape.g0);
        let req = Nf3Request::new(shape.clone(), Subgroup::trivial(), h0).unwrap();
        let r = nf3_amalgam(&req, Budget::default()).unwrap();
        let plain = stable_amalgam(&shape, Budget::default()).unwrap();
        assert!(r.certificate.holds());
        assert!(r.amalgam.marked().same_as(plain.marked()));
    }

    #[test]
    fn degenerate_side_gives_g2() {
        let z2 = Group::cyclic(2);
        let d4 = corpus::dihedral(4);
        let e1 = Embedding::identity(&z2);
        let e2 = Embedding::new(&z2, &d4, vec![0, 2]).unwrap();
        let shape = Shape::new(z2.clone(), z2, d4, e1, e2).unwrap();
        let req = Nf3Request::new(shape, Subgroup::trivial(), Subgroup::trivial()).unwrap();
        let r = nf3_amalgam(&req, Budget::default()).unwrap();
        assert_eq!(r.amalgam.order_usize(), Some(8));
        assert!(r.certificate.holds());
    }

    #[test]
    fn uniqueness_under_relabelling() {
        let z2 = Group::cyclic(2);
        let g1 = Group::direct_product(&v4(), &Group::cyclic(2));
        let d4 = corpus::dihedral(4);
        let e1 = Embedding::new(&z2, &g1, vec![0, 4]).unwrap();
        let e2 = Embedding::new(&z2, &d4, vec![0, 2]).unwrap();
        let shape = Shape::new(z2, g1.clone(), d4, e1, e2).unwrap();
        let l = Subgroup::new(&g1, &[0, 1]).unwrap();
        let req = Nf3Request::new(shape, l, Subgroup::trivial()).unwrap();
        let r = nf3_amalgam(&req, Budget::default()).unwrap();
        assert!(r.certificate.holds() && r.clause_failures.is_empty());
        let sigma = [0u32, 3, 5, 1, 4, 7, 2, 6];
        let r2 = nf3_amalgam(&relabel_side1(&req, &sigma).unwrap(), Budget::default()).unwrap();
        assert!(r2.certificate.holds());
        let all1: Vec<u32> = g1.elements().collect();
        let moved: Vec<u32> = all1.iter().map(|&x| sigma[x as usize]).collect();
        let all2: Vec<u32> = (0..8).collect();
        assert!(r.amalgam.marked_images(&all1, &all2).same_as(&r2.amalgam.marked_images(&moved, &all2)));
        assert_eq!(r.amalgam.order(), r2.amalgam.order());
    }
}
