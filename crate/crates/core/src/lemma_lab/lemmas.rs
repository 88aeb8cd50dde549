//! One exhaustive sweep per statement. Each function walks its whole
//! quantifier range for one shape, ticking the tally once per instance and
//! recording every counterexample it meets.

use std::collections::{BTreeSet, HashMap};

use super::indexed::IndexedSpace;
use super::Tally;
use crate::error::Result;
use crate::field::{Elem, Field};
use crate::geometry::{
    adjacent_in_pencil, all_pencils, idempotents_of_rank, is_adjacent_set, is_affine_line,
    orthocomplement, proj_points, rank1_idempotent_in, rank_one_in_translate, Pencil, PencilKind,
    ProjectivePoint, Side,
};
use crate::matrix::{span_basis, vectors, Matrix};

fn codes(set: &[Matrix]) -> BTreeSet<u64> {
    set.iter().map(Matrix::code).collect()
}

/// Rank `n−1` matrices of `M_{p×q}` adjacent to `[I_n 0; 0 0]` are exactly
/// the embedded rank `n−1` idempotents of `M_n`.
pub fn subadjacent_idempotents(field: &Field, p: usize, q: usize, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, p, q)?;
    for n in 2..=p.min(q) {
        let block = Matrix::block_identity(field, p, q, n).code() as usize;
        let mut adjacent = BTreeSet::new();
        for c in space.codes_of_rank(n - 1) {
            if !tally.tick() {
                return Ok(());
            }
            if space.adjacent(c, block) {
                adjacent.insert(c as u64);
            }
        }
        let expected: BTreeSet<u64> = idempotents_of_rank(field, n, n - 1)?
            .iter()
            .map(|x| x.embed(p, q).map(|e| e.code()))
            .collect::<Result<_>>()?;
        for c in adjacent.symmetric_difference(&expected) {
            tally.violation(format!(
                "n={n}, {p}x{q}: {:?} is in exactly one of the two sets",
                space.matrix(*c as usize)
            ));
        }
    }
    Ok(())
}

/// Adjacent matrices of equal rank share their image or their kernel.
pub fn equal_rank_adjacent(field: &Field, m: usize, n: usize, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, m, n)?;
    let images: Vec<Vec<Vec<Elem>>> = space.matrices().iter().map(Matrix::row_space).collect();
    let kernels: Vec<Vec<Vec<Elem>>> = space.matrices().iter().map(Matrix::kernel).collect();
    for a in 0..space.len() {
        for b in a + 1..space.len() {
            if !tally.tick() {
                return Ok(());
            }
            if space.rank(a) == space.rank(b)
                && space.adjacent(a, b)
                && images[a] != images[b]
                && kernels[a] != kernels[b]
            {
                tally.violation(format!(
                    "{:?} and {:?} share neither image nor kernel",
                    space.matrix(a),
                    space.matrix(b)
                ));
            }
        }
    }
    Ok(())
}

/// If every rank `r−1` neighbour of a rank `r ≥ 2` matrix `A` is adjacent
/// to `B`, then `B = A`, or `B = 0` and `r = 2`.
pub fn coadjacency(field: &Field, m: usize, n: usize, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, m, n)?;
    for r in 2..=m.min(n) {
        let lower: Vec<usize> = space.codes_of_rank(r - 1).collect();
        for a in space.codes_of_rank(r) {
            let neighbours: Vec<usize> = lower
                .iter()
                .copied()
                .filter(|&c| space.adjacent(a, c))
                .collect();
            if neighbours.is_empty() {
                tally.violation(format!(
                    "{:?} has no rank {} neighbour",
                    space.matrix(a),
                    r - 1
                ));
            }
            for b in 0..space.len() {
                if !tally.tick() {
                    return Ok(());
                }
                let shared = neighbours.iter().all(|&c| space.adjacent(b, c));
                let allowed = b == a || (b == 0 && r == 2);
                if shared && !allowed {
                    tally.violation(format!(
                        "r={r}: every neighbour of {:?} is adjacent to {:?}",
                        space.matrix(a),
                        space.matrix(b)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// `R_d ∩ R_{d'} = {0}` iff `d ≠ d'`, and the same for `L`.
pub fn pencil_intersections(field: &Field, m: usize, n: usize, tally: &mut Tally) -> Result<()> {
    for kind in [PencilKind::R, PencilKind::L] {
        let pencils: Vec<Pencil> = all_pencils(field, m, n)
            .into_iter()
            .filter(|p| p.kind == kind)
            .collect();
        let members: Vec<BTreeSet<u64>> =
            pencils.iter().map(|p| codes(&p.members(field))).collect();
        for i in 0..pencils.len() {
            for j in 0..pencils.len() {
                if !tally.tick() {
                    return Ok(());
                }
                let meet: Vec<&u64> = members[i].intersection(&members[j]).collect();
                let trivial = meet == [&0];
                if trivial != (i != j) {
                    tally.violation(format!(
                        "{:?} ∩ {:?} has {} members",
                        pencils[i].point,
                        pencils[j].point,
                        meet.len()
                    ));
                }
            }
        }
    }
    Ok(())
}

fn perp_point(field: &Field, e: &ProjectivePoint) -> ProjectivePoint {
    orthocomplement(field, e)
        .as_point()
        .expect("complement of a point in a plane is a point")
}

/// `R_d ∩ L_e` holds exactly one rank one idempotent if `d ≠ e^⊥`, none
/// otherwise.
pub fn idempotent_in_meet(field: &Field, tally: &mut Tally) -> Result<()> {
    for d in proj_points(field, 2, Side::Row) {
        let rd = Pencil::r(d.clone(), (2, 2))?;
        for e in proj_points(field, 2, Side::Col) {
            if !tally.tick() {
                return Ok(());
            }
            let le = Pencil::l(e.clone(), (2, 2))?;
            let found: Vec<Matrix> = rd
                .members(field)
                .into_iter()
                .filter(|x| le.contains(x) && x.rank() == 1 && &x.mul(x).unwrap() == x)
                .collect();
            let expected = usize::from(d != perp_point(field, &e));
            if found.len() != expected {
                tally.violation(format!(
                    "R{d:?} ∩ L{e:?} holds {} rank one idempotents",
                    found.len()
                ));
            }
            if rank1_idempotent_in(field, &d, &e).as_ref() != found.first() {
                tally.violation(format!(
                    "closed form disagrees with the sweep at ({d:?}, {e:?})"
                ));
            }
        }
    }
    Ok(())
}

/// For invertible `A`, `R_d ∩ L_e` contains a rank one matrix adjacent to
/// `A` iff `d ≠ (A^{-1}e)^⊥`.
pub fn adjacent_meet_rank_two(field: &Field, tally: &mut Tally) -> Result<()> {
    let rows = proj_points(field, 2, Side::Row);
    let cols = proj_points(field, 2, Side::Col);
    let meets: Vec<Vec<(ProjectivePoint, ProjectivePoint, Vec<Matrix>)>> = rows
        .iter()
        .map(|d| {
            let rd = Pencil::r(d.clone(), (2, 2)).unwrap();
            cols.iter()
                .map(|e| {
                    let le = Pencil::l(e.clone(), (2, 2)).unwrap();
                    let meet = rd
                        .members(field)
                        .into_iter()
                        .filter(|x| x.rank() == 1 && le.contains(x))
                        .collect();
                    (d.clone(), e.clone(), meet)
                })
                .collect()
        })
        .collect();
    let space = IndexedSpace::new(field, 2, 2)?;
    for a in space.codes_of_rank(2) {
        let a = space.matrix(a);
        let inv = a.inverse()?;
        for row in &meets {
            for (d, e, meet) in row {
                if !tally.tick() {
                    return Ok(());
                }
                let hit = meet.iter().any(|x| x.sub(a).unwrap().rank() == 1);
                let moved = ProjectivePoint::spanned_by(field, Side::Col, &inv.right_apply(&e.rep))
                    .unwrap();
                if hit != (*d != perp_point(field, &moved)) {
                    tally.violation(format!("A={a:?}, d={d:?}, e={e:?}: adjacency {hit}"));
                }
            }
        }
    }
    Ok(())
}

/// Affine lines of the pencil's coordinate space avoiding 0, as sorted
/// coordinate sets.
fn affine_lines_avoiding_zero(field: &Field, dim: usize) -> BTreeSet<Vec<Vec<Elem>>> {
    let mut lines = BTreeSet::new();
    for dir in proj_points(field, dim, Side::Row) {
        for base in vectors(field, dim) {
            let mut line: Vec<Vec<Elem>> = field
                .elements()
                .into_iter()
                .map(|s| {
                    base.iter()
                        .zip(&dir.rep)
                        .map(|(&b, &w)| field.add(b, field.mul(s, w)))
                        .collect()
                })
                .collect();
            if line.iter().any(|v| v.iter().all(|e| e.is_zero())) {
                continue;
            }
            line.sort();
            lines.insert(line);
        }
    }
    lines
}

/// In `M_2`, the members of a pencil adjacent to a rank two matrix form an
/// affine line missing 0, and every such line arises this way.
pub fn affine_lines(field: &Field, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, 2, 2)?;
    let lines = affine_lines_avoiding_zero(field, 2);
    for pencil in all_pencils(field, 2, 2) {
        let mut realized = BTreeSet::new();
        for a in space.codes_of_rank(2) {
            if !tally.tick() {
                return Ok(());
            }
            let a = space.matrix(a);
            let adj = adjacent_in_pencil(&pencil, a)?;
            let mut coords: Vec<Vec<Elem>> =
                adj.iter().map(|x| pencil.coordinates(x).unwrap()).collect();
            if adj.len() != field.order() as usize
                || adj.iter().any(Matrix::is_zero)
                || !is_affine_line(field, &coords)
            {
                tally.violation(format!(
                    "{pencil:?} ∩ adj({a:?}) is not an affine line avoiding 0"
                ));
            }
            coords.sort();
            realized.insert(coords);
        }
        for line in lines.difference(&realized) {
            tally.violation(format!(
                "line {line:?} of {pencil:?} is realized by no rank two matrix"
            ));
        }
    }
    Ok(())
}

/// When `rank(A+B) = rank A + rank B`: `Im(A+B) = Im A ⊕ Im B` and
/// `Ker(A+B) = Ker A ∩ Ker B`. For adjacent `A, B` with `rank A < rank B`:
/// `Im A ⊂ Im B` and `Ker B ⊂ Ker A`.
pub fn rank_additivity(field: &Field, m: usize, n: usize, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, m, n)?;
    let images: Vec<Vec<Vec<Elem>>> = space.matrices().iter().map(Matrix::row_space).collect();
    let kernels: Vec<Vec<Vec<Elem>>> = space.matrices().iter().map(Matrix::kernel).collect();
    let sum = |x: &[Vec<Elem>], y: &[Vec<Elem>], len: usize| {
        let all: Vec<Vec<Elem>> = x.iter().chain(y).cloned().collect();
        span_basis(field, len, &all)
    };
    for a in 0..space.len() {
        for b in 0..space.len() {
            if !tally.tick() {
                return Ok(());
            }
            let (ra, rb) = (space.rank(a), space.rank(b));
            let s = space.add(a, b);
            if space.rank(s) == ra + rb {
                let joined = sum(&images[a], &images[b], n);
                if images[s] != joined || joined.len() != ra + rb {
                    tally.violation(format!(
                        "Im of {:?} + {:?} is not the direct sum",
                        space.matrix(a),
                        space.matrix(b)
                    ));
                }
                if kernels[s] != kernel_meet(space.matrix(a), space.matrix(b)) {
                    tally.violation(format!(
                        "Ker of {:?} + {:?} is not the intersection",
                        space.matrix(a),
                        space.matrix(b)
                    ));
                }
            }
            if ra < rb && space.adjacent(a, b) {
                let image_inside = sum(&images[a], &images[b], n) == images[b];
                let kernel_inside = sum(&kernels[a], &kernels[b], m) == kernels[a];
                if !image_inside || !kernel_inside {
                    tally.violation(format!(
                        "adjacent {:?} < {:?} violate the inclusions",
                        space.matrix(a),
                        space.matrix(b)
                    ));
                }
            }
        }
    }
    Ok(())
}

/// `Ker A ∩ Ker B` as the left kernel of `[A | B]`.
fn kernel_meet(a: &Matrix, b: &Matrix) -> Vec<Vec<Elem>> {
    let (m, n) = a.shape();
    let mut entries = Vec::with_capacity(2 * m * n);
    for i in 0..m {
        entries.extend_from_slice(a.row(i));
        entries.extend_from_slice(b.row(i));
    }
    Matrix::new(a.field(), m, 2 * n, entries).unwrap().kernel()
}

/// Every rank `r ≥ 2` matrix has an adjacent set of `c^{r−1}` rank `r−1`
/// neighbours, built from the normal form.
pub fn large_adjacent_set(field: &Field, m: usize, n: usize, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, m, n)?;
    let q = field.order() as usize;
    for r in 2..=m.min(n) {
        for a in space.codes_of_rank(r) {
            if !tally.tick() {
                return Ok(());
            }
            let a = space.matrix(a);
            let (t, s, _) = a.rank_normal_form();
            let (ti, si) = (t.inverse()?, s.inverse()?);
            let mut set = Vec::new();
            for x in vectors(field, r - 1) {
                let mut v = Matrix::block_identity(field, m, n, r - 1);
                for (i, &xi) in x.iter().enumerate() {
                    v.set(i, r - 1, xi);
                }
                set.push(ti.mul(&v)?.mul(&si)?);
            }
            let distinct = codes(&set).len();
            let ok = distinct == q.pow(r as u32 - 1)
                && set
                    .iter()
                    .all(|v| v.rank() == r - 1 && v.sub(a).unwrap().rank() == 1)
                && is_adjacent_set(&set)?;
            if !ok {
                tally.violation(format!("r={r}: the normal-form set for {a:?} fails"));
            }
        }
    }
    Ok(())
}

/// For rank two `A`: the members of a pencil adjacent to `A`, and the rank
/// one members of `A + pencil`, number 0 or `c`, and exactly `c` in `M_2`.
pub fn pencil_adjacency_counts(field: &Field, m: usize, n: usize, tally: &mut Tally) -> Result<()> {
    let space = IndexedSpace::new(field, m, n)?;
    let c = field.order() as usize;
    let square2 = (m, n) == (2, 2);
    let pencils = all_pencils(field, m, n);
    let mut sizes: HashMap<usize, u64> = HashMap::new();
    for a in space.codes_of_rank(2) {
        let a = space.matrix(a);
        for pencil in &pencils {
            if !tally.tick() {
                return Ok(());
            }
            let adj = adjacent_in_pencil(pencil, a)?.len();
            let translate = rank_one_in_translate(pencil, a)?.len();
            *sizes.entry(adj).or_default() += 1;
            for (what, k) in [
                ("adjacent members", adj),
                ("rank one members of A + P", translate),
            ] {
                if !(k == c || (k == 0 && !square2)) {
                    tally.violation(format!("{pencil:?}, A={a:?}: {k} {what}"));
                }
            }
        }
    }
    Ok(())
}

/// Brute-force search for unital additive multiplicative self-maps, by
/// depth-first assignment of images in code order with every ring identity
/// among assigned elements checked on the way down.
pub fn brute_force_endomorphisms(field: &Field) -> Vec<Vec<Elem>> {
    fn consistent(field: &Field, img: &[Elem]) -> bool {
        let k = img.len();
        let last = Elem(k as u32 - 1);
        (0..k as u32).map(Elem).all(|b| {
            let sum = field.add(last, b);
            let prod = field.mul(last, b);
            let ok_sum = (sum.0 as usize) >= k
                || img[sum.0 as usize] == field.add(img[k - 1], img[b.0 as usize]);
            let ok_prod = (prod.0 as usize) >= k
                || img[prod.0 as usize] == field.mul(img[k - 1], img[b.0 as usize]);
            ok_sum && ok_prod
        }) && (k < 2 || img[1] == Elem::ONE)
    }
    fn go(field: &Field, img: &mut Vec<Elem>, out: &mut Vec<Vec<Elem>>) {
        if img.len() == field.order() as usize {
            out.push(img.clone());
            return;
        }
        for v in field.elements() {
            img.push(v);
            // identities whose operands are assigned but whose result is
            // assigned later are checked when the result gets its image
            if consistent(field, img) && earlier_consistent(field, img) {
                go(field, img, out);
            }
            img.pop();
        }
    }
    fn earlier_consistent(field: &Field, img: &[Elem]) -> bool {
        let k = img.len();
        let target = k - 1;
        for a in 0..k {
            for b in 0..k {
                let (ea, eb) = (Elem(a as u32), Elem(b as u32));
                if field.add(ea, eb).0 as usize == target
                    && img[target] != field.add(img[a], img[b])
                {
                    return false;
                }
                if field.mul(ea, eb).0 as usize == target
                    && img[target] != field.mul(img[a], img[b])
                {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    go(field, &mut Vec::new(), &mut out);
    out
}

/// The endomorphisms of the field are exactly its `k` Frobenius powers and
/// all of them are bijective.
pub fn endomorphisms(field: &Field, tally: &mut Tally) -> Result<()> {
    let found = brute_force_endomorphisms(field);
    tally.tick();
    if found.len() != field.degree() as usize {
        tally.violation(format!(
            "{} endomorphisms, expected {}",
            found.len(),
            field.degree()
        ));
    }
    for map in &found {
        tally.tick();
        let distinct: BTreeSet<&Elem> = map.iter().collect();
        if distinct.len() != map.len() {
            tally.violation(format!("endomorphism {map:?} is not bijective"));
        }
        let frobenius = field.automorphisms().into_iter().any(|aut| {
            field
                .elements()
                .iter()
                .all(|&a| field.apply(aut, a) == map[a.0 as usize])
        });
        if !frobenius {
            tally.violation(format!("endomorphism {map:?} is not a Frobenius power"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endomorphism_counts() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (2, 3), (3, 2)] {
            let f = Field::with_order(p, k).unwrap();
            assert_eq!(brute_force_endomorphisms(&f).len(), k as usize, "F_{p}^{k}");
        }
    }

    #[test]
    fn f4_endomorphisms_are_identity_and_square() {
        let f = Field::with_order(2, 2).unwrap();
        let found = brute_force_endomorphisms(&f);
        let id: Vec<Elem> = f.elements();
        let sq: Vec<Elem> = f.elements().iter().map(|&a| f.mul(a, a)).collect();
        assert_eq!(found, vec![id, sq]);
    }

    #[test]
    fn affine_line_count() {
        // lines of F_q^2 avoiding 0: q^2 + q lines in total, q + 1 through 0
        for p in [2, 3] {
            let f = Field::prime(p).unwrap();
            let q = p as usize;
            assert_eq!(affine_lines_avoiding_zero(&f, 2).len(), q * q - 1);
        }
    }
}
