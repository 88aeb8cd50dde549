//! Projective points, the maximal adjacent sets `R_d` and `L_e`, and the
//! incidence facts about them that the preserver theory leans on.
//!
//! `R_d` is the set of matrices `^tu·x` with `x` spanning the row line `d`
//! (every row lies in `d`); `L_e` is the set of matrices `^te·v` with `^te`
//! spanning the column line `e` (every column lies in `e`). Both contain 0
//! and every two distinct members are adjacent.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{
    self, dot, leading_index, normalize, span_basis, vectors, Matrix, MatrixSpace,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    #[serde(rename = "row")]
    Row,
    #[serde(rename = "col")]
    Col,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Row => Side::Col,
            Side::Col => Side::Row,
        }
    }
}

/// A one-dimensional subspace of `F^n` (row side) or `^tF^m` (column
/// side), held by its representative with first nonzero coordinate 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProjectivePoint {
    pub side: Side,
    pub rep: Vec<Elem>,
}

impl ProjectivePoint {
    /// The point spanned by a nonzero vector.
    pub fn spanned_by(field: &Field, side: Side, v: &[Elem]) -> Option<Self> {
        normalize(field, v).map(|rep| ProjectivePoint { side, rep })
    }

    /// The `i`-th standard basis point (0-based).
    pub fn standard(side: Side, ambient: usize, i: usize) -> Self {
        let mut rep = vec![Elem::ZERO; ambient];
        rep[i] = Elem::ONE;
        ProjectivePoint { side, rep }
    }

    pub fn ambient(&self) -> usize {
        self.rep.len()
    }

    /// Checks the canonical-representative invariant.
    pub fn validate(&self, field: &Field) -> Result<()> {
        let ok = !self.rep.is_empty()
            && self.rep.iter().all(|&e| field.contains(e))
            && leading_index(&self.rep).is_some_and(|i| self.rep[i] == Elem::ONE);
        if ok {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "{self:?} is not a canonical projective point"
            )))
        }
    }

    pub fn contains_vector(&self, field: &Field, v: &[Elem]) -> bool {
        v.len() == self.rep.len()
            && match normalize(field, v) {
                None => true,
                Some(n) => n == self.rep,
            }
    }
}

impl fmt::Debug for ProjectivePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rep: Vec<u32> = self.rep.iter().map(|e| e.0).collect();
        match self.side {
            Side::Row => write!(f, "<{rep:?}>"),
            Side::Col => write!(f, "<^t{rep:?}>"),
        }
    }
}

/// All points of the projective space of `F^ambient`, in lexicographic
/// order of their canonical representatives.
pub fn proj_points(field: &Field, ambient: usize, side: Side) -> Vec<ProjectivePoint> {
    let mut pts: Vec<ProjectivePoint> = vectors(field, ambient)
        .filter(|v| leading_index(v).is_some_and(|i| v[i] == Elem::ONE))
        .map(|rep| ProjectivePoint { side, rep })
        .collect();
    pts.sort();
    pts
}

/// Row line and column line of a rank one matrix: `M = ^tb·a` lies in
/// `R_<a>` and `L_<^tb>`. Returns `(column point, row point)`.
pub fn rank_one_points(m: &Matrix) -> Result<(ProjectivePoint, ProjectivePoint)> {
    let (b, a) = m.rank_one_factor()?;
    let f = m.field();
    Ok((
        ProjectivePoint::spanned_by(f, Side::Col, &b).expect("nonzero factor"),
        ProjectivePoint {
            side: Side::Row,
            rep: a,
        },
    ))
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PencilKind {
    R,
    L,
}

/// A maximal adjacent set through 0: `R_d` for a row point `d ∈ P(F^n)` or
/// `L_e` for a column point `e ∈ P(^tF^m)`, inside `M_{m×n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pencil {
    pub kind: PencilKind,
    pub point: ProjectivePoint,
    pub shape: (usize, usize),
}

impl Pencil {
    pub fn r(point: ProjectivePoint, shape: (usize, usize)) -> Result<Self> {
        let p = Pencil {
            kind: PencilKind::R,
            point,
            shape,
        };
        p.check()?;
        Ok(p)
    }

    pub fn l(point: ProjectivePoint, shape: (usize, usize)) -> Result<Self> {
        let p = Pencil {
            kind: PencilKind::L,
            point,
            shape,
        };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        let (m, n) = self.shape;
        let ok = match self.kind {
            PencilKind::R => self.point.side == Side::Row && self.point.ambient() == n,
            PencilKind::L => self.point.side == Side::Col && self.point.ambient() == m,
        };
        if ok && m > 0 && n > 0 {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "{:?} pencil on {:?} does not fit a {m}x{n} space",
                self.kind, self.point
            )))
        }
    }

    pub fn validate(&self, field: &Field) -> Result<()> {
        self.point.validate(field)?;
        self.check()
    }

    /// Every member, in code order of the free coordinate vector; 0 first.
    pub fn members(&self, field: &Field) -> Vec<Matrix> {
        let (m, n) = self.shape;
        match self.kind {
            PencilKind::R => vectors(field, m)
                .map(|u| Matrix::outer(field, &u, &self.point.rep))
                .collect(),
            PencilKind::L => vectors(field, n)
                .map(|v| Matrix::outer(field, &self.point.rep, &v))
                .collect(),
        }
    }

    pub fn contains(&self, a: &Matrix) -> bool {
        if a.shape() != self.shape {
            return false;
        }
        let f = a.field();
        match self.kind {
            PencilKind::R => (0..a.rows()).all(|i| self.point.contains_vector(f, a.row(i))),
            PencilKind::L => (0..a.cols()).all(|j| self.point.contains_vector(f, &a.column(j))),
        }
    }

    /// Coordinates of a member in the vector-space structure induced by the
    /// canonical representative: `u` for `^tu·d`, `v` for `^te·v`.
    pub fn coordinates(&self, a: &Matrix) -> Option<Vec<Elem>> {
        if !self.contains(a) {
            return None;
        }
        let lead = leading_index(&self.point.rep).unwrap();
        Some(match self.kind {
            PencilKind::R => a.column(lead),
            PencilKind::L => a.row(lead).to_vec(),
        })
    }

    /// Members of this pencil adjacent to the rank two matrix `a`.
    pub fn adjacent_members(&self, a: &Matrix) -> Result<Vec<Matrix>> {
        adjacent_in_pencil(self, a)
    }
}

/// All `R_d` followed by all `L_e` of `M_{m×n}`.
pub fn all_pencils(field: &Field, m: usize, n: usize) -> Vec<Pencil> {
    let rs = proj_points(field, n, Side::Row)
        .into_iter()
        .map(|d| Pencil {
            kind: PencilKind::R,
            point: d,
            shape: (m, n),
        });
    let ls = proj_points(field, m, Side::Col)
        .into_iter()
        .map(|e| Pencil {
            kind: PencilKind::L,
            point: e,
            shape: (m, n),
        });
    rs.chain(ls).collect()
}

/// A subspace of `F^ambient` on a given side, held by a reduced echelon basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    pub side: Side,
    pub ambient: usize,
    pub basis: Vec<Vec<Elem>>,
}

impl Subspace {
    pub fn span(field: &Field, side: Side, ambient: usize, vectors: &[Vec<Elem>]) -> Self {
        Subspace {
            side,
            ambient,
            basis: span_basis(field, ambient, vectors),
        }
    }

    pub fn of_point(point: &ProjectivePoint) -> Self {
        Subspace {
            side: point.side,
            ambient: point.ambient(),
            basis: vec![point.rep.clone()],
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// The annihilator on the opposite side: `{^tx : y·^tx = 0 for all y}`.
    pub fn orthocomplement(&self, field: &Field) -> Subspace {
        let basis = if self.basis.is_empty() {
            span_basis(
                field,
                self.ambient,
                &(0..self.ambient)
                    .map(|i| ProjectivePoint::standard(Side::Row, self.ambient, i).rep)
                    .collect::<Vec<_>>(),
            )
        } else {
            let entries = self.basis.iter().flatten().copied().collect();
            Matrix::new(field, self.basis.len(), self.ambient, entries)
                .expect("basis vectors share the ambient length")
                .null_space()
        };
        Subspace {
            side: self.side.opposite(),
            ambient: self.ambient,
            basis,
        }
    }

    /// The point this subspace is, if it is one-dimensional.
    pub fn as_point(&self) -> Option<ProjectivePoint> {
        (self.dim() == 1).then(|| ProjectivePoint {
            side: self.side,
            rep: self.basis[0].clone(),
        })
    }
}

/// `point^⊥`, a hyperplane on the opposite side.
pub fn orthocomplement(field: &Field, point: &ProjectivePoint) -> Subspace {
    Subspace::of_point(point).orthocomplement(field)
}

/// The rank one idempotent of `R_d ∩ L_e`: the projection onto `d`
/// alongside `e^⊥`, which exists exactly when `d ≠ e^⊥`, i.e. `d·^te ≠ 0`.
pub fn rank1_idempotent_in(
    field: &Field,
    d: &ProjectivePoint,
    e: &ProjectivePoint,
) -> Option<Matrix> {
    assert_eq!(d.side, Side::Row);
    assert_eq!(e.side, Side::Col);
    let pairing = dot(field, &d.rep, &e.rep);
    let s = field.inv(pairing).ok()?;
    Some(Matrix::outer(field, &e.rep, &d.rep).scale(s))
}

/// Every `X ∈ M_n` with `X² = X` and rank `r`.
pub fn idempotents_of_rank(field: &Field, n: usize, r: usize) -> Result<Vec<Matrix>> {
    Ok(matrix::enumerate_rank(field, n, n, r)?
        .filter(|x| &x.mul(x).expect("square") == x)
        .collect())
}

/// Members of `pencil` adjacent to the rank two matrix `a`.
pub fn adjacent_in_pencil(pencil: &Pencil, a: &Matrix) -> Result<Vec<Matrix>> {
    if a.shape() != pencil.shape {
        return Err(Error::ShapeMismatch {
            expected: pencil.shape,
            found: a.shape(),
        });
    }
    let rank = a.rank();
    if rank != 2 {
        return Err(Error::RankMismatch {
            expected: 2,
            found: rank,
        });
    }
    let mut out = Vec::new();
    for m in pencil.members(a.field()) {
        if matrix::adjacent(&m, a)? {
            out.push(m);
        }
    }
    Ok(out)
}

/// Whether `points` (coordinate vectors) form exactly one affine line
/// `{v + a·w : a ∈ F}` with `w ≠ 0`.
pub fn is_affine_line(field: &Field, points: &[Vec<Elem>]) -> bool {
    if points.len() != field.order() as usize || points.len() < 2 {
        return false;
    }
    let base = &points[0];
    let dir: Vec<Elem> = points[1]
        .iter()
        .zip(base)
        .map(|(&b, &a)| field.sub(b, a))
        .collect();
    if dir.iter().all(|e| e.is_zero()) {
        return false;
    }
    let mut line: Vec<Vec<Elem>> = field
        .elements()
        .into_iter()
        .map(|s| {
            base.iter()
                .zip(&dir)
                .map(|(&v, &w)| field.add(v, field.mul(s, w)))
                .collect()
        })
        .collect();
    let mut given = points.to_vec();
    line.sort();
    given.sort();
    line == given
}

/// Every two distinct members are adjacent.
pub fn is_adjacent_set(set: &[Matrix]) -> Result<bool> {
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            let d = matrix::distance(a, b)?;
            if d > 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A pencil containing the adjacent set `set ∋ 0`; `R` is preferred when
/// both kinds fit. `None` means no pencil covers the set.
pub fn maximal_adjacent_cover(set: &[Matrix]) -> Result<Option<Pencil>> {
    let first = set.first().ok_or(Error::MissingZero)?;
    let shape = first.shape();
    if !set.iter().any(Matrix::is_zero) {
        return Err(Error::MissingZero);
    }
    if !is_adjacent_set(set)? {
        return Err(Error::NotAdjacentSet);
    }
    let nonzero: Vec<&Matrix> = set.iter().filter(|a| !a.is_zero()).collect();
    let Some(&lead) = nonzero.first() else {
        return Ok(Some(Pencil::r(
            ProjectivePoint::standard(Side::Row, shape.1, 0),
            shape,
        )?));
    };
    let (col, row) = rank_one_points(lead)?;
    let r = Pencil::r(row, shape)?;
    if nonzero.iter().all(|a| r.contains(a)) {
        return Ok(Some(r));
    }
    let l = Pencil::l(col, shape)?;
    if nonzero.iter().all(|a| l.contains(a)) {
        return Ok(Some(l));
    }
    Ok(None)
}

/// Rank one matrices of `a + pencil`.
pub fn rank_one_in_translate(pencil: &Pencil, a: &Matrix) -> Result<Vec<Matrix>> {
    let mut out = Vec::new();
    for m in pencil.members(a.field()) {
        let s = a.add(&m)?;
        if s.rank() == 1 {
            out.push(s);
        }
    }
    Ok(out)
}

/// Convenience: the pencils of `M_{m×n}` containing the rank one matrix `a`.
pub fn pencils_through(a: &Matrix) -> Result<(Pencil, Pencil)> {
    let (col, row) = rank_one_points(a)?;
    Ok((Pencil::r(row, a.shape())?, Pencil::l(col, a.shape())?))
}

/// The space's matrices sorted into rank classes, rank 0 first.
pub fn rank_classes(space: &MatrixSpace) -> Vec<Vec<Matrix>> {
    let (m, n) = space.shape();
    let mut classes = vec![Vec::new(); m.min(n) + 1];
    for a in space.iter() {
        classes[a.rank()].push(a);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Field {
        Field::prime(p).unwrap()
    }

    fn row(v: &[u32]) -> ProjectivePoint {
        ProjectivePoint {
            side: Side::Row,
            rep: v.iter().map(|&c| Elem(c)).collect(),
        }
    }

    fn col(v: &[u32]) -> ProjectivePoint {
        ProjectivePoint {
            side: Side::Col,
            rep: v.iter().map(|&c| Elem(c)).collect(),
        }
    }

    #[test]
    fn point_counts() {
        assert_eq!(proj_points(&f(2), 2, Side::Row).len(), 3);
        assert_eq!(proj_points(&f(3), 2, Side::Row).len(), 4);
        assert_eq!(proj_points(&f(2), 1, Side::Col).len(), 1);
        assert_eq!(proj_points(&f(3), 3, Side::Col).len(), 13);
        let pts = proj_points(&f(2), 2, Side::Row);
        assert_eq!(pts, vec![row(&[0, 1]), row(&[1, 0]), row(&[1, 1])]);
    }

    #[test]
    fn pencil_members_are_adjacent_sets() {
        let f2 = f(2);
        let r = Pencil::r(row(&[1, 0]), (2, 2)).unwrap();
        let members = r.members(&f2);
        assert_eq!(members.len(), 4);
        assert!(members[0].is_zero());
        assert!(is_adjacent_set(&members).unwrap());
        assert!(members.iter().all(|m| r.contains(m)));

        let f3 = f(3);
        let l = Pencil::l(col(&[1, 2]), (2, 2)).unwrap();
        let members = l.members(&f3);
        assert_eq!(members.len(), 9);
        assert!(is_adjacent_set(&members).unwrap());
        assert_eq!(maximal_adjacent_cover(&members).unwrap(), Some(l));
    }

    #[test]
    fn pencil_shape_checked() {
        assert!(Pencil::r(row(&[1, 0, 0]), (2, 2)).is_err());
        assert!(Pencil::l(row(&[1, 0]), (2, 2)).is_err());
    }

    #[test]
    fn orthocomplement_examples() {
        let f2 = f(2);
        let oc = orthocomplement(&f2, &row(&[1, 0]));
        assert_eq!(oc.as_point(), Some(col(&[0, 1])));
        let f3 = f(3);
        let oc = orthocomplement(&f3, &row(&[1, 1]));
        assert_eq!(oc.as_point(), Some(col(&[1, 2])));
        for d in proj_points(&f3, 2, Side::Row) {
            let back = orthocomplement(&f3, &d).orthocomplement(&f3);
            assert_eq!(back.as_point(), Some(d));
        }
        for d in proj_points(&f3, 3, Side::Row) {
            let oc = orthocomplement(&f3, &d);
            assert_eq!(oc.dim(), 2);
            assert_eq!(oc.orthocomplement(&f3), Subspace::of_point(&d));
        }
    }

    #[test]
    fn idempotent_examples() {
        let f2 = f(2);
        assert_eq!(
            rank1_idempotent_in(&f2, &row(&[1, 0]), &col(&[1, 0])),
            Some(Matrix::unit(&f2, 2, 2, 0, 0))
        );
        assert_eq!(rank1_idempotent_in(&f2, &row(&[1, 0]), &col(&[0, 1])), None);

        let f3 = f(3);
        let count = proj_points(&f3, 2, Side::Row)
            .iter()
            .flat_map(|d| {
                proj_points(&f3, 2, Side::Col)
                    .into_iter()
                    .map(move |e| (d.clone(), e))
            })
            .filter(|(d, e)| rank1_idempotent_in(&f3, d, e).is_some())
            .count();
        assert_eq!(count, 12);

        assert_eq!(
            idempotents_of_rank(&f2, 2, 2).unwrap(),
            vec![Matrix::identity(&f2, 2)]
        );
        assert_eq!(
            idempotents_of_rank(&f2, 2, 0).unwrap(),
            vec![Matrix::zeros(&f2, 2, 2)]
        );
        assert_eq!(idempotents_of_rank(&f2, 2, 1).unwrap().len(), 6);
    }

    #[test]
    fn adjacent_in_pencil_examples() {
        let f2 = f(2);
        let id = Matrix::identity(&f2, 2);
        let r = Pencil::r(row(&[1, 0]), (2, 2)).unwrap();
        let adj = adjacent_in_pencil(&r, &id).unwrap();
        let expected = vec![
            Matrix::from_rows(&f2, &[vec![1, 0], vec![0, 0]]).unwrap(),
            Matrix::from_rows(&f2, &[vec![1, 0], vec![1, 0]]).unwrap(),
        ];
        assert_eq!(adj, expected);
        let f3 = f(3);
        let adj = adjacent_in_pencil(&r, &Matrix::identity(&f3, 2)).unwrap();
        assert_eq!(adj.len(), 3);
        assert!(adj.iter().all(|m| !m.is_zero()));
        let coords: Vec<Vec<Elem>> = adj.iter().map(|m| r.coordinates(m).unwrap()).collect();
        assert!(is_affine_line(&f3, &coords));
        assert!(matches!(
            adjacent_in_pencil(&r, &Matrix::unit(&f2, 2, 2, 0, 0)),
            Err(Error::RankMismatch {
                expected: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn cover_examples() {
        let f2 = f(2);
        let zero = Matrix::zeros(&f2, 2, 2);
        let cover = maximal_adjacent_cover(std::slice::from_ref(&zero))
            .unwrap()
            .unwrap();
        assert_eq!(cover.kind, PencilKind::R);
        assert_eq!(cover.point, row(&[1, 0]));

        let e11 = Matrix::unit(&f2, 2, 2, 0, 0);
        let e22 = Matrix::unit(&f2, 2, 2, 1, 1);
        let e21 = Matrix::unit(&f2, 2, 2, 1, 0);
        let s = vec![zero.clone(), e11.clone(), e22];
        assert!(!is_adjacent_set(&s).unwrap());
        assert_eq!(maximal_adjacent_cover(&s), Err(Error::NotAdjacentSet));
        // {0, E11} fits both kinds; R wins
        let cover = maximal_adjacent_cover(&[zero.clone(), e11.clone()])
            .unwrap()
            .unwrap();
        assert_eq!(cover.kind, PencilKind::R);
        // {0, E11, E21} only fits L? no: both rows lie in <e_1>, so R_<e_1>
        let cover = maximal_adjacent_cover(&[zero.clone(), e11.clone(), e21])
            .unwrap()
            .unwrap();
        assert_eq!(cover, Pencil::r(row(&[1, 0]), (2, 2)).unwrap());
        let e12 = Matrix::unit(&f2, 2, 2, 0, 1);
        let cover = maximal_adjacent_cover(&[zero, e11.clone(), e12])
            .unwrap()
            .unwrap();
        assert_eq!(cover, Pencil::l(col(&[1, 0]), (2, 2)).unwrap());
        assert_eq!(maximal_adjacent_cover(&[e11]), Err(Error::MissingZero));
    }

    #[test]
    fn affine_line_detection() {
        let f3 = f(3);
        let v = |a: u32, b: u32| vec![Elem(a), Elem(b)];
        assert!(is_affine_line(&f3, &[v(1, 0), v(1, 1), v(1, 2)]));
        assert!(!is_affine_line(&f3, &[v(1, 0), v(1, 1), v(2, 2)]));
        assert!(!is_affine_line(&f3, &[v(1, 0), v(1, 1)]));
    }
}
