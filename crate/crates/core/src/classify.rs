//! Deciding whether a tabulated adjacency preserver is standard or
//! degenerate, and recovering `(T, S, τ, transposed, R)` in the standard case.
//!
//! After subtracting `R = φ(0)`, every pencil `R_d` is carried into a single
//! pencil of the codomain, and the kind of that pencil is the same for all
//! `d`: either rows go to rows (case (i)) or rows go to columns (case (ii)).
//! In case (ii) we work with `A ↦ ^tφ(A)`, which is in case (i). There the
//! map is pinned down by the images of scalar multiples of the matrix units:
//! `φ(a·E_{i,j}) = t_i·τ(a)·s_j`, where `t_i` are the first columns of `T`
//! and `s_j` the first rows of `S`. The fitted spec is re-tabulated and
//! compared against the whole input table before it is returned.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Elem, Field, FieldAutomorphism};
use crate::geometry::{proj_points, rank_one_points, Pencil, PencilKind, ProjectivePoint, Side};
use crate::maps::{check_preserver, is_degenerate, tabulate, StandardMapSpec, TabulatedMap};
use crate::matrix::{leading_index, Matrix};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    /// Row pencils go to row pencils.
    #[serde(rename = "i")]
    RowsToRows,
    /// Row pencils go to column pencils.
    #[serde(rename = "ii")]
    RowsToColumns,
}

/// Where each pencil of the domain is sent: `alpha` on row points (`R_d`),
/// `beta` on column points (`L_e`). The side of an image point tells the
/// kind of the image pencil.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PencilAction {
    pub alpha: Vec<(ProjectivePoint, ProjectivePoint)>,
    pub beta: Vec<(ProjectivePoint, ProjectivePoint)>,
    pub case: Case,
}

impl PencilAction {
    pub fn alpha_injective(&self) -> bool {
        injective(&self.alpha)
    }

    pub fn beta_injective(&self) -> bool {
        injective(&self.beta)
    }
}

fn injective(table: &[(ProjectivePoint, ProjectivePoint)]) -> bool {
    let mut images: Vec<&ProjectivePoint> = table.iter().map(|(_, to)| to).collect();
    images.sort();
    images.windows(2).all(|w| w[0] != w[1])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Standard(StandardMapSpec),
    Degenerate,
    /// A side of length one on the domain or codomain: only the degeneracy
    /// predicate is evaluated and it came out false.
    UnclassifiedSmall,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub action: Option<PencilAction>,
}

impl ClassificationResult {
    pub fn is_standard(&self) -> bool {
        matches!(self.verdict, Verdict::Standard(_))
    }

    pub fn spec(&self) -> Option<&StandardMapSpec> {
        match &self.verdict {
            Verdict::Standard(spec) => Some(spec),
            _ => None,
        }
    }
}

#[derive(Serialize)]
struct ResultDoc<'a> {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<&'a StandardMapSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    case: Option<Case>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<&'a [(ProjectivePoint, ProjectivePoint)]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<&'a [(ProjectivePoint, ProjectivePoint)]>,
}

impl Serialize for ClassificationResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let verdict = match self.verdict {
            Verdict::Standard(_) => "standard",
            Verdict::Degenerate => "degenerate",
            Verdict::UnclassifiedSmall => "unclassified_small",
        };
        ResultDoc {
            verdict,
            spec: self.spec(),
            case: self.action.as_ref().map(|a| a.case),
            alpha: self.action.as_ref().map(|a| a.alpha.as_slice()),
            beta: self.action.as_ref().map(|a| a.beta.as_slice()),
        }
        .serialize(serializer)
    }
}

/// Classifies an adjacency preserver. Tables that do not preserve adjacency
/// are refused with [`Error::NotAPreserver`].
pub fn classify(map: &TabulatedMap) -> Result<ClassificationResult> {
    let report = check_preserver(map);
    if let (false, Some((i, j))) = (report.preserves_adjacency, report.first_violation) {
        return Err(Error::NotAPreserver(i, j));
    }
    classify_preserver(map)
}

/// [`classify`] without the preservation scan, for callers that already
/// know the table preserves adjacency.
pub fn classify_preserver(map: &TabulatedMap) -> Result<ClassificationResult> {
    let (m, n) = map.domain();
    let (p, q) = map.codomain();
    let degenerate = is_degenerate(map);
    if m.min(n) == 1 || p.min(q) == 1 {
        let verdict = if degenerate {
            Verdict::Degenerate
        } else {
            Verdict::UnclassifiedSmall
        };
        return Ok(ClassificationResult {
            verdict,
            action: None,
        });
    }
    if degenerate {
        return Ok(ClassificationResult {
            verdict: Verdict::Degenerate,
            action: None,
        });
    }
    let (spec, action) = recover(map)?;
    Ok(ClassificationResult {
        verdict: Verdict::Standard(spec),
        action: Some(action),
    })
}

/// Runs the full recovery on an arbitrary table with all sides at least 2,
/// without consulting the degeneracy predicate. Succeeds exactly when the
/// table is a standard map.
pub fn recover(map: &TabulatedMap) -> Result<(StandardMapSpec, PencilAction)> {
    let (m, n) = map.domain();
    let (p, q) = map.codomain();
    if m.min(n) < 2 || p.min(q) < 2 {
        return Err(Error::RecoveryFailed(
            "recovery needs every side of length at least 2".into(),
        ));
    }
    let zero = map.domain_space().zero();
    let shift = map.image(&zero).clone();
    let centered = map.translated(&shift)?;
    let action = recover_alpha_beta(&centered)?;
    let mut spec = recover_standard(&centered, action.case)?;
    spec.translation = shift;
    if &tabulate(&spec)? != map {
        return Err(Error::RecoveryFailed(
            "fitted spec does not reproduce the table".into(),
        ));
    }
    Ok((spec, action))
}

/// Image pencil of the nonzero members of `pencil` under `map` (which fixes
/// 0), as a point whose side gives the kind.
fn pencil_image(map: &TabulatedMap, pencil: &Pencil) -> Result<ProjectivePoint> {
    let images: Vec<&Matrix> = pencil
        .members(map.field())
        .iter()
        .filter(|a| !a.is_zero())
        .map(|a| map.image(a))
        .collect();
    let mut points = Vec::with_capacity(images.len());
    for img in &images {
        let pts = rank_one_points(img).map_err(|_| {
            Error::IncoherentCase(format!(
                "{pencil:?} has an image {img:?} of rank other than 1"
            ))
        })?;
        points.push(pts);
    }
    let (col0, row0) = points[0].clone();
    if points.iter().all(|(_, r)| *r == row0) {
        Ok(row0)
    } else if points.iter().all(|(c, _)| *c == col0) {
        Ok(col0)
    } else {
        Err(Error::IncoherentCase(format!(
            "the image of {pencil:?} lies in no single pencil"
        )))
    }
}

/// Tabulates `α` and `β` for a map with `φ(0) = 0` and decides the case.
pub fn recover_alpha_beta(map: &TabulatedMap) -> Result<PencilAction> {
    let f = map.field();
    let (m, n) = map.domain();
    let zero = map.domain_space().zero();
    if !map.image(&zero).is_zero() {
        return Err(Error::RecoveryFailed("map must fix 0".into()));
    }
    let mut alpha = Vec::new();
    for d in proj_points(f, n, Side::Row) {
        let img = pencil_image(map, &Pencil::r(d.clone(), (m, n))?)?;
        alpha.push((d, img));
    }
    let mut beta = Vec::new();
    for e in proj_points(f, m, Side::Col) {
        let img = pencil_image(map, &Pencil::l(e.clone(), (m, n))?)?;
        beta.push((e, img));
    }
    let all = |t: &[(ProjectivePoint, ProjectivePoint)], side: Side| {
        t.iter().all(|(_, to)| to.side == side)
    };
    let case = if all(&alpha, Side::Row) && all(&beta, Side::Col) {
        Case::RowsToRows
    } else if all(&alpha, Side::Col) && all(&beta, Side::Row) {
        Case::RowsToColumns
    } else {
        return Err(Error::IncoherentCase(
            "row pencils are not sent to pencils of one kind".into(),
        ));
    };
    let action = PencilAction { alpha, beta, case };
    if !action.alpha_injective() || !action.beta_injective() {
        return Err(Error::RecoveryFailed(
            "pencil action is not injective".into(),
        ));
    }
    Ok(action)
}

/// Fits `(T, S, τ)` to a map with `φ(0) = 0` in the given case. The
/// returned spec has zero translation and is checked against the
/// matrix-unit images only; [`recover`] checks the full table.
pub fn recover_standard(map: &TabulatedMap, case: Case) -> Result<StandardMapSpec> {
    match case {
        Case::RowsToRows => fit_units(map),
        Case::RowsToColumns => {
            let fitted = fit_units(&map.transposed_outputs())?;
            // ^t(T·[A^τ 0;0 0]·S) = ^tS·[^t(A^τ) 0;0 0]·^tT
            StandardMapSpec::new(
                fitted.s.transpose(),
                fitted.t.transpose(),
                fitted.aut,
                true,
                fitted.translation.transpose(),
                fitted.domain,
            )
        }
    }
}

fn fit_units(map: &TabulatedMap) -> Result<StandardMapSpec> {
    let f = map.field();
    let (m, n) = map.domain();
    let (p, q) = map.codomain();
    let unit = |i: usize, j: usize, a: Elem| Matrix::unit(f, m, n, i, j).scale(a);
    let fail = |what: String| Error::RecoveryFailed(what);

    let (t1, s1) = map
        .image(&unit(0, 0, Elem::ONE))
        .rank_one_factor()
        .map_err(|e| fail(format!("image of E(1,1): {e}")))?;
    let i0 = leading_index(&t1).expect("nonzero factor");
    let j0 = leading_index(&s1).expect("nonzero factor");
    let t1_lead_inv = f.inv(t1[i0])?;

    let mut rows = vec![s1.clone()];
    for j in 1..n {
        let img = map.image(&unit(0, j, Elem::ONE));
        let s: Vec<Elem> = img.row(i0).iter().map(|&v| f.mul(v, t1_lead_inv)).collect();
        if &Matrix::outer(f, &t1, &s) != img {
            return Err(fail(format!("image of E(1,{}) is not t_1·s", j + 1)));
        }
        rows.push(s);
    }
    let mut cols = vec![t1.clone()];
    for i in 1..m {
        let img = map.image(&unit(i, 0, Elem::ONE));
        // s_1 has a 1 at j0
        let t = img.column(j0);
        if &Matrix::outer(f, &t, &s1) != img {
            return Err(fail(format!("image of E({},1) is not t·s_1", i + 1)));
        }
        cols.push(t);
    }

    let e11 = Matrix::outer(f, &t1, &s1);
    let scalar_action: Vec<Elem> = f
        .elements()
        .into_iter()
        .map(|a| {
            let img = map.image(&unit(0, 0, a));
            let tau = f.mul(img.get(i0, j0), t1_lead_inv);
            (img == &e11.scale(tau)).then_some(tau)
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| fail("images of a·E(1,1) leave the line of t_1·s_1".into()))?;
    let aut = match_automorphism(f, &scalar_action)?;

    for (i, t) in cols.iter().enumerate() {
        for (j, s) in rows.iter().enumerate() {
            let ts = Matrix::outer(f, t, s);
            for a in f.elements() {
                if map.image(&unit(i, j, a)) != &ts.scale(f.apply(aut, a)) {
                    return Err(fail(format!(
                        "cross term at ({}, {}) does not factor",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
    }

    let t = complete_basis(f, p, &cols).ok_or_else(|| fail("columns t_i are dependent".into()))?;
    let s = complete_basis(f, q, &rows).ok_or_else(|| fail("rows s_j are dependent".into()))?;
    StandardMapSpec::new(t.transpose(), s, aut, false, Matrix::zeros(f, p, q), (m, n))
}

/// Identifies the scalar action `a ↦ τ(a)` with a Frobenius power after
/// checking it is a unital ring automorphism.
fn match_automorphism(field: &Field, action: &[Elem]) -> Result<FieldAutomorphism> {
    let els = field.elements();
    let additive = els.iter().all(|&a| {
        els.iter().all(|&b| {
            action[field.add(a, b).0 as usize]
                == field.add(action[a.0 as usize], action[b.0 as usize])
        })
    });
    let multiplicative = els.iter().all(|&a| {
        els.iter().all(|&b| {
            action[field.mul(a, b).0 as usize]
                == field.mul(action[a.0 as usize], action[b.0 as usize])
        })
    });
    if !additive || !multiplicative || action[1] != Elem::ONE {
        return Err(Error::RecoveryFailed(
            "scalar action is not a field automorphism".into(),
        ));
    }
    field
        .automorphisms()
        .into_iter()
        .find(|&aut| {
            els.iter()
                .all(|&a| field.apply(aut, a) == action[a.0 as usize])
        })
        .ok_or(Error::FieldAutomorphismMismatch)
}

/// Extends independent vectors of `F^dim` to a basis by appending standard
/// basis vectors in index order, skipping dependent ones. Returns the basis
/// as the rows of a `dim×dim` matrix, or `None` if the input is dependent.
fn complete_basis(field: &Field, dim: usize, vectors: &[Vec<Elem>]) -> Option<Matrix> {
    let as_matrix = |vs: &[Vec<Elem>]| {
        Matrix::new(field, vs.len(), dim, vs.iter().flatten().copied().collect())
            .expect("vectors of length dim")
    };
    if vectors.len() > dim || as_matrix(vectors).rank() != vectors.len() {
        return None;
    }
    let mut basis = vectors.to_vec();
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        basis.push(ProjectivePoint::standard(Side::Row, dim, k).rep);
        if as_matrix(&basis).rank() != basis.len() {
            basis.pop();
        }
    }
    Some(as_matrix(&basis))
}

/// Kind of the image pencil recorded in an `alpha`/`beta` entry.
pub fn image_kind(point: &ProjectivePoint) -> PencilKind {
    match point.side {
        Side::Row => PencilKind::R,
        Side::Col => PencilKind::L,
    }
}
