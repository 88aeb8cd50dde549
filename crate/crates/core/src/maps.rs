//! Standard adjacency preservers, fully tabulated maps between matrix
//! spaces, exhaustive preservation checks and the degeneracy test.
//!
//! A standard map sends `A` to `T·[A^τ 0; 0 0]·S + R`, or to the same
//! expression with `^t(A^τ)` in the corner when `transposed` is set. Over a
//! commutative field that covers both the automorphism and the
//! anti-automorphism forms.
//!
//! A map `φ` is degenerate at `A` when there are a column point `x` and a
//! row point `y` with `φ(B) − φ(A) ∈ R(y) ∪ L(^tx)` for every `B` in the unit
//! ball around `A`; it is degenerate when that holds at every `A`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldAutomorphism, FieldDescriptor};
use crate::geometry::{proj_points, rank_one_points, ProjectivePoint, Side};
use crate::matrix::{self, Matrix, MatrixDoc, MatrixSpace};

pub type Shape = (usize, usize);

/// The data `(T, S, τ, transposed, R)` of a standard map `M_{m×n} → M_{p×q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardMapSpec {
    pub t: Matrix,
    pub s: Matrix,
    pub aut: FieldAutomorphism,
    pub transposed: bool,
    pub translation: Matrix,
    pub domain: Shape,
    pub codomain: Shape,
}

/// Serialized form of a [`StandardMapSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDoc {
    pub field: FieldDescriptor,
    pub domain: [usize; 2],
    pub codomain: [usize; 2],
    pub t: MatrixDoc,
    pub s: MatrixDoc,
    pub aut: u32,
    pub transposed: bool,
    pub r: MatrixDoc,
}

impl StandardMapSpec {
    pub fn new(
        t: Matrix,
        s: Matrix,
        aut: FieldAutomorphism,
        transposed: bool,
        translation: Matrix,
        domain: Shape,
    ) -> Result<Self> {
        let spec = StandardMapSpec {
            codomain: (t.rows(), s.cols()),
            t,
            s,
            aut,
            transposed,
            translation,
            domain,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn field(&self) -> &Field {
        self.t.field()
    }

    fn validate(&self) -> Result<()> {
        let f = self.t.field();
        if self.s.field() != f || self.translation.field() != f {
            return Err(Error::FieldMismatch);
        }
        let (m, n) = self.domain;
        let (p, q) = self.codomain;
        if m == 0 || n == 0 {
            return Err(Error::EmptyShape(m, n));
        }
        if self.t.shape() != (p, p) || !self.t.is_invertible() {
            return Err(Error::InvalidSpec(format!(
                "T must be an invertible {p}x{p} matrix"
            )));
        }
        if self.s.shape() != (q, q) || !self.s.is_invertible() {
            return Err(Error::InvalidSpec(format!(
                "S must be an invertible {q}x{q} matrix"
            )));
        }
        if self.translation.shape() != (p, q) {
            return Err(Error::InvalidSpec(format!("R must be a {p}x{q} matrix")));
        }
        let (bm, bn) = if self.transposed { (n, m) } else { (m, n) };
        if p < bm || q < bn {
            return Err(Error::InvalidSpec(format!(
                "a {bm}x{bn} block does not fit in a {p}x{q} codomain"
            )));
        }
        if self.aut.j >= f.degree() {
            return Err(Error::InvalidSpec(format!(
                "automorphism exponent {} out of range",
                self.aut.j
            )));
        }
        Ok(())
    }

    /// The embedding `A ↦ [A 0; 0 0]` of `M_{m×n}` into `M_{p×q}`.
    pub fn embedding(field: &Field, domain: Shape, codomain: Shape) -> Result<Self> {
        StandardMapSpec::new(
            Matrix::identity(field, codomain.0),
            Matrix::identity(field, codomain.1),
            FieldAutomorphism::IDENTITY,
            false,
            Matrix::zeros(field, codomain.0, codomain.1),
            domain,
        )
    }

    pub fn identity(field: &Field, shape: Shape) -> Result<Self> {
        StandardMapSpec::embedding(field, shape, shape)
    }

    /// A uniformly drawn spec: random invertible `T`, `S`, random
    /// automorphism, orientation and translation. An orientation that does
    /// not fit the codomain is never drawn.
    pub fn random<R: Rng + ?Sized>(
        field: &Field,
        domain: Shape,
        codomain: Shape,
        rng: &mut R,
    ) -> Result<Self> {
        let (m, n) = domain;
        let (p, q) = codomain;
        let straight = p >= m && q >= n;
        let flipped = p >= n && q >= m;
        let transposed = match (straight, flipped) {
            (true, true) => rng.gen_bool(0.5),
            (true, false) => false,
            (false, true) => true,
            (false, false) => {
                return Err(Error::InvalidSpec(format!(
                    "M_{m}x{n} does not embed into M_{p}x{q}"
                )))
            }
        };
        let aut = FieldAutomorphism {
            j: rng.gen_range(0..field.degree()),
        };
        StandardMapSpec::new(
            random_invertible(field, p, rng),
            random_invertible(field, q, rng),
            aut,
            transposed,
            random_matrix(field, p, q, rng),
            domain,
        )
    }

    pub fn eval(&self, a: &Matrix) -> Result<Matrix> {
        if a.shape() != self.domain {
            return Err(Error::ShapeMismatch {
                expected: self.domain,
                found: a.shape(),
            });
        }
        if a.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        let mut block = a.apply_entrywise(self.aut);
        if self.transposed {
            block = block.transpose();
        }
        let (p, q) = self.codomain;
        self.t
            .mul(&block.embed(p, q)?)?
            .mul(&self.s)?
            .add(&self.translation)
    }

    pub fn to_doc(&self) -> SpecDoc {
        SpecDoc {
            field: self.field().descriptor().clone(),
            domain: [self.domain.0, self.domain.1],
            codomain: [self.codomain.0, self.codomain.1],
            t: self.t.to_doc(),
            s: self.s.to_doc(),
            aut: self.aut.j,
            transposed: self.transposed,
            r: self.translation.to_doc(),
        }
    }

    pub fn from_doc(doc: &SpecDoc) -> Result<Self> {
        let field = Field::new(doc.field.clone())?;
        let spec = StandardMapSpec::new(
            Matrix::from_doc(&field, &doc.t)?,
            Matrix::from_doc(&field, &doc.s)?,
            field.automorphism(doc.aut)?,
            doc.transposed,
            Matrix::from_doc(&field, &doc.r)?,
            (doc.domain[0], doc.domain[1]),
        )?;
        if spec.codomain != (doc.codomain[0], doc.codomain[1]) {
            return Err(Error::InvalidSpec(
                "codomain disagrees with the shapes of T and S".into(),
            ));
        }
        Ok(spec)
    }
}

impl Serialize for StandardMapSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

pub fn random_matrix<R: Rng + ?Sized>(
    field: &Field,
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Matrix {
    let entries = (0..rows * cols)
        .map(|_| crate::field::Elem(rng.gen_range(0..field.order())))
        .collect();
    Matrix::new(field, rows, cols, entries).expect("entries drawn in range")
}

pub fn random_invertible<R: Rng + ?Sized>(field: &Field, n: usize, rng: &mut R) -> Matrix {
    loop {
        let a = random_matrix(field, n, n, rng);
        if a.is_invertible() {
            return a;
        }
    }
}

/// A total map `M_{m×n} → M_{p×q}` stored as the image of each domain
/// matrix, indexed by its code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TabulatedMap {
    field: Field,
    domain: Shape,
    codomain: Shape,
    outputs: Vec<Matrix>,
}

/// Serialized map table: `outputs[i]` is the image of the domain matrix
/// with code `i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub field: FieldDescriptor,
    pub domain: [usize; 2],
    pub codomain: [usize; 2],
    pub outputs: Vec<MatrixDoc>,
}

impl TabulatedMap {
    pub fn new(
        field: &Field,
        domain: Shape,
        codomain: Shape,
        outputs: Vec<Matrix>,
    ) -> Result<Self> {
        let size = matrix::space_size(field, domain.0, domain.1)?;
        matrix::space_size(field, codomain.0, codomain.1)?;
        if outputs.len() as u64 != size {
            return Err(Error::InvalidTable(format!(
                "{} outputs for a domain of {size} matrices",
                outputs.len()
            )));
        }
        if let Some((i, bad)) = outputs
            .iter()
            .enumerate()
            .find(|(_, o)| o.shape() != codomain || o.field() != field)
        {
            return Err(Error::InvalidTable(format!(
                "output {i} is a {:?} matrix, expected {codomain:?} over the table's field",
                bad.shape()
            )));
        }
        Ok(TabulatedMap {
            field: field.clone(),
            domain,
            codomain,
            outputs,
        })
    }

    pub fn from_fn(
        field: &Field,
        domain: Shape,
        codomain: Shape,
        f: impl Fn(&Matrix) -> Result<Matrix>,
    ) -> Result<Self> {
        let space = MatrixSpace::new(field, domain.0, domain.1)?;
        let outputs = space.iter().map(|a| f(&a)).collect::<Result<Vec<_>>>()?;
        TabulatedMap::new(field, domain, codomain, outputs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn domain(&self) -> Shape {
        self.domain
    }

    pub fn codomain(&self) -> Shape {
        self.codomain
    }

    pub fn outputs(&self) -> &[Matrix] {
        &self.outputs
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn domain_space(&self) -> MatrixSpace {
        MatrixSpace::new(&self.field, self.domain.0, self.domain.1)
            .expect("validated at construction")
    }

    pub fn image(&self, a: &Matrix) -> &Matrix {
        &self.outputs[a.code() as usize]
    }

    pub fn image_of_code(&self, code: u64) -> &Matrix {
        &self.outputs[code as usize]
    }

    /// `A ↦ φ(A) − shift`.
    pub fn translated(&self, shift: &Matrix) -> Result<Self> {
        let outputs = self
            .outputs
            .iter()
            .map(|o| o.sub(shift))
            .collect::<Result<Vec<_>>>()?;
        TabulatedMap::new(&self.field, self.domain, self.codomain, outputs)
    }

    /// `A ↦ ^tφ(A)`.
    pub fn transposed_outputs(&self) -> Self {
        TabulatedMap {
            field: self.field.clone(),
            domain: self.domain,
            codomain: (self.codomain.1, self.codomain.0),
            outputs: self.outputs.iter().map(Matrix::transpose).collect(),
        }
    }

    /// Distinct images in code order.
    pub fn range(&self) -> Vec<Matrix> {
        let mut r = self.outputs.clone();
        r.sort_by_key(Matrix::code);
        r.dedup();
        r
    }

    pub fn to_doc(&self) -> TableDoc {
        TableDoc {
            field: self.field.descriptor().clone(),
            domain: [self.domain.0, self.domain.1],
            codomain: [self.codomain.0, self.codomain.1],
            outputs: self.outputs.iter().map(Matrix::to_doc).collect(),
        }
    }

    pub fn from_doc(doc: &TableDoc) -> Result<Self> {
        let field = Field::new(doc.field.clone())?;
        let outputs = doc
            .outputs
            .iter()
            .enumerate()
            .map(|(i, m)| {
                Matrix::from_doc(&field, m)
                    .map_err(|e| Error::InvalidTable(format!("output {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        TabulatedMap::new(
            &field,
            (doc.domain[0], doc.domain[1]),
            (doc.codomain[0], doc.codomain[1]),
            outputs,
        )
    }
}

impl Serialize for TabulatedMap {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.to_doc().serialize(serializer)
    }
}

pub fn tabulate(spec: &StandardMapSpec) -> Result<TabulatedMap> {
    TabulatedMap::from_fn(spec.field(), spec.domain, spec.codomain, |a| spec.eval(a))
}

/// Outcome of the exhaustive pair scan.
///
/// `first_violation` is the smallest code pair breaking forward
/// preservation; when forward preservation holds it is the smallest pair
/// breaking the converse direction, and `None` when both hold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreservationReport {
    pub preserves_adjacency: bool,
    pub preserves_both_directions: bool,
    pub contraction_ok: bool,
    pub first_violation: Option<(u64, u64)>,
}

#[derive(Clone, Copy, Default)]
struct PairScan {
    forward: Option<(u64, u64)>,
    backward: Option<(u64, u64)>,
    contraction: bool,
}

fn min_pair(a: Option<(u64, u64)>, b: Option<(u64, u64)>) -> Option<(u64, u64)> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

pub fn check_preserver(map: &TabulatedMap) -> PreservationReport {
    let space = map.domain_space();
    let domain: Vec<Matrix> = space.iter().collect();
    let outputs = map.outputs();
    let scan = (0..domain.len())
        .into_par_iter()
        .map(|i| {
            let mut s = PairScan {
                contraction: true,
                ..PairScan::default()
            };
            for j in i + 1..domain.len() {
                let dd = domain[i].sub(&domain[j]).expect("same space").rank();
                let dc = outputs[i].sub(&outputs[j]).expect("same space").rank();
                let pair = Some((i as u64, j as u64));
                if dd == 1 && dc != 1 && s.forward.is_none() {
                    s.forward = pair;
                }
                if dc == 1 && dd != 1 && s.backward.is_none() {
                    s.backward = pair;
                }
                if dc > dd {
                    s.contraction = false;
                }
            }
            s
        })
        .reduce(
            || PairScan {
                contraction: true,
                ..PairScan::default()
            },
            |a, b| PairScan {
                forward: min_pair(a.forward, b.forward),
                backward: min_pair(a.backward, b.backward),
                contraction: a.contraction && b.contraction,
            },
        );
    PreservationReport {
        preserves_adjacency: scan.forward.is_none(),
        preserves_both_directions: scan.forward.is_none() && scan.backward.is_none(),
        contraction_ok: scan.contraction,
        first_violation: scan.forward.or(scan.backward),
    }
}

/// `B(A, 1) = A + M^{≤1}`, ordered by the code of the rank ≤ 1 summand.
pub fn unit_ball(a: &Matrix) -> Vec<Matrix> {
    let space =
        MatrixSpace::new(a.field(), a.rows(), a.cols()).expect("matrix shapes are positive");
    space
        .rank_at_most_one()
        .iter()
        .map(|n| a.add(n).expect("same space"))
        .collect()
}

/// Witness of degeneracy at a point: the column point `x` and the row point
/// `y` with `φ(B(A,1)) ⊂ (φ(A) + R(y)) ∪ (φ(A) + L(^tx))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegeneracyWitness {
    pub x: ProjectivePoint,
    pub y: ProjectivePoint,
}

/// Smallest `(y, x)` in lexicographic order of canonical representatives
/// for which every image difference on the unit ball around `a` lies in
/// `R(y) ∪ L(^tx)`, or `None` when no such pair exists.
pub fn degenerate_at(map: &TabulatedMap, a: &Matrix) -> Option<DegeneracyWitness> {
    let space = map.domain_space();
    degenerate_at_with(map, a, &space.rank_at_most_one())
}

fn degenerate_at_with(
    map: &TabulatedMap,
    a: &Matrix,
    small: &[Matrix],
) -> Option<DegeneracyWitness> {
    let f = map.field();
    let (p, q) = map.codomain();
    let base = map.image(a);
    // (column point, row point) of each nonzero image difference
    let mut diffs: Vec<(ProjectivePoint, ProjectivePoint)> = Vec::new();
    for n in small {
        let b = a.add(n).expect("same space");
        let d = map.image(&b).sub(base).expect("same space");
        if d.is_zero() {
            continue;
        }
        match rank_one_points(&d) {
            Ok(pts) => diffs.push(pts),
            Err(_) => return None,
        }
    }
    diffs.sort();
    diffs.dedup();

    let rows = proj_points(f, q, Side::Row);
    let cols = proj_points(f, p, Side::Col);
    let Some((x1, y1)) = diffs.first().cloned() else {
        return Some(DegeneracyWitness {
            x: cols[0].clone(),
            y: rows[0].clone(),
        });
    };

    // Either y is the row point of the first difference, or x is its
    // column point. Collect every admissible completion of each option.
    let mut candidates: Vec<(ProjectivePoint, ProjectivePoint)> = Vec::new();
    let off_row: Vec<&ProjectivePoint> = diffs
        .iter()
        .filter(|(_, y)| *y != y1)
        .map(|(x, _)| x)
        .collect();
    match off_row.first() {
        None => candidates.extend(cols.iter().map(|x| (y1.clone(), x.clone()))),
        Some(&x) if off_row.iter().all(|&o| o == x) => candidates.push((y1.clone(), x.clone())),
        Some(_) => {}
    }
    let off_col: Vec<&ProjectivePoint> = diffs
        .iter()
        .filter(|(x, _)| *x != x1)
        .map(|(_, y)| y)
        .collect();
    match off_col.first() {
        None => candidates.extend(rows.iter().map(|y| (y.clone(), x1.clone()))),
        Some(&y) if off_col.iter().all(|&o| o == y) => candidates.push((y.clone(), x1.clone())),
        Some(_) => {}
    }
    candidates
        .into_iter()
        .min()
        .map(|(y, x)| DegeneracyWitness { x, y })
}

/// Degenerate at every domain matrix.
pub fn is_degenerate(map: &TabulatedMap) -> bool {
    let space = map.domain_space();
    let small = space.rank_at_most_one();
    (0..space.size())
        .into_par_iter()
        .all(|c| degenerate_at_with(map, &space.get(c).expect("in range"), &small).is_some())
}

/// `A ↦ ^t(vec A)·e_1` into `M_{mn×target_cols}`: injective, with range in
/// the single pencil `R_<e_1>`.
pub fn make_degenerate_vec(
    field: &Field,
    m: usize,
    n: usize,
    target_cols: usize,
) -> Result<TabulatedMap> {
    if target_cols == 0 {
        return Err(Error::EmptyShape(m * n, target_cols));
    }
    let e1 = ProjectivePoint::standard(Side::Row, target_cols, 0).rep;
    TabulatedMap::from_fn(field, (m, n), (m * n, target_cols), |a| {
        Ok(Matrix::outer(field, a.entries(), &e1))
    })
}
