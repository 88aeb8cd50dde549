//! A matrix space with every member materialized and ranked, so sweeps can
//! work on integer codes instead of re-reducing matrices.

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::{Matrix, MatrixSpace};

/// Largest space we are willing to materialize.
pub const MAX_INDEXED: u64 = 1 << 20;

pub struct IndexedSpace {
    space: MatrixSpace,
    len: usize,
    mats: Vec<Matrix>,
    ranks: Vec<u8>,
    // place values q^i of the entry positions
    place: Vec<u64>,
}

impl IndexedSpace {
    pub fn new(field: &Field, rows: usize, cols: usize) -> Result<Self> {
        let space = MatrixSpace::new(field, rows, cols)?;
        if space.size() > MAX_INDEXED {
            return Err(Error::SpaceTooLarge);
        }
        let mats: Vec<Matrix> = space.iter().collect();
        let ranks = mats.iter().map(|a| a.rank() as u8).collect();
        let q = field.order() as u64;
        let place = (0..rows * cols).map(|i| q.pow(i as u32)).collect();
        Ok(IndexedSpace {
            len: mats.len(),
            space,
            mats,
            ranks,
            place,
        })
    }

    pub fn field(&self) -> &Field {
        self.space.field()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.space.shape()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn matrix(&self, code: usize) -> &Matrix {
        &self.mats[code]
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.mats
    }

    pub fn rank(&self, code: usize) -> usize {
        self.ranks[code] as usize
    }

    pub fn codes_of_rank(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&c| self.rank(c) == r)
    }

    fn combine(&self, a: usize, b: usize, op: impl Fn(Elem, Elem) -> Elem) -> usize {
        let ea = self.mats[a].entries();
        let eb = self.mats[b].entries();
        ea.iter()
            .zip(eb)
            .zip(&self.place)
            .map(|((&x, &y), &pv)| op(x, y).0 as u64 * pv)
            .sum::<u64>() as usize
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        let f = self.field();
        self.combine(a, b, |x, y| f.sub(x, y))
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let f = self.field();
        self.combine(a, b, |x, y| f.add(x, y))
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        self.rank(self.sub(a, b))
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.distance(a, b) == 1
    }

    pub fn code_of(&self, a: &Matrix) -> usize {
        a.code() as usize
    }
}
