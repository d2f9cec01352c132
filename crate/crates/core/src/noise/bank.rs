use rand::Rng;

use crate::error::{Error, Result};
use crate::mask::{connected_components, BinaryMask, Component};

/// A harvested building footprint, normalized so its bbox starts at `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BankShape {
    pub source_id: String,
    pub shape: Component,
}

/// Pool of building footprints cut from clean masks, used as false positives.
#[derive(Debug, Clone, Default)]
pub struct ShapeBank {
    shapes: Vec<BankShape>,
}

impl ShapeBank {
    pub fn new() -> Self {
        Self::default()
    }

    /// Harvests every connected component of every mask, in input order.
    pub fn from_masks<'a, I>(masks: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a BinaryMask)>,
    {
        let mut bank = Self::new();
        for (id, mask) in masks {
            for comp in connected_components(mask) {
                bank.push(id, &comp);
            }
        }
        bank
    }

    pub fn push(&mut self, source_id: &str, component: &Component) {
        self.shapes.push(BankShape {
            source_id: source_id.to_owned(),
            shape: component.moved_to(0, 0),
        });
    }

    pub fn len(&self) -> usize {
        self.shapes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&BankShape> {
        self.shapes.get(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &BankShape> {
        self.shapes.iter()
    }

    /// Draws a bank index uniformly among shapes not harvested from `exclude`.
    pub(crate) fn draw<R: Rng + ?Sized>(
        &self,
        exclude: Option<&str>,
        rng: &mut R,
    ) -> Result<usize> {
        let target = exclude.unwrap_or_default().to_owned();
        if self.shapes.is_empty() {
            return Err(Error::EmptyShapeBank(target));
        }
        let eligible = |i: usize| exclude.is_none_or(|id| self.shapes[i].source_id != id);
        // rejection first; the filtered list is only built when that keeps failing
        for _ in 0..32 {
            let i = rng.random_range(0..self.shapes.len());
            if eligible(i) {
                return Ok(i);
            }
        }
        let pool: Vec<usize> = (0..self.shapes.len()).filter(|&i| eligible(i)).collect();
        if pool.is_empty() {
            return Err(Error::EmptyShapeBank(target));
        }
        Ok(pool[rng.random_range(0..pool.len())])
    }
}
