use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::TranspileError;
use crate::target::CouplingMap;

/// Injective assignment of logical qubits to physical qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    logical_to_physical: Vec<usize>,
    physical_to_logical: Vec<Option<usize>>,
}

impl Layout {
    pub fn new(logical_to_physical: Vec<usize>, num_physical: usize) -> Result<Self, TranspileError> {
        let mut physical_to_logical = vec![None; num_physical];
        for (l, &p) in logical_to_physical.iter().enumerate() {
            if p >= num_physical || physical_to_logical[p].is_some() {
                return Err(TranspileError::InvalidLayout(format!(
                    "logical {l} -> physical {p} (of {num_physical})"
                )));
            }
            physical_to_logical[p] = Some(l);
        }
        Ok(Self {
            logical_to_physical,
            physical_to_logical,
        })
    }

    /// Logical `i` on physical `i`.
    pub fn trivial(num_logical: usize, num_physical: usize) -> Result<Self, TranspileError> {
        check_capacity(num_logical, num_physical)?;
        Self::new((0..num_logical).collect(), num_physical)
    }

    /// Uniformly random injective layout drawn from a seeded generator.
    pub fn random(num_logical: usize, num_physical: usize, seed: u64) -> Result<Self, TranspileError> {
        check_capacity(num_logical, num_physical)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut phys: Vec<usize> = (0..num_physical).collect();
        phys.shuffle(&mut rng);
        phys.truncate(num_logical);
        Self::new(phys, num_physical)
    }

    /// Random layout on a connected region: grows a region of `num_logical`
    /// physical qubits from a random root by adding random frontier qubits,
    /// then assigns logical qubits to it in random order.
    pub fn random_connected(num_logical: usize, coupling: &CouplingMap, seed: u64) -> Result<Self, TranspileError> {
        let m = coupling.num_qubits();
        check_capacity(num_logical, m)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut region = Vec::with_capacity(num_logical);
        let mut inside = vec![false; m];
        let mut frontier: Vec<usize> = Vec::new();
        while region.len() < num_logical {
            let next = if frontier.is_empty() {
                let free: Vec<usize> = (0..m).filter(|&p| !inside[p]).collect();
                *free.choose(&mut rng).expect("capacity checked")
            } else {
                frontier.swap_remove(rng.random_range(0..frontier.len()))
            };
            if inside[next] {
                continue;
            }
            inside[next] = true;
            region.push(next);
            frontier.extend(coupling.neighbors(next).iter().filter(|&&q| !inside[q]));
        }
        region.shuffle(&mut rng);
        Self::new(region, m)
    }

    pub fn num_logical(&self) -> usize {
        self.logical_to_physical.len()
    }

    pub fn num_physical(&self) -> usize {
        self.physical_to_logical.len()
    }

    pub fn physical(&self, logical: usize) -> usize {
        self.logical_to_physical[logical]
    }

    pub fn logical(&self, physical: usize) -> Option<usize> {
        self.physical_to_logical[physical]
    }

    pub fn logical_to_physical(&self) -> &[usize] {
        &self.logical_to_physical
    }
}

pub(crate) fn check_capacity(logical: usize, physical: usize) -> Result<(), TranspileError> {
    if logical > physical {
        Err(TranspileError::Capacity { logical, physical })
    } else {
        Ok(())
    }
}
