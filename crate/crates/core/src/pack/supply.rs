//! Copy suppliers: fresh vertex-disjoint copies of gadgets in a host.

use crate::error::{Error, Result};
use crate::gadget::GadgetPacking;
use crate::graph::Vertex;
use crate::host::BlowupHost;
use crate::realisation::Realisation;

/// Source of fresh host vertices, class by class. Vertices handed out are
/// never handed out again.
pub trait CopySupplier {
    fn host(&self) -> &BlowupHost;
    /// Unused vertices left in class `j`.
    fn remaining(&self, j: usize) -> usize;
    /// `count` unused vertices of class `j`, now marked used.
    fn take(&mut self, j: usize, count: usize) -> Result<Vec<Vertex>>;

    fn remaining_sizes(&self) -> Vec<usize> {
        (0..self.host().class_count()).map(|j| self.remaining(j)).collect()
    }

    /// Vertices for a complete gadget whose class `i` lies in host class
    /// `placement[i].0` with `placement[i].1` vertices. Several entries may
    /// name the same host class.
    fn take_placement(&mut self, placement: &[(usize, usize)]) -> Result<Vec<Vec<Vertex>>> {
        let mut need = vec![0usize; self.host().class_count()];
        for &(j, c) in placement {
            need[j] += c;
        }
        if let Some(j) = (0..need.len()).find(|&j| need[j] > self.remaining(j)) {
            return Err(Error::Defect(format!(
                "supplier exhausted: class {j} has {} unused vertices, {} requested",
                self.remaining(j),
                need[j]
            )));
        }
        placement.iter().map(|&(j, c)| self.take(j, c)).collect()
    }
}

/// Hands out the lowest unused vertices of each class of a blow-up host.
#[derive(Clone, Debug)]
pub struct FreshVertices {
    host: BlowupHost,
    next: Vec<usize>,
}

impl FreshVertices {
    pub fn new(host: BlowupHost) -> Self {
        let next = vec![0; host.class_count()];
        FreshVertices { host, next }
    }
}

impl CopySupplier for FreshVertices {
    fn host(&self) -> &BlowupHost {
        &self.host
    }

    fn remaining(&self, j: usize) -> usize {
        self.host.sizes()[j] - self.next[j]
    }

    fn take(&mut self, j: usize, count: usize) -> Result<Vec<Vertex>> {
        if count > self.remaining(j) {
            return Err(Error::Defect(format!(
                "supplier exhausted: class {j} has {} unused vertices, {count} requested",
                self.remaining(j)
            )));
        }
        let start = self.host.class_range(j).start + self.next[j];
        self.next[j] += count;
        Ok((start..start + count).collect())
    }
}

/// One pattern copy sending realisation class `i` to host class `classes[i]`.
pub fn place_realisation(
    supplier: &mut dyn CopySupplier,
    b: usize,
    realisation: &Realisation,
    classes: &[usize],
) -> Result<Vec<Vertex>> {
    let placement: Vec<(usize, usize)> = realisation
        .classes
        .iter()
        .zip(classes)
        .map(|(c, &j)| (j, c.len()))
        .collect();
    let verts = supplier.take_placement(&placement)?;
    let mut map = vec![usize::MAX; b];
    for (class, vs) in realisation.classes.iter().zip(&verts) {
        for (&u, &v) in class.iter().zip(vs) {
            map[u] = v;
        }
    }
    Ok(map)
}

/// Transfers a gadget's pattern copies onto host vertices, where gadget
/// class `i` is realised by `class_vertices[i]` in order.
pub fn transfer_gadget(gp: &GadgetPacking, class_vertices: &[Vec<Vertex>]) -> Vec<Vec<Vertex>> {
    let host = &gp.gadget.host;
    gp.packing
        .copies
        .iter()
        .map(|copy| {
            copy.iter()
                .map(|&v| {
                    let c = host.class_of(v);
                    class_vertices[c][v - host.class_range(c).start]
                })
                .collect()
        })
        .collect()
}

/// Places a whole gadget: gadget class `i` goes to host class `targets[i]`.
pub fn place_gadget(
    supplier: &mut dyn CopySupplier,
    gp: &GadgetPacking,
    targets: &[usize],
) -> Result<Vec<Vec<Vertex>>> {
    let placement: Vec<(usize, usize)> = targets
        .iter()
        .zip(gp.gadget.class_sizes())
        .map(|(&j, &c)| (j, c))
        .collect();
    let verts = supplier.take_placement(&placement)?;
    Ok(transfer_gadget(gp, &verts))
}
