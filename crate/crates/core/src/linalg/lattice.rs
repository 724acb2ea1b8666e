use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One coordinate direction of a tensor-product lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Axis {
    /// `res` nodes at `i·period/res`, wrapping around.
    Periodic { res: usize, period: f64 },
    /// `res` nodes at `i·length/(res−1)` including both end points, which are
    /// Dirichlet nodes.
    Dirichlet { res: usize, length: f64 },
}

impl Axis {
    pub fn res(&self) -> usize {
        match *self {
            Axis::Periodic { res, .. } | Axis::Dirichlet { res, .. } => res,
        }
    }

    pub fn spacing(&self) -> f64 {
        match *self {
            Axis::Periodic { res, period } => period / res as f64,
            Axis::Dirichlet { res, length } => length / (res - 1) as f64,
        }
    }

    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Axis::Periodic { .. })
    }
}

/// Row-major tensor-product lattice; the last axis varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    len: usize,
}

impl Lattice {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("lattice needs at least one axis".into()));
        }
        for a in &axes {
            let ok = match *a {
                Axis::Periodic { res, period } => res >= 1 && period > 0.0,
                Axis::Dirichlet { res, length } => res >= 3 && length > 0.0,
            };
            if !ok {
                return Err(Error::InvalidGrid(alloc::format!("bad axis {a:?}")));
            }
        }
        let mut strides = alloc::vec![0; axes.len()];
        let mut len = 1usize;
        for d in (0..axes.len()).rev() {
            strides[d] = len;
            len = len
                .checked_mul(axes[d].res())
                .ok_or_else(|| Error::InvalidGrid("lattice too large".into()))?;
        }
        Ok(Self { axes, strides, len })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    #[inline]
    pub fn index_along(&self, node: usize, axis: usize) -> usize {
        (node / self.strides[axis]) % self.axes[axis].res()
    }

    pub fn multi_index(&self, node: usize, out: &mut [usize]) {
        for (d, o) in out.iter_mut().enumerate() {
            *o = self.index_along(node, d);
        }
    }

    pub fn node(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(i, s)| i * s).sum()
    }

    pub fn coord(&self, node: usize, axis: usize) -> f64 {
        self.axes[axis].coord(self.index_along(node, axis))
    }

    /// Node reached by moving `step ∈ {−1, 0, 1}` along `axis`, wrapping on
    /// periodic axes; `None` when a Dirichlet axis would be left.
    #[inline]
    pub fn neighbor(&self, node: usize, axis: usize, step: isize) -> Option<usize> {
        if step == 0 {
            return Some(node);
        }
        let res = self.axes[axis].res();
        let i = self.index_along(node, axis);
        let stride = self.strides[axis];
        match self.axes[axis] {
            Axis::Periodic { .. } => {
                let j = if step > 0 {
                    if i + 1 == res { 0 } else { i + 1 }
                } else if i == 0 {
                    res - 1
                } else {
                    i - 1
                };
                Some(node - i * stride + j * stride)
            }
            Axis::Dirichlet { .. } => {
                if (step < 0 && i == 0) || (step > 0 && i + 1 == res) {
                    None
                } else if step > 0 {
                    Some(node + stride)
                } else {
                    Some(node - stride)
                }
            }
        }
    }

    /// Node `steps` positions away along `axis`; `None` when a Dirichlet
    /// axis would be left.
    pub fn offset(&self, node: usize, axis: usize, steps: isize) -> Option<usize> {
        let res = self.axes[axis].res() as isize;
        let i = self.index_along(node, axis) as isize;
        let stride = self.strides[axis];
        let j = match self.axes[axis] {
            Axis::Periodic { .. } => (i + steps).rem_euclid(res),
            Axis::Dirichlet { .. } => {
                let j = i + steps;
                if j < 0 || j >= res {
                    return None;
                }
                j
            }
        };
        Some(node - i as usize * stride + j as usize * stride)
    }

    /// Whether `node` lies on a Dirichlet face.
    #[inline]
    pub fn is_boundary(&self, node: usize) -> bool {
        self.axes.iter().enumerate().any(|(d, a)| match a {
            Axis::Dirichlet { res, .. } => {
                let i = self.index_along(node, d);
                i == 0 || i + 1 == *res
            }
            Axis::Periodic { .. } => false,
        })
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.is_boundary(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neighbors_wrap_and_stop() {
        let l = Lattice::new(alloc::vec![
            Axis::Periodic { res: 4, period: 1.0 },
            Axis::Dirichlet { res: 5, length: 1.0 },
        ])
        .unwrap();
        assert_eq!(l.len(), 20);
        let n = l.node(&[0, 2]);
        assert_eq!(l.neighbor(n, 0, -1), Some(l.node(&[3, 2])));
        assert_eq!(l.neighbor(l.node(&[1, 0]), 1, -1), None);
        assert_eq!(l.neighbor(l.node(&[1, 4]), 1, 1), None);
        assert!(l.is_boundary(l.node(&[2, 4])));
        assert!(!l.is_boundary(l.node(&[2, 3])));
        assert_eq!(l.boundary_mask().iter().filter(|b| **b).count(), 8);
        assert_eq!(l.axes()[1].spacing(), 0.25);
        assert_eq!(l.offset(n, 0, -3), Some(l.node(&[1, 2])));
        assert_eq!(l.offset(n, 1, 2), Some(l.node(&[0, 4])));
        assert_eq!(l.offset(n, 1, 3), None);
    }
}
