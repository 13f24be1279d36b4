use crate::partitions::InputSpace;

/// Inputs with some bit positions pinned; exactly the inputs reaching a
/// node of a tree that never re-queries a bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Subcube {
    /// Bit `i` set when position `i` is fixed.
    fixed: u32,
    /// Bit `i` holds the pinned value of position `i`.
    value: u32,
}

impl Subcube {
    pub fn full(_space: InputSpace) -> Self {
        Subcube { fixed: 0, value: 0 }
    }

    pub fn constraint(&self, bit: u32) -> Option<bool> {
        (self.fixed >> bit & 1 == 1).then_some(self.value >> bit & 1 == 1)
    }

    pub fn is_free(&self, bit: u32) -> bool {
        self.constraint(bit).is_none()
    }

    pub fn restrict(&self, bit: u32, v: bool) -> Self {
        Subcube { fixed: self.fixed | 1 << bit, value: (self.value & !(1 << bit)) | (v as u32) << bit }
    }

    pub fn free_bits(&self, space: InputSpace) -> impl Iterator<Item = u32> + '_ {
        (0..space.bits()).filter(|&b| self.is_free(b))
    }

    pub fn contains(&self, space: InputSpace, x: u32) -> bool {
        (0..space.bits()).all(|b| self.constraint(b).is_none_or(|v| space.bit(x, b) == v))
    }

    /// Members in numeric order.
    pub fn inputs(&self, space: InputSpace) -> Vec<u32> {
        space.inputs().filter(|&x| self.contains(space, x)).collect()
    }
}
