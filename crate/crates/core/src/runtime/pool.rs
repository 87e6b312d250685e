//! Fixed pool of 4 KiB message blocks with a LIFO free list.

use crate::sema::types::BLOCK_SIZE;

/// Index of a block in the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockId(pub u32);

impl BlockId {
    /// Port slots hold `index + 1`; zero means empty.
    pub fn handle(self) -> u32 {
        self.0 + 1
    }

    pub fn from_handle(h: u32) -> Option<BlockId> {
        h.checked_sub(1).map(BlockId)
    }
}

#[derive(Debug, Clone)]
pub struct Block {
    pub bytes: Box<[u8]>,
    pub used: u32,
}

#[derive(Debug, Clone)]
pub struct BlockPool {
    blocks: Vec<Block>,
    allocated: Vec<bool>,
    /// Top of stack is the end; block 0 is handed out first.
    free: Vec<BlockId>,
}

pub const FILL: u8 = 0xAA;

impl BlockPool {
    pub fn new(capacity: u32) -> Self {
        BlockPool {
            blocks: (0..capacity)
                .map(|_| Block {
                    bytes: vec![0; BLOCK_SIZE as usize].into_boxed_slice(),
                    used: 0,
                })
                .collect(),
            allocated: vec![false; capacity as usize],
            free: (0..capacity).rev().map(BlockId).collect(),
        }
    }

    pub fn capacity(&self) -> u32 {
        self.blocks.len() as u32
    }

    pub fn free_count(&self) -> u32 {
        self.free.len() as u32
    }

    pub fn allocated_count(&self) -> u32 {
        self.allocated.iter().filter(|&&a| a).count() as u32
    }

    pub fn is_allocated(&self, id: BlockId) -> bool {
        self.allocated.get(id.0 as usize).copied().unwrap_or(false)
    }

    /// Takes the most recently freed block, filled with [`FILL`].
    pub fn alloc(&mut self, used: u32) -> Option<BlockId> {
        let id = self.free.pop()?;
        self.allocated[id.0 as usize] = true;
        let b = &mut self.blocks[id.0 as usize];
        b.bytes.fill(FILL);
        b.used = used;
        Some(id)
    }

    /// Returns a block to the front of the free list.
    ///
    /// # Panics
    /// If the block is not allocated.
    pub fn release(&mut self, id: BlockId) {
        assert!(self.is_allocated(id), "release of free block {}", id.0);
        self.allocated[id.0 as usize] = false;
        self.free.push(id);
    }

    pub fn block(&self, id: BlockId) -> &Block {
        &self.blocks[id.0 as usize]
    }

    pub fn block_mut(&mut self, id: BlockId) -> &mut Block {
        &mut self.blocks[id.0 as usize]
    }

    /// Allocated + free = capacity, and no block is on the free list twice
    /// or both free and allocated.
    pub fn audit(&self) -> Result<(), String> {
        let mut on_list = vec![false; self.blocks.len()];
        for id in &self.free {
            let i = id.0 as usize;
            if on_list[i] {
                return Err(format!("block {i} is on the free list twice"));
            }
            if self.allocated[i] {
                return Err(format!("block {i} is both free and allocated"));
            }
            on_list[i] = true;
        }
        let total = self.allocated_count() + self.free_count();
        if total != self.capacity() {
            return Err(format!(
                "allocated {} + free {} != capacity {}",
                self.allocated_count(),
                self.free_count(),
                self.capacity()
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifo_reuse() {
        let mut p = BlockPool::new(4);
        let a = p.alloc(1).unwrap();
        let b = p.alloc(1).unwrap();
        assert_eq!((a, b), (BlockId(0), BlockId(1)));
        p.release(a);
        assert_eq!(p.alloc(1), Some(a));
        p.audit().unwrap();
    }

    #[test]
    fn exhaustion_at_capacity() {
        let mut p = BlockPool::new(32);
        for _ in 0..32 {
            assert!(p.alloc(16).is_some());
        }
        assert_eq!(p.alloc(16), None);
        assert_eq!(p.allocated_count(), 32);
        p.audit().unwrap();
    }

    #[test]
    fn alloc_fills_pattern() {
        let mut p = BlockPool::new(1);
        let a = p.alloc(4096).unwrap();
        p.block_mut(a).bytes[7] = 1;
        p.release(a);
        let a = p.alloc(3).unwrap();
        assert!(p.block(a).bytes.iter().all(|&b| b == FILL));
        assert_eq!(p.block(a).used, 3);
    }

    #[test]
    fn handles_round_trip() {
        assert_eq!(BlockId::from_handle(0), None);
        assert_eq!(BlockId::from_handle(BlockId(5).handle()), Some(BlockId(5)));
    }
}
