//! Flat little-endian 32-bit address space of the simulated target.
//!
//! | range                          | contents                      |
//! |--------------------------------|-------------------------------|
//! | `DATA_BASE..`                  | module instance data blocks   |
//! | `STACK_BASE..`                 | procedure frames              |
//! | `DUMMY_BASE..+4096`            | DATA of an empty port (NDEBUG) |
//! | `BLOCK_BASE + 4096 * i`        | message block `i`             |
//!
//! Every other address is external memory, served from the MMIO script.

use std::collections::BTreeMap;

use super::pool::{BlockId, BlockPool};
use crate::sema::types::BLOCK_SIZE;

pub const DATA_BASE: u32 = 0x0001_0000;
pub const STACK_BASE: u32 = 0x0100_0000;
pub const DUMMY_BASE: u32 = 0x3FFF_F000;
pub const BLOCK_BASE: u32 = 0x4000_0000;

/// An access to an unscripted external address in strict mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmioTrap {
    pub address: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmioWrite {
    pub address: u32,
    pub value: u64,
    pub cycle: u64,
}

#[derive(Debug, Clone, Default)]
pub struct Mmio {
    script: BTreeMap<u32, (Vec<i64>, usize)>,
    pub writes: Vec<MmioWrite>,
    pub strict: bool,
    pub cycle: u64,
}

impl Mmio {
    pub fn new(script: &BTreeMap<u32, Vec<i64>>, strict: bool) -> Self {
        Mmio {
            script: script.iter().map(|(&a, v)| (a, (v.clone(), 0))).collect(),
            writes: Vec::new(),
            strict,
            cycle: 0,
        }
    }

    /// Next scripted value; the last value repeats once the script runs out.
    pub fn read(&mut self, address: u32) -> Result<i64, MmioTrap> {
        match self.script.get_mut(&address) {
            Some((values, next)) => {
                let v = match values.get(*next) {
                    Some(&v) => {
                        *next += 1;
                        v
                    }
                    None => values.last().copied().unwrap_or(0),
                };
                Ok(v)
            }
            None if self.strict => Err(MmioTrap { address }),
            None => Ok(0),
        }
    }

    pub fn write(&mut self, address: u32, value: u64) -> Result<(), MmioTrap> {
        if self.strict && !self.script.contains_key(&address) {
            return Err(MmioTrap { address });
        }
        self.writes.push(MmioWrite {
            address,
            value,
            cycle: self.cycle,
        });
        Ok(())
    }
}

pub struct Memory {
    pub data: Vec<u8>,
    pub stack: Vec<u8>,
    pub dummy: Vec<u8>,
    pub pool: BlockPool,
    pub mmio: Mmio,
}

fn mask(width: u32) -> u64 {
    if width >= 8 {
        u64::MAX
    } else {
        (1u64 << (8 * width)) - 1
    }
}

impl Memory {
    pub fn new(data_size: u32, pool: BlockPool, mmio: Mmio) -> Self {
        Memory {
            data: vec![0; data_size as usize],
            stack: Vec::new(),
            dummy: vec![0; BLOCK_SIZE as usize],
            pool,
            mmio,
        }
    }

    pub fn block_address(id: BlockId) -> u32 {
        BLOCK_BASE + id.0 * BLOCK_SIZE
    }

    fn within(base: u32, size: usize, addr: u32, len: u32) -> Option<usize> {
        let off = addr.checked_sub(base)? as usize;
        (off + len as usize <= size).then_some(off)
    }

    /// Backing storage for `len` bytes at `addr`, or `None` for external memory.
    fn slice_mut(&mut self, addr: u32, len: u32) -> Option<&mut [u8]> {
        let l = len as usize;
        if let Some(o) = Self::within(DATA_BASE, self.data.len(), addr, len) {
            return Some(&mut self.data[o..o + l]);
        }
        if let Some(o) = Self::within(STACK_BASE, self.stack.len(), addr, len) {
            return Some(&mut self.stack[o..o + l]);
        }
        if let Some(o) = Self::within(DUMMY_BASE, self.dummy.len(), addr, len) {
            return Some(&mut self.dummy[o..o + l]);
        }
        let total = self.pool.capacity() as usize * BLOCK_SIZE as usize;
        if let Some(o) = Self::within(BLOCK_BASE, total, addr, len) {
            let (i, off) = (o / BLOCK_SIZE as usize, o % BLOCK_SIZE as usize);
            if off + l <= BLOCK_SIZE as usize {
                let b = self.pool.block_mut(BlockId(i as u32));
                return Some(&mut b.bytes[off..off + l]);
            }
        }
        None
    }

    pub fn read_uint(&mut self, addr: u32, width: u32) -> Result<u64, MmioTrap> {
        if let Some(s) = self.slice_mut(addr, width) {
            let mut buf = [0u8; 8];
            buf[..s.len()].copy_from_slice(s);
            return Ok(u64::from_le_bytes(buf));
        }
        Ok(self.mmio.read(addr)? as u64 & mask(width))
    }

    pub fn write_uint(&mut self, addr: u32, width: u32, value: u64) -> Result<(), MmioTrap> {
        if let Some(s) = self.slice_mut(addr, width) {
            s.copy_from_slice(&value.to_le_bytes()[..width as usize]);
            return Ok(());
        }
        self.mmio.write(addr, value & mask(width))
    }

    pub fn read_bytes(&mut self, addr: u32, len: u32) -> Result<Vec<u8>, MmioTrap> {
        if let Some(s) = self.slice_mut(addr, len) {
            return Ok(s.to_vec());
        }
        (0..len)
            .map(|i| self.read_uint(addr.wrapping_add(i), 1).map(|v| v as u8))
            .collect()
    }

    pub fn write_bytes(&mut self, addr: u32, bytes: &[u8]) -> Result<(), MmioTrap> {
        if let Some(s) = self.slice_mut(addr, bytes.len() as u32) {
            s.copy_from_slice(bytes);
            return Ok(());
        }
        for (i, &b) in bytes.iter().enumerate() {
            self.write_uint(addr.wrapping_add(i as u32), 1, b as u64)?;
        }
        Ok(())
    }

    /// Pushes a zeroed frame aligned to 8 and returns its address.
    pub fn push_frame(&mut self, size: u32) -> u32 {
        let start = self.stack.len().next_multiple_of(8);
        self.stack.resize(start + size as usize, 0);
        STACK_BASE + start as u32
    }

    pub fn pop_frame(&mut self, frame: u32) {
        self.stack.truncate((frame - STACK_BASE) as usize);
    }
}
