/* ho_runtime.h: interface between C emitted by hoc and the runtime library.
 *
 * Generated code never touches host memory directly. Every location lives in
 * a flat 32-bit virtual address space owned by the runtime:
 *
 *   0x00010000  module instance data blocks, each aligned to 8, zeroed
 *   0x01000000  procedure frames (ho_push / ho_pop), reset before each body
 *   0x3FFFF000  4096-byte scratch block standing in for DATA of an empty port
 *   0x40000000  message block i at 0x40000000 + 4096 * i
 *   elsewhere   external memory, served from the MMIO script
 *
 * Multi-byte values are little-endian. Port slots are 4-byte handles:
 * 0 is empty, otherwise block index + 1.
 *
 * Compile generated code with -fno-strict-aliasing -fwrapv -std=gnu99.
 */
#ifndef HO_RUNTIME_H
#define HO_RUNTIME_H

#include <stdint.h>

typedef uint32_t ho_addr;
typedef void (*ho_body)(ho_addr base);

#define HO_BLOCK_SIZE 4096u
#define HO_DUMMY_BASE 0x3FFFF000u

/* Fault kinds, as printed in FAULT transcript lines. */
enum ho_fault {
    HO_OK = 0,
    HO_FAULT_EMPTY_PORT,       /* empty-port */
    HO_FAULT_DIV_ZERO,         /* div-zero */
    HO_FAULT_SHIFT_RANGE,      /* shift-range */
    HO_FAULT_ARRAY_BOUNDS,     /* array-bounds */
    HO_FAULT_CONTRACT_FAIL,    /* contract-fail */
    HO_FAULT_POOL_EXHAUSTED,   /* pool-exhausted: fatal, the scheduler stops */
    HO_FAULT_NEW_ON_FULL_PORT, /* new-on-full-port */
    HO_FAULT_EXTEND_RANGE,     /* extend-range */
    HO_FAULT_NARROWING,        /* narrowing */
    HO_FAULT_MMIO_TRAP         /* mmio-trap, check id 0 */
};

/* Memory. Loads sign- or zero-extend to 64 bits. */
int64_t ho_load(ho_addr a, unsigned width, int is_signed);
void ho_store(ho_addr a, unsigned width, int64_t v);
void ho_copy(ho_addr dst, ho_addr src, uint32_t n);
/* Nonzero when accessing `a` would trap: external, unscripted, strict mode. */
int ho_mmio_trap(ho_addr a);

/* Frames. ho_push returns a zeroed frame aligned to 8. */
ho_addr ho_push(uint32_t size);
void ho_pop(ho_addr frame);

/* Ports. Operations returning int give HO_OK or the fault to raise. */
int ho_send(ho_addr src, ho_addr dst);           /* 1 when the block moved */
int ho_new(ho_addr port, int64_t size);
void ho_dispose(ho_addr port);
int ho_clone(ho_addr src, ho_addr dst);
int ho_extend(ho_addr port, int64_t delta, int checks);
int64_t ho_count(ho_addr port);                  /* -1 when empty */
ho_addr ho_data(ho_addr port);                   /* 0 when empty */
int ho_pending(ho_addr port);

/* Records a FAULT line for the running instance. The caller then abandons
 * the rest of the module body; the scheduler continues with the next
 * instance unless the fault is fatal. */
void ho_check_fail(uint32_t check_id, int kind, const char *file, uint32_t line);

/* LOG transcript line for the running instance. */
void ho_log(const char *module, int64_t instance, const char *text, int has_value, int64_t value);

/* Registration, called once per compilation unit before the first cycle,
 * in schedule order. data_size is the end of the last variable; the runtime
 * places each data block at an 8-byte aligned address. */
void ho_add_instance(const char *module, uint32_t instance, uint32_t module_id,
                     uint32_t data_size, ho_body body);
void ho_export(const char *module, uint32_t instance, const char *var, uint32_t offset);

/* Data block of a registered instance, by module id. */
ho_addr ho_instance_base(uint32_t module_id);
/* Address of an exported variable of a module compiled separately. */
ho_addr ho_lookup(const char *module, uint32_t instance, const char *var);

/* Runs every registered instance body once, in registration order. */
void ho_cycle(void);

/* ---- helpers used by generated code ---- */

#ifndef NDEBUG
#define HO_CHECKS 1
#define HO_GUARD(cond, id, kind, file, line) \
    do { if (cond) { ho_check_fail((id), (kind), (file), (line)); goto ho_abort; } } while (0)
#define HO_ASSERT(e, id, file, line) \
    do { if (!(e)) { ho_check_fail((id), HO_FAULT_CONTRACT_FAIL, (file), (line)); goto ho_abort; } } while (0)
#else
#define HO_CHECKS 0
#define HO_GUARD(cond, id, kind, file, line) ((void)0)
#define HO_ASSERT(e, id, file, line) ((void)0)
#endif

/* Port operations and external memory traps are checked in every build. */
#define HO_PORT_OP(e, id, file, line) \
    do { int ho_k_ = (e); if (ho_k_ != HO_OK) { ho_check_fail((id), ho_k_, (file), (line)); goto ho_abort; } } while (0)
#define HO_MMIO_GUARD(a, file, line) \
    do { if (ho_mmio_trap(a)) { ho_check_fail(0, HO_FAULT_MMIO_TRAP, (file), (line)); goto ho_abort; } } while (0)

static inline int64_t ho_wrap(int64_t v, unsigned bits, int is_signed)
{
    uint64_t m = (bits >= 64) ? ~(uint64_t)0 : (((uint64_t)1 << bits) - 1);
    uint64_t u = (uint64_t)v & m;
    if (is_signed && bits < 64 && (u >> (bits - 1)) & 1)
        return (int64_t)(u | ~m);
    return (int64_t)u;
}

static inline int ho_fits(int64_t v, unsigned bits, int is_signed)
{
    return ho_wrap(v, bits, is_signed) == v;
}

/* Checked operations yield 0 when their guard is compiled out. */
static inline int64_t ho_div(int64_t a, int64_t b)
{
    if (b == 0)
        return 0;
    if (b == -1)
        return (int64_t)(0 - (uint64_t)a);
    return a / b;
}

static inline int64_t ho_mod(int64_t a, int64_t b)
{
    if (b == 0 || b == -1)
        return 0;
    return a % b;
}

static inline int64_t ho_shl(int64_t a, int64_t n)
{
    if (n < 0 || n > 31)
        return 0;
    return (int64_t)(uint32_t)((uint32_t)a << n);
}

/* Right shifts are logical on the 32-bit pattern. */
static inline int64_t ho_shr(int64_t a, int64_t n)
{
    if (n < 0 || n > 31)
        return 0;
    return (int64_t)((uint32_t)a >> n);
}

#endif
