#ifndef BPREDUCE_INT128_H
#define BPREDUCE_INT128_H

#include <stdint.h>

typedef __int128 bp_i128;

/* All helpers return nonzero on overflow. */
static inline int bp_mul(bp_i128 a, bp_i128 b, bp_i128 *out) {
    return __builtin_mul_overflow(a, b, out);
}

static inline int bp_sub(bp_i128 a, bp_i128 b, bp_i128 *out) {
    return __builtin_sub_overflow(a, b, out);
}

static inline int bp_add(bp_i128 a, bp_i128 b, bp_i128 *out) {
    return __builtin_add_overflow(a, b, out);
}

static inline uint64_t bp_lo(bp_i128 a) { return (uint64_t)((unsigned __int128)a); }
static inline int64_t bp_hi(bp_i128 a) { return (int64_t)(a >> 64); }

#endif
