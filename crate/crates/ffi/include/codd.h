#ifndef CODD_H
#define CODD_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CoddStatus {
  CODD_STATUS_OK = 0,
  CODD_STATUS_NULL_POINTER = 1,
  CODD_STATUS_INVALID = 2,
  CODD_STATUS_MISMATCH = 3,
  CODD_STATUS_CAPACITY = 4,
  CODD_STATUS_DECODE = 5,
  CODD_STATUS_UNDEFINED = 6,
  CODD_STATUS_IO = 7,
  CODD_STATUS_FUEL_EXHAUSTED = 8,
  CODD_STATUS_PANIC = 9,
} CoddStatus;

/**
 * Opaque expression handle.
 */
typedef struct CoddExprHandle CoddExprHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *codd_last_error(void);

const char *codd_version(void);

void codd_string_free(char *s);

void codd_bytes_free(uint8_t *bytes, size_t len);

/**
 * Parses the binary form. On a decode error `error_offset`, when non-null,
 * receives the bit offset of the problem.
 */
enum CoddStatus codd_expr_decode(const uint8_t *bytes,
                                 size_t len,
                                 struct CoddExprHandle **out,
                                 size_t *error_offset);

/**
 * Serializes to the binary form; free the buffer with `codd_bytes_free`.
 */
enum CoddStatus codd_expr_encode(const struct CoddExprHandle *e, uint8_t **out, size_t *out_len);

/**
 * Applies `e` to a leaf holding `bits` (ASCII '0'/'1') and reduces.
 * Returns `FuelExhausted` without a result when the budget runs out.
 */
enum CoddStatus codd_expr_eval_bits(const struct CoddExprHandle *e,
                                    const char *bits,
                                    uint64_t fuel,
                                    struct CoddExprHandle **out);

/**
 * The bits of a leaf expression as an ASCII string; free with
 * `codd_string_free`. `Invalid` when `e` is not a leaf.
 */
enum CoddStatus codd_expr_leaf_bits(const struct CoddExprHandle *e, char **out);

/**
 * Number of distinct decision nodes; 0 for a null handle.
 */
size_t codd_expr_size(const struct CoddExprHandle *e);

/**
 * Entries in the node table; 0 for a null handle.
 */
size_t codd_expr_node_count(const struct CoddExprHandle *e);

void codd_expr_free(struct CoddExprHandle *e);

/**
 * Logical entropy of the partition with cell keys `cells[0..2^n]` as a
 * "p/q" string; free with `codd_string_free`. Null `weights` is uniform.
 */
enum CoddStatus codd_logical_entropy(uint32_t n,
                                     const uint32_t *cells,
                                     const uint64_t *weights,
                                     char **out);

/**
 * Shannon entropy in bits of the same partition.
 */
enum CoddStatus codd_shannon_entropy(uint32_t n,
                                     const uint32_t *cells,
                                     const uint64_t *weights,
                                     double *out);

/**
 * Minimal expected depth of a decision tree computing `outputs[0..2^n]`,
 * as a "p/q" string; free with `codd_string_free`.
 */
enum CoddStatus codd_optimal_depth(uint32_t n,
                                   const uint64_t *outputs,
                                   const uint64_t *weights,
                                   char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CODD_H */
