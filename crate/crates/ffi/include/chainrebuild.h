#ifndef CHAINREBUILD_H
#define CHAINREBUILD_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stddef.h>
#include <stdint.h>
#include <stdbool.h>

// Result code of every fallible call.
typedef enum CrStatus {
  CR_STATUS_OK = 0,
  CR_STATUS_NULL_POINTER = 1,
  CR_STATUS_INVALID_UTF8 = 2,
  CR_STATUS_PARSE = 3,
  CR_STATUS_INVALID = 4,
  CR_STATUS_OUT_OF_RANGE = 5,
  CR_STATUS_CAP_EXCEEDED = 6,
  CR_STATUS_PANIC = 7,
} CrStatus;

// A transitive permutation action of a finitely generated group.
typedef struct CrAction CrAction;

// A chain complex of free abelian groups.
typedef struct CrComplex CrComplex;

// A rebuilding `(X, X′, g, h, ρ)`.
typedef struct CrRebuilding CrRebuilding;

// Resource limits; see [`cr_caps_default`].
typedef struct CrCaps {
  uint64_t max_bits;
  uint64_t max_minors;
  uint32_t max_iterations;
} CrCaps;

// Homology of one degree. Torsion factors are read with [`cr_complex_torsion`].
typedef struct CrHomology {
  size_t degree;
  size_t betti_rational;
  size_t betti_mod2;
  size_t torsion_count;
  double log_torsion;
  // Set in the top degree, where there is no outgoing boundary.
  bool truncated;
} CrHomology;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version, a static NUL-terminated string.
const char *cr_version(void);

// The default caps used by the Rust API.
struct CrCaps cr_caps_default(void);

// Message of the last failed call on this thread, or NULL. Valid until the
// next call into this library from the same thread.
const char *cr_last_error(void);

void cr_string_free(char *s);

// Parses the chain-complex text format.
enum CrStatus cr_complex_parse(const char *src, struct CrComplex **out);

// The `n`-fold cyclic cover of the circle.
enum CrStatus cr_complex_circle_cover(size_t n, struct CrComplex **out);

void cr_complex_free(struct CrComplex *c);

enum CrStatus cr_complex_top_degree(const struct CrComplex *c, size_t *out);

// `dim C_j`; zero above the top degree.
enum CrStatus cr_complex_dim(const struct CrComplex *c, size_t j, size_t *out);

// Writes the complex in its text format.
enum CrStatus cr_complex_to_text(const struct CrComplex *c, char **out);

// Homology in degree `j`. `caps` may be NULL for the defaults.
enum CrStatus cr_complex_homology(const struct CrComplex *c,
                                  size_t j,
                                  const struct CrCaps *caps,
                                  struct CrHomology *out);

// Torsion invariant factors of `H_j` as space-separated decimal integers.
enum CrStatus cr_complex_torsion(const struct CrComplex *c,
                                 size_t j,
                                 const struct CrCaps *caps,
                                 char **out);

// `dim C_j · max(log ‖∂_{j+1}‖, 0)`, for `j` below the top degree.
enum CrStatus cr_complex_gabber_bound(const struct CrComplex *c,
                                      size_t j,
                                      const struct CrCaps *caps,
                                      double *out);

// Rebuilding of the `n`-fold circle cover at scale `t`.
enum CrStatus cr_rebuild_circle(size_t n, double t, struct CrRebuilding **out);

// Rebuilding of `ℝ^d / Λ` onto the one-vertex torus. `hnf` holds the `d×d`
// upper-triangular Hermite normal form of `Λ` row by row.
enum CrStatus cr_rebuild_lattice(size_t d, const int64_t *hnf, struct CrRebuilding **out);

// Rebuilding of the congruence cover of index `n³` of the Heisenberg nilmanifold.
enum CrStatus cr_rebuild_heisenberg(uint64_t n, struct CrRebuilding **out);

// Rebuilding for a subgroup given in the subgroup text format.
enum CrStatus cr_rebuild_subgroup(const char *src, struct CrRebuilding **out);

// Parses the rebuilding text format.
enum CrStatus cr_rebuilding_parse(const char *src, struct CrRebuilding **out);

void cr_rebuilding_free(struct CrRebuilding *r);

enum CrStatus cr_rebuilding_alpha(const struct CrRebuilding *r, size_t *out);

// A copy of the source complex; free it with [`cr_complex_free`].
enum CrStatus cr_rebuilding_source(const struct CrRebuilding *r, struct CrComplex **out);

// A copy of the target complex; free it with [`cr_complex_free`].
enum CrStatus cr_rebuilding_target(const struct CrRebuilding *r, struct CrComplex **out);

// Number of violated identities; zero means the rebuilding checks out exactly.
enum CrStatus cr_rebuilding_verify(const struct CrRebuilding *r, size_t *violations);

enum CrStatus cr_rebuilding_to_text(const struct CrRebuilding *r, char **out);

// Measured quality `κ` at scale `t ≥ 1`.
enum CrStatus cr_rebuilding_kappa(const struct CrRebuilding *r,
                                  double t,
                                  const struct CrCaps *caps,
                                  double *out);

// Parses the permutation-action text format.
enum CrStatus cr_action_parse(const char *src, struct CrAction **out);

void cr_action_free(struct CrAction *a);

enum CrStatus cr_action_degree(const struct CrAction *a, size_t *out);

// Fixed-point ratio of a word as a reduced fraction `num / den`.
enum CrStatus cr_action_fixed_point_ratio(const struct CrAction *a,
                                          const char *word,
                                          uint64_t *num,
                                          uint64_t *den);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHAINREBUILD_H */
