#ifndef QOT_H
#define QOT_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every fallible call.
typedef enum QotStatus {
  QOT_STATUS_OK = 0,
  QOT_STATUS_NULL_POINTER = 1,
  QOT_STATUS_DIMENSION_MISMATCH = 2,
  // Input is not a valid state, observable or channel.
  QOT_STATUS_INVALID_INPUT = 3,
  // The channel does not transport the second state onto the first.
  QOT_STATUS_MARGINAL_MISMATCH = 4,
  QOT_STATUS_INVALID_PARAMETERS = 5,
  // An iterative method broke down.
  QOT_STATUS_NUMERICAL_FAILURE = 6,
  QOT_STATUS_PARSE = 7,
  QOT_STATUS_IO = 8,
  // A Rust panic was caught at the boundary.
  QOT_STATUS_PANIC = 9,
} QotStatus;

typedef enum QotSolverStatus {
  QOT_SOLVER_STATUS_OPTIMAL = 0,
  QOT_SOLVER_STATUS_MAX_ITERATIONS = 1,
  QOT_SOLVER_STATUS_NUMERICAL_FAILURE = 2,
} QotSolverStatus;

// Unital completely positive map, stored as Kraus operators `dim_in x dim_out`.
typedef struct QotChannel QotChannel;

// Tuple of Hermitian observables on one space.
typedef struct QotObservables QotObservables;

// Quadrature rule for the integral representation.
typedef struct QotQuadrature QotQuadrature;

// Density matrix.
typedef struct QotState QotState;

typedef struct QotSolverParams {
  double step;
  size_t max_iter;
  double tol_primal;
  double tol_dual;
  double tol_gap;
  // In `(0, 2)`.
  double over_relaxation;
  bool adaptive_step;
  // 0 disables acceleration.
  size_t anderson_memory;
} QotSolverParams;

// Direct cost against its quadrature.
typedef struct QotIntegralCheck {
  double cost;
  double quadrature;
  // `|cost - quadrature|`
  double gap;
} QotIntegralCheck;

typedef struct QotDivergence {
  // Minimal transport cost (squared divergence).
  double optimal_cost;
  double divergence;
  double duality_gap;
  double primal_residual;
  double dual_residual;
  size_t iterations;
  enum QotSolverStatus status;
  // The optimality certificate of the returned channel passed.
  bool certified;
} QotDivergence;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer stays
// valid until the next failing call on the same thread.
const char *qot_last_error(void);

// Library version as a static NUL-terminated string.
const char *qot_version(void);

// Default solver parameters.
struct QotSolverParams qot_solver_params_default(void);

// KMS inner product `tr(a^* rho^{1/2} b rho^{1/2})` of two `dim x dim`
// matrices, `dim` being the dimension of `rho`.
//
// # Safety
// `a` and `b` must point to `2 dim^2` doubles; `rho` must be a live handle;
// `out` must be writable.
enum QotStatus qot_kms_inner(const double *a,
                             const double *b,
                             const struct QotState *rho,
                             double *out);

// Transport cost of `ch` between `rho` (input space) and `sigma` (output
// space) with cost tuples `xs` and `ys`. Fails with
// `QOT_STATUS_MARGINAL_MISMATCH` unless `Phi_*(sigma) = rho`.
//
// # Safety
// All handles must be live; `out` must be writable.
enum QotStatus qot_cost(const struct QotChannel *ch,
                        const struct QotState *rho,
                        const struct QotState *sigma,
                        const struct QotObservables *xs,
                        const struct QotObservables *ys,
                        double *out);

// Compares the cost of `ch` with the quadrature of its integral
// representation.
//
// # Safety
// All handles must be live; `out` must be writable.
enum QotStatus qot_verify_integral_rep(const struct QotChannel *ch,
                                       const struct QotState *rho,
                                       const struct QotState *sigma,
                                       const struct QotObservables *xs,
                                       const struct QotObservables *ys,
                                       const struct QotQuadrature *rule,
                                       struct QotIntegralCheck *out);

// Wasserstein divergence between `rho` and `sigma` (same dimension) with
// cost tuple `xs` on both sides. `params` may be NULL for the defaults.
// A solve that stops at the iteration limit still returns `QOT_STATUS_OK`;
// check `status` in the result.
//
// # Safety
// The handles must be live; `params` must be NULL or readable; `out` must
// be writable.
enum QotStatus qot_divergence(const struct QotState *rho,
                              const struct QotState *sigma,
                              const struct QotObservables *xs,
                              const struct QotSolverParams *params,
                              struct QotDivergence *out);

// Frees a string returned by this library; NULL is a no-op.
//
// # Safety
// `s` must be NULL or a string from a `qot_*_to_json` call, not freed before.
void qot_string_free(char *s);

// State from a `dim x dim` matrix (`2 dim^2` doubles).
//
// # Safety
// `data` must point to `2 dim^2` doubles; `out` must be writable.
enum QotStatus qot_state_new(size_t dim, const double *data, struct QotState **out);

// Seeded random state of the given rank.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_state_random(size_t dim, size_t rank, uint64_t seed, struct QotState **out);

// Pure state `|k><k|`.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_state_basis(size_t dim, size_t k, struct QotState **out);

// State from its JSON document (`"type": "density_matrix"`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum QotStatus qot_state_from_json(const char *json, struct QotState **out);

// JSON document of a state; release with `qot_string_free`.
//
// # Safety
// `state` must be a live handle; `out` must be writable.
enum QotStatus qot_state_to_json(const struct QotState *state, char **out);

// Dimension of a state, 0 for NULL.
//
// # Safety
// `state` must be NULL or a live handle.
size_t qot_state_dim(const struct QotState *state);

// Copies the matrix into `out` (`len = 2 dim^2` doubles).
//
// # Safety
// `state` must be a live handle; `out` must hold `len` doubles.
enum QotStatus qot_state_matrix(const struct QotState *state, double *out, size_t len);

// # Safety
// `state` must be NULL or a handle not freed before.
void qot_state_free(struct QotState *state);

// Tuple of `count` observables, each `dim x dim` (`2 count dim^2` doubles).
//
// # Safety
// `data` must point to `2 count dim^2` doubles; `out` must be writable.
enum QotStatus qot_observables_new(size_t dim,
                                   size_t count,
                                   const double *data,
                                   struct QotObservables **out);

// The Pauli tuple `(X, Y, Z)` on a qubit.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_observables_pauli(struct QotObservables **out);

// `count` seeded random observables; entry `k` uses `derive_seed(seed, k)`.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_observables_random(size_t dim,
                                      size_t count,
                                      uint64_t seed,
                                      struct QotObservables **out);

// Tuple length, 0 for NULL.
//
// # Safety
// `xs` must be NULL or a live handle.
size_t qot_observables_len(const struct QotObservables *xs);

// # Safety
// `xs` must be NULL or a handle not freed before.
void qot_observables_free(struct QotObservables *xs);

// Channel from `num_kraus` Kraus operators of shape `dim_in x dim_out`
// (`2 num_kraus dim_in dim_out` doubles); checks unitality.
//
// # Safety
// `data` must point to the stated number of doubles; `out` must be writable.
enum QotStatus qot_channel_new(size_t dim_in,
                               size_t dim_out,
                               size_t num_kraus,
                               const double *data,
                               struct QotChannel **out);

// Identity channel on `dim`.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_channel_identity(size_t dim, struct QotChannel **out);

// Channel `x -> tr(rho x) 1` into dimension `dim_out`; transports every
// state on `dim_out` onto `rho`.
//
// # Safety
// `rho` must be a live handle; `out` must be writable.
enum QotStatus qot_channel_replacer(const struct QotState *rho,
                                    size_t dim_out,
                                    struct QotChannel **out);

// Seeded random channel.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_channel_random(size_t dim_in,
                                  size_t dim_out,
                                  size_t num_kraus,
                                  uint64_t seed,
                                  struct QotChannel **out);

// The transported state `Phi_*(sigma)` on the input space.
//
// # Safety
// `ch` and `sigma` must be live handles; `out` must be writable.
enum QotStatus qot_channel_push_forward(const struct QotChannel *ch,
                                        const struct QotState *sigma,
                                        struct QotState **out);

// Input dimension, 0 for NULL.
//
// # Safety
// `ch` must be NULL or a live handle.
size_t qot_channel_dim_in(const struct QotChannel *ch);

// Output dimension, 0 for NULL.
//
// # Safety
// `ch` must be NULL or a live handle.
size_t qot_channel_dim_out(const struct QotChannel *ch);

// # Safety
// `ch` must be NULL or a handle not freed before.
void qot_channel_free(struct QotChannel *ch);

// Seeded feasible instance: a channel, `sigma` of the given rank on
// `dim_out`, and `rho = Phi_*(sigma)`.
//
// # Safety
// All three output pointers must be writable.
enum QotStatus qot_marginal_pair(size_t dim_in,
                                 size_t dim_out,
                                 size_t num_kraus,
                                 size_t rank,
                                 uint64_t seed,
                                 struct QotChannel **out_channel,
                                 struct QotState **out_rho,
                                 struct QotState **out_sigma);

// Composite Gauss-Legendre rule with `panels` panels of `order` points on
// `[-truncation, truncation]`.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_quadrature_new(double truncation,
                                  size_t panels,
                                  size_t order,
                                  struct QotQuadrature **out);

// The default rule.
//
// # Safety
// `out` must be writable.
enum QotStatus qot_quadrature_default(struct QotQuadrature **out);

// Number of nodes, 0 for NULL.
//
// # Safety
// `rule` must be NULL or a live handle.
size_t qot_quadrature_len(const struct QotQuadrature *rule);

// # Safety
// `rule` must be NULL or a handle not freed before.
void qot_quadrature_free(struct QotQuadrature *rule);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QOT_H */
