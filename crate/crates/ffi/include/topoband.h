#ifndef TOPOBAND_H
#define TOPOBAND_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_ARGUMENT = 2,
  /**
   * A precondition of the requested computation does not hold
   * (gap closed, symmetry missing, grid too coarse, ...).
   */
  TB_STATUS_PRECONDITION = 3,
  TB_STATUS_NOT_CONVERGED = 4,
  TB_STATUS_INTERNAL = 5,
  TB_STATUS_PANIC = 6,
} TbStatus;

/**
 * Opaque model handle.
 */
typedef struct TbModel TbModel;

typedef struct {
  double raw;
  int64_t value;
  double residual;
  size_t grid;
} TbInvariant;

typedef struct {
  bool strong;
  bool weak[3];
} TbZ2Indices;

typedef struct {
  /**
   * Number of Z summands.
   */
  size_t z;
  /**
   * Number of Z2 summands.
   */
  size_t z2;
  /**
   * Set when every realized Z value is even.
   */
  bool even;
} TbGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or NULL. The pointer stays
 * valid until the next call into this library on the same thread.
 */
const char *tb_last_error(void);

/**
 * Builds a registered model from a spec such as `"model=ssh1d t1=0 t2=1"`.
 *
 * # Safety
 * `spec` must be a valid NUL-terminated string and `out` a valid pointer.
 */
TbStatus tb_model_new(const char *spec, TbModel **out);

/**
 * Releases a handle from [`tb_model_new`]. NULL is ignored.
 *
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void tb_model_free(TbModel *model);

/**
 * Momentum-space dimension of the model, 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t tb_model_dim(const TbModel *model);

/**
 * Number of orbitals, 0 for NULL.
 *
 * # Safety
 * `model` must be NULL or a live handle.
 */
size_t tb_model_n_orb(const TbModel *model);

/**
 * First Chern number of a 2D model.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
TbStatus tb_chern_number(const TbModel *model, size_t grid, TbInvariant *out);

/**
 * Second Chern number of a 4D model.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
TbStatus tb_second_chern_number(const TbModel *model, size_t grid, TbInvariant *out);

/**
 * Winding number of a chiral model in one or three dimensions. `chiral` is a
 * preset name (`pauli_z`, ...) or inline row-major matrix entries.
 *
 * # Safety
 * `model` must be a live handle, `chiral` a NUL-terminated string and
 * `out` a valid pointer.
 */
TbStatus tb_winding_number(const TbModel *model, const char *chiral, size_t grid, TbInvariant *out);

/**
 * Z2 index of a 2D time-reversal invariant model; `tr` names the unitary
 * part of Θ (`kramers`, ...).
 *
 * # Safety
 * `model` must be a live handle, `tr` a NUL-terminated string and `out` a
 * valid pointer.
 */
TbStatus tb_z2_index(const TbModel *model, const char *tr, size_t grid, TbInvariant *out);

/**
 * Strong and weak Z2 indices of a 3D time-reversal invariant model.
 *
 * # Safety
 * `model` must be a live handle, `tr` a NUL-terminated string and `out` a
 * valid pointer.
 */
TbStatus tb_z2_indices_3d(const TbModel *model, const char *tr, size_t grid, TbZ2Indices *out);

/**
 * Degree of the normalized d-vector of a Dirac-type model given by spec.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a valid pointer.
 */
TbStatus tb_gauss_degree(const char *spec, size_t grid, TbInvariant *out);

/**
 * Green's-function invariant of the non-interacting Green's function of a
 * 2D model.
 *
 * # Safety
 * `model` must be a live handle and `out` a valid pointer.
 */
TbStatus tb_n3_invariant(const TbModel *model, size_t kgrid, size_t wquad, TbInvariant *out);

/**
 * Classification group of Cartan class `label` in dimension `dim`.
 *
 * # Safety
 * `label` must be a NUL-terminated string and `out` a valid pointer.
 */
TbStatus tb_table_entry(const char *label, size_t dim, TbGroup *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOPOBAND_H */
