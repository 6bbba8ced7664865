#ifndef WRSP_H
#define WRSP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WrspError {
  WRSP_ERROR_OK = 0,
  WRSP_ERROR_NULL_POINTER = 1,
  WRSP_ERROR_INVALID_UTF8 = 2,
  WRSP_ERROR_PARSE_MESH = 3,
  WRSP_ERROR_UNKNOWN_VERTEX = 4,
  WRSP_ERROR_BAD_CONFIG = 5,
  WRSP_ERROR_NO_PATH = 6,
  WRSP_ERROR_BUFFER_TOO_SMALL = 7,
  WRSP_ERROR_PANIC = 8,
} WrspError;

typedef enum WrspStatus {
  WRSP_STATUS_COMPLETE = 0,
  /*
   A resource cap stopped the run; the path, if any, is the best found.
   */
  WRSP_STATUS_PARTIAL = 1,
  WRSP_STATUS_NO_PATH = 2,
} WrspStatus;

/*
 Opaque triangulated weighted mesh.
 */
typedef struct WrspMesh WrspMesh;

/*
 Opaque solver outcome.
 */
typedef struct WrspResult WrspResult;

/*
 Solver parameters. Start from [`wrsp_config_default`].
 */
typedef struct WrspConfig {
  double epsilon;
  double k_const;
  /*
   Spacing of critically reflected rays; `<= 0` selects the default.
   */
  double delta;
  double min_angle;
  uint64_t max_rays;
  uint64_t max_events;
  uint64_t max_traced_rays;
  bool audit;
  bool polish;
} WrspConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or NULL. The pointer is
 valid until the next call into this library on the same thread.
 */
const char *wrsp_last_error_message(void);

struct WrspConfig wrsp_config_default(void);

/*
 Parses a mesh from NUL-terminated text in the `v x y` / `f a b c w`
 format.

 # Safety
 `text` must be NULL or a valid NUL-terminated string; `out` must be NULL
 or valid for writes.
 */
enum WrspError wrsp_mesh_parse(const char *text, struct WrspMesh **out);

/*
 # Safety
 `mesh` must be NULL or a handle from [`wrsp_mesh_parse`] not yet freed.
 */
void wrsp_mesh_free(struct WrspMesh *mesh);

/*
 # Safety
 `mesh` must be NULL or a live mesh handle.
 */
uintptr_t wrsp_mesh_vertex_count(const struct WrspMesh *mesh);

/*
 # Safety
 `mesh` must be NULL or a live mesh handle.
 */
uintptr_t wrsp_mesh_face_count(const struct WrspMesh *mesh);

/*
 Runs the solver from vertex `source` to vertex `target`. A NULL `config`
 uses the defaults. A run that ends without a path still yields a result
 handle; query it with [`wrsp_result_status`].

 # Safety
 `mesh` must be a live mesh handle, `config` NULL or valid, and `out`
 valid for writes.
 */
enum WrspError wrsp_solve(const struct WrspMesh *mesh,
                          uintptr_t source,
                          uintptr_t target,
                          const struct WrspConfig *config,
                          struct WrspResult **out);

/*
 # Safety
 `result` must be NULL or a handle from [`wrsp_solve`] not yet freed.
 */
void wrsp_result_free(struct WrspResult *result);

/*
 # Safety
 `result` must be a live result handle.
 */
enum WrspStatus wrsp_result_status(const struct WrspResult *result);

/*
 Weighted length of the reported path.

 # Safety
 `result` must be a live result handle and `cost` valid for writes.
 */
enum WrspError wrsp_result_cost(const struct WrspResult *result, double *cost);

/*
 Number of polyline points of the reported path (0 without a path).

 # Safety
 `result` must be NULL or a live result handle.
 */
uintptr_t wrsp_result_point_count(const struct WrspResult *result);

/*
 Copies the path polyline into `xs` and `ys`, each holding `capacity`
 values.

 # Safety
 `result` must be a live result handle; `xs` and `ys` must be valid for
 `capacity` writes.
 */
enum WrspError wrsp_result_points(const struct WrspResult *result,
                                  double *xs,
                                  double *ys,
                                  uintptr_t capacity);

/*
 The full result as a JSON document. Free it with [`wrsp_string_free`].
 Returns NULL on failure.

 # Safety
 `result` must be NULL or a live result handle.
 */
char *wrsp_result_json(const struct WrspResult *result);

/*
 # Safety
 `s` must be NULL or a string returned by this library not yet freed.
 */
void wrsp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WRSP_H */
