#ifndef MONOSTATIC_H
#define MONOSTATIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MonoBody {
  MONO_BODY_SPHERE = 0,
  MONO_BODY_CUBE = 1,
  MONO_BODY_CYLINDER = 2,
  MONO_BODY_CAPSULE = 3,
} MonoBody;

typedef enum MonoFamily {
  MONO_FAMILY_SLOAN_LINEAR_PHASE = 0,
  MONO_FAMILY_SLOAN_ETA_PHASE = 1,
  MONO_FAMILY_EXTENDED_PHASE = 2,
  MONO_FAMILY_RADIAL_F3 = 3,
  MONO_FAMILY_RADIAL_F4 = 4,
} MonoFamily;

/**
 * Status code returned by every fallible function.
 */
typedef enum MonoStatus {
  MONO_STATUS_OK = 0,
  MONO_STATUS_NULL_POINTER = 1,
  MONO_STATUS_INVALID_ARGUMENT = 2,
  MONO_STATUS_INVALID_SPEC = 3,
  MONO_STATUS_GEOMETRY = 4,
  MONO_STATUS_DEGENERATE = 5,
  MONO_STATUS_IO = 6,
  MONO_STATUS_BUFFER_TOO_SMALL = 7,
  MONO_STATUS_PANIC = 8,
} MonoStatus;

/**
 * Opaque triangle mesh.
 */
typedef struct MonoMesh MonoMesh;

typedef struct MonoOracleConfig {
  size_t directions;
  size_t knn;
  /**
   * Merge threshold as a fraction of the height range.
   */
  double threshold;
} MonoOracleConfig;

typedef struct MonoMass {
  double volume;
  double com[3];
} MonoMass;

typedef struct MonoEcsSummary {
  size_t raw_basin_count;
  size_t ecs;
  size_t single_pass_ecs;
  double h_min;
  double h_max;
  double h_range;
  double su_angle_deg;
  /**
   * Nonzero when the height field is flat and no count is reported.
   */
  uint8_t degenerate;
} MonoEcsSummary;

typedef struct MonoMetrics {
  double h_range;
  double sre;
  double steepness;
  double asymmetry;
  double su_angle_deg;
} MonoMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mono_version(void);

/**
 * Message of the last failure on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *mono_last_error(void);

struct MonoOracleConfig mono_oracle_config_default(void);

/**
 * Tessellates a surface spec on an `n_theta` x `n_phi` grid.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum MonoStatus mono_mesh_generate(enum MonoFamily family_tag,
                                   double beta,
                                   double coeff,
                                   uint32_t harmonic,
                                   size_t n_theta,
                                   size_t n_phi,
                                   struct MonoMesh **out);

/**
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum MonoStatus mono_mesh_canonical(enum MonoBody body, size_t resolution, struct MonoMesh **out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` valid writable storage.
 */
enum MonoStatus mono_mesh_read_stl(const char *path, struct MonoMesh **out);

/**
 * # Safety
 * `mesh` must come from a `mono_mesh_*` constructor; `path` and
 * `description` must be NUL-terminated (`description` may be null).
 */
enum MonoStatus mono_mesh_write_stl(const struct MonoMesh *mesh,
                                    const char *path,
                                    const char *description);

/**
 * Releases a mesh; null is ignored.
 *
 * # Safety
 * `mesh` must come from a `mono_mesh_*` constructor and not be used again.
 */
void mono_mesh_free(struct MonoMesh *mesh);

/**
 * Number of vertices, 0 for a null handle.
 *
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t mono_mesh_vertex_count(const struct MonoMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a live handle.
 */
size_t mono_mesh_triangle_count(const struct MonoMesh *mesh);

/**
 * Copies vertices as `x, y, z` triples; `len` counts doubles.
 *
 * # Safety
 * `out` must point to at least `len` writable doubles.
 */
enum MonoStatus mono_mesh_copy_vertices(const struct MonoMesh *mesh, double *out, size_t len);

/**
 * Copies triangles as vertex index triples; `len` counts indices.
 *
 * # Safety
 * `out` must point to at least `len` writable `uint32_t`.
 */
enum MonoStatus mono_mesh_copy_triangles(const struct MonoMesh *mesh, uint32_t *out, size_t len);

/**
 * # Safety
 * `mesh` must be a live handle and `out` valid writable storage.
 */
enum MonoStatus mono_mesh_mass(const struct MonoMesh *mesh, struct MonoMass *out);

/**
 * Volume over convex hull volume.
 *
 * # Safety
 * `mesh` must be a live handle and `out` valid writable storage.
 */
enum MonoStatus mono_mesh_convexity_ratio(const struct MonoMesh *mesh, double *out);

/**
 * Equilibrium count at `config->threshold`; a null `config` uses the defaults.
 *
 * # Safety
 * `mesh` must be a live handle, `config` null or valid, `out` writable.
 */
enum MonoStatus mono_ecs(const struct MonoMesh *mesh,
                         const struct MonoOracleConfig *config,
                         struct MonoEcsSummary *out);

/**
 * Height range, self-righting energy, steepness, asymmetry and S-U angle.
 *
 * # Safety
 * `mesh` must be a live handle, `config` null or valid, `out` writable.
 */
enum MonoStatus mono_metrics(const struct MonoMesh *mesh,
                             const struct MonoOracleConfig *config,
                             struct MonoMetrics *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MONOSTATIC_H */
