#ifndef PAVERLAY_H
#define PAVERLAY_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Zero is success.
 */
typedef enum PvStatus {
  PV_STATUS_OK = 0,
  PV_STATUS_NULL_POINTER = 1,
  PV_STATUS_INVALID = 2,
  PV_STATUS_PARSE = 3,
  PV_STATUS_MESH = 4,
  PV_STATUS_LOAD = 5,
  PV_STATUS_SOLVER = 6,
  PV_STATUS_IO = 7,
  PV_STATUS_UTF8 = 8,
  PV_STATUS_OUT_OF_RANGE = 9,
  PV_STATUS_PANIC = 10,
} PvStatus;

typedef enum PvCourse {
  PV_COURSE_SURFACE = 0,
  PV_COURSE_INTERMEDIATE = 1,
  PV_COURSE_LEVELING = 2,
} PvCourse;

typedef enum PvQuantity {
  PV_QUANTITY_S11 = 0,
  PV_QUANTITY_S12 = 1,
} PvQuantity;

typedef enum PvMixture {
  PV_MIXTURE_DG = 0,
  PV_MIXTURE_PM = 1,
  PV_MIXTURE_SB = 2,
} PvMixture;

/**
 * Run configuration. Keeps its source text so single keys can be changed.
 */
typedef struct PvConfig PvConfig;

typedef struct PvMesh PvMesh;

typedef struct PvPassage PvPassage;

typedef struct PvTable PvTable;

/**
 * One probe sample. Stresses in kPa, Voigt order 11, 22, 33, 12, 13, 23.
 */
typedef struct PvRecord {
  size_t increment;
  double time;
  double load_x;
  size_t element;
  double stress[6];
} PvRecord;

/**
 * Passage peaks of one probe, kPa and mm.
 */
typedef struct PvEnvelope {
  double s11_peak;
  size_t s11_increment;
  double s11_load_x;
  double s12_peak;
  size_t s12_increment;
  double s12_load_x;
} PvEnvelope;

/**
 * Lowest S11 and S12 rows of a sweep table. Mixtures are
 * surface, intermediate, leveling.
 */
typedef struct PvExtremes {
  double min_s11;
  enum PvMixture min_s11_mixtures[3];
  double min_s12;
  enum PvMixture min_s12_mixtures[3];
  /**
   * NaN when the table lacks the all-SB or all-PM row.
   */
  double sb_over_pm_s11_percent;
} PvExtremes;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *pv_last_error(void);

/**
 * Library version as a static string.
 */
const char *pv_version(void);

/**
 * Releases a string returned by this library.
 *
 * # Safety
 * `s` must be null or a pointer returned by a `pv_*` function documented
 * as returning an owned string.
 */
void pv_string_free(char *s);

/**
 * Configuration from configuration text (`block.key = value` lines).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PvStatus pv_config_from_str(const char *text, struct PvConfig **out_cfg);

/**
 * Configuration for a named preset (`desk` or `paper`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum PvStatus pv_config_from_preset(const char *name, struct PvConfig **out_cfg);

/**
 * Configuration read from a file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PvStatus pv_config_from_file(const char *path, struct PvConfig **out_cfg);

/**
 * Sets one key as if `key = value` were appended to the configuration.
 * The configuration is unchanged on failure.
 *
 * # Safety
 * `cfg` must be a live configuration handle; strings NUL-terminated.
 */
enum PvStatus pv_config_set(struct PvConfig *cfg, const char *key, const char *value);

/**
 * # Safety
 * `cfg` must be null or a handle from a `pv_config_*` constructor.
 */
void pv_config_free(struct PvConfig *cfg);

/**
 * Generates the mesh described by `cfg`.
 *
 * # Safety
 * `cfg` must be a live configuration handle; `out` must be writable.
 */
enum PvStatus pv_mesh_build(const struct PvConfig *cfg, struct PvMesh **out_mesh);

/**
 * # Safety
 * `mesh` must be a live mesh handle.
 */
size_t pv_mesh_node_count(const struct PvMesh *mesh);

/**
 * # Safety
 * `mesh` must be a live mesh handle.
 */
size_t pv_mesh_element_count(const struct PvMesh *mesh);

/**
 * Writes the mesh as a legacy VTK unstructured grid.
 *
 * # Safety
 * `mesh` must be a live mesh handle; `path` NUL-terminated.
 */
enum PvStatus pv_mesh_write_vtk(const struct PvMesh *mesh, const char *path);

/**
 * # Safety
 * `mesh` must be null or a handle from [`pv_mesh_build`].
 */
void pv_mesh_free(struct PvMesh *mesh);

/**
 * Runs one load passage, recording the above-joint and mid-slab probes.
 *
 * # Safety
 * `cfg` must be a live configuration handle; `out` must be writable.
 */
enum PvStatus pv_passage_run(const struct PvConfig *cfg, struct PvPassage **out_passage);

/**
 * # Safety
 * `p` must be a live passage handle.
 */
size_t pv_passage_record_count(const struct PvPassage *p);

/**
 * Probe element ids: index 0 is above the joint, 1 is mid-slab.
 *
 * # Safety
 * `p` must be a live passage handle; `element` writable.
 */
enum PvStatus pv_passage_probe(const struct PvPassage *p, size_t index, size_t *element);

/**
 * Record `index` in increment-major, probe-minor order.
 *
 * # Safety
 * `p` must be a live passage handle; `record` writable.
 */
enum PvStatus pv_passage_record(const struct PvPassage *p, size_t index, struct PvRecord *record);

/**
 * Peak S11 and absolute S12 of one probe element.
 *
 * # Safety
 * `p` must be a live passage handle; `env` writable.
 */
enum PvStatus pv_passage_envelope(const struct PvPassage *p,
                                  size_t element,
                                  struct PvEnvelope *env);

/**
 * # Safety
 * `p` must be a live passage handle.
 */
size_t pv_passage_factorizations(const struct PvPassage *p);

/**
 * Largest relative reaction imbalance over all increments.
 *
 * # Safety
 * `p` must be a live passage handle.
 */
double pv_passage_max_equilibrium_error(const struct PvPassage *p);

/**
 * Writes the probe history CSV.
 *
 * # Safety
 * `p` must be a live passage handle; `path` NUL-terminated.
 */
enum PvStatus pv_passage_write_csv(const struct PvPassage *p, const char *path);

/**
 * # Safety
 * `p` must be null or a handle from [`pv_passage_run`].
 */
void pv_passage_free(struct PvPassage *p);

/**
 * The built-in published 27-case table.
 *
 * # Safety
 * `out` must be writable.
 */
enum PvStatus pv_table_published(struct PvTable **out_table);

/**
 * Reads a sweep table CSV.
 *
 * # Safety
 * `path` NUL-terminated; `out` writable.
 */
enum PvStatus pv_table_read_csv(const char *path, struct PvTable **out_table);

/**
 * # Safety
 * `t` must be a live table handle.
 */
size_t pv_table_row_count(const struct PvTable *t);

/**
 * Percent difference of the mean `quantity` of `mixture` against the mean
 * of `reference` over the nine rows holding each mixture in `course`.
 *
 * # Safety
 * `t` must be a live table handle; `percent` writable.
 */
enum PvStatus pv_table_course_delta(const struct PvTable *t,
                                    enum PvCourse course,
                                    enum PvQuantity quantity,
                                    enum PvMixture mixture,
                                    enum PvMixture reference,
                                    double *percent);

/**
 * # Safety
 * `t` must be a live table handle; `ex` writable.
 */
enum PvStatus pv_table_extremes(const struct PvTable *t, struct PvExtremes *ex);

/**
 * Markdown study report. The string must be released with
 * [`pv_string_free`].
 *
 * # Safety
 * `t` must be a live table handle; `out` writable.
 */
enum PvStatus pv_table_report(const struct PvTable *t, char **out_md);

/**
 * # Safety
 * `t` must be null or a handle from a `pv_table_*` constructor.
 */
void pv_table_free(struct PvTable *t);

/**
 * Runs the analytic benchmark suite. Returns `PV_STATUS_OK` when every
 * check passes and `PV_STATUS_SOLVER` otherwise.
 *
 * # Safety
 * `passed` and `total` must be writable.
 */
enum PvStatus pv_validate(size_t *passed, size_t *total);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PAVERLAY_H */
