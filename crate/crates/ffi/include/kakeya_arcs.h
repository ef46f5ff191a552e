#ifndef KAKEYA_ARCS_H
#define KAKEYA_ARCS_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum KkStatus {
  KK_STATUS_OK = 0,
  KK_STATUS_NULL_POINTER = 1,
  KK_STATUS_INVALID_ARGUMENT = 2,
  KK_STATUS_INVALID_SPEC = 3,
  KK_STATUS_HYPOTHESES_VIOLATED = 4,
  KK_STATUS_CONSTRUCTION_FAILED = 5,
  KK_STATUS_SCENE_INCOMPLETE = 6,
  KK_STATUS_ARC_TOO_LONG = 7,
  KK_STATUS_RECURSION_INFEASIBLE = 8,
  KK_STATUS_OUT_OF_RANGE = 9,
  KK_STATUS_GEOMETRY_ERROR = 10,
  KK_STATUS_INTERNAL = 11,
} KkStatus;

typedef struct KkPlan KkPlan;

typedef struct KkScene KkScene;

// Scene parameters. Numbers are decimal strings so that big-float scenes
typedef struct KkConfig {
  const char *h;
  const char *eps;
  const char *r;
  uint32_t n;
  // 0 for hardware doubles, otherwise a mantissa width of at least 64 bits.
  uint32_t precision_bits;
  bool strict;
} KkConfig;

// An arc in f64: centre, radius, start angle and signed sweep.
typedef struct KkPose {
  double cx;
  double cy;
  double radius;
  double start_angle;
  double sweep;
} KkPose;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *kk_version(void);

// Message for the last failed call on this thread; empty after a success.
const char *kk_last_error_message(void);

// Releases a string returned by this library.
void kk_string_free(char *s);

// Builds a scene; on success `*out_scene` owns a new handle.
enum KkStatus kk_scene_build(const struct KkConfig *cfg, struct KkScene **out_scene);

// Releases a scene handle.
void kk_scene_free(struct KkScene *scene);

// Scene as JSON with full-precision decimal strings.
enum KkStatus kk_scene_to_json(const struct KkScene *scene, char **out_json);

// Runs every check; `out_violations` receives the number of failed
enum KkStatus kk_scene_verify(const struct KkScene *scene,
                              const char *arc_len,
                              uint32_t *out_violations);

// Builds the motion plan through a complete scene. A null `arc_len` means 1.31.
enum KkStatus kk_plan_build(const struct KkScene *scene,
                            const char *arc_len,
                            struct KkPlan **out_plan);

// Releases a plan handle.
void kk_plan_free(struct KkPlan *plan);

// Plan as JSON.
enum KkStatus kk_plan_to_json(const struct KkPlan *plan, char **out_json);

// Number of pivot and slide steps.
enum KkStatus kk_plan_step_count(const struct KkPlan *plan, size_t *out_count);

// Sum of the per-pivot horn areas.
enum KkStatus kk_plan_total_swept_bound(const struct KkPlan *plan, double *out_area);

// Pose at normalized time `t` in `[0, 1]`.
enum KkStatus kk_plan_pose_at(const struct KkPlan *plan, double t, struct KkPose *out_pose);

// Monte-Carlo area of everything the plan sweeps. `out_stderr` may be null.
enum KkStatus kk_area_mc_plan(const struct KkPlan *plan,
                              uint64_t samples,
                              uint64_t seed,
                              double *out_value,
                              double *out_stderr);

// Monte-Carlo area of `T_n` minus the seed horn. `out_stderr` may be null.
enum KkStatus kk_tn_minus_delta(const struct KkScene *scene,
                                uint64_t samples,
                                uint64_t seed,
                                double *out_value,
                                double *out_stderr);

// Area `chord^2 angle / 2` of the region swept by rotating an arc about an endpoint.
enum KkStatus kk_horn_area(double chord, double angle, double *out_area);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KAKEYA_ARCS_H */
