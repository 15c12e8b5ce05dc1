#ifndef LEARNPATH_H
#define LEARNPATH_H

#include <stdint.h>

#if defined(_WIN32)
#if defined(LEARNPATH_BUILDING)
#define LP_API __declspec(dllexport)
#else
#define LP_API __declspec(dllimport)
#endif
#else
#define LP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lp_status {
  LP_OK = 0,
  LP_INVALID_INPUT = 1,
  LP_SINGULAR_MATRIX = 2,
  LP_NUMERIC_OVERFLOW = 3,
  LP_OPTIMIZATION_DIVERGED = 4,
  LP_FORMAT_ERROR = 5,
  LP_DIVERGED_TRAINING = 6,
  LP_CONFIG_ERROR = 7,
  LP_IO_ERROR = 8,
  LP_INTERNAL_ERROR = 100
} lp_status;

/* Library version, e.g. "0.1.0". */
LP_API const char* lp_version(void);
/* Short stable name of a status, e.g. "config_error". */
LP_API const char* lp_status_name(lp_status status);
/* Message of the last failed call on this thread; "" if none. */
LP_API const char* lp_last_error_message(void);
/* Frees strings returned through char** out-parameters. */
LP_API void lp_string_free(char* s);

/* ---- loss landscapes ---- */

typedef struct lp_landscape lp_landscape;

/* L(θ) = L0 + gᵀ(θ−θ0) + ½(θ−θ0)ᵀH(θ−θ0); hessian is dim×dim column-major. */
LP_API lp_status lp_landscape_quadratic(int dim, const double* base_point, double base_value,
                                        const double* gradient, const double* hessian, lp_landscape** out);
/* L(θ1, θ2) = a(θ1² − b)² + cθ2² + dθ1 */
LP_API lp_status lp_landscape_double_well_2d(double a, double b, double c, double d, lp_landscape** out);
/* L(θ) = h/4 (θ² − θ*²)² − q/3 θ³, shifted so the global minimum is 0 */
LP_API lp_status lp_landscape_double_well_1d(double h, double q, double theta_star, lp_landscape** out);
LP_API void lp_landscape_free(lp_landscape* landscape);
LP_API int lp_landscape_dim(const lp_landscape* landscape);
/* gradient (dim) and hessian (dim×dim, column-major) may be NULL. */
LP_API lp_status lp_landscape_eval(const lp_landscape* landscape, const double* theta, double* value,
                                   double* gradient, double* hessian);

/* ---- path objective ---- */

typedef struct lp_objective_config {
  double eta;
  double k;
  double gamma;
  double horizon;
  int segments;
} lp_objective_config;

/* Fills in the library defaults. */
LP_API void lp_objective_config_default(lp_objective_config* cfg);

/* states holds segments+1 nodes of dim values each, node after node.
   gradient (same layout, may be NULL) receives ∂J/∂θ_j for every node. */
LP_API lp_status lp_objective_eval(const lp_landscape* landscape, const lp_objective_config* cfg,
                                   const double* states, double* value, double* gradient);

/* Direct minimization between fixed endpoints; with search_endpoint != 0 the
   final node is free. states_out has room for segments+1 nodes. */
LP_API lp_status lp_direct_optimize(const lp_landscape* landscape, const lp_objective_config* cfg,
                                    const double* theta_start, const double* theta_end, int search_endpoint,
                                    int max_iters, double tol, double* states_out, double* objective,
                                    int* converged);

/* ---- closed forms (quadratic landscapes only) ---- */

/* θ(t) under momentum dynamics. With metric (dim×dim column-major, SPD)
   non-NULL the metric version is used. */
LP_API lp_status lp_momentum_solution(const lp_landscape* quadratic, const lp_objective_config* cfg,
                                      const double* metric, double t, double* theta_out);
/* One step of length dt under a limiting regime: "newton", "gradient_descent",
   "ballistic", "natural_gradient" or "natural_ballistic". Writes the step Δθ. */
LP_API lp_status lp_limit_rule(const char* regime, const lp_landscape* quadratic, const lp_objective_config* cfg,
                               double dt, const double* metric, double* step_out);

/* ---- update rules ---- */

/* −√(ηk) V^{-1/2} m dt */
LP_API lp_status lp_adaptive_rule(int dim, const double* m, const double* v, double eta, double k, double dt,
                                  double* step_out);
/* In place: v ← β₂v + (1−β₂)g², θ ← θ − ηg/(√v + ε) */
LP_API lp_status lp_ballistic_step(int dim, double* theta, const double* g, double* v, double learning_rate,
                                   double beta2, double eps);

/* ---- datasets ---- */

typedef struct lp_dataset lp_dataset;

LP_API lp_status lp_dataset_load_idx(const char* images_path, const char* labels_path, lp_dataset** out);
LP_API lp_status lp_dataset_load_csv(const char* path, lp_dataset** out);
LP_API void lp_dataset_free(lp_dataset* data);
LP_API int lp_dataset_size(const lp_dataset* data);
LP_API int lp_dataset_features(const lp_dataset* data);
LP_API int lp_dataset_classes(const lp_dataset* data);
/* inputs: size×features, example after example. labels: size entries. */
LP_API lp_status lp_dataset_copy(const lp_dataset* data, double* inputs, int* labels);

/* ---- experiments ---- */

/* JSON array of {"name", "reproduces"}. */
LP_API lp_status lp_experiment_list(char** json_out);
/* JSON array of {"key", "default", "help"} for one experiment. */
LP_API lp_status lp_experiment_defaults(const char* name, char** json_out);
/* Loads config_path (may be NULL), then applies overrides in order. Each
   override is "key=value" and beats the file. Writes CSVs and manifest.json to
   out_dir. summary_json (may be NULL) receives
   {"experiment", "out_dir", "files", "metrics", "report", "passed"}. */
LP_API lp_status lp_experiment_run(const char* name, const char* config_path, const char* const* overrides,
                                   int n_overrides, const char* out_dir, char** summary_json);

/* Acceptance criteria (all when n_only == 0). report_json receives an array of
   {"criterion", "name", "passed", "measured", "threshold", "detail", "seconds"}. */
LP_API lp_status lp_verify(uint64_t seed, const int* only, int n_only, char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
