#include "learnpath/learnpath.h"

#include <cstring>
#include <memory>
#include <string>

#include "json.hpp"
#include "learnpath/acceptance.hpp"
#include "learnpath/adaptive.hpp"
#include "learnpath/closedform.hpp"
#include "learnpath/config.hpp"
#include "learnpath/dataset.hpp"
#include "learnpath/error.hpp"
#include "learnpath/experiments.hpp"
#include "learnpath/optim.hpp"
#include "learnpath/variational.hpp"
#include "learnpath/version.hpp"

struct lp_landscape {
  std::shared_ptr<const learnpath::Landscape> impl;
};

struct lp_dataset {
  learnpath::Dataset impl;
};

namespace {

using namespace learnpath;
using json = nlohmann::json;

thread_local std::string g_last_error;

lp_status to_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return LP_INVALID_INPUT;
    case ErrorCode::kSingularMatrix:
      return LP_SINGULAR_MATRIX;
    case ErrorCode::kNumericOverflow:
      return LP_NUMERIC_OVERFLOW;
    case ErrorCode::kOptimizationDiverged:
      return LP_OPTIMIZATION_DIVERGED;
    case ErrorCode::kFormatError:
      return LP_FORMAT_ERROR;
    case ErrorCode::kDivergedTraining:
      return LP_DIVERGED_TRAINING;
    case ErrorCode::kConfigError:
      return LP_CONFIG_ERROR;
    case ErrorCode::kIoError:
      return LP_IO_ERROR;
  }
  return LP_INTERNAL_ERROR;
}

// Runs fn, translating exceptions into a status and the thread's last error.
template <typename Fn>
lp_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LP_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return LP_INTERNAL_ERROR;
}

void require(bool ok, const char* what) {
  if (!ok) throw_error(ErrorCode::kInvalidInput, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Vector vec(const double* p, int n) { return Eigen::Map<const Vector>(p, n); }
Matrix mat(const double* p, int n) { return Eigen::Map<const Matrix>(p, n, n); }

ObjectiveConfig objective(const lp_objective_config* c) {
  require(c != nullptr, "objective config is NULL");
  ObjectiveConfig o;
  o.eta = c->eta;
  o.k = c->k;
  o.gamma = c->gamma;
  o.horizon = c->horizon;
  o.segments = c->segments;
  o.validate();
  return o;
}

const QuadraticLoss& quadratic(const lp_landscape* l) {
  require(l != nullptr, "landscape is NULL");
  const auto* q = dynamic_cast<const QuadraticLoss*>(l->impl.get());
  require(q != nullptr, "closed forms need a quadratic landscape");
  return *q;
}

Trajectory unpack(const double* states, int dim, const ObjectiveConfig& cfg) {
  Trajectory t = Trajectory::grid(cfg.horizon, cfg.segments);
  for (int j = 0; j <= cfg.segments; ++j) t.states.push_back(vec(states + static_cast<std::ptrdiff_t>(j) * dim, dim));
  return t;
}

ExperimentConfig build_config(const std::string& name, const char* config_path, const char* const* overrides,
                              int n_overrides) {
  ExperimentConfig cfg(find_experiment(name).schema);
  if (config_path != nullptr && *config_path != '\0') cfg.load_file(config_path);
  require(n_overrides >= 0 && (n_overrides == 0 || overrides != nullptr), "bad override list");
  for (int i = 0; i < n_overrides; ++i) {
    require(overrides[i] != nullptr, "override is NULL");
    const std::string a = overrides[i];
    cfg.apply_override(a, "flag --" + a.substr(0, a.find('=')));
  }
  return cfg;
}

json criterion_json(const CriterionResult& r) {
  return {{"criterion", r.id},     {"name", r.name},     {"passed", r.passed}, {"measured", r.measured},
          {"threshold", r.threshold}, {"detail", r.detail}, {"seconds", r.seconds}};
}

// JSON has no non-finite numbers; those are spelled out as strings.
json number(double x) { return std::isfinite(x) ? json(x) : json(std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf")); }

}  // namespace

extern "C" {

const char* lp_version(void) { return kVersionString; }

const char* lp_status_name(lp_status status) {
  switch (status) {
    case LP_OK:
      return "ok";
    case LP_INVALID_INPUT:
      return "invalid_input";
    case LP_SINGULAR_MATRIX:
      return "singular_matrix";
    case LP_NUMERIC_OVERFLOW:
      return "numeric_overflow";
    case LP_OPTIMIZATION_DIVERGED:
      return "optimization_diverged";
    case LP_FORMAT_ERROR:
      return "format_error";
    case LP_DIVERGED_TRAINING:
      return "diverged_training";
    case LP_CONFIG_ERROR:
      return "config_error";
    case LP_IO_ERROR:
      return "io_error";
    case LP_INTERNAL_ERROR:
      return "internal_error";
  }
  return "unknown";
}

const char* lp_last_error_message(void) { return g_last_error.c_str(); }

void lp_string_free(char* s) { delete[] s; }

lp_status lp_landscape_quadratic(int dim, const double* base_point, double base_value, const double* gradient,
                                 const double* hessian, lp_landscape** out) {
  return guarded([&] {
    require(out != nullptr && base_point && gradient && hessian && dim > 0, "lp_landscape_quadratic: bad arguments");
    auto q = std::make_shared<QuadraticLoss>(vec(base_point, dim), base_value, vec(gradient, dim), mat(hessian, dim));
    *out = new lp_landscape{std::move(q)};
  });
}

lp_status lp_landscape_double_well_2d(double a, double b, double c, double d, lp_landscape** out) {
  return guarded([&] {
    require(out != nullptr, "lp_landscape_double_well_2d: out is NULL");
    *out = new lp_landscape{std::make_shared<DoubleWell2D>(a, b, c, d)};
  });
}

lp_status lp_landscape_double_well_1d(double h, double q, double theta_star, lp_landscape** out) {
  return guarded([&] {
    require(out != nullptr, "lp_landscape_double_well_1d: out is NULL");
    *out = new lp_landscape{std::make_shared<DoubleWell1D>(h, q, theta_star)};
  });
}

void lp_landscape_free(lp_landscape* landscape) { delete landscape; }

int lp_landscape_dim(const lp_landscape* landscape) { return landscape ? landscape->impl->dim() : 0; }

lp_status lp_landscape_eval(const lp_landscape* landscape, const double* theta, double* value, double* gradient,
                            double* hessian) {
  return guarded([&] {
    require(landscape && theta && value, "lp_landscape_eval: bad arguments");
    const int n = landscape->impl->dim();
    const LossEval e = landscape->impl->eval(vec(theta, n));
    *value = e.value;
    if (gradient) Eigen::Map<Vector>(gradient, n) = e.gradient;
    if (hessian) Eigen::Map<Matrix>(hessian, n, n) = e.hessian;
  });
}

void lp_objective_config_default(lp_objective_config* cfg) {
  if (!cfg) return;
  const ObjectiveConfig d;
  *cfg = {d.eta, d.k, d.gamma, d.horizon, d.segments};
}

lp_status lp_objective_eval(const lp_landscape* landscape, const lp_objective_config* cfg, const double* states,
                            double* value, double* gradient) {
  return guarded([&] {
    require(landscape && states && value, "lp_objective_eval: bad arguments");
    const ObjectiveConfig oc = objective(cfg);
    const int n = landscape->impl->dim();
    const Trajectory t = unpack(states, n, oc);
    *value = eval_objective(t, *landscape->impl, oc).value;
    if (gradient) {
      const auto g = objective_gradient_all(t, *landscape->impl, oc);
      for (std::size_t j = 0; j < g.size(); ++j) Eigen::Map<Vector>(gradient + j * n, n) = g[j];
    }
  });
}

lp_status lp_direct_optimize(const lp_landscape* landscape, const lp_objective_config* cfg, const double* theta_start,
                             const double* theta_end, int search_endpoint, int max_iters, double tol,
                             double* states_out, double* objective_out, int* converged) {
  return guarded([&] {
    require(landscape && theta_start && theta_end && states_out, "lp_direct_optimize: bad arguments");
    const ObjectiveConfig oc = objective(cfg);
    DirectOptConfig opt;
    opt.max_iters = max_iters;
    opt.convergence_tol = tol;
    opt.endpoint_policy = search_endpoint ? EndpointPolicy::kSearched : EndpointPolicy::kFixed;
    const int n = landscape->impl->dim();
    const auto r = direct_optimize(*landscape->impl, vec(theta_start, n), vec(theta_end, n), oc, opt);
    for (int j = 0; j <= oc.segments; ++j) Eigen::Map<Vector>(states_out + static_cast<std::ptrdiff_t>(j) * n, n) = r.trajectory.states[j];
    if (objective_out) *objective_out = r.objective;
    if (converged) *converged = r.converged ? 1 : 0;
  });
}

lp_status lp_momentum_solution(const lp_landscape* q, const lp_objective_config* cfg, const double* metric, double t,
                               double* theta_out) {
  return guarded([&] {
    const QuadraticLoss& loss = quadratic(q);
    require(theta_out != nullptr, "lp_momentum_solution: theta_out is NULL");
    const ObjectiveConfig oc = objective(cfg);
    const Vector th = metric ? natural_momentum_solution(loss, oc, mat(metric, loss.dim()), t)
                             : momentum_solution(loss, oc, t);
    Eigen::Map<Vector>(theta_out, loss.dim()) = th;
  });
}

lp_status lp_limit_rule(const char* regime, const lp_landscape* q, const lp_objective_config* cfg, double dt,
                        const double* metric, double* step_out) {
  return guarded([&] {
    require(regime && step_out, "lp_limit_rule: bad arguments");
    const auto r = parse_regime(regime);
    if (!r) throw_error(ErrorCode::kInvalidInput, std::string("lp_limit_rule: unknown regime '") + regime + "'");
    const QuadraticLoss& loss = quadratic(q);
    const ObjectiveConfig oc = objective(cfg);
    Matrix g;
    if (metric) g = mat(metric, loss.dim());
    Eigen::Map<Vector>(step_out, loss.dim()) = limit_rule(*r, loss, oc, dt, metric ? &g : nullptr);
  });
}

lp_status lp_adaptive_rule(int dim, const double* m, const double* v, double eta, double k, double dt,
                           double* step_out) {
  return guarded([&] {
    require(dim > 0 && m && v && step_out, "lp_adaptive_rule: bad arguments");
    Eigen::Map<Vector>(step_out, dim) = adaptive_rule(vec(m, dim), vec(v, dim), eta, k, dt);
  });
}

lp_status lp_ballistic_step(int dim, double* theta, const double* g, double* v, double learning_rate, double beta2,
                            double eps) {
  return guarded([&] {
    require(dim > 0 && theta && g && v, "lp_ballistic_step: bad arguments");
    OptimizerConfig cfg;
    cfg.learning_rate = learning_rate;
    cfg.beta2 = beta2;
    cfg.eps = eps;
    cfg.validate();
    Vector th = vec(theta, dim), vv = vec(v, dim);
    ballistic_step(th, vec(g, dim), vv, cfg);
    Eigen::Map<Vector>(theta, dim) = th;
    Eigen::Map<Vector>(v, dim) = vv;
  });
}

lp_status lp_dataset_load_idx(const char* images_path, const char* labels_path, lp_dataset** out) {
  return guarded([&] {
    require(images_path && labels_path && out, "lp_dataset_load_idx: bad arguments");
    *out = new lp_dataset{load_idx(images_path, labels_path)};
  });
}

lp_status lp_dataset_load_csv(const char* path, lp_dataset** out) {
  return guarded([&] {
    require(path && out, "lp_dataset_load_csv: bad arguments");
    *out = new lp_dataset{load_csv_dataset(path)};
  });
}

void lp_dataset_free(lp_dataset* data) { delete data; }
int lp_dataset_size(const lp_dataset* data) { return data ? data->impl.size() : 0; }
int lp_dataset_features(const lp_dataset* data) { return data ? data->impl.features() : 0; }
int lp_dataset_classes(const lp_dataset* data) { return data ? data->impl.classes : 0; }

lp_status lp_dataset_copy(const lp_dataset* data, double* inputs, int* labels) {
  return guarded([&] {
    require(data != nullptr, "lp_dataset_copy: data is NULL");
    const Dataset& d = data->impl;
    if (inputs) {
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(inputs, d.size(),
                                                                                        d.features()) = d.inputs;
    }
    if (labels) std::copy(d.labels.begin(), d.labels.end(), labels);
  });
}

lp_status lp_experiment_list(char** json_out) {
  return guarded([&] {
    require(json_out != nullptr, "lp_experiment_list: out is NULL");
    json arr = json::array();
    for (const auto& e : experiment_catalog()) arr.push_back({{"name", e.name}, {"reproduces", e.reproduces}});
    *json_out = dup_string(arr.dump());
  });
}

lp_status lp_experiment_defaults(const char* name, char** json_out) {
  return guarded([&] {
    require(name && json_out, "lp_experiment_defaults: bad arguments");
    json arr = json::array();
    for (const auto& k : find_experiment(name).schema) {
      arr.push_back({{"key", k.key}, {"default", k.default_value}, {"help", k.help}});
    }
    *json_out = dup_string(arr.dump());
  });
}

lp_status lp_experiment_run(const char* name, const char* config_path, const char* const* overrides,
                            int n_overrides, const char* out_dir, char** summary_json) {
  return guarded([&] {
    require(name && out_dir, "lp_experiment_run: bad arguments");
    const ExperimentConfig cfg = build_config(name, config_path, overrides, n_overrides);
    const ExperimentResult r = run_experiment(name, cfg, out_dir);
    if (summary_json) {
      json metrics = json::object();
      for (const auto& [k, v] : r.metrics) metrics[k] = number(v);
      const json s = {{"experiment", name}, {"out_dir", out_dir},    {"files", r.files},
                      {"metrics", metrics}, {"report", r.report_lines}, {"passed", r.passed}};
      *summary_json = dup_string(s.dump());
    }
  });
}

lp_status lp_verify(uint64_t seed, const int* only, int n_only, char** report_json, int* all_passed) {
  return guarded([&] {
    require(n_only >= 0 && (n_only == 0 || only != nullptr), "lp_verify: bad criterion list");
    std::vector<int> ids(only, only + n_only);
    for (int id : ids) require(id >= 1 && id <= kCriterionCount, "lp_verify: criterion id out of range");
    const auto results = run_acceptance(seed, ids);
    bool ok = true;
    json arr = json::array();
    for (const auto& r : results) {
      ok &= r.passed;
      json j = criterion_json(r);
      j["measured"] = number(r.measured);
      j["threshold"] = number(r.threshold);
      arr.push_back(j);
    }
    if (report_json) *report_json = dup_string(arr.dump());
    if (all_passed) *all_passed = ok ? 1 : 0;
  });
}

}  // extern "C"
