#include "learnpath/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <future>
#include <numbers>
#include <sstream>

#include <Eigen/Core>
#include "json.hpp"

#include "learnpath/acceptance.hpp"
#include "learnpath/adaptive.hpp"
#include "learnpath/closedform.hpp"
#include "learnpath/continual.hpp"
#include "learnpath/csv.hpp"
#include "learnpath/error.hpp"
#include "learnpath/optim.hpp"
#include "learnpath/variational.hpp"
#include "learnpath/version.hpp"

namespace learnpath {
namespace {

namespace fs = std::filesystem;

[[noreturn]] void config_error(const std::string& key, const std::string& why) {
  throw_error(ErrorCode::kConfigError, "key '" + key + "': " + why);
}

Vector vector_key(const ExperimentConfig& cfg, const std::string& key, int expected = -1) {
  const auto xs = cfg.get_doubles(key);
  if (xs.empty()) config_error(key, "empty list");
  if (expected >= 0 && static_cast<int>(xs.size()) != expected) {
    config_error(key, "expected " + std::to_string(expected) + " values, got " + std::to_string(xs.size()));
  }
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

// Row-major square matrix from a flat list.
Matrix matrix_key(const ExperimentConfig& cfg, const std::string& key, int n) {
  const auto xs = cfg.get_doubles(key);
  if (static_cast<int>(xs.size()) != n * n) {
    config_error(key, "expected " + std::to_string(n * n) + " values (row-major " + std::to_string(n) + "x" +
                          std::to_string(n) + "), got " + std::to_string(xs.size()));
  }
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = xs[static_cast<std::size_t>(i * n + j)];
  return m;
}

int positive_int(const ExperimentConfig& cfg, const std::string& key) {
  const long long v = cfg.get_int(key);
  if (v < 1 || v > 2000000000LL) config_error(key, "must be a positive integer");
  return static_cast<int>(v);
}

ObjectiveConfig objective_keys(const ExperimentConfig& cfg) {
  ObjectiveConfig o;
  o.eta = cfg.get_positive("eta");
  o.k = cfg.get_positive("k");
  o.gamma = cfg.get_double("gamma");
  if (o.gamma < 0.0) config_error("gamma", "must be non-negative");
  return o;
}

std::vector<std::string> indexed(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<double> values_of(const Vector& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> join(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::string fmt(double x) { return format_double(x); }

struct Output {
  fs::path dir;
  ExperimentResult result;

  void table(const std::string& name, const CsvTable& t) {
    t.write((dir / name).string());
    result.files.push_back(name);
  }
  void metric(const std::string& name, double value) { result.metrics.emplace_back(name, value); }
  void line(const std::string& text) { result.report_lines.push_back(text); }
};

const std::vector<ConfigKey> kObjectiveKeys = {
    {"eta", "1", "learning-rate constant"},
    {"k", "1", "loss weight"},
};

std::vector<ConfigKey> with_common(std::vector<ConfigKey> keys, const std::string& gamma_default,
                                   const std::string& eta_default = "1") {
  std::vector<ConfigKey> out = kObjectiveKeys;
  out[0].default_value = eta_default;
  out.push_back({"gamma", gamma_default, "discount rate"});
  out.insert(out.end(), keys.begin(), keys.end());
  out.push_back({"seed", "1", "random seed"});
  return out;
}

// ---- trajectory ----

void run_trajectory(const ExperimentConfig& cfg, Output& out) {
  const DoubleWell2D well(cfg.get_double("a"), cfg.get_double("b"), cfg.get_double("c"), cfg.get_double("d"));
  ObjectiveConfig oc = objective_keys(cfg);
  oc.horizon = cfg.get_positive("horizon");
  oc.segments = positive_int(cfg, "segments");
  const auto minima = well.minima();
  if (minima.empty()) throw_error(ErrorCode::kConfigError, "double well parameters give no minimum");

  Vector start(2);
  if (cfg.raw("start") == "shallow") {
    start = minima.back();
    start(1) = 0.5;
  } else {
    start = vector_key(cfg, "start", 2);
  }
  DirectOptConfig opt;
  opt.max_iters = positive_int(cfg, "max_iters");
  opt.convergence_tol = cfg.get_positive("tol");
  const std::string policy = cfg.raw("endpoint_policy");
  if (policy == "searched") {
    opt.endpoint_policy = EndpointPolicy::kSearched;
  } else if (policy != "fixed") {
    config_error("endpoint_policy", "expected 'searched' or 'fixed', got '" + policy + "'");
  }

  const auto search = endpoint_search(well, start, minima, oc, opt);
  const Trajectory& traj = search.best.trajectory;
  const auto profile = eval_objective(traj, well, oc).profile;

  CsvTable path({"t", "theta1", "theta2", "potential"});
  for (int j = 0; j <= traj.segments(); ++j) {
    path.add_row({traj.times(j), traj.states[j](0), traj.states[j](1), profile.potential[j]});
  }
  out.table("trajectory.csv", path);
  CsvTable kinetic({"t", "kinetic"});
  for (int j = 0; j < traj.segments(); ++j) kinetic.add_row({traj.times(j), profile.kinetic[j]});
  out.table("kinetic.csv", kinetic);
  CsvTable cands({"endpoint1", "endpoint2", "objective", "ok"});
  for (const auto& c : search.candidates) cands.add_row({c.endpoint(0), c.endpoint(1), c.objective, c.ok ? 1.0 : 0.0});
  out.table("candidates.csv", cands);

  bool rises = false;
  for (std::size_t j = 1; j < profile.potential.size(); ++j) rises |= profile.potential[j] > profile.potential[j - 1];
  const double dist = (traj.states.back() - minima.front()).norm();
  out.metric("objective", search.best.objective);
  out.metric("final_distance_to_global_minimum", dist);
  out.metric("potential_rises", rises ? 1.0 : 0.0);
  out.metric("iterations", search.best.iterations);
  out.metric("converged", search.best.converged ? 1.0 : 0.0);
  out.line("final state (" + fmt(traj.states.back()(0)) + ", " + fmt(traj.states.back()(1)) +
           "), distance to global minimum " + fmt(dist));
}

// ---- momentum ----

void run_momentum(const ExperimentConfig& cfg, Output& out) {
  ObjectiveConfig base = objective_keys(cfg);
  const double h = cfg.get_positive("curvature");
  const double theta0 = cfg.get_double("theta0");
  const double minimum = cfg.get_double("minimum");
  const double horizon = cfg.get_positive("horizon");
  const int samples = positive_int(cfg, "samples");
  const auto gammas = cfg.get_doubles("gammas");
  if (gammas.empty()) config_error("gammas", "empty list");
  for (double g : gammas) {
    if (g < 0.0) config_error("gammas", "values must be non-negative");
  }
  const QuadraticLoss loss(Vector::Constant(1, theta0), 0.0, Vector::Constant(1, h * (theta0 - minimum)),
                           Matrix::Constant(1, 1, h));

  CsvTable traces({"gamma", "t", "theta", "loss"});
  std::vector<std::pair<double, std::vector<double>>> curves;
  for (double g : gammas) {
    ObjectiveConfig c = base;
    c.gamma = g;
    const auto sol = momentum_spectral(loss, c);
    curves.push_back({g, {}});
    for (int i = 0; i <= samples; ++i) {
      const double t = horizon * i / samples;
      const Vector th = sol.at(t);
      const double excess = loss.value(th) - loss.value(Vector::Constant(1, minimum));
      traces.add_row({g, t, th(0), excess});
      curves.back().second.push_back(excess);
    }
    out.metric("rate_gamma_" + fmt(g), sol.rates(0, 0));
  }
  out.table("momentum_traces.csv", traces);

  // smaller gamma should give the lower loss once past the first 5% of the horizon
  std::sort(curves.begin(), curves.end());
  int violations = 0;
  for (std::size_t c = 1; c < curves.size(); ++c) {
    for (int i = 0; i <= samples; ++i) {
      if (i >= 0.05 * samples && curves[c - 1].second[i] > curves[c].second[i]) ++violations;
    }
  }
  out.metric("gamma_order_violations", violations);
  out.line("gamma ordering violations after 5% of the horizon: " + std::to_string(violations));

  // rate ratios on diag(λ, 4λ), read off the spectral rates
  const double lambda = cfg.get_positive("ratio_lambda");
  const double factor = cfg.get_positive("overdamped_factor");
  const Matrix h2 = Vector((Vector(2) << lambda, 4.0 * lambda).finished()).asDiagonal();
  const QuadraticLoss quad(Vector::Ones(2), 0.0, h2 * Vector::Ones(2), h2);
  CsvTable ratios({"regime", "gamma", "rate_slow", "rate_fast", "ratio"});
  for (const auto& [label, g] : {std::pair<std::string, double>{"ballistic", 0.0},
                                 {"overdamped", factor * std::sqrt(base.eta * base.k * lambda)}}) {
    ObjectiveConfig c = base;
    c.gamma = g;
    const auto sol = momentum_spectral(quad, c);
    const double slow = sol.rates(0, 0), fast = sol.rates(1, 1);
    ratios.add_row({label}, {g, slow, fast, fast / slow});
    out.metric("rate_ratio_" + label, fast / slow);
    out.line(label + " rate ratio " + fmt(fast / slow));
  }
  out.table("rate_ratios.csv", ratios);
}

// ---- geometry ----

void run_geometry(const ExperimentConfig& cfg, Output& out) {
  const ObjectiveConfig oc = objective_keys(cfg);
  const double horizon = cfg.get_positive("horizon");
  const int samples = positive_int(cfg, "samples");
  const Vector theta0 = vector_key(cfg, "theta0");
  const int n = static_cast<int>(theta0.size());
  const Matrix hess = matrix_key(cfg, "hessian", n);
  const Vector grad = vector_key(cfg, "gradient", n);
  const Matrix metric = matrix_key(cfg, "metric", n);
  const QuadraticLoss loss(theta0, 0.0, grad, hess);

  const auto plain = momentum_spectral(loss, oc);
  const auto natural = natural_momentum_spectral(loss, oc, metric);
  CsvTable mt(concat({"kind", "t"}, concat(indexed("theta", n), {"loss"})));
  for (const auto& [label, sol] : {std::pair<std::string, const SpectralSolution*>{"euclidean", &plain},
                                   {"metric", &natural}}) {
    for (int i = 0; i <= samples; ++i) {
      const double t = horizon * i / samples;
      const Vector th = sol->at(t);
      mt.add_row({label}, join(join({t}, values_of(th)), {loss.value(th)}));
    }
  }
  out.table("geometry_metric.csv", mt);

  // rotational drift on an isotropic 2D loss
  const double omega = cfg.get_double("rotation_omega");
  const double h_iso = cfg.get_positive("rotation_curvature");
  Matrix j(2, 2);
  j << 0.0, -omega, omega, 0.0;
  const Vector g2 = vector_key(cfg, "rotation_gradient", 2);
  const Vector th2 = vector_key(cfg, "rotation_theta0", 2);
  const auto rot = rotation_drift_spectral(j, h_iso, g2, th2, oc);
  CsvTable rt({"t", "theta1", "theta2", "radius", "angle"});
  double unwrapped = 0.0, prev = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double t = horizon * i / samples;
    const Vector th = rot.at(t);
    const Vector d = th - rot.target;
    const double angle = std::atan2(d(1), d(0));
    if (i > 0) {
      double step = angle - prev;
      while (step > std::numbers::pi) step -= 2 * std::numbers::pi;
      while (step < -std::numbers::pi) step += 2 * std::numbers::pi;
      unwrapped += step;
    }
    prev = angle;
    rt.add_row({t, th(0), th(1), d.norm(), unwrapped});
  }
  out.table("geometry_rotation.csv", rt);
  out.metric("rotation_limit_1", rot.target(0));
  out.metric("rotation_limit_2", rot.target(1));
  out.metric("rotation_total_angle", unwrapped);

  const double decay = cfg.get_double("decay_j");
  const auto wd = weight_decay_spectral(decay, loss, oc);
  CsvTable dt(concat({"t"}, concat(indexed("theta", n), {"loss"})));
  for (int i = 0; i <= samples; ++i) {
    const double t = horizon * i / samples;
    const Vector th = wd.at(t);
    dt.add_row(join(join({t}, values_of(th)), {loss.value(th)}));
  }
  out.table("geometry_decay.csv", dt);
  for (int i = 0; i < n; ++i) out.metric("decay_limit_" + std::to_string(i + 1), wd.target(i));
  out.line("rotation limit (" + fmt(rot.target(0)) + ", " + fmt(rot.target(1)) + "), total angle " + fmt(unwrapped));
}

// ---- adaptive ----

void run_adaptive(const ExperimentConfig& cfg, Output& out) {
  AdaptiveParams p;
  p.eta = cfg.get_positive("eta");
  p.k = cfg.get_positive("k");
  p.gamma = cfg.get_positive("gamma");
  p.kappa = cfg.get_positive("kappa");
  p.xi1 = cfg.get_positive("xi1");
  p.xi2 = cfg.get_positive("xi2");
  p.alpha1 = cfg.get_double("alpha1");
  p.alpha2 = cfg.get_double("alpha2");
  p.sigma1 = cfg.get_positive("sigma1");
  p.sigma2 = cfg.get_positive("sigma2");
  p.validate();
  const double dt = cfg.get_positive("dt");
  const int record_every = positive_int(cfg, "record_every");
  const Vector curv = vector_key(cfg, "curvatures");
  const int n = static_cast<int>(curv.size());
  const Vector centre = vector_key(cfg, "minimum", n);
  const Vector start = vector_key(cfg, "start", n);
  const double horizon = cfg.get_positive("horizon_factor") / p.gamma;
  const int steps = static_cast<int>(std::lround(horizon / dt));
  if (steps < 1) config_error("dt", "longer than the horizon");

  auto grad = [&](const Vector& th) { return Vector(curv.cwiseProduct(th - centre)); };
  const BeliefState s0 = BeliefState::initial(start, grad(start));
  CsvTable traces(concat({"driver", "t"}, concat(indexed("theta", n), concat(indexed("m", n), indexed("v", n)))));
  std::vector<std::pair<std::string, BeliefTrace>> runs;
  for (const auto& name : cfg.get_strings("drivers")) {
    BeliefDriver d;
    if (name == "full") {
      d = BeliefDriver::kFull;
    } else if (name == "simplified") {
      d = BeliefDriver::kSimplified;
    } else if (name == "reduced") {
      d = BeliefDriver::kReduced;
    } else {
      config_error("drivers", "unknown driver '" + name + "' (full, simplified, reduced)");
    }
    runs.emplace_back(name, drive_beliefs(d, s0, grad, p, dt, steps, record_every));
  }
  for (const auto& [name, trace] : runs) {
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
      const auto& s = trace.states[i];
      traces.add_row({name}, join(join({trace.times[i]}, values_of(s.theta)), join(values_of(s.m), values_of(s.v))));
    }
    out.metric("floor_hits_" + name, static_cast<double>(trace.states.back().floor_hits));
  }
  out.table("adaptive_traces.csv", traces);

  // every second-order driver against the reduced rule
  const BeliefTrace* reduced = nullptr;
  for (const auto& [name, trace] : runs) {
    if (name == "reduced") reduced = &trace;
  }
  if (reduced) {
    for (const auto& [name, trace] : runs) {
      if (name == "reduced") continue;
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < trace.states.size(); ++i) {
        err = std::max(err, (trace.states[i].theta - reduced->states[i].theta).norm());
        scale = std::max(scale, (reduced->states[i].theta - start).norm());
      }
      const double rel = scale > 0.0 ? err / scale : err;
      out.metric("relative_error_" + name + "_vs_reduced", rel);
      out.line(name + " vs reduced: relative theta error " + fmt(rel));
    }
  }

  OUProbeParams op;
  op.tau = cfg.get_positive("ou_tau");
  op.sigma = cfg.get_double("ou_sigma");
  op.n_steps = cfg.get_int("ou_steps");
  op.dt = cfg.get_positive("ou_dt");
  op.seed = cfg.get_u64("seed");
  const Vector ou_grad = vector_key(cfg, "ou_gradient");
  const int m = static_cast<int>(ou_grad.size());
  op.hessian = matrix_key(cfg, "ou_hessian", m);
  op.gradient = ou_grad;
  op.theta0 = Vector::Zero(m);
  const auto probe = ou_probe(op);
  CsvTable ou({"row", "col", "empirical", "predicted", "predicted_stationary", "predicted_discrete"});
  for (int i = 0; i < m; ++i)
    for (int c = 0; c < m; ++c)
      ou.add_row({static_cast<double>(i + 1), static_cast<double>(c + 1), probe.empirical(i, c), probe.predicted(i, c),
                  probe.predicted_stationary(i, c), probe.predicted_discrete(i, c)});
  out.table("ou_probe.csv", ou);
  out.metric("ou_relative_error", probe.relative_error);
  out.line("noisy-landscape probe: relative covariance error " + fmt(probe.relative_error));
}

// ---- continual ----

void run_continual(const ExperimentConfig& cfg, Output& out) {
  ObjectiveConfig oc = objective_keys(cfg);
  const Vector curv1 = vector_key(cfg, "curvatures");
  const int n = static_cast<int>(curv1.size());
  const Vector curv2 = vector_key(cfg, "curvatures2", n);
  const Vector min1 = vector_key(cfg, "minimum", n);
  const Vector min2 = vector_key(cfg, "minimum2", n);
  const Vector mu0 = vector_key(cfg, "mu0", n);
  const Vector v0 = vector_key(cfg, "v0", n);
  const double dt = cfg.get_positive("dt");
  const int record_every = positive_int(cfg, "record_every");
  auto task = [&](const Vector& curv, const Vector& minimum) {
    const Matrix h = curv.asDiagonal();
    return QuadraticLoss(Vector::Zero(n), 0.5 * minimum.dot(h * minimum), -(h * minimum), h);
  };
  const TaskSchedule schedule{{{task(curv1, min1), cfg.get_positive("duration")},
                               {task(curv2, min2), cfg.get_positive("duration2")}}};
  const auto init = DistributionalState::initial(mu0, v0);
  for (const auto& mode : cfg.get_strings("modes")) {
    ContinualMode cm;
    if (mode == "full") {
      cm = ContinualMode::kFull;
    } else if (mode == "overdamped") {
      cm = ContinualMode::kOverdamped;
    } else {
      config_error("modes", "unknown mode '" + mode + "' (full, overdamped)");
    }
    const auto trace = run_schedule(init, schedule, oc, dt, cm, record_every);
    CsvTable t(concat({"t", "segment"}, concat(indexed("mu", n), indexed("v", n))));
    double peak = 0.0;
    for (std::size_t i = 0; i < trace.states.size(); ++i) {
      const auto& s = trace.states[i];
      t.add_row(join({trace.times[i], static_cast<double>(trace.segment[i])}, join(values_of(s.mu), values_of(s.v))));
      if (trace.segment[i] == 1) peak = std::max(peak, s.v.maxCoeff());
    }
    out.table("continual_" + mode + ".csv", t);
    const Vector& v_end = trace.states.back().v;
    const Vector eq = (oc.k * curv2).cwiseInverse();
    out.metric(mode + "_final_equilibrium_error", (v_end - eq).cwiseAbs().maxCoeff());
    out.metric(mode + "_second_task_peak_variance", peak);
    out.metric(mode + "_floor_hits", static_cast<double>(trace.states.back().floor_hits));
    out.line(mode + ": final variance error vs 1/(kH) " + fmt((v_end - eq).cwiseAbs().maxCoeff()));
  }
}

// ---- train ----

void run_train(const ExperimentConfig& cfg, Output& out) {
  const std::uint64_t seed = cfg.get_u64("seed");
  const std::string kind = cfg.raw("dataset");
  const double test_fraction = cfg.get_positive("test_fraction");
  DatasetSplit split;
  if (kind == "csv") {
    if (cfg.raw("csv_path").empty()) config_error("csv_path", "required when dataset = csv");
    split = split_dataset(load_csv_dataset(cfg.raw("csv_path")), test_fraction, seed);
  } else if (kind == "idx") {
    if (cfg.raw("idx_images").empty() || cfg.raw("idx_labels").empty()) {
      config_error("idx_images", "idx_images and idx_labels are required when dataset = idx");
    }
    const Dataset train_set = load_idx(cfg.raw("idx_images"), cfg.raw("idx_labels"));
    if (!cfg.raw("idx_test_images").empty()) {
      split = {train_set, load_idx(cfg.raw("idx_test_images"), cfg.raw("idx_test_labels"))};
      split.test.classes = split.train.classes = std::max(split.train.classes, split.test.classes);
    } else {
      split = split_dataset(train_set, test_fraction, seed);
    }
  } else {
    SyntheticKind sk;
    try {
      sk = parse_synthetic(kind);
    } catch (const Error&) {
      config_error("dataset", "unknown dataset '" + kind + "' (blobs, two_moons, anisotropic_quadratic, csv, idx)");
    }
    split = split_dataset(make_synthetic(sk, positive_int(cfg, "n"), seed), test_fraction, seed);
  }

  MlpSpec spec;
  spec.widths.push_back(split.train.features());
  for (double w : cfg.get_doubles("hidden")) {
    if (w < 1 || w != std::floor(w)) config_error("hidden", "widths must be positive integers");
    spec.widths.push_back(static_cast<int>(w));
  }
  spec.widths.push_back(split.train.is_regression() ? static_cast<int>(split.train.targets.cols())
                                                    : split.train.classes);
  const std::string act = cfg.raw("activation");
  if (act == "tanh") {
    spec.activation = Activation::kTanh;
  } else if (act != "relu") {
    config_error("activation", "expected relu or tanh");
  }
  spec.init_scale = cfg.get_double("init_scale");
  spec.seed = seed;

  TrainConfig tc;
  tc.epochs = positive_int(cfg, "epochs");
  tc.batch_size = positive_int(cfg, "batch_size");
  tc.max_steps = cfg.get_int("max_steps");
  tc.eval_every = positive_int(cfg, "eval_every");
  tc.seed = seed;

  std::vector<OptimizerConfig> opts;
  for (const auto& name : cfg.get_strings("optimizers")) {
    OptimizerConfig o;
    try {
      o.kind = parse_optimizer(name);
    } catch (const Error&) {
      config_error("optimizers", "unknown optimizer '" + name + "' (sgd, adam, ballistic)");
    }
    o.learning_rate = cfg.get_positive("eta_" + name);
    o.beta1 = cfg.get_double("beta1");
    o.beta2 = cfg.get_double("beta2");
    o.eps = cfg.get_positive("eps");
    o.seed = seed;
    try {
      o.validate();
    } catch (const Error& e) {
      throw_error(ErrorCode::kConfigError, e.what());
    }
    opts.push_back(o);
  }
  if (opts.empty()) config_error("optimizers", "empty list");

  // independent runs in parallel, each with its own state
  std::vector<std::future<TrainResult>> jobs;
  for (const auto& o : opts) {
    jobs.push_back(std::async(std::launch::async, [&, o] { return train(spec, split.train, split.test, o, tc); }));
  }
  for (std::size_t i = 0; i < opts.size(); ++i) {
    const TrainResult res = jobs[i].get();
    const std::string name = optimizer_name(opts[i].kind);
    CsvTable t({"step", "train_loss", "test_loss", "test_accuracy"});
    for (const auto& p : res.curve) {
      t.add_row({static_cast<double>(p.step), p.train_loss, p.test_loss, p.test_accuracy});
    }
    out.table("train_" + name + ".csv", t);
    const auto& last = res.curve.back();
    out.metric(name + "_final_train_loss", last.train_loss);
    out.metric(name + "_final_test_loss", last.test_loss);
    if (!split.test.is_regression()) out.metric(name + "_final_test_accuracy", last.test_accuracy);
    out.line(name + ": final train loss " + fmt(last.train_loss) +
             (split.test.is_regression() ? "" : ", test accuracy " + fmt(last.test_accuracy)));
  }
}

// ---- verify ----

void run_verify(const ExperimentConfig& cfg, Output& out) {
  std::vector<int> only;
  for (double id : cfg.get_doubles("only")) {
    if (id < 1 || id > kCriterionCount || id != std::floor(id)) {
      config_error("only", "criterion ids are integers in 1.." + std::to_string(kCriterionCount));
    }
    only.push_back(static_cast<int>(id));
  }
  const auto results = run_acceptance(cfg.get_u64("seed"), only);
  CsvTable t({"criterion", "passed", "measured", "threshold", "seconds"});
  nlohmann::json report = nlohmann::json::array();
  for (const auto& r : results) {
    t.add_row({static_cast<double>(r.id), r.passed ? 1.0 : 0.0, r.measured, r.threshold, r.seconds});
    report.push_back({{"criterion", r.id},
                      {"name", r.name},
                      {"passed", r.passed},
                      {"measured", r.measured},
                      {"threshold", r.threshold},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    out.line(format_criterion(r));
    out.result.passed &= r.passed;
  }
  out.table("verify.csv", t);
  write_text_file((out.dir / "verify.json").string(), report.dump(2) + "\n");
  out.result.files.push_back("verify.json");
  int passed = 0;
  for (const auto& r : results) passed += r.passed;
  out.metric("criteria_passed", passed);
  out.metric("criteria_total", static_cast<double>(results.size()));
}

using Runner = void (*)(const ExperimentConfig&, Output&);

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{"trajectory",
        "direct optimization of the double-well objective: optimal path, kinetic and potential energy profile",
        with_common({{"a", "1", "double-well quartic weight"},
                     {"b", "1", "double-well squared minimum location"},
                     {"c", "1", "weight of the second coordinate"},
                     {"d", "-0.5", "tilt; negative makes the positive well deeper"},
                     {"horizon", "20", "cutoff time T"},
                     {"segments", "400", "grid segments N"},
                     {"start", "shallow", "'shallow' (shallow minimum, second coordinate 0.5) or 'x,y'"},
                     {"endpoint_policy", "searched", "searched (free final node) or fixed"},
                     {"max_iters", "20000", "optimizer iteration cap"},
                     {"tol", "1e-6", "convergence tolerance"}},
                    "0.1")},
       run_trajectory},
      {{"momentum", "closed-form momentum trajectories across gamma, loss curves and per-direction rate ratios",
        with_common({{"curvature", "1", "1D loss curvature h"},
                     {"theta0", "1", "start"},
                     {"minimum", "0", "loss minimizer"},
                     {"gammas", "0,1,10", "discount rates to sweep"},
                     {"horizon", "10", "time span of the traces"},
                     {"samples", "400", "samples per trace"},
                     {"ratio_lambda", "1", "smaller curvature of the diag(l, 4l) rate-ratio problem"},
                     {"overdamped_factor", "100", "gamma / sqrt(eta k lambda) for the overdamped ratio"}},
                    "0")},
       run_momentum},
      {{"geometry", "metric, rotational-drift and weight-decay trajectories",
        with_common({{"horizon", "20", "time span"},
                     {"samples", "400", "samples per trajectory"},
                     {"theta0", "1,1", "start (also the loss expansion point)"},
                     {"hessian", "1,0.3,0.3,2", "row-major loss Hessian"},
                     {"gradient", "0.5,-0.5", "loss gradient at theta0"},
                     {"metric", "4,0,0,1", "row-major SPD metric"},
                     {"rotation_omega", "0.8", "rotation rate of the drift J"},
                     {"rotation_curvature", "1", "isotropic curvature for the rotation run"},
                     {"rotation_gradient", "0.3,0.1", "gradient at the rotation start"},
                     {"rotation_theta0", "2,-1", "rotation start"},
                     {"decay_j", "0.6", "weight-decay drift strength"}},
                    "0.1")},
       run_geometry},
      {{"adaptive", "belief dynamics traces, reduced-rule comparison and noisy-landscape covariance probe",
        with_common({{"kappa", "1", "variance scale in the reduced rule"},
                     {"xi1", "0.031622776601683794", "drift noise of m"},
                     {"xi2", "0.031622776601683794", "drift noise of v"},
                     {"alpha1", "0", "prior pull of m"},
                     {"alpha2", "0", "prior pull of v"},
                     {"sigma1", "1", "observation noise of m"},
                     {"sigma2", "1", "observation noise of v"},
                     {"dt", "1e-4", "integration step"},
                     {"horizon_factor", "10", "horizon in units of 1/gamma"},
                     {"record_every", "100", "trace stride"},
                     {"curvatures", "1,4", "diagonal loss curvatures"},
                     {"minimum", "1,-2", "loss minimizer"},
                     {"start", "0,0", "initial parameters"},
                     {"drivers", "simplified,reduced", "full, simplified, reduced"},
                     {"ou_tau", "1", "probe time constant"},
                     {"ou_sigma", "1", "probe noise amplitude"},
                     {"ou_steps", "1000000", "probe steps"},
                     {"ou_dt", "0.01", "probe step"},
                     {"ou_hessian", "2,0.5,0.5,1", "row-major probe Hessian"},
                     {"ou_gradient", "0.3,-0.2", "probe gradient at the expansion point"}},
                    "1", "1000")},
       run_adaptive},
      {{"continual", "mean and variance traces across a task switch",
        with_common({{"curvatures", "2,0.5", "first task curvatures"},
                     {"curvatures2", "1,0.5", "second task curvatures"},
                     {"minimum", "0,0", "first task minimizer"},
                     {"minimum2", "0,1", "second task minimizer"},
                     {"mu0", "0,0", "initial means"},
                     {"v0", "0.5,2", "initial variances"},
                     {"duration", "300", "first task duration"},
                     {"duration2", "300", "second task duration"},
                     {"dt", "0.01", "integration step"},
                     {"record_every", "100", "trace stride"},
                     {"modes", "overdamped,full", "overdamped, full"}},
                    "10")},
       run_continual},
      {{"train", "optimizer comparison on a small multilayer perceptron",
        {{"dataset", "blobs", "blobs, two_moons, anisotropic_quadratic, csv, idx"},
         {"n", "1000", "synthetic dataset size"},
         {"csv_path", "", "CSV dataset with a 'label' column"},
         {"idx_images", "", "IDX image file"},
         {"idx_labels", "", "IDX label file"},
         {"idx_test_images", "", "optional IDX test images"},
         {"idx_test_labels", "", "optional IDX test labels"},
         {"test_fraction", "0.2", "held-out fraction when no test set is given"},
         {"hidden", "16", "hidden widths, comma separated"},
         {"activation", "relu", "relu or tanh"},
         {"init_scale", "1", "weight init scale"},
         {"optimizers", "sgd,adam,ballistic", "optimizers to compare"},
         {"eta_sgd", "0.1", "SGD learning rate"},
         {"eta_adam", "0.01", "Adam learning rate"},
         {"eta_ballistic", "0.01", "ballistic learning rate"},
         {"beta1", "0.9", "Adam first-moment decay"},
         {"beta2", "0.999", "second-moment decay"},
         {"eps", "1e-8", "denominator floor"},
         {"epochs", "100", "epochs"},
         {"batch_size", "32", "mini-batch size"},
         {"max_steps", "200", "step cap, negative for none"},
         {"eval_every", "10", "curve stride in steps"},
         {"seed", "1", "random seed"}}},
       run_train},
      {{"verify", "acceptance suite, one pass/fail record per criterion",
        {{"only", "", "criterion ids to run, comma separated; empty runs all"}, {"seed", "1", "random seed"}}},
       run_verify},
  };
  return entries;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.info.name == name) return e;
  }
  std::string known;
  for (const auto& e : registry()) known += (known.empty() ? "" : ", ") + e.info.name;
  throw_error(ErrorCode::kConfigError, "unknown experiment '" + name + "' (known: " + known + ")");
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) { return find_entry(name).info; }

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir) {
  const Entry& entry = find_entry(name);
  // the config must have been built from this experiment's schema
  for (const auto& k : entry.info.schema) (void)cfg.raw(k.key);

  Output out;
  out.dir = out_dir;
  std::error_code ec;
  fs::create_directories(out.dir, ec);
  if (ec) throw_error(ErrorCode::kIoError, "cannot create output directory '" + out_dir + "': " + ec.message());

  const std::string started = utc_now();
  const auto start = std::chrono::steady_clock::now();
  entry.run(cfg, out);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : cfg.entries()) config[k] = v;
  nlohmann::json metrics = nlohmann::json::object();
  for (const auto& [k, v] : out.result.metrics) {
    metrics[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_double(v));
  }
  nlohmann::json manifest = {
      {"schema_version", 1},
      {"tool", "learnpath"},
      {"version", kVersionString},
      {"experiment", name},
      {"reproduces", entry.info.reproduces},
      {"seed", cfg.get_u64("seed")},
      {"config", config},
      {"outputs", out.result.files},
      {"metrics", metrics},
      {"passed", out.result.passed},
      {"versions",
       {{"learnpath", kVersionString},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"compiler", __VERSION__},
        {"cxx_standard", static_cast<long>(__cplusplus)}}},
      {"started_at", started},
      {"wall_time_seconds", wall},
  };
  write_text_file((out.dir / "manifest.json").string(), manifest.dump(2) + "\n");
  return out.result;
}

}  // namespace learnpath
