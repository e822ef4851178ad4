#include "simulest/cli/run.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "simulest/apps.hpp"
#include "simulest/estimator.hpp"
#include "simulest/functionals.hpp"
#include "simulest/hardness.hpp"
#include "simulest/stats.hpp"

#ifndef SIMULEST_VERSION
#define SIMULEST_VERSION "unknown"
#endif

namespace simulest::cli {

namespace {

constexpr double kHermiticityTolerance = 1e-10;
constexpr double kCommutatorTolerance = 1e-8;
constexpr double kMeanTolerance = 1e-10;
constexpr double kVarianceSlack = 1e-10;
constexpr double kSymbolicTolerance = 1e-9;
constexpr double kCoolingTolerance = 1e-10;
constexpr double kRelativeFloor = 1e-4;

double relative_error(double value, double truth, double scale) {
  return std::abs(value - truth) / std::max(std::abs(truth), kRelativeFloor * scale);
}

/// Collects named pass/fail checks.
class Checks {
 public:
  void add(const std::string& name, bool pass, double value, double tolerance) {
    items_.push_back({{"name", name}, {"pass", pass}, {"value", value}, {"tolerance", tolerance}});
    all_ = all_ && pass;
  }
  void add(const std::string& name, bool pass) {
    items_.push_back({{"name", name}, {"pass", pass}});
    all_ = all_ && pass;
  }
  const json& items() const noexcept { return items_; }
  bool all() const noexcept { return all_; }

 private:
  json items_ = json::array();
  bool all_ = true;
};

/// Shortest representation that round-trips.
std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, end);
}

json versions() {
  std::ostringstream eigen;
  eigen << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  std::ostringstream boost;
  boost << BOOST_VERSION / 100000 << '.' << BOOST_VERSION / 100 % 1000 << '.' << BOOST_VERSION % 100;
  std::ostringstream nl;
  nl << NLOHMANN_JSON_VERSION_MAJOR << '.' << NLOHMANN_JSON_VERSION_MINOR << '.' << NLOHMANN_JSON_VERSION_PATCH;
  return {{"simulest", SIMULEST_VERSION}, {"eigen", eigen.str()}, {"boost", boost.str()}, {"nlohmann_json", nl.str()}};
}

json plan_json(const stats::Plan& p) {
  return {{"k_max", p.k_max},           {"epsilon", p.epsilon},     {"opnorm", p.opnorm},
          {"n_per_batch", p.n_per_batch}, {"m_batches", p.m_batches}, {"total_samples", p.total_samples}};
}

json estimation_json(const stats::EstimationResult& r) {
  json estimates = json::array();
  for (const auto& e : r.estimates) {
    json row;
    row["k"] = e.k;
    row["median"] = e.median;
    row["truth"] = e.truth ? json(*e.truth) : json(nullptr);
    row["error"] = e.error ? json(*e.error) : json(nullptr);
    row["success"] = e.success ? json(*e.success) : json(nullptr);
    row["batches"] = e.batches;
    estimates.push_back(row);
  }
  const auto all = r.all_success();
  return {{"plan", plan_json(r.plan)},
          {"copies_used", r.copies_used},
          {"batches_used", r.batches_used},
          {"total_samples", r.copies_used * r.batches_used},
          {"estimates", estimates},
          {"all_success", all ? json(*all) : json(nullptr)}};
}

/// Deterministic sanity checks on a combined result.
void check_estimation(const stats::EstimationResult& r, const std::string& prefix, Checks& checks) {
  bool order_statistic = true;
  for (const auto& e : r.estimates) {
    order_statistic = order_statistic && std::find(e.batches.begin(), e.batches.end(), e.median) != e.batches.end() &&
                      e.median == stats::median(e.batches);
  }
  checks.add(prefix + "median_is_lower_middle_order_statistic", order_statistic);
  const auto& p = r.plan;
  checks.add(prefix + "plan_arithmetic",
             p.total_samples == p.n_per_batch * p.m_batches &&
                 p.n_per_batch == static_cast<std::size_t>(std::ceil(6.0 * static_cast<double>(p.k_max) * p.opnorm *
                                                                     p.opnorm / (p.epsilon * p.epsilon))) &&
                 p.m_batches ==
                     static_cast<std::size_t>(std::ceil(18.0 * std::log(3.0 * static_cast<double>(p.k_max)))));
}

rep::HermitianOperator hamiltonian(const RunConfig& cfg, const std::string& name, const std::string& path) {
  if (!path.empty()) {
    const auto file = cfg.resolve(path);
    try {
      return rep::HermitianOperator(read_matrix_file(file));
    } catch (const DomainError& e) {
      throw ConfigError("Hamiltonian file " + file.string() + ": " + e.what());
    }
  }
  try {
    return apps::builtin_hamiltonian(name);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::string csv_text(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Commands

json run_verify(const RunConfig& cfg, Checks& checks) {
  const std::size_t n = cfg.n_copies.value_or(4);
  const auto o = resolve_observable(cfg, cfg.observable, cfg.d);
  const auto rho = resolve_state(cfg);
  const auto suite = estimator::EstimatorSuite::build(o, n);
  const auto dense = estimator::exact_moments(suite, rho);
  const auto from_distribution = estimator::distribution_moments(suite, rho);

  std::vector<rep::Matrix> matrices;
  for (std::size_t k = 1; k <= n; ++k) matrices.push_back(estimator::estimator_matrix(o, n, k));

  json rows = json::array();
  double worst_hermiticity = 0.0;
  double worst_mean = 0.0;
  double worst_lower = -INFINITY;
  double worst_upper = -INFINITY;
  double worst_block = -INFINITY;
  double worst_symbolic = 0.0;
  double worst_distribution = 0.0;
  double min_variance = INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = dense.rows[i];
    const double norm = rep::operator_norm(matrices[i]);
    const double herm = norm > 0.0 ? rep::hermiticity_residual(matrices[i]) / norm : 0.0;
    const auto sym = estimator::exact_moments_symbolic(o, rho, n, row.k);
    const double sym_diff = std::max(std::abs(sym.mean - row.mean), std::abs(sym.variance - row.variance));
    const auto& drow = from_distribution.rows[i];
    const double dist_diff = std::max(std::abs(drow.mean - row.mean), std::abs(drow.variance - row.variance));
    worst_hermiticity = std::max(worst_hermiticity, herm);
    worst_mean = std::max(worst_mean, relative_error(row.mean, row.truth, o.norm()));
    worst_lower = std::max(worst_lower, row.variance - row.tk_variance);
    worst_upper = std::max(worst_upper, row.tk_variance - row.bound);
    worst_block = std::max(worst_block, row.tk_variance - row.block_bound);
    worst_symbolic = std::max(worst_symbolic, sym_diff);
    worst_distribution = std::max(worst_distribution, dist_diff);
    min_variance = std::min(min_variance, row.variance);
    rows.push_back({{"k", row.k},
                    {"truth", row.truth},
                    {"mean", row.mean},
                    {"second_moment", row.second_moment},
                    {"variance", row.variance},
                    {"tk_variance", row.tk_variance},
                    {"block_bound", row.block_bound},
                    {"bound", row.bound},
                    {"slack_tk", row.tk_variance - row.variance},
                    {"slack_bound", row.bound - row.tk_variance},
                    {"estimator_norm", norm},
                    {"hermiticity_residual", herm},
                    {"symbolic_mean", sym.mean},
                    {"symbolic_variance", sym.variance},
                    {"orbit_size", sym.orbit_size}});
  }
  const double commutator = rep::max_relative_commutator(matrices);

  checks.add("hermiticity", worst_hermiticity <= kHermiticityTolerance, worst_hermiticity, kHermiticityTolerance);
  checks.add("commutativity", commutator <= kCommutatorTolerance, commutator, kCommutatorTolerance);
  checks.add("unbiased_mean", worst_mean <= kMeanTolerance, worst_mean, kMeanTolerance);
  checks.add("variance_nonnegative", min_variance >= -kVarianceSlack, min_variance, -kVarianceSlack);
  checks.add("variance_below_tk", worst_lower <= kVarianceSlack, worst_lower, kVarianceSlack);
  checks.add("tk_below_block_bound", worst_block <= kVarianceSlack, worst_block, kVarianceSlack);
  checks.add("tk_below_bound", worst_upper <= kVarianceSlack, worst_upper, kVarianceSlack);
  checks.add("symbolic_matches_dense", worst_symbolic <= kSymbolicTolerance, worst_symbolic, kSymbolicTolerance);
  checks.add("distribution_matches_dense", worst_distribution <= kSymbolicTolerance, worst_distribution,
             kSymbolicTolerance);

  return {{"n", n},
          {"d", cfg.d},
          {"opnorm", o.norm()},
          {"observable", matrix_to_json(o.matrix())},
          {"state", matrix_to_json(rho.matrix())},
          {"suite",
           {{"dim", suite.dim()},
            {"shared_basis", suite.shared_basis()},
            {"hermiticity_residual", suite.hermiticity_residual()},
            {"joint_residual", suite.joint_residual()},
            {"dense_commutator_residual", commutator}}},
          {"moments", rows}};
}

json run_estimate(const RunConfig& cfg, std::size_t threads, Checks& checks) {
  const auto o = resolve_observable(cfg, cfg.observable, cfg.d);
  const auto rho = resolve_state(cfg);
  stats::RunOptions options;
  options.threads = threads;
  options.copies = cfg.n_copies;
  options.batches = cfg.batches;
  const auto result = stats::run_simultaneous(rho, o, cfg.k_max, cfg.epsilon, cfg.seed, options);
  check_estimation(result, "", checks);
  json payload{{"opnorm", o.norm()}, {"estimation", estimation_json(result)}};

  if (!cfg.polynomials.empty()) {
    std::vector<functionals::Polynomial> polys;
    for (const auto& c : cfg.polynomials) polys.emplace_back(c);
    stats::RunOptions poly_options = options;
    poly_options.label = "functional";
    const auto report = functionals::estimate_multi(o, polys, rho, cfg.epsilon, cfg.seed, poly_options);
    json estimates = json::array();
    for (const auto& e : report.estimates) {
      estimates.push_back({{"coeffs", e.coeffs},
                           {"estimate", e.estimate},
                           {"truth", e.truth},
                           {"error", e.error},
                           {"success", e.success},
                           {"sigma", e.sigma},
                           {"sigma_bound", e.sigma_bound}});
    }
    payload["functionals"] = {{"strategy", functionals::to_string(report.strategy)},
                              {"m", report.m},
                              {"k", report.k},
                              {"epsilon", report.epsilon},
                              {"target", report.target},
                              {"max_l1", report.max_l1},
                              {"precision", report.precision},
                              {"failure_per_item", report.failure_per_item},
                              {"n_per_batch", report.n_per_batch},
                              {"m_batches", report.m_batches},
                              {"total_samples", report.total_samples},
                              {"estimates", estimates},
                              {"all_success", report.all_success()}};
  }
  return payload;
}

json run_hardness(const RunConfig& cfg, Checks& checks, std::optional<std::string>& csv) {
  const auto rows = hardness::sweep(cfg.hardness.ks, cfg.hardness.epsilons, cfg.hardness.a);
  json out = json::array();
  std::vector<std::vector<std::string>> table;
  bool zero_gap = true;
  for (const auto& r : rows) {
    const double limit = 1.0 / (2.0 * (static_cast<double>(r.k) - 1.0));
    out.push_back({{"k", r.k},
                   {"epsilon", r.epsilon},
                   {"gap", r.gap},
                   {"gap_over_epsilon", r.epsilon > 0.0 ? json(r.gap / r.epsilon) : json(nullptr)},
                   {"gap_slope", hardness::gap_slope(r.k, cfg.hardness.a)},
                   {"infidelity", r.infidelity},
                   {"infidelity_over_epsilon2", r.epsilon > 0.0 ? json(r.infidelity / (r.epsilon * r.epsilon))
                                                                : json(nullptr)},
                   {"infidelity_limit", limit},
                   {"required_samples", std::isfinite(r.required_samples) ? json(r.required_samples) : json(nullptr)}});
    table.push_back({std::to_string(r.k), format_double(r.epsilon), format_double(r.gap), format_double(r.infidelity),
                     format_double(r.required_samples)});
    if (r.epsilon == 0.0) zero_gap = zero_gap && r.gap == 0.0 && r.infidelity == 0.0;
  }
  checks.add("zero_epsilon_has_zero_gap", zero_gap);
  csv = csv_text({"k", "epsilon", "gap", "infidelity", "required_samples"}, table);
  return {{"a", cfg.hardness.a}, {"rows", out}};
}

json run_spectroscopy(const RunConfig& cfg, std::size_t threads, Checks& checks) {
  apps::SpectroscopyConfig sc;
  sc.d_a = cfg.spectroscopy.d_a;
  sc.d_b = cfg.spectroscopy.d_b;
  sc.k_max = cfg.k_max;
  sc.epsilon = cfg.epsilon;
  sc.state_seed = cfg.spectroscopy.state_seed.value_or(derive_seed(cfg.seed, "spectroscopy-state-seed"));
  if (!cfg.spectroscopy.amplitudes_path.empty()) {
    const auto file = cfg.resolve(cfg.spectroscopy.amplitudes_path);
    std::ifstream in(file);
    json j;
    try {
      j = json::parse(in);
      const auto re = j.at("re").get<std::vector<double>>();
      const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>() : std::vector<double>(re.size(), 0.0);
      if (im.size() != re.size()) throw ConfigError("amplitude file " + file.string() + ": re and im lengths differ");
      rep::Vector psi(static_cast<Eigen::Index>(re.size()));
      for (std::size_t i = 0; i < re.size(); ++i) psi(static_cast<Eigen::Index>(i)) = rep::Complex(re[i], im[i]);
      sc.amplitudes = psi;
    } catch (const json::exception& e) {
      throw ConfigError("amplitude file " + file.string() + ": " + e.what());
    }
  }
  stats::RunOptions options;
  options.threads = threads;
  options.copies = cfg.n_copies;
  options.batches = cfg.batches;
  const auto report = apps::spectroscopy(sc, cfg.seed, options);
  check_estimation(report.result, "", checks);
  checks.add("reduced_state_unit_trace", std::abs(report.reduced.trace().real() - 1.0) <= 1e-10);
  return {{"d_a", report.d_a},
          {"d_b", report.d_b},
          {"state_seed", sc.amplitudes ? json(nullptr) : json(sc.state_seed)},
          {"reduced_state", matrix_to_json(report.reduced)},
          {"estimation", estimation_json(report.result)},
          {"total_samples", report.total_samples}};
}

json run_cool(const RunConfig& cfg, std::size_t threads, Checks& checks) {
  apps::CoolingConfig cc;
  cc.h = hamiltonian(cfg, cfg.cool.hamiltonian, cfg.cool.hamiltonian_path);
  cc.o = resolve_observable(cfg, cfg.cool.observable, cc.h.dim());
  cc.beta = cfg.cool.beta;
  cc.n_max = cfg.cool.n_max;
  cc.epsilon = cfg.epsilon;
  stats::RunOptions options;
  options.threads = threads;
  options.copies = cfg.n_copies;
  options.batches = cfg.batches;
  const auto report = apps::virtual_cooling(cc, cfg.seed, options);
  check_estimation(report.numerator, "numerator_", checks);
  check_estimation(report.denominator, "denominator_", checks);
  json rows = json::array();
  double worst_identity = 0.0;
  for (const auto& r : report.rows) {
    worst_identity = std::max(worst_identity, r.identity_residual);
    rows.push_back({{"k", r.k},
                    {"numerator", r.numerator},
                    {"denominator", r.denominator},
                    {"ratio", r.ratio},
                    {"ratio_error", r.ratio_error},
                    {"reliable", r.reliable},
                    {"exact_ratio", r.exact_ratio},
                    {"truth", r.truth},
                    {"identity_residual", r.identity_residual},
                    {"within_error", r.within_error}});
  }
  checks.add("cooling_identity", worst_identity <= kCoolingTolerance, worst_identity, kCoolingTolerance);
  return {{"beta", report.beta},
          {"n_max", report.n_max},
          {"epsilon", report.epsilon},
          {"hamiltonian", matrix_to_json(cc.h.matrix())},
          {"observable", matrix_to_json(cc.o.matrix())},
          {"numerator", estimation_json(report.numerator)},
          {"denominator", estimation_json(report.denominator)},
          {"rows", rows},
          {"total_samples", report.total_samples}};
}

json run_bench(const RunConfig& cfg, Checks& checks, std::optional<std::string>& csv) {
  json rows = json::array();
  std::vector<std::vector<std::string>> table;
  bool never_worse = true;
  for (double eps : cfg.bench.epsilons) {
    for (std::size_t k : cfg.bench.k_values) {
      const auto p = stats::plan(k, cfg.bench.opnorm, eps);
      // Estimating each order separately at the same per-order confidence.
      std::size_t individual = 0;
      for (std::size_t j = 1; j <= k; ++j) individual += stats::plan(j, cfg.bench.opnorm, eps).n_per_batch * p.m_batches;
      const double ratio = static_cast<double>(individual) / static_cast<double>(p.total_samples);
      never_worse = never_worse && p.total_samples <= individual;
      rows.push_back({{"k_max", k},
                      {"epsilon", eps},
                      {"opnorm", cfg.bench.opnorm},
                      {"n_per_batch", p.n_per_batch},
                      {"m_batches", p.m_batches},
                      {"simultaneous_samples", p.total_samples},
                      {"individual_samples", individual},
                      {"ratio", ratio}});
      table.push_back({std::to_string(k), format_double(eps), format_double(cfg.bench.opnorm),
                       std::to_string(p.n_per_batch), std::to_string(p.m_batches), std::to_string(p.total_samples),
                       std::to_string(individual), format_double(ratio)});
    }
  }
  checks.add("simultaneous_never_exceeds_individual", never_worse);
  csv = csv_text({"k_max", "epsilon", "opnorm", "n_per_batch", "m_batches", "simultaneous_samples",
                  "individual_samples", "ratio"},
                 table);
  return {{"rows", rows}};
}

json error_json(const std::string& type, const std::string& message) {
  return {{"type", type}, {"message", message}};
}

}  // namespace

Format format_from_string(const std::string& name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "both") return Format::Both;
  throw ConfigError("--format must be one of json, csv, both");
}

rep::HermitianOperator resolve_observable(const RunConfig& cfg, const ObservableSpec& spec, std::size_t d) {
  auto check_dim = [&](std::size_t got, const std::string& what) {
    if (got != d) {
      throw ConfigError(what + " has dimension " + std::to_string(got) + ", expected " + std::to_string(d));
    }
  };
  if (spec.kind == "random") {
    Rng rng = make_rng(spec.seed.value_or(cfg.seed), "observable");
    return rep::random_observable(d, rng);
  }
  if (spec.kind == "identity") return rep::HermitianOperator::identity(d);
  if (spec.kind == "diagonal") {
    check_dim(spec.values.size(), "observable.values");
    return rep::HermitianOperator::diagonal(spec.values);
  }
  if (spec.kind == "pauli") {
    try {
      auto o = apps::pauli_observable(spec.word);
      check_dim(o.dim(), "Pauli observable '" + spec.word + "'");
      return o;
    } catch (const DomainError& e) {
      throw ConfigError(std::string("observable.word: ") + e.what());
    }
  }
  const auto file = cfg.resolve(spec.path);
  try {
    rep::HermitianOperator o(read_matrix_file(file));
    check_dim(o.dim(), "observable file " + file.string());
    return o;
  } catch (const DomainError& e) {
    throw ConfigError("observable file " + file.string() + ": " + e.what());
  }
}

rep::DensityMatrix resolve_state(const RunConfig& cfg) {
  const auto& spec = cfg.state;
  const std::size_t d = cfg.d;
  auto check_dim = [&](std::size_t got, const std::string& what) {
    if (got != d) {
      throw ConfigError(what + " has dimension " + std::to_string(got) + ", expected " + std::to_string(d));
    }
  };
  try {
    if (spec.kind == "random-density") {
      Rng rng = make_rng(spec.seed.value_or(cfg.seed), "state");
      return rep::random_density(d, rng);
    }
    if (spec.kind == "maximally-mixed") return rep::DensityMatrix::maximally_mixed(d);
    if (spec.kind == "diagonal") {
      check_dim(spec.values.size(), "state.values");
      return rep::DensityMatrix::diagonal(spec.values);
    }
    if (spec.kind == "pure") {
      check_dim(spec.re.size(), "state.re");
      if (!spec.im.empty() && spec.im.size() != spec.re.size()) throw ConfigError("state.im must match state.re");
      rep::Vector psi(static_cast<Eigen::Index>(d));
      for (std::size_t i = 0; i < d; ++i) {
        psi(static_cast<Eigen::Index>(i)) = rep::Complex(spec.re[i], spec.im.empty() ? 0.0 : spec.im[i]);
      }
      if (!(psi.norm() > 0.0)) throw ConfigError("state.re/im: zero vector");
      return rep::DensityMatrix::from_pure(psi / psi.norm());
    }
    if (spec.kind == "thermal") {
      const auto h = hamiltonian(cfg, spec.hamiltonian, spec.hamiltonian_path);
      check_dim(h.dim(), "state.hamiltonian");
      return rep::thermal_state(h, spec.beta);
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("state: ") + e.what());
  }
  const auto file = cfg.resolve(spec.path);
  try {
    rep::DensityMatrix rho(read_matrix_file(file));
    check_dim(rho.dim(), "state file " + file.string());
    return rho;
  } catch (const DomainError& e) {
    throw ConfigError("state file " + file.string() + ": " + e.what());
  }
}

Envelope execute(const RunConfig& cfg, std::size_t threads) {
  Envelope env;
  env.report["command"] = to_string(cfg.command);
  env.report["versions"] = versions();
  env.report["config"] = to_json(cfg);
  env.report["payload"] = nullptr;
  Checks checks;
  try {
    switch (cfg.command) {
      case Command::Verify: env.report["payload"] = run_verify(cfg, checks); break;
      case Command::Estimate: env.report["payload"] = run_estimate(cfg, threads, checks); break;
      case Command::Hardness: env.report["payload"] = run_hardness(cfg, checks, env.csv); break;
      case Command::Spectroscopy: env.report["payload"] = run_spectroscopy(cfg, threads, checks); break;
      case Command::Cool: env.report["payload"] = run_cool(cfg, threads, checks); break;
      case Command::Bench: env.report["payload"] = run_bench(cfg, checks, env.csv); break;
    }
    env.report["checks"] = checks.items();
    env.report["pass"] = checks.all();
    env.report["error"] = nullptr;
    env.exit_code = checks.all() ? ExitCode::Pass : ExitCode::AssertionFailure;
  } catch (const ConfigError& e) {
    env.report["checks"] = checks.items();
    env.report["pass"] = false;
    env.report["error"] = error_json("config", e.what());
    env.exit_code = ExitCode::ConfigurationError;
  } catch (const CapExceeded& e) {
    env.report["checks"] = checks.items();
    env.report["pass"] = false;
    env.report["error"] = error_json("cap_exceeded", e.what());
    env.exit_code = ExitCode::ConfigurationError;
  } catch (const DomainError& e) {
    env.report["checks"] = checks.items();
    env.report["pass"] = false;
    env.report["error"] = error_json("domain", e.what());
    env.exit_code = ExitCode::ConfigurationError;
  } catch (const DimensionError& e) {
    env.report["checks"] = checks.items();
    env.report["pass"] = false;
    env.report["error"] = error_json("dimension", e.what());
    env.exit_code = ExitCode::ConfigurationError;
  } catch (const NumericalError& e) {
    env.report["checks"] = checks.items();
    env.report["pass"] = false;
    env.report["error"] = error_json("numerical", e.what());
    env.exit_code = ExitCode::AssertionFailure;
  }
  return env;
}

Envelope config_error_envelope(const std::string& message) {
  Envelope env;
  env.report["command"] = nullptr;
  env.report["versions"] = versions();
  env.report["config"] = nullptr;
  env.report["payload"] = nullptr;
  env.report["checks"] = json::array();
  env.report["pass"] = false;
  env.report["error"] = error_json("config", message);
  env.exit_code = ExitCode::ConfigurationError;
  return env;
}

std::string dump(const Envelope& envelope) { return envelope.report.dump(2) + "\n"; }

void emit(const Envelope& envelope, const std::optional<std::filesystem::path>& out_dir, Format format,
          std::ostream& out) {
  const bool want_csv = format != Format::Json && envelope.csv.has_value();
  if (!out_dir) {
    if (format == Format::Csv && want_csv) {
      out << *envelope.csv;
    } else {
      out << dump(envelope);
    }
    return;
  }
  std::filesystem::create_directories(*out_dir);
  const std::string stem = envelope.report["command"].is_string() ? envelope.report["command"].get<std::string>()
                                                                  : std::string("report");
  std::ofstream(*out_dir / (stem + ".json")) << dump(envelope);
  if (want_csv) std::ofstream(*out_dir / (stem + ".csv")) << *envelope.csv;
}

}  // namespace simulest::cli
