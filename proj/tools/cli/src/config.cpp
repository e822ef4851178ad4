#include "simulest/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace simulest::cli {

namespace {

/// Typed access to one JSON object that rejects unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected a JSON object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  std::string field(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError("field '" + field(key) + "': expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError("field '" + field(key) + "': must be finite");
    return x;
  }

  std::uint64_t unsigned_int(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
      throw ConfigError("field '" + field(key) + "': expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError("field '" + field(key) + "': expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError("field '" + field(key) + "': expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError("field '" + field(key) + "': expected an array of numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }

  std::vector<std::size_t> sizes(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError("field '" + field(key) + "': expected an array of integers");
    std::vector<std::size_t> out;
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
        throw ConfigError("field '" + field(key) + "': expected an array of non-negative integers");
      }
      out.push_back(x.get<std::size_t>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) throw ConfigError("field '" + field(key) + "': unknown field");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

ObservableSpec parse_observable(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  ObservableSpec spec;
  if (r.has("kind")) spec.kind = r.string("kind");
  if (spec.kind == "random") {
    if (r.has("seed")) spec.seed = r.unsigned_int("seed");
  } else if (spec.kind == "pauli") {
    if (!r.has("word")) throw ConfigError("field '" + r.field("word") + "': required for kind 'pauli'");
    spec.word = r.string("word");
  } else if (spec.kind == "diagonal") {
    if (!r.has("values")) throw ConfigError("field '" + r.field("values") + "': required for kind 'diagonal'");
    spec.values = r.numbers("values");
  } else if (spec.kind == "file") {
    if (!r.has("path")) throw ConfigError("field '" + r.field("path") + "': required for kind 'file'");
    spec.path = r.string("path");
  } else if (spec.kind != "identity") {
    throw ConfigError("field '" + r.field("kind") + "': must be one of random, pauli, diagonal, identity, file");
  }
  r.finish();
  return spec;
}

void parse_hamiltonian(ObjectReader& r, const std::string& key, std::string& name, std::string& path) {
  if (!r.has(key)) return;
  const json& v = r.raw(key);
  if (v.is_string()) {
    name = v.get<std::string>();
    path.clear();
    return;
  }
  ObjectReader h(v, r.field(key));
  if (!h.has("path")) throw ConfigError("field '" + h.field("path") + "': expected a builtin name or {\"path\": ...}");
  path = h.string("path");
  name.clear();
  h.finish();
}

StateSpec parse_state(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  StateSpec spec;
  if (r.has("kind")) spec.kind = r.string("kind");
  if (spec.kind == "random-density") {
    if (r.has("seed")) spec.seed = r.unsigned_int("seed");
  } else if (spec.kind == "pure") {
    if (!r.has("re")) throw ConfigError("field '" + r.field("re") + "': required for kind 'pure'");
    spec.re = r.numbers("re");
    if (r.has("im")) spec.im = r.numbers("im");
  } else if (spec.kind == "diagonal") {
    if (!r.has("values")) throw ConfigError("field '" + r.field("values") + "': required for kind 'diagonal'");
    spec.values = r.numbers("values");
  } else if (spec.kind == "thermal") {
    parse_hamiltonian(r, "hamiltonian", spec.hamiltonian, spec.hamiltonian_path);
    if (r.has("beta")) spec.beta = r.number("beta");
  } else if (spec.kind == "file") {
    if (!r.has("path")) throw ConfigError("field '" + r.field("path") + "': required for kind 'file'");
    spec.path = r.string("path");
  } else if (spec.kind != "maximally-mixed") {
    throw ConfigError("field '" + r.field("kind") +
                      "': must be one of random-density, maximally-mixed, pure, diagonal, thermal, file");
  }
  r.finish();
  return spec;
}

void require_file(const RunConfig& cfg, const std::string& path, const std::string& field) {
  if (path.empty()) return;
  if (!std::filesystem::is_regular_file(cfg.resolve(path))) {
    throw ConfigError("field '" + field + "': file not found: " + cfg.resolve(path).string());
  }
}

json observable_json(const ObservableSpec& s) {
  json j;
  j["kind"] = s.kind;
  if (s.kind == "random") j["seed"] = s.seed ? json(*s.seed) : json(nullptr);
  if (s.kind == "pauli") j["word"] = s.word;
  if (s.kind == "diagonal") j["values"] = s.values;
  if (s.kind == "file") j["path"] = s.path;
  return j;
}

json hamiltonian_json(const std::string& name, const std::string& path) {
  if (!path.empty()) return json{{"path", path}};
  return json(name);
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::Estimate: return "estimate";
    case Command::Verify: return "verify";
    case Command::Hardness: return "hardness";
    case Command::Spectroscopy: return "spectroscopy";
    case Command::Cool: return "cool";
    case Command::Bench: return "bench";
  }
  return "unknown";
}

Command command_from_string(const std::string& name) {
  for (Command c : {Command::Estimate, Command::Verify, Command::Hardness, Command::Spectroscopy, Command::Cool,
                    Command::Bench}) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("field 'command': must be one of estimate, verify, hardness, spectroscopy, cool, bench (got '" +
                    name + "')");
}

std::filesystem::path RunConfig::resolve(const std::string& path) const {
  const std::filesystem::path p(path);
  return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
}

RunConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ObjectReader r(j, "");
  RunConfig cfg;
  cfg.base_dir = base_dir;
  if (!r.has("command")) throw ConfigError("field 'command': required");
  cfg.command = command_from_string(r.string("command"));
  if (r.has("seed")) cfg.seed = r.unsigned_int("seed");
  if (r.has("d")) cfg.d = r.unsigned_int("d");
  if (r.has("n_copies")) cfg.n_copies = r.unsigned_int("n_copies");
  if (r.has("k_max")) cfg.k_max = r.unsigned_int("k_max");
  if (r.has("epsilon")) cfg.epsilon = r.number("epsilon");
  if (r.has("batches")) cfg.batches = r.unsigned_int("batches");
  if (r.has("observable")) cfg.observable = parse_observable(r.raw("observable"), "observable");
  if (r.has("state")) cfg.state = parse_state(r.raw("state"), "state");
  if (r.has("polynomials")) {
    const json& polys = r.raw("polynomials");
    if (!polys.is_array()) throw ConfigError("field 'polynomials': expected an array of {\"coeffs\": [...]}");
    for (std::size_t i = 0; i < polys.size(); ++i) {
      ObjectReader p(polys[i], "polynomials[" + std::to_string(i) + "]");
      if (!p.has("coeffs")) throw ConfigError("field '" + p.field("coeffs") + "': required");
      cfg.polynomials.push_back(p.numbers("coeffs"));
      p.finish();
    }
  }
  if (r.has("hardness")) {
    ObjectReader h(r.raw("hardness"), "hardness");
    if (h.has("ks")) cfg.hardness.ks = h.sizes("ks");
    if (h.has("epsilons")) cfg.hardness.epsilons = h.numbers("epsilons");
    if (h.has("a")) cfg.hardness.a = h.number("a");
    h.finish();
  }
  if (r.has("spectroscopy")) {
    ObjectReader s(r.raw("spectroscopy"), "spectroscopy");
    if (s.has("d_a")) cfg.spectroscopy.d_a = s.unsigned_int("d_a");
    if (s.has("d_b")) cfg.spectroscopy.d_b = s.unsigned_int("d_b");
    if (s.has("state_seed")) cfg.spectroscopy.state_seed = s.unsigned_int("state_seed");
    if (s.has("amplitudes_path")) cfg.spectroscopy.amplitudes_path = s.string("amplitudes_path");
    s.finish();
  }
  if (r.has("cool")) {
    ObjectReader c(r.raw("cool"), "cool");
    parse_hamiltonian(c, "hamiltonian", cfg.cool.hamiltonian, cfg.cool.hamiltonian_path);
    if (c.has("beta")) cfg.cool.beta = c.number("beta");
    if (c.has("n_max")) cfg.cool.n_max = c.unsigned_int("n_max");
    if (c.has("observable")) cfg.cool.observable = parse_observable(c.raw("observable"), "cool.observable");
    c.finish();
  }
  if (r.has("bench")) {
    ObjectReader b(r.raw("bench"), "bench");
    if (b.has("k_values")) cfg.bench.k_values = b.sizes("k_values");
    if (b.has("epsilons")) cfg.bench.epsilons = b.numbers("epsilons");
    if (b.has("opnorm")) cfg.bench.opnorm = b.number("opnorm");
    b.finish();
  }
  r.finish();
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j, path.parent_path());
}

void validate(const RunConfig& cfg) {
  if (cfg.d < 1) throw ConfigError("d must be >= 1");
  if (cfg.k_max < 1) throw ConfigError("k_max must be >= 1");
  if (!(cfg.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (cfg.n_copies && *cfg.n_copies < 1) throw ConfigError("n_copies must be >= 1");
  if (cfg.n_copies && cfg.command == Command::Estimate && *cfg.n_copies < cfg.k_max) {
    throw ConfigError("n_copies must be >= k_max");
  }
  if (cfg.batches && *cfg.batches < 1) throw ConfigError("batches must be >= 1");
  for (const auto& p : cfg.polynomials) {
    if (p.empty()) throw ConfigError("polynomials: coeffs must not be empty");
  }
  for (std::size_t k : cfg.hardness.ks) {
    if (k < 2) throw ConfigError("hardness.ks: every k must be >= 2");
  }
  for (double e : cfg.hardness.epsilons) {
    if (!(e >= 0.0 && e < 1.0)) throw ConfigError("hardness.epsilons: every epsilon must satisfy 0 <= epsilon < 1");
  }
  if (!(std::abs(cfg.hardness.a) <= 1.0)) throw ConfigError("hardness.a must satisfy |a| <= 1");
  if (cfg.spectroscopy.d_a < 1 || cfg.spectroscopy.d_b < 1) {
    throw ConfigError("spectroscopy.d_a and spectroscopy.d_b must be >= 1");
  }
  if (cfg.command == Command::Spectroscopy && cfg.k_max < 2) throw ConfigError("k_max must be >= 2 for spectroscopy");
  if (!(cfg.cool.beta >= 0.0)) throw ConfigError("cool.beta must be >= 0");
  if (cfg.cool.n_max < 2) throw ConfigError("cool.n_max must be >= 2");
  if (!(cfg.state.beta >= 0.0)) throw ConfigError("state.beta must be >= 0");
  for (std::size_t k : cfg.bench.k_values) {
    if (k < 1) throw ConfigError("bench.k_values: every k must be >= 1");
  }
  for (double e : cfg.bench.epsilons) {
    if (!(e > 0.0)) throw ConfigError("bench.epsilons: every epsilon must be > 0");
  }
  if (!(cfg.bench.opnorm > 0.0)) throw ConfigError("bench.opnorm must be > 0");
  require_file(cfg, cfg.observable.path, "observable.path");
  require_file(cfg, cfg.state.path, "state.path");
  require_file(cfg, cfg.state.hamiltonian_path, "state.hamiltonian.path");
  require_file(cfg, cfg.spectroscopy.amplitudes_path, "spectroscopy.amplitudes_path");
  require_file(cfg, cfg.cool.hamiltonian_path, "cool.hamiltonian.path");
  require_file(cfg, cfg.cool.observable.path, "cool.observable.path");
}

json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = to_string(cfg.command);
  j["seed"] = cfg.seed;
  j["d"] = cfg.d;
  j["n_copies"] = cfg.n_copies ? json(*cfg.n_copies) : json(nullptr);
  j["k_max"] = cfg.k_max;
  j["epsilon"] = cfg.epsilon;
  j["batches"] = cfg.batches ? json(*cfg.batches) : json(nullptr);
  j["observable"] = observable_json(cfg.observable);
  json state;
  state["kind"] = cfg.state.kind;
  if (cfg.state.kind == "random-density") state["seed"] = cfg.state.seed ? json(*cfg.state.seed) : json(nullptr);
  if (cfg.state.kind == "pure") {
    state["re"] = cfg.state.re;
    state["im"] = cfg.state.im;
  }
  if (cfg.state.kind == "diagonal") state["values"] = cfg.state.values;
  if (cfg.state.kind == "thermal") {
    state["hamiltonian"] = hamiltonian_json(cfg.state.hamiltonian, cfg.state.hamiltonian_path);
    state["beta"] = cfg.state.beta;
  }
  if (cfg.state.kind == "file") state["path"] = cfg.state.path;
  j["state"] = state;
  json polys = json::array();
  for (const auto& p : cfg.polynomials) polys.push_back({{"coeffs", p}});
  j["polynomials"] = polys;
  j["hardness"] = {{"ks", cfg.hardness.ks}, {"epsilons", cfg.hardness.epsilons}, {"a", cfg.hardness.a}};
  j["spectroscopy"] = {{"d_a", cfg.spectroscopy.d_a},
                       {"d_b", cfg.spectroscopy.d_b},
                       {"state_seed", cfg.spectroscopy.state_seed ? json(*cfg.spectroscopy.state_seed) : json(nullptr)},
                       {"amplitudes_path", cfg.spectroscopy.amplitudes_path}};
  j["cool"] = {{"hamiltonian", hamiltonian_json(cfg.cool.hamiltonian, cfg.cool.hamiltonian_path)},
               {"beta", cfg.cool.beta},
               {"n_max", cfg.cool.n_max},
               {"observable", observable_json(cfg.cool.observable)}};
  j["bench"] = {{"k_values", cfg.bench.k_values}, {"epsilons", cfg.bench.epsilons}, {"opnorm", cfg.bench.opnorm}};
  return j;
}

rep::Matrix matrix_from_json(const json& j, const std::string& context) {
  auto fail = [&](const std::string& what) { return ConfigError(context + ": " + what); };
  if (!j.is_object() || !j.contains("re")) throw fail("expected {\"dim\": d, \"re\": [[...]], \"im\": [[...]]}");
  auto read_part = [&](const json& part, std::size_t dim, rep::Matrix& out, bool imaginary) {
    if (!part.is_array() || part.size() != dim) throw fail("each part must have dim rows");
    for (std::size_t r = 0; r < dim; ++r) {
      const json& row = part[r];
      if (!row.is_array() || row.size() != dim) throw fail("each row must have dim entries");
      for (std::size_t c = 0; c < dim; ++c) {
        if (!row[c].is_number()) throw fail("matrix entries must be numbers");
        const double x = row[c].get<double>();
        auto& entry = out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        entry = imaginary ? rep::Complex(entry.real(), x) : rep::Complex(x, entry.imag());
      }
    }
  };
  const json& re = j.at("re");
  if (!re.is_array() || re.empty()) throw fail("\"re\" must be a non-empty array of rows");
  const std::size_t dim = j.contains("dim") ? j.at("dim").get<std::size_t>() : re.size();
  rep::Matrix m = rep::Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  read_part(re, dim, m, false);
  if (j.contains("im")) read_part(j.at("im"), dim, m, true);
  return m;
}

rep::Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read matrix file " + path.string());
  try {
    return matrix_from_json(json::parse(in), "matrix file " + path.string());
  } catch (const json::exception& e) {
    throw ConfigError("matrix file " + path.string() + ": " + e.what());
  }
}

json matrix_to_json(const rep::Matrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json rr = json::array();
    json ri = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ri);
  }
  return json{{"dim", m.rows()}, {"re", re}, {"im", im}};
}

}  // namespace simulest::cli
