#pragma once

// Run configuration for the simulest command-line tool.
//
// Config files are JSON objects. Every field is optional except "command";
// unset fields take the documented defaults (d = 2, k_max = 3,
// epsilon = 1.0, seed = 0). Relative file paths resolve against the config
// file's directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "simulest/rep.hpp"

namespace simulest::cli {

using json = nlohmann::ordered_json;

/// Invalid or unreadable configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Command { Estimate, Verify, Hardness, Spectroscopy, Cool, Bench };

std::string to_string(Command c);
Command command_from_string(const std::string& name);

/// Observable source.
///   {"kind": "random", "seed": N}        unit-norm GUE draw
///   {"kind": "pauli", "word": "ZI"}      tensor product of Pauli factors
///   {"kind": "diagonal", "values": [...]}
///   {"kind": "identity"}
///   {"kind": "file", "path": "o.json"}   matrix file
struct ObservableSpec {
  std::string kind = "random";
  std::optional<std::uint64_t> seed;
  std::string word;
  std::vector<double> values;
  std::string path;
};

/// State source.
///   {"kind": "random-density", "seed": N}
///   {"kind": "maximally-mixed"}
///   {"kind": "pure", "re": [...], "im": [...]}
///   {"kind": "diagonal", "values": [...]}
///   {"kind": "thermal", "hamiltonian": "qubit" | {"path": ...}, "beta": b}
///   {"kind": "file", "path": "rho.json"}  matrix file
struct StateSpec {
  std::string kind = "random-density";
  std::optional<std::uint64_t> seed;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> values;
  std::string hamiltonian = "qubit";
  std::string hamiltonian_path;
  double beta = 1.0;
  std::string path;
};

struct HardnessSpec {
  std::vector<std::size_t> ks{10, 100};
  std::vector<double> epsilons{1e-4, 1e-3, 1e-2, 1e-1};
  double a = 1.0;  // <1|O|1>
};

struct SpectroscopySpec {
  std::size_t d_a = 2;
  std::size_t d_b = 2;
  std::optional<std::uint64_t> state_seed;
  std::string amplitudes_path;  // {"re": [...], "im": [...]}
};

struct CoolSpec {
  std::string hamiltonian = "qubit";
  std::string hamiltonian_path;
  double beta = 1.0;
  std::size_t n_max = 3;
  ObservableSpec observable{"pauli", std::nullopt, "Z", {}, {}};
};

struct BenchSpec {
  std::vector<std::size_t> k_values{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<double> epsilons{0.1};
  double opnorm = 1.0;
};

struct RunConfig {
  Command command = Command::Verify;
  std::uint64_t seed = 0;
  std::size_t d = 2;
  std::optional<std::size_t> n_copies;
  std::size_t k_max = 3;
  double epsilon = 1.0;
  std::optional<std::size_t> batches;
  ObservableSpec observable;
  StateSpec state;
  std::vector<std::vector<double>> polynomials;
  HardnessSpec hardness;
  SpectroscopySpec spectroscopy;
  CoolSpec cool;
  BenchSpec bench;
  /// Directory that relative paths resolve against; not part of the echo.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& path) const;
};

/// Parses and validates a config object. base_dir resolves relative paths.
RunConfig parse_config(const json& j, const std::filesystem::path& base_dir = {});

/// Reads and parses a config file.
RunConfig load_config(const std::filesystem::path& path);

/// Range checks shared by parse_config and command-line overrides.
void validate(const RunConfig& cfg);

/// Normalized echo of every field that affects the result.
json to_json(const RunConfig& cfg);

/// {"dim": d, "re": [[...], ...], "im": [[...], ...]}; "im" may be omitted.
rep::Matrix read_matrix_file(const std::filesystem::path& path);
json matrix_to_json(const rep::Matrix& m);
rep::Matrix matrix_from_json(const json& j, const std::string& context);

}  // namespace simulest::cli
