#pragma once

// Command dispatch and report emission.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "simulest/cli/config.hpp"
#include "simulest/rep.hpp"

namespace simulest::cli {

enum class ExitCode : int { Pass = 0, AssertionFailure = 1, ConfigurationError = 2 };

struct Envelope {
  json report;
  std::optional<std::string> csv;  // hardness and bench sweeps
  ExitCode exit_code = ExitCode::Pass;
};

enum class Format { Json, Csv, Both };
Format format_from_string(const std::string& name);

rep::HermitianOperator resolve_observable(const RunConfig& cfg, const ObservableSpec& spec, std::size_t d);
rep::DensityMatrix resolve_state(const RunConfig& cfg);

/// Runs the configured command. Never throws for module errors: they are
/// reported in the envelope's "error" field with a nonzero exit code.
/// threads only changes wall-clock time, never the report.
Envelope execute(const RunConfig& cfg, std::size_t threads = 1);

/// Envelope for a configuration that failed to parse.
Envelope config_error_envelope(const std::string& message);

/// Serialized JSON report (two-space indent, trailing newline).
std::string dump(const Envelope& envelope);

/// With out_dir: writes <command>.json and, when the format asks for it and a
/// sweep exists, <command>.csv. Without: prints to out.
void emit(const Envelope& envelope, const std::optional<std::filesystem::path>& out_dir, Format format,
          std::ostream& out);

}  // namespace simulest::cli
