#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fracspde/harness.hpp"

namespace fracspde {

enum class SeedSource { flag, file, environment, fallback };
std::string to_string(SeedSource s);

struct RunConfig {
  ExperimentConfig experiment;
  std::filesystem::path out_dir = "out";
  int verbosity = 1;  // 0 silent, 1 warnings and summary, 2 also echoes the config
  bool all_steps = false;  // single mode: every time level in trajectory.csv
  SeedSource seed_source = SeedSource::fallback;
};

// Compares everything that is serialized; seed_source is provenance only.
bool operator==(const RunConfig &a, const RunConfig &b);

// Command-line values that take precedence over the file. The environment
// seed ranks below the file.
struct Overrides {
  std::optional<Mode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> env_seed;
};

// INI text with sections [model], [contour], [experiment], [output].
// Required: model.alpha, model.s, model.h1, model.h2 and experiment.mode
// (unless overridden). Angles accept "<x>pi". Sections [run] and [outputs]
// are written by the manifest and ignored here, so a manifest parses back to
// the configuration it records.
RunConfig parse_config(const std::string &text, const Overrides &o = {});
RunConfig load_config(const std::filesystem::path &path, const Overrides &o = {});
std::string serialize_config(const RunConfig &cfg);

// Strict number parsing: "1.5", "1e-3", "0.1pi", "pi".
double parse_real(const std::string &text);
std::uint64_t parse_seed(const std::string &text);

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitNumerical = 3;

int exit_code_for(const std::exception &e);

// Writes manifest.txt, runs the experiment, writes its outputs through
// temporary files and finalizes the manifest with output checksums.
// Throws on failure; main() maps exceptions through exit_code_for.
void run(const RunConfig &cfg);

// The whole command line: flags, config loading, run, exit code.
int cli_main(int argc, char **argv);

}  // namespace fracspde
