#include "fracspde/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <boost/crc.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#ifndef FRACSPDE_VERSION
#define FRACSPDE_VERSION "unknown"
#endif

namespace fracspde {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

std::string to_string(SeedSource s) {
  switch (s) {
    case SeedSource::flag: return "flag";
    case SeedSource::file: return "file";
    case SeedSource::environment: return "environment";
    case SeedSource::fallback: return "default";
  }
  return "?";
}

bool operator==(const RunConfig &a, const RunConfig &b) {
  const ExperimentConfig &x = a.experiment, &y = b.experiment;
  const ModelParams &m = x.model, &n = y.model;
  return m.alpha == n.alpha && m.s == n.s && m.hurst.h1 == n.hurst.h1 && m.hurst.h2 == n.hurst.h2 && m.T == n.T &&
         m.N == n.N && m.M == n.M && m.f.name == n.f.name && x.contour.L == y.contour.L &&
         x.contour.mu == y.contour.mu && x.contour.nu == y.contour.nu && x.contour.q == y.contour.q &&
         x.mode == y.mode && x.variant == y.variant && x.samples == y.samples && x.ladder == y.ladder &&
         x.master_seed == y.master_seed && x.workers == y.workers && x.fine_grid == y.fine_grid &&
         a.out_dir == b.out_dir && a.verbosity == b.verbosity && a.all_steps == b.all_steps;
}

double parse_real(const std::string &text) {
  std::string t = text;
  double scale = 1.0;
  if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
    scale = kPi;
    t.resize(t.size() - 2);
    if (t.empty()) return kPi;
  }
  double v = 0.0;
  const char *end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) throw ParseError("not a number: '" + text + "'");
  return scale == 1.0 ? v : v * scale;
}

std::uint64_t parse_seed(const std::string &text) {
  std::uint64_t v = 0;
  const char *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) throw ParseError("not a 64-bit seed: '" + text + "'");
  return v;
}

namespace {

Index parse_index(const std::string &key, const std::string &text) {
  long long v = 0;
  const char *end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) throw ParseError(key + ": not an integer: '" + text + "'");
  return static_cast<Index>(v);
}

bool parse_bool(const std::string &key, const std::string &text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ParseError(key + ": expected true or false, got '" + text + "'");
}

std::vector<Index> parse_ladder(const std::string &text) {
  std::vector<Index> out;
  std::string tok;
  std::istringstream is(text);
  while (is >> tok) {
    std::istringstream parts(tok);
    for (std::string p; std::getline(parts, p, ',');) {
      if (!p.empty()) out.push_back(parse_index("experiment.ladder", p));
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Key reader that rejects unknown keys in the sections it owns.
class Sections {
 public:
  explicit Sections(const pt::ptree &tree) : tree_(tree) {
    static const std::vector<std::pair<std::string, std::vector<std::string>>> known = {
        {"model", {"alpha", "s", "h1", "h2", "T", "N", "M", "f"}},
        {"contour", {"L", "mu", "nu", "q"}},
        {"experiment", {"mode", "variant", "samples", "ladder", "seed", "fine_grid"}},
        {"output", {"dir", "workers", "verbosity", "all_steps"}},
    };
    for (const auto &[name, sub] : tree) {
      if (!sub.data().empty()) throw ParseError("key '" + name + "' outside any section");
      if (name == "run" || name == "outputs") continue;
      const auto it = std::find_if(known.begin(), known.end(), [&](const auto &k) { return k.first == name; });
      if (it == known.end()) throw ParseError("unknown section [" + name + "]");
      for (const auto &[key, value] : sub) {
        if (std::find(it->second.begin(), it->second.end(), key) == it->second.end()) {
          throw ParseError("unknown key '" + key + "' in [" + name + "]");
        }
      }
    }
  }

  std::optional<std::string> get(const std::string &path) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  }

  std::string require(const std::string &path) const {
    auto v = get(path);
    if (!v) throw ParseError("missing required key '" + path + "'");
    return *v;
  }

 private:
  const pt::ptree &tree_;
};

void apply_mode_defaults(RunConfig &c, bool has_n, bool has_m, bool has_ladder) {
  ExperimentConfig &e = c.experiment;
  switch (e.mode) {
    case Mode::temporal:
      if (!has_n) e.model.N = 256;
      if (!has_ladder) e.ladder = {8, 16, 32, 64, 128};
      break;
    case Mode::spatial:
      if (!has_m) e.model.M = 2048;
      if (!has_ladder) e.ladder = {4, 8, 16, 32, 64};
      break;
    case Mode::timing:
      if (!has_n) e.model.N = 64;
      if (!has_ladder) e.ladder = {512, 1024, 2048, 4096, 8192};
      break;
    case Mode::single:
      break;
  }
}

}  // namespace

RunConfig parse_config(const std::string &text, const Overrides &o) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error &e) {
    throw ParseError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  const Sections sec(tree);
  RunConfig c;
  ExperimentConfig &e = c.experiment;
  ModelParams &m = e.model;

  m.alpha = parse_real(sec.require("model.alpha"));
  m.s = parse_real(sec.require("model.s"));
  m.hurst.h1 = parse_real(sec.require("model.h1"));
  m.hurst.h2 = parse_real(sec.require("model.h2"));
  if (auto v = sec.get("model.T")) m.T = parse_real(*v);
  const auto n = sec.get("model.N"), mm = sec.get("model.M");
  if (n) m.N = parse_index("model.N", *n);
  if (mm) m.M = parse_index("model.M", *mm);
  if (auto v = sec.get("model.f")) m.f = Source::by_name(*v);

  if (auto v = sec.get("contour.L")) e.contour.L = parse_index("contour.L", *v);
  if (auto v = sec.get("contour.mu")) e.contour.mu = parse_real(*v);
  if (auto v = sec.get("contour.nu")) e.contour.nu = parse_real(*v);
  if (auto v = sec.get("contour.q")) e.contour.q = parse_real(*v);

  if (o.mode) {
    e.mode = *o.mode;
  } else {
    e.mode = mode_from_string(sec.require("experiment.mode"));
  }
  if (auto v = sec.get("experiment.variant")) e.variant = variant_from_string(*v);
  if (auto v = sec.get("experiment.samples")) e.samples = parse_index("experiment.samples", *v);
  const auto ladder = sec.get("experiment.ladder");
  if (ladder) e.ladder = parse_ladder(*ladder);
  if (auto v = sec.get("experiment.fine_grid")) e.fine_grid = parse_index("experiment.fine_grid", *v);

  if (o.seed) {
    e.master_seed = *o.seed;
    c.seed_source = SeedSource::flag;
  } else if (auto v = sec.get("experiment.seed")) {
    e.master_seed = parse_seed(*v);
    c.seed_source = SeedSource::file;
  } else if (o.env_seed) {
    e.master_seed = *o.env_seed;
    c.seed_source = SeedSource::environment;
  }

  if (auto v = sec.get("output.dir")) c.out_dir = *v;
  if (o.out_dir) c.out_dir = *o.out_dir;
  if (auto v = sec.get("output.workers")) {
    const Index w = parse_index("output.workers", *v);
    if (w < 1) throw InvalidParameter("workers must be >= 1");
    e.workers = static_cast<unsigned>(w);
  }
  if (o.workers) e.workers = *o.workers;
  if (auto v = sec.get("output.verbosity")) c.verbosity = static_cast<int>(parse_index("output.verbosity", *v));
  if (auto v = sec.get("output.all_steps")) c.all_steps = parse_bool("output.all_steps", *v);

  apply_mode_defaults(c, n.has_value(), mm.has_value(), ladder.has_value());
  validate(e);
  return c;
}

RunConfig load_config(const fs::path &path, const Overrides &o) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), o);
}

std::string serialize_config(const RunConfig &c) {
  const ExperimentConfig &e = c.experiment;
  const ModelParams &m = e.model;
  std::ostringstream os;
  os << "[model]\n"
     << "alpha = " << num(m.alpha) << "\ns = " << num(m.s) << "\nh1 = " << num(m.hurst.h1)
     << "\nh2 = " << num(m.hurst.h2) << "\nT = " << num(m.T) << "\nN = " << m.N << "\nM = " << m.M
     << "\nf = " << m.f.name << "\n\n";
  os << "[contour]\n"
     << "L = " << e.contour.L << "\nmu = " << num(e.contour.mu) << "\nnu = " << num(e.contour.nu)
     << "\nq = " << num(e.contour.q) << "\n\n";
  os << "[experiment]\n"
     << "mode = " << to_string(e.mode) << "\nvariant = " << to_string(e.variant) << "\nsamples = " << e.samples
     << "\nladder = ";
  for (std::size_t i = 0; i < e.ladder.size(); ++i) os << (i ? "," : "") << e.ladder[i];
  os << "\nseed = " << e.master_seed << "\nfine_grid = " << e.fine_grid << "\n\n";
  os << "[output]\n"
     << "dir = " << c.out_dir.string() << "\nworkers = " << e.workers << "\nverbosity = " << c.verbosity
     << "\nall_steps = " << (c.all_steps ? "true" : "false") << "\n";
  return os.str();
}

int exit_code_for(const std::exception &e) {
  if (dynamic_cast<const IoError *>(&e)) return kExitIo;
  if (dynamic_cast<const NumericalError *>(&e)) return kExitNumerical;
  if (dynamic_cast<const fs::filesystem_error *>(&e)) return kExitIo;
  return kExitValidation;
}

namespace {

std::uint32_t crc32(const std::string &data) {
  boost::crc_32_type crc;
  crc.process_bytes(data.data(), data.size());
  return crc.checksum();
}

// Write to <path>.tmp, then rename over <path>.
void write_atomic(const fs::path &path, const std::string &data) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << data;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot rename into '" + path.string() + "'");
  }
}

struct Output {
  std::string name;
  std::string data;
};

std::string manifest(const RunConfig &c, const std::string &status, const std::vector<Output> &outputs) {
  std::ostringstream os;
  os << "; fracspde run manifest\n[run]\nversion = " << FRACSPDE_VERSION << "\nstatus = " << status
     << "\nseed = " << c.experiment.master_seed << "\nseed_source = " << to_string(c.seed_source) << "\n\n"
     << serialize_config(c);
  if (!outputs.empty()) {
    os << "\n[outputs]\n";
    char buf[16];
    for (const auto &o : outputs) {
      std::snprintf(buf, sizeof buf, "%08x", crc32(o.data));
      os << o.name << " = crc32:" << buf << " bytes:" << o.data.size() << "\n";
    }
  }
  return os.str();
}

template <class F>
std::string to_text(F &&write) {
  std::ostringstream os;
  write(os);
  return os.str();
}

void print_summary(const ErrorTable &t, std::ostream &os) {
  os << (t.mode == Mode::temporal ? "M" : "N") << "\terror\t\tstderr\t\trate\n";
  char buf[128];
  for (const auto &r : t.rows) {
    std::snprintf(buf, sizeof buf, "%ld\t%.4e\t%.2e\t%.4f\n", static_cast<long>(r.resolution), r.error,
                  r.std_error, r.rate);
    os << buf;
  }
  std::snprintf(buf, sizeof buf, "mean rate %.4f (theory %.4f)\n", t.mean_rate, t.theoretical);
  os << buf;
}

}  // namespace

void run(const RunConfig &cfg_in) {
  RunConfig cfg = cfg_in;
  ExperimentConfig &e = cfg.experiment;
  if (e.mode == Mode::timing) e.workers = 1;
  validate(e);
  if (cfg.verbosity <= 0) set_warning_sink([](const std::string &) {});

  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec || !fs::is_directory(cfg.out_dir)) {
    throw IoError("cannot create output directory '" + cfg.out_dir.string() + "'");
  }
  const fs::path manifest_path = cfg.out_dir / "manifest.txt";
  write_atomic(manifest_path, manifest(cfg, "running", {}));
  if (cfg.verbosity >= 2) std::cerr << serialize_config(cfg);

  std::vector<Output> outputs;
  switch (e.mode) {
    case Mode::single: {
      const SchemeTrajectory tr = single_run(e);
      outputs.push_back({"trajectory.csv", to_text([&](auto &os) { write_trajectory_csv(tr, os, cfg.all_steps); })});
      break;
    }
    case Mode::temporal:
    case Mode::spatial: {
      const ErrorTable t = convergence(e);
      outputs.push_back({"errors.csv", to_text([&](auto &os) { write_errors_csv(t, os); })});
      outputs.push_back({"rates.csv", to_text([&](auto &os) { write_rates_csv(t, os); })});
      outputs.push_back({"errors.dat", to_text([&](auto &os) { write_error_series(t, os); })});
      if (cfg.verbosity >= 1) print_summary(t, std::cout);
      break;
    }
    case Mode::timing: {
      const TimingTable t = timing_compare(e);
      outputs.push_back({"timing.csv", to_text([&](auto &os) { write_timing_csv(t, os); })});
      outputs.push_back(
          {"timing_classical.dat", to_text([&](auto &os) { write_timing_series(t, Variant::classical, os); })});
      outputs.push_back({"timing_fast.dat", to_text([&](auto &os) { write_timing_series(t, Variant::fast, os); })});
      if (cfg.verbosity >= 1) {
        std::printf("slopes: classical %.3f, fast %.3f\n", t.classical_slope, t.fast_slope);
      }
      break;
    }
  }
  for (const auto &o : outputs) write_atomic(cfg.out_dir / o.name, o.data);
  write_atomic(manifest_path, manifest(cfg, "complete", outputs));
  if (cfg.verbosity <= 0) set_warning_sink(nullptr);
}

int cli_main(int argc, char **argv) {
  CLI::App app{"Stochastic time-space fractional diffusion solver and convergence experiments"};
  app.set_version_flag("--version", std::string(FRACSPDE_VERSION));
  std::string config_path, mode, out;
  std::string seed;
  unsigned workers = 0;
  app.add_option("--config", config_path, "INI configuration file")->required();
  app.add_option("--seed", seed, "master seed (overrides the file and FRACSPDE_SEED)");
  app.add_option("--workers", workers, "worker threads for Monte Carlo paths")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory");
  app.add_option("--mode", mode, "experiment mode")
      ->check(CLI::IsMember({"spatial", "temporal", "timing", "single"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &err) {
    const int rc = app.exit(err);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    Overrides o;
    if (!mode.empty()) o.mode = mode_from_string(mode);
    if (!seed.empty()) o.seed = parse_seed(seed);
    if (workers > 0) o.workers = workers;
    if (!out.empty()) o.out_dir = out;
    if (const char *env = std::getenv("FRACSPDE_SEED"); env && *env) o.env_seed = parse_seed(env);
    run(load_config(config_path, o));
  } catch (const std::exception &err) {
    set_warning_sink(nullptr);
    std::cerr << "error: " << err.what() << '\n';
    return exit_code_for(err);
  }
  return kExitOk;
}

}  // namespace fracspde
