// streamasp command-line front end: compile, run, bench, oracle.
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "streamasp/compiler.hpp"
#include "streamasp/engine.hpp"
#include "streamasp/error.hpp"
#include "streamasp/kb.hpp"
#include "streamasp/lp/oracle.hpp"
#include "streamasp/lp/text.hpp"
#include "streamasp/observation.hpp"

namespace {

using namespace streamasp;

constexpr int kOk = 0;
constexpr int kDomain = 1;
constexpr int kIo = 2;
constexpr int kNoModel = 3;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  if (!out.flush()) throw IoError("failed writing " + path);
}

// Output paths must be writable before any work starts.
void check_writable(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) parent = ".";
  if (!fs::is_directory(parent)) throw IoError("directory of " + path + " does not exist");
}

kb::KnowledgeBase load_kb(const std::string& path) {
  std::string text = read_file(path);
  try {
    return kb::parse_kb(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0, 0);
  }
}

std::vector<obs::SensorSample> load_samples(const std::string& path) {
  std::string text = read_file(path);
  try {
    return obs::parse_samples_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0, 0);
  }
}

struct CompileArgs {
  std::string kb, out, samples;
  long long steps = 1;
  long long granularity = 1;
};

int cmd_compile(const CompileArgs& a) {
  check_writable(a.out);
  kb::KnowledgeBase base = load_kb(a.kb);
  std::vector<obs::Manifestation> ms;
  if (!a.samples.empty()) {
    std::vector<obs::SensorSample> samples = load_samples(a.samples);
    for (auto& h : engine::horizons(base, samples, a.granularity)) {
      ms.insert(ms.end(), h.manifestations.begin(), h.manifestations.end());
    }
  }
  kb::KnowledgeBase scaled = kb::at_granularity(base, a.granularity);
  write_file(a.out, compiler::program_text(scaled, a.steps, ms));
  return kOk;
}

struct RunArgs {
  std::string kb, samples, out, metrics, mode = "incremental";
  long long granularity = 1;
  bool full_models = false;
};

int cmd_run(const RunArgs& a) {
  std::optional<engine::Mode> mode = engine::parse_mode(a.mode);
  if (!mode) throw ValidationError("unknown mode '" + a.mode + "'");
  check_writable(a.out);
  check_writable(a.metrics);
  kb::KnowledgeBase base = load_kb(a.kb);
  std::vector<obs::SensorSample> samples = load_samples(a.samples);
  engine::Options options;
  options.full_models = a.full_models;
  engine::RunResult result = engine::run(base, samples, *mode, a.granularity, options);
  std::string lines;
  for (const auto& ann : result.annotations) lines += engine::to_json_line(ann) + "\n";
  write_file(a.out, lines);
  write_file(a.metrics, engine::metrics_csv(result.metrics.rows));
  return kOk;
}

struct BenchArgs {
  std::string kb, samples, out_csv;
  long long granularity = 1;
};

int cmd_bench(const BenchArgs& a) {
  check_writable(a.out_csv);
  kb::KnowledgeBase base = load_kb(a.kb);
  std::vector<obs::SensorSample> samples = load_samples(a.samples);
  std::vector<engine::MetricsRow> rows;
  for (engine::Mode mode : {engine::Mode::Incremental, engine::Mode::Restart}) {
    engine::RunResult r = engine::run(base, samples, mode, a.granularity);
    const double total = r.metrics.rows.empty() ? 0.0 : r.metrics.rows.back().cumulative_ms;
    std::cout << engine::to_string(mode) << ": " << r.metrics.rows.size() << " horizons, " << total << " ms\n";
    rows.insert(rows.end(), r.metrics.rows.begin(), r.metrics.rows.end());
  }
  write_file(a.out_csv, engine::metrics_csv(rows));
  return kOk;
}

struct OracleArgs {
  std::string program;
  long long max_atoms = lp::kOracleAtomLimit;
};

int cmd_oracle(const OracleArgs& a) {
  if (a.max_atoms < 0 || a.max_atoms > static_cast<long long>(lp::kOracleAtomLimit)) {
    throw ValidationError("--max-atoms must be between 0 and " + std::to_string(lp::kOracleAtomLimit));
  }
  std::string text = read_file(a.program);
  lp::AtomTable atoms;
  std::vector<lp::GroundRule> rules = lp::parse_program(text, atoms);
  std::vector<lp::AtomSet> models = lp::enumerate_stable(rules, atoms, static_cast<std::size_t>(a.max_atoms));
  std::vector<std::string> lines;
  for (const auto& m : models) {
    std::vector<std::string> names;
    for (lp::AtomId id : m) names.push_back(atoms.to_string(id));
    std::sort(names.begin(), names.end());
    std::string line;
    for (const auto& n : names) line += (line.empty() ? "" : " ") + n;
    lines.push_back(std::move(line));
  }
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) std::cout << l << "\n";
  return models.empty() ? kNoModel : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental answer-set reasoning over smart-home sensor streams"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile = app.add_subcommand("compile", "Write the ground program for the first N steps");
  compile->add_option("--kb", ca.kb, "knowledge base document")->required();
  compile->add_option("--steps", ca.steps, "number of cumulative steps")->required()->check(CLI::PositiveNumber);
  compile->add_option("--out", ca.out, "output .lp file")->required();
  compile->add_option("--samples", ca.samples, "sample stream providing manifestations");
  compile->add_option("--granularity", ca.granularity, "seconds per step")->check(CLI::PositiveNumber);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Replay a sample stream and annotate every horizon");
  run->add_option("--kb", ra.kb, "knowledge base document")->required();
  run->add_option("--samples", ra.samples, "sample stream CSV")->required();
  run->add_option("--granularity", ra.granularity, "seconds per step")->check(CLI::PositiveNumber);
  run->add_option("--mode", ra.mode, "incremental or restart")->check(CLI::IsMember({"incremental", "restart"}));
  run->add_option("--out", ra.out, "annotation output, one JSON object per line")->required();
  run->add_option("--metrics", ra.metrics, "metrics CSV")->required();
  run->add_flag("--full-models", ra.full_models, "include full answer sets in the annotations");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Run both modes and write their metrics");
  bench->add_option("--kb", ba.kb, "knowledge base document")->required();
  bench->add_option("--samples", ba.samples, "sample stream CSV")->required();
  bench->add_option("--granularity", ba.granularity, "seconds per step")->check(CLI::PositiveNumber);
  bench->add_option("--out-csv", ba.out_csv, "combined metrics CSV")->required();

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Enumerate all stable models of a small ground program");
  oracle->add_option("--program", oa.program, "program text")->required();
  oracle->add_option("--max-atoms", oa.max_atoms, "largest number of undecided atoms to enumerate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kDomain;
  }

  try {
    if (*compile) return cmd_compile(ca);
    if (*run) return cmd_run(ra);
    if (*bench) return cmd_bench(ba);
    if (*oracle) return cmd_oracle(oa);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const ValidationError& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kDomain;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kDomain;
}
