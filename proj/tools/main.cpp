// Scenario-driven command line harness: parse declarative scenario files,
// run the requested analyses, and emit CSV/JSON artifacts plus a report with
// one pass/fail verdict per verification.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "simplexflow/errors.hpp"
#include "simplexflow/io.hpp"
#include "simplexflow/scenario.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerification = 4;

struct CommonFlags {
  std::string output;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int samples = 0;
};

simplexflow::RunOverrides make_overrides(const CommonFlags& flags) {
  simplexflow::RunOverrides ov;
  if (!flags.output.empty()) ov.output_dir = flags.output;
  if (flags.seed_set) ov.seed = flags.seed;
  if (flags.samples > 0) ov.samples = flags.samples;
  return ov;
}

int run_one(const std::string& path, const simplexflow::RunOverrides& overrides) {
  const simplexflow::Scenario scenario =
      simplexflow::parse_scenario(simplexflow::read_text_file(path));
  const simplexflow::RunResult result = simplexflow::run_scenario(scenario, overrides);
  for (const auto& analysis : result.analyses) {
    for (const auto& check : analysis.checks) {
      std::cout << (check.passed ? "PASS" : "FAIL") << "  " << analysis.type << "/"
                << check.name;
      if (!check.detail.empty()) std::cout << "  (" << check.detail << ")";
      std::cout << "\n";
    }
  }
  std::cout << "report: " << result.report_path << "\n";
  return result.all_passed ? 0 : kExitVerification;
}

int classify_exception(const std::exception& e) {
  if (const auto* err = dynamic_cast<const simplexflow::Error*>(&e))
    return err->category() == simplexflow::ErrorCategory::Input ? kExitInput : kExitNumeric;
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean-field simplex dynamics toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string scenario_path;
  std::string suite_dir;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--output", flags.output, "override the scenario output directory");
    cmd->add_option("--seed", flags.seed, "override the scenario seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_option("--samples", flags.samples, "override sampling-based check sizes");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run one scenario file");
  run_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();
  add_common(run_cmd);

  CLI::App* validate_cmd = app.add_subcommand("validate", "parse and validate a scenario file");
  validate_cmd->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI::App* suite_cmd = app.add_subcommand("suite", "run every scenario in a directory");
  suite_cmd->add_option("dir", suite_dir, "directory of scenario JSON files")->required();
  add_common(suite_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate_cmd)) {
      const simplexflow::Scenario scenario =
          simplexflow::parse_scenario(simplexflow::read_text_file(scenario_path));
      std::cout << "valid: " << scenario.name << " (n=" << scenario.n << ", "
                << scenario.analyses.size() << " analyses)\n";
      return 0;
    }
    if (app.got_subcommand(run_cmd)) {
      return run_one(scenario_path, make_overrides(flags));
    }
    // suite: run all scenarios, aggregate.
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(suite_dir))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) {
      std::cerr << "no scenario files in " << suite_dir << "\n";
      return kExitInput;
    }
    int worst = 0;
    for (const auto& file : files) {
      std::cout << "=== " << file.filename().string() << "\n";
      simplexflow::RunOverrides ov = make_overrides(flags);
      if (ov.output_dir)
        ov.output_dir = *ov.output_dir + "/" + file.stem().string();
      const int code = run_one(file.string(), ov);
      worst = std::max(worst, code);
    }
    return worst;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return classify_exception(e);
  }
}
