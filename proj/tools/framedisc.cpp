// framedisc: batch driver for covering validation, oscillation checks and
// discretization runs.  Reports are JSON on stdout (and --output).
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "framedisc/experiment.hpp"

namespace fd = framedisc;

namespace {

struct PipelineArgs {
  std::string config_file;
  std::map<std::string, std::optional<std::string>> flags;
};

void add_pipeline(CLI::App& app, const char* name, const char* help, PipelineArgs& args) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", args.config_file, "JSON configuration file");
  const auto defaults = fd::default_config();
  for (auto it = defaults.begin(); it != defaults.end(); ++it) {
    args.flags[it.key()] = std::nullopt;
    sub->add_option("--" + it.key(), args.flags[it.key()],
                    "overrides '" + it.key() + "' (default " + it.value().dump() + ")");
  }
}

int run_pipeline(const std::string& command, const PipelineArgs& args) {
  fd::RunResult result;
  fd::Json config;
  try {
    config = fd::default_config();
    if (!args.config_file.empty()) config = fd::merge_config(config, fd::read_json_file(args.config_file));
    fd::Json overrides = fd::Json::object();
    for (const auto& [key, value] : args.flags)
      if (value) overrides[key] = fd::parse_flag_value(*value);
    config = fd::merge_config(config, overrides);
    result = fd::run_command(command, config);
  } catch (const std::exception& e) {
    result.exit_code = fd::kExitConfigError;
    result.report = fd::Json{{"schema_version", fd::kSchemaVersion},
                             {"command", command},
                             {"error", e.what()},
                             {"exit_code", result.exit_code}};
  }
  const std::string text = result.report.dump(2) + "\n";
  std::cout << text;
  if (result.report.contains("error")) std::cerr << "framedisc: " << result.report["error"].get<std::string>() << "\n";
  if (config.is_object() && config.contains("output") && config["output"].is_string()) {
    std::ofstream out(config["output"].get<std::string>(), std::ios::binary);
    if (!out) {
      std::cerr << "framedisc: cannot write " << config["output"].get<std::string>() << "\n";
      return fd::kExitConfigError;
    }
    out << text;
  }
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frame discretization experiments"};
  app.require_subcommand(1);

  PipelineArgs validate, osc, discretize;
  add_pipeline(app, "validate", "validate a covering", validate);
  add_pipeline(app, "osc", "oscillation kernel and property D check", osc);
  add_pipeline(app, "discretize", "full discretization pipeline with residual checks", discretize);

  std::vector<std::string> files;
  std::string merge_output;
  auto* merge = app.add_subcommand("report-merge", "CSV summary of JSON reports");
  merge->add_option("files", files, "report files")->required();
  merge->add_option("--output", merge_output, "CSV output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fd::kExitConfigError;
  }

  if (app.got_subcommand("validate")) return run_pipeline("validate", validate);
  if (app.got_subcommand("osc")) return run_pipeline("osc", osc);
  if (app.got_subcommand("discretize")) return run_pipeline("discretize", discretize);

  try {
    std::vector<fd::Json> reports;
    for (const auto& f : files) reports.push_back(fd::read_json_file(f));
    const auto csv = fd::report_merge(reports, files);
    if (merge_output.empty()) {
      std::cout << csv;
    } else {
      std::ofstream out(merge_output, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write " + merge_output);
      out << csv;
    }
  } catch (const std::exception& e) {
    std::cerr << "framedisc: " << e.what() << "\n";
    return fd::kExitConfigError;
  }
  return fd::kExitOk;
}
