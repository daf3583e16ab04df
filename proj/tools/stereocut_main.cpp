// Command-line driver: segment, eval and synth subcommands.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stereocut/commands.hpp"

int main(int argc, char** argv) {
  using namespace stereocut;

  CLI::App app{"Unsupervised stereo-video foreground segmentation"};
  app.require_subcommand(1);

  auto* segment = app.add_subcommand("segment", "Segment a stereo sequence into masks");
  std::string config_path;
  std::vector<std::string> overrides;
  segment->add_option("--config", config_path, "key = value configuration file");
  segment->add_option("overrides", overrides, "key=value overrides");

  auto* eval = app.add_subcommand("eval", "Score predicted masks against ground truth");
  std::string pred_dir, gt_dir;
  int tol = 2;
  eval->add_option("--pred", pred_dir, "predicted mask directory")->required();
  eval->add_option("--gt", gt_dir, "ground-truth mask directory")->required();
  eval->add_option("--tol", tol, "boundary tolerance in pixels")->check(CLI::NonNegativeNumber);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic stereo scene");
  std::string spec_path, out_dir;
  synth->add_option("--spec", spec_path, "scene spec file (defaults when omitted)");
  synth->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (segment->parsed()) {
      const std::string text = config_path.empty() ? std::string() : read_text_file(config_path);
      return cmd_segment(parse_config(text, overrides), std::cerr);
    }
    if (eval->parsed()) return cmd_eval(pred_dir, gt_dir, tol, std::cout, std::cerr);
    const std::string text = spec_path.empty() ? std::string() : read_text_file(spec_path);
    return cmd_synth(parse_scene_spec(text), out_dir, std::cerr);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}
