// blockfusion: run scenarios and Morita pairs from the command line.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "blockfusion/workbench.hpp"

using namespace blockfusion;

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot write " + out);
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block extensions, fusion and Clifford checks over GF(p)"};
  app.require_subcommand(1);
  app.fallthrough();

  RunOptions opt;
  std::string format = "json";
  std::string out;
  unsigned jobs = 1;
  app.add_option("--seed", opt.seed, "random seed for the meataxe and unit searches")->capture_default_str();
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
  app.add_option("--cap-order", opt.cap_order, "largest group order to enumerate")->capture_default_str();
  app.add_option("--out", out, "write the report here instead of stdout");
  app.add_flag("--timing", opt.timing, "record wall time per check (reports are then not reproducible)");

  std::string path;
  const std::pair<const char*, Stage> stages[] = {{"blocks", Stage::Blocks},
                                                  {"points", Stage::Points},
                                                  {"fusion", Stage::Fusion},
                                                  {"clifford", Stage::Clifford},
                                                  {"verify", Stage::Verify}};
  const char* help[] = {"blocks of kH and the chosen G-invariant block", "add the Brauer map and the points of P",
                        "add E, F (both ways) and Theta", "add the Clifford extensions and residuals",
                        "full pipeline, with embedding and tensor checks"};
  for (std::size_t k = 0; k < 5; ++k) {
    auto* sub = app.add_subcommand(stages[k].first, help[k]);
    sub->add_option("scenario", path, "scenario JSON file")->required()->check(CLI::ExistingFile);
  }
  auto* morita = app.add_subcommand("verify-morita", "check a supplied Morita pair");
  morita->add_option("pair", path, "pair JSON file")->required()->check(CLI::ExistingFile);
  auto* cat = app.add_subcommand("catalog", "list, or run, the built-in scenarios and pairs");
  bool run_all = false;
  cat->add_flag("--run-all", run_all, "run every scenario and pair");
  cat->add_option("--jobs", jobs, "scenarios run concurrently")->check(CLI::Range(1u, 64u));

  CLI11_PARSE(app, argc, argv);

  try {
    const Format fmt = parse_format(format);
    for (const auto& [name, stage] : stages)
      if (app.got_subcommand(name)) {
        opt.stage = stage;
        const auto r = run_scenario(parse_scenario(read_json(path)), opt);
        write(out, emit(r, fmt));
        return r.passed() ? 0 : 1;
      }
    if (app.got_subcommand(morita)) {
      const auto r = verify_morita(parse_morita(read_json(path)), opt);
      write(out, emit(r, fmt));
      return r.passed() ? 0 : 1;
    }
    if (!run_all) {
      Json j{{"schema", kScenarioSchema}, {"scenarios", Json::array()}, {"morita", Json::array()}};
      for (const auto& s : catalog()) j["scenarios"].push_back(to_json(s));
      for (const auto& m : morita_catalog()) j["morita"].push_back(to_json(m));
      write(out, j.dump(2) + "\n");
      return 0;
    }
    const auto reports = run_catalog(opt, jobs);
    write(out, emit(reports, fmt, opt.seed));
    for (const auto& r : reports)
      if (!r.passed()) return 1;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "blockfusion: " << e.what() << "\n";
    return 2;
  }
}
