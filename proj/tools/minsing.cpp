#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "minsing/problem_file.hpp"
#include "minsing/report.hpp"

namespace {

struct Common {
  std::string out = "minsing_out";
  std::optional<double> tol;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "output directory")->capture_default_str();
  cmd->add_option("--tol", c.tol, "pass/fail threshold for tolerance checks")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed for sampling testers")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimal-singularity toolkit: Box_L, fiber integrals, envelopes"};
  app.set_version_flag("--version", std::string(MINSING_VERSION));
  app.require_subcommand(1);

  Common common;
  std::string file;
  std::optional<int> n;

  for (const char* name : {"box", "integral", "envelope", "vhat"}) {
    auto* cmd = app.add_subcommand(name, std::string(name == std::string("integral") ? "run an " : "run a ") + name + " problem file");
    cmd->add_option("file", file, "problem file")->required();
    add_common(cmd, common);
  }
  auto* zariski = app.add_subcommand("zariski", "blown-up P^3 example with N points");
  zariski->add_option("--n", n, "number of blown-up points");
  zariski->add_option("file", file, "problem file of kind zariski");
  add_common(zariski, common);

  CLI11_PARSE(app, argc, argv);
  const auto* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  minsing::RunOptions opt{common.tol, common.seed};
  const auto start = std::chrono::steady_clock::now();
  minsing::RunReport rep;
  try {
    if (command == "zariski" && n) {
      if (!file.empty()) throw minsing::InputError("give either --n or a problem file, not both");
      rep = minsing::run_zariski(*n, opt);
    } else {
      if (file.empty()) throw minsing::InputError("zariski needs --n N or a problem file");
      auto pf = minsing::load_problem(file);
      if (minsing::kind_name(pf.kind()) != command)
        throw minsing::InputError(file + ": kind is '" + std::string(minsing::kind_name(pf.kind())) +
                                  "' but the command is '" + command + "'");
      rep = minsing::run(pf, opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "minsing: error: " << e.what() << "\n";
    rep = minsing::error_report(command, opt, e.what());
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  try {
    minsing::write_outputs(rep, common.out, wall);
  } catch (const std::exception& e) {
    std::cerr << "minsing: error: " << e.what() << "\n";
    return 2;
  }
  if (rep.exit_code == 1) {
    for (const auto& c : rep.record["checks"])
      if (!c["passed"].get<bool>()) std::cerr << "minsing: check failed: " << c["name"].get<std::string>() << "\n";
  }
  std::cout << "status: " << rep.record["status"].get<std::string>() << " (" << common.out << "/report.json)\n";
  return rep.exit_code;
}
