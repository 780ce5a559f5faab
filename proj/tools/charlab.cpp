// charlab <kind> --config <path> [--out dir] [--workers N] [--seed S]
// charlab selftest
//
// Exit status: 0 when every check passes, 1 when a check fails, 2 on errors.

#include <iostream>

#include "CLI11.hpp"

#include "charlab/error.hpp"
#include "charlab/experiments.hpp"

namespace {

void print_checks(const charlab::Report& r) {
  for (const auto& c : r.checks) {
    const char* status = c.skipped ? "SKIP" : (c.pass ? "PASS" : "FAIL");
    std::cout << status << "  [" << c.module << "] " << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace charlab;
  CLI::App app{"Character sums and Fourier analysis on commutative algebraic groups over finite fields", "charlab"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned workers = 1;
  u64 seed = 0;
  for (auto kind : all_kinds()) {
    auto* sub = app.add_subcommand(to_string(kind), "run the " + to_string(kind) + " experiment");
    sub->add_option("--config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory (default out/<kind>)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::Range(1u, 256u));
    sub->add_option("--seed", seed, "seed for sampled checks");
  }
  auto* st = app.add_subcommand("selftest", "run the invariant suite at the smallest scales");
  std::string inject;
  st->add_option("--workers", workers, "worker count compared against 1 in the determinism checks")
      ->check(CLI::Range(1u, 256u));
  st->add_option("--inject", inject)->check(CLI::IsMember({"corrupt-modulus"}))->group("");
  st->add_option("--out", out_dir, "write report.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    Report report;
    if (st->parsed()) {
      SelftestOptions opt;
      opt.corrupt_modulus = inject == "corrupt-modulus";
      if (st->count("--workers")) opt.workers = workers;
      report = selftest(opt);
    } else {
      const auto* sub = app.get_subcommands().front();
      const auto kind = *parse_kind(sub->get_name());
      const auto cfg = Config::load(config_path);
      report = run_experiment(kind, cfg, {workers, seed});
      if (out_dir.empty()) out_dir = "out/" + report.kind;
    }
    print_checks(report);
    if (!out_dir.empty()) {
      write_outputs(report, out_dir);
      std::cout << "wrote " << out_dir << "/report.json\n";
    }
    std::cout << (report.ok() ? "ok" : "FAILED") << "  " << report.kind << "  " << report.seconds << " s\n";
    return report.ok() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "charlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "charlab: " << e.what() << "\n";
    return 2;
  }
}
