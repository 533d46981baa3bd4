// Command-line front end: run, eoc, compare-fine, dump-snapshots.
#include "shiftest/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace shiftest;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kConfig = 2, kCertificate = 3, kNumeric = 4 };

void print_table(const std::string &title, const EocTable &t) {
  std::printf("%s\n%8s", title.c_str(), "cells");
  for (const auto &c : t.columns)
    std::printf(" %13s %6s", c.name.c_str(), "EoC");
  std::printf("\n");
  for (std::size_t k = 0; k < t.cells.size(); ++k) {
    std::printf("%8zu", t.cells[k]);
    for (const auto &c : t.columns) {
      std::printf(" %13.6g", c.values[k]);
      if (std::isnan(c.eoc[k]))
        std::printf(" %6s", "");
      else
        std::printf(" %6.2f", c.eoc[k]);
    }
    std::printf("\n");
  }
}

void emit_tables(const std::vector<RungSummary> &rungs, const fs::path &dir, bool print) {
  const auto b = bounds_table(rungs);
  const auto r = residual_table(rungs);
  write_csv(b, (dir / "bounds.csv").string());
  write_csv(r, (dir / "residual.csv").string());
  const bool regions = !rungs.empty() && !std::isnan(rungs.front().upsilon);
  if (regions)
    write_csv(region_table(rungs), (dir / "regions.csv").string());
  if (!print)
    return;
  print_table("bounds", b);
  if (regions)
    print_table("front-tracking region", region_table(rungs));
  print_table("residual", r);
}

int status_code(const std::vector<RungSummary> &rungs) {
  for (const auto &r : rungs)
    if (!r.finite)
      return kCertificate;
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"A posteriori shock-position and error bounds for scalar conservation laws"};
  app.require_subcommand(1);

  std::string config, out_dir = "out", report_dir;
  std::size_t cells = 0, mult = 0, samples = 0;
  bool no_fine = false;
  std::vector<double> times;

  auto *run = app.add_subcommand("run", "run the ladder and write tables, report and manifest");
  run->add_option("config", config, "experiment file")->required();
  run->add_option("-o,--out", out_dir, "output directory");
  run->add_option("--cells", cells, "run one rung instead of the ladder");
  run->add_flag("--no-fine", no_fine, "skip the fine-reference column");

  auto *eoc_cmd = app.add_subcommand("eoc", "print EoC tables of a finished run");
  eoc_cmd->add_option("report-dir", report_dir, "directory holding report.json")->required();

  auto *fine = app.add_subcommand("compare-fine", "L1 distance to a finer plain solution");
  fine->add_option("config", config, "experiment file")->required();
  fine->add_option("--mult", mult, "refinement factor (default: fine_mult)");
  fine->add_option("--cells", cells, "run one rung instead of the ladder");

  auto *dump = app.add_subcommand("dump-snapshots", "write (x, u) plot data at given times");
  dump->add_option("config", config, "experiment file")->required();
  dump->add_option("--times", times, "output times (default: output_times)");
  dump->add_option("--cells", cells, "rung (default: second ladder entry)");
  dump->add_option("--samples", samples, "points per snapshot (default: 4 per cell)");
  dump->add_option("-o,--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  ExperimentConfig cfg;
  std::vector<RungSummary> done;
  fs::path dir(out_dir);
  try {
    if (eoc_cmd->parsed()) {
      const auto rungs = read_report((fs::path(report_dir) / "report.json").string());
      emit_tables(rungs, report_dir, true);
      return kOk;
    }
    cfg = load_config(config);
    if (cells > 0)
      cfg.ladder = {cells};
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }

  try {
    if (run->parsed()) {
      fs::create_directories(dir);
      ExperimentOptions opt;
      opt.with_fine = !no_fine;
      opt.on_rung = [&](const RungResult &r) {
        done.push_back(summarize(r));
        const auto &s = done.back();
        std::fprintf(stderr, "rung %zu: max delta %.4g, L2 %.4g, L1 %.4g, %.1f s\n", s.cells,
                     s.max_delta, s.l2, s.l1, s.wall);
        write_curves(r.report, (dir / ("curves_" + std::to_string(s.cells) + ".dat")).string());
      };
      run_experiment(cfg, opt);
      write_report(cfg, done, (dir / "report.json").string());
      emit_tables(done, dir, true);
      const int code = status_code(done);
      write_manifest(cfg, done, code == kOk ? "ok" : "certificate-failure", "",
                     (dir / "manifest.json").string());
      return code;
    }
    if (fine->parsed()) {
      const std::size_t k = mult > 0 ? mult : cfg.fine_mult;
      std::vector<double> h, d;
      for (std::size_t n : cfg.ladder) {
        const RunConfig rc = rung_config(cfg, n);
        const RunReport rep = run_rung(rc);
        h.push_back(rep.h);
        d.push_back(fine_reference_compare(rc, rep, k));
      }
      const auto e = cfg.ladder.size() >= 2 ? eoc(d, h) : std::vector<double>(1, std::nan(""));
      std::printf("%8s %13s %6s\n", "cells", "fine_l1", "EoC");
      for (std::size_t i = 0; i < d.size(); ++i)
        std::printf("%8zu %13.6g %6.2f\n", cfg.ladder[i], d[i], e[i]);
      return kOk;
    }
    if (dump->parsed()) {
      fs::create_directories(dir);
      const std::size_t n = cells > 0 ? cells : cfg.ladder[std::min<std::size_t>(1, cfg.ladder.size() - 1)];
      RunConfig rc = rung_config(cfg, n);
      if (!times.empty())
        rc.output_times = times;
      const std::size_t m = samples > 0 ? samples : 4 * n + 1;
      RunHooks hooks;
      hooks.on_output = [&](const GluedSnapshot &s) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_t%.4f.dat", s.t);
        write_snapshot(s, rc.x_lo, rc.x_hi, m, (dir / name).string());
      };
      const RunReport rep = run_rung(rc, hooks);
      write_curves(rep, (dir / "curves.dat").string());
      return rep.finite ? kOk : kCertificate;
    }
  } catch (const ConfigError &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument &e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception &e) {
    std::cerr << "aborted: " << e.what() << '\n';
    if (run->parsed()) {
      try {
        write_report(cfg, done, (dir / "report.json").string());
        write_manifest(cfg, done, "aborted", e.what(), (dir / "manifest.json").string());
      } catch (const std::exception &w) {
        std::cerr << "manifest: " << w.what() << '\n';
      }
    }
    return kNumeric;
  }
  return kOk;
}
