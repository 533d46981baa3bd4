// Acceptance run: one PASS/FAIL line per criterion, exit status 1 on any failure.
#include "shiftest/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

using namespace shiftest;
namespace fs = std::filesystem;

#ifndef SHIFTEST_CONFIG_DIR
#define SHIFTEST_CONFIG_DIR "configs"
#endif

namespace {

struct Ladder {
  std::vector<RungResult> results;
  std::vector<RungSummary> rungs;
  std::string error;
  double wall = 0;
};

Ladder run_ladder(const fs::path &file, bool fine) {
  Ladder l;
  try {
    ExperimentOptions opt;
    opt.with_fine = fine;
    l.results = run_experiment(load_config(file.string()), opt);
    for (const auto &r : l.results) {
      l.rungs.push_back(summarize(r));
      l.wall += r.report.wall_seconds;
    }
  } catch (const std::exception &e) {
    l.error = e.what();
  }
  return l;
}

bool within(const std::vector<double> &e, double lo, double hi) {
  for (std::size_t k = 1; k < e.size(); ++k)
    if (!(e[k] >= lo && e[k] <= hi))
      return false;
  return e.size() >= 2;
}

std::string list(const std::vector<double> &e) {
  std::string s;
  char buf[32];
  for (std::size_t k = 1; k < e.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%s%.3f", s.empty() ? "" : " ", e[k]);
    s += buf;
  }
  return s;
}

int failures = 0;

void report(int id, bool ok, const std::string &detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok)
    ++failures;
}

std::vector<double> sqrt_of(std::vector<double> v) {
  for (double &x : v)
    x = std::sqrt(x);
  return v;
}

std::vector<double> column(const std::vector<RungSummary> &r, double RungSummary::*f) {
  std::vector<double> v;
  for (const auto &s : r)
    v.push_back(s.*f);
  return v;
}

std::vector<double> widths(const std::vector<RungSummary> &r) {
  return column(r, &RungSummary::h);
}

bool dissipation_grid() {
  const Model<double> m = burgers_model(3.0);
  const int n = 20;
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = -3.0 + 6.0 * i / (n - 1);
  for (double up : g)
    for (double um : g) {
      if (um < up)
        continue;
      for (double bp : g)
        for (double bm : g) {
          if (!(bm - bp > 0))
            continue;
          if (dissipation_lhs(m.law, m.entropy, up, um, bp, bm) >
              dissipation_bound(m.k, up, um, bp, bm, bm - bp) + 1e-12)
            return false;
        }
    }
  return true;
}

bool front_tracking_l1() {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  const ScalarLaw<double> law = burgers_model(5.0).law;
  auto rate = [](const FrontTrack &f) {
    double r = 0;
    for (std::size_t k = 0; k < f.fronts(); ++k)
      r += (f.values()[k] - f.values()[k + 1]) * std::abs(f.speed_errors()[k]);
    return r;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + int(U(rng) * 10);
    std::vector<double> u{2 * U(rng)}, x{0}, e;
    for (int k = 0; k < n; ++k) {
      u.push_back(u.back() - 0.05 - U(rng));
      if (k > 0)
        x.push_back(x.back() + 0.01 + U(rng) * 0.3);
      e.push_back(0.2 * (U(rng) - 0.5));
    }
    FrontTrack w(law, u, x), v(law, u, x, e);
    double bound = 0, t = 0;
    for (int s = 0; s < 1000; ++s) {
      const double r0 = rate(v);
      t += 1e-3;
      v.advance_to(t);
      w.advance_to(t);
      bound += 1e-3 * std::max(r0, rate(v));
      if (l1_distance(v, w) > bound + 1e-12)
        return false;
    }
  }
  return true;
}

bool gronwall_oracle() {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> a(100), b(100);
  for (int k = 0; k < 100; ++k) {
    a[k] = U(rng);
    b[k] = 3 * U(rng);
  }
  GronwallAccumulator acc;
  for (int i = 0; i < 100; ++i) {
    acc.step(a[i], b[i], 1e-2);
    double direct = 0;
    for (int j = 0; j <= i; ++j) {
      double e = 0;
      for (int k = j; k <= i; ++k)
        e += b[k] * 1e-2;
      direct += a[j] * 1e-2 * std::exp(e);
    }
    if (std::abs(acc.value - direct) > 1e-12 * (1 + direct))
      return false;
  }
  return true;
}

bool zero_run(const fs::path &file) {
  ExperimentConfig cfg = load_config(file.string());
  cfg.zero_sources = true;
  const RunReport r = run_rung(rung_config(cfg, cfg.ladder.front()));
  bool ok = r.max_delta == 0 && r.l2 == 0 && r.l2_coarse == 0 && r.l1 == 0 &&
            r.b_integral == 0 && r.R == 0;
  for (const auto &row : r.rows)
    for (double d : row.delta)
      ok = ok && d == 0;
  for (const auto &g : r.regions)
    ok = ok && g.max_upsilon == 0 && g.gamma == 0 && g.delta_inner == 0;
  return ok;
}

} // namespace

int main(int argc, char **argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path(SHIFTEST_CONFIG_DIR);
  char buf[512];

  const Ladder e1 = run_ladder(dir / "exp1.cfg", true);
  const Ladder e2 = run_ladder(dir / "exp2.cfg", true);
  const Ladder sm = run_ladder(dir / "smooth.cfg", true);
  const Ladder kn = run_ladder(dir / "kink.cfg", true);

  // 1: large shocks
  if (!e1.error.empty()) {
    report(1, false, "experiment 1 aborted: " + e1.error);
  } else {
    const auto t = bounds_table(e1.rungs);
    const auto &d = t.column("max_delta"), &l2 = t.column("l2"), &l1 = t.column("l1");
    const double target[3] = {4.13e-3, 3.26e-4, 9.46e-3};
    const double ours[3] = {d.values.back(), l2.values.back(), l1.values.back()};
    bool close = e1.rungs.back().cells == 3200;
    for (int k = 0; k < 3; ++k)
      close = close && ours[k] <= 2 * target[k] && ours[k] >= target[k] / 2;
    const bool ok = within(d.eoc, 0.85, 1.15) && within(l2.eoc, 0.85, 1.15) &&
                    within(l1.eoc, 0.85, 1.15) && close && e1.wall < 300;
    std::snprintf(buf, sizeof buf,
                  "EoC max Delta [%s], L2 [%s], L1 [%s] in 1.0+-0.15; at 3200: %.3g %.3g "
                  "%.3g vs 4.13e-3 3.26e-4 9.46e-3 (x2); %.1f s < 300 s",
                  list(d.eoc).c_str(), list(l2.eoc).c_str(), list(l1.eoc).c_str(), ours[0],
                  ours[1], ours[2], e1.wall);
    report(1, ok, buf);
  }

  // 2: fine-reference column
  if (!e1.error.empty()) {
    report(2, false, "experiment 1 aborted");
  } else {
    const auto e = eoc(column(e1.rungs, &RungSummary::fine_l1), widths(e1.rungs));
    std::snprintf(buf, sizeof buf, "fine-reference L1 EoC [%s] in [0.8, 1.2]",
                  list(e).c_str());
    report(2, within(e, 0.8, 1.2), buf);
  }

  // 3: rapidly decreasing piece
  if (!e2.error.empty()) {
    report(3, false, "experiment 2 aborted: " + e2.error);
  } else {
    const auto t = region_table(e2.rungs);
    const auto &y = t.column("upsilon"), &g = t.column("gamma"),
               &di = t.column("delta_inner"), &l2 = t.column("l2"), &l1 = t.column("l1");
    bool finite = true;
    for (const auto &r : e2.rungs)
      finite = finite && r.finite;
    const bool ok = within(y.eoc, 0.35, 0.65) && within(g.eoc, 0.35, 0.65) &&
                    within(di.eoc, 0.15, 0.35) && within(l2.eoc, 0.6, 0.9) && finite &&
                    e2.wall < 900;
    std::snprintf(buf, sizeof buf,
                  "EoC Upsilon [%s], Gamma [%s] in [0.35,0.65]; Delta_inner [%s] in "
                  "[0.15,0.35]; L2 [%s] in [0.6,0.9]; L1 [%s] (no target); %.1f s < 900 s",
                  list(y.eoc).c_str(), list(g.eoc).c_str(), list(di.eoc).c_str(),
                  list(l2.eoc).c_str(), list(l1.eoc).c_str(), e2.wall);
    report(3, ok, buf);
  }

  // 4: residual scaling
  if (!sm.error.empty() || !kn.error.empty()) {
    report(4, false, "residual fixtures aborted: " + sm.error + kn.error);
  } else {
    const auto es = eoc(sqrt_of(column(sm.rungs, &RungSummary::R)), widths(sm.rungs));
    const auto ek = eoc(column(kn.rungs, &RungSummary::R), widths(kn.rungs));
    std::snprintf(buf, sizeof buf, "smooth sqrt(R) EoC [%s] in 1.0+-0.2; kink R EoC [%s] in 1.5+-0.3",
                  list(es).c_str(), list(ek).c_str());
    report(4, within(es, 0.8, 1.2) && within(ek, 1.2, 1.8), buf);
  }

  // 5: soundness against the 8x reference
  {
    bool ok = true;
    double worst = kInf;
    std::string where;
    for (const auto *l : {&e1, &e2, &sm, &kn}) {
      if (!l->error.empty() || l->rungs.empty()) {
        ok = false;
        continue;
      }
      for (const auto &r : l->rungs) {
        const double ratio = r.l1 / r.fine_l1;
        if (!(r.l1 >= r.fine_l1))
          ok = false;
        if (ratio < worst) {
          worst = ratio;
          where = std::to_string(r.cells);
        }
      }
    }
    std::snprintf(buf, sizeof buf,
                  "L1 bound >= fine-reference L1 on all fixtures and rungs; smallest ratio "
                  "%.3g (%s cells)",
                  worst, where.c_str());
    report(5, ok, buf);
  }

  // 6: property suites
  {
    bool audits = e1.error.empty() && e2.error.empty();
    for (const auto *l : {&e1, &e2})
      for (const auto &r : l->results)
        audits = audits && r.report.audit.ordering_ok && r.report.audit.downjump_ok &&
                 r.report.audit.gap_ok;
    const bool diss = dissipation_grid();
    const bool ft = front_tracking_l1();
    const bool gr = gronwall_oracle();
    bool zero = false;
    try {
      zero = zero_run(dir / "exp1.cfg") && zero_run(dir / "exp2.cfg");
    } catch (const std::exception &) {
      zero = false;
    }
    std::snprintf(buf, sizeof buf,
                  "dissipation grid %s, front-tracking L1 bound %s, Gronwall oracle %s, "
                  "ordering/down-jump/gap audits %s, zeroed sources %s",
                  diss ? "ok" : "FAIL", ft ? "ok" : "FAIL", gr ? "ok" : "FAIL",
                  audits ? "ok" : "FAIL", zero ? "ok" : "FAIL");
    report(6, diss && ft && gr && audits && zero, buf);
  }

  // 7: certificates
  if (!e1.error.empty()) {
    report(7, false, "experiment 1 aborted");
  } else {
    bool certified = true;
    std::size_t fired = 0;
    for (const auto &r : e1.results) {
      certified = certified && r.report.certified;
      std::size_t n = 0;
      for (const auto &c : r.report.certificates)
        n += std::isfinite(c.t_fire) && c.t_fire <= r.report.rows.back().t;
      fired = std::max(fired, n);
      certified = certified && n >= 2;
    }
    const auto amb = column(e1.rungs, &RungSummary::ambiguity);
    bool ratios = amb.size() >= 2;
    std::string rs;
    for (std::size_t k = 1; k < amb.size(); ++k) {
      const double q = amb[k - 1] / amb[k];
      ratios = ratios && q >= 1.5 && q <= 2.5;
      std::snprintf(buf, sizeof buf, "%s%.3f", rs.empty() ? "" : " ", q);
      rs += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "both merges certified before T on every rung (%zu fired); ambiguity "
                  "ratios [%s] in 2+-0.5",
                  fired, rs.c_str());
    report(7, certified && ratios, buf);
  }

  std::printf("%s: %d criterion(s) failing\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
