#include "shiftest/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace shiftest {

namespace {

using nlohmann::json;

std::vector<std::string> words(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;)
    out.push_back(w);
  return out;
}

double number(const std::string &w, int line) {
  if (w == "inf" || w == "+inf")
    return kInf;
  if (w == "-inf")
    return -kInf;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(w, &used);
  } catch (const std::exception &) {
    used = 0;
  }
  if (used != w.size())
    throw ConfigError("line " + std::to_string(line) + ": not a number: " + w);
  return v;
}

bool flag(const std::string &w, int line) {
  if (w == "true" || w == "1" || w == "yes")
    return true;
  if (w == "false" || w == "0" || w == "no")
    return false;
  throw ConfigError("line " + std::to_string(line) + ": not a boolean: " + w);
}

std::ofstream open_out(const std::string &path) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot write " + path);
  out.precision(17);
  return out;
}

std::string g6(double v) {
  if (std::isnan(v))
    return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double nan_or(double v) { return std::isfinite(v) ? v : std::nan(""); }

json num(double v) {
  if (std::isnan(v))
    return nullptr;
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  return v;
}

double from_json(const json &j) {
  if (j.is_null())
    return std::nan("");
  if (j.is_string())
    return j.get<std::string>() == "-inf" ? -kInf : kInf;
  return j.get<double>();
}

EocTable make_table(const std::vector<RungSummary> &rungs,
                    const std::vector<std::pair<std::string, double RungSummary::*>> &cols) {
  EocTable t;
  for (const auto &r : rungs) {
    t.cells.push_back(r.cells);
    t.h.push_back(r.h);
  }
  for (const auto &[name, field] : cols) {
    EocColumn c;
    c.name = name;
    for (const auto &r : rungs)
      c.values.push_back(r.*field);
    c.eoc = rungs.size() >= 2 ? eoc(c.values, t.h)
                              : std::vector<double>(rungs.size(), std::nan(""));
    t.columns.push_back(std::move(c));
  }
  return t;
}

} // namespace

ExperimentConfig parse_config(std::istream &in) {
  ExperimentConfig cfg;
  std::ostringstream text;
  bool have_ladder = false;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    text << line << '\n';
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const auto kw = words(line.substr(0, eq));
    const auto v = words(line.substr(eq + 1));
    if (kw.size() != 1 || v.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string &key = kw[0];
    auto one = [&] {
      if (v.size() != 1)
        throw ConfigError("line " + std::to_string(line_no) + ": " + key +
                          " takes one value");
      return v[0];
    };
    if (key == "name")
      cfg.name = one();
    else if (key == "model")
      cfg.model = one();
    else if (key == "eps")
      cfg.eps = number(one(), line_no);
    else if (key == "delta")
      cfg.delta = one() == "sqrt" ? 0.0 : number(v[0], line_no);
    else if (key == "T")
      cfg.T = number(one(), line_no);
    else if (key == "cfl")
      cfg.cfl = number(one(), line_no);
    else if (key == "fine_mult")
      cfg.fine_mult = std::size_t(number(one(), line_no));
    else if (key == "strict_c")
      cfg.strict_c = flag(one(), line_no);
    else if (key == "zero_sources")
      cfg.zero_sources = flag(one(), line_no);
    else if (key == "domain") {
      if (v.size() != 2)
        throw ConfigError("line " + std::to_string(line_no) + ": domain takes lo hi");
      cfg.x_lo = number(v[0], line_no);
      cfg.x_hi = number(v[1], line_no);
    } else if (key == "ladder") {
      cfg.ladder.clear();
      for (const auto &w : v) {
        const double c = number(w, line_no);
        if (!(c >= 2) || c != std::floor(c))
          throw ConfigError("line " + std::to_string(line_no) + ": bad cell count " + w);
        cfg.ladder.push_back(std::size_t(c));
      }
      have_ladder = true;
    } else if (key == "output_times") {
      cfg.output_times.clear();
      for (const auto &w : v)
        cfg.output_times.push_back(number(w, line_no));
    } else if (key == "piece") {
      if (v.size() != 4)
        throw ConfigError("line " + std::to_string(line_no) + ": piece takes a b c0 c1");
      cfg.segments.push_back({number(v[0], line_no), number(v[1], line_no),
                              number(v[2], line_no), number(v[3], line_no)});
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key " + key);
    }
  }
  cfg.text = text.str();

  if (cfg.segments.empty())
    throw ConfigError("no piece lines");
  if (!have_ladder && cfg.ladder.empty())
    throw ConfigError("empty ladder");
  for (std::size_t k = 1; k < cfg.ladder.size(); ++k)
    if (cfg.ladder[k] <= cfg.ladder[k - 1])
      throw ConfigError("ladder must be strictly increasing");
  if (!(cfg.T > 0) || !(cfg.x_hi > cfg.x_lo) || !(cfg.eps > 0))
    throw ConfigError("need T > 0, eps > 0 and domain lo < hi");
  if (!(cfg.cfl > 0 && cfg.cfl <= 0.5))
    throw ConfigError("cfl must lie in (0, 0.5]");
  if (cfg.fine_mult < 4)
    throw ConfigError("fine_mult must be at least 4");
  for (double t : cfg.output_times)
    if (!(t > 0 && t <= cfg.T))
      throw ConfigError("output times must lie in (0, T]");
  try {
    model_by_name(cfg.model, 1.0);
    classify(cfg.segments, cfg.eps);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read " + path);
  return parse_config(in);
}

RunConfig rung_config(const ExperimentConfig &cfg, std::size_t cells) {
  RunConfig rc;
  rc.model = cfg.model;
  rc.segments = cfg.segments;
  rc.eps = cfg.eps;
  rc.delta = cfg.delta;
  rc.x_lo = cfg.x_lo;
  rc.x_hi = cfg.x_hi;
  rc.T = cfg.T;
  rc.cfl = cfg.cfl;
  rc.cells = cells;
  rc.output_times = cfg.output_times;
  rc.strict_c = cfg.strict_c;
  rc.zero_sources = cfg.zero_sources;
  return rc;
}

double fine_reference_compare(const RunConfig &rc, const RunReport &rep, std::size_t mult) {
  if (mult < 1)
    throw std::invalid_argument("fine_reference_compare: mult >= 1");
  const PieceSolution fine = fine_reference(rc, mult);
  return l1_against(rep.final_state, fine, rc.x_lo, rc.x_hi);
}

std::vector<RungResult> run_experiment(const ExperimentConfig &cfg,
                                       const ExperimentOptions &opt) {
  std::vector<RungResult> out;
  for (std::size_t cells : cfg.ladder) {
    const RunConfig rc = rung_config(cfg, cells);
    RunHooks hooks;
    if (opt.on_output)
      hooks.on_output = [&](const GluedSnapshot &s) { opt.on_output(cells, s); };
    RungResult r;
    try {
      r.report = run_rung(rc, hooks);
      if (opt.with_fine)
        r.fine_l1 = fine_reference_compare(rc, r.report, cfg.fine_mult);
    } catch (const std::runtime_error &e) {
      throw RungAbort(cells, e.what());
    }
    if (opt.on_rung)
      opt.on_rung(r);
    out.push_back(std::move(r));
  }
  return out;
}

const EocColumn &EocTable::column(const std::string &name) const {
  for (const auto &c : columns)
    if (c.name == name)
      return c;
  throw std::out_of_range("no column " + name);
}

RungSummary summarize(const RungResult &r) {
  const RunReport &rep = r.report;
  RungSummary s;
  s.cells = rep.cells;
  s.h = rep.h;
  s.delta = rep.delta;
  s.max_delta = rep.max_delta;
  s.l2 = rep.l2;
  s.l2_coarse = rep.l2_coarse;
  s.l1 = rep.l1;
  s.fine_l1 = r.fine_l1;
  s.R = rep.R;
  s.ambiguity = rep.ambiguity_time;
  s.certified = rep.certified;
  s.finite = rep.finite;
  s.wall = rep.wall_seconds;
  if (rep.regions.empty()) {
    s.upsilon = s.gamma = s.delta_inner = std::nan("");
  } else {
    for (const auto &g : rep.regions) {
      s.upsilon = std::max(s.upsilon, g.max_upsilon);
      s.gamma = std::max(s.gamma, g.gamma);
      s.delta_inner = std::max(s.delta_inner, g.delta_inner);
    }
  }
  return s;
}

EocTable bounds_table(const std::vector<RungSummary> &rungs) {
  return make_table(rungs, {{"max_delta", &RungSummary::max_delta},
                            {"l2", &RungSummary::l2},
                            {"l1", &RungSummary::l1},
                            {"fine_l1", &RungSummary::fine_l1}});
}

EocTable region_table(const std::vector<RungSummary> &rungs) {
  return make_table(rungs, {{"upsilon", &RungSummary::upsilon},
                            {"gamma", &RungSummary::gamma},
                            {"delta_inner", &RungSummary::delta_inner},
                            {"l2", &RungSummary::l2},
                            {"l1", &RungSummary::l1}});
}

EocTable residual_table(const std::vector<RungSummary> &rungs) {
  return make_table(rungs, {{"R", &RungSummary::R},
                            {"l2_coarse", &RungSummary::l2_coarse},
                            {"ambiguity", &RungSummary::ambiguity}});
}

void write_csv(const EocTable &t, const std::string &path) {
  auto out = open_out(path);
  out << "cells,h";
  for (const auto &c : t.columns)
    out << ',' << c.name << ",eoc_" << c.name;
  out << '\n';
  for (std::size_t k = 0; k < t.cells.size(); ++k) {
    out << t.cells[k] << ',' << g6(t.h[k]);
    for (const auto &c : t.columns)
      out << ',' << g6(c.values[k]) << ',' << g6(c.eoc[k]);
    out << '\n';
  }
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

void write_report(const ExperimentConfig &cfg, const std::vector<RungSummary> &rungs,
                  const std::string &path) {
  json j;
  j["name"] = cfg.name;
  j["rungs"] = json::array();
  for (const auto &r : rungs)
    j["rungs"].push_back({{"cells", r.cells},
                          {"h", num(r.h)},
                          {"delta", num(r.delta)},
                          {"max_delta", num(r.max_delta)},
                          {"l2", num(r.l2)},
                          {"l2_coarse", num(r.l2_coarse)},
                          {"l1", num(r.l1)},
                          {"fine_l1", num(r.fine_l1)},
                          {"R", num(r.R)},
                          {"ambiguity", num(r.ambiguity)},
                          {"upsilon", num(r.upsilon)},
                          {"gamma", num(r.gamma)},
                          {"delta_inner", num(r.delta_inner)},
                          {"certified", r.certified},
                          {"finite", r.finite},
                          {"wall_seconds", num(r.wall)}});
  auto out = open_out(path);
  out << std::setw(2) << j << '\n';
}

std::vector<RungSummary> read_report(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  json j;
  try {
    in >> j;
    std::vector<RungSummary> out;
    for (const auto &r : j.at("rungs")) {
      RungSummary s;
      s.cells = r.at("cells").get<std::size_t>();
      s.h = from_json(r.at("h"));
      s.delta = from_json(r.at("delta"));
      s.max_delta = from_json(r.at("max_delta"));
      s.l2 = from_json(r.at("l2"));
      s.l2_coarse = from_json(r.at("l2_coarse"));
      s.l1 = from_json(r.at("l1"));
      s.fine_l1 = from_json(r.at("fine_l1"));
      s.R = from_json(r.at("R"));
      s.ambiguity = from_json(r.at("ambiguity"));
      s.upsilon = from_json(r.at("upsilon"));
      s.gamma = from_json(r.at("gamma"));
      s.delta_inner = from_json(r.at("delta_inner"));
      s.certified = r.at("certified").get<bool>();
      s.finite = r.at("finite").get<bool>();
      s.wall = from_json(r.at("wall_seconds"));
      out.push_back(s);
    }
    return out;
  } catch (const json::exception &e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_manifest(const ExperimentConfig &cfg, const std::vector<RungSummary> &rungs,
                    const std::string &status, const std::string &error,
                    const std::string &path) {
  json j;
  j["name"] = cfg.name;
  j["config_hash"] = config_hash(cfg.text);
  j["status"] = status;
  if (!error.empty())
    j["error"] = error;
  j["versions"] = {{"shiftest", "1.0.0"},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  j["settings"] = {{"model", cfg.model},
                   {"eps", cfg.eps},
                   {"delta", cfg.delta > 0 ? json(cfg.delta) : json("sqrt")},
                   {"T", cfg.T},
                   {"domain", {cfg.x_lo, cfg.x_hi}},
                   {"cfl", cfg.cfl},
                   {"ladder", cfg.ladder},
                   {"fine_mult", cfg.fine_mult},
                   {"strict_c", cfg.strict_c},
                   {"zero_sources", cfg.zero_sources}};
  double wall = 0;
  json done = json::array();
  for (const auto &r : rungs) {
    wall += r.wall;
    done.push_back(r.cells);
  }
  j["completed_rungs"] = done;
  j["wall_seconds"] = wall;
  auto out = open_out(path);
  out << std::setw(2) << j << '\n';
}

void write_snapshot(const GluedSnapshot &s, double lo, double hi, std::size_t samples,
                    const std::string &path) {
  if (samples < 2 || !(hi > lo))
    throw std::invalid_argument("write_snapshot: need samples >= 2 and lo < hi");
  auto out = open_out(path);
  out << "# t = " << s.t << "\n# x u\n";
  for (std::size_t k = 0; k < samples; ++k) {
    const double x = lo + (hi - lo) * double(k) / double(samples - 1);
    out << x << ' ' << s(x) << '\n';
  }
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

void write_curves(const RunReport &rep, const std::string &path) {
  auto out = open_out(path);
  out << "# t curve delta\n";
  for (const auto &row : rep.rows)
    for (std::size_t k = 0; k < row.delta.size(); ++k)
      out << row.t << ' ' << k << ' ' << nan_or(row.delta[k]) << '\n';
  if (!out)
    throw std::runtime_error("write failed: " + path);
}

std::string config_hash(const std::string &text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace shiftest
