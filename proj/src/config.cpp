// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfw/config.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sfw {
namespace {

using Sections = std::map<std::string, std::map<std::string, std::string>>;

const std::map<std::string, std::vector<std::string>>& FixedKeys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"experiment", {"name", "out", "threads", "wall_time"}},
      {"constraint", {"kind", "radius", "lower", "upper", "scale", "blocks", "budgets", "rows", "cols"}},
      {"solver",
       {"algorithm", "schedule", "option", "T", "seeds", "eta_c", "eta_a", "sweep", "step", "delta",
        "l", "batch", "log_gap", "log_est_error", "mc_samples"}},
      {"distsim",
       {"setting", "M", "T", "mode", "s1", "s2", "parallel", "fl_local_steps", "snc", "compare", "sigma",
        "L", "D"}},
  };
  return keys;
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> SplitOn(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = Trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

[[noreturn]] void BadValue(const std::string& key, const std::string& value, const char* want) {
  Fail(Errc::kConfig, "key '" + key + "': expected " + want + ", got '" + value + "'");
}

double ToDouble(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) BadValue(key, v, "a number");
    return x;
  } catch (const std::logic_error&) {
    BadValue(key, v, "a number");
  }
}

long long ToInt(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) BadValue(key, v, "an integer");
    return x;
  } catch (const std::logic_error&) {
    BadValue(key, v, "an integer");
  }
}

bool ToBool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  BadValue(key, v, "a boolean");
}

std::vector<double> ToDoubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : SplitOn(v, ',')) out.push_back(ToDouble(key, item));
  return out;
}

std::vector<std::vector<int>> ToBlocks(const std::string& key, const std::string& v) {
  std::string text = v;
  std::replace(text.begin(), text.end(), ';', '|');
  std::vector<std::vector<int>> blocks;
  for (const auto& block : SplitOn(text, '|')) {
    std::vector<int> elems;
    for (const auto& item : SplitOn(block, ',')) {
      const auto dash = item.find('-', 1);
      if (dash != std::string::npos) {
        const long long a = ToInt(key, Trim(item.substr(0, dash)));
        const long long b = ToInt(key, Trim(item.substr(dash + 1)));
        if (b < a) BadValue(key, item, "an increasing range");
        for (long long e = a; e <= b; ++e) elems.push_back(static_cast<int>(e));
      } else {
        elems.push_back(static_cast<int>(ToInt(key, item)));
      }
    }
    blocks.push_back(std::move(elems));
  }
  return blocks;
}

void CheckChoice(const std::string& key, const std::string& v, std::initializer_list<const char*> options) {
  for (const char* o : options) {
    if (v == o) return;
  }
  std::string all;
  for (const char* o : options) all += (all.empty() ? "" : "|") + std::string(o);
  BadValue(key, v, all.c_str());
}

Sections ReadSections(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    Fail(Errc::kConfig, std::string("config syntax: ") + e.what());
  }
  Sections out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) Fail(Errc::kConfig, "key '" + section + "' outside any section");
    for (const auto& [key, value] : body) out[section][key] = Trim(value.data());
  }
  return out;
}

void ApplyOverride(Sections& s, const std::string& ov) {
  const auto eq = ov.find('=');
  const auto dot = ov.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
    Fail(Errc::kConfig, "override '" + ov + "' must look like section.key=value");
  }
  s[Trim(ov.substr(0, dot))][Trim(ov.substr(dot + 1, eq - dot - 1))] = Trim(ov.substr(eq + 1));
}

void ValidateKeys(const Sections& s) {
  for (const auto& [section, body] : s) {
    std::vector<std::string> allowed;
    if (section == "problem") {
      const auto it = body.find("name");
      if (it == body.end()) Fail(Errc::kConfig, "key 'problem.name' is required");
      allowed = ProblemParamKeys(it->second);
      allowed.push_back("name");
      allowed.push_back("instance_seed");
    } else {
      const auto it = FixedKeys().find(section);
      if (it == FixedKeys().end()) Fail(Errc::kConfig, "unknown section '" + section + "'");
      allowed = it->second;
    }
    for (const auto& [key, value] : body) {
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        Fail(Errc::kConfig, "unknown key '" + key + "' in section [" + section + "]");
      }
    }
  }
  if (s.find("problem") == s.end()) Fail(Errc::kConfig, "section [problem] is required");
}

RunConfig Build(const Sections& s) {
  RunConfig cfg;
  auto get = [&](const std::string& sec, const std::string& key) -> const std::string* {
    const auto it = s.find(sec);
    if (it == s.end()) return nullptr;
    const auto kt = it->second.find(key);
    return kt == it->second.end() ? nullptr : &kt->second;
  };
  auto full = [](const std::string& sec, const std::string& key) { return sec + "." + key; };

  if (auto v = get("experiment", "name")) cfg.name = *v;
  if (auto v = get("experiment", "out")) cfg.out_dir = *v;
  if (auto v = get("experiment", "threads")) cfg.threads = static_cast<int>(ToInt("experiment.threads", *v));
  if (auto v = get("experiment", "wall_time")) cfg.wall_time = ToBool("experiment.wall_time", *v);
  if (cfg.threads < 1) BadValue("experiment.threads", std::to_string(cfg.threads), "a positive integer");
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) {
    BadValue("experiment.name", cfg.name, "a plain file-name stem");
  }

  for (const auto& [key, value] : s.at("problem")) {
    if (key == "name") {
      cfg.problem.name = value;
    } else if (key == "instance_seed") {
      cfg.problem.seed = static_cast<std::uint64_t>(ToInt("problem.instance_seed", value));
    } else {
      cfg.problem.params[key] = value;
    }
  }

  ConstraintSpec& c = cfg.constraint;
  const std::string cs = "constraint";
  if (auto v = get(cs, "kind")) {
    CheckChoice(full(cs, "kind"), *v, {"l1", "box", "simplex", "matroid", "nuclear"});
    c.kind = *v;
  }
  if (auto v = get(cs, "radius")) c.radius = ToDouble(full(cs, "radius"), *v);
  if (auto v = get(cs, "scale")) c.scale = ToDouble(full(cs, "scale"), *v);
  if (auto v = get(cs, "lower")) c.lower = ToDoubles(full(cs, "lower"), *v);
  if (auto v = get(cs, "upper")) c.upper = ToDoubles(full(cs, "upper"), *v);
  if (auto v = get(cs, "blocks")) c.blocks = ToBlocks(full(cs, "blocks"), *v);
  if (auto v = get(cs, "budgets")) {
    for (double b : ToDoubles(full(cs, "budgets"), *v)) c.budgets.push_back(static_cast<int>(b));
  }
  if (auto v = get(cs, "rows")) c.rows = static_cast<int>(ToInt(full(cs, "rows"), *v));
  if (auto v = get(cs, "cols")) c.cols = static_cast<int>(ToInt(full(cs, "cols"), *v));

  SolverSpec& sv = cfg.solver;
  const std::string ss = "solver";
  if (auto v = get(ss, "algorithm")) {
    CheckChoice(full(ss, "algorithm"), *v, {"one_sfw", "oblivious_sfw", "scg", "fw", "bcg", "dbg", "qfw"});
    sv.algorithm = *v;
  }
  if (auto v = get(ss, "schedule")) {
    CheckChoice(full(ss, "schedule"), *v, {"convex", "nonconvex", "drmax"});
    sv.schedule = *v;
  }
  if (auto v = get(ss, "option")) {
    CheckChoice(full(ss, "option"), *v, {"exact_hessian", "grad_diff"});
    sv.option = *v;
  }
  if (auto v = get(ss, "T")) sv.T = static_cast<int>(ToInt(full(ss, "T"), *v));
  if (sv.T < 0) BadValue(full(ss, "T"), std::to_string(sv.T), "T >= 0");
  if (auto v = get(ss, "seeds")) sv.seeds = ParseSeeds(*v);
  if (auto v = get(ss, "eta_c")) sv.eta_c = ToDouble(full(ss, "eta_c"), *v);
  if (auto v = get(ss, "eta_a")) sv.eta_a = ToDouble(full(ss, "eta_a"), *v);
  if (auto v = get(ss, "sweep")) sv.sweep = ToBool(full(ss, "sweep"), *v);
  if (auto v = get(ss, "step")) {
    CheckChoice(full(ss, "step"), *v, {"two_over_t_plus_two", "fixed"});
    sv.step = *v;
  }
  if (auto v = get(ss, "delta")) sv.delta = ToDouble(full(ss, "delta"), *v);
  if (auto v = get(ss, "l")) sv.l = static_cast<int>(ToInt(full(ss, "l"), *v));
  if (auto v = get(ss, "batch")) sv.batch = static_cast<int>(ToInt(full(ss, "batch"), *v));
  if (auto v = get(ss, "log_gap")) sv.log_gap = ToBool(full(ss, "log_gap"), *v);
  if (auto v = get(ss, "log_est_error")) sv.log_est_error = ToBool(full(ss, "log_est_error"), *v);
  if (auto v = get(ss, "mc_samples")) sv.mc_samples = static_cast<int>(ToInt(full(ss, "mc_samples"), *v));

  if (s.count("distsim")) {
    DistsimSpec ds;
    const std::string dn = "distsim";
    if (auto v = get(dn, "setting")) {
      CheckChoice(full(dn, "setting"), *v,
                  {"finite_convex", "stoch_convex", "finite_nonconvex", "stoch_nonconvex"});
      ds.setting = *v;
    }
    if (auto v = get(dn, "M")) ds.M = static_cast<int>(ToInt(full(dn, "M"), *v));
    if (ds.M < 1) BadValue(full(dn, "M"), std::to_string(ds.M), "M >= 1");
    if (auto v = get(dn, "mode")) {
      CheckChoice(full(dn, "mode"), *v, {"quantized", "unquantized", "fl"});
      ds.mode = *v;
    }
    if (auto v = get(dn, "T")) ds.T = static_cast<int>(ToInt(full(dn, "T"), *v));
    if (auto v = get(dn, "s1")) ds.s1 = ToInt(full(dn, "s1"), *v);
    if (auto v = get(dn, "s2")) ds.s2 = ToInt(full(dn, "s2"), *v);
    for (const char* key : {"s1", "s2"}) {
      const long long lv = key[1] == '1' ? ds.s1 : ds.s2;
      if (get(dn, key) && (lv < 0 || lv > (1LL << 16))) {
        BadValue(full(dn, key), std::to_string(lv), "a level in [0, 65536]");
      }
    }
    if (auto v = get(dn, "parallel")) ds.parallel = ToBool(full(dn, "parallel"), *v);
    if (auto v = get(dn, "fl_local_steps")) ds.fl_local_steps = static_cast<int>(ToInt(full(dn, "fl_local_steps"), *v));
    if (auto v = get(dn, "snc")) ds.snc = ToBool(full(dn, "snc"), *v);
    if (auto v = get(dn, "compare")) ds.compare = ToBool(full(dn, "compare"), *v);
    if (auto v = get(dn, "sigma")) ds.sigma = ToDouble(full(dn, "sigma"), *v);
    if (auto v = get(dn, "L")) ds.L = ToDouble(full(dn, "L"), *v);
    if (auto v = get(dn, "D")) ds.D = ToDouble(full(dn, "D"), *v);
    cfg.distsim = ds;
  }

  for (const auto& [section, body] : s) {
    for (const auto& [key, value] : body) cfg.canonical[section + "." + key] = value;
  }
  std::string canon;
  for (const auto& [k, v] : cfg.canonical) canon += k + "=" + v + "\n";
  cfg.hash = HashBytes(canon.data(), canon.size());
  return cfg;
}

}  // namespace

std::vector<std::uint64_t> ParseSeeds(const std::string& text) {
  const std::string t = Trim(text);
  std::vector<std::uint64_t> seeds;
  const auto dots = t.find("..");
  if (dots != std::string::npos) {
    const long long a = ToInt("seeds", Trim(t.substr(0, dots)));
    const long long b = ToInt("seeds", Trim(t.substr(dots + 2)));
    if (a < 0 || b < a) BadValue("seeds", t, "a range A..B with 0 <= A <= B");
    for (long long s = a; s <= b; ++s) seeds.push_back(static_cast<std::uint64_t>(s));
  } else {
    for (const auto& item : SplitOn(t, ',')) {
      const long long s = ToInt("seeds", item);
      if (s < 0) BadValue("seeds", item, "a non-negative seed");
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
  }
  if (seeds.empty()) BadValue("seeds", t, "a nonempty seed list");
  return seeds;
}

RunConfig ParseConfigString(const std::string& text, const std::vector<std::string>& overrides) {
  Sections s = ReadSections(text);
  for (const auto& ov : overrides) ApplyOverride(s, ov);
  ValidateKeys(s);
  return Build(s);
}

RunConfig LoadConfig(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) Fail(Errc::kConfig, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfigString(buf.str(), overrides);
}

namespace {

Vector Broadcast(const std::vector<double>& v, int dim, double fallback, const char* key) {
  if (v.empty()) return Vector::Constant(dim, fallback);
  if (v.size() == 1) return Vector::Constant(dim, v[0]);
  if (static_cast<int>(v.size()) != dim) {
    Fail(Errc::kConfig, std::string("key 'constraint.") + key + "': expected 1 or " +
                            std::to_string(dim) + " values");
  }
  return Eigen::Map<const Vector>(v.data(), dim);
}

}  // namespace

PartitionMatroid BuildMatroid(const ConstraintSpec& spec, int dim) {
  if (spec.blocks.empty()) Fail(Errc::kConfig, "key 'constraint.blocks' is required for a matroid");
  if (spec.budgets.size() != spec.blocks.size()) {
    Fail(Errc::kConfig, "key 'constraint.budgets': one budget per block required");
  }
  return PartitionMatroid(dim, spec.blocks, spec.budgets);
}

FeasibleSet BuildConstraint(const ConstraintSpec& spec, int dim) {
  if (spec.kind == "l1") return FeasibleSet::MakeL1Ball(dim, spec.radius);
  if (spec.kind == "box") {
    return FeasibleSet::MakeBox(Broadcast(spec.lower, dim, 0.0, "lower"),
                                Broadcast(spec.upper, dim, 1.0, "upper"));
  }
  if (spec.kind == "simplex") return FeasibleSet::MakeSimplex(dim, spec.scale);
  if (spec.kind == "matroid") return FeasibleSet::MakeMatroidPolytope(BuildMatroid(spec, dim));
  if (spec.kind == "nuclear") {
    int rows = spec.rows;
    int cols = spec.cols;
    if (rows <= 0 && cols > 0) rows = dim / cols;
    if (cols <= 0 && rows > 0) cols = dim / rows;
    if (rows <= 0 || cols <= 0 || rows * cols != dim) {
      Fail(Errc::kConfig, "keys 'constraint.rows'/'constraint.cols' must multiply to " + std::to_string(dim));
    }
    return FeasibleSet::MakeNuclearBall(rows, cols, spec.radius);
  }
  Fail(Errc::kConfig, "key 'constraint.kind': unknown kind '" + spec.kind + "'");
}

std::string HashHex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace sfw
