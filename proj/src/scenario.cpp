#include "hopf/scenario.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include "hopf/error.hpp"
#include "hopf/homogeneous.hpp"

namespace hopf {

namespace {

namespace fs = std::filesystem;

// ------------------------------------------------------------ json helpers

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

std::string at(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void require_object(const Json& j, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require_object(j, where);
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) bad(at(where, k), "unknown key");
  }
}

const Json* find(const Json& j, const std::string& key) {
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

double get_number(const Json& j, const std::string& key, const std::string& where, std::optional<double> def = {}) {
  const Json* v = find(j, key);
  if (!v) {
    if (def) return *def;
    bad(at(where, key), "missing required number");
  }
  if (!v->is_number()) bad(at(where, key), "expected a number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) bad(at(where, key), "expected a finite number");
  return d;
}

long long get_int(const Json& j, const std::string& key, const std::string& where, std::optional<long long> def = {}) {
  const Json* v = find(j, key);
  if (!v) {
    if (def) return *def;
    bad(at(where, key), "missing required integer");
  }
  if (!v->is_number_integer()) bad(at(where, key), "expected an integer");
  return v->get<long long>();
}

std::string get_string(const Json& j, const std::string& key, const std::string& where,
                       std::optional<std::string> def = {}) {
  const Json* v = find(j, key);
  if (!v) {
    if (def) return *def;
    bad(at(where, key), "missing required string");
  }
  if (!v->is_string()) bad(at(where, key), "expected a string");
  return v->get<std::string>();
}

bool get_bool(const Json& j, const std::string& key, const std::string& where, bool def) {
  const Json* v = find(j, key);
  if (!v) return def;
  if (!v->is_boolean()) bad(at(where, key), "expected true or false");
  return v->get<bool>();
}

std::vector<double> get_numbers(const Json& j, const std::string& key, const std::string& where) {
  const Json* v = find(j, key);
  if (!v) bad(at(where, key), "missing required array");
  if (!v->is_array()) bad(at(where, key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) bad(at(where, key) + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back((*v)[i].get<double>());
  }
  return out;
}

Json point_json(const Point& p) {
  Json j;
  j["component"] = p.component;
  j["coords"] = p.coords;
  return j;
}

Json series_json(const std::string& label, const std::vector<SeriesEntry>& e) {
  Json rows = Json::array();
  for (const auto& x : e) rows.push_back(Json::array({x.n, x.value, x.volume}));
  Json j;
  j["label"] = label;
  j["columns"] = Json::array({"n", "value", "volume"});
  j["rows"] = rows;
  return j;
}

Json classification_json(const Classification& c) {
  Json j;
  j["verdict"] = to_string(c.verdict);
  j["reason"] = c.reason;
  Json ev;
  for (const auto& [k, v] : c.evidence) ev[k] = v;
  j["evidence"] = ev;
  return j;
}

Json policy_json(const DecisionPolicy& p) {
  Json j;
  j["min_windows"] = p.min_windows;
  j["blowup_factor"] = p.blowup_factor;
  j["sat_tol"] = p.sat_tol;
  j["tail"] = p.tail;
  j["min_slope"] = p.min_slope;
  j["quorum"] = p.quorum;
  return j;
}

Json quadrature_json(const QuadratureSpec& q) {
  Json j;
  j["method"] = to_string(q.method);
  j["order"] = q.order;
  j["panel_width"] = q.panel_width;
  j["max_panels"] = q.max_panels;
  j["samples"] = q.samples;
  j["seed"] = q.seed;
  return j;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool auto_uses_monte_carlo(const GroupModel& g) {
  switch (g.kind()) {
    case GroupKind::EuclideanMotions2D: return true;
    case GroupKind::RealVector: return g.dim() >= 3;
    case GroupKind::Product: return auto_uses_monte_carlo(g.left()) || auto_uses_monte_carlo(g.right());
    default: return false;
  }
}

LineWeight parse_line_weight(const Json& p, const std::string& where) {
  const std::string w = get_string(p, "weights", where, "uniform");
  if (w == "uniform") return LineWeight::Uniform;
  if (w == "decaying") return LineWeight::Decaying;
  bad(at(where, "weights"), "expected 'uniform' or 'decaying', got '" + w + "'");
}

SubgroupKind parse_subgroup(const std::string& s, const std::string& where) {
  if (s == "trivial") return SubgroupKind::Trivial;
  if (s == "cyclic") return SubgroupKind::CyclicFactor;
  if (s == "SO2") return SubgroupKind::SO2;
  if (s == "line") return SubgroupKind::Line;
  bad(where, "unknown subgroup '" + s + "' (expected trivial, cyclic, SO2 or line)");
}

GroupModel need_group(const std::optional<GroupModel>& g, const std::string& where) {
  if (!g) bad(where, "this space needs the top-level 'group' key");
  return *g;
}

}  // namespace

// ------------------------------------------------------------------ groups

GroupModel parse_group_spec(const std::string& spec) {
  if (spec.empty()) throw ConfigError("group: empty group specification");
  std::vector<GroupModel> factors;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = spec.find('x', start);
    const std::string f = spec.substr(start, end == std::string::npos ? std::string::npos : end - start);
    static const std::regex lattice(R"(Z(\^([1-9]))?)"), real(R"(R(\^([1-9]))?)"), cyclic(R"(Z/([0-9]+))");
    std::smatch m;
    if (std::regex_match(f, m, lattice)) {
      factors.push_back(GroupModel::integer_lattice(m[2].matched ? std::stoi(m[2]) : 1));
    } else if (std::regex_match(f, m, real)) {
      factors.push_back(GroupModel::real_vector(m[2].matched ? std::stoi(m[2]) : 1));
    } else if (std::regex_match(f, m, cyclic)) {
      const long long n = std::stoll(m[1]);
      if (n < 2 || n > 1000000) throw ConfigError("group: cyclic order must lie in [2, 1000000], got '" + f + "'");
      factors.push_back(GroupModel::finite_cyclic(static_cast<int>(n)));
    } else if (f == "Aff") {
      factors.push_back(GroupModel::affine_line());
    } else if (f == "E2") {
      factors.push_back(GroupModel::euclidean_motions_2d());
    } else {
      throw ConfigError("group: unknown factor '" + f + "' in '" + spec +
                        "' (expected Z, Z^d, R, R^d, Z/n, Aff or E2 joined by 'x')");
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  GroupModel g = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) g = GroupModel::product(g, factors[i]);
  return g;
}

// ---------------------------------------------------------------- builders

SpaceModel build_space(const Json& spec, const std::optional<GroupModel>& group, const std::string& where) {
  check_keys(spec, {"name", "params"}, where);
  const std::string name = get_string(spec, "name", where);
  static const Json empty = Json::object();
  const Json* pp = find(spec, "params");
  const Json& p = pp ? *pp : empty;
  const std::string pw = at(where, "params");
  require_object(p, pw);
  try {
    if (name == "circle_rotation") {
      check_keys(p, {"alpha"}, pw);
      return circle_rotation(get_number(p, "alpha", pw, std::numbers::sqrt2 - 1.0));
    }
    if (name == "integer_translation") {
      check_keys(p, {"weights", "truncation"}, pw);
      return integer_translation(parse_line_weight(p, pw), static_cast<int>(get_int(p, "truncation", pw, 64)));
    }
    if (name == "real_translation") {
      check_keys(p, {"weights", "truncation"}, pw);
      return real_translation(parse_line_weight(p, pw), get_number(p, "truncation", pw, 32.0));
    }
    if (name == "translation_space") {
      check_keys(p, {"atoms", "truncation"}, pw);
      std::vector<double> atoms = find(p, "atoms") ? get_numbers(p, "atoms", pw) : std::vector<double>{1.0};
      return translation_space(atoms, need_group(group, at(where, "name")), get_number(p, "truncation", pw, 32.0));
    }
    if (name == "coset_space") {
      check_keys(p, {"subgroup", "truncation"}, pw);
      const GroupPair pair =
          make_group_pair(need_group(group, at(where, "name")),
                          parse_subgroup(get_string(p, "subgroup", pw), at(pw, "subgroup")));
      return coset_space(pair, get_number(p, "truncation", pw, 16.0));
    }
    if (name == "krengel_space") {
      check_keys(p, {"atoms", "truncation"}, pw);
      const Json* a = find(p, "atoms");
      if (!a || !a->is_array() || a->empty()) bad(at(pw, "atoms"), "expected a nonempty array of {weight, subgroup}");
      std::vector<KrengelAtom> atoms;
      for (std::size_t i = 0; i < a->size(); ++i) {
        const std::string aw = at(pw, "atoms") + "[" + std::to_string(i) + "]";
        check_keys((*a)[i], {"weight", "subgroup"}, aw);
        atoms.push_back({get_number((*a)[i], "weight", aw),
                         parse_subgroup(get_string((*a)[i], "subgroup", aw), at(aw, "subgroup"))});
      }
      return krengel_space(need_group(group, at(where, "name")), atoms, get_number(p, "truncation", pw, 16.0));
    }
    if (name == "cyclic_rotation") {
      check_keys(p, {"n", "weights"}, pw);
      std::vector<double> w = find(p, "weights") ? get_numbers(p, "weights", pw) : std::vector<double>{};
      return cyclic_rotation(static_cast<int>(get_int(p, "n", pw)), w);
    }
    if (name == "trivial_action") {
      check_keys(p, {"n"}, pw);
      return trivial_action_space(static_cast<int>(get_int(p, "n", pw)));
    }
    if (name == "disjoint_union") {
      check_keys(p, {"parts", "weights"}, pw);
      const Json* parts = find(p, "parts");
      if (!parts || !parts->is_array() || parts->empty()) bad(at(pw, "parts"), "expected a nonempty array of spaces");
      std::vector<SpaceModel> built;
      for (std::size_t i = 0; i < parts->size(); ++i)
        built.push_back(build_space((*parts)[i], group, at(pw, "parts") + "[" + std::to_string(i) + "]"));
      std::vector<double> w = find(p, "weights") ? get_numbers(p, "weights", pw) : std::vector<double>{};
      return disjoint_union(built, w);
    }
    if (name == "maharam") {
      check_keys(p, {"base", "t_truncation", "fiber"}, pw);
      const Json* b = find(p, "base");
      if (!b) bad(at(pw, "base"), "missing base space");
      const SpaceModel base = build_space(*b, group, at(pw, "base"));
      const double t = get_number(p, "t_truncation", pw, 20.0);
      const std::string fiber = get_string(p, "fiber", pw, "invariant");
      if (fiber == "invariant") return maharam_extend(base, t);
      if (fiber == "probability") return maharam_probability_space(base, t);
      bad(at(pw, "fiber"), "expected 'invariant' or 'probability'");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    bad(where, e.what());
  }
  bad(at(where, "name"), "unknown space '" + name + "'");
}

SetDescriptor build_set(const Json& spec, const std::string& where) {
  require_object(spec, where);
  const std::string type = get_string(spec, "type", where);
  if (type == "interval") {
    check_keys(spec, {"type", "lo", "hi", "component", "coord"}, where);
    const double lo = get_number(spec, "lo", where), hi = get_number(spec, "hi", where);
    if (!(lo < hi)) bad(at(where, "hi"), "must exceed lo");
    return interval_set(lo, hi, static_cast<int>(get_int(spec, "component", where, -1)),
                        static_cast<int>(get_int(spec, "coord", where, 0)));
  }
  if (type == "finite") {
    check_keys(spec, {"type", "values", "component", "coord"}, where);
    return finite_set(get_numbers(spec, "values", where), static_cast<int>(get_int(spec, "component", where, -1)),
                      static_cast<int>(get_int(spec, "coord", where, 0)));
  }
  if (type == "component") {
    check_keys(spec, {"type", "component"}, where);
    return component_set(static_cast<int>(get_int(spec, "component", where)));
  }
  if (type == "union" || type == "intersect") {
    check_keys(spec, {"type", "sets"}, where);
    const Json* s = find(spec, "sets");
    if (!s || !s->is_array() || s->size() < 2) bad(at(where, "sets"), "expected an array of at least two sets");
    SetDescriptor acc = build_set((*s)[0], at(where, "sets") + "[0]");
    for (std::size_t i = 1; i < s->size(); ++i) {
      const SetDescriptor b = build_set((*s)[i], at(where, "sets") + "[" + std::to_string(i) + "]");
      acc = type == "union" ? union_set(acc, b) : intersect_set(acc, b);
    }
    return acc;
  }
  bad(at(where, "type"), "unknown set type '" + type + "' (expected interval, finite, component, union, intersect)");
}

TestFunction build_test_function(const Json& spec, const std::string& where) {
  require_object(spec, where);
  const std::string family = get_string(spec, "family", where);
  if (family == "gaussian") {
    check_keys(spec, {"family", "sigma"}, where);
    const double s = get_number(spec, "sigma", where, 1.0);
    if (!(s > 0.0)) bad(at(where, "sigma"), "must be positive");
    return TestFunction::gaussian(s);
  }
  if (family == "exp_decay") {
    check_keys(spec, {"family", "base"}, where);
    const double b = get_number(spec, "base", where, 2.0);
    if (!(b > 1.0)) bad(at(where, "base"), "must exceed 1");
    return TestFunction::exp_decay(b);
  }
  if (family == "constant") {
    check_keys(spec, {"family"}, where);
    return TestFunction::constant();
  }
  if (family == "indicator") {
    check_keys(spec, {"family", "set"}, where);
    const Json* s = find(spec, "set");
    if (!s) bad(at(where, "set"), "missing set");
    return TestFunction::indicator(build_set(*s, at(where, "set")));
  }
  bad(at(where, "family"), "unknown test function family '" + family +
                               "' (expected gaussian, exp_decay, constant, indicator)");
}

QuadratureSpec build_quadrature(const Json& spec, const std::string& where) {
  check_keys(spec, {"method", "order", "panel_width", "max_panels", "samples"}, where);
  QuadratureSpec q;
  try {
    q.method = parse_quadrature_method(get_string(spec, "method", where, "auto"));
  } catch (const UnsupportedScheme& e) {
    bad(at(where, "method"), e.what());
  }
  if (q.method == QuadratureMethod::Exact) bad(at(where, "method"), "'exact' applies to discrete tasks only");
  q.order = static_cast<int>(get_int(spec, "order", where, 8));
  if (q.order < 1 || q.order > 64) bad(at(where, "order"), "must lie in [1, 64]");
  q.panel_width = get_number(spec, "panel_width", where, q.method == QuadratureMethod::Midpoint ? 1.0 / 32 : 0.5);
  if (!(q.panel_width > 0.0)) bad(at(where, "panel_width"), "must be positive");
  q.max_panels = static_cast<int>(get_int(spec, "max_panels", where, q.method == QuadratureMethod::Midpoint ? 1 << 24 : 1 << 16));
  if (q.max_panels < 1) bad(at(where, "max_panels"), "must be positive");
  const long long samples = get_int(spec, "samples", where, 4096);
  if (samples < 1) bad(at(where, "samples"), "must be positive");
  q.samples = static_cast<std::size_t>(samples);
  return q;
}

DecisionPolicy build_policy(const Json& spec, const std::string& where) {
  check_keys(spec, {"min_windows", "blowup_factor", "sat_tol", "tail", "min_slope", "quorum"}, where);
  DecisionPolicy p;
  p.min_windows = static_cast<int>(get_int(spec, "min_windows", where, p.min_windows));
  p.blowup_factor = get_number(spec, "blowup_factor", where, p.blowup_factor);
  p.sat_tol = get_number(spec, "sat_tol", where, p.sat_tol);
  p.tail = static_cast<int>(get_int(spec, "tail", where, p.tail));
  p.min_slope = get_number(spec, "min_slope", where, p.min_slope);
  p.quorum = get_number(spec, "quorum", where, p.quorum);
  try {
    validate(p);
  } catch (const ConfigError& e) {
    bad(where, e.what());
  }
  return p;
}

DiscreteSystem build_discrete(const Json& spec, const std::string& where, const std::string& base_dir) {
  require_object(spec, where);
  try {
    if (find(spec, "file")) {
      check_keys(spec, {"file"}, where);
      fs::path path = get_string(spec, "file", where);
      if (path.is_relative()) path = fs::path(base_dir) / path;
      return load_discrete_system(path.string());
    }
    if (find(spec, "text")) {
      check_keys(spec, {"text"}, where);
      return parse_discrete_system(get_string(spec, "text", where));
    }
    const std::string b = get_string(spec, "builder", where);
    if (b == "translation") {
      check_keys(spec, {"builder", "T", "C", "weights", "scale"}, where);
      const std::string w = get_string(spec, "weights", where, "uniform");
      if (w != "uniform" && w != "decaying") bad(at(where, "weights"), "expected 'uniform' or 'decaying'");
      return translation_system(static_cast<int>(get_int(spec, "T", where)), static_cast<int>(get_int(spec, "C", where)),
                                w == "uniform" ? PointWeights::Uniform : PointWeights::Decaying,
                                parse_rational(get_string(spec, "scale", where, "1")));
    }
    if (b == "rotation") {
      check_keys(spec, {"builder", "n", "weights"}, where);
      std::vector<Rational> w;
      if (const Json* ws = find(spec, "weights")) {
        if (!ws->is_array()) bad(at(where, "weights"), "expected an array of rational strings");
        for (std::size_t i = 0; i < ws->size(); ++i) {
          if (!(*ws)[i].is_string()) bad(at(where, "weights") + "[" + std::to_string(i) + "]", "expected a string 'n/d'");
          w.push_back(parse_rational((*ws)[i].get<std::string>()));
        }
      }
      return rotation_system(static_cast<int>(get_int(spec, "n", where)), w);
    }
    if (b == "trivial") {
      check_keys(spec, {"builder", "n"}, where);
      return trivial_system(static_cast<int>(get_int(spec, "n", where)));
    }
    if (b == "union") {
      check_keys(spec, {"builder", "parts"}, where);
      const Json* parts = find(spec, "parts");
      if (!parts || !parts->is_array() || parts->empty()) bad(at(where, "parts"), "expected a nonempty array");
      std::vector<DiscreteSystem> built;
      for (std::size_t i = 0; i < parts->size(); ++i)
        built.push_back(build_discrete((*parts)[i], at(where, "parts") + "[" + std::to_string(i) + "]", base_dir));
      return union_system(built);
    }
    bad(at(where, "builder"), "unknown builder '" + b + "' (expected translation, rotation, trivial, union)");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

// ------------------------------------------------------------------ runner

namespace {

const std::set<std::string> kSpaceTasks = {"transform", "return-volume", "classify", "poincare", "maharam", "lattice"};
const std::set<std::string> kDiscreteTasks = {"discrete-exact", "greedy-tmax", "hajian-ito"};

struct Context {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<GroupModel> group;
  std::optional<SpaceModel> space;
  std::optional<DiscreteSystem> discrete;
  QuadratureSpec quadrature;
  DecisionPolicy policy;
  int max_window = 10;
  std::string base_dir;
};

std::vector<Point> task_points(const Json& t, const Context& c, const std::string& where, std::uint64_t seed,
                               bool required = true) {
  std::vector<Point> pts;
  if (const Json* p = find(t, "point")) {
    if (find(t, "points") || find(t, "samples")) bad(where, "give only one of point, points, samples");
    Json arr = Json::array({*p});
    try {
      return task_points(Json{{"points", arr}}, c, where, seed);
    } catch (const ConfigError&) {
      bad(at(where, "point"), "expected coordinates of a point of " + c.space->name);
    }
  }
  if (const Json* p = find(t, "points")) {
    if (find(t, "samples")) bad(where, "give only one of points, samples");
    if (!p->is_array() || p->empty()) bad(at(where, "points"), "expected a nonempty array");
    for (std::size_t i = 0; i < p->size(); ++i) {
      const Json& e = (*p)[i];
      const std::string pw = at(where, "points") + "[" + std::to_string(i) + "]";
      Point x;
      if (e.is_array()) {
        x.coords = get_numbers(Json{{"coords", e}}, "coords", pw);
      } else if (e.is_object()) {
        check_keys(e, {"component", "coords"}, pw);
        x.component = static_cast<int>(get_int(e, "component", pw, 0));
        x.coords = get_numbers(e, "coords", pw);
      } else {
        bad(pw, "expected [coords...] or {component, coords}");
      }
      if (!c.space->contains(x)) bad(pw, to_string(x) + " is not a point of " + c.space->name);
      pts.push_back(x);
    }
    return pts;
  }
  if (find(t, "samples")) {
    const long long n = get_int(t, "samples", where);
    if (n < 1 || n > 100000) bad(at(where, "samples"), "must lie in [1, 100000]");
    for (const auto& wp : sample_points(*c.space, static_cast<std::size_t>(n), seed, 1)) pts.push_back(wp.point);
    return pts;
  }
  if (required) bad(where, "needs one of point, points, samples");
  return pts;
}

std::vector<int> labels_to_indices(const DiscreteSystem& ds, const Json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of point labels");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string()) bad(where + "[" + std::to_string(i) + "]", "expected a label string");
    try {
      out.push_back(ds.index_of(j[i].get<std::string>()));
    } catch (const DomainMismatch& e) {
      bad(where + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

Json label_json(const DiscreteSystem& ds, const std::vector<int>& pts) {
  Json a = Json::array();
  for (int p : pts) a.push_back(ds.labels[p]);
  return a;
}

Json word_json(const Word& w) { return Json(w); }

int max_window_of(const Json& t, const Context& c, const std::string& where) {
  const long long m = get_int(t, "max_window", where, c.max_window);
  if (m < 3 || m > 24) bad(at(where, "max_window"), "must lie in [3, 24]");
  return static_cast<int>(m);
}

Json gaussian_location(const GroupModel& g, const GroupElement& e, double sigma, double& out) {
  std::vector<double> loc;
  switch (g.kind()) {
    case GroupKind::EuclideanMotions2D: {
      const auto c = coordinates(g, e);
      loc = {c[1], c[2]};
      break;
    }
    case GroupKind::AffineLine: {
      const auto& a = e.as_affine();
      loc = {std::log(a.a), a.b};
      break;
    }
    case GroupKind::Product: {
      double l = 0.0, r = 0.0;
      gaussian_location(g.left(), e.first(), sigma, l);
      gaussian_location(g.right(), e.second(), sigma, r);
      out = l * r;
      return {};
    }
    case GroupKind::FiniteCyclic: out = 1.0; return {};
    default: loc = coordinates(g, e);
  }
  double r2 = 0.0;
  for (double v : loc) r2 += v * v;
  out = std::exp(-r2 / (2.0 * sigma * sigma));
  return {};
}

// Runs one task; returns the task record. Throws on config problems (before
// any work happens) and on module errors (wrapped by the caller).
Json run_task(const Json& t, std::size_t index, const Context& c, bool dry) {
  const std::string where = "tasks[" + std::to_string(index) + "]";
  const std::string type = get_string(t, "type", where);
  const std::string id = get_string(t, "id", where, "task" + std::to_string(index));
  Json rec;
  rec["id"] = id;
  rec["type"] = type;

  const std::uint64_t task_seed = c.seed ? mix_seed(*c.seed, index) : 0;
  QuadratureSpec q = c.quadrature;
  if (const Json* qq = find(t, "quadrature")) q = build_quadrature(*qq, at(where, "quadrature"));
  q.seed = c.seed ? mix_seed(*c.seed, 0x9000 + index) : q.seed;
  DecisionPolicy policy = c.policy;
  if (const Json* pp = find(t, "policy")) policy = build_policy(*pp, at(where, "policy"));

  if (kSpaceTasks.count(type) && !c.space) bad(where, "task type '" + type + "' needs the top-level 'space' key");
  if (kDiscreteTasks.count(type) && !c.discrete)
    bad(where, "task type '" + type + "' needs the top-level 'discrete' key");

  const bool samples = find(t, "samples") != nullptr;
  const bool mc = q.method == QuadratureMethod::MonteCarlo ||
                  (q.method == QuadratureMethod::Auto && c.space && auto_uses_monte_carlo(c.space->group));
  if ((samples || type == "poincare" || (mc && kSpaceTasks.count(type))) && !c.seed)
    bad("seed", "required because " + where + " (" + type + ") uses Monte Carlo or sampling");

  auto common_keys = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> keys = {"id", "type", "quadrature", "policy", "max_window"};
    keys.insert(keys.end(), extra.begin(), extra.end());
    for (const auto& [k, v] : t.items())
      if (std::find_if(keys.begin(), keys.end(), [&](const char* a) { return k == a; }) == keys.end())
        bad(at(where, k), "unknown key for task type '" + type + "'");
  };

  std::size_t undecided = 0;
  if (type == "transform" || type == "classify") {
    common_keys({"f", "point", "points", "samples", "mode", "set"});
    const std::string mode = get_string(t, "mode", where, "point");
    const int mw = max_window_of(t, c, where);
    if (type == "classify" && mode == "set") {
      const Json* s = find(t, "set");
      if (!s) bad(at(where, "set"), "set mode needs a set");
      const SetDescriptor a = build_set(*s, at(where, "set"));
      const auto pts = task_points(t, c, where, task_seed);
      if (dry) return rec;
      const SetClassification sc = classify_set(*c.space, a, pts, mw, policy, q);
      Json per = Json::array();
      for (const auto& pv : sc.points) {
        Json j;
        j["point"] = point_json(pv.point);
        j["in_set"] = pv.in_set;
        j["volume"] = classification_json(pv.volume);
        j["unbounded"] = pv.unbounded;
        j["bounded"] = pv.bounded;
        per.push_back(j);
      }
      rec["set"] = a.name;
      rec["points"] = per;
      rec["flags"] = {{"recurrent", sc.recurrent},
                      {"haar_recurrent", sc.haar_recurrent},
                      {"transient", sc.transient},
                      {"haar_transient", sc.haar_transient}};
      rec["verdict"] = to_string(sc.verdict);
      rec["summary"] = sc.summary();
      undecided = sc.verdict == SetVerdict::Undecided;
    } else {
      if (mode != "point") bad(at(where, "mode"), "expected 'point' or 'set'");
      if (find(t, "set")) bad(at(where, "set"), "only allowed with mode 'set'");
      const Json* fj = find(t, "f");
      const TestFunction f = fj ? build_test_function(*fj, at(where, "f")) : TestFunction::constant();
      const auto pts = task_points(t, c, where, task_seed);
      if (dry) return rec;
      rec["f"] = f.describe();
      Json per = Json::array(), series = Json::array();
      std::map<std::string, int> counts{{"Conservative", 0}, {"Dissipative", 0}, {"Undecided", 0}};
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const HopfSeries hs = hopf_transform(*c.space, f, pts[i], mw, q);
        Json j;
        j["point"] = point_json(pts[i]);
        j["slope"] = hs.slope_diagnostic;
        j["saturation"] = hs.saturation_diagnostic;
        j["limit_estimate"] = hs.entries.back().value;
        if (type == "classify") {
          const Classification cl = classify_point(hs, policy);
          j["classification"] = classification_json(cl);
          ++counts[to_string(cl.verdict)];
        }
        per.push_back(j);
        series.push_back(series_json("point" + std::to_string(i), hs.entries));
      }
      rec["points"] = per;
      rec["series"] = series;
      if (type == "classify") {
        rec["counts"] = counts;
        const int n = static_cast<int>(pts.size());
        rec["verdict"] = counts["Conservative"] == n  ? "Conservative"
                         : counts["Dissipative"] == n ? "Dissipative"
                         : counts["Undecided"] == n   ? "Undecided"
                                                      : "Mixed";
        undecided = static_cast<std::size_t>(counts["Undecided"]);
      }
    }
  } else if (type == "return-volume") {
    common_keys({"set", "point", "points", "samples"});
    const Json* s = find(t, "set");
    if (!s) bad(at(where, "set"), "missing set");
    const SetDescriptor a = build_set(*s, at(where, "set"));
    const int mw = max_window_of(t, c, where);
    const auto pts = task_points(t, c, where, task_seed);
    if (dry) return rec;
    rec["set"] = a.name;
    Json per = Json::array(), series = Json::array();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const ReturnVolumeSeries rv = return_volume(*c.space, a, pts[i], mw, q);
      Json j;
      j["point"] = point_json(pts[i]);
      j["volume"] = rv.entries.back().value;
      j["slope"] = rv.slope_diagnostic;
      j["saturation"] = rv.saturation_diagnostic;
      per.push_back(j);
      series.push_back(series_json("point" + std::to_string(i), rv.entries));
    }
    rec["points"] = per;
    rec["series"] = series;
  } else if (type == "poincare") {
    common_keys({"set", "overlap_samples", "alpha"});
    const Json* s = find(t, "set");
    if (!s) bad(at(where, "set"), "missing set");
    const SetDescriptor a = build_set(*s, at(where, "set"));
    const long long n = get_int(t, "overlap_samples", where, 256);
    if (n < 16 || n > 1000000) bad(at(where, "overlap_samples"), "must lie in [16, 1000000]");
    const double alpha = get_number(t, "alpha", where, 1e-4);
    if (!(alpha > 0.0 && alpha < 1.0)) bad(at(where, "alpha"), "must lie in (0, 1)");
    const int mw = max_window_of(t, c, where);
    if (dry) return rec;
    const PoincareResult r = poincare_test(*c.space, a, mw, static_cast<std::size_t>(n), task_seed, policy, q, alpha);
    rec["set"] = a.name;
    rec["mass_estimate"] = r.mass_estimate;
    rec["accepted_samples"] = r.accepted_samples;
    rec["zero_overlap_bound"] = r.zero_overlap_bound;
    rec["fubini_residual"] = r.fubini_residual;
    rec["classification"] = classification_json(r.classification);
    rec["verdict"] = r.poincare_recurrent ? "PoincareRecurrent"
                     : r.classification.verdict == Verdict::Dissipative ? "NotPoincareRecurrent"
                                                                         : "Undecided";
    rec["series"] = Json::array({series_json("positive_volume", r.positive_volume),
                                 series_json("overlap_integral", r.overlap_integral),
                                 series_json("fubini_integral", r.fubini_integral)});
    undecided = r.classification.verdict == Verdict::Undecided;
  } else if (type == "maharam") {
    common_keys({"f", "point", "r_grid"});
    const Json* fj = find(t, "f");
    const TestFunction f = fj ? build_test_function(*fj, at(where, "f")) : TestFunction::constant();
    std::vector<double> grid = find(t, "r_grid") ? get_numbers(t, "r_grid", where) : default_r_grid();
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (!(grid[i] > 0.0)) bad(at(where, "r_grid") + "[" + std::to_string(i) + "]", "must be positive");
    const int mw = max_window_of(t, c, where);
    const auto pts = task_points(t, c, where, task_seed);
    if (pts.size() != 1) bad(at(where, "point"), "maharam task takes exactly one point");
    if (dry) return rec;
    const MaharamCriterion m = maharam_criterion(*c.space, f, pts[0], grid, mw, policy, q);
    rec["f"] = f.describe();
    rec["point"] = point_json(pts[0]);
    Json levels = Json::array(), series = Json::array();
    for (std::size_t i = 0; i < m.levels.size(); ++i) {
      levels.push_back({{"r", m.levels[i].r}, {"verdict", to_string(m.level_verdicts[i].verdict)}});
      series.push_back(series_json("r=" + fmt17(m.levels[i].r), m.levels[i].entries));
    }
    rec["levels"] = levels;
    rec["verdict"] = to_string(m.verdict);
    rec["series"] = series;
    undecided = m.verdict == Verdict::Undecided;
  } else if (type == "lattice") {
    common_keys({"f", "point", "points", "samples", "basis"});
    const Json* fj = find(t, "f");
    const TestFunction f = fj ? build_test_function(*fj, at(where, "f")) : TestFunction::gaussian(1.0);
    if (c.space->group.kind() != GroupKind::RealVector) bad(where, "lattice task needs a space over R^d");
    LatticeData lat = LatticeData::standard(c.space->group.dim());
    if (const Json* b = find(t, "basis")) {
      std::vector<std::vector<std::int64_t>> rows;
      if (!b->is_array()) bad(at(where, "basis"), "expected an array of integer rows");
      for (std::size_t i = 0; i < b->size(); ++i) {
        const std::string bw = at(where, "basis") + "[" + std::to_string(i) + "]";
        if (!(*b)[i].is_array()) bad(bw, "expected an integer row");
        std::vector<std::int64_t> row;
        for (const auto& v : (*b)[i]) {
          if (!v.is_number_integer()) bad(bw, "expected integers");
          row.push_back(v.get<std::int64_t>());
        }
        rows.push_back(row);
      }
      try {
        lat = LatticeData::with_basis(rows);
      } catch (const Error& e) {
        bad(at(where, "basis"), e.what());
      }
    }
    const long long mw = get_int(t, "max_window", where, 6);
    if (mw < 0 || mw > 16) bad(at(where, "max_window"), "must lie in [0, 16]");
    const auto pts = task_points(t, c, where, task_seed);
    if (dry) return rec;
    Json per = Json::array(), series = Json::array();
    double worst = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const LatticeReduction lr = lattice_reduce(*c.space, lat, f, pts[i], static_cast<int>(mw), q);
      per.push_back({{"point", point_json(pts[i])}, {"residual", lr.residual}});
      worst = std::max(worst, lr.residual);
      series.push_back(series_json("lattice" + std::to_string(i), lr.lattice_series));
      series.push_back(series_json("continuous" + std::to_string(i), lr.continuous_series));
    }
    rec["f"] = f.describe();
    rec["points"] = per;
    rec["max_residual"] = worst;
    rec["series"] = series;
  } else if (type == "weil") {
    common_keys({"subgroup", "sigma", "radius", "exact"});
    if (!c.group) bad(where, "weil task needs the top-level 'group' key");
    GroupPair pair;
    try {
      pair = make_group_pair(*c.group, parse_subgroup(get_string(t, "subgroup", where), at(where, "subgroup")));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      bad(at(where, "subgroup"), e.what());
    }
    const double sigma = get_number(t, "sigma", where, 1.0);
    if (!(sigma > 0.0)) bad(at(where, "sigma"), "must be positive");
    const double radius = get_number(t, "radius", where, 8.0);
    if (!(radius > 0.0)) bad(at(where, "radius"), "must be positive");
    const bool exact = get_bool(t, "exact", where, false);
    if (exact && !c.group->discrete()) bad(at(where, "exact"), "exact Weil check needs a discrete group");
    if (dry) return rec;
    rec["pair"] = pair.name();
    const GroupModel g = *c.group;
    if (pair.compact()) {
      const Window w = ball_window(g, radius);
      if (exact) {
        const ExactWeilResult r = weil_verify_exact(
            pair,
            [&](const GroupElement& e) {
              Rational v = 1;
              for (double x : coordinates(g, e)) v /= Rational(1 + static_cast<long long>(x * x));
              return v;
            },
            w);
        rec["lhs"] = to_string(r.lhs);
        rec["rhs"] = to_string(r.rhs);
        rec["equal"] = r.equal;
      } else {
        const WeilResult r = weil_verify(
            pair,
            [&](const GroupElement& e) {
              double v = 0.0;
              gaussian_location(g, e, sigma, v);
              return v;
            },
            w, q);
        rec["lhs"] = r.lhs;
        rec["rhs"] = r.rhs;
        rec["residual"] = r.residual;
      }
    }
    const CompactnessResult cr = compactness_integral(pair, max_window_of(t, c, where), q);
    rec["compactness"] = {{"verdict", cr.verdict}, {"finite", cr.finite}, {"value", cr.value}};
    if (!cr.finite) {
      std::vector<SeriesEntry> e;
      for (std::size_t i = 0; i < cr.window_values.size(); ++i)
        e.push_back({static_cast<int>(i), cr.window_values[i], cr.radii[i]});
      rec["series"] = Json::array({series_json("compactness", e)});
    }
    rec["verdict"] = cr.verdict;
    undecided = cr.verdict == "undecided";
  } else if (type == "discrete-exact") {
    common_keys({"returns", "transversal", "k"});
    const DiscreteSystem& ds = *c.discrete;
    const long long k = get_int(t, "k", where, 4);
    if (k < 1 || k > 64) bad(at(where, "k"), "must lie in [1, 64]");
    std::vector<std::pair<std::vector<int>, int>> queries;
    if (const Json* r = find(t, "returns")) {
      if (!r->is_array()) bad(at(where, "returns"), "expected an array of {set, point}");
      for (std::size_t i = 0; i < r->size(); ++i) {
        const std::string rw = at(where, "returns") + "[" + std::to_string(i) + "]";
        check_keys((*r)[i], {"set", "point"}, rw);
        const Json* s = find((*r)[i], "set");
        if (!s) bad(at(rw, "set"), "missing set");
        const auto a = labels_to_indices(ds, *s, at(rw, "set"));
        const auto x = labels_to_indices(ds, Json::array({get_string((*r)[i], "point", rw)}), at(rw, "point"));
        queries.push_back({a, x[0]});
      }
    }
    const bool transversal = get_bool(t, "transversal", where, false);
    if (dry) return rec;
    const ExactPartition p = hopf_decompose_exact(ds, static_cast<int>(k));
    rec["system"] = ds.group_name();
    rec["conservative"] = label_json(ds, p.conservative);
    rec["dissipative"] = label_json(ds, p.dissipative);
    Json wit = Json::object();
    for (const auto& [base, set] : p.witness) wit[ds.labels[base]] = label_json(ds, set);
    rec["witnesses"] = wit;
    Json orbits = Json::array();
    for (const auto& o : certify_orbits(ds)) {
      Json rows = Json::array();
      for (const auto& row : o.stabilizer.rows) rows.push_back(word_json(row));
      orbits.push_back({{"base", ds.labels[o.base]},
                        {"certificate", o.certificate},
                        {"closed", o.closed},
                        {"stabilizer", o.infinite_stabilizer ? std::string("infinite") : o.stabilizer_order.str()},
                        {"lattice", rows}});
    }
    rec["orbits"] = orbits;
    Json ret = Json::array();
    for (const auto& [a, x] : queries) {
      const ExactReturnSet r = returns_set_exact(ds, a, x);
      Json words = Json::array(), res = Json::array();
      for (const auto& w : r.words) words.push_back(word_json(w));
      for (const auto& w : r.residues) res.push_back(word_json(w));
      ret.push_back({{"set", label_json(ds, a)}, {"point", ds.labels[x]}, {"status", to_string(r.status)},
                     {"words", words}, {"residues", res}});
    }
    if (!queries.empty()) rec["returns"] = ret;
    if (transversal) {
      const Transversal tr = orbit_transversal(ds);
      Json r = Json::object();
      for (const auto& [x, w] : tr.r) r[ds.labels[x]] = word_json(w);
      rec["transversal"] = {{"points", label_json(ds, tr.points)},
                            {"r", r},
                            {"law_violations", transversal_law_violations(ds, tr)}};
    }
    rec["verdict"] = p.dissipative.empty() ? "Conservative" : p.conservative.empty() ? "Dissipative" : "Split";
  } else if (type == "greedy-tmax") {
    common_keys({"k"});
    const long long k = get_int(t, "k", where, 4);
    if (k < 1 || k > 64) bad(at(where, "k"), "must lie in [1, 64]");
    if (dry) return rec;
    const DiscreteSystem& ds = *c.discrete;
    const GreedyResult g = greedy_max_transient(ds, static_cast<int>(k));
    Json steps = Json::array();
    for (const auto& s : g.steps)
      steps.push_back({{"alpha", to_string(s.alpha)}, {"chosen", label_json(ds, s.chosen)}, {"mass", to_string(s.mass)}});
    rec["steps"] = steps;
    rec["t_max"] = label_json(ds, g.t_max);
    const WanderingReport wr = wandering_tests(ds, g.t_max);
    rec["t_max_transient"] = wr.is_transient;
  } else if (type == "hajian-ito") {
    common_keys({"sets"});
    const DiscreteSystem& ds = *c.discrete;
    std::vector<std::vector<int>> sets;
    if (const Json* s = find(t, "sets")) {
      if (!s->is_array()) bad(at(where, "sets"), "expected an array of label arrays");
      for (std::size_t i = 0; i < s->size(); ++i)
        sets.push_back(labels_to_indices(ds, (*s)[i], at(where, "sets") + "[" + std::to_string(i) + "]"));
    }
    if (dry) return rec;
    const InvariantMeasureReport m = invariant_measure_search(ds);
    rec["p1"] = label_json(ds, m.p1);
    rec["p_inf"] = label_json(ds, m.p_inf);
    rec["n"] = label_json(ds, m.n_part);
    rec["n_status"] = m.n_witnessed ? "witnessed" : "not witnessed";
    Json acim = Json::object(), acip = Json::object(), wit = Json::object();
    for (const auto& [x, v] : m.acim) acim[ds.labels[x]] = to_string(v);
    rec["acim"] = acim;
    if (m.acip) {
      for (const auto& [x, v] : *m.acip) acip[ds.labels[x]] = to_string(v);
      rec["acip"] = acip;
    } else {
      rec["acip"] = nullptr;
    }
    for (const auto& [b, w] : m.no_acip_witness)
      wit[ds.labels[b]] = {{"set", Json::array({ds.labels[b]})}, {"S", w.describe()}};
    rec["no_acip_witness"] = wit;
    Json tests = Json::array();
    for (const auto& s : sets) {
      const WanderingReport wr = wandering_tests(ds, s);
      tests.push_back({{"set", label_json(ds, s)},
                       {"degenerate", wr.degenerate},
                       {"transient", wr.is_transient},
                       {"wandering", wr.is_wandering},
                       {"weakly_wandering", wr.is_weakly_wandering},
                       {"S", wr.witness ? Json(wr.witness->describe()) : Json(nullptr)}});
    }
    if (!sets.empty()) rec["wandering_tests"] = tests;
  } else {
    bad(at(where, "type"), "unknown task type '" + type +
                               "' (expected transform, return-volume, classify, poincare, maharam, lattice, "
                               "weil, discrete-exact, greedy-tmax, hajian-ito)");
  }
  rec["undecided"] = undecided;
  return rec;
}

Context build_context(const Json& cfg, const RunOptions& opt) {
  check_keys(cfg, {"scenario", "seed", "strict", "group", "space", "discrete", "windows", "quadrature", "policy",
                   "output", "tasks"},
             "");
  Context c;
  c.base_dir = opt.base_dir;
  c.scenario = get_string(cfg, "scenario", "");
  if (c.scenario.empty()) bad("scenario", "must be nonempty");
  if (const Json* s = find(cfg, "seed")) {
    if (!s->is_number_unsigned() && !(s->is_number_integer() && s->get<long long>() >= 0))
      bad("seed", "expected a nonnegative integer");
    c.seed = s->get<std::uint64_t>();
  }
  if (opt.seed_override) c.seed = opt.seed_override;
  get_bool(cfg, "strict", "", false);
  if (const Json* g = find(cfg, "group")) {
    if (!g->is_string()) bad("group", "expected a string such as \"Z\", \"R^2\", \"E2\" or \"ZxZ/2\"");
    c.group = parse_group_spec(g->get<std::string>());
  }
  if (const Json* s = find(cfg, "space")) c.space = build_space(*s, c.group, "space");
  if (const Json* d = find(cfg, "discrete")) c.discrete = build_discrete(*d, "discrete", opt.base_dir);
  if (const Json* w = find(cfg, "windows")) {
    check_keys(*w, {"max"}, "windows");
    const long long m = get_int(*w, "max", "windows", 10);
    if (m < 3 || m > 24) bad("windows.max", "must lie in [3, 24]");
    c.max_window = static_cast<int>(m);
  }
  if (const Json* q = find(cfg, "quadrature")) c.quadrature = build_quadrature(*q, "quadrature");
  if (const Json* p = find(cfg, "policy")) c.policy = build_policy(*p, "policy");
  if (const Json* o = find(cfg, "output")) {
    check_keys(*o, {"dir", "report"}, "output");
    get_string(*o, "dir", "output", "");
    const std::string r = get_string(*o, "report", "output", "report.json");
    if (r.empty() || r.find('/') != std::string::npos) bad("output.report", "must be a plain file name");
  }
  const Json* tasks = find(cfg, "tasks");
  if (!tasks) bad("tasks", "missing required task list");
  if (!tasks->is_array()) bad("tasks", "expected an array");
  std::set<std::string> ids;
  static const std::regex id_re("[A-Za-z0-9_.-]+");
  for (std::size_t i = 0; i < tasks->size(); ++i) {
    const std::string where = "tasks[" + std::to_string(i) + "]";
    require_object((*tasks)[i], where);
    const std::string id = get_string((*tasks)[i], "id", where, "task" + std::to_string(i));
    if (!std::regex_match(id, id_re)) bad(at(where, "id"), "must match [A-Za-z0-9_.-]+");
    if (!ids.insert(id).second) bad(at(where, "id"), "duplicate task id '" + id + "'");
  }
  return c;
}

}  // namespace

void validate_config(const Json& config) {
  const Context c = build_context(config, RunOptions{});
  const Json& tasks = config.at("tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) run_task(tasks[i], i, c, true);
}

RunOutcome run_scenario(const Json& config, const RunOptions& options, bool write_files) {
  const Context c = build_context(config, options);
  const Json& tasks = config.at("tasks");
  for (std::size_t i = 0; i < tasks.size(); ++i) run_task(tasks[i], i, c, true);

  RunOutcome out;
  const bool strict = options.strict || get_bool(config, "strict", "", false);
  std::string dir = "out";
  if (const char* env = std::getenv("HOPF_OUT_DIR"); env && *env) dir = env;
  std::string report_name = "report.json";
  if (const Json* o = find(config, "output")) {
    if (const Json* d = find(*o, "dir"); d && !d->get<std::string>().empty()) {
      fs::path p = d->get<std::string>();
      dir = p.is_relative() ? (fs::path(options.base_dir) / p).string() : p.string();
    }
    report_name = get_string(*o, "report", "output", "report.json");
  }
  if (options.out_dir) dir = *options.out_dir;
  out.out_dir = dir;

  Json report;
  report["scenario"] = c.scenario;
  Json prov;
  prov["seed"] = c.seed ? Json(*c.seed) : Json(nullptr);
  prov["strict"] = strict;
  prov["group"] = c.group ? Json(c.group->name()) : Json(nullptr);
  if (c.space) {
    Json meta = Json::object();
    for (const auto& [k, v] : c.space->metadata) meta[k] = v;
    prov["space"] = {{"name", c.space->name},
                     {"group", c.space->group.name()},
                     {"domain", to_string(c.space->domain)},
                     {"truncation", c.space->truncation},
                     {"truncation_mass", c.space->truncation_mass},
                     {"metadata", meta}};
  } else {
    prov["space"] = nullptr;
  }
  prov["discrete"] = c.discrete ? Json(c.discrete->group_name() + " on " + std::to_string(c.discrete->size()) +
                                       " points, exact_radius " + std::to_string(c.discrete->exact_radius))
                                : Json(nullptr);
  prov["windows"] = {{"max", c.max_window}, {"radius", "2^n"}};
  prov["quadrature"] = quadrature_json(c.quadrature);
  prov["policy"] = policy_json(c.policy);
  Json schedule = Json::array();
  for (std::size_t i = 0; i < tasks.size(); ++i)
    schedule.push_back(get_string(tasks[i], "id", "", "task" + std::to_string(i)));
  prov["schedule"] = schedule;
  report["provenance"] = prov;

  Json records = Json::array();
  Json timing = Json::object();
  std::size_t undecided = 0, errors = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Json rec;
    try {
      rec = run_task(tasks[i], i, c, false);
      rec["status"] = "ok";
      undecided += rec["undecided"].get<std::size_t>();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      rec = Json::object();
      rec["id"] = get_string(tasks[i], "id", "", "task" + std::to_string(i));
      rec["type"] = tasks[i].value("type", "");
      rec["status"] = "error";
      rec["error"] = TaskError(e.what()).what();
      ++errors;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    timing[rec["id"].get<std::string>()] = secs;
    records.push_back(rec);
  }
  report["tasks"] = records;
  report["summary"] = {{"tasks", tasks.size()}, {"undecided", undecided}, {"errors", errors}};
  out.report = report;
  out.timing = {{"scenario", c.scenario}, {"seconds", timing}};
  out.exit_code = errors ? 1 : (strict && undecided ? 2 : 0);

  if (write_files) {
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
      const fs::path p = fs::path(dir) / name;
      std::ofstream f(p, std::ios::binary);
      if (!f) throw ConfigError("output.dir: cannot write '" + p.string() + "'");
      f << text;
      out.files.push_back(p.string());
    };
    write(report_name, report.dump(2) + "\n");
    for (const auto& rec : records)
      if (rec.contains("series")) {
        const std::string id = rec["id"].get<std::string>();
        write(id + ".series.csv", emit_series(report, id));
      }
    write("timing.json", out.timing.dump(2) + "\n");
  }
  return out;
}

std::string emit_series(const Json& report, const std::string& task_id) {
  if (!report.is_object() || !report.contains("tasks") || !report["tasks"].is_array())
    throw NoSuchTask("report has no task list");
  for (const auto& rec : report["tasks"]) {
    if (!rec.contains("id") || rec["id"] != task_id) continue;
    if (!rec.contains("series")) throw TaskError("task '" + task_id + "' produced no series");
    std::ostringstream os;
    os << "# scenario=" << report.value("scenario", "") << " task=" << task_id
       << " type=" << rec.value("type", "") << " verdict=" << rec.value("verdict", "none") << '\n';
    os << "series,n,value\n";
    for (const auto& s : rec["series"]) {
      std::vector<Json> rows(s["rows"].begin(), s["rows"].end());
      std::stable_sort(rows.begin(), rows.end(),
                       [](const Json& a, const Json& b) { return a[0].get<long long>() < b[0].get<long long>(); });
      for (const auto& r : rows)
        os << s["label"].get<std::string>() << ',' << r[0].get<long long>() << ',' << fmt17(r[1].get<double>())
           << '\n';
    }
    return os.str();
  }
  throw NoSuchTask("no task with id '" + task_id + "'");
}

std::vector<std::string> catalog_lines() {
  std::vector<std::string> out;
  out.push_back("groups:");
  out.push_back("  Z, Z^d          integer lattice, L1 word-length balls");
  out.push_back("  R, R^d          real vector group, Euclidean balls");
  out.push_back("  Z/n             finite cyclic group (compact)");
  out.push_back("  Aff             ax+b group, non-unimodular, modular function 1/a");
  out.push_back("  E2              Euclidean motions of the plane");
  out.push_back("  GxH             products of the above, max metric");
  out.push_back("spaces:");
  for (const auto& [name, desc] : space_catalog()) out.push_back("  " + name + std::string(22 - std::min<std::size_t>(21, name.size()), ' ') + desc);
  out.push_back("pairs:");
  for (const auto& p : catalog_pairs())
    out.push_back("  " + p.name() + (p.compact() ? "  (compact subgroup)" : "  (non-compact subgroup)"));
  out.push_back("tasks:");
  out.push_back("  transform, return-volume, classify, poincare, maharam, lattice, weil,");
  out.push_back("  discrete-exact, greedy-tmax, hajian-ito");
  out.push_back("discrete builders:");
  out.push_back("  translation {T, C, weights, scale}, rotation {n, weights}, trivial {n}, union {parts}, file, text");
  return out;
}

}  // namespace hopf
