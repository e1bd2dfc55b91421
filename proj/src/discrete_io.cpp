// Text format for discrete systems:
//
//   hopf-discrete-system 1
//   group Z Z/2
//   points 3
//   point <label> <num>/<den>
//   action <generator> <from> <to>
//   core <label> ...
//   exact_radius <R>
//   end
//
// Blank lines and lines starting with '#' are ignored on input.
#include <algorithm>
#include <fstream>
#include <sstream>

#include "hopf/discrete.hpp"
#include "hopf/error.hpp"

namespace hopf {

std::string serialize(const DiscreteSystem& ds) {
  validate(ds);
  std::ostringstream os;
  os << "hopf-discrete-system 1\n";
  os << "group";
  for (auto n : ds.factors) os << ' ' << (n == 0 ? std::string("Z") : "Z/" + std::to_string(n));
  os << "\npoints " << ds.size() << '\n';
  for (int x = 0; x < ds.size(); ++x) os << "point " << ds.labels[x] << ' ' << to_string(ds.weights[x]) << '\n';
  for (int j = 0; j < ds.generators(); ++j)
    for (int x = 0; x < ds.size(); ++x)
      if (ds.action[j][x] >= 0) os << "action " << j << ' ' << ds.labels[x] << ' ' << ds.labels[ds.action[j][x]] << '\n';
  os << "core";
  for (int c : ds.core) os << ' ' << ds.labels[c];
  os << "\nexact_radius " << ds.exact_radius << "\nend\n";
  return os.str();
}

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ParseError("line " + std::to_string(line) + ": " + msg);
}

long long parse_int(const std::string& s, int line, const std::string& what) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    fail(line, "expected integer " + what + ", got '" + s + "'");
  }
  if (used != s.size()) fail(line, "expected integer " + what + ", got '" + s + "'");
  return v;
}

}  // namespace

DiscreteSystem parse_discrete_system(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  enum { Header, Group, Points, Body, Done } state = Header;
  DiscreteSystem ds;
  long long declared = -1;
  bool have_core = false, have_radius = false;
  std::map<std::string, int> index;
  auto lookup = [&](const std::string& l, int ln) {
    auto it = index.find(l);
    if (it == index.end()) fail(ln, "unknown point label '" + l + "'");
    return it->second;
  };
  while (std::getline(in, raw)) {
    ++line;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    std::istringstream ls(raw);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (state == Done) fail(line, "content after 'end'");
    const std::string& key = tok[0];
    if (state == Header) {
      if (tok.size() != 2 || key != "hopf-discrete-system") fail(line, "expected 'hopf-discrete-system 1'");
      if (tok[1] != "1") fail(line, "unsupported format version '" + tok[1] + "'");
      state = Group;
    } else if (state == Group) {
      if (key != "group" || tok.size() < 2) fail(line, "expected 'group' with at least one factor");
      for (std::size_t i = 1; i < tok.size(); ++i) {
        if (tok[i] == "Z") {
          ds.factors.push_back(0);
        } else if (tok[i].rfind("Z/", 0) == 0) {
          const long long n = parse_int(tok[i].substr(2), line, "cyclic order");
          if (n < 2) fail(line, "cyclic order must be >= 2");
          ds.factors.push_back(n);
        } else {
          fail(line, "unknown group factor '" + tok[i] + "'");
        }
      }
      ds.action.assign(ds.factors.size(), {});
      state = Points;
    } else if (state == Points) {
      if (key != "points" || tok.size() != 2) fail(line, "expected 'points <count>'");
      declared = parse_int(tok[1], line, "point count");
      if (declared < 1) fail(line, "point count must be positive");
      state = Body;
    } else if (key == "point") {
      if (tok.size() != 3) fail(line, "expected 'point <label> <weight>'");
      if (static_cast<long long>(ds.labels.size()) >= declared) fail(line, "more points than declared");
      if (!index.emplace(tok[1], ds.size()).second) fail(line, "duplicate label '" + tok[1] + "'");
      ds.labels.push_back(tok[1]);
      try {
        ds.weights.push_back(parse_rational(tok[2]));
      } catch (const ParseError& e) {
        fail(line, e.what());
      }
      for (auto& a : ds.action) a.push_back(-1);
    } else if (key == "action") {
      if (tok.size() != 4) fail(line, "expected 'action <generator> <from> <to>'");
      const long long j = parse_int(tok[1], line, "generator");
      if (j < 0 || j >= ds.generators()) fail(line, "generator index out of range");
      const int from = lookup(tok[2], line), to = lookup(tok[3], line);
      if (ds.action[j][from] >= 0) fail(line, "duplicate action row for '" + tok[2] + "'");
      ds.action[j][from] = to;
    } else if (key == "core") {
      if (have_core) fail(line, "duplicate core line");
      have_core = true;
      for (std::size_t i = 1; i < tok.size(); ++i) ds.core.push_back(lookup(tok[i], line));
      std::sort(ds.core.begin(), ds.core.end());
    } else if (key == "exact_radius") {
      if (tok.size() != 2) fail(line, "expected 'exact_radius <R>'");
      have_radius = true;
      ds.exact_radius = static_cast<int>(parse_int(tok[1], line, "radius"));
    } else if (key == "end") {
      state = Done;
    } else {
      fail(line, "unknown keyword '" + key + "'");
    }
  }
  if (state != Done) fail(line, "missing 'end'");
  if (static_cast<long long>(ds.labels.size()) != declared)
    fail(line, "declared " + std::to_string(declared) + " points, found " + std::to_string(ds.labels.size()));
  if (!have_core) fail(line, "missing core line");
  if (!have_radius) fail(line, "missing exact_radius line");
  try {
    validate(ds);
  } catch (const DomainMismatch& e) {
    throw ParseError(std::string("invalid system: ") + e.what());
  }
  return ds;
}

DiscreteSystem load_discrete_system(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_discrete_system(ss.str());
}

void save_discrete_system(const DiscreteSystem& ds, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << serialize(ds);
}

}  // namespace hopf
