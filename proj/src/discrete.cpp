#include "hopf/discrete.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <sstream>

#include "hopf/error.hpp"

namespace hopf {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

int cyclic_count(const DiscreteSystem& ds) {
  int c = 0;
  for (auto n : ds.factors) c += n != 0;
  return c;
}

// Inverse generator maps.
std::vector<std::vector<int>> inverse_maps(const DiscreteSystem& ds) {
  std::vector<std::vector<int>> inv(ds.generators(), std::vector<int>(ds.size(), -1));
  for (int j = 0; j < ds.generators(); ++j)
    for (int x = 0; x < ds.size(); ++x)
      if (ds.action[j][x] >= 0) inv[j][ds.action[j][x]] = x;
  return inv;
}

// One move: generator j in direction +1 or -1.
struct Move {
  int j;
  int sign;
};

std::vector<Move> all_moves(const DiscreteSystem& ds) {
  std::vector<Move> m;
  for (int j = 0; j < ds.generators(); ++j) {
    m.push_back({j, +1});
    if (ds.factors[j] != 2) m.push_back({j, -1});
  }
  return m;
}

int step(const DiscreteSystem& ds, const std::vector<std::vector<int>>& inv, Move m, int x) {
  return m.sign > 0 ? ds.action[m.j][x] : inv[m.j][x];
}

Word unit(const DiscreteSystem& ds, int j, int sign) {
  Word w(ds.generators(), 0);
  w[j] = sign;
  return reduce_word(ds, w);
}

}  // namespace

std::string DiscreteSystem::group_name() const {
  std::string s;
  for (std::size_t j = 0; j < factors.size(); ++j) {
    if (j) s += " x ";
    s += factors[j] == 0 ? "Z" : "Z/" + std::to_string(factors[j]);
  }
  return s;
}

int DiscreteSystem::index_of(const std::string& label) const {
  for (int i = 0; i < size(); ++i)
    if (labels[i] == label) return i;
  throw DomainMismatch("unknown point label '" + label + "'");
}

bool DiscreteSystem::in_core(int x) const { return std::binary_search(core.begin(), core.end(), x); }

void validate(const DiscreteSystem& ds) {
  if (ds.factors.empty()) throw DomainMismatch("group needs at least one factor");
  for (auto n : ds.factors)
    if (n != 0 && n < 2) throw DomainMismatch("cyclic factor order must be >= 2, got " + std::to_string(n));
  const int n = ds.size();
  if (n == 0) throw DomainMismatch("system has no points");
  if (static_cast<int>(ds.weights.size()) != n) throw DomainMismatch("weight count differs from point count");
  std::set<std::string> seen;
  for (const auto& l : ds.labels) {
    if (l.empty() || l.find_first_of(" \t\r\n#") != std::string::npos)
      throw DomainMismatch("invalid point label '" + l + "'");
    if (!seen.insert(l).second) throw DomainMismatch("duplicate point label '" + l + "'");
  }
  for (int i = 0; i < n; ++i)
    if (!(ds.weights[i] > 0)) throw DomainMismatch("weight of '" + ds.labels[i] + "' must be positive");
  if (static_cast<int>(ds.action.size()) != ds.generators())
    throw DomainMismatch("one action table per generator required");
  for (int j = 0; j < ds.generators(); ++j) {
    if (static_cast<int>(ds.action[j].size()) != n) throw DomainMismatch("action table size mismatch");
    std::vector<int> hit(n, -1);
    for (int x = 0; x < n; ++x) {
      const int y = ds.action[j][x];
      if (y < -1 || y >= n) throw DomainMismatch("action image out of range");
      if (y < 0) continue;
      if (hit[y] >= 0)
        throw DomainMismatch("generator " + std::to_string(j) + " is not injective: '" + ds.labels[hit[y]] +
                             "' and '" + ds.labels[x] + "' both map to '" + ds.labels[y] + "'");
      hit[y] = x;
    }
  }
  for (std::size_t i = 0; i < ds.core.size(); ++i) {
    if (ds.core[i] < 0 || ds.core[i] >= n) throw DomainMismatch("core index out of range");
    if (i && ds.core[i] <= ds.core[i - 1]) throw DomainMismatch("core must be sorted and duplicate-free");
  }
  if (ds.exact_radius < 0) throw DomainMismatch("exact_radius must be nonnegative");
  // Group relations wherever both sides are defined.
  for (int j = 0; j < ds.generators(); ++j) {
    if (ds.factors[j] != 0) {
      for (int x = 0; x < n; ++x) {
        int y = x;
        for (std::int64_t k = 0; k < ds.factors[j] && y >= 0; ++k) y = ds.action[j][y];
        if (y >= 0 && y != x)
          throw DomainMismatch("generator " + std::to_string(j) + " violates its order at '" + ds.labels[x] + "'");
      }
    }
    for (int k = j + 1; k < ds.generators(); ++k)
      for (int x = 0; x < n; ++x) {
        const int a = ds.action[k][x] >= 0 ? ds.action[j][ds.action[k][x]] : -1;
        const int b = ds.action[j][x] >= 0 ? ds.action[k][ds.action[j][x]] : -1;
        if (a >= 0 && b >= 0 && a != b)
          throw DomainMismatch("generators " + std::to_string(j) + " and " + std::to_string(k) +
                               " do not commute at '" + ds.labels[x] + "'");
      }
  }
}

std::int64_t word_length(const DiscreteSystem& ds, const Word& w) {
  std::int64_t len = 0;
  for (int j = 0; j < ds.generators(); ++j) {
    const std::int64_t n = ds.factors[j];
    if (n == 0) {
      len += w[j] < 0 ? -w[j] : w[j];
    } else {
      const std::int64_t k = mod(w[j], n);
      len += std::min(k, n - k);
    }
  }
  return len;
}

Word reduce_word(const DiscreteSystem& ds, Word w) {
  for (int j = 0; j < ds.generators(); ++j)
    if (ds.factors[j] != 0) w[j] = mod(w[j], ds.factors[j]);
  return w;
}

Word add_words(const DiscreteSystem& ds, const Word& a, const Word& b) {
  Word w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = a[i] + b[i];
  return reduce_word(ds, std::move(w));
}

Word negate_word(const DiscreteSystem& ds, const Word& a) {
  Word w(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) w[i] = -a[i];
  return reduce_word(ds, std::move(w));
}

std::string to_string(const Word& w) {
  std::string s = "(";
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + ")";
}

std::optional<int> apply_word(const DiscreteSystem& ds, const Word& w, int x) {
  const auto inv = inverse_maps(ds);
  int y = x;
  for (int j = 0; j < ds.generators(); ++j) {
    const std::int64_t n = ds.factors[j];
    auto walk = [&](int from, std::int64_t k, int sign) {
      int z = from;
      for (std::int64_t i = 0; i < k && z >= 0; ++i) z = sign > 0 ? ds.action[j][z] : inv[j][z];
      return z;
    };
    if (n == 0) {
      y = walk(y, w[j] < 0 ? -w[j] : w[j], w[j] < 0 ? -1 : 1);
    } else {
      const std::int64_t k = mod(w[j], n);
      int z = k <= n - k ? walk(y, k, 1) : walk(y, n - k, -1);
      if (z < 0) z = k <= n - k ? walk(y, n - k, -1) : walk(y, k, 1);
      y = z;
    }
    if (y < 0) return std::nullopt;
  }
  return y;
}

std::optional<Rational> cocycle(const DiscreteSystem& ds, const Word& w, int x) {
  const auto y = apply_word(ds, w, x);
  if (!y) return std::nullopt;
  return Rational(ds.weights[*y] / ds.weights[x]);
}

std::map<std::pair<int, int>, Rational> cocycle_table(const DiscreteSystem& ds) {
  std::map<std::pair<int, int>, Rational> t;
  for (int j = 0; j < ds.generators(); ++j)
    for (int x = 0; x < ds.size(); ++x)
      if (ds.action[j][x] >= 0) t[{j, x}] = ds.weights[ds.action[j][x]] / ds.weights[x];
  return t;
}

std::vector<Word> words_within(const DiscreteSystem& ds, std::int64_t radius) {
  std::vector<Word> out;
  Word w(ds.generators(), 0);
  std::function<void(int, std::int64_t)> rec = [&](int j, std::int64_t budget) {
    if (j == ds.generators()) {
      out.push_back(w);
      return;
    }
    const std::int64_t n = ds.factors[j];
    if (n == 0) {
      for (std::int64_t k = -budget; k <= budget; ++k) {
        w[j] = k;
        rec(j + 1, budget - (k < 0 ? -k : k));
      }
    } else {
      for (std::int64_t k = 0; k < n; ++k) {
        const std::int64_t c = std::min(k, n - k);
        if (c > budget) continue;
        w[j] = k;
        rec(j + 1, budget - c);
      }
    }
    w[j] = 0;
  };
  if (radius >= 0) rec(0, radius);
  return out;
}

// ------------------------------------------------------------------ lattices

Lattice hermite_normal_form(std::vector<Word> rows, int dim) {
  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [](const Word& r) { return std::all_of(r.begin(), r.end(), [](auto v) { return v == 0; }); }),
             rows.end());
  std::size_t r = 0;
  for (int col = 0; col < dim && r < rows.size(); ++col) {
    while (true) {
      std::size_t best = rows.size();
      for (std::size_t i = r; i < rows.size(); ++i)
        if (rows[i][col] != 0 && (best == rows.size() || std::llabs(rows[i][col]) < std::llabs(rows[best][col])))
          best = i;
      if (best == rows.size()) break;
      std::swap(rows[r], rows[best]);
      bool clean = true;
      for (std::size_t i = r + 1; i < rows.size(); ++i) {
        if (rows[i][col] == 0) continue;
        const std::int64_t q = rows[i][col] / rows[r][col];
        for (int k = 0; k < dim; ++k) rows[i][k] -= q * rows[r][k];
        if (rows[i][col] != 0) clean = false;
      }
      if (clean) break;
    }
    if (rows[r][col] == 0) continue;
    if (rows[r][col] < 0)
      for (auto& v : rows[r]) v = -v;
    for (std::size_t i = 0; i < r; ++i) {
      const std::int64_t q = floor_div(rows[i][col], rows[r][col]);
      for (int k = 0; k < dim; ++k) rows[i][k] -= q * rows[r][k];
    }
    ++r;
  }
  rows.resize(r);
  return Lattice{rows};
}

namespace {
int pivot_column(const Word& row) {
  for (std::size_t k = 0; k < row.size(); ++k)
    if (row[k] != 0) return static_cast<int>(k);
  return -1;
}
}  // namespace

Word reduce_modulo(const Lattice& l, Word w) {
  for (const auto& row : l.rows) {
    const int p = pivot_column(row);
    const std::int64_t q = floor_div(w[p], row[p]);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= q * row[k];
  }
  return w;
}

bool lattice_contains(const Lattice& l, const Word& w) {
  const Word r = reduce_modulo(l, w);
  return std::all_of(r.begin(), r.end(), [](auto v) { return v == 0; });
}

// ------------------------------------------------------------- certification

std::vector<OrbitCertificate> certify_orbits(const DiscreteSystem& ds) {
  validate(ds);
  const auto inv = inverse_maps(ds);
  const auto moves = all_moves(ds);
  const int dim = ds.generators();
  const int c = cyclic_count(ds);
  std::vector<int> orbit_id(ds.size(), -1);
  std::vector<OrbitCertificate> out;

  for (int x0 : ds.core) {
    if (orbit_id[x0] >= 0) continue;
    OrbitCertificate o;
    o.id = static_cast<int>(out.size());
    o.base = x0;
    o.closed = true;
    std::vector<Word> rel;
    for (int j = 0; j < dim; ++j)
      if (ds.factors[j] != 0) {
        Word w(dim, 0);
        w[j] = ds.factors[j];
        rel.push_back(w);
      }
    std::deque<int> queue{x0};
    o.word[x0] = Word(dim, 0);
    orbit_id[x0] = o.id;
    while (!queue.empty()) {
      const int y = queue.front();
      queue.pop_front();
      for (Move m : moves) {
        const int z = step(ds, inv, m, y);
        if (z < 0) {
          o.closed = false;
          continue;
        }
        const Word wz = add_words(ds, o.word[y], unit(ds, m.j, m.sign));
        auto it = o.word.find(z);
        if (it == o.word.end()) {
          o.word[z] = wz;
          orbit_id[z] = o.id;
          queue.push_back(z);
        } else {
          Word r(dim);
          for (int k = 0; k < dim; ++k) r[k] = wz[k] - it->second[k];
          rel.push_back(r);
        }
      }
    }
    for (const auto& [p, w] : o.word) o.points.push_back(p);
    o.stabilizer = hermite_normal_form(rel, dim);
    o.infinite_stabilizer = o.stabilizer.rank() > c;
    if (o.infinite_stabilizer) {
      o.certificate = "periodic";
    } else {
      BigInt num = 1, den = 1;
      for (auto n : ds.factors)
        if (n != 0) num *= n;
      for (const auto& row : o.stabilizer.rows) den *= row[pivot_column(row)];
      o.stabilizer_order = num / den;
      o.certificate = o.closed ? "finite orbit" : "escaping";
    }

    // Every word of length <= exact_radius must be defined at each core point.
    for (int x : o.points) {
      if (!ds.in_core(x)) continue;
      std::map<int, int> dist{{x, 0}};
      std::deque<int> q{x};
      while (!q.empty()) {
        const int y = q.front();
        q.pop_front();
        if (dist[y] >= ds.exact_radius) continue;
        for (Move m : moves) {
          const int z = step(ds, inv, m, y);
          if (z < 0)
            throw UncertifiedOrbit("the radius-" + std::to_string(ds.exact_radius) + " ball around core point '" +
                                   ds.labels[x] + "' leaves the truncation at '" + ds.labels[y] + "'");
          if (dist.emplace(z, dist[y] + 1).second) q.push_back(z);
        }
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

const OrbitCertificate& orbit_of(const std::vector<OrbitCertificate>& orbits, int x) {
  for (const auto& o : orbits)
    if (o.word.count(x)) return o;
  throw OutsideCore("point index " + std::to_string(x) + " is not in a core orbit");
}

// -------------------------------------------------------------- return sets

std::string to_string(ReturnStatus s) {
  switch (s) {
    case ReturnStatus::Complete: return "complete";
    case ReturnStatus::InfinitePeriodic: return "infinite-periodic";
    case ReturnStatus::LowerBound: return "lower-bound";
  }
  return "?";
}

std::string ExactReturnSet::describe() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < words.size(); ++i) os << (i ? ", " : "") << to_string(words[i]);
  os << "} " << to_string(status);
  if (status == ReturnStatus::InfinitePeriodic) {
    os << " residues {";
    for (std::size_t i = 0; i < residues.size(); ++i) os << (i ? ", " : "") << to_string(residues[i]);
    os << "} modulo lattice [";
    for (std::size_t i = 0; i < period.rows.size(); ++i) os << (i ? ", " : "") << to_string(period.rows[i]);
    os << "]";
  }
  return os.str();
}

ExactReturnSet returns_set_exact(const DiscreteSystem& ds, const std::vector<int>& a, int x) {
  if (x < 0 || x >= ds.size() || !ds.in_core(x))
    throw OutsideCore("return sets are exact only at core points");
  for (int p : a)
    if (p < 0 || p >= ds.size()) throw DomainMismatch("set member index out of range");
  const auto orbits = certify_orbits(ds);
  const OrbitCertificate& o = orbit_of(orbits, x);
  ExactReturnSet out;
  out.period = o.stabilizer;
  std::set<Word> cosets;
  bool inside = true;
  for (int p : a) {
    inside = inside && ds.in_core(p);
    auto it = o.word.find(p);
    if (it == o.word.end()) continue;
    Word d(ds.generators());
    for (int k = 0; k < ds.generators(); ++k) d[k] = o.word.at(x)[k] - it->second[k];
    cosets.insert(reduce_modulo(o.stabilizer, reduce_word(ds, d)));
  }
  out.residues.assign(cosets.begin(), cosets.end());
  for (const Word& w : words_within(ds, ds.exact_radius))
    if (cosets.count(reduce_modulo(o.stabilizer, w))) out.words.push_back(w);
  if (cosets.empty()) {
    out.status = ReturnStatus::Complete;
  } else if (o.infinite_stabilizer) {
    out.status = ReturnStatus::InfinitePeriodic;
  } else {
    const BigInt expected = o.stabilizer_order * static_cast<long long>(cosets.size());
    out.status = inside && BigInt(static_cast<long long>(out.words.size())) == expected ? ReturnStatus::Complete
                                                                                      : ReturnStatus::LowerBound;
  }
  return out;
}

// ---------------------------------------------------------- decomposition

std::string to_string(ExactVerdict v) {
  return v == ExactVerdict::Conservative ? "Conservative" : "Dissipative";
}

GreedyResult greedy_max_transient(const DiscreteSystem& ds, int k_candidates) {
  if (k_candidates < 1) throw ConfigError("candidate bound K must be at least 1");
  const auto orbits = certify_orbits(ds);
  // Best candidate per dissipative orbit: its K heaviest core points.
  struct Candidate {
    std::vector<int> points;
    Rational mass;
  };
  std::vector<Candidate> open;
  for (const auto& o : orbits) {
    if (o.infinite_stabilizer) continue;
    std::vector<int> pts;
    for (int p : o.points)
      if (ds.in_core(p)) pts.push_back(p);
    std::stable_sort(pts.begin(), pts.end(), [&](int a, int b) { return ds.weights[a] > ds.weights[b]; });
    if (static_cast<int>(pts.size()) > k_candidates) pts.resize(k_candidates);
    std::sort(pts.begin(), pts.end());
    Rational m = 0;
    for (int p : pts) m += ds.weights[p];
    open.push_back({pts, m});
  }
  GreedyResult out;
  while (!open.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < open.size(); ++i)
      if (open[i].mass > open[best].mass || (open[i].mass == open[best].mass && open[i].points < open[best].points))
        best = i;
    out.steps.push_back({open[best].mass, open[best].points, open[best].mass});
    out.t_max.insert(out.t_max.end(), open[best].points.begin(), open[best].points.end());
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(best));
  }
  std::sort(out.t_max.begin(), out.t_max.end());
  return out;
}

ExactPartition hopf_decompose_exact(const DiscreteSystem& ds, int k_candidates) {
  const auto orbits = certify_orbits(ds);
  ExactPartition out;
  for (const auto& o : orbits) {
    const ExactVerdict v = o.infinite_stabilizer ? ExactVerdict::Conservative : ExactVerdict::Dissipative;
    for (int p : o.points) {
      if (!ds.in_core(p)) continue;
      out.verdict[p] = v;
      (v == ExactVerdict::Conservative ? out.conservative : out.dissipative).push_back(p);
    }
    if (v == ExactVerdict::Dissipative) out.witness[o.base] = {o.base};
  }
  std::sort(out.conservative.begin(), out.conservative.end());
  std::sort(out.dissipative.begin(), out.dissipative.end());
  out.t_max = greedy_max_transient(ds, k_candidates);
  return out;
}

// ---------------------------------------------------------------- wandering

std::string ProgressionWitness::describe() const {
  return std::to_string(step) + "Z along factor " + std::to_string(factor);
}

WanderingReport wandering_tests(const DiscreteSystem& ds, const std::vector<int>& w, std::int64_t max_step) {
  WanderingReport out;
  if (w.empty()) {
    out.degenerate = out.is_transient = out.is_wandering = out.is_weakly_wandering = true;
    for (int j = 0; j < ds.generators(); ++j)
      if (ds.factors[j] == 0) {
        out.witness = ProgressionWitness{j, 1};
        break;
      }
    return out;
  }
  for (int p : w)
    if (p < 0 || p >= ds.size() || !ds.in_core(p)) throw OutsideCore("wandering tests need W inside the core");
  const auto orbits = certify_orbits(ds);
  std::set<int> members(w.begin(), w.end());
  std::set<int> seen_orbits;
  out.is_transient = true;
  bool distinct = true, trivial = true;
  for (int p : members) {
    const auto& o = orbit_of(orbits, p);
    if (o.infinite_stabilizer) out.is_transient = false;
    else if (o.stabilizer_order != 1) trivial = false;
    if (!seen_orbits.insert(o.id).second) distinct = false;
  }
  out.is_wandering = out.is_transient && trivial && distinct;

  // S = step * Z * e_i works iff no positive multiple carries W into W; a walk
  // that leaves the truncation has escaped.
  for (int i = 0; i < ds.generators() && !out.witness; ++i) {
    if (ds.factors[i] != 0) continue;
    for (std::int64_t j = 1; j <= max_step && !out.witness; ++j) {
      bool ok = true;
      for (int p : members) {
        int y = p;
        for (std::int64_t guard = 0; ok; ++guard) {
          for (std::int64_t s = 0; s < j && y >= 0; ++s) y = ds.action[i][y];
          if (y < 0) break;
          if (members.count(y) || guard > ds.size()) ok = false;
        }
        if (!ok) break;
      }
      if (ok) out.witness = ProgressionWitness{i, j};
    }
  }
  out.is_weakly_wandering = out.witness.has_value();
  return out;
}

// ------------------------------------------------------- invariant measures

InvariantMeasureReport invariant_measure_search(const DiscreteSystem& ds) {
  const auto orbits = certify_orbits(ds);
  InvariantMeasureReport out;
  Rational p1_total = 0;
  for (const auto& o : orbits) {
    std::vector<int> core_pts;
    for (int p : o.points)
      if (ds.in_core(p)) core_pts.push_back(p);
    if (o.closed) {
      // Finite orbit: the orbit average of mu is invariant and finite.
      Rational mass = 0;
      for (int p : o.points) mass += ds.weights[p];
      const Rational eta = mass / static_cast<long long>(o.points.size());
      for (int p : core_pts) {
        out.p1.push_back(p);
        out.acim[p] = eta;
      }
      p1_total += mass;
    } else {
      // Infinite orbit: invariant measures are multiples of counting measure.
      // On escaping orbits f0 = 1_{base}/mu(base) gives eta{x} = |Stab|.
      const Rational eta = o.infinite_stabilizer ? Rational(1) : Rational(o.stabilizer_order);
      for (int p : core_pts) {
        out.p_inf.push_back(p);
        out.acim[p] = eta;
      }
      const WanderingReport wr = wandering_tests(ds, {o.base});
      if (wr.witness) out.no_acip_witness[o.base] = *wr.witness;
    }
  }
  for (const auto& o : orbits)
    if (o.closed)
      for (int p : o.points)
        if (ds.in_core(p)) out.acip_on_p1[p] = out.acim[p] / p1_total;
  std::sort(out.p1.begin(), out.p1.end());
  std::sort(out.p_inf.begin(), out.p_inf.end());
  if (out.p_inf.empty()) out.acip = out.acip_on_p1;
  return out;
}

// ----------------------------------------------------- transversal, components

Transversal orbit_transversal(const DiscreteSystem& ds) {
  const auto orbits = certify_orbits(ds);
  Transversal t;
  for (const auto& o : orbits) {
    t.points.push_back(o.base);
    for (int p : o.points) {
      if (!ds.in_core(p)) continue;
      t.selector[p] = o.base;
      t.r[p] = reduce_modulo(o.stabilizer, negate_word(ds, o.word.at(p)));
    }
  }
  return t;
}

int transversal_law_violations(const DiscreteSystem& ds, const Transversal& t) {
  const auto orbits = certify_orbits(ds);
  int bad = 0;
  const auto words = words_within(ds, ds.exact_radius);
  for (int x : ds.core) {
    const auto& o = orbit_of(orbits, x);
    const auto sx = apply_word(ds, t.r.at(x), x);
    if (sx && *sx != t.selector.at(x)) ++bad;
    for (const Word& g : words) {
      const auto y = apply_word(ds, g, x);
      if (!y || !ds.in_core(*y)) continue;
      if (reduce_modulo(o.stabilizer, add_words(ds, t.r.at(*y), g)) != t.r.at(x)) ++bad;
    }
  }
  return bad;
}

DiscreteSystem restrict_system(const DiscreteSystem& ds, const std::vector<int>& points) {
  std::vector<int> pts = points;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::map<int, int> index;
  for (std::size_t i = 0; i < pts.size(); ++i) index[pts[i]] = static_cast<int>(i);
  DiscreteSystem r;
  r.factors = ds.factors;
  r.exact_radius = ds.exact_radius;
  r.action.assign(ds.generators(), std::vector<int>(pts.size(), -1));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    r.labels.push_back(ds.labels[pts[i]]);
    r.weights.push_back(ds.weights[pts[i]]);
    if (ds.in_core(pts[i])) r.core.push_back(static_cast<int>(i));
    for (int j = 0; j < ds.generators(); ++j) {
      const int y = ds.action[j][pts[i]];
      if (y < 0) continue;
      auto it = index.find(y);
      if (it == index.end())
        throw DomainMismatch("restriction is not closed: '" + ds.labels[pts[i]] + "' maps to '" + ds.labels[y] + "'");
      r.action[j][i] = it->second;
    }
  }
  return r;
}

std::vector<ErgodicComponent> ergodic_components(const DiscreteSystem& ds) {
  const auto orbits = certify_orbits(ds);
  std::vector<ErgodicComponent> out;
  for (const auto& o : orbits) {
    ErgodicComponent c;
    for (int p : o.points)
      if (ds.in_core(p)) c.points.push_back(p);
    c.system = restrict_system(ds, o.points);
    c.verdict = o.infinite_stabilizer ? ExactVerdict::Conservative : ExactVerdict::Dissipative;
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------- builders

DiscreteSystem translation_system(int T, int C, PointWeights w, const Rational& scale) {
  if (T < 0 || C < 0 || C > T) throw ConfigError("translation system needs 0 <= C <= T");
  if (!(scale > 0)) throw ConfigError("weight scale must be positive");
  DiscreteSystem ds;
  ds.factors = {0};
  ds.action.assign(1, {});
  for (int k = -T; k <= T; ++k) {
    ds.labels.push_back(std::to_string(k));
    const int a = k < 0 ? -k : k;
    ds.weights.push_back(w == PointWeights::Decaying ? scale / Rational(BigInt(1) << a) : scale);
    ds.action[0].push_back(k < T ? k + T + 1 : -1);
    if (k >= -C && k <= C) ds.core.push_back(k + T);
  }
  ds.exact_radius = T - C;
  validate(ds);
  return ds;
}

DiscreteSystem rotation_system(int n, std::vector<Rational> weights) {
  if (n < 1) throw ConfigError("rotation system needs n >= 1");
  if (weights.empty()) weights.assign(n, Rational(1));
  if (static_cast<int>(weights.size()) != n) throw ConfigError("rotation system weight count mismatch");
  DiscreteSystem ds;
  ds.factors = {0};
  ds.action.assign(1, {});
  for (int k = 0; k < n; ++k) {
    ds.labels.push_back(std::to_string(k));
    ds.action[0].push_back((k + 1) % n);
    ds.core.push_back(k);
  }
  ds.weights = std::move(weights);
  ds.exact_radius = n;
  validate(ds);
  return ds;
}

DiscreteSystem trivial_system(int n) {
  if (n < 1) throw ConfigError("trivial system needs n >= 1");
  DiscreteSystem ds;
  ds.factors = {0};
  ds.action.assign(1, {});
  for (int k = 0; k < n; ++k) {
    ds.labels.push_back("x" + std::to_string(k));
    ds.weights.push_back(1);
    ds.action[0].push_back(k);
    ds.core.push_back(k);
  }
  ds.exact_radius = n;
  validate(ds);
  return ds;
}

DiscreteSystem union_system(const std::vector<DiscreteSystem>& parts) {
  if (parts.empty()) throw ConfigError("union of no systems");
  std::set<std::string> all;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.factors != parts[0].factors)
      throw DomainMismatch("union pieces act by different groups: " + parts[0].group_name() + " vs " +
                           p.group_name());
    all.insert(p.labels.begin(), p.labels.end());
    total += p.labels.size();
  }
  const bool prefix = all.size() != total;
  DiscreteSystem ds;
  ds.factors = parts[0].factors;
  ds.action.assign(ds.generators(), {});
  ds.exact_radius = parts[0].exact_radius;
  int offset = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    ds.exact_radius = std::min(ds.exact_radius, p.exact_radius);
    for (int x = 0; x < p.size(); ++x) {
      ds.labels.push_back(prefix ? "p" + std::to_string(i) + "." + p.labels[x] : p.labels[x]);
      ds.weights.push_back(p.weights[x]);
      for (int j = 0; j < ds.generators(); ++j)
        ds.action[j].push_back(p.action[j][x] < 0 ? -1 : p.action[j][x] + offset);
    }
    for (int c : p.core) ds.core.push_back(c + offset);
    offset += p.size();
  }
  validate(ds);
  return ds;
}

}  // namespace hopf
