#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "hopf/discrete.hpp"

namespace hopf::testing {

// Random product-of-orbits system: each piece is a product of one-dimensional
// actions (line segment, cycle or fixed point), one per generator.
struct RandomSystemOptions {
  int max_core = 32;
  int exact_radius = 3;
  int max_pieces = 3;
};

inline DiscreteSystem random_system(std::mt19937_64& rng, const RandomSystemOptions& opt = {}) {
  auto uni = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  while (true) {
    DiscreteSystem ds;
    const int z_factors = uni(1, 2);
    for (int j = 0; j < z_factors; ++j) ds.factors.push_back(0);
    if (uni(0, 1)) ds.factors.push_back(uni(2, 4));
    const int gens = static_cast<int>(ds.factors.size());
    ds.action.assign(gens, {});
    ds.exact_radius = opt.exact_radius;
    const int pieces = uni(1, opt.max_pieces);
    int core_count = 0;
    struct Axis {
      enum { Line, Cycle } kind;
      int len;   // number of points along the axis
      int core;  // core half-width for lines
    };
    for (int p = 0; p < pieces; ++p) {
      std::vector<Axis> axes;
      for (int j = 0; j < gens; ++j) {
        if (ds.factors[j] == 0) {
          if (uni(0, 2) == 0) {
            const int c = uni(0, 2);
            axes.push_back({Axis::Line, 2 * (c + opt.exact_radius + uni(0, 2)) + 1, c});
          } else {
            axes.push_back({Axis::Cycle, uni(1, 12), 0});
          }
        } else {
          std::vector<int> divs;
          for (int d = 1; d <= ds.factors[j]; ++d)
            if (ds.factors[j] % d == 0) divs.push_back(d);
          axes.push_back({Axis::Cycle, divs[uni(0, static_cast<int>(divs.size()) - 1)], 0});
        }
      }
      // Enumerate the product grid in mixed radix.
      std::vector<int> idx(gens, 0);
      const int offset = ds.size();
      int total = 1;
      for (const auto& a : axes) total *= a.len;
      auto flat = [&](const std::vector<int>& v) {
        int f = 0;
        for (int j = gens - 1; j >= 0; --j) f = f * axes[j].len + v[j];
        return offset + f;
      };
      for (int k = 0; k < total; ++k) {
        int rem = k;
        for (int j = 0; j < gens; ++j) {
          idx[j] = rem % axes[j].len;
          rem /= axes[j].len;
        }
        std::string label = "p" + std::to_string(p);
        bool core = true;
        for (int j = 0; j < gens; ++j) {
          int coord = idx[j];
          if (axes[j].kind == Axis::Line) {
            coord -= axes[j].len / 2;
            if (std::abs(coord) > axes[j].core) core = false;
          }
          label += (j ? "," : ":") + std::to_string(coord);
        }
        ds.labels.push_back(label);
        ds.weights.push_back(Rational(uni(1, 9), uni(1, 8)));
        if (core) {
          ds.core.push_back(ds.size() - 1);
          ++core_count;
        }
        for (int j = 0; j < gens; ++j) {
          std::vector<int> nxt = idx;
          int target;
          if (axes[j].kind == Axis::Line) {
            target = idx[j] + 1 < axes[j].len ? (nxt[j] = idx[j] + 1, flat(nxt)) : -1;
          } else {
            nxt[j] = (idx[j] + 1) % axes[j].len;
            target = flat(nxt);
          }
          ds.action[j].push_back(target);
        }
      }
    }
    if (core_count == 0 || core_count > opt.max_core) continue;
    std::sort(ds.core.begin(), ds.core.end());
    return ds;
  }
}

// Independent word arithmetic for the brute-force oracles: powers of each
// generator as partial maps, applied in factor order.
class PowerTable {
 public:
  PowerTable(const DiscreteSystem& ds, int reach) : ds_(ds), reach_(reach) {
    const int n = ds.size();
    for (int j = 0; j < ds.generators(); ++j) {
      std::vector<int> inv(n, -1);
      for (int x = 0; x < n; ++x)
        if (ds.action[j][x] >= 0) inv[ds.action[j][x]] = x;
      std::vector<std::vector<int>> pw(2 * reach + 1, std::vector<int>(n, -1));
      for (int x = 0; x < n; ++x) pw[reach][x] = x;
      for (int v = 1; v <= reach; ++v)
        for (int x = 0; x < n; ++x) {
          const int f = pw[reach + v - 1][x], b = pw[reach - v + 1][x];
          pw[reach + v][x] = f < 0 ? -1 : ds.action[j][f];
          pw[reach - v][x] = b < 0 ? -1 : inv[b];
        }
      table_.push_back(std::move(pw));
    }
  }

  // Visits every group element of cost <= L exactly once (cyclic coordinates
  // in [0, n) with cost min(v, n - v)), with its image of x (-1 if undefined).
  template <class Fn>
  void for_each(int x, int L, Fn&& fn) const {
    std::vector<std::int64_t> w(ds_.generators(), 0);
    rec(0, x, L, w, fn);
  }

 private:
  template <class Fn>
  void rec(int j, int y, int budget, std::vector<std::int64_t>& w, Fn& fn) const {
    if (j == ds_.generators()) {
      fn(w, y);
      return;
    }
    const std::int64_t n = ds_.factors[j];
    if (n == 0) {
      for (int v = -budget; v <= budget; ++v) {
        w[j] = v;
        const int z = y < 0 ? -1 : table_[j][reach_ + v][y];
        rec(j + 1, z, budget - std::abs(v), w, fn);
      }
    } else {
      for (int v = 0; v < n; ++v) {
        const int cost = static_cast<int>(std::min<std::int64_t>(v, n - v));
        if (cost > budget) continue;
        w[j] = v;
        const int z = y < 0 ? -1 : table_[j][reach_ + v][y];
        rec(j + 1, z, budget - cost, w, fn);
      }
    }
    w[j] = 0;
  }

  const DiscreteSystem& ds_;
  int reach_;
  std::vector<std::vector<std::vector<int>>> table_;
};

// Stabilizer growth test: {x} is a positive set, and its return set is the
// stabilizer, so x is conservative iff the stabilizer is infinite.
inline std::map<int, bool> brute_force_conservative(const DiscreteSystem& ds, int short_len = 16,
                                                    int long_len = 32) {
  const PowerTable pt(ds, long_len);
  std::map<int, bool> out;
  for (int x : ds.core) {
    std::size_t a = 0, b = 0;
    pt.for_each(x, short_len, [&](const auto&, int y) { a += y == x; });
    pt.for_each(x, long_len, [&](const auto&, int y) { b += y == x; });
    out[x] = b > a;
  }
  return out;
}

// Points reachable from `seeds` along defined generator moves in either direction.
inline std::set<int> saturate(const DiscreteSystem& ds, const std::vector<int>& seeds) {
  std::set<int> seen(seeds.begin(), seeds.end());
  std::vector<int> stack(seeds.begin(), seeds.end());
  std::vector<std::vector<int>> inv(ds.generators(), std::vector<int>(ds.size(), -1));
  for (int j = 0; j < ds.generators(); ++j)
    for (int x = 0; x < ds.size(); ++x)
      if (ds.action[j][x] >= 0) inv[j][ds.action[j][x]] = x;
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    for (int j = 0; j < ds.generators(); ++j)
      for (int y : {ds.action[j][x], inv[j][x]})
        if (y >= 0 && seen.insert(y).second) stack.push_back(y);
  }
  return seen;
}

}  // namespace hopf::testing
