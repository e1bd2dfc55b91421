// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hopf/discrete.hpp"
#include "hopf/gspace.hpp"
#include "hopf/homogeneous.hpp"
#include "hopf/hopf_engine.hpp"
#include "hopf/scenario.hpp"
#include "support.hpp"

using namespace hopf;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << " first failure: " << what << ";";
      pass = false;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

double gauss(std::span<const double> x, std::span<const double> c, double sigma) {
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r2 += (x[i] - c[i]) * (x[i] - c[i]);
  return std::exp(-r2 / (2.0 * sigma * sigma));
}

// ------------------------------------------------------------ criterion 1

struct GroundTruth {
  std::string label;
  SpaceModel space;
  TestFunction f;
  QuadratureSpec scheme;
  Verdict expected;
};

Outcome ground_truth() {
  Outcome out;
  const GroupPair e2so2 = make_group_pair(GroupModel::euclidean_motions_2d(), SubgroupKind::SO2);
  QuadratureSpec line = QuadratureSpec::gauss_legendre(8, 0.5);
  QuadratureSpec plane = QuadratureSpec::gauss_legendre(4, 2.0);
  plane.max_panels = 32;
  const std::vector<GroundTruth> cases = {
      {"circle", circle_rotation(), TestFunction::constant(), QuadratureSpec{}, Verdict::Conservative},
      {"Z-translation", integer_translation(LineWeight::Uniform, 64), TestFunction::exp_decay(2.0),
       QuadratureSpec{}, Verdict::Dissipative},
      {"R-translation", real_translation(LineWeight::Uniform, 32.0), TestFunction::gaussian(1.0), line,
       Verdict::Dissipative},
      {"translation space", translation_space({1.0}, GroupModel::real_vector(1), 32.0),
       TestFunction::gaussian(1.0), line, Verdict::Dissipative},
      {"E2 coset plane", coset_space(e2so2, 16.0), TestFunction::gaussian(8.0), plane, Verdict::Dissipative},
  };
  const DecisionPolicy policy;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& gt = cases[c];
    int correct = 0, opposite = 0;
    double worst_limit = 0.0;
    for (const auto& wp : sample_points(gt.space, 100, 1000 + c)) {
      const HopfSeries hs = hopf_transform(gt.space, gt.f, wp.point, 12, gt.scheme);
      const Verdict v = classify_point(hs, policy).verdict;
      correct += v == gt.expected;
      opposite += v != gt.expected && v != Verdict::Undecided;
      if (gt.label == "Z-translation") worst_limit = std::max(worst_limit, std::abs(hs.entries[8].value - 3.0));
    }
    out.detail << " " << gt.label << " " << correct << "/100";
    out.require(correct >= 99, gt.label + ": fewer than 99 correct");
    out.require(opposite == 0, gt.label + ": opposite verdicts");
    if (gt.label == "Z-translation") {
      out.detail << " (max |S_8 - 3| = " << worst_limit << ")";
      out.require(worst_limit <= 1e-9, "Z-translation S_8 differs from 3");
    }
  }
  return out;
}

// ------------------------------------------------------------ criterion 2

struct TransportCase {
  std::string label;
  SpaceModel space;
  QuadratureSpec scheme;
  bool exact = false;
  std::function<GroupElement(std::mt19937_64&)> draw_g;
  // Receives g so discrete supports can be made to overlap.
  std::function<std::pair<PointFunction, PointFunction>(std::mt19937_64&, const GroupElement&)> draw_f;
};

// Gaussian bumps in location coordinates with a per-component centre.
std::function<std::pair<PointFunction, PointFunction>(std::mt19937_64&, const GroupElement&)> located_bumps(
    const SpaceModel& s, int components, std::vector<double> lo, std::vector<double> hi, double s_lo, double s_hi) {
  return [s, components, lo, hi, s_lo, s_hi](std::mt19937_64& rng, const GroupElement&) {
    auto make = [&]() {
      std::vector<std::vector<double>> centre(components);
      std::vector<double> height(components);
      for (int c = 0; c < components; ++c) {
        for (std::size_t i = 0; i < lo.size(); ++i) centre[c].push_back(uniform(rng, lo[i], hi[i]));
        height[c] = uniform(rng, 0.5, 2.0);
      }
      const double sigma = uniform(rng, s_lo, s_hi);
      return PointFunction([s, centre, height, sigma](const Point& x) {
        const Location l = s.locate(x);
        return height[x.component] * gauss(l.coords, centre[x.component], sigma);
      });
    };
    PointFunction f0 = make();
    PointFunction f1 = make();
    return std::make_pair(f0, f1);
  };
}

// Base bump times a Gaussian in the fiber coordinate.
std::function<std::pair<PointFunction, PointFunction>(std::mt19937_64&, const GroupElement&)> fibered(
    std::function<PointFunction(std::mt19937_64&)> base, double t_lo, double t_hi, double s_lo, double s_hi) {
  return [=](std::mt19937_64& rng, const GroupElement&) {
    auto make = [&]() {
      PointFunction b = base(rng);
      const double c = uniform(rng, t_lo, t_hi), sigma = uniform(rng, s_lo, s_hi);
      return PointFunction([b, c, sigma](const Point& x) {
        const double t = x.coords.back();
        Point xb{x.component, std::vector<double>(x.coords.begin(), x.coords.end() - 1)};
        return b(xb) * std::exp(-(t - c) * (t - c) / (2.0 * sigma * sigma));
      });
    };
    PointFunction f0 = make();
    PointFunction f1 = make();
    return std::make_pair(f0, f1);
  };
}

// Dyadic-valued indicators on a finite candidate list; f0 also covers g.x for
// part of the support of f1 so the two sides are not trivially zero.
std::function<std::pair<PointFunction, PointFunction>(std::mt19937_64&, const GroupElement&)> dyadic_indicators(
    const SpaceModel& s, std::vector<Point> candidates) {
  return [s, candidates](std::mt19937_64& rng, const GroupElement& g) {
    std::map<std::pair<int, std::vector<double>>, double> v0, v1;
    for (int k = 0; k < 6; ++k) {
      const Point& x = candidates[uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1)];
      v1[{x.component, x.coords}] = uniform_int(rng, 1, 8) / 8.0;
      if (k % 2 == 0) {
        const Point y = s.act(g, x);
        v0[{y.component, y.coords}] = uniform_int(rng, 1, 8) / 8.0;
      } else {
        const Point& z = candidates[uniform_int(rng, 0, static_cast<int>(candidates.size()) - 1)];
        v0[{z.component, z.coords}] = uniform_int(rng, 1, 8) / 8.0;
      }
    }
    auto fn = [](std::map<std::pair<int, std::vector<double>>, double> m) {
      return PointFunction([m](const Point& x) {
        auto it = m.find({x.component, x.coords});
        return it == m.end() ? 0.0 : it->second;
      });
    };
    return std::make_pair(fn(v0), fn(v1));
  };
}

std::vector<Point> integer_points(int lo, int hi, int components = 1, int residues = 0) {
  std::vector<Point> out;
  for (int c = 0; c < components; ++c)
    for (int k = lo; k <= hi; ++k) {
      if (residues == 0) {
        out.push_back(Point{c, {static_cast<double>(k)}});
      } else {
        for (int r = 0; r < residues; ++r) out.push_back(Point{c, {static_cast<double>(k), static_cast<double>(r)}});
      }
    }
  return out;
}

std::vector<TransportCase> transport_cases() {
  using G = GroupElement;
  const GroupModel Z = GroupModel::integer_lattice(1);
  const GroupModel R = GroupModel::real_vector(1);
  const GroupModel E2 = GroupModel::euclidean_motions_2d();
  const GroupModel Aff = GroupModel::affine_line();
  const GroupModel ZZ2 = GroupModel::product(Z, GroupModel::finite_cyclic(2));
  auto z_shift = [](int lo, int hi) {
    return [lo, hi](std::mt19937_64& rng) { return G::ints({uniform_int(rng, lo, hi)}); };
  };
  auto r_shift = [](double lo, double hi) {
    return [lo, hi](std::mt19937_64& rng) { return G::reals({uniform(rng, lo, hi)}); };
  };
  auto motion = [](double v) {
    return [v](std::mt19937_64& rng) {
      return G::motion(uniform(rng, 0.0, 2.0 * std::numbers::pi), uniform(rng, -v, v), uniform(rng, -v, v));
    };
  };
  auto zz2 = [](std::mt19937_64& rng) {
    return G::pair(G::ints({uniform_int(rng, -6, 6)}), G::residue(uniform_int(rng, 0, 1)));
  };
  auto von_mises = [](std::mt19937_64& rng) {
    const double c = uniform(rng, 0.0, 1.0), kappa = uniform(rng, 2.0, 8.0), h = uniform(rng, 0.5, 2.0);
    return PointFunction([c, kappa, h](const Point& x) {
      return h * std::exp(kappa * (std::cos(2.0 * std::numbers::pi * (x.coords[0] - c)) - 1.0));
    });
  };
  auto z_indicator = [](std::mt19937_64& rng) {
    std::set<int> support;
    for (int k = 0; k < 5; ++k) support.insert(uniform_int(rng, -6, 6));
    return PointFunction([support](const Point& x) {
      return support.count(static_cast<int>(std::lround(x.coords[0]))) ? 1.0 : 0.0;
    });
  };
  auto real_bump = [](double lo, double hi, double s_lo, double s_hi) {
    return [=](std::mt19937_64& rng) {
      const double c = (uniform_int(rng, 0, 1) ? 1.0 : -1.0) * uniform(rng, lo, hi);
      const double sigma = uniform(rng, s_lo, s_hi);
      return PointFunction([c, sigma](const Point& x) {
        return std::exp(-(x.coords[0] - c) * (x.coords[0] - c) / (2.0 * sigma * sigma));
      });
    };
  };

  const QuadratureSpec circle_q = QuadratureSpec::gauss_legendre(16, 0.25);
  const QuadratureSpec line_q = QuadratureSpec::gauss_legendre(8, 0.25);
  QuadratureSpec aff_q = QuadratureSpec::gauss_legendre(10, 0.5);
  QuadratureSpec e2_q = QuadratureSpec::gauss_legendre(8, 1.0);
  const QuadratureSpec plane_q = QuadratureSpec::gauss_legendre(8, 0.5);
  const QuadratureSpec exact_q{};

  std::vector<TransportCase> v;
  {
    SpaceModel s = circle_rotation();
    v.push_back({"circle rotation", s, circle_q, false, z_shift(-20, 20),
                 [von_mises](std::mt19937_64& rng, const G&) {
                   PointFunction a = von_mises(rng);
                   PointFunction b = von_mises(rng);
                   return std::make_pair(a, b);
                 }});
  }
  for (LineWeight w : {LineWeight::Uniform, LineWeight::Decaying}) {
    SpaceModel s = integer_translation(w, 64);
    v.push_back({s.name, s, exact_q, true, z_shift(-10, 10), dyadic_indicators(s, integer_points(-12, 12))});
  }
  {
    SpaceModel s = real_translation(LineWeight::Uniform, 32.0);
    v.push_back({s.name, s, line_q, false, r_shift(-4, 4), located_bumps(s, 1, {-8}, {8}, 0.5, 1.0)});
  }
  {
    // Centres far from the density kinks at 0 and -g.
    SpaceModel s = real_translation(LineWeight::Decaying, 32.0);
    v.push_back({s.name, s, line_q, false, r_shift(-3, 3),
                 [b = real_bump(10, 16, 0.5, 0.7)](std::mt19937_64& rng, const G&) {
                   PointFunction f0 = b(rng);
                   PointFunction f1 = b(rng);
                   return std::make_pair(f0, f1);
                 }});
  }
  {
    SpaceModel s = translation_space({1.0, 2.0}, R, 32.0);
    v.push_back({s.name, s, line_q, false, r_shift(-4, 4), located_bumps(s, 2, {-8}, {8}, 0.5, 1.0)});
  }
  {
    SpaceModel s = translation_space({1.0}, Aff, 32.0);
    v.push_back({s.name, s, aff_q, false,
                 [](std::mt19937_64& rng) { return G::affine(std::exp(uniform(rng, -0.3, 0.3)), uniform(rng, -1, 1)); },
                 located_bumps(s, 1, {-0.5, -1.5}, {0.5, 1.5}, 0.4, 0.6)});
  }
  {
    SpaceModel s = translation_space({1.0}, E2, 10.0);
    v.push_back({s.name, s, e2_q, false, motion(1.5), located_bumps(s, 1, {-1.5, -1.5}, {1.5, 1.5}, 1.0, 1.2)});
  }
  {
    SpaceModel s = cyclic_rotation(12);
    v.push_back({s.name, s, exact_q, true, z_shift(-30, 30), dyadic_indicators(s, integer_points(0, 11))});
  }
  {
    SpaceModel s = trivial_action_space(5);
    v.push_back({s.name, s, exact_q, true, z_shift(-30, 30), dyadic_indicators(s, integer_points(0, 4))});
  }
  {
    SpaceModel s = disjoint_union({integer_translation(LineWeight::Uniform, 64), cyclic_rotation(12)});
    std::vector<Point> cand = integer_points(-12, 12);
    for (const auto& p : integer_points(0, 11)) cand.push_back(Point{1, p.coords});
    v.push_back({s.name, s, exact_q, true, z_shift(-10, 10), dyadic_indicators(s, cand)});
  }
  {
    SpaceModel s = coset_space(make_group_pair(E2, SubgroupKind::SO2), 16.0);
    v.push_back({s.name, s, plane_q, false, motion(2.0), located_bumps(s, 1, {-3, -3}, {3, 3}, 1.0, 1.5)});
  }
  {
    SpaceModel s = coset_space(make_group_pair(ZZ2, SubgroupKind::CyclicFactor), 16.0);
    v.push_back({s.name, s, exact_q, true, zz2, dyadic_indicators(s, integer_points(-8, 8))});
  }
  {
    SpaceModel s = krengel_space(E2, {{0.5, SubgroupKind::Trivial}, {0.5, SubgroupKind::SO2}}, 10.0);
    v.push_back({s.name, s, e2_q, false, motion(1.5), located_bumps(s, 2, {-1.5, -1.5}, {1.5, 1.5}, 1.0, 1.2)});
  }
  {
    SpaceModel s = krengel_space(ZZ2, {{0.5, SubgroupKind::Trivial}, {0.5, SubgroupKind::CyclicFactor}}, 16.0);
    std::vector<Point> cand = integer_points(-8, 8, 1, 2);
    for (const auto& p : integer_points(-8, 8)) cand.push_back(Point{1, p.coords});
    v.push_back({s.name, s, exact_q, true, zz2, dyadic_indicators(s, cand)});
  }
  {
    SpaceModel s = maharam_extend(circle_rotation(), 20.0);
    v.push_back({s.name, s, circle_q, false, z_shift(-20, 20), fibered(von_mises, -3, 3, 0.7, 1.2)});
  }
  {
    SpaceModel s = maharam_extend(integer_translation(LineWeight::Decaying, 64), 20.0);
    v.push_back({s.name, s, circle_q, false, z_shift(-4, 4), fibered(z_indicator, -3, 3, 0.7, 1.2)});
  }
  {
    SpaceModel s = maharam_extend(real_translation(LineWeight::Decaying, 20.0), 10.0);
    v.push_back({s.name, s, QuadratureSpec::gauss_legendre(16, 0.5), false, r_shift(-3, 3),
                 fibered(real_bump(10, 14, 0.5, 0.7), -2, 2, 0.7, 1.2)});
  }
  {
    // Fiber bumps kept away from the Laplace kink at t = log grad.
    SpaceModel s = maharam_probability_space(integer_translation(LineWeight::Decaying, 64), 20.0);
    v.push_back({s.name, s, circle_q, false, z_shift(-2, 2), fibered(z_indicator, 6, 8, 0.5, 0.6)});
  }
  {
    CocycleSpec psi = CocycleSpec::custom_map(
        [](const GroupElement& g, const Point&) { return std::ldexp(1.0, static_cast<int>(g.as_ints()[0])); },
        "2^g");
    SpaceModel s = skew_product(circle_rotation(), psi, FiberDensity::lebesgue(), 20.0);
    v.push_back({s.name, s, circle_q, false, z_shift(-3, 3), fibered(von_mises, -3, 3, 0.7, 1.2)});
  }
  return v;
}

// Exact rational check of the transport identity on discrete systems.
bool exact_transport(const DiscreteSystem& ds, std::mt19937_64& rng, int triples) {
  const std::vector<Word> words = words_within(ds, ds.exact_radius);
  for (int t = 0; t < triples; ++t) {
    const Word& w = words[uniform_int(rng, 0, static_cast<int>(words.size()) - 1)];
    std::map<int, Rational> f0, f1;
    for (int k = 0; k < 5; ++k) {
      f0[ds.core[uniform_int(rng, 0, static_cast<int>(ds.core.size()) - 1)]] = Rational(uniform_int(rng, 1, 9), 7);
      f1[ds.core[uniform_int(rng, 0, static_cast<int>(ds.core.size()) - 1)]] = Rational(uniform_int(rng, 1, 9), 5);
    }
    Rational lhs = 0, rhs = 0;
    for (const auto& [x, v1] : f1) {
      const auto y = apply_word(ds, w, x);
      const auto c = cocycle(ds, w, x);
      if (!y || !c) return false;
      auto it = f0.find(*y);
      if (it != f0.end()) lhs += ds.weights[x] * *c * it->second * v1;
    }
    const Word inv = negate_word(ds, w);
    for (const auto& [y, v0] : f0) {
      const auto x = apply_word(ds, inv, y);
      if (!x) return false;
      auto it = f1.find(*x);
      if (it != f1.end()) rhs += ds.weights[y] * v0 * it->second;
    }
    if (lhs != rhs) return false;
  }
  return true;
}

Outcome transport() {
  Outcome out;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int cases = 0;
  for (const auto& tc : transport_cases()) {
    double case_worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const GroupElement g = tc.draw_g(rng);
      const auto [f0, f1] = tc.draw_f(rng, g);
      const IdentityResidual r = transport_identity(tc.space, g, f0, f1, tc.scheme);
      case_worst = std::max(case_worst, r.residual);
    }
    ++cases;
    if (tc.exact) {
      out.require(case_worst == 0.0, tc.label + ": discrete residual not exactly zero");
    } else {
      worst = std::max(worst, case_worst);
      out.require(case_worst <= 1e-6, tc.label + ": residual " + std::to_string(case_worst));
    }
  }
  std::vector<DiscreteSystem> systems = {
      translation_system(20, 8, PointWeights::Decaying),
      rotation_system(12, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, Rational(1, 3)}),
      union_system({translation_system(12, 4, PointWeights::Decaying, Rational(1, 3)), rotation_system(7)})};
  for (int k = 0; k < 5; ++k) systems.push_back(testing::random_system(rng));
  for (const auto& ds : systems) out.require(exact_transport(ds, rng, 20), "exact rational identity on " + ds.group_name());
  out.detail << " " << cases << " catalog spaces x 20 triples, max continuous residual " << worst << "; "
             << systems.size() << " discrete systems exact in rationals";
  return out;
}

// ------------------------------------------------------------ criterion 3

Outcome maharam_suite() {
  Outcome out;
  const DecisionPolicy policy;
  const GroupModel R = GroupModel::real_vector(1);
  QuadratureSpec plane = QuadratureSpec::gauss_legendre(4, 2.0);
  plane.max_panels = 32;
  struct Case {
    SpaceModel s;
    TestFunction f;
    QuadratureSpec q;
    int windows;
    int points;
  };
  const std::vector<Case> cases = {
      {circle_rotation(), TestFunction::constant(), QuadratureSpec{}, 12, 5},
      {integer_translation(LineWeight::Uniform, 64), TestFunction::exp_decay(2.0), QuadratureSpec{}, 12, 5},
      {integer_translation(LineWeight::Decaying, 64), TestFunction::exp_decay(2.0), QuadratureSpec{}, 12, 5},
      {real_translation(LineWeight::Uniform, 32.0), TestFunction::gaussian(1.0), QuadratureSpec::gauss_legendre(8, 0.5), 10, 3},
      {translation_space({1.0, 2.0}, R, 32.0), TestFunction::gaussian(1.0), QuadratureSpec::gauss_legendre(8, 0.5), 10, 3},
      {coset_space(make_group_pair(GroupModel::euclidean_motions_2d(), SubgroupKind::SO2), 16.0),
       TestFunction::gaussian(8.0), plane, 12, 2},
      {cyclic_rotation(12), TestFunction::constant(), QuadratureSpec{}, 12, 5},
      {trivial_action_space(5), TestFunction::constant(), QuadratureSpec{}, 12, 5},
      {disjoint_union({integer_translation(LineWeight::Uniform, 64), cyclic_rotation(12)}), TestFunction::exp_decay(2.0),
       QuadratureSpec{}, 12, 6},
  };
  int compared = 0, agreed = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const Case& k = cases[c];
    for (const auto& wp : sample_points(k.s, k.points, 300 + c)) {
      const Verdict a = classify_point(hopf_transform(k.s, k.f, wp.point, k.windows, k.q), policy).verdict;
      const Verdict b = maharam_criterion(k.s, k.f, wp.point, default_r_grid(), k.windows, policy, k.q).verdict;
      if (a == Verdict::Undecided || b == Verdict::Undecided) continue;
      ++compared;
      agreed += a == b;
      out.require(a == b, k.s.name + ": classify_point and maharam_criterion disagree");
    }
  }
  out.detail << " level-set criterion agrees on " << agreed << "/" << compared << " decided instances;";

  // Maharam extensions.
  auto extension_verdicts = [&](const SpaceModel& base, const TestFunction& f, Verdict expected, const std::string& label) {
    const SpaceModel m = maharam_extend(base, 20.0);
    int ok = 0, n = 0;
    for (const auto& wp : sample_points(m, 10, 77)) {
      ++n;
      ok += classify_point(hopf_transform(m, f, wp.point, 12, QuadratureSpec{}), policy).verdict == expected;
    }
    out.detail << " " << label << " " << ok << "/" << n << ";";
    out.require(ok == n, label + ": wrong verdict on the extension");
  };
  extension_verdicts(circle_rotation(), TestFunction::constant(), Verdict::Conservative, "Maharam(circle) Conservative");
  extension_verdicts(integer_translation(LineWeight::Decaying, 64), TestFunction::exp_decay(2.0), Verdict::Dissipative,
                     "Maharam(Z-translation) Dissipative");

  // Lower bound for the probability-fiber cocycle.
  std::mt19937_64 rng(99);
  int violations = 0, samples = 0;
  const std::vector<SpaceModel> bases = {integer_translation(LineWeight::Decaying, 64),
                                         real_translation(LineWeight::Decaying, 32.0), circle_rotation(),
                                         cyclic_rotation(6, {1, 2, 3, 4, 5, 6})};
  std::exponential_distribution<double> laplace(1.0);
  for (int i = 0; i < 10000; ++i) {
    const SpaceModel& b = bases[i % bases.size()];
    const Point x = b.sampler(rng).point;
    const GroupElement g = sample_haar(b.group, rng, 40.0).element;
    const double t = (uniform_int(rng, 0, 1) ? 1.0 : -1.0) * laplace(rng);
    const double grad = rn_cocycle(b, g, x);
    const double hat = maharam_probability_cocycle(b, g, x, t);
    ++samples;
    if (hat < std::min(1.0, grad * grad) * (1.0 - 1e-12)) ++violations;
  }
  out.detail << " lower bound violations " << violations << "/" << samples;
  out.require(violations == 0, "probability cocycle lower bound violated");
  return out;
}

// ------------------------------------------------------------ criterion 4

Outcome lattice_identity() {
  Outcome out;
  std::mt19937_64 rng(4);
  const QuadratureSpec q = QuadratureSpec::gauss_legendre(16, 0.5);
  double worst = 0.0;
  struct Case {
    SpaceModel s;
    int windows;
    double spread;
  };
  const std::vector<Case> cases = {{real_translation(LineWeight::Uniform, 32.0), 6, 8.0},
                                   {translation_space({1.0}, GroupModel::real_vector(2), 32.0), 4, 3.0}};
  for (const auto& c : cases) {
    const LatticeData lat = LatticeData::standard(c.s.group.dim());
    for (int i = 0; i < 50; ++i) {
      Point x{0, {}};
      for (int d = 0; d < c.s.group.dim(); ++d) x.coords.push_back(uniform(rng, -c.spread, c.spread));
      const LatticeReduction r = lattice_reduce(c.s, lat, TestFunction::gaussian(uniform(rng, 0.7, 1.5)), x, c.windows, q);
      worst = std::max(worst, r.residual);
    }
  }
  out.detail << " 50 points on R and 50 on R^2, max window residual " << worst;
  out.require(worst <= 1e-6, "lattice residual above 1e-6");
  return out;
}

// ------------------------------------------------------------ criterion 5

Outcome weil() {
  Outcome out;
  const GroupModel E2 = GroupModel::euclidean_motions_2d();
  const GroupPair e2 = make_group_pair(E2, SubgroupKind::SO2);
  double worst = 0.0;
  for (double sigma : {0.8, 1.0, 1.5}) {
    const WeilResult r = weil_verify(
        e2,
        [&](const GroupElement& g) {
          const Motion& m = g.as_motion();
          return std::exp(-(m.vx * m.vx + m.vy * m.vy) / (2.0 * sigma * sigma));
        },
        ball_window(E2, 10.0), QuadratureSpec::gauss_legendre(8, 0.5));
    worst = std::max(worst, r.residual);
  }
  out.detail << " E2/SO2 residual " << worst << ";";
  out.require(worst <= 1e-6, "E2/SO2 Weil residual above 1e-6");

  const GroupModel ZZ2 = GroupModel::product(GroupModel::integer_lattice(1), GroupModel::finite_cyclic(2));
  const GroupPair zz2 = make_group_pair(ZZ2, SubgroupKind::CyclicFactor);
  const ExactWeilResult ex = weil_verify_exact(
      zz2,
      [](const GroupElement& g) {
        const auto k = g.first().as_ints()[0];
        return Rational(1 + g.second().as_residue(), 1 + k * k);
      },
      ball_window(ZZ2, 12.0));
  out.detail << " ZxZ/2 sides " << to_string(ex.lhs) << " = " << to_string(ex.rhs) << ";";
  out.require(ex.equal && ex.lhs == ex.rhs, "ZxZ/2 exact Weil sides differ");

  const CompactnessResult so2 = compactness_integral(e2);
  out.detail << " SO2 volume " << so2.value << ";";
  out.require(so2.finite && std::abs(so2.value - 2.0 * std::numbers::pi) <= 1e-9, "SO2 compactness integral");
  const CompactnessResult line = compactness_integral(make_group_pair(GroupModel::real_vector(2), SubgroupKind::Line));
  out.detail << " line subgroup: " << line.verdict;
  out.require(!line.finite && line.verdict == "infinite by growth", "line subgroup growth verdict");
  // Linear growth: doubling the radius doubles the window value.
  for (std::size_t i = 1; i < line.window_values.size(); ++i)
    out.require(std::abs(line.window_values[i] / line.window_values[i - 1] - line.radii[i] / line.radii[i - 1]) < 1e-9,
                "line subgroup window values not linear in the radius");
  return out;
}

// ------------------------------------------------------------ criterion 6

Outcome discrete_oracle() {
  Outcome out;
  std::mt19937_64 rng(6);
  int systems = 0, points = 0, conservative = 0;
  for (int i = 0; i < 200; ++i) {
    const DiscreteSystem ds = testing::random_system(rng);
    ++systems;
    const ExactPartition p = hopf_decompose_exact(ds);
    const auto oracle = testing::brute_force_conservative(ds);
    for (int x : ds.core) {
      ++points;
      const bool c = p.verdict.at(x) == ExactVerdict::Conservative;
      conservative += c;
      out.require(c == oracle.at(x), "system " + std::to_string(i) + " point " + ds.labels[x] + " disagrees");
    }
    std::set<int> dissipative(p.dissipative.begin(), p.dissipative.end());
    const std::set<int> covered = testing::saturate(ds, p.t_max.t_max);
    for (int x : p.dissipative) out.require(covered.count(x) > 0, "G.t_max misses a dissipative point");
    for (int x : p.t_max.t_max) {
      out.require(dissipative.count(x) > 0, "t_max meets the conservative part");
      out.require(!oracle.at(x), "t_max contains a point with infinite stabilizer");
    }
    out.require(wandering_tests(ds, p.t_max.t_max).is_transient, "t_max not transient");
  }
  out.detail << " " << systems << " random systems, " << points << " core points (" << conservative
             << " conservative) match the stabilizer-growth oracle; t_max covers and is transient";
  return out;
}

// ------------------------------------------------------------ criterion 7

// Number of distinct translates g.W over words of cost <= L (-1 if some
// translate leaves the truncation).
long distinct_translates(const DiscreteSystem& ds, const testing::PowerTable& pt, const std::vector<int>& w, int L) {
  std::map<std::vector<std::int64_t>, std::vector<int>> images;
  bool defined = true;
  for (int x : w)
    pt.for_each(x, L, [&](const std::vector<std::int64_t>& g, int y) {
      if (y < 0) defined = false;
      images[g].push_back(y);
    });
  if (!defined) return -1;
  std::set<std::vector<int>> distinct;
  for (auto& [g, ys] : images) {
    std::sort(ys.begin(), ys.end());
    distinct.insert(ys);
  }
  return static_cast<long>(distinct.size());
}

Outcome hajian_ito() {
  Outcome out;
  {
    const DiscreteSystem ds = rotation_system(12, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    const InvariantMeasureReport m = invariant_measure_search(ds);
    out.require(m.p1.size() == 12 && m.p_inf.empty() && m.n_part.empty(), "Z/12: P1 is not everything");
    out.require(m.acip.has_value(), "Z/12: no a.c.i.p.");
    if (m.acip)
      for (const auto& [x, v] : *m.acip) out.require(v == Rational(1, 12), "Z/12: a.c.i.p. not uniform");
    out.detail << " Z/12: P1 = all, a.c.i.p. uniform;";
  }
  {
    const DiscreteSystem ds = translation_system(30, 10, PointWeights::Decaying);
    const InvariantMeasureReport m = invariant_measure_search(ds);
    out.require(m.p_inf.size() == ds.core.size() && m.p1.empty(), "Z: P_inf is not everything");
    out.require(!m.acip.has_value(), "Z: a.c.i.p. reported");
    const WanderingReport w = wandering_tests(ds, {ds.index_of("0")});
    out.require(w.is_weakly_wandering && w.witness && w.witness->step == 1 && w.witness->factor == 0,
                "Z: {0} not weakly wandering along all of Z");
    out.detail << " Z: P_inf = all, witness ({0}, " << (w.witness ? w.witness->describe() : "none") << ");";
  }
  {
    const DiscreteSystem a = rotation_system(5), b = translation_system(12, 4), c = trivial_system(2);
    const DiscreteSystem ds = union_system({a, b, c});
    const InvariantMeasureReport m = invariant_measure_search(ds);
    out.require(m.p1.size() == 5 + 2 && m.p_inf.size() == 9 && m.n_part.empty(), "mixed union split");
    for (int x : m.p1) out.require(ds.labels[x].rfind("p1.", 0) != 0, "mixed union: translation point in P1");
    out.detail << " mixed union: |P1| = " << m.p1.size() << ", |P_inf| = " << m.p_inf.size() << ";";
  }
  // Brute force: no weakly wandering nonempty subset inside P1, and every
  // point of P_inf has a weakly wandering singleton.
  std::mt19937_64 rng(7);
  std::vector<DiscreteSystem> systems;
  for (int n = 1; n <= 12; ++n) systems.push_back(rotation_system(n));
  systems.push_back(trivial_system(4));
  systems.push_back(union_system({rotation_system(6), translation_system(10, 2)}));
  while (systems.size() < 40) {
    testing::RandomSystemOptions opt;
    opt.max_core = 12;
    systems.push_back(testing::random_system(rng, opt));
  }
  long subsets = 0;
  for (const auto& ds : systems) {
    const InvariantMeasureReport m = invariant_measure_search(ds);
    const testing::PowerTable pt(ds, 24);
    const auto orbits = certify_orbits(ds);
    for (int x : m.p_inf) out.require(wandering_tests(ds, {x}).is_weakly_wandering, "P_inf point without witness");
    std::map<int, std::vector<int>> p1_orbits;
    for (int x : m.p1) p1_orbits[orbit_of(orbits, x).base].push_back(x);
    for (const auto& [base, pts] : p1_orbits) {
      const int n = static_cast<int>(pts.size());
      for (int mask = 1; mask < (1 << n); ++mask) {
        std::vector<int> w;
        for (int i = 0; i < n; ++i)
          if (mask >> i & 1) w.push_back(pts[i]);
        ++subsets;
        // Finitely many translates, so any infinite S repeats one.
        const long a = distinct_translates(ds, pt, w, 12), b = distinct_translates(ds, pt, w, 24);
        out.require(a > 0 && a == b, "P1 subset with unbounded translates");
        out.require(!wandering_tests(ds, w).is_weakly_wandering, "weakly wandering subset inside P1");
      }
    }
  }
  out.detail << " brute force over " << subsets << " P1 subsets in " << systems.size() << " systems";
  return out;
}

// ------------------------------------------------------------ criterion 8

Outcome separator() {
  Outcome out;
  std::mt19937_64 rng(8);
  const QuadratureSpec q = QuadratureSpec::gauss_legendre(8, 0.5);
  const std::vector<SetDescriptor> basis = {component_set(0), component_set(1)};
  const std::vector<SetDescriptor> transient = {interval_set(-3, -2), interval_set(0, 1), interval_set(2, 4)};
  const SpaceModel two = translation_space({1.0, 1.0}, GroupModel::real_vector(1), 32.0);
  const SpaceModel line = disjoint_union({integer_translation(LineWeight::Uniform, 64),
                                          integer_translation(LineWeight::Decaying, 64)});
  int same_ok = 0, split_ok = 0;
  for (int i = 0; i < 50; ++i) {
    const bool discrete = i % 2 == 1;
    const SpaceModel& s = discrete ? line : two;
    const int comp = uniform_int(rng, 0, 1);
    const double x = discrete ? uniform_int(rng, -8, 8) : uniform(rng, -8, 8);
    const GroupElement g = discrete ? GroupElement::ints({uniform_int(rng, -5, 5)}) : GroupElement::reals({uniform(rng, -5, 5)});
    const Point x0{comp, {x}};
    const SeparatorTable t = orbit_separator(s, x0, act(s, g, x0), basis, transient, 8, q);
    same_ok += !t.separated;
    out.require(!t.separated, "same-orbit pair separated on " + s.name);
  }
  for (int i = 0; i < 50; ++i) {
    const bool discrete = i % 2 == 1;
    const SpaceModel& s = discrete ? line : two;
    const Point x0{0, {discrete ? uniform_int(rng, -8, 8) : uniform(rng, -8, 8)}};
    const Point x1{1, {discrete ? uniform_int(rng, -8, 8) : uniform(rng, -8, 8)}};
    const SeparatorTable t = orbit_separator(s, x0, x1, basis, transient, 8, q);
    split_ok += t.separated;
    out.require(t.separated, "distinct fibers not separated on " + s.name);
  }
  out.detail << " same orbit agree " << same_ok << "/50, distinct fibers separated " << split_ok << "/50";
  return out;
}

// ------------------------------------------------------------ criterion 9

Outcome determinism() {
  Outcome out;
  const Json config = Json::parse(R"({
    "scenario": "determinism",
    "seed": 424242,
    "group": "E2",
    "space": {"name": "krengel_space", "params": {"atoms": [{"weight": 0.5, "subgroup": "trivial"},
                                                             {"weight": 0.5, "subgroup": "SO2"}],
                                                  "truncation": 6}},
    "windows": {"max": 6},
    "quadrature": {"method": "monte-carlo", "samples": 512},
    "tasks": [
      {"id": "classify", "type": "classify", "f": {"family": "gaussian", "sigma": 2}, "samples": 3},
      {"id": "poincare", "type": "poincare", "set": {"type": "component", "component": 1}, "overlap_samples": 64},
      {"id": "weil", "type": "weil", "subgroup": "SO2", "radius": 4}
    ]
  })");
  const Json line = Json::parse(R"({
    "scenario": "determinism-line",
    "seed": 5,
    "space": {"name": "real_translation", "params": {"weights": "decaying", "truncation": 16}},
    "tasks": [
      {"id": "transform", "type": "transform", "f": {"family": "gaussian"}, "samples": 4},
      {"id": "returns", "type": "return-volume", "set": {"type": "interval", "lo": 0, "hi": 1}, "samples": 3},
      {"id": "maharam", "type": "maharam", "point": [0.5], "max_window": 6}
    ]
  })");
  const std::filesystem::path base = std::filesystem::temp_directory_path() / "hopf-acceptance";
  int reruns = 0;
  for (const Json* cfg : {&config, &line}) {
    std::vector<std::string> bytes;
    for (int k = 0; k < 2; ++k) {
      RunOptions opt;
      opt.out_dir = (base / (std::to_string(reruns) + "-" + std::to_string(k))).string();
      const RunOutcome r = run_scenario(*cfg, opt);
      std::ifstream in(std::filesystem::path(*opt.out_dir) / "report.json", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      bytes.push_back(ss.str());
      out.require(r.exit_code == 0, "scenario exited with " + std::to_string(r.exit_code));
    }
    ++reruns;
    out.require(!bytes[0].empty() && bytes[0] == bytes[1], "report bytes differ between reruns");
  }
  std::filesystem::remove_all(base);
  out.detail << " " << reruns << " scenarios rerun, report.json byte-identical";
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    Outcome (*run)();
    double budget;  // seconds, 0 = none
  };
  const std::vector<Criterion> criteria = {
      {1, "ground-truth classification", ground_truth, 60.0},
      {2, "transport identity residuals", transport, 120.0},
      {3, "level-set criterion and Maharam extension", maharam_suite, 0.0},
      {4, "lattice reduction identity", lattice_identity, 0.0},
      {5, "Weil formula and compactness integral", weil, 0.0},
      {6, "discrete oracle equivalence", discrete_oracle, 0.0},
      {7, "positive and null parts", hajian_ito, 0.0},
      {8, "orbit separator", separator, 0.0},
      {9, "determinism", determinism, 0.0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " exception: " << e.what();
    }
    const double secs = seconds_since(t0);
    if (c.budget > 0.0 && secs > c.budget) {
      o.pass = false;
      o.detail << " over the " << c.budget << " s budget;";
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.1f s", secs);
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << " (" << timing << "):"
              << o.detail.str() << std::endl;
    failed += !o.pass;
  }
  std::cout << (failed ? "FAIL" : "PASS") << ": " << criteria.size() - failed << "/" << criteria.size()
            << " acceptance criteria" << std::endl;
  return failed ? 1 : 0;
}
