#include "hopf/homogeneous.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hopf/error.hpp"

namespace hopf {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string to_string(SubgroupKind k) {
  switch (k) {
    case SubgroupKind::Trivial: return "trivial";
    case SubgroupKind::CyclicFactor: return "cyclic-factor";
    case SubgroupKind::SO2: return "SO2";
    case SubgroupKind::Line: return "line";
  }
  return "?";
}

std::string GroupPair::name() const {
  switch (subgroup) {
    case SubgroupKind::Trivial: return ambient.name() + "/trivial";
    case SubgroupKind::CyclicFactor: return ambient.name() + "/" + ambient.right().name();
    case SubgroupKind::SO2: return ambient.name() + "/SO2";
    case SubgroupKind::Line: return ambient.name() + "/Rx0";
  }
  return "?";
}

bool GroupPair::compact() const { return subgroup != SubgroupKind::Line; }

GroupPair make_group_pair(const GroupModel& ambient, SubgroupKind sub) {
  switch (sub) {
    case SubgroupKind::Trivial: break;
    case SubgroupKind::SO2:
      if (ambient.kind() != GroupKind::EuclideanMotions2D)
        throw DomainMismatch("SO2 subgroup requires E2, got " + ambient.name());
      break;
    case SubgroupKind::CyclicFactor:
      if (ambient.kind() != GroupKind::Product ||
          ambient.right().kind() != GroupKind::FiniteCyclic)
        throw DomainMismatch("cyclic-factor subgroup requires a product G x Z/n, got " +
                             ambient.name());
      break;
    case SubgroupKind::Line:
      if (ambient.kind() != GroupKind::RealVector || ambient.dim() != 2)
        throw DomainMismatch("line subgroup requires R^2, got " + ambient.name());
      break;
  }
  return GroupPair{ambient, sub};
}

std::vector<GroupPair> catalog_pairs() {
  return {
      make_group_pair(GroupModel::euclidean_motions_2d(), SubgroupKind::SO2),
      make_group_pair(GroupModel::product(GroupModel::integer_lattice(1), GroupModel::finite_cyclic(2)),
                      SubgroupKind::CyclicFactor),
      make_group_pair(GroupModel::real_vector(2), SubgroupKind::Trivial),
      make_group_pair(GroupModel::real_vector(2), SubgroupKind::Line),
  };
}

bool in_subgroup(const GroupPair& p, const GroupElement& g) {
  if (!belongs(p.ambient, g)) return false;
  switch (p.subgroup) {
    case SubgroupKind::Trivial: return g == identity(p.ambient);
    case SubgroupKind::SO2: {
      const Motion& m = g.as_motion();
      return m.vx == 0.0 && m.vy == 0.0;
    }
    case SubgroupKind::CyclicFactor: return g.first() == identity(p.ambient.left());
    case SubgroupKind::Line: return g.as_reals()[1] == 0.0;
  }
  return false;
}

GroupElement subgroup_element(const GroupPair& p, double param) {
  switch (p.subgroup) {
    case SubgroupKind::Trivial: return identity(p.ambient);
    case SubgroupKind::SO2: return GroupElement::motion(param, 0.0, 0.0);
    case SubgroupKind::CyclicFactor: {
      const std::int64_t n = p.ambient.right().order();
      std::int64_t k = static_cast<std::int64_t>(std::llround(param)) % n;
      if (k < 0) k += n;
      return GroupElement::pair(identity(p.ambient.left()), GroupElement::residue(k));
    }
    case SubgroupKind::Line: return GroupElement::reals({param, 0.0});
  }
  return {};
}

// All catalog subgroups are abelian, hence unimodular.
double subgroup_modular(const GroupPair&, const GroupElement&) { return 1.0; }

// Delta_G restricted to every catalog subgroup is 1 (the ambient groups in the
// catalog are unimodular), so the constant function satisfies the rho law.
double rho(const GroupPair&, const GroupElement&) { return 1.0; }

double rho_law_residual(const GroupPair& p, const GroupElement& g, const GroupElement& c) {
  const double lhs = rho(p, compose(p.ambient, g, c));
  const double rhs = subgroup_modular(p, c) / modular(p.ambient, c) * rho(p, g);
  return std::abs(lhs - rhs) / lhs;
}

GroupModel coset_chart(const GroupPair& p) {
  switch (p.subgroup) {
    case SubgroupKind::Trivial: return p.ambient;
    case SubgroupKind::SO2: return GroupModel::real_vector(2);
    case SubgroupKind::CyclicFactor: return p.ambient.left();
    case SubgroupKind::Line: return GroupModel::real_vector(1);
  }
  return p.ambient;
}

std::vector<double> project(const GroupPair& p, const GroupElement& g) {
  switch (p.subgroup) {
    case SubgroupKind::Trivial: return coordinates(p.ambient, g);
    case SubgroupKind::SO2: return {g.as_motion().vx, g.as_motion().vy};
    case SubgroupKind::CyclicFactor: return coordinates(p.ambient.left(), g.first());
    case SubgroupKind::Line: return {g.as_reals()[1]};
  }
  return {};
}

GroupElement section(const GroupPair& p, std::span<const double> y) {
  switch (p.subgroup) {
    case SubgroupKind::Trivial: return from_coordinates(p.ambient, y);
    case SubgroupKind::SO2: return GroupElement::motion(0.0, y[0], y[1]);
    case SubgroupKind::CyclicFactor:
      return GroupElement::pair(from_coordinates(p.ambient.left(), y),
                                identity(p.ambient.right()));
    case SubgroupKind::Line: return GroupElement::reals({0.0, y[0]});
  }
  return {};
}

std::vector<double> act_on_coset(const GroupPair& p, const GroupElement& g, std::span<const double> y) {
  return project(p, compose(p.ambient, g, section(p, y)));
}

double integrate_subgroup(const GroupPair& p, const std::function<double(const GroupElement&)>& fn,
                          const QuadratureSpec& scheme) {
  switch (p.subgroup) {
    case SubgroupKind::Trivial: return checked(fn(identity(p.ambient)));
    case SubgroupKind::SO2: {
      const double lo[1] = {0.0}, hi[1] = {kTwoPi};
      QuadratureSpec s = scheme;
      if (s.method == QuadratureMethod::Auto || s.method == QuadratureMethod::MonteCarlo)
        s.method = QuadratureMethod::GaussLegendre;
      return integrate_box(
          lo, hi, [&](std::span<const double> u) { return fn(GroupElement::motion(u[0], 0.0, 0.0)); },
          s, s.method);
    }
    case SubgroupKind::CyclicFactor: {
      double acc = 0.0;
      for (int k = 0; k < p.ambient.right().order(); ++k) acc += checked(fn(subgroup_element(p, k)));
      return acc;
    }
    case SubgroupKind::Line:
      throw NonCompactSubgroup("R x {0} is not compact in R^2");
  }
  return 0.0;
}

double subgroup_volume(const GroupPair& p) {
  return integrate_subgroup(p, [](const GroupElement&) { return 1.0; }, QuadratureSpec{});
}

double integrate_cosets(const GroupPair& p, const std::function<double(std::span<const double>)>& fn,
                        double radius, const QuadratureSpec& scheme) {
  const GroupModel chart = coset_chart(p);
  if (p.subgroup == SubgroupKind::SO2) {
    // Cartesian box: a different node set from the polar chart used on G.
    const double lo[2] = {-radius, -radius}, hi[2] = {radius, radius};
    QuadratureSpec s = scheme;
    return integrate_box(lo, hi, fn, s, resolve_method(s, 2));
  }
  if (chart.kind() == GroupKind::RealVector && chart.dim() <= 2) {
    std::vector<double> lo(chart.dim(), -radius), hi(chart.dim(), radius);
    return integrate_box(lo, hi, fn, scheme, resolve_method(scheme, chart.dim()));
  }
  return haar_integrate(
      chart, [&](const GroupElement& y) { const auto c = coordinates(chart, y); return fn(c); },
      ball_window(chart, radius), scheme);
}

WeilResult weil_verify(const GroupPair& p, const Integrand& phi, const Window& window,
                       const QuadratureSpec& scheme) {
  if (!p.compact()) throw NonCompactSubgroup("Weil verification needs a compact subgroup");
  WeilResult r;
  r.lhs = haar_integrate(p.ambient, phi, window, scheme);
  r.rhs = integrate_cosets(
      p,
      [&](std::span<const double> y) {
        const GroupElement g = section(p, y);
        const double inner = integrate_subgroup(
            p,
            [&](const GroupElement& c) {
              return phi(compose(p.ambient, g, c)) * modular(p.ambient, c) / subgroup_modular(p, c);
            },
            scheme);
        return inner / rho(p, g);
      },
      window.radius, scheme);
  r.residual = std::abs(r.lhs - r.rhs) / std::max(std::abs(r.lhs), 1e-300);
  return r;
}

ExactWeilResult weil_verify_exact(const GroupPair& p,
                                  const std::function<Rational(const GroupElement&)>& phi,
                                  const Window& window) {
  if (!p.ambient.discrete()) throw UnsupportedScheme("exact Weil check needs a discrete group");
  if (!p.compact()) throw NonCompactSubgroup("Weil verification needs a compact subgroup");
  ExactWeilResult r;
  for (const auto& g : enumerate_ball(p.ambient, window.radius)) r.lhs += phi(g);
  const GroupModel chart = coset_chart(p);
  std::vector<GroupElement> subgroup;
  if (p.subgroup == SubgroupKind::CyclicFactor) {
    for (int k = 0; k < p.ambient.right().order(); ++k) subgroup.push_back(subgroup_element(p, k));
  } else {
    subgroup.push_back(identity(p.ambient));
  }
  for (const auto& y : enumerate_ball(chart, window.radius)) {
    const GroupElement g = section(p, coordinates(chart, y));
    // rho, Delta_G and Delta_C are identically 1 on discrete catalog pairs.
    for (const auto& c : subgroup) r.rhs += phi(compose(p.ambient, g, c));
  }
  r.equal = (r.lhs == r.rhs);
  return r;
}

HomogeneousMeasure pushforward_haar(const GroupPair& p, const Window& window,
                                    const QuadratureSpec& scheme, std::uint64_t seed) {
  if (!p.compact()) throw NonCompactSubgroup(p.name() + ": subgroup is not compact");
  const GroupModel chart = coset_chart(p);
  const int dim = coordinate_count(chart);
  HomogeneousMeasure m;
  m.domain = p.name();
  m.provenance = MeasureProvenance::PushforwardOfHaar;
  // Pointwise density: the fiber integral int_C 1/rho(sigma(y)c) dlambda_C.
  const GroupPair pp = p;
  m.density = [pp, scheme](std::span<const double> y) {
    const GroupElement g = section(pp, y);
    return integrate_subgroup(
        pp, [&](const GroupElement& c) { return 1.0 / rho(pp, compose(pp.ambient, g, c)); }, scheme);
  };

  // Grid of bumps h_j: ratio of int_G h_j(q(g)) dlambda_G to int h_j d(base).
  const double step = 2.0;
  std::vector<std::vector<double>> centers;
  if (dim == 1) {
    for (int i = -1; i <= 1; ++i) centers.push_back({i * step});
  } else if (dim == 2) {
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j) centers.push_back({i * step, j * step});
  } else {
    centers.push_back(std::vector<double>(dim, 0.0));
  }
  const bool discrete = chart.discrete();
  auto bump = [discrete](std::span<const double> y, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) s += (y[k] - c[k]) * (y[k] - c[k]);
    // Discrete charts use a finitely supported bump so sums are exact.
    if (discrete) return s <= 4.0 ? 1.0 + s : 0.0;
    return std::exp(-0.5 * s);
  };
  std::vector<double> ratios;
  for (const auto& c : centers) {
    const double up = haar_integrate(
        p.ambient, [&](const GroupElement& g) { return bump(project(p, g), c); }, window, scheme);
    const double base = integrate_cosets(
        p, [&](std::span<const double> y) { return bump(y, c); }, window.radius, scheme);
    ratios.push_back(up / base);
  }
  double mean = 0.0;
  for (double r : ratios) mean += r;
  mean /= ratios.size();
  m.constant = mean;
  for (double r : ratios) m.constant_spread = std::max(m.constant_spread, std::abs(r - mean));

  // Invariance of the base measure under sampled ambient elements.
  std::mt19937_64 rng(seed);
  const std::vector<double> c0(dim, 0.0);
  const double ref = integrate_cosets(
      p, [&](std::span<const double> y) { return bump(y, c0); }, window.radius, scheme);
  for (int i = 0; i < 8; ++i) {
    const GroupElement g = sample_haar(p.ambient, rng, 2.0).element;
    const GroupElement gi = inverse(p.ambient, g);
    const double moved = integrate_cosets(
        p, [&](std::span<const double> y) { return bump(act_on_coset(p, gi, y), c0); },
        window.radius, scheme);
    m.invariance_residual = std::max(m.invariance_residual, std::abs(moved - ref) / ref);
  }
  return m;
}

HomogeneousMeasure normalized_invariant(const GroupPair& p, double truncation) {
  if (!p.compact()) throw NonCompactSubgroup(p.name() + ": subgroup is not compact");
  HomogeneousMeasure m;
  m.domain = p.name();
  m.provenance = MeasureProvenance::Normalized;
  double mass = 0.0;
  if (p.subgroup == SubgroupKind::SO2) {
    mass = 4.0 * truncation * truncation;
  } else {
    mass = ball_volume(coset_chart(p), truncation);
  }
  m.constant = 1.0 / mass;
  const double c = m.constant;
  m.density = [c](std::span<const double>) { return c; };
  return m;
}

CompactnessResult compactness_integral(const GroupPair& p, int max_window,
                                       const QuadratureSpec& scheme) {
  CompactnessResult r;
  if (p.compact()) {
    r.finite = true;
    r.value = integrate_subgroup(
        p,
        [&](const GroupElement& c) { return modular(p.ambient, c) / subgroup_modular(p, c); },
        scheme);
    r.verdict = "finite";
    return r;
  }
  // Line subgroup: integrate the (constant) modular ratio over K_n cap C.
  QuadratureSpec s = scheme;
  if (s.method == QuadratureMethod::Auto) s.method = QuadratureMethod::GaussLegendre;
  for (int n = 1; n <= max_window; ++n) {
    const double rad = std::ldexp(1.0, n);
    const double lo[1] = {-rad}, hi[1] = {rad};
    const double v = integrate_box(
        lo, hi,
        [&](std::span<const double> t) {
          const GroupElement c = subgroup_element(p, t[0]);
          return modular(p.ambient, c) / subgroup_modular(p, c);
        },
        s, s.method);
    r.radii.push_back(rad);
    r.window_values.push_back(v);
  }
  // Growth rule: every one of the last three doublings multiplies the value by >= 1.5.
  const std::size_t n = r.window_values.size();
  bool growing = n >= 4;
  for (std::size_t k = n >= 3 ? n - 3 : 0; growing && k < n; ++k)
    growing = r.window_values[k] >= 1.5 * r.window_values[k - 1];
  r.verdict = growing ? "infinite by growth" : "undecided";
  return r;
}

}  // namespace hopf
