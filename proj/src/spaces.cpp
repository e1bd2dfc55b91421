// Catalog of nonsingular G-spaces.
#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hopf/error.hpp"
#include "hopf/gspace.hpp"

namespace hopf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double integrate_interval(double a, double b, const std::function<double(double)>& fn,
                          const QuadratureSpec& spec) {
  const double lo[1] = {a}, hi[1] = {b};
  return integrate_box(lo, hi, [&](std::span<const double> u) { return fn(u[0]); }, spec,
                       resolve_method(spec, 1));
}

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::int64_t shift_of(const GroupElement& g) { return g.as_ints().at(0); }

// Locations of group coordinates seen by test functions.
std::vector<double> group_location(const GroupModel& g, const std::vector<double>& c) {
  switch (g.kind()) {
    case GroupKind::AffineLine: return {std::log(c[0]), c[1]};
    case GroupKind::EuclideanMotions2D: return {c[1], c[2]};
    default: return c;
  }
}

SpaceModel finite_z_space(std::string name, int n, std::vector<double> weights,
                          std::function<std::int64_t(std::int64_t, std::int64_t)> move,
                          bool trivial) {
  if (n < 1) throw DomainMismatch("finite space needs at least one point");
  if (weights.empty()) weights.assign(n, 1.0);
  if (static_cast<int>(weights.size()) != n) throw DomainMismatch("weight count mismatch");
  for (double w : weights)
    if (!(w > 0.0)) throw DomainMismatch("weights must be positive");
  SpaceModel s;
  s.name = std::move(name);
  s.group = GroupModel::integer_lattice(1);
  s.domain = DomainKind::LabeledFinite;
  double total = 0.0;
  for (double w : weights) total += w;
  s.truncation_mass = total;
  s.truncation = "whole space (" + std::to_string(n) + " points)";
  s.measure_preserving =
      trivial || std::all_of(weights.begin(), weights.end(), [&](double w) { return w == weights[0]; });
  s.contains = [n](const Point& x) {
    return x.component == 0 && x.coords.size() == 1 && is_integer(x.coords[0]) && x.coords[0] >= 0 &&
           x.coords[0] < n;
  };
  s.act = [move](const GroupElement& g, const Point& x) {
    return Point{0, {static_cast<double>(move(static_cast<std::int64_t>(x.coords[0]), shift_of(g)))}};
  };
  s.cocycle = [weights, move](const GroupElement& g, const Point& x) {
    const auto k = static_cast<std::int64_t>(x.coords[0]);
    return weights[move(k, shift_of(g))] / weights[k];
  };
  s.log_cocycle = [weights, move](const GroupElement& g, const Point& x) {
    const auto k = static_cast<std::int64_t>(x.coords[0]);
    return std::log(weights[move(k, shift_of(g))]) - std::log(weights[k]);
  };
  s.locate = [](const Point& x) { return Location{x.coords, 1.0}; };
  s.sampler = [weights, total](std::mt19937_64& rng) {
    std::discrete_distribution<int> d(weights.begin(), weights.end());
    return WeightedPoint{Point{0, {static_cast<double>(d(rng))}}, total};
  };
  s.integrate = [weights, n](const PointFunction& h, const QuadratureSpec&) {
    double acc = 0.0;
    for (int k = 0; k < n; ++k) acc += weights[k] * checked(h(Point{0, {static_cast<double>(k)}}));
    return acc;
  };
  return s;
}

}  // namespace

SpaceModel circle_rotation(double alpha) {
  SpaceModel s;
  s.name = "circle_rotation(alpha=" + fmt(alpha) + ")";
  s.group = GroupModel::integer_lattice(1);
  s.domain = DomainKind::Circle;
  s.measure_preserving = true;
  s.truncation_mass = 1.0;
  s.truncation = "whole circle [0,1)";
  s.metadata["alpha"] = fmt(alpha);
  s.contains = [](const Point& x) {
    return x.component == 0 && x.coords.size() == 1 && x.coords[0] >= 0.0 && x.coords[0] < 1.0;
  };
  s.act = [alpha](const GroupElement& g, const Point& x) {
    double y = x.coords[0] + static_cast<double>(shift_of(g)) * alpha;
    y -= std::floor(y);
    if (y >= 1.0) y = 0.0;
    return Point{0, {y}};
  };
  s.cocycle = [](const GroupElement&, const Point&) { return 1.0; };
  s.log_cocycle = [](const GroupElement&, const Point&) { return 0.0; };
  s.locate = [](const Point& x) { return Location{x.coords, 1.0}; };
  s.sampler = [](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return WeightedPoint{Point{0, {u(rng)}}, 1.0};
  };
  s.integrate = [](const PointFunction& h, const QuadratureSpec& spec) {
    return integrate_interval(0.0, 1.0, [&](double x) { return h(Point{0, {x}}); }, spec);
  };
  s.distance = [](const Point& a, const Point& b) {
    const double d = std::abs(a.coords[0] - b.coords[0]);
    return std::min(d, 1.0 - d);
  };
  return s;
}

SpaceModel integer_translation(LineWeight w, int truncation) {
  if (truncation < 1) throw DomainMismatch("truncation must be positive");
  const bool decay = (w == LineWeight::Decaying);
  SpaceModel s;
  s.name = decay ? "integer_translation(weights=2^-|k|)" : "integer_translation(counting)";
  s.group = GroupModel::integer_lattice(1);
  s.domain = DomainKind::IntegerLine;
  s.measure_preserving = !decay;
  const int T = truncation;
  double total = 0.0;
  std::vector<double> weights;
  for (int k = -T; k <= T; ++k) {
    weights.push_back(decay ? std::ldexp(1.0, -std::abs(k)) : 1.0);
    total += weights.back();
  }
  s.truncation_mass = total;
  s.truncation = "{-" + std::to_string(T) + ".." + std::to_string(T) + "}";
  s.contains = [](const Point& x) {
    return x.component == 0 && x.coords.size() == 1 && is_integer(x.coords[0]);
  };
  s.act = [](const GroupElement& g, const Point& x) {
    return Point{0, {x.coords[0] + static_cast<double>(shift_of(g))}};
  };
  s.cocycle = [decay](const GroupElement& g, const Point& x) {
    if (!decay) return 1.0;
    const double k = x.coords[0];
    return std::ldexp(1.0, static_cast<int>(std::abs(k) - std::abs(k + shift_of(g))));
  };
  s.log_cocycle = [decay](const GroupElement& g, const Point& x) {
    if (!decay) return 0.0;
    const double k = x.coords[0];
    return (std::abs(k) - std::abs(k + static_cast<double>(shift_of(g)))) * std::numbers::ln2;
  };
  s.locate = [](const Point& x) { return Location{x.coords, 1.0}; };
  s.sampler = [weights, total, T](std::mt19937_64& rng) {
    std::discrete_distribution<int> d(weights.begin(), weights.end());
    return WeightedPoint{Point{0, {static_cast<double>(d(rng) - T)}}, total};
  };
  s.integrate = [weights, T](const PointFunction& h, const QuadratureSpec&) {
    double acc = 0.0;
    for (int k = -T; k <= T; ++k) acc += weights[k + T] * checked(h(Point{0, {static_cast<double>(k)}}));
    return acc;
  };
  return s;
}

SpaceModel real_translation(LineWeight w, double truncation) {
  if (!(truncation > 0.0)) throw DomainMismatch("truncation must be positive");
  const bool decay = (w == LineWeight::Decaying);
  const double T = truncation;
  SpaceModel s;
  s.name = decay ? "real_translation(density=e^-|x|)" : "real_translation(lebesgue)";
  s.group = GroupModel::real_vector(1);
  s.domain = DomainKind::RealLine;
  s.measure_preserving = !decay;
  s.truncation_mass = decay ? 2.0 * (-std::expm1(-T)) : 2.0 * T;
  s.truncation = "[-" + fmt(T) + ", " + fmt(T) + "]";
  s.contains = [](const Point& x) {
    return x.component == 0 && x.coords.size() == 1 && std::isfinite(x.coords[0]);
  };
  s.act = [](const GroupElement& g, const Point& x) { return Point{0, {x.coords[0] + g.as_reals().at(0)}}; };
  s.log_cocycle = [decay](const GroupElement& g, const Point& x) {
    if (!decay) return 0.0;
    return std::abs(x.coords[0]) - std::abs(x.coords[0] + g.as_reals().at(0));
  };
  auto lc = s.log_cocycle;
  s.cocycle = [lc](const GroupElement& g, const Point& x) { return std::exp(lc(g, x)); };
  s.locate = [](const Point& x) { return Location{x.coords, 1.0}; };
  const double mass = s.truncation_mass;
  s.sampler = [decay, T, mass](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (!decay) return WeightedPoint{Point{0, {T * (2.0 * u(rng) - 1.0)}}, mass};
    // |x| from the exponential law truncated to [0, T], random sign.
    const double r = -std::log1p(u(rng) * std::expm1(-T));
    const double x = u(rng) < 0.5 ? -r : r;
    return WeightedPoint{Point{0, {x}}, mass};
  };
  s.integrate = [decay, T](const PointFunction& h, const QuadratureSpec& spec) {
    auto f = [&](double x) { return (decay ? std::exp(-std::abs(x)) : 1.0) * h(Point{0, {x}}); };
    return integrate_interval(-T, 0.0, f, spec) + integrate_interval(0.0, T, f, spec);
  };
  return s;
}

SpaceModel translation_space(const std::vector<double>& atom_weights, const GroupModel& g,
                             double truncation) {
  if (atom_weights.empty()) throw DomainMismatch("translation space needs at least one atom");
  double total = 0.0;
  for (double w : atom_weights) {
    if (!(w > 0.0)) throw DomainMismatch("atom weights must be positive");
    total += w;
  }
  const int atoms = static_cast<int>(atom_weights.size());
  const int nc = coordinate_count(g);
  SpaceModel s;
  std::ostringstream os;
  os.precision(17);
  os << "translation_space(" << g.name() << ", atoms={";
  for (int i = 0; i < atoms; ++i) os << (i ? ", " : "") << atom_weights[i];
  os << "})";
  s.name = os.str();
  s.group = g;
  s.domain = DomainKind::GroupCopy;
  s.components = atoms;
  s.measure_preserving = true;
  s.truncation_mass = total * ball_volume(g, truncation);
  s.truncation = "W x " + ball_window(g, truncation).description;
  s.contains = [g, atoms, nc](const Point& x) {
    if (x.component < 0 || x.component >= atoms || static_cast<int>(x.coords.size()) != nc) return false;
    try {
      return belongs(g, from_coordinates(g, x.coords));
    } catch (const Error&) {
      return false;
    }
  };
  s.act = [g](const GroupElement& h, const Point& x) {
    return Point{x.component, coordinates(g, compose(g, h, from_coordinates(g, x.coords)))};
  };
  s.cocycle = [](const GroupElement&, const Point&) { return 1.0; };
  s.log_cocycle = [](const GroupElement&, const Point&) { return 0.0; };
  s.locate = [g](const Point& x) { return Location{group_location(g, x.coords), 1.0}; };
  s.sampler = [g, atom_weights, total, truncation](std::mt19937_64& rng) {
    std::discrete_distribution<int> d(atom_weights.begin(), atom_weights.end());
    const int c = d(rng);
    WeightedElement e = sample_haar(g, rng, truncation);
    return WeightedPoint{Point{c, coordinates(g, e.element)}, total * e.weight};
  };
  s.integrate = [g, atom_weights, truncation](const PointFunction& h, const QuadratureSpec& spec) {
    double acc = 0.0;
    const Window w = ball_window(g, truncation);
    for (std::size_t c = 0; c < atom_weights.size(); ++c) {
      const int ci = static_cast<int>(c);
      acc += atom_weights[c] *
             haar_integrate(g, [&](const GroupElement& e) { return h(Point{ci, coordinates(g, e)}); },
                            w, spec);
    }
    return acc;
  };
  if (g.kind() == GroupKind::EuclideanMotions2D) {
    s.distance = [](const Point& a, const Point& b) {
      const double d = std::abs(a.coords[0] - b.coords[0]);
      return std::max({std::min(d, kTwoPi - d), std::abs(a.coords[1] - b.coords[1]),
                       std::abs(a.coords[2] - b.coords[2])});
    };
  }
  return s;
}

SpaceModel cyclic_rotation(int n, std::vector<double> weights) {
  return finite_z_space(
      "cyclic_rotation(Z on Z/" + std::to_string(n) + ")", n, std::move(weights),
      [n](std::int64_t k, std::int64_t g) {
        const std::int64_t r = (k + g) % n;
        return r < 0 ? r + n : r;
      },
      false);
}

SpaceModel trivial_action_space(int n) {
  return finite_z_space("trivial_action(" + std::to_string(n) + " points)", n, {},
                        [](std::int64_t k, std::int64_t) { return k; }, true);
}

SpaceModel disjoint_union(const std::vector<SpaceModel>& input, std::vector<double> weights) {
  if (input.empty()) throw DomainMismatch("disjoint union of nothing");
  if (weights.empty()) weights.assign(input.size(), 1.0);
  if (weights.size() != input.size()) throw DomainMismatch("union weight count mismatch");
  // Flatten nested unions so every part is a non-union space.
  std::vector<std::shared_ptr<const SpaceModel>> parts;
  std::vector<double> pw;
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (!(weights[i] > 0.0)) throw DomainMismatch("union weights must be positive");
    if (input[i].group != input[0].group)
      throw DomainMismatch("union parts act by different groups: " + input[0].group.name() +
                           " vs " + input[i].group.name());
    if (input[i].domain == DomainKind::DisjointUnion || input[i].domain == DomainKind::KrengelDiscrete) {
      for (std::size_t k = 0; k < input[i].parts.size(); ++k) {
        parts.push_back(input[i].parts[k]);
        pw.push_back(weights[i] * input[i].part_weights[k]);
      }
    } else {
      parts.push_back(std::make_shared<const SpaceModel>(input[i]));
      pw.push_back(weights[i]);
    }
  }
  // Global component c -> (part, local component).
  std::vector<int> offset;
  int total_components = 0;
  for (const auto& p : parts) {
    offset.push_back(total_components);
    total_components += p->components;
  }
  auto locate_part = [parts, offset](int c) -> std::pair<int, int> {
    if (c < 0) return {-1, 0};
    for (std::size_t i = parts.size(); i-- > 0;)
      if (c >= offset[i]) return c - offset[i] < parts[i]->components ? std::pair<int, int>{static_cast<int>(i), c - offset[i]} : std::pair<int, int>{-1, 0};
    return {-1, 0};
  };

  SpaceModel s;
  std::string name = "disjoint_union(";
  for (std::size_t i = 0; i < parts.size(); ++i) name += (i ? ", " : "") + parts[i]->name;
  s.name = name + ")";
  s.group = input[0].group;
  s.domain = DomainKind::DisjointUnion;
  s.components = total_components;
  s.parts = parts;
  s.part_weights = pw;
  s.measure_preserving = std::all_of(parts.begin(), parts.end(), [](const auto& p) { return p->measure_preserving; });
  double mass = 0.0;
  for (std::size_t i = 0; i < parts.size(); ++i) mass += pw[i] * parts[i]->truncation_mass;
  s.truncation_mass = mass;
  s.truncation = "union of piece truncations";
  for (std::size_t i = 0; i < parts.size(); ++i)
    s.metadata["piece." + std::to_string(i)] = parts[i]->name + " @ weight " + fmt(pw[i]);

  auto local = [locate_part](const Point& x) -> std::pair<int, Point> {
    const auto [i, c] = locate_part(x.component);
    return {i, Point{c, x.coords}};
  };
  s.contains = [parts, local](const Point& x) {
    const auto [i, y] = local(x);
    return i >= 0 && parts[i]->contains(y);
  };
  s.act = [parts, offset, local](const GroupElement& g, const Point& x) {
    const auto [i, y] = local(x);
    Point z = parts[i]->act(g, y);
    z.component += offset[i];
    return z;
  };
  s.cocycle = [parts, local](const GroupElement& g, const Point& x) {
    const auto [i, y] = local(x);
    return parts[i]->cocycle(g, y);
  };
  s.log_cocycle = [parts, local](const GroupElement& g, const Point& x) {
    const auto [i, y] = local(x);
    return parts[i]->log_cocycle(g, y);
  };
  s.locate = [parts, local](const Point& x) {
    const auto [i, y] = local(x);
    return parts[i]->locate(y);
  };
  s.distance = [parts, local](const Point& a, const Point& b) {
    const auto [i, ya] = local(a);
    const auto [j, yb] = local(b);
    if (i != j) return std::numeric_limits<double>::infinity();
    return point_distance(*parts[i], ya, yb);
  };
  std::vector<double> piece_mass;
  for (std::size_t i = 0; i < parts.size(); ++i) piece_mass.push_back(pw[i] * parts[i]->truncation_mass);
  s.sampler = [parts, offset, piece_mass, mass](std::mt19937_64& rng) {
    std::discrete_distribution<int> d(piece_mass.begin(), piece_mass.end());
    const int i = d(rng);
    WeightedPoint wp = parts[i]->sampler(rng);
    wp.point.component += offset[i];
    wp.weight = mass;
    return wp;
  };
  s.integrate = [parts, offset, pw](const PointFunction& h, const QuadratureSpec& spec) {
    double acc = 0.0;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const int off = offset[i];
      acc += pw[i] * parts[i]->integrate(
                         [&](const Point& y) { return h(Point{y.component + off, y.coords}); }, spec);
    }
    return acc;
  };
  return s;
}

SpaceModel coset_space(const GroupPair& pair, double truncation) {
  if (!pair.compact()) throw NonCompactSubgroup(pair.name() + ": subgroup is not compact");
  const GroupModel chart = coset_chart(pair);
  if (pair.subgroup == SubgroupKind::Trivial) {
    SpaceModel s = translation_space({1.0}, pair.ambient, truncation);
    s.name = "coset_space(" + pair.name() + ")";
    s.metadata["stabilizer.0"] = "trivial";
    return s;
  }
  const double fiber = subgroup_volume(pair);
  const int nc = coordinate_count(chart);
  SpaceModel s;
  s.name = "coset_space(" + pair.name() + ")";
  s.group = pair.ambient;
  s.domain = pair.subgroup == SubgroupKind::SO2 ? DomainKind::CosetPlane : DomainKind::IntegerLine;
  s.measure_preserving = true;
  s.truncation_mass = fiber * ball_volume(chart, truncation);
  s.truncation = ball_window(chart, truncation).description;
  s.metadata["stabilizer.0"] = "conjugate of " + to_string(pair.subgroup) + " subgroup";
  s.metadata["measure"] = "pushforward of Haar = " + fmt(fiber) + " x Haar(" + chart.name() + ")";
  s.contains = [chart, nc](const Point& x) {
    if (x.component != 0 || static_cast<int>(x.coords.size()) != nc) return false;
    try {
      return belongs(chart, from_coordinates(chart, x.coords));
    } catch (const Error&) {
      return false;
    }
  };
  s.act = [pair](const GroupElement& g, const Point& x) {
    return Point{0, act_on_coset(pair, g, x.coords)};
  };
  s.cocycle = [](const GroupElement&, const Point&) { return 1.0; };
  s.log_cocycle = [](const GroupElement&, const Point&) { return 0.0; };
  s.locate = [](const Point& x) { return Location{x.coords, 1.0}; };
  s.sampler = [chart, truncation, fiber](std::mt19937_64& rng) {
    WeightedElement e = sample_haar(chart, rng, truncation);
    return WeightedPoint{Point{0, coordinates(chart, e.element)}, fiber * e.weight};
  };
  s.integrate = [chart, truncation, fiber](const PointFunction& h, const QuadratureSpec& spec) {
    return fiber * haar_integrate(
                       chart, [&](const GroupElement& e) { return h(Point{0, coordinates(chart, e)}); },
                       ball_window(chart, truncation), spec);
  };
  if (s.domain == DomainKind::CosetPlane) {
    s.distance = [](const Point& a, const Point& b) {
      return std::hypot(a.coords[0] - b.coords[0], a.coords[1] - b.coords[1]);
    };
  }
  return s;
}

SpaceModel krengel_space(const GroupModel& g, const std::vector<KrengelAtom>& atoms,
                         double truncation) {
  if (atoms.empty()) throw DomainMismatch("Krengel space needs at least one atom");
  double total = 0.0;
  std::vector<SpaceModel> parts;
  std::vector<double> weights;
  for (const auto& a : atoms) {
    if (!(a.weight > 0.0)) throw DomainMismatch("Krengel weights must be positive");
    total += a.weight;
    parts.push_back(coset_space(make_group_pair(g, a.subgroup), truncation));
    weights.push_back(a.weight);
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainMismatch("Krengel weights must sum to 1");
  SpaceModel s = disjoint_union(parts, weights);
  s.domain = DomainKind::KrengelDiscrete;
  s.name = "krengel_space(" + g.name() + ", " + std::to_string(atoms.size()) + " atoms)";
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    s.metadata["stabilizer." + std::to_string(i)] =
        atoms[i].subgroup == SubgroupKind::Trivial ? "trivial"
                                                   : "conjugate of " + to_string(atoms[i].subgroup) + " subgroup";
    s.metadata["kappa." + std::to_string(i)] = "pushforward of Haar, truncated to radius " + fmt(truncation);
  }
  return s;
}

// ------------------------------------------------------------ fiber products

namespace {

Point base_point(const Point& x) {
  return Point{x.component, std::vector<double>(x.coords.begin(), x.coords.end() - 1)};
}

// X x R with g.(x,t) = (g.x, t - log_psi(g,x)) and measure mu x q(t)dt.
SpaceModel fiber_product(const SpaceModel& base_in,
                         std::function<double(const GroupElement&, const Point&)> log_psi,
                         const FiberDensity& q, double T, std::string name) {
  if (!(T > 0.0)) throw DomainMismatch("fiber truncation must be positive");
  auto base = std::make_shared<const SpaceModel>(base_in);
  auto lq = q.log_density;
  SpaceModel s;
  s.name = std::move(name);
  s.group = base->group;
  s.domain = DomainKind::ProductWithFiber;
  s.components = base->components;
  s.parts = {base};
  s.part_weights = {1.0};
  s.metadata = base->metadata;
  s.metadata["fiber"] = q.name;
  s.metadata["fiber.sampling"] = "(1/2)e^{-|t|} truncated to [-" + fmt(T) + ", " + fmt(T) + "]";
  // Fiber mass of q on [-T, T], by quadrature.
  const double fiber_mass = integrate_interval(
      -T, 0.0, [&](double t) { return std::exp(lq(t)); }, QuadratureSpec::gauss_legendre(16, 0.5)) +
      integrate_interval(0.0, T, [&](double t) { return std::exp(lq(t)); },
                         QuadratureSpec::gauss_legendre(16, 0.5));
  s.truncation_mass = base->truncation_mass * fiber_mass;
  s.truncation = base->truncation + " x [-" + fmt(T) + ", " + fmt(T) + "]";
  s.contains = [base](const Point& x) {
    return !x.coords.empty() && std::isfinite(x.coords.back()) && base->contains(base_point(x));
  };
  s.act = [base, log_psi](const GroupElement& g, const Point& x) {
    const Point xb = base_point(x);
    Point y = base->act(g, xb);
    y.coords.push_back(x.coords.back() - log_psi(g, xb));
    return y;
  };
  s.log_cocycle = [base, log_psi, lq](const GroupElement& g, const Point& x) {
    const Point xb = base_point(x);
    const double t = x.coords.back();
    const double t2 = t - log_psi(g, xb);
    return base->log_cocycle(g, xb) + (lq(t2) - lq(t));
  };
  auto lc = s.log_cocycle;
  s.cocycle = [lc](const GroupElement& g, const Point& x) { return std::exp(lc(g, x)); };
  s.locate = [base, lq](const Point& x) {
    Location l = base->locate(base_point(x));
    const double t = x.coords.back();
    // f~(x,t) = f(x) p(t)/q(t) with p = (1/2)e^{-|t|}.
    l.factor *= std::exp(-std::abs(t) - std::numbers::ln2 - lq(t));
    return l;
  };
  s.sampler = [base, lq, T](std::mt19937_64& rng) {
    WeightedPoint wp = base->sampler(rng);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = -std::log1p(u(rng) * std::expm1(-T));
    const double t = u(rng) < 0.5 ? -r : r;
    const double p_t = 0.5 * std::exp(-std::abs(t)) / (-std::expm1(-T));
    wp.point.coords.push_back(t);
    wp.weight *= std::exp(lq(t)) / p_t;
    return wp;
  };
  s.integrate = [base, lq, T](const PointFunction& h, const QuadratureSpec& spec) {
    QuadratureSpec fs = spec;
    if (fs.method == QuadratureMethod::MonteCarlo || fs.method == QuadratureMethod::Auto)
      fs.method = QuadratureMethod::GaussLegendre;
    return base->integrate(
        [&](const Point& xb) {
          auto f = [&](double t) {
            Point x = xb;
            x.coords.push_back(t);
            return std::exp(lq(t)) * h(x);
          };
          return integrate_interval(-T, 0.0, f, fs) + integrate_interval(0.0, T, f, fs);
        },
        spec);
  };
  s.distance = [base](const Point& a, const Point& b) {
    return std::max(point_distance(*base, base_point(a), base_point(b)),
                    std::abs(a.coords.back() - b.coords.back()));
  };
  return s;
}

}  // namespace

SpaceModel maharam_extend(const SpaceModel& base, double t_truncation) {
  auto lc = base.log_cocycle;
  SpaceModel s = fiber_product(base, lc, FiberDensity::exponential(), t_truncation,
                               "maharam(" + base.name + ")");
  s.measure_preserving = true;
  return s;
}

SpaceModel maharam_probability_space(const SpaceModel& base, double t_truncation) {
  auto lc = base.log_cocycle;
  return fiber_product(base, lc, FiberDensity::laplace(), t_truncation,
                       "maharam-probability(" + base.name + ")");
}

double maharam_probability_cocycle(const SpaceModel& base, const GroupElement& g, const Point& x,
                                   double t) {
  const double l = log_rn_cocycle(base, g, x);
  return std::exp(l + std::abs(t) - std::abs(t - l));
}

SpaceModel skew_product(const SpaceModel& base, const CocycleSpec& psi, const FiberDensity& q,
                        double t_truncation) {
  const double residual = cocycle_identity_residual(psi, base, 200, 0xc0c1c1eULL);
  if (!(residual <= 1e-8))
    throw InvalidCocycle(psi.label + " fails the cocycle identity (residual " + fmt(residual) + ")");
  std::function<double(const GroupElement&, const Point&)> log_psi;
  if (psi.form == CocycleSpec::Form::RadonNikodym) {
    log_psi = base.log_cocycle;
  } else {
    const SpaceModel b = base;
    log_psi = [psi, b](const GroupElement& g, const Point& x) {
      return std::log(evaluate_cocycle(psi, b, g, x));
    };
  }
  SpaceModel s = fiber_product(base, log_psi, q, t_truncation,
                               "skew_product(" + base.name + ", " + psi.label + ", " + q.name + ")");
  s.metadata["cocycle"] = psi.label;
  return s;
}

std::vector<std::pair<std::string, std::string>> space_catalog() {
  return {
      {"circle_rotation", "Z rotating [0,1) by alpha (default sqrt(2)-1), Lebesgue"},
      {"integer_translation", "Z on Z by translation; weights counting or 2^-|k|"},
      {"real_translation", "R on R by translation; Lebesgue or e^-|x| dx"},
      {"translation_space", "W x G, G in {Z, R, Aff, E2, ...}, finite atom weights"},
      {"coset_space", "G/K for K compact: E2/SO2, ZxZ/2 / Z/2, G/trivial"},
      {"krengel_space", "weighted union of coset spaces G/K_w"},
      {"cyclic_rotation", "Z on Z/n by rotation, optional weights"},
      {"trivial_action", "Z acting trivially on n points"},
      {"disjoint_union", "union of catalog spaces over one group"},
      {"maharam", "Maharam extension of a catalog space"},
  };
}

}  // namespace hopf
