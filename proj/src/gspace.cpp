#include "hopf/gspace.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hopf/error.hpp"

namespace hopf {

std::string to_string(const Point& x) {
  std::ostringstream os;
  os.precision(17);
  os << "{c=" << x.component << ", (";
  for (std::size_t i = 0; i < x.coords.size(); ++i) os << (i ? ", " : "") << x.coords[i];
  os << ")}";
  return os.str();
}

std::string to_string(DomainKind k) {
  switch (k) {
    case DomainKind::Circle: return "Circle";
    case DomainKind::IntegerLine: return "IntegerLine";
    case DomainKind::RealLine: return "RealLine";
    case DomainKind::ProductWithFiber: return "ProductWithFiber";
    case DomainKind::CosetPlane: return "CosetPlane";
    case DomainKind::LabeledFinite: return "LabeledFinite";
    case DomainKind::DisjointUnion: return "DisjointUnion";
    case DomainKind::KrengelDiscrete: return "KrengelDiscrete";
    case DomainKind::GroupCopy: return "GroupCopy";
  }
  return "?";
}

namespace {
void check_inputs(const SpaceModel& s, const GroupElement& g, const Point& x) {
  if (!belongs(s.group, g))
    throw DomainMismatch("element " + to_string(s.group, g) + " does not act on " + s.name);
  if (!s.contains(x)) throw DomainMismatch("point " + to_string(x) + " is not in " + s.name);
}
}  // namespace

Point act(const SpaceModel& s, const GroupElement& g, const Point& x) {
  check_inputs(s, g, x);
  return s.act(g, x);
}

double rn_cocycle(const SpaceModel& s, const GroupElement& g, const Point& x) {
  check_inputs(s, g, x);
  return s.cocycle(g, x);
}

double log_rn_cocycle(const SpaceModel& s, const GroupElement& g, const Point& x) {
  check_inputs(s, g, x);
  return s.log_cocycle(g, x);
}

std::vector<WeightedPoint> sample_points(const SpaceModel& s, std::size_t n, std::uint64_t seed,
                                         std::uint64_t stream) {
  std::mt19937_64 rng(mix_seed(seed, stream));
  std::vector<WeightedPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.sampler(rng));
  return out;
}

double point_distance(const SpaceModel& s, const Point& a, const Point& b) {
  if (a.component != b.component || a.coords.size() != b.coords.size())
    return std::numeric_limits<double>::infinity();
  if (s.distance) return s.distance(a, b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) d = std::max(d, std::abs(a.coords[i] - b.coords[i]));
  return d;
}

// ------------------------------------------------------------------- sets

SetDescriptor interval_set(double lo, double hi, int component, int coord) {
  SetDescriptor a;
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo << ", " << hi << ")";
  if (component >= 0) os << "@" << component;
  a.name = os.str();
  a.contains = [=](const Point& x) {
    if (component >= 0 && x.component != component) return false;
    if (coord >= static_cast<int>(x.coords.size())) return false;
    const double v = x.coords[coord];
    return v >= lo && v < hi;
  };
  return a;
}

SetDescriptor finite_set(std::vector<double> values, int component, int coord) {
  SetDescriptor a;
  std::ostringstream os;
  os.precision(17);
  os << "{";
  for (std::size_t i = 0; i < values.size(); ++i) os << (i ? ", " : "") << values[i];
  os << "}";
  if (component >= 0) os << "@" << component;
  a.name = os.str();
  std::sort(values.begin(), values.end());
  a.contains = [values, component, coord](const Point& x) {
    if (component >= 0 && x.component != component) return false;
    if (coord >= static_cast<int>(x.coords.size())) return false;
    return std::binary_search(values.begin(), values.end(), x.coords[coord]);
  };
  return a;
}

SetDescriptor component_set(int component) {
  SetDescriptor a;
  a.name = "component " + std::to_string(component);
  a.contains = [component](const Point& x) { return x.component == component; };
  return a;
}

SetDescriptor union_set(const SetDescriptor& a, const SetDescriptor& b) {
  SetDescriptor u;
  u.name = a.name + " u " + b.name;
  auto ca = a.contains, cb = b.contains;
  u.contains = [ca, cb](const Point& x) { return ca(x) || cb(x); };
  return u;
}

SetDescriptor intersect_set(const SetDescriptor& a, const SetDescriptor& b) {
  SetDescriptor u;
  u.name = a.name + " n " + b.name;
  auto ca = a.contains, cb = b.contains;
  u.contains = [ca, cb](const Point& x) { return ca(x) && cb(x); };
  return u;
}

double set_mass(const SpaceModel& s, const SetDescriptor& a, const QuadratureSpec& scheme) {
  if (a.mass) return *a.mass;
  auto c = a.contains;
  return s.integrate([c](const Point& x) { return c(x) ? 1.0 : 0.0; }, scheme);
}

// --------------------------------------------------------- test functions

TestFunction TestFunction::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw DomainMismatch("Gaussian width must be positive");
  TestFunction f;
  f.family = TestFamily::Gaussian;
  f.param = sigma;
  return f;
}

TestFunction TestFunction::exp_decay(double base) {
  if (!(base > 1.0)) throw DomainMismatch("ExpDecay base must exceed 1");
  TestFunction f;
  f.family = TestFamily::ExpDecay;
  f.param = base;
  return f;
}

TestFunction TestFunction::constant() {
  TestFunction f;
  f.family = TestFamily::Constant;
  return f;
}

TestFunction TestFunction::indicator(SetDescriptor a) {
  TestFunction f;
  f.family = TestFamily::Indicator;
  f.strictly_positive = false;
  f.l1_norm = a.mass;
  f.set = std::make_shared<const SetDescriptor>(std::move(a));
  return f;
}

TestFunction TestFunction::with_l1(double v) const {
  TestFunction f = *this;
  f.l1_norm = v;
  return f;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (family) {
    case TestFamily::Gaussian: os << "gaussian(sigma=" << param << ")"; break;
    case TestFamily::ExpDecay: os << "exp-decay(base=" << param << ")"; break;
    case TestFamily::Constant: os << "constant"; break;
    case TestFamily::Indicator: os << "indicator(" << (set ? set->name : "?") << ")"; break;
  }
  return os.str();
}

double evaluate(const TestFunction& f, const SpaceModel& s, const Point& x) {
  if (f.family == TestFamily::Indicator) return f.set->contains(x) ? 1.0 : 0.0;
  const Location loc = s.locate(x);
  double v = loc.factor;
  switch (f.family) {
    case TestFamily::Gaussian: {
      double r2 = 0.0;
      for (double c : loc.coords) r2 += c * c;
      v *= std::exp(-r2 / (2.0 * f.param * f.param));
      break;
    }
    case TestFamily::ExpDecay: {
      double l1 = 0.0;
      for (double c : loc.coords) l1 += std::abs(c);
      v *= std::pow(f.param, -l1);
      break;
    }
    default: break;
  }
  // Strictly positive families stay positive where the closed form underflows.
  return std::max(v, DBL_MIN);
}

// ---------------------------------------------------------------- cocycles

CocycleSpec CocycleSpec::radon_nikodym() { return CocycleSpec{}; }

CocycleSpec CocycleSpec::f_weighted(TestFunction f) {
  CocycleSpec c;
  c.form = Form::FWeighted;
  c.label = "f-weighted(" + f.describe() + ")";
  c.f = std::move(f);
  return c;
}

CocycleSpec CocycleSpec::custom_map(std::function<double(const GroupElement&, const Point&)> psi,
                                    std::string label) {
  CocycleSpec c;
  c.form = Form::Custom;
  c.custom = std::move(psi);
  c.label = std::move(label);
  return c;
}

double evaluate_cocycle(const CocycleSpec& c, const SpaceModel& s, const GroupElement& g,
                        const Point& x) {
  switch (c.form) {
    case CocycleSpec::Form::RadonNikodym: return s.cocycle(g, x);
    case CocycleSpec::Form::FWeighted:
      return modular(s.group, g) * s.cocycle(g, x) * evaluate(c.f, s, s.act(g, x)) /
             evaluate(c.f, s, x);
    case CocycleSpec::Form::Custom: return c.custom(g, x);
  }
  return 1.0;
}

double cocycle_identity_residual(const CocycleSpec& c, const SpaceModel& s, std::size_t samples,
                                 std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const GroupElement g = sample_haar(s.group, rng, radius).element;
    const GroupElement h = sample_haar(s.group, rng, radius).element;
    const Point x = s.sampler(rng).point;
    const double lhs = evaluate_cocycle(c, s, compose(s.group, g, h), x);
    const double rhs = evaluate_cocycle(c, s, g, s.act(h, x)) * evaluate_cocycle(c, s, h, x);
    const double r = std::abs(lhs - rhs) / std::max(std::abs(lhs), DBL_MIN);
    if (!(r <= worst)) worst = std::isnan(r) ? std::numeric_limits<double>::infinity() : r;
  }
  return worst;
}

IdentityResidual transport_identity(const SpaceModel& s, const GroupElement& g, const PointFunction& f0,
                                    const PointFunction& f1, const QuadratureSpec& scheme) {
  require_member(s.group, g);
  validate(scheme);
  const GroupElement gi = inverse(s.group, g);
  IdentityResidual r;
  r.lhs = s.integrate([&](const Point& x) { return s.cocycle(g, x) * f0(s.act(g, x)) * f1(x); }, scheme);
  r.rhs = s.integrate([&](const Point& x) { return f0(x) * f1(s.act(gi, x)); }, scheme);
  r.residual = std::abs(r.lhs - r.rhs);
  return r;
}

FiberDensity FiberDensity::exponential() {
  return FiberDensity{"e^t dt", [](double t) { return t; }};
}

FiberDensity FiberDensity::laplace() {
  return FiberDensity{"(1/2)e^{-|t|} dt", [](double t) { return -std::abs(t) - std::numbers::ln2; }};
}

FiberDensity FiberDensity::lebesgue() {
  return FiberDensity{"dt", [](double) { return 0.0; }};
}

}  // namespace hopf
