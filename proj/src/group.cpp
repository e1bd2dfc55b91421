#include "hopf/group.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hopf/error.hpp"

namespace hopf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

std::uint64_t bits_of(double x) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(x));
  std::memcpy(&u, &x, sizeof u);
  return u;
}

}  // namespace

// ---------------------------------------------------------------- GroupModel

GroupModel GroupModel::integer_lattice(int d) {
  if (d < 1) throw DomainMismatch("lattice dimension must be positive");
  GroupModel g;
  g.kind_ = GroupKind::IntegerLattice;
  g.dim_ = d;
  return g;
}

GroupModel GroupModel::real_vector(int d) {
  if (d < 1) throw DomainMismatch("vector dimension must be positive");
  GroupModel g;
  g.kind_ = GroupKind::RealVector;
  g.dim_ = d;
  return g;
}

GroupModel GroupModel::finite_cyclic(int n) {
  if (n < 1) throw DomainMismatch("cyclic order must be positive");
  GroupModel g;
  g.kind_ = GroupKind::FiniteCyclic;
  g.dim_ = 1;
  g.order_ = n;
  return g;
}

GroupModel GroupModel::affine_line() {
  GroupModel g;
  g.kind_ = GroupKind::AffineLine;
  g.dim_ = 2;
  return g;
}

GroupModel GroupModel::euclidean_motions_2d() {
  GroupModel g;
  g.kind_ = GroupKind::EuclideanMotions2D;
  g.dim_ = 3;
  return g;
}

GroupModel GroupModel::product(const GroupModel& left, const GroupModel& right) {
  GroupModel g;
  g.kind_ = GroupKind::Product;
  g.dim_ = left.dim_ + right.dim_;
  g.left_ = std::make_shared<const GroupModel>(left);
  g.right_ = std::make_shared<const GroupModel>(right);
  return g;
}

const GroupModel& GroupModel::left() const {
  if (!left_) throw DomainMismatch("not a product group");
  return *left_;
}

const GroupModel& GroupModel::right() const {
  if (!right_) throw DomainMismatch("not a product group");
  return *right_;
}

bool GroupModel::unimodular() const {
  switch (kind_) {
    case GroupKind::AffineLine: return false;
    case GroupKind::Product: return left_->unimodular() && right_->unimodular();
    default: return true;
  }
}

bool GroupModel::compact() const {
  switch (kind_) {
    case GroupKind::FiniteCyclic: return true;
    case GroupKind::Product: return left_->compact() && right_->compact();
    default: return false;
  }
}

bool GroupModel::discrete() const {
  switch (kind_) {
    case GroupKind::IntegerLattice:
    case GroupKind::FiniteCyclic: return true;
    case GroupKind::Product: return left_->discrete() && right_->discrete();
    default: return false;
  }
}

bool GroupModel::has_continuous_part() const { return !discrete(); }

std::string GroupModel::name() const {
  switch (kind_) {
    case GroupKind::IntegerLattice: return dim_ == 1 ? "Z" : "Z^" + std::to_string(dim_);
    case GroupKind::RealVector: return dim_ == 1 ? "R" : "R^" + std::to_string(dim_);
    case GroupKind::FiniteCyclic: return "Z/" + std::to_string(order_);
    case GroupKind::AffineLine: return "Aff";
    case GroupKind::EuclideanMotions2D: return "E2";
    case GroupKind::Product: return left_->name() + "x" + right_->name();
  }
  return "?";
}

std::string GroupModel::metric_description() const {
  switch (kind_) {
    case GroupKind::IntegerLattice: return "L1 word metric on " + name();
    case GroupKind::RealVector: return "Euclidean metric on " + name();
    case GroupKind::FiniteCyclic: return "compact: every window is the whole group";
    case GroupKind::AffineLine:
      return "ball(r) = {|ln a| <= ln(1+r), |b| <= r min(1,a)}";
    case GroupKind::EuclideanMotions2D: return "all rotations times translation disk |v| <= r";
    case GroupKind::Product:
      return "max of factor radii (" + left_->metric_description() + "; " +
             right_->metric_description() + ")";
  }
  return "?";
}

bool GroupModel::operator==(const GroupModel& o) const {
  if (kind_ != o.kind_ || dim_ != o.dim_ || order_ != o.order_) return false;
  if (kind_ == GroupKind::Product) return *left_ == *o.left_ && *right_ == *o.right_;
  return true;
}

// -------------------------------------------------------------- GroupElement

GroupElement GroupElement::motion(double theta, double vx, double vy) {
  return GroupElement(Payload(Motion{wrap_angle(theta), vx, vy}));
}

GroupElement GroupElement::pair(GroupElement l, GroupElement r) {
  Pair p;
  p.reserve(2);
  p.push_back(std::move(l));
  p.push_back(std::move(r));
  return GroupElement(Payload(std::move(p)));
}

namespace {
template <class T>
const T& get_or_throw(const GroupElement::Payload& p, const char* what) {
  if (const T* v = std::get_if<T>(&p)) return *v;
  throw DomainMismatch(std::string("element is not ") + what);
}
}  // namespace

const GroupElement::IntVec& GroupElement::as_ints() const { return get_or_throw<IntVec>(v_, "an integer vector"); }
const GroupElement::RealVec& GroupElement::as_reals() const { return get_or_throw<RealVec>(v_, "a real vector"); }
std::int64_t GroupElement::as_residue() const { return get_or_throw<Residue>(v_, "a residue").r; }
const Affine& GroupElement::as_affine() const { return get_or_throw<Affine>(v_, "an affine pair"); }
const Motion& GroupElement::as_motion() const { return get_or_throw<Motion>(v_, "a motion"); }
const GroupElement& GroupElement::first() const { return get_or_throw<Pair>(v_, "a pair").at(0); }
const GroupElement& GroupElement::second() const { return get_or_throw<Pair>(v_, "a pair").at(1); }

double wrap_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

bool belongs(const GroupModel& g, const GroupElement& x) {
  const auto& p = x.payload();
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      const auto* v = std::get_if<GroupElement::IntVec>(&p);
      return v && static_cast<int>(v->size()) == g.dim();
    }
    case GroupKind::RealVector: {
      const auto* v = std::get_if<GroupElement::RealVec>(&p);
      if (!v || static_cast<int>(v->size()) != g.dim()) return false;
      return std::all_of(v->begin(), v->end(), [](double c) { return std::isfinite(c); });
    }
    case GroupKind::FiniteCyclic: {
      const auto* r = std::get_if<Residue>(&p);
      return r && r->r >= 0 && r->r < g.order();
    }
    case GroupKind::AffineLine: {
      const auto* a = std::get_if<Affine>(&p);
      return a && a->a > 0.0 && std::isfinite(a->a) && std::isfinite(a->b);
    }
    case GroupKind::EuclideanMotions2D: {
      const auto* m = std::get_if<Motion>(&p);
      return m && m->theta >= 0.0 && m->theta < kTwoPi && std::isfinite(m->vx) &&
             std::isfinite(m->vy);
    }
    case GroupKind::Product: {
      const auto* pr = std::get_if<GroupElement::Pair>(&p);
      return pr && pr->size() == 2 && belongs(g.left(), (*pr)[0]) && belongs(g.right(), (*pr)[1]);
    }
  }
  return false;
}

void require_member(const GroupModel& g, const GroupElement& x) {
  if (!belongs(g, x)) throw DomainMismatch("element " + to_string(g, x) + " is not in " + g.name());
}

GroupElement identity(const GroupModel& g) {
  switch (g.kind()) {
    case GroupKind::IntegerLattice: return GroupElement::ints(GroupElement::IntVec(g.dim(), 0));
    case GroupKind::RealVector: return GroupElement::reals(GroupElement::RealVec(g.dim(), 0.0));
    case GroupKind::FiniteCyclic: return GroupElement::residue(0);
    case GroupKind::AffineLine: return GroupElement::affine(1.0, 0.0);
    case GroupKind::EuclideanMotions2D: return GroupElement::motion(0.0, 0.0, 0.0);
    case GroupKind::Product: return GroupElement::pair(identity(g.left()), identity(g.right()));
  }
  return {};
}

GroupElement compose(const GroupModel& g, const GroupElement& x, const GroupElement& y) {
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      GroupElement::IntVec r = x.as_ints();
      const auto& b = y.as_ints();
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += b.at(i);
      return GroupElement::ints(std::move(r));
    }
    case GroupKind::RealVector: {
      GroupElement::RealVec r = x.as_reals();
      const auto& b = y.as_reals();
      for (std::size_t i = 0; i < r.size(); ++i) r[i] += b.at(i);
      return GroupElement::reals(std::move(r));
    }
    case GroupKind::FiniteCyclic:
      return GroupElement::residue(floor_mod(x.as_residue() + y.as_residue(), g.order()));
    case GroupKind::AffineLine: {
      const Affine& p = x.as_affine();
      const Affine& q = y.as_affine();
      return GroupElement::affine(p.a * q.a, p.a * q.b + p.b);
    }
    case GroupKind::EuclideanMotions2D: {
      const Motion& p = x.as_motion();
      const Motion& q = y.as_motion();
      const double c = std::cos(p.theta), s = std::sin(p.theta);
      return GroupElement::motion(p.theta + q.theta, p.vx + c * q.vx - s * q.vy,
                                  p.vy + s * q.vx + c * q.vy);
    }
    case GroupKind::Product:
      return GroupElement::pair(compose(g.left(), x.first(), y.first()),
                                compose(g.right(), x.second(), y.second()));
  }
  return {};
}

GroupElement inverse(const GroupModel& g, const GroupElement& x) {
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      GroupElement::IntVec r = x.as_ints();
      for (auto& c : r) c = -c;
      return GroupElement::ints(std::move(r));
    }
    case GroupKind::RealVector: {
      GroupElement::RealVec r = x.as_reals();
      for (auto& c : r) c = -c;
      return GroupElement::reals(std::move(r));
    }
    case GroupKind::FiniteCyclic: return GroupElement::residue(floor_mod(-x.as_residue(), g.order()));
    case GroupKind::AffineLine: {
      const Affine& p = x.as_affine();
      return GroupElement::affine(1.0 / p.a, -p.b / p.a);
    }
    case GroupKind::EuclideanMotions2D: {
      const Motion& p = x.as_motion();
      const double c = std::cos(p.theta), s = std::sin(p.theta);
      // -R(-theta) v
      return GroupElement::motion(-p.theta, -(c * p.vx + s * p.vy), -(-s * p.vx + c * p.vy));
    }
    case GroupKind::Product:
      return GroupElement::pair(inverse(g.left(), x.first()), inverse(g.right(), x.second()));
  }
  return {};
}

double modular(const GroupModel& g, const GroupElement& x) {
  switch (g.kind()) {
    case GroupKind::AffineLine: return 1.0 / x.as_affine().a;
    case GroupKind::Product: return modular(g.left(), x.first()) * modular(g.right(), x.second());
    default: return 1.0;
  }
}

std::string to_string(const GroupModel& g, const GroupElement& x) {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, GroupElement::IntVec> ||
                      std::is_same_v<T, GroupElement::RealVec>) {
          os << "(";
          for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
          os << ")";
        } else if constexpr (std::is_same_v<T, Residue>) {
          os << v.r;
        } else if constexpr (std::is_same_v<T, Affine>) {
          os << "(a=" << v.a << ", b=" << v.b << ")";
        } else if constexpr (std::is_same_v<T, Motion>) {
          os << "(theta=" << v.theta << ", v=(" << v.vx << ", " << v.vy << "))";
        } else {
          if (g.kind() == GroupKind::Product && v.size() == 2)
            os << "[" << to_string(g.left(), v[0]) << ", " << to_string(g.right(), v[1]) << "]";
          else
            os << "[pair]";
        }
      },
      x.payload());
  return os.str();
}

int coordinate_count(const GroupModel& g) {
  switch (g.kind()) {
    case GroupKind::IntegerLattice:
    case GroupKind::RealVector: return g.dim();
    case GroupKind::FiniteCyclic: return 1;
    case GroupKind::AffineLine: return 2;
    case GroupKind::EuclideanMotions2D: return 3;
    case GroupKind::Product: return coordinate_count(g.left()) + coordinate_count(g.right());
  }
  return 0;
}

std::vector<double> coordinates(const GroupModel& g, const GroupElement& x) {
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      std::vector<double> c;
      for (auto k : x.as_ints()) c.push_back(static_cast<double>(k));
      return c;
    }
    case GroupKind::RealVector: return x.as_reals();
    case GroupKind::FiniteCyclic: return {static_cast<double>(x.as_residue())};
    case GroupKind::AffineLine: return {x.as_affine().a, x.as_affine().b};
    case GroupKind::EuclideanMotions2D: {
      const Motion& m = x.as_motion();
      return {m.theta, m.vx, m.vy};
    }
    case GroupKind::Product: {
      auto c = coordinates(g.left(), x.first());
      auto d = coordinates(g.right(), x.second());
      c.insert(c.end(), d.begin(), d.end());
      return c;
    }
  }
  return {};
}

GroupElement from_coordinates(const GroupModel& g, std::span<const double> c) {
  if (static_cast<int>(c.size()) != coordinate_count(g))
    throw DomainMismatch("expected " + std::to_string(coordinate_count(g)) +
                         " coordinates for " + g.name() + ", got " + std::to_string(c.size()));
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      GroupElement::IntVec v;
      for (double x : c) {
        if (x != std::floor(x)) throw DomainMismatch("non-integer coordinate for " + g.name());
        v.push_back(static_cast<std::int64_t>(x));
      }
      return GroupElement::ints(std::move(v));
    }
    case GroupKind::RealVector: return GroupElement::reals({c.begin(), c.end()});
    case GroupKind::FiniteCyclic: {
      if (c[0] != std::floor(c[0])) throw DomainMismatch("non-integer residue");
      return GroupElement::residue(floor_mod(static_cast<std::int64_t>(c[0]), g.order()));
    }
    case GroupKind::AffineLine:
      if (!(c[0] > 0.0)) throw DomainMismatch("affine scale must be positive");
      return GroupElement::affine(c[0], c[1]);
    case GroupKind::EuclideanMotions2D: return GroupElement::motion(c[0], c[1], c[2]);
    case GroupKind::Product: {
      const int k = coordinate_count(g.left());
      return GroupElement::pair(from_coordinates(g.left(), c.subspan(0, k)),
                                from_coordinates(g.right(), c.subspan(k)));
    }
  }
  return {};
}

double radius_of(const GroupModel& g, const GroupElement& x) {
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      double s = 0.0;
      for (auto k : x.as_ints()) s += std::abs(static_cast<double>(k));
      return s;
    }
    case GroupKind::RealVector: {
      double s = 0.0;
      for (double v : x.as_reals()) s += v * v;
      return std::sqrt(s);
    }
    case GroupKind::FiniteCyclic: return 0.0;
    case GroupKind::AffineLine: {
      const Affine& p = x.as_affine();
      const double ra = std::expm1(std::abs(std::log(p.a)));
      const double rb = std::abs(p.b) / std::min(1.0, p.a);
      return std::max(ra, rb);
    }
    case GroupKind::EuclideanMotions2D: {
      const Motion& m = x.as_motion();
      return std::hypot(m.vx, m.vy);
    }
    case GroupKind::Product:
      return std::max(radius_of(g.left(), x.first()), radius_of(g.right(), x.second()));
  }
  return 0.0;
}

// ------------------------------------------------------------------- windows

namespace {

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::string window_description(const GroupModel& g, double r) {
  std::ostringstream os;
  os.precision(17);
  switch (g.kind()) {
    case GroupKind::IntegerLattice: os << "L1 word ball of radius " << std::floor(r) << " in " << g.name(); break;
    case GroupKind::RealVector: os << "closed Euclidean ball of radius " << r << " in " << g.name(); break;
    case GroupKind::FiniteCyclic: os << "whole group " << g.name(); break;
    case GroupKind::AffineLine:
      os << "{|ln a| <= ln(1+" << r << "), |b| <= " << r << " min(1,a)}";
      break;
    case GroupKind::EuclideanMotions2D: os << "SO(2) x closed disk of radius " << r; break;
    case GroupKind::Product:
      os << window_description(g.left(), r) << " x " << window_description(g.right(), r);
      break;
  }
  return os.str();
}

}  // namespace

double ball_volume(const GroupModel& g, double r) {
  if (r < 0.0) return 0.0;
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      const int R = static_cast<int>(std::floor(r));
      const int d = g.dim();
      double n = 0.0;
      for (int k = 0; k <= std::min(d, R); ++k) n += std::ldexp(1.0, k) * binom(d, k) * binom(R, k);
      return n;
    }
    case GroupKind::RealVector: {
      const double d = g.dim();
      return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
    }
    case GroupKind::FiniteCyclic: return g.order();
    case GroupKind::AffineLine: return 2.0 * r * (std::log1p(r) + r / (1.0 + r));
    case GroupKind::EuclideanMotions2D: return 2.0 * std::numbers::pi * std::numbers::pi * r * r;
    case GroupKind::Product: return ball_volume(g.left(), r) * ball_volume(g.right(), r);
  }
  return 0.0;
}

Window ball_window(const GroupModel& g, double radius) {
  Window w;
  w.index = 0;
  w.radius = radius;
  w.description = window_description(g, radius);
  w.haar_volume = ball_volume(g, radius);
  return w;
}

Window exhaustion_window(const GroupModel& g, int n) {
  if (n < 1) throw DomainMismatch("window index must be >= 1");
  Window w = ball_window(g, std::ldexp(1.0, n));
  w.index = n;
  return w;
}

bool window_contains(const GroupModel& g, const Window& w, const GroupElement& x) {
  return radius_of(g, x) <= w.radius;
}

// --------------------------------------------------------------- integration

namespace {

// Integral over ball(r_out) \ ball(r_in); r_in < 0 means no hole.
double integrate_region(const GroupModel& g, const Integrand& phi, double r_in, double r_out,
                        const QuadratureSpec& spec) {
  if (r_out < 0.0 || (r_in >= 0.0 && r_out <= r_in)) return 0.0;
  const std::uint64_t stream = mix_seed(bits_of(r_in), bits_of(r_out));
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      const std::int64_t R1 = static_cast<std::int64_t>(std::floor(r_out));
      const std::int64_t R0 = r_in < 0.0 ? -1 : static_cast<std::int64_t>(std::floor(r_in));
      const int d = g.dim();
      GroupElement::IntVec k(d, 0);
      double acc = 0.0;
      // Depth-first walk over the L1 ball in lexicographic order.
      std::function<void(int, std::int64_t)> rec = [&](int i, std::int64_t used) {
        if (i == d) {
          if (used > R0) acc += checked(phi(GroupElement::ints(k)));
          return;
        }
        const std::int64_t budget = R1 - used;
        for (std::int64_t v = -budget; v <= budget; ++v) {
          k[i] = v;
          rec(i + 1, used + (v < 0 ? -v : v));
        }
        k[i] = 0;
      };
      rec(0, 0);
      return acc;
    }
    case GroupKind::FiniteCyclic: {
      if (r_in >= 0.0) return 0.0;
      double acc = 0.0;
      for (int r = 0; r < g.order(); ++r) acc += checked(phi(GroupElement::residue(r)));
      return acc;
    }
    case GroupKind::RealVector: {
      const int d = g.dim();
      const double r0 = std::max(r_in, 0.0);
      if (d == 1) {
        const QuadratureMethod m = resolve_method(spec, 1);
        auto f = [&](std::span<const double> u) { return phi(GroupElement::reals({u[0]})); };
        if (r_in < 0.0) {
          const double lo[1] = {-r_out}, hi[1] = {r_out};
          return integrate_box(lo, hi, f, spec, m, stream);
        }
        const double lo1[1] = {-r_out}, hi1[1] = {-r0};
        const double lo2[1] = {r0}, hi2[1] = {r_out};
        return integrate_box(lo1, hi1, f, spec, m, stream) +
               integrate_box(lo2, hi2, f, spec, m, stream + 1);
      }
      if (d == 2) {
        const QuadratureMethod m = resolve_method(spec, 2);
        const double lo[2] = {r0, 0.0}, hi[2] = {r_out, kTwoPi};
        auto f = [&](std::span<const double> u) {
          return u[0] * phi(GroupElement::reals({u[0] * std::cos(u[1]), u[0] * std::sin(u[1])}));
        };
        return integrate_box(lo, hi, f, spec, m, stream);
      }
      const QuadratureMethod m = resolve_method(spec, d);
      std::vector<double> lo(d, -r_out), hi(d, r_out);
      auto f = [&](std::span<const double> u) {
        double s = 0.0;
        for (double c : u) s += c * c;
        const double rho = std::sqrt(s);
        if (rho > r_out || (r_in >= 0.0 && rho <= r_in)) return 0.0;
        return phi(GroupElement::reals({u.begin(), u.end()}));
      };
      return integrate_box(lo, hi, f, spec, m, stream);
    }
    case GroupKind::AffineLine: {
      const QuadratureMethod m = resolve_method(spec, 2);
      auto f = [&](std::span<const double> u) {
        const double a = std::exp(u[0]);
        const double mm = std::min(1.0, a);
        return (mm / a) * phi(GroupElement::affine(a, u[1] * mm));
      };
      const double s1 = std::log1p(r_out);
      double acc = 0.0;
      std::uint64_t k = 0;
      auto box = [&](double u0, double u1, double b0, double b1) {
        if (u1 <= u0 || b1 <= b0) return;
        const double lo[2] = {u0, b0}, hi[2] = {u1, b1};
        acc += integrate_box(lo, hi, f, spec, m, stream + (k++));
      };
      if (r_in < 0.0) {
        box(-s1, 0.0, -r_out, r_out);
        box(0.0, s1, -r_out, r_out);
        return acc;
      }
      const double s0 = std::log1p(r_in);
      box(-s1, -s0, -r_out, r_out);
      box(s0, s1, -r_out, r_out);
      box(-s0, 0.0, -r_out, -r_in);
      box(-s0, 0.0, r_in, r_out);
      box(0.0, s0, -r_out, -r_in);
      box(0.0, s0, r_in, r_out);
      return acc;
    }
    case GroupKind::EuclideanMotions2D: {
      const QuadratureMethod m = resolve_method(spec, 3);
      const double r0 = std::max(r_in, 0.0);
      const double lo[3] = {0.0, r0, 0.0}, hi[3] = {kTwoPi, r_out, kTwoPi};
      auto f = [&](std::span<const double> u) {
        return u[1] *
               phi(GroupElement::motion(u[0], u[1] * std::cos(u[2]), u[1] * std::sin(u[2])));
      };
      return integrate_box(lo, hi, f, spec, m, stream);
    }
    case GroupKind::Product: {
      const GroupModel& L = g.left();
      const GroupModel& R = g.right();
      auto nested = [&](double l_in, double l_out, double rr_in, double rr_out) {
        return integrate_region(
            L,
            [&](const GroupElement& l) {
              return integrate_region(
                  R, [&](const GroupElement& r) { return phi(GroupElement::pair(l, r)); }, rr_in,
                  rr_out, spec);
            },
            l_in, l_out, spec);
      };
      if (r_in < 0.0) return nested(-1.0, r_out, -1.0, r_out);
      return nested(r_in, r_out, -1.0, r_out) + nested(-1.0, r_in, r_in, r_out);
    }
  }
  return 0.0;
}

}  // namespace

double haar_integrate(const GroupModel& g, const Integrand& phi, const Window& window,
                      const QuadratureSpec& scheme) {
  validate(scheme);
  return integrate_region(g, phi, -1.0, window.radius, scheme);
}

double haar_integrate_shell(const GroupModel& g, const Integrand& phi, double r_in, double r_out,
                            const QuadratureSpec& scheme) {
  validate(scheme);
  return integrate_region(g, phi, r_in, r_out, scheme);
}

std::vector<double> windowed_integrals(const GroupModel& g, const Integrand& phi, int max_window,
                                       const QuadratureSpec& scheme) {
  validate(scheme);
  std::vector<double> out;
  double acc = 0.0, prev = -1.0;
  for (int n = 1; n <= max_window; ++n) {
    const double r = std::ldexp(1.0, n);
    acc += integrate_region(g, phi, prev, r, scheme);
    out.push_back(acc);
    prev = r;
  }
  return out;
}

std::vector<GroupElement> enumerate_ball(const GroupModel& g, double radius) {
  if (!g.discrete()) throw UnsupportedScheme("ball enumeration needs a discrete group");
  std::vector<GroupElement> out;
  integrate_region(
      g,
      [&](const GroupElement& x) {
        out.push_back(x);
        return 0.0;
      },
      -1.0, radius, QuadratureSpec{});
  return out;
}

// ------------------------------------------------------------------ lattices

LatticeData LatticeData::standard(int d) {
  std::vector<std::vector<std::int64_t>> b(d, std::vector<std::int64_t>(d, 0));
  for (int i = 0; i < d; ++i) b[i][i] = 1;
  return with_basis(std::move(b));
}

LatticeData LatticeData::with_basis(std::vector<std::vector<std::int64_t>> basis) {
  const std::size_t d = basis.size();
  if (d == 0) throw DomainMismatch("empty lattice basis");
  for (const auto& row : basis)
    if (row.size() != d) throw DomainMismatch("lattice basis must be square");
  // |det| by Gaussian elimination in doubles (small d, integer entries).
  std::vector<std::vector<double>> m(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i][j] = static_cast<double>(basis[i][j]);
  double det = 1.0;
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(m[r][c]) > std::abs(m[p][c])) p = r;
    if (m[p][c] == 0.0) throw DomainMismatch("lattice basis is degenerate");
    std::swap(m[p], m[c]);
    det *= m[c][c];
    for (std::size_t r = c + 1; r < d; ++r) {
      const double f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < d; ++k) m[r][k] -= f * m[c][k];
    }
  }
  LatticeData l;
  l.ambient = GroupModel::real_vector(static_cast<int>(d));
  l.basis = std::move(basis);
  l.omega_volume = std::abs(det);
  return l;
}

namespace {

bool is_standard(const LatticeData& l) {
  for (std::size_t i = 0; i < l.basis.size(); ++i)
    for (std::size_t j = 0; j < l.basis.size(); ++j)
      if (l.basis[i][j] != (i == j ? 1 : 0)) return false;
  return true;
}

// Coefficients c with g = sum_i c_i basis_i.
std::vector<double> lattice_coefficients(const LatticeData& l, const std::vector<double>& g) {
  const std::size_t d = l.basis.size();
  std::vector<std::vector<double>> a(d, std::vector<double>(d + 1));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) a[i][j] = static_cast<double>(l.basis[j][i]);
    a[i][d] = g[i];
  }
  for (std::size_t c = 0; c < d; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < d; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[p], a[c]);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= d; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) out[i] = a[i][d] / a[i][i];
  return out;
}

}  // namespace

GroupElement lattice_element(const LatticeData& l, const std::vector<std::int64_t>& omega) {
  const std::size_t d = l.basis.size();
  GroupElement::RealVec v(d, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) v[j] += static_cast<double>(omega.at(i) * l.basis[i][j]);
  return GroupElement::reals(std::move(v));
}

LatticeDecomposition lattice_fundamental_domain(const LatticeData& l, const GroupElement& g) {
  require_member(l.ambient, g);
  const auto& x = g.as_reals();
  LatticeDecomposition out;
  if (is_standard(l)) {
    GroupElement::RealVec res(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double f = std::floor(x[i]);
      out.omega.push_back(static_cast<std::int64_t>(f));
      res[i] = x[i] - f;
      if (res[i] >= 1.0) {  // x just below an integer rounds the residue up to 1
        res[i] = 0.0;
        out.omega.back() += 1;
      }
    }
    out.residue = GroupElement::reals(std::move(res));
    return out;
  }
  const auto c = lattice_coefficients(l, x);
  for (double ci : c) out.omega.push_back(static_cast<std::int64_t>(std::floor(ci)));
  const auto shift = lattice_element(l, out.omega).as_reals();
  GroupElement::RealVec res(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) res[i] = x[i] - shift[i];
  out.residue = GroupElement::reals(std::move(res));
  return out;
}

bool in_fundamental_domain(const LatticeData& l, const GroupElement& g) {
  const auto c = lattice_coefficients(l, g.as_reals());
  return std::all_of(c.begin(), c.end(), [](double v) { return v >= 0.0 && v < 1.0; });
}

}  // namespace hopf

namespace hopf {

WeightedElement sample_haar(const GroupModel& g, std::mt19937_64& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WeightedElement out;
  out.weight = ball_volume(g, radius);
  switch (g.kind()) {
    case GroupKind::IntegerLattice: {
      // Rejection from the enclosing cube keeps the draw uniform on the L1 ball.
      const std::int64_t R = static_cast<std::int64_t>(std::floor(radius));
      std::uniform_int_distribution<std::int64_t> coord(-R, R);
      for (;;) {
        GroupElement::IntVec k(g.dim());
        std::int64_t s = 0;
        for (auto& c : k) {
          c = coord(rng);
          s += c < 0 ? -c : c;
        }
        if (s <= R) {
          out.element = GroupElement::ints(std::move(k));
          return out;
        }
      }
    }
    case GroupKind::RealVector: {
      for (;;) {
        GroupElement::RealVec v(g.dim());
        double s = 0.0;
        for (auto& c : v) {
          c = radius * (2.0 * unit(rng) - 1.0);
          s += c * c;
        }
        if (s <= radius * radius) {
          out.element = GroupElement::reals(std::move(v));
          return out;
        }
      }
    }
    case GroupKind::FiniteCyclic: {
      std::uniform_int_distribution<std::int64_t> r(0, g.order() - 1);
      out.element = GroupElement::residue(r(rng));
      return out;
    }
    case GroupKind::AffineLine: {
      // Chart density min(1, e^-u) on [-s, s] x [-r, r]; rejection against its max.
      const double s = std::log1p(radius);
      for (;;) {
        const double u = s * (2.0 * unit(rng) - 1.0);
        if (unit(rng) > std::min(1.0, std::exp(-u))) continue;
        const double a = std::exp(u);
        const double beta = radius * (2.0 * unit(rng) - 1.0);
        out.element = GroupElement::affine(a, beta * std::min(1.0, a));
        return out;
      }
    }
    case GroupKind::EuclideanMotions2D: {
      const double theta = 2.0 * std::numbers::pi * unit(rng);
      for (;;) {
        const double x = radius * (2.0 * unit(rng) - 1.0);
        const double y = radius * (2.0 * unit(rng) - 1.0);
        if (x * x + y * y <= radius * radius) {
          out.element = GroupElement::motion(theta, x, y);
          return out;
        }
      }
    }
    case GroupKind::Product: {
      // Independent factor draws are uniform on the max-metric ball.
      WeightedElement l = sample_haar(g.left(), rng, radius);
      WeightedElement r = sample_haar(g.right(), rng, radius);
      out.element = GroupElement::pair(std::move(l.element), std::move(r.element));
      return out;
    }
  }
  return out;
}

}  // namespace hopf
