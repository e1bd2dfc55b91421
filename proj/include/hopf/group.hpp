#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hopf/quadrature.hpp"

namespace hopf {

enum class GroupKind {
  IntegerLattice,
  RealVector,
  FiniteCyclic,
  AffineLine,
  EuclideanMotions2D,
  Product
};

// A locally compact second countable group from the closed-form catalog.
// Immutable; copies share product children.
class GroupModel {
 public:
  static GroupModel integer_lattice(int d);
  static GroupModel real_vector(int d);
  static GroupModel finite_cyclic(int n);
  static GroupModel affine_line();
  static GroupModel euclidean_motions_2d();
  static GroupModel product(const GroupModel& left, const GroupModel& right);

  GroupKind kind() const { return kind_; }
  int dim() const { return dim_; }         // lattice / vector dimension
  int order() const { return order_; }     // FiniteCyclic only
  const GroupModel& left() const;
  const GroupModel& right() const;

  bool unimodular() const;
  bool compact() const;
  bool discrete() const;
  bool has_continuous_part() const;
  std::string name() const;              // e.g. "Z", "R^2", "Z/12", "Aff", "E2", "ZxZ/2"
  std::string metric_description() const;

  bool operator==(const GroupModel& other) const;
  bool operator!=(const GroupModel& other) const { return !(*this == other); }

 private:
  GroupModel() = default;
  GroupKind kind_ = GroupKind::IntegerLattice;
  int dim_ = 1;
  int order_ = 0;
  std::shared_ptr<const GroupModel> left_, right_;
};

struct Affine {
  double a = 1.0;  // scale, strictly positive
  double b = 0.0;  // shift
  bool operator==(const Affine&) const = default;
};

struct Motion {
  double theta = 0.0;  // rotation angle in [0, 2pi)
  double vx = 0.0;
  double vy = 0.0;
  bool operator==(const Motion&) const = default;
};

struct Residue {
  std::int64_t r = 0;
  bool operator==(const Residue&) const = default;
};

class GroupElement {
 public:
  using IntVec = std::vector<std::int64_t>;
  using RealVec = std::vector<double>;
  using Pair = std::vector<GroupElement>;
  using Payload = std::variant<IntVec, RealVec, Residue, Affine, Motion, Pair>;

  GroupElement() = default;
  explicit GroupElement(Payload p) : v_(std::move(p)) {}

  static GroupElement ints(IntVec v) { return GroupElement(Payload(std::move(v))); }
  static GroupElement reals(RealVec v) { return GroupElement(Payload(std::move(v))); }
  static GroupElement residue(std::int64_t r) { return GroupElement(Payload(Residue{r})); }
  static GroupElement affine(double a, double b) { return GroupElement(Payload(Affine{a, b})); }
  static GroupElement motion(double theta, double vx, double vy);
  static GroupElement pair(GroupElement l, GroupElement r);

  const Payload& payload() const { return v_; }
  const IntVec& as_ints() const;
  const RealVec& as_reals() const;
  std::int64_t as_residue() const;
  const Affine& as_affine() const;
  const Motion& as_motion() const;
  const GroupElement& first() const;
  const GroupElement& second() const;

  bool operator==(const GroupElement& o) const { return v_ == o.v_; }

 private:
  Payload v_;
};

double wrap_angle(double theta);

bool belongs(const GroupModel& g, const GroupElement& x);
void require_member(const GroupModel& g, const GroupElement& x);  // DomainMismatch
GroupElement identity(const GroupModel& g);
GroupElement compose(const GroupModel& g, const GroupElement& x, const GroupElement& y);
GroupElement inverse(const GroupModel& g, const GroupElement& x);
double modular(const GroupModel& g, const GroupElement& x);
std::string to_string(const GroupModel& g, const GroupElement& x);

// Flat real coordinates of an element (residues and integers as exact doubles;
// Affine as (a, b); Motion as (theta, vx, vy); products concatenated).
int coordinate_count(const GroupModel& g);
std::vector<double> coordinates(const GroupModel& g, const GroupElement& x);
GroupElement from_coordinates(const GroupModel& g, std::span<const double> c);

// Smallest r with x in the closed ball of radius r (0 for compact kinds).
double radius_of(const GroupModel& g, const GroupElement& x);

// K_n of the exhaustion: closed symmetric ball of radius 2^n.
struct Window {
  int index = 0;
  double radius = 0.0;
  std::string description;
  double haar_volume = 0.0;
};

Window exhaustion_window(const GroupModel& g, int n);
Window ball_window(const GroupModel& g, double radius);
bool window_contains(const GroupModel& g, const Window& w, const GroupElement& x);
double ball_volume(const GroupModel& g, double radius);

using Integrand = std::function<double(const GroupElement&)>;

// Integral over the closed ball K = window.
double haar_integrate(const GroupModel& g, const Integrand& phi, const Window& window,
                      const QuadratureSpec& scheme);

// Integral over ball(r_out) minus ball(r_in); r_in < 0 means the full ball.
double haar_integrate_shell(const GroupModel& g, const Integrand& phi, double r_in,
                            double r_out, const QuadratureSpec& scheme);

// Partial sums S_n = int_{K_n} phi for n = 1..max_window, accumulated shell by
// shell so the sequence is exactly nondecreasing for nonnegative phi.
std::vector<double> windowed_integrals(const GroupModel& g, const Integrand& phi,
                                       int max_window, const QuadratureSpec& scheme);

// Elements of a ball, for discrete kinds only, in a fixed deterministic order.
std::vector<GroupElement> enumerate_ball(const GroupModel& g, double radius);

// An element drawn from normalized Haar measure on ball(radius), returned with
// the ball volume as importance weight (E[w phi(g)] = int_{ball} phi dlambda).
struct WeightedElement {
  GroupElement element;
  double weight = 0.0;
};
WeightedElement sample_haar(const GroupModel& g, std::mt19937_64& rng, double radius);

// Integer lattice H inside R^d with fundamental domain Omega = B [0,1)^d.
struct LatticeData {
  GroupModel ambient = GroupModel::real_vector(1);
  std::vector<std::vector<std::int64_t>> basis;  // rows
  double omega_volume = 1.0;

  static LatticeData standard(int d);
  static LatticeData with_basis(std::vector<std::vector<std::int64_t>> basis);
};

struct LatticeDecomposition {
  std::vector<std::int64_t> omega;
  GroupElement residue;
};

LatticeDecomposition lattice_fundamental_domain(const LatticeData& lattice,
                                                const GroupElement& g);
GroupElement lattice_element(const LatticeData& lattice, const std::vector<std::int64_t>& omega);
bool in_fundamental_domain(const LatticeData& lattice, const GroupElement& g);

}  // namespace hopf
