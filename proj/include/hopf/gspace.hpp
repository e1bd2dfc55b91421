#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "hopf/group.hpp"
#include "hopf/homogeneous.hpp"
#include "hopf/quadrature.hpp"

namespace hopf {

// A point of a G-space. `component` distinguishes the pieces of a disjoint
// union (or the atoms of a translation space); `coords` are domain coordinates,
// with a Maharam / skew fiber coordinate appended last.
struct Point {
  int component = 0;
  std::vector<double> coords;
  bool operator==(const Point&) const = default;
};

std::string to_string(const Point& x);

enum class DomainKind {
  Circle,
  IntegerLine,
  RealLine,
  ProductWithFiber,
  CosetPlane,
  LabeledFinite,
  DisjointUnion,
  KrengelDiscrete,
  GroupCopy,  // G itself (or W x G) under left translation
};

std::string to_string(DomainKind k);

// Where test functions look: Euclidean coordinates plus a multiplicative factor
// (fiber products fold the fiber weight in here).
struct Location {
  std::vector<double> coords;
  double factor = 1.0;
};

struct WeightedPoint {
  Point point;
  double weight = 0.0;  // importance weight: E[w h(X)] = int_trunc h dmu
};

using PointFunction = std::function<double(const Point&)>;

struct SpaceModel {
  std::string name;
  GroupModel group = GroupModel::integer_lattice(1);
  DomainKind domain = DomainKind::IntegerLine;
  bool measure_preserving = false;
  double truncation_mass = 0.0;  // mu of the sampling / integration window
  std::string truncation;        // human-readable window description
  std::map<std::string, std::string> metadata;
  int components = 1;  // number of Point::component values in use

  std::function<bool(const Point&)> contains;
  std::function<Point(const GroupElement&, const Point&)> act;
  std::function<double(const GroupElement&, const Point&)> cocycle;      // grad_g(x)
  std::function<double(const GroupElement&, const Point&)> log_cocycle;  // log grad_g(x)
  std::function<Location(const Point&)> locate;
  std::function<WeightedPoint(std::mt19937_64&)> sampler;
  // Deterministic int h dmu over the truncation window.
  std::function<double(const PointFunction&, const QuadratureSpec&)> integrate;
  // Optional domain metric for equality tests (default: max coordinate gap).
  std::function<double(const Point&, const Point&)> distance;
  // Flattened pieces for unions (with their measure weights); single base for
  // fiber products.
  std::vector<std::shared_ptr<const SpaceModel>> parts;
  std::vector<double> part_weights;
};

// Checked entry points (DomainMismatch on foreign elements or points).
Point act(const SpaceModel& s, const GroupElement& g, const Point& x);
double rn_cocycle(const SpaceModel& s, const GroupElement& g, const Point& x);
double log_rn_cocycle(const SpaceModel& s, const GroupElement& g, const Point& x);

std::vector<WeightedPoint> sample_points(const SpaceModel& s, std::size_t n, std::uint64_t seed,
                                         std::uint64_t stream = 0);

// Distance used for point equality tests (component mismatch -> infinity;
// circle coordinates compared modulo 1; angles modulo 2 pi).
double point_distance(const SpaceModel& s, const Point& a, const Point& b);

// ----------------------------------------------------------------- sets

struct SetDescriptor {
  std::string name;
  std::function<bool(const Point&)> contains;
  std::optional<double> mass;  // exact mu(A) when known
  // Optional sampler of mu restricted to A (weight = mu(A) convention).
  std::function<WeightedPoint(std::mt19937_64&)> sampler;
};

// Half-open [lo, hi) on coordinate `coord`; component < 0 matches every component.
SetDescriptor interval_set(double lo, double hi, int component = -1, int coord = 0);
// Points whose coordinate `coord` equals one of `values` exactly.
SetDescriptor finite_set(std::vector<double> values, int component = -1, int coord = 0);
SetDescriptor component_set(int component);
SetDescriptor union_set(const SetDescriptor& a, const SetDescriptor& b);
SetDescriptor intersect_set(const SetDescriptor& a, const SetDescriptor& b);

// mu(A): the descriptor's exact mass, else the space's deterministic integral of 1_A.
double set_mass(const SpaceModel& s, const SetDescriptor& a, const QuadratureSpec& scheme);

// -------------------------------------------------------- test functions

enum class TestFamily { Gaussian, ExpDecay, Constant, Indicator };

struct TestFunction {
  TestFamily family = TestFamily::Constant;
  double param = 1.0;  // sigma for Gaussian, base for ExpDecay
  std::shared_ptr<const SetDescriptor> set;
  bool strictly_positive = true;
  std::optional<double> l1_norm;

  static TestFunction gaussian(double sigma);
  static TestFunction exp_decay(double base);
  static TestFunction constant();
  static TestFunction indicator(SetDescriptor a);
  TestFunction with_l1(double v) const;
  std::string describe() const;
};

double evaluate(const TestFunction& f, const SpaceModel& s, const Point& x);

// -------------------------------------------------------------- cocycles

struct CocycleSpec {
  enum class Form { RadonNikodym, FWeighted, Custom };
  Form form = Form::RadonNikodym;
  TestFunction f;  // FWeighted
  std::function<double(const GroupElement&, const Point&)> custom;  // multiplicative, > 0
  std::string label = "radon-nikodym";

  static CocycleSpec radon_nikodym();
  static CocycleSpec f_weighted(TestFunction f);
  static CocycleSpec custom_map(std::function<double(const GroupElement&, const Point&)> psi,
                                std::string label);
};

double evaluate_cocycle(const CocycleSpec& c, const SpaceModel& s, const GroupElement& g,
                        const Point& x);

// Largest relative residual of psi_{gh}(x) = psi_g(h.x) psi_h(x) over `samples`
// random triples (group elements drawn from ball(radius)).
double cocycle_identity_residual(const CocycleSpec& c, const SpaceModel& s, std::size_t samples,
                                 std::uint64_t seed, double radius = 4.0);

// Both sides of the transport identity
//   int grad_g(x) f0(g.x) f1(x) dmu = int f0(x) f1(g^{-1}.x) dmu
// over the space's truncation window.
struct IdentityResidual {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

IdentityResidual transport_identity(const SpaceModel& s, const GroupElement& g, const PointFunction& f0,
                                    const PointFunction& f1, const QuadratureSpec& scheme);

// -------------------------------------------------------------- fibers

struct FiberDensity {
  std::string name;
  std::function<double(double)> log_density;  // log q(t)
  static FiberDensity exponential();            // q(t) = e^t (Maharam invariant form)
  static FiberDensity laplace();                // q(t) = (1/2) e^{-|t|}
  static FiberDensity lebesgue();               // q(t) = 1
};

// ------------------------------------------------------------- catalog

enum class LineWeight { Uniform, Decaying };

SpaceModel circle_rotation(double alpha = 0.41421356237309504880);
// Z on Z; Decaying uses mu{k} = 2^{-|k|}. `truncation` bounds sampling/integration.
SpaceModel integer_translation(LineWeight w = LineWeight::Uniform, int truncation = 64);
// R on R; Decaying uses dmu = e^{-|x|} dx.
SpaceModel real_translation(LineWeight w = LineWeight::Uniform, double truncation = 32.0);
// W x G with left translation in G; atom weights must be positive.
SpaceModel translation_space(const std::vector<double>& atom_weights, const GroupModel& g,
                             double truncation = 32.0);
// Z acting on Z/n by rotation; optional positive point weights.
SpaceModel cyclic_rotation(int n, std::vector<double> weights = {});
// Z acting trivially on n points.
SpaceModel trivial_action_space(int n);
// Pieces must share the group; weights scale each piece's measure.
SpaceModel disjoint_union(const std::vector<SpaceModel>& parts, std::vector<double> weights = {});
// G/K for a compact catalog subgroup, with the pushforward of Haar.
SpaceModel coset_space(const GroupPair& pair, double truncation = 16.0);

struct KrengelAtom {
  double weight = 1.0;
  SubgroupKind subgroup = SubgroupKind::Trivial;
};
SpaceModel krengel_space(const GroupModel& g, const std::vector<KrengelAtom>& atoms,
                         double truncation = 16.0);

// X x R with g.(x,t) = (g.x, t - log grad_g(x)) and measure mu x e^t dt.
SpaceModel maharam_extend(const SpaceModel& base, double t_truncation = 20.0);
// Same action with the probability fiber (1/2)e^{-|t|}dt.
SpaceModel maharam_probability_space(const SpaceModel& base, double t_truncation = 20.0);
// grad-hat_g(x,t) = grad_g(x) e^{|t| - |t - log grad_g(x)|}.
double maharam_probability_cocycle(const SpaceModel& base, const GroupElement& g, const Point& x,
                                   double t);
// X x R with g.(x,t) = (g.x, t - log psi_g(x)) and measure mu x q(t)dt.
// Throws InvalidCocycle when psi fails the identity test (residual > 1e-8).
SpaceModel skew_product(const SpaceModel& base, const CocycleSpec& psi, const FiberDensity& q,
                        double t_truncation = 20.0);

// Name -> short description of the space catalog (for the CLI).
std::vector<std::pair<std::string, std::string>> space_catalog();

}  // namespace hopf
