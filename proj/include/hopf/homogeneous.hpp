#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hopf/group.hpp"
#include "hopf/rational.hpp"

namespace hopf {

// Closed subgroups C of the ambient group available in the catalog. Line is
// the non-compact R x {0} inside R^2, kept only for the divergence demo.
enum class SubgroupKind { Trivial, CyclicFactor, SO2, Line };

std::string to_string(SubgroupKind k);

struct GroupPair {
  GroupModel ambient = GroupModel::real_vector(1);
  SubgroupKind subgroup = SubgroupKind::Trivial;

  std::string name() const;  // e.g. "E2/SO2"
  bool compact() const;
};

// Validates that `sub` is in the catalog for `ambient`:
// Trivial for any G, SO2 for E2, CyclicFactor for a product whose right factor
// is finite cyclic, Line for R^2. Throws DomainMismatch otherwise.
GroupPair make_group_pair(const GroupModel& ambient, SubgroupKind sub);
std::vector<GroupPair> catalog_pairs();

bool in_subgroup(const GroupPair& p, const GroupElement& g);
GroupElement subgroup_element(const GroupPair& p, double param);
double subgroup_modular(const GroupPair& p, const GroupElement& c);
double rho(const GroupPair& p, const GroupElement& g);

// |rho(gc) - (Delta_C(c)/Delta_G(c)) rho(g)| / rho(gc).
double rho_law_residual(const GroupPair& p, const GroupElement& g, const GroupElement& c);

// Coset domain G/C: its chart group (R^2 for E2/SO2, the left factor for a
// cyclic factor, G itself for the trivial subgroup), projection and section.
GroupModel coset_chart(const GroupPair& p);
std::vector<double> project(const GroupPair& p, const GroupElement& g);
GroupElement section(const GroupPair& p, std::span<const double> y);
std::vector<double> act_on_coset(const GroupPair& p, const GroupElement& g, std::span<const double> y);

// int_C fn dlambda_C (compact subgroups; throws NonCompactSubgroup otherwise).
double integrate_subgroup(const GroupPair& p, const std::function<double(const GroupElement&)>& fn,
                          const QuadratureSpec& scheme);
double subgroup_volume(const GroupPair& p);

// int over the coset window of radius r against the base measure of the chart
// (Lebesgue box [-r,r]^2 for E2/SO2, counting for discrete charts, Haar for G).
double integrate_cosets(const GroupPair& p, const std::function<double(std::span<const double>)>& fn,
                        double radius, const QuadratureSpec& scheme);

struct WeilResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // |lhs - rhs| / max(|lhs|, eps)
};

WeilResult weil_verify(const GroupPair& p, const Integrand& phi, const Window& window,
                       const QuadratureSpec& scheme);

struct ExactWeilResult {
  Rational lhs;
  Rational rhs;
  bool equal = false;
};

// Discrete pairs only: both sides as exact finite sums.
ExactWeilResult weil_verify_exact(const GroupPair& p,
                                  const std::function<Rational(const GroupElement&)>& phi,
                                  const Window& window);

enum class MeasureProvenance { PushforwardOfHaar, Normalized };

struct HomogeneousMeasure {
  std::string domain;
  MeasureProvenance provenance = MeasureProvenance::PushforwardOfHaar;
  // Density with respect to the chart's base measure.
  std::function<double(std::span<const double>)> density;
  double constant = 0.0;             // pushforward / base-measure ratio
  double constant_spread = 0.0;      // max deviation of the grid ratios
  double invariance_residual = 0.0;  // over sampled ambient elements
};

HomogeneousMeasure pushforward_haar(const GroupPair& p, const Window& window,
                                    const QuadratureSpec& scheme, std::uint64_t seed = 7);
HomogeneousMeasure normalized_invariant(const GroupPair& p, double truncation);

struct CompactnessResult {
  bool finite = false;
  double value = 0.0;                 // finite case
  std::vector<double> radii;          // divergent case: window radii
  std::vector<double> window_values;  // int_{K_n cap C}
  std::string verdict;                // "finite" or "infinite by growth" or "undecided"
};

CompactnessResult compactness_integral(const GroupPair& p, int max_window = 10,
                                       const QuadratureSpec& scheme = QuadratureSpec{});

}  // namespace hopf
