#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hopf {

enum class QuadratureMethod { Auto, GaussLegendre, Midpoint, MonteCarlo, Exact };

std::string to_string(QuadratureMethod m);
QuadratureMethod parse_quadrature_method(const std::string& s);

// Resolution and seeding of a quadrature rule.
//
// Auto picks tensor-product Gauss-Legendre for boxes of dimension <= 2 and
// stratified Monte Carlo otherwise. Discrete groups are always summed exactly
// whatever the method says, except that MonteCarlo / GaussLegendre requests on a
// purely discrete kind are honoured as exact sums too.
struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::Auto;
  int order = 8;              // Gauss-Legendre points per panel
  double panel_width = 0.5;   // panel width (GL) or cell width (midpoint)
  int max_panels = 1 << 16;   // per dimension, per box
  std::size_t samples = 4096; // Monte Carlo samples per box
  std::uint64_t seed = 0x5eedULL;

  static QuadratureSpec gauss_legendre(int order = 8, double panel_width = 0.5);
  static QuadratureSpec midpoint(double cell_width);
  static QuadratureSpec monte_carlo(std::size_t samples, std::uint64_t seed);
};

// Throws UnsupportedScheme when the resolution parameters are unusable.
void validate(const QuadratureSpec& spec);

// Gauss-Legendre nodes and weights on [-1, 1], 1 <= n <= 64.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussRule& gauss_legendre_rule(int n);

QuadratureMethod resolve_method(const QuadratureSpec& spec, int dims);

using BoxIntegrand = std::function<double(std::span<const double>)>;

// Integrates fn over the axis-aligned box [lo, hi] with a resolved method.
// `stream` decorrelates Monte Carlo draws between boxes.
double integrate_box(std::span<const double> lo, std::span<const double> hi,
                     const BoxIntegrand& fn, const QuadratureSpec& spec,
                     QuadratureMethod method, std::uint64_t stream = 0);

// Returns v, or throws NonFiniteIntegrand.
double checked(double v);

// SplitMix64 finalizer, used to derive per-stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace hopf
