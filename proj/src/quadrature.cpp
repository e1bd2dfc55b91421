#include "hopf/quadrature.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "hopf/error.hpp"

namespace hopf {

std::string to_string(QuadratureMethod m) {
  switch (m) {
    case QuadratureMethod::Auto: return "auto";
    case QuadratureMethod::GaussLegendre: return "gauss-legendre";
    case QuadratureMethod::Midpoint: return "midpoint";
    case QuadratureMethod::MonteCarlo: return "monte-carlo";
    case QuadratureMethod::Exact: return "exact";
  }
  return "?";
}

QuadratureMethod parse_quadrature_method(const std::string& s) {
  if (s == "auto") return QuadratureMethod::Auto;
  if (s == "gauss-legendre") return QuadratureMethod::GaussLegendre;
  if (s == "midpoint") return QuadratureMethod::Midpoint;
  if (s == "monte-carlo") return QuadratureMethod::MonteCarlo;
  if (s == "exact") return QuadratureMethod::Exact;
  throw UnsupportedScheme("unknown quadrature method '" + s + "'");
}

QuadratureSpec QuadratureSpec::gauss_legendre(int order, double panel_width) {
  QuadratureSpec s;
  s.method = QuadratureMethod::GaussLegendre;
  s.order = order;
  s.panel_width = panel_width;
  return s;
}

QuadratureSpec QuadratureSpec::midpoint(double cell_width) {
  QuadratureSpec s;
  s.method = QuadratureMethod::Midpoint;
  s.panel_width = cell_width;
  s.max_panels = 1 << 24;
  return s;
}

QuadratureSpec QuadratureSpec::monte_carlo(std::size_t samples, std::uint64_t seed) {
  QuadratureSpec s;
  s.method = QuadratureMethod::MonteCarlo;
  s.samples = samples;
  s.seed = seed;
  return s;
}

void validate(const QuadratureSpec& spec) {
  if (spec.order < 1 || spec.order > 64)
    throw UnsupportedScheme("order must lie in [1, 64], got " + std::to_string(spec.order));
  if (!(spec.panel_width > 0.0) || !std::isfinite(spec.panel_width))
    throw UnsupportedScheme("panel_width must be positive");
  if (spec.max_panels < 1) throw UnsupportedScheme("max_panels must be positive");
  if (spec.method == QuadratureMethod::MonteCarlo && spec.samples == 0)
    throw UnsupportedScheme("monte-carlo requires a positive sample count");
}

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    r.nodes[i] = -z;
    r.nodes[n - 1 - i] = z;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  if (n == 1) {
    r.nodes[0] = 0.0;
    r.weights[0] = 2.0;
  }
  return r;
}

int panel_count(double len, const QuadratureSpec& spec) {
  if (len <= 0.0) return 0;
  const double raw = std::ceil(len / spec.panel_width - 1e-12);
  if (raw > spec.max_panels) return spec.max_panels;
  return std::max(1, static_cast<int>(raw));
}

struct TensorRule {
  // Per-dimension 1D nodes and weights (already scaled to the box).
  std::vector<std::vector<double>> x, w;
};

TensorRule build_tensor(std::span<const double> lo, std::span<const double> hi,
                        const QuadratureSpec& spec, QuadratureMethod method) {
  TensorRule t;
  const std::size_t d = lo.size();
  t.x.resize(d);
  t.w.resize(d);
  for (std::size_t k = 0; k < d; ++k) {
    const double len = hi[k] - lo[k];
    const int panels = panel_count(len, spec);
    if (panels == 0) return TensorRule{};
    const double h = len / panels;
    if (method == QuadratureMethod::Midpoint) {
      for (int p = 0; p < panels; ++p) {
        t.x[k].push_back(lo[k] + (p + 0.5) * h);
        t.w[k].push_back(h);
      }
    } else {
      const GaussRule& g = gauss_legendre_rule(spec.order);
      for (int p = 0; p < panels; ++p) {
        const double a = lo[k] + p * h;
        for (std::size_t j = 0; j < g.nodes.size(); ++j) {
          t.x[k].push_back(a + 0.5 * h * (g.nodes[j] + 1.0));
          t.w[k].push_back(0.5 * h * g.weights[j]);
        }
      }
    }
  }
  return t;
}

double tensor_sum(const TensorRule& t, const BoxIntegrand& fn, std::vector<double>& buf,
                  std::size_t k) {
  double acc = 0.0;
  const auto& xs = t.x[k];
  const auto& ws = t.w[k];
  for (std::size_t i = 0; i < xs.size(); ++i) {
    buf[k] = xs[i];
    const double v = (k + 1 == buf.size()) ? checked(fn(std::span<const double>(buf)))
                                           : tensor_sum(t, fn, buf, k + 1);
    acc += ws[i] * v;
  }
  return acc;
}

double monte_carlo(std::span<const double> lo, std::span<const double> hi,
                   const BoxIntegrand& fn, const QuadratureSpec& spec, std::uint64_t stream) {
  const std::size_t d = lo.size();
  double volume = 1.0;
  for (std::size_t k = 0; k < d; ++k) volume *= (hi[k] - lo[k]);
  if (volume <= 0.0) return 0.0;
  std::size_t m = static_cast<std::size_t>(
      std::floor(std::pow(static_cast<double>(spec.samples), 1.0 / d) + 1e-9));
  m = std::max<std::size_t>(m, 1);
  std::size_t cells = 1;
  for (std::size_t k = 0; k < d; ++k) cells *= m;
  std::mt19937_64 rng(mix_seed(spec.seed, stream));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> buf(d);
  double acc = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t k = 0; k < d; ++k) {
      const double h = (hi[k] - lo[k]) / m;
      buf[k] = lo[k] + (idx[k] + unit(rng)) * h;
    }
    acc += checked(fn(std::span<const double>(buf)));
    for (std::size_t k = 0; k < d; ++k) {
      if (++idx[k] < m) break;
      idx[k] = 0;
    }
  }
  return acc * volume / static_cast<double>(cells);
}

}  // namespace

const GaussRule& gauss_legendre_rule(int n) {
  static const std::array<GaussRule, 65> table = [] {
    std::array<GaussRule, 65> t;
    for (int k = 1; k <= 64; ++k) t[k] = compute_rule(k);
    return t;
  }();
  if (n < 1 || n > 64) throw UnsupportedScheme("Gauss-Legendre order out of range");
  return table[n];
}

QuadratureMethod resolve_method(const QuadratureSpec& spec, int dims) {
  if (spec.method == QuadratureMethod::Auto)
    return dims <= 2 ? QuadratureMethod::GaussLegendre : QuadratureMethod::MonteCarlo;
  if (spec.method == QuadratureMethod::Exact)
    throw UnsupportedScheme("exact summation requested on a continuous domain");
  return spec.method;
}

double integrate_box(std::span<const double> lo, std::span<const double> hi,
                     const BoxIntegrand& fn, const QuadratureSpec& spec,
                     QuadratureMethod method, std::uint64_t stream) {
  if (lo.empty()) {
    std::vector<double> none;
    return checked(fn(std::span<const double>(none)));
  }
  if (method == QuadratureMethod::MonteCarlo) return monte_carlo(lo, hi, fn, spec, stream);
  const TensorRule t = build_tensor(lo, hi, spec, method);
  if (t.x.empty()) return 0.0;
  std::vector<double> buf(lo.size());
  return tensor_sum(t, fn, buf, 0);
}

double checked(double v) {
  if (!std::isfinite(v)) throw NonFiniteIntegrand("integrand evaluated to a non-finite value");
  return v;
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hopf
