#include "hopf/hopf_engine.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <sstream>

#include "hopf/error.hpp"

namespace hopf {

namespace {

double window_radius(int n) { return std::ldexp(1.0, n); }

void require_windows(int max_window) {
  if (max_window < 3) throw ConfigError("max_window must be at least 3, got " + std::to_string(max_window));
  if (max_window > 40) throw ConfigError("max_window must be at most 40, got " + std::to_string(max_window));
}

void require_point(const SpaceModel& s, const Point& x) {
  if (!s.contains(x)) throw DomainMismatch("point " + to_string(x) + " is not in " + s.name);
}

// Partial integrals over K_0, K_1, ..., accumulated shell by shell.
std::vector<SeriesEntry> window_series(const GroupModel& g, const Integrand& phi, int max_window,
                                       const QuadratureSpec& scheme) {
  std::vector<SeriesEntry> out;
  double acc = 0.0;
  double prev = -1.0;
  for (int n = 0; n <= max_window; ++n) {
    const double r = window_radius(n);
    acc += haar_integrate_shell(g, phi, prev, r, scheme);
    out.push_back({n, acc, ball_volume(g, r)});
    prev = r;
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::string DecisionPolicy::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "min_windows=" << min_windows << " blowup_factor=" << blowup_factor << " sat_tol=" << sat_tol
     << " tail=" << tail << " min_slope=" << min_slope << " quorum=" << quorum;
  return os.str();
}

void validate(const DecisionPolicy& p) {
  if (p.min_windows < 2) throw ConfigError("policy.min_windows must be at least 2");
  if (p.tail < 2) throw ConfigError("policy.tail must be at least 2");
  if (p.tail > p.min_windows) throw ConfigError("policy.tail must not exceed policy.min_windows");
  if (!(p.blowup_factor > 1.0)) throw ConfigError("policy.blowup_factor must exceed 1");
  if (!(p.sat_tol > 0.0)) throw ConfigError("policy.sat_tol must be positive");
  if (!(p.min_slope > 0.0)) throw ConfigError("policy.min_slope must be positive");
  if (!(p.quorum > 0.0 && p.quorum <= 1.0)) throw ConfigError("policy.quorum must lie in (0, 1]");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Conservative: return "Conservative";
    case Verdict::Dissipative: return "Dissipative";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

std::string to_string(SetVerdict v) {
  switch (v) {
    case SetVerdict::Recurrent: return "Recurrent";
    case SetVerdict::HaarRecurrent: return "HaarRecurrent";
    case SetVerdict::Transient: return "Transient";
    case SetVerdict::HaarTransient: return "HaarTransient";
    case SetVerdict::Mixed: return "Mixed";
    case SetVerdict::Undecided: return "Undecided";
  }
  return "?";
}

SeriesDiagnostics diagnose(const std::vector<SeriesEntry>& e, int tail) {
  SeriesDiagnostics d;
  const int m = static_cast<int>(e.size());
  if (m >= 2) {
    const double last = e[m - 1].value, before = e[m - 2].value;
    d.saturation = last > 0.0 ? (last - before) / last : 0.0;
  }
  const int k = std::min(tail, m);
  if (k >= 2) {
    double mx = 0.0, my = 0.0;
    for (int i = m - k; i < m; ++i) {
      mx += e[i].volume;
      my += e[i].value;
    }
    mx /= k;
    my /= k;
    double sxy = 0.0, sxx = 0.0;
    for (int i = m - k; i < m; ++i) {
      sxy += (e[i].volume - mx) * (e[i].value - my);
      sxx += (e[i].volume - mx) * (e[i].volume - mx);
    }
    d.slope = sxx > 0.0 ? std::max(0.0, sxy / sxx) : 0.0;
  }
  return d;
}

Classification classify_series(const std::vector<SeriesEntry>& e, const DecisionPolicy& p) {
  validate(p);
  Classification c;
  c.policy = p;
  const int m = static_cast<int>(e.size());
  if (m < p.min_windows) {
    c.reason = "insufficient windows";
    c.evidence["windows"] = m;
    return c;
  }
  const SeriesDiagnostics d = diagnose(e, p.tail);
  c.evidence["windows"] = m;
  c.evidence["last_value"] = e.back().value;
  c.evidence["slope"] = d.slope;
  c.evidence["saturation"] = d.saturation;

  bool saturated = true, growing = true;
  double worst = 0.0;
  for (int i = m - p.tail; i < m; ++i) {
    const double inc = e[i].value - e[i - 1].value;
    const double rel = e[i].value > 0.0 ? inc / e[i].value : 0.0;
    worst = std::max(worst, rel);
    if (!(rel < p.sat_tol)) saturated = false;
    if (!(inc > 0.0)) growing = false;
  }
  c.evidence["max_relative_increment"] = worst;
  if (saturated) {
    c.verdict = Verdict::Dissipative;
    c.reason = e.back().value == 0.0 ? "saturated: series identically zero"
                                     : "saturated: relative increments < " + fmt(p.sat_tol);
    return c;
  }
  // A saturated tail is checked first: far from the mass of f the first
  // window can be arbitrarily small, so the ratio alone is not evidence.
  // Growth is measured in units of the first nonzero window's mean density,
  // the same reference as the blowup ratio: 1 for S proportional to the window
  // volume, whatever the size of f near the orbit.
  double first = 0.0, rel_slope = 0.0;
  for (const auto& x : e)
    if (x.value > 0.0) {
      first = x.value;
      rel_slope = x.volume > 0.0 ? d.slope * x.volume / x.value : 0.0;
      break;
    }
  c.evidence["first_nonzero"] = first;
  c.evidence["relative_slope"] = rel_slope;
  if (first > 0.0 && e.back().value >= p.blowup_factor * first) {
    c.verdict = Verdict::Conservative;
    c.reason = "blowup: S_n >= " + fmt(p.blowup_factor) + " x first nonzero window";
    return c;
  }
  if (growing && rel_slope >= p.min_slope) {
    c.verdict = Verdict::Conservative;
    c.reason = "linear growth: relative slope " + fmt(rel_slope) + " >= " + fmt(p.min_slope);
    return c;
  }
  c.reason = "neither saturation nor growth threshold met";
  return c;
}

HopfSeries hopf_transform(const SpaceModel& s, const TestFunction& f, const Point& x, int max_window,
                          const QuadratureSpec& scheme, bool allow_nonnegative) {
  require_windows(max_window);
  require_point(s, x);
  validate(scheme);
  if (!f.strictly_positive && !allow_nonnegative)
    throw ConfigError("Hopf transform needs a strictly positive test function, got " + f.describe());
  const Integrand phi = [&](const GroupElement& g) {
    return s.cocycle(g, x) * evaluate(f, s, s.act(g, x));
  };
  HopfSeries out;
  out.point = x;
  out.entries = window_series(s.group, phi, max_window, scheme);
  const SeriesDiagnostics d = diagnose(out.entries);
  out.slope_diagnostic = d.slope;
  out.saturation_diagnostic = d.saturation;
  return out;
}

Classification classify_point(const HopfSeries& series, const DecisionPolicy& policy) {
  return classify_series(series.entries, policy);
}

QuadratureSpec indicator_scheme(const GroupModel& g, const QuadratureSpec& scheme) {
  if (!g.has_continuous_part() || scheme.method == QuadratureMethod::Midpoint) return scheme;
  if (g.kind() == GroupKind::EuclideanMotions2D) return scheme;
  QuadratureSpec m = QuadratureSpec::midpoint(scheme.panel_width / 16.0);
  m.seed = scheme.seed;
  m.samples = scheme.samples;
  return m;
}

ReturnVolumeSeries return_volume(const SpaceModel& s, const SetDescriptor& a, const Point& x,
                                 int max_window, const QuadratureSpec& scheme) {
  require_windows(max_window);
  require_point(s, x);
  validate(scheme);
  const GroupModel& g = s.group;
  const Integrand phi = [&](const GroupElement& h) {
    return a.contains(s.act(inverse(g, h), x)) ? 1.0 : 0.0;
  };
  ReturnVolumeSeries out;
  out.set = a.name;
  out.point = x;
  out.entries = window_series(g, phi, max_window, indicator_scheme(g, scheme));
  const SeriesDiagnostics d = diagnose(out.entries);
  out.slope_diagnostic = d.slope;
  out.saturation_diagnostic = d.saturation;
  return out;
}

std::string SetClassification::summary() const {
  std::vector<std::string> flags;
  if (haar_recurrent) flags.push_back("HaarRecurrent");
  if (recurrent) flags.push_back("Recurrent");
  if (haar_transient) flags.push_back("HaarTransient");
  if (transient) flags.push_back("Transient");
  if (flags.empty()) return to_string(verdict);
  std::string s;
  for (std::size_t i = 0; i < flags.size(); ++i) s += (i ? "+" : "") + flags[i];
  return s;
}

SetClassification classify_set(const SpaceModel& s, const SetDescriptor& a,
                               const std::vector<Point>& sample_points, int max_window,
                               const DecisionPolicy& policy, const QuadratureSpec& scheme) {
  validate(policy);
  if (sample_points.empty()) throw EmptySample("classify_set needs at least one sample point");
  SetClassification out;
  std::size_t in_a = 0, unbounded = 0, conservative = 0, bounded = 0, dissipative = 0;
  for (const Point& x : sample_points) {
    PointVerdict pv;
    pv.point = x;
    pv.in_set = a.contains(x);
    const ReturnVolumeSeries rv = return_volume(s, a, x, max_window, scheme);
    pv.volume = classify_series(rv.entries, policy);
    const auto& e = rv.entries;
    const int m = static_cast<int>(e.size());
    pv.unbounded = pv.bounded = true;
    for (int i = m - policy.tail; i < m; ++i) {
      const double inc = e[i].value - e[i - 1].value;
      if (!(inc > 0.0)) pv.unbounded = false;
      if (inc != 0.0) pv.bounded = false;
    }
    if (pv.in_set) {
      ++in_a;
      unbounded += pv.unbounded;
      conservative += pv.volume.verdict == Verdict::Conservative;
    }
    bounded += pv.bounded;
    dissipative += pv.volume.verdict == Verdict::Dissipative;
    out.points.push_back(std::move(pv));
  }
  const double n = static_cast<double>(sample_points.size());
  auto meets = [&](std::size_t k, double total) { return total > 0 && k / total >= policy.quorum; };
  out.recurrent = meets(unbounded, in_a);
  out.haar_recurrent = meets(conservative, in_a);
  out.transient = meets(bounded, n);
  out.haar_transient = meets(dissipative, n);
  if (out.haar_recurrent) out.verdict = SetVerdict::HaarRecurrent;
  else if (out.recurrent) out.verdict = SetVerdict::Recurrent;
  else if (out.haar_transient) out.verdict = SetVerdict::HaarTransient;
  else if (out.transient) out.verdict = SetVerdict::Transient;
  else if (conservative > 0 && dissipative > 0) out.verdict = SetVerdict::Mixed;
  else out.verdict = SetVerdict::Undecided;
  return out;
}

PoincareResult poincare_test(const SpaceModel& s, const SetDescriptor& a, int max_window,
                             std::size_t overlap_samples, std::uint64_t seed,
                             const DecisionPolicy& policy, const QuadratureSpec& scheme, double alpha) {
  require_windows(max_window);
  validate(policy);
  validate(scheme);
  if (overlap_samples < 16) throw ConfigError("overlap_samples must be at least 16");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("significance must lie in (0, 1)");

  // Samples of mu restricted to A with importance weights; E[sum w 1] / draws = mu(.).
  std::mt19937_64 rng(mix_seed(seed, 0x90a1ca4eULL));
  std::vector<Point> xs;
  std::vector<double> ws;
  double draws = 0.0;
  if (a.sampler) {
    for (std::size_t i = 0; i < overlap_samples; ++i) {
      WeightedPoint wp = a.sampler(rng);
      xs.push_back(wp.point);
      ws.push_back(wp.weight);
    }
    draws = static_cast<double>(overlap_samples);
  } else {
    const std::size_t cap = 1000 * overlap_samples;
    while (xs.size() < overlap_samples && draws < cap) {
      WeightedPoint wp = s.sampler(rng);
      draws += 1.0;
      if (a.contains(wp.point)) {
        xs.push_back(wp.point);
        ws.push_back(wp.weight);
      }
    }
  }
  if (xs.empty()) throw EmptySample("no sample of " + s.name + " fell in " + a.name);

  PoincareResult out;
  out.accepted_samples = xs.size();
  for (double w : ws) out.mass_estimate += w;
  out.mass_estimate /= draws;
  // A hit is impossible when mu(A cap gA) = 0, so any hit rejects at every level;
  // with no hit the fraction is bounded by 1 - alpha^(1/N).
  out.zero_overlap_bound = 1.0 - std::pow(alpha, 1.0 / static_cast<double>(xs.size()));

  const GroupModel& g = s.group;
  const QuadratureSpec ind = indicator_scheme(g, scheme);
  auto overlap = [&](const GroupElement& h) {
    const GroupElement hi = inverse(g, h);
    double acc = 0.0;
    bool hit = false;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (a.contains(s.act(hi, xs[i]))) {
        acc += ws[i];
        hit = true;
      }
    return std::pair<double, bool>{acc / draws, hit};
  };
  out.positive_volume = window_series(g, [&](const GroupElement& h) { return overlap(h).second ? 1.0 : 0.0; },
                                      max_window, ind);
  out.overlap_integral =
      window_series(g, [&](const GroupElement& h) { return overlap(h).first; }, max_window, ind);

  std::vector<double> fub(max_window + 1, 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const ReturnVolumeSeries rv = return_volume(s, a, xs[i], max_window, scheme);
    for (int n = 0; n <= max_window; ++n) fub[n] += ws[i] * rv.entries[n].value / draws;
  }
  for (int n = 0; n <= max_window; ++n)
    out.fubini_integral.push_back({n, fub[n], out.positive_volume[n].volume});
  const double l = out.overlap_integral.back().value, r = out.fubini_integral.back().value;
  out.fubini_residual = std::abs(l - r) / std::max({std::abs(l), std::abs(r), DBL_MIN});

  out.classification = classify_series(out.positive_volume, policy);
  out.poincare_recurrent = out.classification.verdict == Verdict::Conservative;
  return out;
}

LatticeReduction lattice_reduce(const SpaceModel& s, const LatticeData& lattice, const TestFunction& f,
                                const Point& x, int max_window, const QuadratureSpec& scheme) {
  if (s.group.kind() != GroupKind::RealVector)
    throw DomainMismatch("lattice reduction needs a space over R^d, got " + s.group.name());
  if (!(lattice.ambient == s.group))
    throw DomainMismatch("lattice lives in " + lattice.ambient.name() + ", space group is " + s.group.name());
  if (max_window < 0) throw ConfigError("max_window must be nonnegative");
  require_point(s, x);
  validate(scheme);
  const int d = s.group.dim();
  const double jac = lattice.omega_volume;
  const QuadratureMethod method = resolve_method(scheme, d);
  const std::vector<std::vector<std::int64_t>> basis = lattice.basis;

  auto chart = [basis, d](std::span<const double> u) {
    std::vector<double> v(d, 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v[j] += u[i] * static_cast<double>(basis[i][j]);
    return GroupElement::reals(std::move(v));
  };
  auto density = [&s, &f, chart](const Point& y) {
    return [&s, &f, chart, y](std::span<const double> u) {
      const GroupElement g = chart(u);
      return s.cocycle(g, y) * evaluate(f, s, s.act(g, y));
    };
  };

  LatticeReduction out;
  const QuadratureSpec spec = scheme;
  out.f_omega = [density, d, jac, spec, method](const Point& y) {
    const std::vector<double> lo(d, 0.0), hi(d, 1.0);
    return jac * integrate_box(lo, hi, density(y), spec, method);
  };

  // Lattice side: omega over the integer box [-2^n, 2^n - 1]^d, new cells only.
  double acc_h = 0.0, acc_g = 0.0;
  std::int64_t prev = 0;
  for (int n = 0; n <= max_window; ++n) {
    const std::int64_t R = std::int64_t{1} << n;
    std::vector<std::int64_t> w(d, -R);
    while (true) {
      bool inner = n > 0;
      for (int i = 0; i < d && inner; ++i) inner = (w[i] >= -prev && w[i] <= prev - 1);
      if (!inner) {
        const GroupElement h = lattice_element(lattice, w);
        acc_h += s.cocycle(h, x) * out.f_omega(s.act(h, x));
      }
      int i = 0;
      while (i < d && ++w[i] > R - 1) w[i++] = -R;
      if (i == d) break;
    }
    // Continuous side over the same union of cells, as 2d slabs of the shell.
    const Point xx = x;
    auto fn = density(xx);
    auto scaled = [&](std::span<const double> u) { return jac * fn(u); };
    const double r_out = static_cast<double>(R), r_in = static_cast<double>(prev);
    if (n == 0) {
      const std::vector<double> lo(d, -r_out), hi(d, r_out);
      acc_g += integrate_box(lo, hi, scaled, scheme, method, 0);
    } else {
      for (int k = 0; k < d; ++k) {
        for (int side = 0; side < 2; ++side) {
          std::vector<double> lo(d), hi(d);
          for (int j = 0; j < d; ++j) {
            if (j < k) lo[j] = -r_in, hi[j] = r_in;
            else if (j > k) lo[j] = -r_out, hi[j] = r_out;
          }
          if (side == 0) lo[k] = -r_out, hi[k] = -r_in;
          else lo[k] = r_in, hi[k] = r_out;
          acc_g += integrate_box(lo, hi, scaled, scheme, method, 2 * k + side + 1);
        }
      }
    }
    out.lattice_series.push_back({n, acc_h, std::pow(2.0 * r_out, d) * jac});
    out.continuous_series.push_back({n, acc_g, std::pow(2.0 * r_out, d) * jac});
    out.residual = std::max(out.residual, std::abs(acc_h - acc_g));
    prev = R;
  }
  return out;
}

std::vector<double> default_r_grid() {
  std::vector<double> r;
  for (int k = 0; k <= 20; ++k) r.push_back(std::ldexp(1.0, -k));
  return r;
}

MaharamCriterion maharam_criterion(const SpaceModel& s, const TestFunction& f, const Point& x,
                                   const std::vector<double>& r_grid, int max_window,
                                   const DecisionPolicy& policy, const QuadratureSpec& scheme) {
  require_windows(max_window);
  require_point(s, x);
  validate(scheme);
  if (!f.strictly_positive) throw ConfigError("level-set criterion needs a strictly positive f");
  if (r_grid.empty()) throw ConfigError("r_grid must be nonempty");
  const QuadratureSpec ind = indicator_scheme(s.group, scheme);
  MaharamCriterion out;
  bool any_conservative = false, all_dissipative = true;
  for (double r : r_grid) {
    if (!(r > 0.0)) throw ConfigError("level-set thresholds must be positive");
    const Integrand phi = [&](const GroupElement& g) {
      return s.cocycle(g, x) * evaluate(f, s, s.act(g, x)) >= r ? 1.0 : 0.0;
    };
    LevelSetSeries ls{r, window_series(s.group, phi, max_window, ind)};
    Classification c = classify_series(ls.entries, policy);
    any_conservative = any_conservative || c.verdict == Verdict::Conservative;
    all_dissipative = all_dissipative && c.verdict == Verdict::Dissipative;
    out.levels.push_back(std::move(ls));
    out.level_verdicts.push_back(std::move(c));
  }
  out.verdict = any_conservative ? Verdict::Conservative
                : all_dissipative ? Verdict::Dissipative
                                  : Verdict::Undecided;
  return out;
}

SeparatorTable orbit_separator(const SpaceModel& s, const Point& x0, const Point& x1,
                               const std::vector<SetDescriptor>& basis_sets,
                               const std::vector<SetDescriptor>& transient_sets, int max_window,
                               const QuadratureSpec& scheme) {
  if (basis_sets.empty() || transient_sets.empty())
    throw ConfigError("orbit separator needs basis sets and transient sets");
  SeparatorTable out;
  const QuadratureSpec ind = indicator_scheme(s.group, scheme);
  double scale = 0.0;
  for (const auto& u : basis_sets)
    for (const auto& t : transient_sets) {
      const SetDescriptor ut = intersect_set(u, t);
      out.row_labels.push_back(ut.name);
      out.u0.push_back(return_volume(s, ut, x0, max_window, scheme).entries.back().value);
      out.u1.push_back(return_volume(s, ut, x1, max_window, scheme).entries.back().value);
      scale = std::max({scale, out.u0.back(), out.u1.back()});
    }
  // Exact sums on discrete groups; each midpoint boundary crossing costs at
  // most one cell, and Monte Carlo windows get a relative band.
  out.tolerance = 1e-9 * (1.0 + scale);
  if (s.group.has_continuous_part()) {
    if (ind.method == QuadratureMethod::Midpoint) {
      out.tolerance += 4.0 * std::pow(ind.panel_width, coordinate_count(s.group));
    } else {
      out.tolerance += 0.1 * (1.0 + scale);
    }
  }
  for (std::size_t i = 0; i < out.u0.size(); ++i)
    if (std::abs(out.u0[i] - out.u1[i]) > out.tolerance) out.separated = true;
  return out;
}

}  // namespace hopf
