#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hopf/gspace.hpp"

namespace hopf {

// Finite-window decision rule for divergence of a nondecreasing series.
struct DecisionPolicy {
  int min_windows = 6;
  double blowup_factor = 1e6;  // blowup threshold = factor x first nonzero value
  double sat_tol = 1e-6;       // relative increment bound for saturation
  int tail = 3;                // windows inspected by the tail diagnostics
  double min_slope = 1e-3;     // tail slope of S_n against lambda(K_n), relative to the first nonzero S_n / lambda(K_n)
  double quorum = 1.0;         // fraction of sample points needed for a set verdict

  std::string describe() const;
};

void validate(const DecisionPolicy& p);  // ConfigError

enum class Verdict { Conservative, Dissipative, Undecided };
std::string to_string(Verdict v);

struct SeriesEntry {
  int n = 0;
  double value = 0.0;
  double volume = 0.0;  // lambda(K_n)
};

struct SeriesDiagnostics {
  double slope = 0.0;       // >= 0
  double saturation = 0.0;  // relative increment of the last window
};

SeriesDiagnostics diagnose(const std::vector<SeriesEntry>& entries, int tail = 3);

struct HopfSeries {
  Point point;
  std::vector<SeriesEntry> entries;
  double slope_diagnostic = 0.0;
  double saturation_diagnostic = 0.0;
};

struct ReturnVolumeSeries {
  std::string set;
  Point point;
  std::vector<SeriesEntry> entries;
  double slope_diagnostic = 0.0;
  double saturation_diagnostic = 0.0;
};

struct LevelSetSeries {
  double r = 0.0;
  std::vector<SeriesEntry> entries;
};

struct Classification {
  Verdict verdict = Verdict::Undecided;
  std::string reason;
  std::map<std::string, double> evidence;
  DecisionPolicy policy;
};

// Generic classifier for a nondecreasing window series.
Classification classify_series(const std::vector<SeriesEntry>& entries, const DecisionPolicy& policy);

// S_n = int_{K_n} grad_g(x) f(g.x) dlambda(g), n = 0..max_window.
// f must be strictly positive unless `allow_nonnegative`.
HopfSeries hopf_transform(const SpaceModel& s, const TestFunction& f, const Point& x,
                          int max_window, const QuadratureSpec& scheme,
                          bool allow_nonnegative = false);
Classification classify_point(const HopfSeries& series, const DecisionPolicy& policy);

// Indicator integrals on continuous groups use the midpoint rule. A scheme that
// is not already midpoint is replaced by cells of width panel_width / 16; the
// error per window is at most (number of boundary crossings) x cell volume.
QuadratureSpec indicator_scheme(const GroupModel& g, const QuadratureSpec& scheme);

// lambda(R_A(x) cap K_n) with R_A(x) = {g : g^{-1}.x in A}.
ReturnVolumeSeries return_volume(const SpaceModel& s, const SetDescriptor& a, const Point& x,
                                 int max_window, const QuadratureSpec& scheme);

enum class SetVerdict { Recurrent, HaarRecurrent, Transient, HaarTransient, Mixed, Undecided };
std::string to_string(SetVerdict v);

struct PointVerdict {
  Point point;
  bool in_set = false;
  Classification volume;   // divergence of lambda(R_A(x) cap K_n)
  bool unbounded = false;  // returns keep arriving in the outer shells
  bool bounded = false;    // the outer shells carry no returns at all
};

struct SetClassification {
  std::vector<PointVerdict> points;
  bool recurrent = false;
  bool haar_recurrent = false;
  bool transient = false;
  bool haar_transient = false;
  SetVerdict verdict = SetVerdict::Undecided;
  std::string summary() const;
};

// Recurrence is judged on the sample points lying in A, transience on all of
// them; callers sample from A or from X accordingly. EmptySample on no points.
SetClassification classify_set(const SpaceModel& s, const SetDescriptor& a,
                               const std::vector<Point>& sample_points, int max_window,
                               const DecisionPolicy& policy, const QuadratureSpec& scheme);

struct PoincareResult {
  std::vector<SeriesEntry> positive_volume;  // lambda{g in K_n : mu(A cap g.A) > 0}
  std::vector<SeriesEntry> overlap_integral;  // int_{K_n} mu(A cap g.A) dlambda
  std::vector<SeriesEntry> fubini_integral;   // int_A lambda(R_A(x) cap K_n) dmu
  double fubini_residual = 0.0;               // relative, at the last window
  double mass_estimate = 0.0;                 // mu(A)
  std::size_t accepted_samples = 0;
  double zero_overlap_bound = 0.0;  // one-sided upper bound on mu(A cap gA)/mu(A) when no hit
  Classification classification;
  bool poincare_recurrent = false;
};

PoincareResult poincare_test(const SpaceModel& s, const SetDescriptor& a, int max_window,
                             std::size_t overlap_samples, std::uint64_t seed,
                             const DecisionPolicy& policy, const QuadratureSpec& scheme,
                             double alpha = 1e-4);

struct LatticeReduction {
  std::function<double(const Point&)> f_omega;
  std::vector<SeriesEntry> lattice_series;     // S^H_{f_Omega} over omega in [-2^n, 2^n - 1]^d
  std::vector<SeriesEntry> continuous_series;  // S^G_f over the matching union of cells
  double residual = 0.0;                       // max over windows
};

LatticeReduction lattice_reduce(const SpaceModel& s, const LatticeData& lattice,
                                const TestFunction& f, const Point& x, int max_window,
                                const QuadratureSpec& scheme);

std::vector<double> default_r_grid();  // 2^-k, k = 0..20

struct MaharamCriterion {
  std::vector<LevelSetSeries> levels;
  std::vector<Classification> level_verdicts;
  Verdict verdict = Verdict::Undecided;
};

MaharamCriterion maharam_criterion(const SpaceModel& s, const TestFunction& f, const Point& x,
                                   const std::vector<double>& r_grid, int max_window,
                                   const DecisionPolicy& policy, const QuadratureSpec& scheme);

struct SeparatorTable {
  std::vector<std::string> row_labels;  // "U_n cap T_m"
  std::vector<double> u0, u1;
  double tolerance = 0.0;
  bool separated = false;
};

SeparatorTable orbit_separator(const SpaceModel& s, const Point& x0, const Point& x1,
                               const std::vector<SetDescriptor>& basis_sets,
                               const std::vector<SetDescriptor>& transient_sets, int max_window,
                               const QuadratureSpec& scheme);

}  // namespace hopf
