#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hopf/rational.hpp"

namespace hopf {

// Z^r x Z/n_1 x ... acting on a finite truncation of a countable space.
// Factor order 0 means Z, order n >= 2 means Z/n. Generator j is the unit
// vector e_j of factor j.
using Word = std::vector<std::int64_t>;

struct DiscreteSystem {
  std::vector<std::int64_t> factors;
  std::vector<std::string> labels;
  std::vector<Rational> weights;
  std::vector<std::vector<int>> action;  // action[j][x] = e_j.x, or -1 outside the truncation
  std::vector<int> core;                 // sorted point indices
  int exact_radius = 0;

  int size() const { return static_cast<int>(labels.size()); }
  int generators() const { return static_cast<int>(factors.size()); }
  std::string group_name() const;
  int index_of(const std::string& label) const;  // DomainMismatch when unknown
  bool in_core(int x) const;
};

// Injective partial maps, positive weights, unique labels, cyclic relations and
// commutation wherever both sides are defined. DomainMismatch on violation.
void validate(const DiscreteSystem& ds);

std::int64_t word_length(const DiscreteSystem& ds, const Word& w);
Word reduce_word(const DiscreteSystem& ds, Word w);  // cyclic coordinates into [0, n)
Word add_words(const DiscreteSystem& ds, const Word& a, const Word& b);
Word negate_word(const DiscreteSystem& ds, const Word& a);
std::string to_string(const Word& w);

// w.x following the factors in order; nullopt if the path leaves the truncation.
std::optional<int> apply_word(const DiscreteSystem& ds, const Word& w, int x);
// grad_w(x) = mu(w.x) / mu(x) where defined.
std::optional<Rational> cocycle(const DiscreteSystem& ds, const Word& w, int x);
// Generator cocycles grad_{e_j}(x) for every defined (j, x).
std::map<std::pair<int, int>, Rational> cocycle_table(const DiscreteSystem& ds);

// All words of length <= radius, in a fixed order.
std::vector<Word> words_within(const DiscreteSystem& ds, std::int64_t radius);

// Integer lattice in Hermite normal form: rows with strictly increasing pivot
// columns, positive pivots, entries above each pivot reduced into [0, pivot).
struct Lattice {
  std::vector<Word> rows;
  int rank() const { return static_cast<int>(rows.size()); }
};
Lattice hermite_normal_form(std::vector<Word> generators, int dim);
// Representative of w + L with every pivot coordinate in [0, pivot).
Word reduce_modulo(const Lattice& l, Word w);
bool lattice_contains(const Lattice& l, const Word& w);

// Orbit of a truncation component, with words relative to its base point.
struct OrbitCertificate {
  int id = 0;
  int base = 0;                     // least core point of the orbit
  std::vector<int> points;          // every truncation point reached, sorted
  std::map<int, Word> word;         // word(y).base = y
  Lattice stabilizer;               // relations, including n_j e_j
  bool closed = false;              // no generator leaves the truncation
  bool infinite_stabilizer = false;
  BigInt stabilizer_order = 0;      // 0 when infinite
  std::string certificate;          // "periodic" or "escaping"
};

// Orbits of all core points, ordered by base. Throws UncertifiedOrbit when the
// exact_radius ball around a core point is not fully defined.
std::vector<OrbitCertificate> certify_orbits(const DiscreteSystem& ds);
const OrbitCertificate& orbit_of(const std::vector<OrbitCertificate>& orbits, int x);

enum class ReturnStatus { Complete, InfinitePeriodic, LowerBound };
std::string to_string(ReturnStatus s);

struct ExactReturnSet {
  std::vector<Word> words;     // canonical words of length <= exact_radius
  ReturnStatus status = ReturnStatus::Complete;
  std::vector<Word> residues;  // one representative per coset of the stabilizer
  Lattice period;              // the stabilizer lattice
  std::string describe() const;
};

// R_A(x) = {g : x in g.A}. OutsideCore when x is not a core point.
ExactReturnSet returns_set_exact(const DiscreteSystem& ds, const std::vector<int>& a, int x);

enum class ExactVerdict { Conservative, Dissipative };
std::string to_string(ExactVerdict v);

struct GreedyStep {
  Rational alpha;           // best candidate mass among uncovered orbits
  std::vector<int> chosen;  // T_n
  Rational mass;            // mu(T_n) >= alpha / 2
};

struct GreedyResult {
  std::vector<GreedyStep> steps;
  std::vector<int> t_max;  // disjoint union of the T_n, sorted
};

struct ExactPartition {
  std::vector<int> conservative;
  std::vector<int> dissipative;
  std::map<int, ExactVerdict> verdict;      // per core point
  std::map<int, std::vector<int>> witness;  // orbit base -> transient set
  GreedyResult t_max;
};

ExactPartition hopf_decompose_exact(const DiscreteSystem& ds, int k_candidates = 4);
GreedyResult greedy_max_transient(const DiscreteSystem& ds, int k_candidates = 4);

// S = step * Z * e_factor.
struct ProgressionWitness {
  int factor = 0;
  std::int64_t step = 1;
  std::string describe() const;
};

struct WanderingReport {
  bool degenerate = false;  // W empty
  bool is_transient = false;
  bool is_wandering = false;
  bool is_weakly_wandering = false;
  std::optional<ProgressionWitness> witness;
};

WanderingReport wandering_tests(const DiscreteSystem& ds, const std::vector<int>& w,
                                std::int64_t max_step = 64);

struct InvariantMeasureReport {
  std::vector<int> p1, p_inf, n_part;
  bool n_witnessed = false;  // N is never claimed: "not witnessed"
  std::map<int, Rational> acim;                 // core point -> eta{x}
  std::optional<std::map<int, Rational>> acip;  // only when P_inf is empty
  std::map<int, Rational> acip_on_p1;           // normalized on P_1
  std::map<int, ProgressionWitness> no_acip_witness;  // P_inf orbit base -> witness
};

InvariantMeasureReport invariant_measure_search(const DiscreteSystem& ds);

struct Transversal {
  std::vector<int> points;
  std::map<int, int> selector;  // x -> s(x)
  std::map<int, Word> r;        // r(x).x = s(x), canonical
};

Transversal orbit_transversal(const DiscreteSystem& ds);
// max over core x and words g of length <= exact_radius with g.x in the core
// of the law r(g.x) g.x = r(x).x; returns the number of violations.
int transversal_law_violations(const DiscreteSystem& ds, const Transversal& t);

struct ErgodicComponent {
  std::vector<int> points;  // core points, original indices
  DiscreteSystem system;    // restriction to the orbit's truncation
  ExactVerdict verdict = ExactVerdict::Dissipative;
};

std::vector<ErgodicComponent> ergodic_components(const DiscreteSystem& ds);

// Text format, bit-exact round trip.
std::string serialize(const DiscreteSystem& ds);
DiscreteSystem parse_discrete_system(const std::string& text);  // ParseError
DiscreteSystem load_discrete_system(const std::string& path);
void save_discrete_system(const DiscreteSystem& ds, const std::string& path);

// Builders.
enum class PointWeights { Uniform, Decaying };
// Z on {-T..T} by translation; core {-C..C}, exact_radius T - C. Decaying uses 2^-|k|.
DiscreteSystem translation_system(int T, int C, PointWeights w = PointWeights::Uniform,
                                  const Rational& scale = 1);
// Z acting on Z/n by rotation by one.
DiscreteSystem rotation_system(int n, std::vector<Rational> weights = {});
// Z acting trivially on n points.
DiscreteSystem trivial_system(int n);
// Same group required; colliding labels get a piece prefix.
DiscreteSystem union_system(const std::vector<DiscreteSystem>& parts);
// Restriction to a set of points closed under the defined generator maps.
DiscreteSystem restrict_system(const DiscreteSystem& ds, const std::vector<int>& points);

}  // namespace hopf
