#pragma once

// Method-of-types machinery: type vectors, type-class sizes, energy shells and
// the two sampling laws (hypergeometric / multinomial) that govern marginals.
// Everything here is exact: big integers and rationals, no floating point.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "epu/errors.hpp"

namespace epu {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using Energy = std::int64_t;

/// A single-qudit probability vector with exact entries.
using Distribution = std::vector<Rational>;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

/// Nondegenerate single-qudit spectrum E_0 < E_1 < ... < E_{d-1}.
///
/// Levels are exact integers; rational spectra must be pre-scaled by the
/// caller so that shell membership stays decidable.
class EnergySpectrum {
 public:
  explicit EnergySpectrum(std::vector<Energy> levels) : levels_(std::move(levels)) {
    if (levels_.size() < 2) throw InvalidArgument("EnergySpectrum: need d >= 2 levels");
    for (std::size_t i = 1; i < levels_.size(); ++i) {
      if (levels_[i] <= levels_[i - 1])
        throw InvalidArgument("EnergySpectrum: levels must be strictly increasing");
    }
  }

  int dim() const { return static_cast<int>(levels_.size()); }
  Energy level(int x) const { return levels_[static_cast<std::size_t>(x)]; }
  const std::vector<Energy>& levels() const { return levels_; }
  Energy lowest() const { return levels_.front(); }
  Energy highest() const { return levels_.back(); }

  friend bool operator==(const EnergySpectrum&, const EnergySpectrum&) = default;

 private:
  std::vector<Energy> levels_;
};

/// Occupation counts n_x of a length-N string over d symbols.
///
/// Ordering is lexicographically *descending* on the counts, so that for
/// d = 2, N = 3 the canonical sequence is (3,0), (2,1), (1,2), (0,3). Every
/// container keyed by TypeVector iterates in that order.
class TypeVector {
 public:
  TypeVector() = default;
  explicit TypeVector(std::vector<int> counts) : counts_(std::move(counts)) {
    if (counts_.empty()) throw InvalidArgument("TypeVector: need at least one symbol");
    for (int c : counts_) {
      if (c < 0) throw InvalidArgument("TypeVector: negative count");
      length_ += c;
    }
  }

  int dim() const { return static_cast<int>(counts_.size()); }
  int length() const { return length_; }
  int operator[](int x) const { return counts_[static_cast<std::size_t>(x)]; }
  const std::vector<int>& counts() const { return counts_; }

  /// P(x) = n_x / N. Undefined for the empty string.
  Rational probability(int x) const {
    if (length_ == 0) throw InvalidArgument("TypeVector: empty type has no distribution");
    return Rational((*this)[x], length_);
  }

  Distribution distribution() const {
    Distribution p;
    p.reserve(counts_.size());
    for (int x = 0; x < dim(); ++x) p.push_back(probability(x));
    return p;
  }

  Energy energy(const EnergySpectrum& spec) const {
    if (spec.dim() != dim()) throw DimensionMismatch("TypeVector::energy: dimension mismatch");
    Energy e = 0;
    for (int x = 0; x < dim(); ++x) e += static_cast<Energy>((*this)[x]) * spec.level(x);
    return e;
  }

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < counts_.size(); ++i) os << (i ? "," : "") << counts_[i];
    os << ')';
    return os.str();
  }

  friend bool operator==(const TypeVector& a, const TypeVector& b) { return a.counts_ == b.counts_; }
  friend std::strong_ordering operator<=>(const TypeVector& a, const TypeVector& b) {
    return b.counts_ <=> a.counts_;
  }

 private:
  std::vector<int> counts_;
  int length_ = 0;
};

/// Exact binomial coefficient; zero when k < 0 or k > n.
inline BigInt binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

/// |T_P| = N! / prod_x n_x!.
inline BigInt type_class_size(const TypeVector& p) {
  BigInt r = 1;
  int remaining = p.length();
  for (int x = 0; x < p.dim(); ++x) {
    r *= binomial(remaining, p[x]);
    remaining -= p[x];
  }
  return r;
}

namespace detail {

template <class Visit>
void compositions(int remaining, int slot, std::vector<int>& counts, Visit& visit) {
  const int d = static_cast<int>(counts.size());
  if (slot == d - 1) {
    counts[static_cast<std::size_t>(slot)] = remaining;
    visit(counts);
    return;
  }
  for (int c = remaining; c >= 0; --c) {
    counts[static_cast<std::size_t>(slot)] = c;
    compositions(remaining - c, slot + 1, counts, visit);
  }
}

}  // namespace detail

/// All compositions of N into d nonnegative parts, in canonical order.
inline std::vector<TypeVector> enumerate_types(int n, int d) {
  if (n < 0) throw InvalidArgument("enumerate_types: N must be >= 0");
  if (d < 2) throw InvalidArgument("enumerate_types: d must be >= 2");
  std::vector<TypeVector> out;
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  auto visit = [&out](const std::vector<int>& c) { out.emplace_back(c); };
  detail::compositions(n, 0, counts, visit);
  return out;
}

struct ShellMember {
  TypeVector type;
  BigInt multiplicity;  // |T_P|
  Rational weight;      // mu_E(P) = |T_P| / g(E)
};

/// Energy eigenspace of the N-qudit Hamiltonian, resolved into type classes.
struct EnergyShell {
  int length = 0;
  Energy energy = 0;
  std::vector<ShellMember> members;
  BigInt degeneracy = 0;  // g(E)
};

namespace detail {

// Branch-and-bound over counts n_0, n_1, ...: with `remaining` qudits still to
// place on levels slot..d-1, the reachable energy is the closed interval
// [remaining*E_slot, remaining*E_{d-1}].
inline void shell_search(const EnergySpectrum& spec, Energy target, int remaining, int slot,
                         Energy acc, std::vector<int>& counts, std::vector<TypeVector>& out) {
  const int d = spec.dim();
  const Energy need = target - acc;
  if (slot == d - 1) {
    if (need == static_cast<Energy>(remaining) * spec.level(slot)) {
      counts[static_cast<std::size_t>(slot)] = remaining;
      out.emplace_back(counts);
    }
    return;
  }
  if (need < static_cast<Energy>(remaining) * spec.level(slot) ||
      need > static_cast<Energy>(remaining) * spec.highest())
    return;
  for (int c = remaining; c >= 0; --c) {
    counts[static_cast<std::size_t>(slot)] = c;
    shell_search(spec, target, remaining - c, slot + 1, acc + static_cast<Energy>(c) * spec.level(slot),
                 counts, out);
  }
}

}  // namespace detail

/// Types of length N whose total energy is exactly E, in canonical order.
inline std::vector<TypeVector> shell_types(int n, const EnergySpectrum& spec, Energy e) {
  std::vector<TypeVector> out;
  std::vector<int> counts(static_cast<std::size_t>(spec.dim()), 0);
  detail::shell_search(spec, e, n, 0, 0, counts, out);
  return out;
}

inline EnergyShell build_shell(int n, const EnergySpectrum& spec, Energy e) {
  if (n < 1) throw InvalidArgument("build_shell: N must be >= 1");
  EnergyShell shell;
  shell.length = n;
  shell.energy = e;
  for (auto& t : shell_types(n, spec, e)) {
    BigInt size = type_class_size(t);
    shell.degeneracy += size;
    shell.members.push_back({std::move(t), std::move(size), Rational(0)});
  }
  if (shell.members.empty()) {
    throw UnattainableEnergy("build_shell: no type of length " + std::to_string(n) +
                             " has energy " + std::to_string(e));
  }
  for (auto& m : shell.members) m.weight = Rational(m.multiplicity, shell.degeneracy);
  return shell;
}

/// Every total energy reachable by N qudits, ascending.
inline std::vector<Energy> attainable_energies(int n, const EnergySpectrum& spec) {
  std::set<Energy> seen;
  for (const auto& t : enumerate_types(n, spec.dim())) seen.insert(t.energy(spec));
  return {seen.begin(), seen.end()};
}

inline bool is_attainable(int n, const EnergySpectrum& spec, Energy e) {
  return !shell_types(n, spec, e).empty();
}

/// Hyp_P^{(N,k)}(Q): probability that k draws without replacement from a
/// population with counts P produce counts Q.
inline Rational hypergeometric_weight(const TypeVector& p, int k, const TypeVector& q) {
  if (p.dim() != q.dim()) throw DimensionMismatch("hypergeometric_weight: P and Q differ in d");
  if (k < 1 || k > p.length()) throw InvalidArgument("hypergeometric_weight: need 1 <= k <= N");
  if (q.length() != k) throw InvalidArgument("hypergeometric_weight: Q must have length k");
  BigInt num = 1;
  for (int j = 0; j < p.dim(); ++j) {
    if (q[j] > p[j]) return Rational(0);
    num *= binomial(p[j], q[j]);
  }
  return Rational(num, binomial(p.length(), k));
}

/// Mult_P^{(k)}(Q) = C(k; kQ) prod_i P(i)^{kQ(i)}, for exact or floating P.
template <class Scalar>
Scalar multinomial_weight(std::span<const Scalar> probs, int k, const TypeVector& q) {
  if (static_cast<int>(probs.size()) != q.dim())
    throw DimensionMismatch("multinomial_weight: P and Q differ in d");
  if (k < 1) throw InvalidArgument("multinomial_weight: need k >= 1");
  if (q.length() != k) throw InvalidArgument("multinomial_weight: Q must have length k");
  Scalar w(1);
  for (int i = 0; i < q.dim(); ++i) {
    for (int r = 0; r < q[i]; ++r) w *= probs[static_cast<std::size_t>(i)];
  }
  if constexpr (std::is_same_v<Scalar, Rational>) {
    return w * Rational(type_class_size(q));
  } else {
    return w * type_class_size(q).template convert_to<Scalar>();
  }
}

inline Rational multinomial_weight(const Distribution& probs, int k, const TypeVector& q) {
  return multinomial_weight<Rational>(std::span<const Rational>(probs), k, q);
}

inline Rational multinomial_weight(const TypeVector& p, int k, const TypeVector& q) {
  return multinomial_weight(p.distribution(), k, q);
}

}  // namespace epu
