#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "specest/errors.hpp"

namespace specest {

/// A discrete spectral measure: positive atoms b_1 < ... < b_k with positive
/// weights m_1, ..., m_k. Total mass 1 for a full distribution, < 1 for a
/// sub-measure obtained by restricting a distribution to part of its support.
///
/// Construction sorts atom/weight pairs, then rejects non-positive atoms or
/// weights and atoms closer than 1e-10 in relative gap. Immutable afterwards.
class DiscretePsd {
 public:
  DiscretePsd(std::vector<double> atoms, std::vector<double> weights);

  /// Point mass at `atom`.
  static DiscretePsd delta(double atom, double weight = 1.0);

  const std::vector<double>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double atom(std::size_t i) const { return atoms_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }
  std::size_t size() const noexcept { return atoms_.size(); }
  double total_mass() const noexcept { return total_mass_; }

  bool operator==(const DiscretePsd& other) const = default;

  /// Plain-text record: a `# total_mass=<x>` header followed by one
  /// `atom,weight` line per atom, full precision.
  std::string to_record() const;
  static DiscretePsd from_record(std::istream& in);
  static DiscretePsd from_record_string(const std::string& text);
  static DiscretePsd load(const std::string& path);

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
  double total_mass_ = 0.0;
};

enum class MomentOrigin { exact, estimated };

/// Moments gamma_0, ..., gamma_L of a discrete measure, with gamma_l stored
/// at index l. Values are kept in the widest hardware floating type; the
/// magnitudes reach 25^7 in realistic models and the inversion math needs
/// every digit the platform can carry.
struct MomentVector {
  std::vector<long double> values;
  MomentOrigin origin = MomentOrigin::exact;

  MomentVector() = default;
  explicit MomentVector(std::vector<long double> v,
                        MomentOrigin o = MomentOrigin::exact)
      : values(std::move(v)), origin(o) {}
  MomentVector(std::initializer_list<long double> v) : values(v) {}
  static MomentVector from_doubles(const std::vector<double>& v,
                                   MomentOrigin o = MomentOrigin::exact) {
    MomentVector out;
    out.values.assign(v.begin(), v.end());
    out.origin = o;
    return out;
  }

  long double operator[](std::size_t l) const { return values.at(l); }
  /// Highest stored order L.
  std::size_t max_order() const { return values.empty() ? 0 : values.size() - 1; }
  std::size_t count() const noexcept { return values.size(); }
};

/// Symmetric N x N moment matrix with entries gamma_{r+s-2}.
class HankelMatrix {
 public:
  explicit HankelMatrix(Eigen::MatrixXd entries);

  int order() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return entries_; }
  double operator()(int r, int s) const { return entries_(r, s); }

  /// Smallest eigenvalue (symmetric eigensolve).
  double min_eigenvalue() const;
  double determinant() const;

 private:
  Eigen::MatrixXd entries_;
};

/// Orders (k_1, ..., k_m) of the parts of a divided measure; each k_i >= 1.
struct Partition {
  std::vector<int> orders;

  Partition() = default;
  explicit Partition(std::vector<int> parts);

  int total() const;
  std::size_t parts() const noexcept { return orders.size(); }
  bool operator==(const Partition& other) const = default;
  bool operator<(const Partition& other) const { return orders < other.orders; }
  std::string to_string() const;
};

/// Moments gamma_l = sum_i m_i b_i^l for l = 0..max_order. gamma_0 is the
/// total mass. Accumulation runs in long double; magnitudes reach 25^7 in
/// realistic models.
MomentVector moments_of(const DiscretePsd& psd, int max_order);

/// The N-th Hankel matrix of a moment sequence; needs moments up to order
/// 2N-2, i.e. at least 2N-1 values.
HankelMatrix hankel(const MomentVector& moments, int order);

struct HankelDeterminants {
  double direct;   // numerical determinant of the k-th Hankel matrix
  double formula;  // prod(m_i) * prod_{i<j} (b_i - b_j)^2
};

/// Evaluates the k-th Hankel determinant both numerically and through the
/// closed-form product over weights and squared atom gaps.
HankelDeterminants hankel_det_identity_check(const DiscretePsd& psd);

/// All compositions of k into m positive parts, lexicographic order.
/// Cardinality C(k-1, m-1).
std::vector<Partition> enumerate_partitions(int k, int m);

}  // namespace specest
