#include "specest/psd.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace specest {

namespace {

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

DiscretePsd::DiscretePsd(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty()) throw DomainError("DiscretePsd: no atoms");
  if (atoms.size() != weights.size())
    throw DomainError("DiscretePsd: atom/weight count mismatch");

  std::vector<std::size_t> idx(atoms.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  atoms_.reserve(atoms.size());
  weights_.reserve(atoms.size());
  long double mass = 0.0L;
  for (std::size_t i : idx) {
    if (!(atoms[i] > 0.0))
      throw DomainError("DiscretePsd: atoms must be strictly positive");
    if (!(weights[i] > 0.0))
      throw DomainError("DiscretePsd: weights must be strictly positive");
    if (!atoms_.empty()) {
      double gap = atoms[i] - atoms_.back();
      if (gap <= 1e-10 * std::max(std::abs(atoms[i]), std::abs(atoms_.back())))
        throw DomainError("DiscretePsd: coincident atoms at " +
                          format_full(atoms[i]));
    }
    atoms_.push_back(atoms[i]);
    weights_.push_back(weights[i]);
    mass += weights[i];
  }
  total_mass_ = static_cast<double>(mass);
}

DiscretePsd DiscretePsd::delta(double atom, double weight) {
  return DiscretePsd({atom}, {weight});
}

std::string DiscretePsd::to_record() const {
  std::ostringstream out;
  out << "# total_mass=" << format_full(total_mass_) << "\n";
  for (std::size_t i = 0; i < atoms_.size(); ++i)
    out << format_full(atoms_[i]) << "," << format_full(weights_[i]) << "\n";
  return out.str();
}

DiscretePsd DiscretePsd::from_record(std::istream& in) {
  std::vector<double> atoms;
  std::vector<double> weights;
  bool have_mass = false;
  double declared_mass = 0.0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    if (line[0] == '#') {
      auto pos = line.find("total_mass=");
      if (pos != std::string::npos) {
        declared_mass = std::stod(line.substr(pos + 11));
        have_mass = true;
      }
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DomainError("DiscretePsd record: expected `atom,weight`, got: " + line);
    atoms.push_back(std::stod(line.substr(0, comma)));
    weights.push_back(std::stod(line.substr(comma + 1)));
  }
  DiscretePsd psd(std::move(atoms), std::move(weights));
  if (have_mass &&
      std::abs(psd.total_mass() - declared_mass) >
          1e-12 * std::max(1.0, std::abs(declared_mass)))
    throw DomainError("DiscretePsd record: declared total_mass disagrees with weights");
  return psd;
}

DiscretePsd DiscretePsd::from_record_string(const std::string& text) {
  std::istringstream in(text);
  return from_record(in);
}

DiscretePsd DiscretePsd::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open model file: " + path);
  return from_record(in);
}

HankelMatrix::HankelMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
    throw DomainError("HankelMatrix: square matrix of order >= 1 required");
}

double HankelMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(entries_,
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw NumericalError("HankelMatrix: eigensolve failed");
  return solver.eigenvalues()(0);
}

double HankelMatrix::determinant() const {
  // Long double LU keeps the identity tests meaningful at moment magnitudes
  // around 25^7.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  MatL m = entries_.cast<long double>();
  return static_cast<double>(Eigen::FullPivLU<MatL>(m).determinant());
}

Partition::Partition(std::vector<int> parts) : orders(std::move(parts)) {
  if (orders.empty()) throw DomainError("Partition: empty");
  for (int k : orders)
    if (k < 1) throw DomainError("Partition: every order must be >= 1");
}

int Partition::total() const {
  return std::accumulate(orders.begin(), orders.end(), 0);
}

std::string Partition::to_string() const {
  std::string out = "(";
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(orders[i]);
  }
  out += ")";
  return out;
}

MomentVector moments_of(const DiscretePsd& psd, int max_order) {
  if (max_order < 0) throw DomainError("moments_of: max_order must be >= 0");
  MomentVector result;
  result.origin = MomentOrigin::exact;
  result.values.resize(static_cast<std::size_t>(max_order) + 1);
  std::vector<long double> powers(psd.size(), 1.0L);
  for (int l = 0; l <= max_order; ++l) {
    long double acc = 0.0L;
    for (std::size_t i = 0; i < psd.size(); ++i) {
      acc += static_cast<long double>(psd.weight(i)) * powers[i];
      powers[i] *= static_cast<long double>(psd.atom(i));
    }
    result.values[static_cast<std::size_t>(l)] = acc;
  }
  return result;
}

HankelMatrix hankel(const MomentVector& moments, int order) {
  if (order < 1) throw DomainError("hankel: order must be >= 1");
  if (moments.count() < static_cast<std::size_t>(2 * order - 1))
    throw DomainError("hankel: need moments up to order " +
                      std::to_string(2 * order - 2) + ", have " +
                      std::to_string(moments.count()) + " values");
  Eigen::MatrixXd m(order, order);
  for (int r = 0; r < order; ++r)
    for (int s = 0; s < order; ++s)
      m(r, s) = static_cast<double>(moments[static_cast<std::size_t>(r + s)]);
  return HankelMatrix(std::move(m));
}

namespace {

#if defined(__SIZEOF_FLOAT128__)
using WideFloat = __float128;
#else
using WideFloat = long double;
#endif

WideFloat wide_abs(WideFloat x) { return x < 0 ? -x : x; }

// Full-pivot LU determinant of a small dense matrix. The Hankel condition
// number reaches 1e10-1e12 even for well-separated atoms in [0.5, 30], so the
// direct determinant needs more than long double to stay at 1e-10 relative.
WideFloat wide_determinant(std::vector<std::vector<WideFloat>> m) {
  std::size_t n = m.size();
  WideFloat det = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pr = col, pc = col;
    for (std::size_t r = col; r < n; ++r)
      for (std::size_t c = col; c < n; ++c)
        if (wide_abs(m[r][c]) > wide_abs(m[pr][pc])) {
          pr = r;
          pc = c;
        }
    if (m[pr][pc] == 0) return 0;
    if (pr != col) {
      std::swap(m[pr], m[col]);
      det = -det;
    }
    if (pc != col) {
      for (std::size_t r = 0; r < n; ++r) std::swap(m[r][pc], m[r][col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      WideFloat factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  return det;
}

}  // namespace

HankelDeterminants hankel_det_identity_check(const DiscretePsd& psd) {
  int k = static_cast<int>(psd.size());
  HankelDeterminants result{};
  // Factor the magnitude out first (det(Gamma) = B^{k(k-1)} det of the
  // rescaled moments), then take the determinant in the widest float type.
  double scale = psd.atoms().back();
  {
    std::vector<WideFloat> gamma(static_cast<std::size_t>(2 * k - 1), 0);
    for (std::size_t i = 0; i < psd.size(); ++i) {
      WideFloat power = psd.weight(i);
      WideFloat atom = static_cast<WideFloat>(psd.atom(i)) / scale;
      for (int l = 0; l <= 2 * k - 2; ++l) {
        gamma[static_cast<std::size_t>(l)] += power;
        power *= atom;
      }
    }
    std::vector<std::vector<WideFloat>> m(
        static_cast<std::size_t>(k),
        std::vector<WideFloat>(static_cast<std::size_t>(k)));
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s)
        m[static_cast<std::size_t>(r)][static_cast<std::size_t>(s)] =
            gamma[static_cast<std::size_t>(r + s)];
    WideFloat det = wide_determinant(std::move(m));
    for (int i = 0; i < k * (k - 1); ++i) det *= scale;
    result.direct = static_cast<double>(det);
  }
  long double formula = 1.0L;
  for (std::size_t i = 0; i < psd.size(); ++i) formula *= psd.weight(i);
  for (std::size_t i = 0; i < psd.size(); ++i)
    for (std::size_t j = i + 1; j < psd.size(); ++j) {
      long double gap = static_cast<long double>(psd.atom(i)) - psd.atom(j);
      formula *= gap * gap;
    }
  result.formula = static_cast<double>(formula);
  return result;
}

namespace {

void compositions(int k, int m, std::vector<int>& prefix,
                  std::vector<Partition>& out) {
  if (m == 1) {
    if (k >= 1) {
      prefix.push_back(k);
      out.emplace_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  for (int first = 1; first <= k - (m - 1); ++first) {
    prefix.push_back(first);
    compositions(k - first, m - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<Partition> enumerate_partitions(int k, int m) {
  if (m < 1 || m > k)
    throw DomainError("enumerate_partitions: need 1 <= m <= k");
  std::vector<Partition> out;
  std::vector<int> prefix;
  compositions(k, m, prefix, out);
  return out;
}

}  // namespace specest
