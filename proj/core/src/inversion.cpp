#include "specest/inversion.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

#include "specest/polyroots.hpp"

namespace specest {

namespace {

using Long = long double;
using MatL = Eigen::Matrix<Long, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<Long, Eigen::Dynamic, 1>;

// Scale factor that maps the atoms near [0, 1]; moment magnitudes reach 25^7
// in realistic models and the Hankel systems are solved on the rescaled
// moments gamma_l / B^l.
double moment_scale(const MomentVector& moments, int high_order) {
  double hi = static_cast<double>(moments[static_cast<std::size_t>(high_order)]);
  double lo = high_order >= 1
                  ? static_cast<double>(moments[static_cast<std::size_t>(high_order) - 1])
                  : 1.0;
  if (hi > 0.0 && lo > 0.0 && hi > lo) return hi / lo;
  if (hi > 0.0)
    return std::pow(hi, 1.0 / std::max(1, high_order));
  return 1.0;
}

std::vector<Long> scaled_moments(const MomentVector& moments, int count,
                                 double scale) {
  std::vector<Long> out(static_cast<std::size_t>(count));
  Long b = static_cast<Long>(scale);
  Long power = 1.0L;
  for (int l = 0; l < count; ++l) {
    out[static_cast<std::size_t>(l)] =
        static_cast<Long>(moments[static_cast<std::size_t>(l)]) / power;
    power *= b;
  }
  return out;
}

struct ScaledRoots {
  std::vector<double> atoms;   // unscaled, unsorted
  double condition = 0.0;
};

// Hankel solve + companion-matrix rooting on the rescaled moments.
ScaledRoots unconstrained_atoms(const MomentVector& moments, int k) {
  if (k < 1) throw DomainError("moments_to_measure: k must be >= 1");
  if (moments.count() < static_cast<std::size_t>(2 * k))
    throw DomainError("moments_to_measure: need moments up to order " +
                      std::to_string(2 * k - 1));
  double scale = moment_scale(moments, 2 * k - 1);
  std::vector<Long> g = scaled_moments(moments, 2 * k, scale);

  MatL hankel(k, k);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) hankel(r, s) = g[static_cast<std::size_t>(r + s)];
  VecL rhs(k);
  for (int l = 0; l < k; ++l) rhs(l) = -g[static_cast<std::size_t>(k + l)];

  Eigen::SelfAdjointEigenSolver<MatL> eig(hankel, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericalError("moments_to_measure: Hankel eigensolve failed");
  Long lo = eig.eigenvalues()(0);
  Long hi = eig.eigenvalues()(k - 1);
  if (!(lo > 0.0L))
    throw InversionError(InversionError::Stage::hankel_not_positive_definite,
                         "lambda_min = " + std::to_string(static_cast<double>(lo)));

  VecL coeffs = hankel.ldlt().solve(rhs);

  // Monic polynomial x^k + c_{k-1} x^{k-1} + ... + c_0, ascending layout.
  std::vector<Long> poly(static_cast<std::size_t>(k) + 1);
  for (int i = 0; i < k; ++i) poly[static_cast<std::size_t>(i)] = coeffs(i);
  poly[static_cast<std::size_t>(k)] = 1.0L;

  std::vector<double> poly_d(poly.size());
  for (std::size_t i = 0; i < poly.size(); ++i)
    poly_d[i] = static_cast<double>(poly[i]);
  std::vector<std::complex<double>> roots = polynomial_roots(poly_d);

  ScaledRoots out;
  out.condition = static_cast<double>(hi / lo);
  for (std::complex<double> root : roots) {
    // Two long double Newton polish steps on the monic polynomial.
    Long x = static_cast<Long>(root.real());
    if (std::abs(root.imag()) <= 1e-6 * (1.0 + std::abs(root.real()))) {
      for (int step = 0; step < 2; ++step) {
        Long value = 0.0L, slope = 0.0L, power = 1.0L;
        for (int i = 0; i <= k; ++i) {
          value += poly[static_cast<std::size_t>(i)] * power;
          if (i < k)
            slope += static_cast<Long>(i + 1) *
                     poly[static_cast<std::size_t>(i) + 1] * power;
          power *= x;
        }
        if (slope == 0.0L) break;
        x -= value / slope;
      }
      root = std::complex<double>(static_cast<double>(x), root.imag());
    }
    if (std::abs(root.imag()) > 1e-8 * (1.0 + std::abs(root.real())))
      throw InversionError(InversionError::Stage::complex_root,
                           "root " + std::to_string(root.real()) + " + " +
                               std::to_string(root.imag()) + "i");
    if (!(root.real() > 0.0))
      throw InversionError(InversionError::Stage::nonpositive_root,
                           "root " + std::to_string(root.real() * scale));
    out.atoms.push_back(root.real() * scale);
  }
  std::sort(out.atoms.begin(), out.atoms.end());
  for (std::size_t i = 1; i < out.atoms.size(); ++i)
    if (out.atoms[i] - out.atoms[i - 1] <= 1e-10 * out.atoms[i])
      throw InversionError(InversionError::Stage::atoms_not_separated,
                           "coincident atoms near " +
                               std::to_string(out.atoms[i]));
  return out;
}

// Weights from the k x k Vandermonde system sum_i m_i b_i^l = gamma_l,
// l = 0..k-1, solved on the rescaled atoms.
std::vector<double> vandermonde_weights(const MomentVector& moments,
                                        const std::vector<double>& atoms,
                                        double scale) {
  int k = static_cast<int>(atoms.size());
  std::vector<Long> g = scaled_moments(moments, k, scale);
  MatL vander(k, k);
  for (int i = 0; i < k; ++i) {
    Long b = static_cast<Long>(atoms[static_cast<std::size_t>(i)]) / scale;
    Long power = 1.0L;
    for (int l = 0; l < k; ++l) {
      vander(l, i) = power;
      power *= b;
    }
  }
  VecL rhs(k);
  for (int l = 0; l < k; ++l) rhs(l) = g[static_cast<std::size_t>(l)];
  VecL w = vander.partialPivLu().solve(rhs);
  std::vector<double> weights(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    weights[static_cast<std::size_t>(i)] = static_cast<double>(w(i));
    if (!(w(i) > 0.0L))
      throw InversionError(InversionError::Stage::nonpositive_weight,
                           "weight " + std::to_string(static_cast<double>(w(i))) +
                               " for atom " +
                               std::to_string(atoms[static_cast<std::size_t>(i)]));
  }
  return weights;
}

// ---------------------------------------------------------------------------
// Damped Newton on the square moment system with fixed and free weights.
// Variables: k rescaled atoms followed by the free weights. Equations:
// sum_i w_i = gamma_0 (only when some weight is free) and
// sum_i w_i a_i^l = gamma_l for l = 1..L.
// ---------------------------------------------------------------------------

struct NewtonProblem {
  std::vector<Long> gamma;            // rescaled, index = order
  std::vector<std::optional<double>> known;  // per atom slot
  int k = 0;
  int free_weights = 0;
  int equations = 0;
  double tol_scale = 1e-12;

  int unknowns() const { return k + free_weights; }

  void weights_of(const VecL& x, std::vector<Long>& w) const {
    w.resize(static_cast<std::size_t>(k));
    int slot = k;
    for (int i = 0; i < k; ++i)
      w[static_cast<std::size_t>(i)] =
          known[static_cast<std::size_t>(i)]
              ? static_cast<Long>(*known[static_cast<std::size_t>(i)])
              : x(slot++);
  }

  VecL residual(const VecL& x) const {
    std::vector<Long> w;
    weights_of(x, w);
    VecL f(equations);
    int row = 0;
    if (free_weights > 0) {
      Long acc = 0.0L;
      for (Long wi : w) acc += wi;
      f(row++) = acc - gamma[0];
    }
    for (int l = 1; row < equations; ++l, ++row) {
      Long acc = 0.0L;
      for (int i = 0; i < k; ++i)
        acc += w[static_cast<std::size_t>(i)] * std::pow(x(i), static_cast<Long>(l));
      f(row) = acc - gamma[static_cast<std::size_t>(l)];
    }
    return f;
  }

  MatL jacobian(const VecL& x) const {
    std::vector<Long> w;
    weights_of(x, w);
    MatL j = MatL::Zero(equations, unknowns());
    int row = 0;
    if (free_weights > 0) {
      for (int col = k; col < unknowns(); ++col) j(row, col) = 1.0L;
      ++row;
    }
    for (int l = 1; row < equations; ++l, ++row) {
      for (int i = 0; i < k; ++i)
        j(row, i) = static_cast<Long>(l) * w[static_cast<std::size_t>(i)] *
                    std::pow(x(i), static_cast<Long>(l - 1));
      int slot = k;
      for (int i = 0; i < k; ++i)
        if (!known[static_cast<std::size_t>(i)])
          j(row, slot++) = std::pow(x(i), static_cast<Long>(l));
    }
    return j;
  }

  double tolerance(int row) const {
    int order = free_weights > 0 ? row : row + 1;
    return tol_scale * (1.0 + std::abs(static_cast<double>(
                                  gamma[static_cast<std::size_t>(order)])));
  }

  bool converged(const VecL& f) const {
    for (int r = 0; r < equations; ++r)
      if (std::abs(static_cast<double>(f(r))) > tolerance(r)) return false;
    return true;
  }
};

struct NewtonOutcome {
  bool converged = false;
  VecL x;
  double residual = 0.0;
  int iterations = 0;
};

NewtonOutcome damped_newton(const NewtonProblem& problem, const VecL& start) {
  NewtonOutcome out;
  out.x = start;
  VecL f = problem.residual(out.x);
  double norm = static_cast<double>(f.norm());
  for (; out.iterations < 200; ++out.iterations) {
    if (problem.converged(f)) {
      out.converged = true;
      break;
    }
    MatL j = problem.jacobian(out.x);
    VecL delta = j.partialPivLu().solve(-f);
    if (!delta.allFinite()) break;
    double step = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving) {
      VecL trial = out.x + step * delta;
      VecL ftrial = problem.residual(trial);
      double ntrial = static_cast<double>(ftrial.norm());
      if (std::isfinite(ntrial) && ntrial < norm) {
        out.x = trial;
        f = ftrial;
        norm = ntrial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  if (!out.converged) out.converged = problem.converged(f);
  out.residual = norm;
  return out;
}

DiscretePsd assemble_constrained(const NewtonProblem& problem, const VecL& x,
                                 double scale) {
  std::vector<double> atoms(static_cast<std::size_t>(problem.k));
  for (int i = 0; i < problem.k; ++i)
    atoms[static_cast<std::size_t>(i)] = static_cast<double>(x(i)) * scale;
  std::vector<Long> w;
  problem.weights_of(x, w);
  std::vector<double> weights(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    weights[i] = static_cast<double>(w[i]);
    if (!(weights[i] > 0.0))
      throw InversionError(InversionError::Stage::nonpositive_weight,
                           "weight " + std::to_string(weights[i]));
  }
  for (double a : atoms)
    if (!(a > 0.0))
      throw InversionError(InversionError::Stage::nonpositive_root,
                           "atom " + std::to_string(a));
  std::vector<double> sorted = atoms;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] - sorted[i - 1] <= 1e-10 * sorted[i])
      throw InversionError(InversionError::Stage::atoms_not_separated,
                           "coincident atoms near " + std::to_string(sorted[i]));
  return DiscretePsd(std::move(atoms), std::move(weights));
}

// Seed atoms from the moment-implied mean and spread.
std::vector<double> spacing_seed(double mass, double gamma1, double gamma2,
                                 int k, bool have_gamma2) {
  double mean = gamma1 / mass;
  std::vector<double> seed(static_cast<std::size_t>(k));
  double sd = 0.0;
  if (have_gamma2) {
    double var = gamma2 / mass - mean * mean;
    sd = var > 0.0 ? std::sqrt(var) : 0.0;
  }
  if (sd <= 1e-12 * mean) {
    for (int i = 0; i < k; ++i)
      seed[static_cast<std::size_t>(i)] =
          mean * std::pow(2.0, i - (k - 1) / 2.0);
  } else {
    for (int i = 0; i < k; ++i) {
      double t = k == 1 ? 0.0 : -1.5 + 3.0 * i / (k - 1);
      seed[static_cast<std::size_t>(i)] =
          std::max(mean + sd * t, 0.05 * mean);
    }
  }
  return seed;
}

DiscretePsd newton_solve(const MomentVector& moments,
                         const std::vector<std::optional<double>>& known,
                         int k, int max_used_order,
                         InversionDiagnostics* diag) {
  double scale = moment_scale(moments, max_used_order);

  NewtonProblem problem;
  problem.k = k;
  problem.known = known;
  for (const auto& slot : known)
    if (!slot) ++problem.free_weights;
  problem.equations = k + problem.free_weights;
  problem.gamma = scaled_moments(moments, max_used_order + 1, scale);

  double known_mass = 0.0;
  for (const auto& slot : known)
    if (slot) known_mass += *slot;

  // Seed list: unconstrained inversion when the moments reach order 2k-1,
  // otherwise moment-matched spacing; then deterministic perturbations.
  std::vector<std::vector<double>> atom_seeds;
  std::vector<double> base_free_weights;
  double free_mass =
      problem.free_weights > 0
          ? static_cast<double>(moments[0]) - known_mass
          : 0.0;
  if (problem.free_weights > 0 && !(free_mass > 0.0))
    throw DomainError(
        "solve_partial_weights: known weights exhaust the total mass");

  if (moments.count() >= static_cast<std::size_t>(2 * k)) {
    try {
      ScaledRoots roots = unconstrained_atoms(moments, k);
      atom_seeds.push_back(roots.atoms);
    } catch (const NumericalError&) {
      // fall through to spacing seeds
    }
  }
  double mass = problem.free_weights > 0 ? static_cast<double>(moments[0])
                                         : known_mass;
  atom_seeds.push_back(spacing_seed(
      mass, static_cast<double>(moments[1]),
      moments.count() > 2 ? static_cast<double>(moments[2]) : 0.0, k,
      moments.count() > 2));
  if (problem.free_weights > 0)
    base_free_weights.assign(static_cast<std::size_t>(problem.free_weights),
                             free_mass / problem.free_weights);

  std::mt19937 rng(0xC0FFEEu);
  std::uniform_real_distribution<double> jitter(-0.15, 0.15);
  std::vector<VecL> starts;
  for (const auto& seed : atom_seeds) {
    for (int variant = 0; variant < (atom_seeds.size() > 1 ? 4 : 8); ++variant) {
      VecL x(problem.unknowns());
      for (int i = 0; i < k; ++i) {
        double a = seed[static_cast<std::size_t>(i)] / scale;
        x(i) = variant == 0 ? a : a * (1.0 + jitter(rng));
      }
      for (int j = 0; j < problem.free_weights; ++j) {
        double w = base_free_weights[static_cast<std::size_t>(j)];
        x(k + j) = variant == 0 ? w : w * (1.0 + jitter(rng));
      }
      starts.push_back(std::move(x));
    }
  }

  NewtonOutcome best;
  best.residual = std::numeric_limits<double>::infinity();
  for (const VecL& start : starts) {
    NewtonOutcome outcome = damped_newton(problem, start);
    if (outcome.converged) {
      if (diag) {
        diag->newton_iterations = outcome.iterations;
        diag->newton_residual = outcome.residual;
      }
      return assemble_constrained(problem, outcome.x, scale);
    }
    if (outcome.residual < best.residual) best = outcome;
  }
  throw InversionError(InversionError::Stage::newton_divergence,
                       "best residual " + std::to_string(best.residual) +
                           " after 200 iterations per start");
}

}  // namespace

DiscretePsd moments_to_measure(const MomentVector& moments, int k,
                               InversionDiagnostics* diag) {
  ScaledRoots roots = unconstrained_atoms(moments, k);
  if (diag) diag->hankel_condition = roots.condition;
  double scale = moment_scale(moments, 2 * k - 1);
  std::vector<double> weights = vandermonde_weights(moments, roots.atoms, scale);

  // Refine the algebraic solution on the full 2k-equation moment system; the
  // linear-algebra route alone leaves condition-limited digits behind.
  NewtonProblem problem;
  problem.k = k;
  problem.known.assign(static_cast<std::size_t>(k), std::nullopt);
  problem.free_weights = k;
  problem.equations = 2 * k;
  problem.tol_scale = 5e-15;
  problem.gamma = scaled_moments(moments, 2 * k, scale);
  VecL x(2 * k);
  for (int i = 0; i < k; ++i) {
    x(i) = roots.atoms[static_cast<std::size_t>(i)] / scale;
    x(k + i) = weights[static_cast<std::size_t>(i)];
  }
  // The refined iterate never has a larger residual than the start; take it
  // whether or not the strict target was met.
  NewtonOutcome outcome = damped_newton(problem, x);
  try {
    return assemble_constrained(problem, outcome.x, scale);
  } catch (const InversionError&) {
    return DiscretePsd(std::move(roots.atoms), std::move(weights));
  }
}

DiscretePsd solve_known_weights(const MomentVector& moments,
                                const std::vector<double>& weights, int k,
                                InversionDiagnostics* diag) {
  if (k < 1) throw DomainError("solve_known_weights: k must be >= 1");
  if (static_cast<int>(weights.size()) != k)
    throw DomainError("solve_known_weights: need one weight per atom");
  for (double w : weights)
    if (!(w > 0.0))
      throw DomainError("solve_known_weights: weights must be positive");
  if (moments.count() < static_cast<std::size_t>(k) + 1)
    throw DomainError("solve_known_weights: need moments up to order " +
                      std::to_string(k));

  if (k == 1) {
    double atom = static_cast<double>(moments[1] / weights[0]);
    if (!(atom > 0.0))
      throw InversionError(InversionError::Stage::nonpositive_root,
                           "atom " + std::to_string(atom));
    return DiscretePsd({atom}, {weights[0]});
  }

  std::vector<std::optional<double>> known(weights.begin(), weights.end());
  return newton_solve(moments, known, k, k, diag);
}

DiscretePsd solve_partial_weights(const MomentVector& moments,
                                  const std::vector<std::optional<double>>& known,
                                  int k, InversionDiagnostics* diag) {
  if (k < 1) throw DomainError("solve_partial_weights: k must be >= 1");
  if (static_cast<int>(known.size()) != k)
    throw DomainError("solve_partial_weights: need one mask slot per atom");

  int free_weights = 0;
  for (const auto& slot : known) {
    if (slot && !(*slot > 0.0))
      throw DomainError("solve_partial_weights: known weights must be positive");
    if (!slot) ++free_weights;
  }

  if (free_weights == 0) {
    std::vector<double> weights(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) weights[static_cast<std::size_t>(i)] =
        *known[static_cast<std::size_t>(i)];
    return solve_known_weights(moments, weights, k, diag);
  }

  // Square system: k atoms + f free weights unknowns; equations are the mass
  // identity plus orders 1..k+f-1.
  int max_order = k + free_weights - 1;
  if (moments.count() < static_cast<std::size_t>(max_order) + 1)
    throw DomainError("solve_partial_weights: need moments up to order " +
                      std::to_string(max_order));
  return newton_solve(moments, known, k, max_order, diag);
}

}  // namespace specest
