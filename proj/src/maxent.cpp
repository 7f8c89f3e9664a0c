#include "hqc/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

double ConstraintReport::max_equality_violation() const {
  double v = std::max({std::abs(norm_first), std::abs(norm_second), std::abs(diagonal_sum)});
  for (double t : trace_back) v = std::max(v, std::abs(t));
  return v;
}

double ConstraintReport::min_inequality_slack() const {
  double v = std::min({purity_first, purity_second_printed, purity_second_exact});
  for (double t : variance) v = std::min(v, t);
  for (double t : cauchy_schwarz) v = std::min(v, t);
  return v;
}

bool ConstraintReport::feasible(double tol) const {
  return max_equality_violation() <= tol && min_inequality_slack() >= -tol && psd_min_eigenvalue >= -tol;
}

ConstraintReport check_constraints(const PauliVector& first, const SymmetricTwoBody& second) {
  ConstraintReport r;
  for (std::size_t j = 1; j < 4; ++j) r.trace_back[j - 1] = 2.0 * second(0, j) - first[j];
  r.norm_first = first[0] - 0.5;
  r.norm_second = second(0, 0) - 0.25;
  r.purity_first = 0.5 - purity(first);
  double printed = 0.0;
  for (std::size_t k = 0; k < 4; ++k) printed += second(0, k) * second(0, k);
  for (std::size_t i = 1; i < 4; ++i)
    for (std::size_t j = i; j < 4; ++j) printed += second(i, j) * second(i, j);
  r.purity_second_printed = 0.375 - printed;
  double full = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) full += second(a, b) * second(a, b);
  r.purity_second_exact = 0.25 - full;
  double diag = 0.0;
  for (std::size_t j = 1; j < 4; ++j) {
    r.variance[j - 1] = second(j, j) - first[j] * first[j];
    diag += second(j, j);
  }
  r.diagonal_sum = diag - 0.25;
  r.diagonal_sum_printed = diag - 0.5;
  const std::size_t pairs[3][2] = {{1, 2}, {1, 3}, {2, 3}};
  for (int p = 0; p < 3; ++p) {
    const std::size_t i = pairs[p][0], j = pairs[p][1];
    const double vi = r.variance[i - 1], vj = r.variance[j - 1];
    const double cov = std::abs(second(i, j) - first[i] * first[j]);
    r.cauchy_schwarz[p] = (vi < 0.0 || vj < 0.0) ? std::min(vi, vj) - cov : std::sqrt(vi * vj) - cov;
  }
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(to_matrix(second), Eigen::EigenvaluesOnly);
  r.psd_min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

namespace {

void require_conditional(const PauliVector& first, const char* who) {
  if (!std::isfinite(first[0]) || !std::isfinite(first[1]) || !std::isfinite(first[2]) ||
      !std::isfinite(first[3])) {
    throw InvalidArgument(std::string(who) + ": non-finite first moment");
  }
  if (std::abs(first[0] - 0.5) > 1e-10) {
    std::ostringstream os;
    os << who << ": first moment is not a unit-trace state (mu0 = " << first[0] << ")";
    throw InvalidArgument(os.str());
  }
  const double p = purity(first);
  if (p > 0.5 + 1e-10) {
    std::ostringstream os;
    os << who << ": purity " << p << " exceeds 1/2";
    throw InvalidArgument(os.str());
  }
}

// Closed-form coefficients with the variance term clamped at zero.
SymmetricTwoBody closed_form_coefficients(const PauliVector& first, ClosedFormVariant variant) {
  const double v = std::max(0.0, (0.5 - purity(first)) / 3.0);
  SymmetricTwoBody t;
  t(0, 0) = 0.25;
  for (std::size_t k = 1; k < 4; ++k) t(0, k) = 0.5 * first[k];
  for (std::size_t j = 1; j < 4; ++j) {
    for (std::size_t k = j; k < 4; ++k) {
      if (j == k) {
        t(j, k) = first[j] * first[j] + v;
      } else {
        t(j, k) = variant == ClosedFormVariant::kIsotropic ? first[j] * first[k] : 0.0;
      }
    }
  }
  return t;
}

double linear_entropy(const SymmetricTwoBody& T) {
  double s = 0.0;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) s += T(a, b) * T(a, b);
  return 1.0 - 4.0 * s;
}

double entropy_density(double l, int order) {
  if (order == kExactEntropy) return l > 0.0 ? -l * std::log(l) : 0.0;
  const double q = 1.0 - l;
  double pw = 1.0, acc = 0.0;
  for (int n = 1; n <= order; ++n) {
    pw *= q;
    acc += pw / n;
  }
  return l * acc;
}

double entropy_derivative(double l, int order) {
  if (order == kExactEntropy) return -std::log(std::max(l, 1e-14)) - 1.0;
  // d/dλ [λ Σ q^n/n] = Σ q^n/n − λ Σ q^{n−1}
  const double q = 1.0 - l;
  double pw = 1.0, a = 0.0, b = 0.0;
  for (int n = 1; n <= order; ++n) {
    b += pw;
    pw *= q;
    a += pw / n;
  }
  return a - l * b;
}

using Matrix3 = Eigen::Matrix3d;

SymmetricTwoBody compose(const PauliVector& first, const Matrix3& S) {
  SymmetricTwoBody t;
  t(0, 0) = 0.25;
  for (std::size_t k = 1; k < 4; ++k) t(0, k) = 0.5 * first[k];
  for (std::size_t j = 1; j < 4; ++j)
    for (std::size_t k = j; k < 4; ++k) t(j, k) = first[j] * first[k] + S(j - 1, k - 1);
  return t;
}

struct Evaluation {
  double value;
  double min_eigenvalue;
  Matrix3 gradient;
};

Evaluation evaluate(const PauliVector& first, const Matrix3& S, int order, bool want_gradient) {
  const Matrix4c T = to_matrix(compose(first, S));
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(T);
  const Eigen::Vector4d lam = es.eigenvalues();
  Evaluation e{0.0, lam.minCoeff(), Matrix3::Zero()};
  for (int i = 0; i < 4; ++i) e.value += entropy_density(lam[i], order);
  if (!want_gradient) return e;
  Eigen::Vector4d fp;
  for (int i = 0; i < 4; ++i) fp[i] = entropy_derivative(lam[i], order);
  const Matrix4c D = es.eigenvectors() * fp.asDiagonal() * es.eigenvectors().adjoint();
  const auto& s = pauli_matrices();
  for (int j = 1; j < 4; ++j) {
    for (int k = j; k < 4; ++k) {
      Matrix4c sk;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) sk.block<2, 2>(2 * a, 2 * b) = s[j](a, b) * s[k];
      const double g = (D * sk).trace().real();
      e.gradient(j - 1, k - 1) = g;
      e.gradient(k - 1, j - 1) = g;
    }
  }
  e.gradient -= (e.gradient.trace() / 3.0) * Matrix3::Identity();
  return e;
}

// Euclidean projection onto {S ⪰ 0, tr S = t}: eigenvalues projected onto the
// scaled simplex.
Matrix3 project_spectraplex(const Matrix3& Y, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix3> es(0.5 * (Y + Y.transpose()));
  Eigen::Vector3d lam = es.eigenvalues();
  std::array<double, 3> u{lam[0], lam[1], lam[2]};
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (int i = 0; i < 3; ++i) {
    css += u[i];
    const double cand = (css - t) / (i + 1);
    if (u[i] - cand > 0.0) theta = cand;
  }
  for (int i = 0; i < 3; ++i) lam[i] = std::max(0.0, lam[i] - theta);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

ClosureResult closure_closed_form(const PauliVector& first, ClosedFormVariant variant) {
  require_conditional(first, "closure_closed_form");
  ClosureResult r;
  r.second = closed_form_coefficients(first, variant);
  r.entropy_value = linear_entropy(r.second);
  r.method = ClosureMethod::kClosedForm;
  r.entropy_order = 1;
  r.residuals = check_constraints(first, r.second);
  return r;
}

double two_body_entropy(const SymmetricTwoBody& T, int entropy_order) {
  if (entropy_order < 0) throw InvalidArgument("entropy order must be >= 1 or exact");
  Eigen::SelfAdjointEigenSolver<Matrix4c> es(to_matrix(T), Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += entropy_density(es.eigenvalues()[i], entropy_order);
  return s;
}

SymmetricTwoBody linear_entropy_optimum(const PauliVector& first) {
  require_conditional(first, "linear_entropy_optimum");
  const Eigen::Vector3d m(first[1], first[2], first[3]);
  const double M = m.squaredNorm();
  const double t = std::max(0.0, 0.25 - M);
  const double a = std::max(0.0, (t - 2.0 * M) / 3.0);
  const double b = 0.5 * (t - a);
  Matrix3 S = b * Matrix3::Identity();
  if (M > 0.0) {
    const Eigen::Vector3d u = m / std::sqrt(M);
    S += (a - b) * u * u.transpose();
  } else {
    S = (t / 3.0) * Matrix3::Identity();
  }
  return compose(first, S);
}

ClosureResult closure_numeric(const PauliVector& first, const NumericClosureOptions& o) {
  require_conditional(first, "closure_numeric");
  if (!(o.tol > 0.0)) throw InvalidArgument("closure_numeric: tol must be > 0");
  if (o.entropy_order < 0) throw InvalidArgument("closure_numeric: entropy order must be >= 1 or exact");
  if (o.max_iterations < 1) throw InvalidArgument("closure_numeric: max_iterations must be >= 1");

  const double t = std::max(0.0, 0.5 - purity(first));  // tr S = 1/4 − |μ|²
  ClosureResult r;
  r.method = ClosureMethod::kNumeric;
  r.entropy_order = o.entropy_order;
  Matrix3 S = project_spectraplex((t / 3.0) * Matrix3::Identity(), t);
  if (t < 1e-14) {
    // pure input: S = 0 is the only feasible point
    S.setZero();
    r.second = compose(first, S);
    r.entropy_value = evaluate(first, S, o.entropy_order, false).value;
    r.residuals = check_constraints(first, r.second);
    return r;
  }

  Evaluation cur = evaluate(first, S, o.entropy_order, true);
  double step = 1.0;
  r.converged = false;
  int it = 0;
  for (; it < o.max_iterations; ++it) {
    const Matrix3 mapped = project_spectraplex(S + cur.gradient, t) - S;
    r.gradient_norm = mapped.norm();
    if (r.gradient_norm < o.tol) {
      r.converged = true;
      break;
    }
    double a = std::min(2.0 * step, 1e3);
    bool accepted = false;
    while (a > 1e-20) {
      const Matrix3 trial = project_spectraplex(S + a * cur.gradient, t);
      const Evaluation e = evaluate(first, trial, o.entropy_order, false);
      const double gain = (cur.gradient.array() * (trial - S).array()).sum();
      if (std::isfinite(e.value) && e.min_eigenvalue >= -1e-12 && e.value >= cur.value + 1e-4 * gain) {
        S = trial;
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) break;  // no ascent direction left at working precision
    step = a;
    cur = evaluate(first, S, o.entropy_order, true);
  }
  if (!r.converged) {
    // Entropy values carry ~1e-15 of eigenvalue noise, which hides ascent
    // once the projected gradient is a few 1e-7 of the gradient scale.
    r.converged = r.gradient_norm < 1e-6 * std::max(1.0, cur.gradient.norm());
  }
  r.iterations = it;
  r.second = compose(first, S);
  r.entropy_value = cur.value;
  r.residuals = check_constraints(first, r.second);
  return r;
}

MomentField closed_second_moment(const MomentField& first, const ClosureSpec& closure,
                                 EffectiveDiagnostics* diag) {
  if (first.order < 1) throw InvalidArgument("closure: field carries no first moment");
  MomentField out(first.grid, 2);
  out.F = first.F;
  out.first = first.first;
  const std::size_t n = first.grid.size();
  std::vector<unsigned char> flag(n, 0);  // 1 undefined, 2 overpure, 4 unconverged
  parallel_for(n, [&](std::size_t k) {
    const PauliVector& mu = first.first[k];
    const double F = first.F[k];
    SymmetricTwoBody c;
    c(0, 0) = 0.5 * mu[0];
    for (std::size_t j = 1; j < 4; ++j) c(0, j) = 0.5 * mu[j];
    if (!(F >= kUndefinedConditional)) {
      flag[k] = 1;
      out.second[k] = c;
      return;
    }
    const double inv = 1.0 / F;
    PauliVector cond{0.5, mu[1] * inv, mu[2] * inv, mu[3] * inv};
    SymmetricTwoBody cc;
    if (purity(cond) > 0.5 + 1e-8) {
      // Outside the Bloch ball the closure is undefined; evaluate it at the
      // radial projection so C_jk stays bounded by |F_C|/4.
      flag[k] = 2;
      const double s = 0.5 / std::sqrt(cond[1] * cond[1] + cond[2] * cond[2] + cond[3] * cond[3]);
      for (std::size_t j = 1; j < 4; ++j) cond[j] *= s;
      cc = closed_form_coefficients(cond, closure.variant);
    } else if (closure.method == ClosureMethod::kNumeric && purity(cond) <= 0.5) {
      const ClosureResult res = closure_numeric(cond, closure.numeric);
      if (!res.converged) flag[k] = 4;
      cc = res.second;
    } else {
      cc = closed_form_coefficients(cond, closure.variant);
    }
    for (std::size_t j = 1; j < 4; ++j)
      for (std::size_t l = j; l < 4; ++l) c(j, l) = F * cc(j, l);
    out.second[k] = c;
  });
  if (diag) {
    *diag = {};
    for (unsigned char f : flag) {
      if (f == 1) ++diag->undefined_nodes;
      if (f == 2) ++diag->overpure_nodes;
      if (f == 4) ++diag->unconverged_nodes;
    }
  }
  return out;
}

HierarchyRHS effective_first_moment_rhs(const MomentField& first, const HamiltonianOnGrid& h,
                                        const ClosureSpec& closure, const Discretization& disc,
                                        EffectiveDiagnostics* diag) {
  const MomentField second = closed_second_moment(first, closure, diag);
  HierarchyRHS rhs = first_moment_rhs(first, second, h, disc);
  for (std::size_t k = 0; k < first.grid.size(); ++k) {
    if (!(first.F[k] >= kUndefinedConditional)) {
      rhs.dF[k] = 0.0;
      rhs.drho[k] = PauliVector{};
    }
  }
  return rhs;
}

HierarchyRHS effective_first_moment_rhs(const MomentField& first, const OperatorField& H,
                                        const ClosureSpec& closure, const Discretization& disc,
                                        EffectiveDiagnostics* diag) {
  return effective_first_moment_rhs(first, sample_hamiltonian(H, first.grid), closure, disc, diag);
}

std::string to_string(ClosureMethod m) {
  return m == ClosureMethod::kClosedForm ? "closed_form" : "numeric";
}

void write_closure_report_csv(std::ostream& os, const std::vector<PauliVector>& inputs,
                              const std::vector<ClosureResult>& results) {
  if (inputs.size() != results.size()) throw InvalidArgument("closure report: size mismatch");
  os << "mu0,mu1,mu2,mu3,mu00,mu01,mu02,mu03,mu11,mu12,mu13,mu22,mu23,mu33,entropy,method,order,"
        "converged,iterations,trace_back1,trace_back2,trace_back3,norm_first,norm_second,purity_first,"
        "purity_second_printed,purity_second_exact,variance1,variance2,variance3,diagonal_sum,"
        "diagonal_sum_printed,cauchy_schwarz12,cauchy_schwarz13,cauchy_schwarz23,psd_min_eigenvalue\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& in = inputs[i];
    const auto& r = results[i];
    os << in[0] << ',' << in[1] << ',' << in[2] << ',' << in[3];
    for (double c : r.second.c) os << ',' << c;
    os << ',' << r.entropy_value << ',' << to_string(r.method) << ','
       << (r.entropy_order == kExactEntropy ? std::string("exact") : std::to_string(r.entropy_order))
       << ',' << (r.converged ? 1 : 0) << ',' << r.iterations;
    const auto& c = r.residuals;
    for (double v : c.trace_back) os << ',' << v;
    os << ',' << c.norm_first << ',' << c.norm_second << ',' << c.purity_first << ','
       << c.purity_second_printed << ',' << c.purity_second_exact;
    for (double v : c.variance) os << ',' << v;
    os << ',' << c.diagonal_sum << ',' << c.diagonal_sum_printed;
    for (double v : c.cauchy_schwarz) os << ',' << v;
    os << ',' << c.psd_min_eigenvalue << '\n';
  }
}

}  // namespace hqc
