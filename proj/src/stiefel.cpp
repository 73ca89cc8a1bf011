#include "mpac/stiefel.hpp"

#include <algorithm>
#include <cmath>

namespace mpac {

StiefelProblem::StiefelProblem(Matrix m, Matrix b) : m_(std::move(m)), b_(std::move(b)) {
  if (m_.rows() != m_.cols()) {
    throw Error(ErrorKind::ShapeMismatch, "quadratic term must be square");
  }
  if (b_.rows() != m_.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "linear term rows must match quadratic term");
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorKind::InvalidInput, "quadratic term is not symmetric");
  }
}

double StiefelProblem::objective(const Matrix& f) const {
  return (f.transpose() * (m_ * f)).trace() - 2.0 * (f.transpose() * b_).trace();
}

Matrix StiefelProblem::gradient(const Matrix& f) const {
  return 2.0 * (m_ * f) - 2.0 * b_;
}

void StiefelSolverConfig::validate() const {
  if (max_inner_iters <= 0 || !(grad_tol > 0.0) || !(step_init > 0.0) ||
      !(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw Error(ErrorKind::InvalidInput,
                "Stiefel solver settings must be positive with armijo_c in (0,1)");
  }
}

std::string_view to_string(StiefelStatus status) {
  switch (status) {
    case StiefelStatus::Converged: return "converged";
    case StiefelStatus::MaxIterations: return "max_iterations";
    case StiefelStatus::Stalled: return "stalled";
  }
  return "unknown";
}

Matrix riemannian_gradient(const StiefelProblem& p, const Matrix& f) {
  const Matrix g = p.gradient(f);
  const Matrix ftg = f.transpose() * g;
  return g - f * (0.5 * (ftg + ftg.transpose()));
}

double riemannian_grad_norm(const StiefelProblem& p, const Matrix& f) {
  return riemannian_gradient(p, f).norm();
}

namespace {

constexpr int kMaxHalvings = 30;
constexpr double kMinStep = 1e-20;
constexpr double kMaxStep = 1e20;
// Very long Cayley steps lose orthonormality to rounding; such trials are
// shortened like an Armijo failure.
constexpr double kFeasibilityTol = 1e-10;

struct Point {
  Matrix f;
  Matrix g;  // Euclidean gradient
  double objective = 0.0;
};

Point evaluate(const StiefelProblem& p, Matrix f) {
  Point pt;
  const Matrix mf = p.m() * f;
  pt.objective = (f.transpose() * mf).trace() - 2.0 * (f.transpose() * p.b()).trace();
  pt.g = 2.0 * mf - 2.0 * p.b();
  pt.f = std::move(f);
  return pt;
}

// Gradient under the canonical metric, G - F G^T F; drives the BB steps.
Matrix canonical_gradient(const Point& pt) {
  return pt.g - pt.f * (pt.g.transpose() * pt.f);
}

}  // namespace

StiefelResult solve_stiefel(const StiefelProblem& p, const Matrix& f0,
                            const StiefelSolverConfig& cfg) {
  cfg.validate();
  if (f0.rows() != p.m().rows() || f0.cols() != p.b().cols()) {
    throw Error(ErrorKind::ShapeMismatch, "start point shape does not match problem");
  }
  if (orthonormality_defect(f0) > 1e-8) {
    throw Error(ErrorKind::InvalidInput, "start point does not have orthonormal columns");
  }

  const Index c = f0.cols();
  StiefelResult out;
  Point cur = evaluate(p, f0);
  out.objective_history.push_back(cur.objective);
  out.feasibility_history.push_back(orthonormality_defect(cur.f));

  double tau = cfg.step_init;
  Matrix prev_f;
  Matrix prev_cgrad;
  bool bb_long = true;

  int iter = 0;
  for (; iter < cfg.max_inner_iters; ++iter) {
    const Matrix ftg = cur.f.transpose() * cur.g;
    const double rgrad =
        (cur.g - cur.f * (0.5 * (ftg + ftg.transpose()))).norm();
    if (rgrad <= cfg.grad_tol * (1.0 + std::abs(cur.objective))) {
      out.status = StiefelStatus::Converged;
      break;
    }
    // phi'(0) = -||A||_F^2 / 2 = -(||G||^2 - Tr((F^T G)^2))
    const double slope = -(cur.g.squaredNorm() - (ftg * ftg).trace());
    if (!(slope < 0.0)) {
      out.status = StiefelStatus::Converged;
      break;
    }

    if (cfg.bb_steps && iter > 0) {
      const Matrix cgrad = canonical_gradient(cur);
      const Matrix ds = cur.f - prev_f;
      const Matrix dy = cgrad - prev_cgrad;
      const double sy = std::abs((ds.transpose() * dy).trace());
      double next = cfg.step_init;
      if (sy > 0.0) {
        next = bb_long ? ds.squaredNorm() / sy : sy / dy.squaredNorm();
      }
      bb_long = !bb_long;
      tau = std::isfinite(next) ? std::clamp(next, kMinStep, kMaxStep) : cfg.step_init;
    } else {
      tau = cfg.step_init;
    }

    // A = U V^T with U = [G, F], V = [F, -G].
    Matrix u(cur.f.rows(), 2 * c);
    u << cur.g, cur.f;
    Matrix v(cur.f.rows(), 2 * c);
    v << cur.f, -cur.g;
    const Matrix vtu = v.transpose() * u;
    const Matrix vtf = v.transpose() * cur.f;
    const Matrix eye = Matrix::Identity(2 * c, 2 * c);

    bool accepted = false;
    for (int halving = 0; halving <= kMaxHalvings; ++halving, tau *= 0.5) {
      Eigen::FullPivLU<Matrix> lu(eye + (0.5 * tau) * vtu);
      if (!lu.isInvertible() || lu.rcond() < 1e-14) continue;
      Point trial = evaluate(p, cur.f - tau * (u * lu.solve(vtf)));
      if (!std::isfinite(trial.objective)) continue;
      if (orthonormality_defect(trial.f) > kFeasibilityTol) continue;
      if (trial.objective <= cur.objective + cfg.armijo_c * tau * slope) {
        if (cfg.bb_steps) {
          prev_f = cur.f;
          prev_cgrad = canonical_gradient(cur);
        }
        cur = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.status = StiefelStatus::Stalled;
      break;
    }
    out.objective_history.push_back(cur.objective);
    out.feasibility_history.push_back(orthonormality_defect(cur.f));
  }

  out.iterations = iter;
  out.objective = cur.objective;
  out.f = std::move(cur.f);
  out.grad_norm = riemannian_grad_norm(p, out.f);
  return out;
}

}  // namespace mpac
