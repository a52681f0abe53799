#include "fhbench/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace fhbench {

namespace {

// Powell's simplex acceptability factors.
constexpr double kMinFaceDistance = 0.25;
constexpr double kMaxEdge = 2.1;
constexpr double kGeometryStep = 0.5;
constexpr double kPoorRatio = 0.1;

struct BudgetExhausted {};

class Simplex {
 public:
  std::vector<Eigen::VectorXd> points;
  std::vector<double> values;
  std::size_t pole = 0;

  std::size_t dim() const { return points.front().size(); }

  void update_pole() {
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (values[j] < values[pole]) pole = j;
    }
  }

  // Non-pole vertex indices in storage order.
  std::vector<std::size_t> others() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != pole) out.push_back(j);
    }
    return out;
  }

  // Rows: vertex - pole.
  Eigen::MatrixXd edges(const std::vector<std::size_t>& idx) const {
    Eigen::MatrixXd d(dim(), dim());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      d.row(static_cast<Eigen::Index>(r)) = (points[idx[r]] - points[pole]).transpose();
    }
    return d;
  }
};

}  // namespace

OptimizerResult minimize_linear_trust_region(
    const Objective& objective, std::vector<double> x0, const OptimizerOptions& options,
    const std::function<void(const Evaluation&)>& on_evaluation) {
  if (!(options.rho_begin > 0.0) || !(options.rho_end > 0.0) ||
      options.rho_end > options.rho_begin) {
    throw std::invalid_argument("need 0 < rho_end <= rho_begin");
  }
  if (options.max_evaluations == 0) {
    throw std::invalid_argument("max_evaluations must be >= 1");
  }

  OptimizerResult result;
  result.method = std::string(kLinearTrustRegionName);
  std::size_t evaluations = 0;

  auto eval = [&](const Eigen::VectorXd& x) {
    if (evaluations >= options.max_evaluations) throw BudgetExhausted{};
    std::vector<double> xv(x.data(), x.data() + x.size());
    const double f = objective(xv);
    if (on_evaluation) on_evaluation({evaluations, xv, f});
    ++evaluations;
    return f;
  };

  const auto n = static_cast<Eigen::Index>(x0.size());
  Simplex s;
  Eigen::VectorXd start = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
  double rho = options.rho_begin;

  auto finish = [&](bool converged) {
    result.converged = converged;
    result.evaluations = evaluations;
    if (s.points.empty()) return result;
    const Eigen::VectorXd& best = s.points[s.pole];
    result.x.assign(best.data(), best.data() + best.size());
    result.f = s.values[s.pole];
    return result;
  };

  try {
    s.points.push_back(start);
    s.values.push_back(eval(start));
    if (n == 0) return finish(true);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::VectorXd v = start;
      v(i) += rho;
      s.points.push_back(v);
      s.values.push_back(eval(v));
    }
    s.update_pole();

    bool check_geometry = false;
    while (true) {
      const auto idx = s.others();
      const Eigen::MatrixXd d = s.edges(idx);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
      if (!lu.isInvertible()) {
        // Collapsed simplex: rebuild it around the pole at the current radius.
        for (std::size_t r = 0; r < idx.size(); ++r) {
          Eigen::VectorXd v = s.points[s.pole];
          v(static_cast<Eigen::Index>(r)) += rho;
          s.points[idx[r]] = v;
          s.values[idx[r]] = eval(v);
        }
        s.update_pole();
        continue;
      }
      const Eigen::MatrixXd dinv = lu.inverse();
      Eigen::VectorXd df(n);
      for (std::size_t r = 0; r < idx.size(); ++r) {
        df(static_cast<Eigen::Index>(r)) = s.values[idx[r]] - s.values[s.pole];
      }
      const Eigen::VectorXd grad = dinv * df;
      const double gnorm = grad.norm();

      if (check_geometry || gnorm == 0.0) {
        check_geometry = false;
        // Vertex r: edge length eta_r, distance sigma_r to the opposite face.
        Eigen::Index worst = -1;
        double worst_eta = kMaxEdge * rho;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double eta = d.row(r).norm();
          if (eta > worst_eta) {
            worst_eta = eta;
            worst = r;
          }
        }
        if (worst < 0) {
          double worst_sigma = kMinFaceDistance * rho;
          for (Eigen::Index r = 0; r < n; ++r) {
            const double sigma = 1.0 / dinv.col(r).norm();
            if (sigma < worst_sigma) {
              worst_sigma = sigma;
              worst = r;
            }
          }
        }
        if (worst >= 0) {
          Eigen::VectorXd step = dinv.col(worst).normalized() * (kGeometryStep * rho);
          if (grad.dot(step) > 0.0) step = -step;
          const Eigen::VectorXd v = s.points[s.pole] + step;
          const auto slot = idx[static_cast<std::size_t>(worst)];
          s.points[slot] = v;
          s.values[slot] = eval(v);
          s.update_pole();
          continue;
        }
        if (rho <= options.rho_end) return finish(true);
        rho *= 0.5;
        if (rho <= 1.5 * options.rho_end) rho = options.rho_end;
        continue;
      }

      const Eigen::VectorXd step = -rho * grad / gnorm;
      const Eigen::VectorXd trial = s.points[s.pole] + step;
      const double f_trial = eval(trial);
      const double predicted = rho * gnorm;
      const double ratio = (s.values[s.pole] - f_trial) / predicted;

      // Barycentric weight of the step on each vertex; a large weight means
      // replacing that vertex keeps the simplex volume, and far vertices are
      // preferred for replacement.
      const Eigen::VectorXd weight = dinv.transpose() * step;
      Eigen::Index replace = 0;
      double best_score = -1.0;
      for (Eigen::Index r = 0; r < n; ++r) {
        const auto slot = idx[static_cast<std::size_t>(r)];
        const double dist = (s.points[slot] - trial).norm() / rho;
        const double score = std::abs(weight(r)) * std::pow(std::max(1.0, dist), 3);
        if (score > best_score) {
          best_score = score;
          replace = r;
        }
      }
      const auto slot = idx[static_cast<std::size_t>(replace)];
      s.points[slot] = trial;
      s.values[slot] = f_trial;
      s.update_pole();
      if (!(ratio > kPoorRatio)) check_geometry = true;
    }
  } catch (const BudgetExhausted&) {
    if (!s.points.empty()) s.update_pole();
    return finish(false);
  }
}

}  // namespace fhbench
