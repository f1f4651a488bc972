#include "ramp/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace ramp {

std::string to_string(WeightRule rule) {
  switch (rule) {
    case WeightRule::kMaClosed: return "ma_closed";
    case WeightRule::kMaQp: return "ma_qp";
    case WeightRule::kMaOracle: return "ma_oracle";
    case WeightRule::kMaBatesGranger: return "ma_bates_granger";
    case WeightRule::kCSearch: return "c_search";
    case WeightRule::kCOracle: return "c_oracle";
    case WeightRule::kEqual: return "equal";
  }
  return "unknown";
}

WeightVector equal_weights(int k) {
  if (k < 1) throw Error("equal_weights: need at least one component");
  WeightVector out;
  out.w = Vector::Constant(k, 1.0 / k);
  out.rule = WeightRule::kEqual;
  return out;
}

namespace {

void require_square(const Matrix& m, const char* who) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw Error(std::string(who) + ": matrix must be square and nonempty");
  if (!m.allFinite()) throw Error(std::string(who) + ": matrix has non-finite entries");
}

constexpr int kMaxEnumeration = 15;

}  // namespace

ClosedFormWeights closed_form_ma_weights(const SigmaMatrix& sigma) {
  const Matrix& s = sigma.entries;
  require_square(s, "closed_form_ma_weights");
  Eigen::JacobiSVD<Matrix> svd(s);
  const auto& sv = svd.singularValues();
  const double smax = sv.maxCoeff();
  const double smin = sv.minCoeff();
  if (!(smin > 0.0) || smax / smin > 1e12) {
    std::ostringstream msg;
    msg << "closed_form_ma_weights: Sigma is singular (condition number "
        << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
    throw SingularMatrixError(msg.str());
  }
  const Vector ones = Vector::Ones(s.rows());
  const Vector sinv_one = s.fullPivLu().solve(ones);
  const double denom = ones.dot(sinv_one);
  if (!(denom > 0.0)) throw SingularMatrixError("closed_form_ma_weights: 1'Sigma^-1 1 is not positive");
  ClosedFormWeights out;
  out.weights.w = sinv_one / denom;
  out.weights.rule = WeightRule::kMaClosed;
  out.lower_bound = 1.0 / denom;
  out.weights.attained_value = out.weights.w.dot(s * out.weights.w);
  return out;
}

Matrix project_psd(const Matrix& m) {
  require_square(m, "project_psd");
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  const Vector& ev = eig.eigenvalues();
  if (ev.minCoeff() >= 0.0) return sym;
  // rounding-level negatives are clipped silently
  if (ev.minCoeff() < -1e-12 * ev.cwiseAbs().maxCoeff()) {
    std::ostringstream msg;
    msg << "matrix is not PSD (smallest eigenvalue " << ev.minCoeff() << "), clipping at 0";
    warn(msg.str());
  }
  const Vector clipped = ev.cwiseMax(0.0);
  Matrix out = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
  return 0.5 * (out + out.transpose());
}

std::optional<Vector> affine_simplex_qp(const Matrix& m, const Vector& a) {
  require_square(m, "affine_simplex_qp");
  const int k = static_cast<int>(m.rows());
  if (a.size() != k) throw Error("affine_simplex_qp: constraint vector has wrong length");
  if (k > kMaxEnumeration) throw Error("affine_simplex_qp: K > 15 is beyond the enumeration bound");

  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  std::optional<Vector> best;
  double best_value = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<int> idx;
    for (int j = 0; j < k; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const int q = static_cast<int>(idx.size());
    // [2 M_SS  -a_S; a_S'  0] [w; mu] = [0; 1]
    Matrix kkt = Matrix::Zero(q + 1, q + 1);
    Vector rhs = Vector::Zero(q + 1);
    for (int r = 0; r < q; ++r) {
      for (int c = 0; c < q; ++c) kkt(r, c) = 2.0 * m(idx[r], idx[c]);
      kkt(r, q) = -a[idx[r]];
      kkt(q, r) = a[idx[r]];
    }
    rhs[q] = 1.0;
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(kkt);
    const Vector sol = cod.solve(rhs);
    if (!sol.allFinite()) continue;
    if ((kkt * sol - rhs).lpNorm<Eigen::Infinity>() > 1e-9 * scale) continue;

    Vector w = Vector::Zero(k);
    bool feasible = true;
    for (int r = 0; r < q; ++r) {
      if (sol[r] < -1e-12) {
        feasible = false;
        break;
      }
      w[idx[r]] = std::max(sol[r], 0.0);
    }
    if (!feasible) continue;
    const double aw = a.dot(w);
    if (!(aw > 0.0)) continue;
    w /= aw;
    const double value = w.dot(m * w);
    if (!best || value < best_value - 1e-15 * std::max(1.0, std::abs(best_value))) {
      best_value = value;
      best = w;
    }
  }
  return best;
}

WeightVector simplex_qp_weights(const SigmaMatrix& sigma) {
  require_square(sigma.entries, "simplex_qp_weights");
  if (sigma.size() > kMaxEnumeration) throw Error("simplex_qp_weights: K > 15 is beyond the enumeration bound");
  const Matrix m = project_psd(sigma.entries);
  auto w = affine_simplex_qp(m, Vector::Ones(m.rows()));
  if (!w) throw Error("simplex_qp_weights: no feasible face found");
  WeightVector out;
  out.w = *w;
  out.rule = WeightRule::kMaQp;
  out.attained_value = out.w.dot(sigma.entries * out.w);
  return out;
}

WeightVector bates_granger_weights(const SigmaMatrix& sigma) {
  require_square(sigma.entries, "bates_granger_weights");
  const Vector d = sigma.entries.diagonal();
  if ((d.array() <= 0.0).any()) throw Error("bates_granger_weights: diagonal entries must be positive");
  SigmaMatrix diag{d.asDiagonal(), sigma.kind};
  WeightVector out = simplex_qp_weights(diag);
  out.rule = WeightRule::kMaBatesGranger;
  return out;
}

Matrix quantile_covariance(std::span<const double> taus) {
  const int k = static_cast<int>(taus.size());
  if (k == 0) throw Error("quantile_covariance: no quantile levels");
  Matrix a(k, k);
  for (int i = 0; i < k; ++i) {
    if (!(taus[i] > 0.0 && taus[i] < 1.0)) throw Error("quantile_covariance: tau must lie in (0,1)");
    for (int j = 0; j < k; ++j) a(i, j) = std::min(taus[i], taus[j]) * (1.0 - std::max(taus[i], taus[j]));
  }
  return a;
}

WeightVector oracle_ma_weights(std::span<const double> taus, std::span<const double> densities) {
  if (densities.size() != taus.size()) throw Error("oracle_ma_weights: one density value per quantile level");
  for (double f : densities)
    if (!(f > 0.0) || !std::isfinite(f)) throw Error("oracle_ma_weights: density values must be positive");
  const Matrix a = quantile_covariance(taus);
  const int k = static_cast<int>(taus.size());
  Matrix m(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i, j) = a(i, j) / (densities[i] * densities[j]);
  WeightVector out = simplex_qp_weights(SigmaMatrix{m, SigmaKind::kTheoretical});
  out.rule = WeightRule::kMaOracle;
  return out;
}

WeightVector oracle_composite_weights(std::span<const double> taus, std::span<const double> densities) {
  if (densities.size() != taus.size()) throw Error("oracle_composite_weights: one density value per quantile level");
  bool any = false;
  for (double f : densities) {
    if (!(f >= 0.0) || !std::isfinite(f)) throw Error("oracle_composite_weights: density values must be nonnegative");
    any = any || f > 0.0;
  }
  if (!any) throw Error("oracle_composite_weights: constraint a'w = 1 is infeasible (all densities are 0)");
  const Matrix a = quantile_covariance(taus);
  const Vector f = Eigen::Map<const Vector>(densities.data(), static_cast<Eigen::Index>(densities.size()));
  auto raw = affine_simplex_qp(a, f);
  if (!raw) throw Error("oracle_composite_weights: no feasible face found");
  WeightVector out;
  out.raw = *raw;
  out.w = *raw / raw->sum();
  out.rule = WeightRule::kCOracle;
  out.attained_value = raw->dot(a * *raw);
  return out;
}

void WeightSearchConfig::validate() const {
  if (rounds < 1) throw Error("weight search needs at least one round");
  if (n_candidates < 1) throw Error("weight search needs at least one candidate per round");
  if (!(grid_step >= 0.0) || !(grid_step < 1.0)) throw Error("weight search grid step must lie in [0,1)");
}

namespace {

bool same_point(const Vector& x, const Vector& y) { return (x - y).lpNorm<Eigen::Infinity>() < 1e-9; }

bool on_simplex(const Vector& w) {
  return w.size() > 0 && (w.array() >= -1e-12).all() && std::abs(w.sum() - 1.0) <= 1e-9;
}

}  // namespace

std::vector<Vector> simplex_neighborhood(const Vector& center, double step) {
  std::vector<Vector> out;
  if (!(step > 0.0)) return out;
  const int k = static_cast<int>(center.size());
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      if (i == j) continue;
      Vector v = center;
      v[i] += step;
      v[j] -= step;
      v = v.cwiseMax(0.0);
      v /= v.sum();
      if (same_point(v, center)) continue;
      bool dup = false;
      for (const auto& u : out) dup = dup || same_point(u, v);
      if (!dup) out.push_back(v);
    }
  }
  return out;
}

WeightSearchResult composite_weight_search(const ProblemInstance& instance, std::span<const double> taus,
                                           std::span<const double> intercepts, const WeightSearchConfig& config,
                                           const RampConfig& ramp_config, const Vector& w_init) {
  config.validate();
  if (static_cast<std::size_t>(w_init.size()) != taus.size() || intercepts.size() != taus.size()) {
    throw Error("composite_weight_search: taus, intercepts and w_init must have equal length");
  }
  if (!on_simplex(w_init)) throw Error("composite_weight_search: w_init must lie on the simplex");

  const std::vector<double> tau_v(taus.begin(), taus.end());
  const std::vector<double> u_v(intercepts.begin(), intercepts.end());
  auto run_at = [&](const Vector& w) {
    std::vector<double> wv(w.data(), w.data() + w.size());
    return run_single_ramp(instance, CompositeQuantileLoss(tau_v, u_v, wv), ramp_config);
  };

  WeightSearchResult result;
  Vector w0 = w_init.cwiseMax(0.0);
  w0 /= w0.sum();
  result.best_run = run_at(w0);
  result.probes.push_back({0, w0, result.best_run.amse_hat, result.best_run.converged, false});
  Vector best_w = w0;
  double best_amse = result.best_run.amse_hat;
  std::vector<Vector> visited{w0};
  Rng rng(derive_seed(config.seed, stream::kWeightSearch));

  for (int round = 1; round <= config.rounds; ++round) {
    std::vector<Vector> cands;
    for (auto& v : simplex_neighborhood(best_w, config.grid_step)) {
      bool seen = false;
      for (const auto& u : visited) seen = seen || same_point(u, v);
      if (!seen) cands.push_back(std::move(v));
    }
    if (cands.empty()) break;
    std::shuffle(cands.begin(), cands.end(), rng);
    if (static_cast<int>(cands.size()) > config.n_candidates) cands.resize(config.n_candidates);

    int round_best = -1;
    double round_amse = best_amse;
    std::optional<RampResult> round_run;
    for (std::size_t c = 0; c < cands.size(); ++c) {
      visited.push_back(cands[c]);
      try {
        RampResult r = run_at(cands[c]);
        result.probes.push_back({round, cands[c], r.amse_hat, r.converged, false});
        if (r.amse_hat < round_amse) {
          round_amse = r.amse_hat;
          round_best = static_cast<int>(c);
          round_run = std::move(r);
        }
      } catch (const Error& e) {
        warn(std::string("weight search: candidate skipped: ") + e.what());
        result.probes.push_back({round, cands[c], std::numeric_limits<double>::quiet_NaN(), false, true});
      }
    }
    result.rounds_run = round;
    if (round_best >= 0) {
      best_w = cands[round_best];
      best_amse = round_amse;
      result.best_run = std::move(*round_run);
    }
  }

  result.weights.w = best_w;
  result.weights.rule = WeightRule::kCSearch;
  result.weights.attained_value = best_amse;
  return result;
}

}  // namespace ramp
