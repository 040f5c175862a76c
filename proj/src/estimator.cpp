#include "afdm/estimator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Sparse>

namespace afdm {

using SpMat = Eigen::SparseMatrix<cd>;

BasisGrid BasisGrid::make(int tau_m, int nu_m) {
  if (tau_m < 0 || nu_m < 0) throw ParameterError("tau_m and nu_m must be non-negative");
  BasisGrid g;
  g.tau_m = tau_m;
  g.nu_m = nu_m;
  const int lm = (2 * nu_m + 1) * (tau_m + 1);
  for (int i = 1; i <= lm; ++i) g.taps.emplace_back((i - 1) / (2 * nu_m + 1), (i - 1) % (2 * nu_m + 1) - nu_m);
  return g;
}

int BasisGrid::index_of(int tau, int nu) const {
  if (tau < 0 || tau > tau_m || nu < -nu_m || nu > nu_m) return -1;
  return tau * (2 * nu_m + 1) + nu + nu_m;
}

std::vector<PathOperator> basis_operators(const BasisGrid& grid, const AfdmConfig& cfg) {
  std::vector<PathOperator> ops;
  ops.reserve(grid.taps.size());
  for (auto [t, v] : grid.taps) ops.emplace_back(t, v, cfg);
  return ops;
}

CMat build_psi(const CVec& x, const std::vector<PathOperator>& ops) {
  CMat psi(x.size(), static_cast<Eigen::Index>(ops.size()));
  for (std::size_t i = 0; i < ops.size(); ++i) psi.col(i) = ops[i].apply(x);
  return psi;
}

CMat build_psi(const CVec& x, const BasisGrid& grid, const AfdmConfig& cfg) {
  if (x.size() != cfg.n_sub) throw ConfigError("build_psi: length mismatch");
  return build_psi(x, basis_operators(grid, cfg));
}

double effective_noise_variance(const RVec& c_alpha, double sigma_d2, double sigma_cn2) {
  return sigma_d2 * c_alpha.sum() + sigma_cn2;
}

namespace {

MmseSolution solve_normal(const CMat& gram, const CMat& psi, const CVec& y, const RVec& c_alpha,
                          double noise_var) {
  const Eigen::Index l = gram.rows();
  if (c_alpha.size() != l) throw ConfigError("prior size does not match Psi columns");
  if (noise_var < 0) throw ConfigError("noise variance must be non-negative");
  // taps with zero prior variance are pinned to zero and dropped
  std::vector<Eigen::Index> act;
  for (Eigen::Index i = 0; i < l; ++i)
    if (c_alpha[i] > 0) act.push_back(i);
  MmseSolution out;
  out.alpha_hat = CVec::Zero(l);
  out.posterior_var = RVec::Zero(l);
  const Eigen::Index k = static_cast<Eigen::Index>(act.size());
  if (k == 0) {
    out.rcond = 1;
    return out;
  }
  CMat m(k, k);
  CVec rhs(k);
  const CVec py = psi.adjoint() * y;
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) m(a, b) = gram(act[a], act[b]);
    double ca = c_alpha[act[a]];
    if (std::isfinite(ca)) m(a, a) += noise_var / ca;
    rhs[a] = py[act[a]];
  }
  Eigen::LLT<CMat> llt(m);
  out.rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
  if (llt.info() != Eigen::Success || out.rcond < 1e-13)
    throw NumericalError("MMSE normal matrix singular (rcond " + std::to_string(out.rcond) + ")");
  CVec sol = llt.solve(rhs);
  CMat inv = llt.solve(CMat::Identity(k, k));
  for (Eigen::Index a = 0; a < k; ++a) {
    out.alpha_hat[act[a]] = sol[a];
    out.posterior_var[act[a]] = noise_var * inv(a, a).real();
  }
  return out;
}

// Normal matrix for the equalizer, H^H H + reg I, solved against H^H r.
CVec lmmse_solve(const SpMat& h, const CVec& r, double reg) {
  SpMat hh = SpMat(h.adjoint()) * h;
  CMat g = CMat(hh);
  g.diagonal().array() += reg;
  CVec rhs = h.adjoint() * r;
  Eigen::LLT<CMat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("equalizer matrix not positive definite");
  }
  return llt.solve(rhs);
}

CVec symbols_from_bits(const std::vector<uint8_t>& bits, Eigen::Index n, const FrameSpec& spec) {
  return map_bits(bits, static_cast<int>(n), spec);
}

SpMat sparse_channel(const CVec& alpha, const std::vector<uint8_t>& b, const std::vector<PathOperator>& ops,
                     int n) {
  std::vector<Eigen::Triplet<cd>> trips;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!b[i]) continue;
    for (int q = 0; q < n; ++q) trips.emplace_back(ops[i].row_of(q), q, alpha[i] * ops[i].coef(q));
  }
  SpMat h(n, n);
  h.setFromTriplets(trips.begin(), trips.end());
  return h;
}

}  // namespace

MmseSolution mmse_solve(const CVec& y, const CMat& psi, const PriorModel& prior) {
  if (y.size() != psi.rows()) throw ConfigError("mmse_estimate: y and Psi row count differ");
  CMat gram = psi.adjoint() * psi;
  return solve_normal(gram, psi, y, prior.c_alpha, prior.noise_var);
}

CVec mmse_estimate(const CVec& y, const CMat& psi, const PriorModel& prior) {
  return mmse_solve(y, psi, prior).alpha_hat;
}

MmseEstimator::MmseEstimator(CMat psi, RVec c_alpha)
    : psi_(std::move(psi)), gram_(psi_.adjoint() * psi_), c_alpha_(std::move(c_alpha)) {}

MmseSolution MmseEstimator::solve(const CVec& y, double noise_var) const {
  return solve_normal(gram_, psi_, y, c_alpha_, noise_var);
}

MmseSolution MmseEstimator::solve(const CVec& y, double noise_var, const RVec& c_alpha) const {
  return solve_normal(gram_, psi_, y, c_alpha, noise_var);
}

std::vector<uint8_t> threshold_paths(const CVec& alpha_hat, double eps) {
  if (eps < 0) throw ConfigError("threshold must be non-negative");
  std::vector<uint8_t> b(alpha_hat.size());
  for (Eigen::Index i = 0; i < alpha_hat.size(); ++i) b[i] = std::abs(alpha_hat[i]) > eps;
  return b;
}

std::vector<uint8_t> threshold_paths(const CVec& alpha_hat, const RVec& eps) {
  std::vector<uint8_t> b(alpha_hat.size());
  for (Eigen::Index i = 0; i < alpha_hat.size(); ++i) b[i] = std::abs(alpha_hat[i]) > eps[i];
  return b;
}

CMat reconstruct_channel(const CVec& alpha_hat, const std::vector<uint8_t>& b,
                         const std::vector<PathOperator>& ops) {
  if (alpha_hat.size() != static_cast<Eigen::Index>(ops.size()) || b.size() != ops.size())
    throw ConfigError("reconstruct_channel: size mismatch");
  if (ops.empty()) throw ConfigError("reconstruct_channel: empty basis");
  const int n = ops[0].size();
  CMat h = CMat::Zero(n, n);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (!b[i]) continue;
    for (int q = 0; q < n; ++q) h(ops[i].row_of(q), q) += alpha_hat[i] * ops[i].coef(q);
  }
  return h;
}

CMat reconstruct_channel(const CVec& alpha_hat, const std::vector<uint8_t>& b, const BasisGrid& grid,
                         const AfdmConfig& cfg) {
  return reconstruct_channel(alpha_hat, b, basis_operators(grid, cfg));
}

Equalized equalize_demod(const CVec& y, const CMat& h_hat, const CVec& x_pilot, const FrameSpec& spec,
                         double noise_var) {
  if (h_hat.rows() != h_hat.cols()) throw ConfigError("equalize_demod: channel must be square");
  if (y.size() != h_hat.rows() || x_pilot.size() != y.size())
    throw ConfigError("equalize_demod: size mismatch");
  Equalized out;
  if (spec.data_symbol_power <= 0) {
    out.symbols = CVec::Zero(y.size());
    out.bits = demap_symbols(out.symbols, spec);
    return out;
  }
  CMat g = h_hat.adjoint() * h_hat;
  g.diagonal().array() += noise_var / spec.data_symbol_power;
  CVec rhs = h_hat.adjoint() * (y - h_hat * x_pilot);
  Eigen::LLT<CMat> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalError("equalizer matrix singular");
  out.symbols = llt.solve(rhs);
  out.bits = demap_symbols(out.symbols, spec);
  return out;
}

double channel_mse(const CMat& h_true, const CMat& h_hat) {
  if (h_true.rows() != h_hat.rows() || h_true.cols() != h_hat.cols())
    throw ConfigError("channel_mse: shape mismatch");
  return (h_true - h_hat).norm();
}

EstimationResult iterative_estimate(const CVec& y, const CVec& x_pilot, const MmseEstimator& est,
                                    const std::vector<PathOperator>& ops, const FrameSpec& spec,
                                    double noise_var_comm, const IterativeOptions& opt,
                                    const CMat* h_true, const std::vector<uint8_t>* true_bits) {
  if (opt.n_iter < 1) throw ConfigError("n_iter must be at least 1");
  if (ops.size() != static_cast<std::size_t>(est.psi().cols()))
    throw ConfigError("iterative_estimate: basis and Psi disagree");
  const int n = static_cast<int>(y.size());
  const double sd2 = spec.data_symbol_power;
  double prior_power = 0;
  for (Eigen::Index i = 0; i < est.c_alpha().size(); ++i)
    if (std::isfinite(est.c_alpha()[i])) prior_power += est.c_alpha()[i];

  EstimationResult res;
  CVec obs = y;
  RVec prior = est.c_alpha();
  double noise_model = effective_noise_variance(RVec::Constant(1, prior_power), sd2, noise_var_comm);
  double prev_resid = std::numeric_limits<double>::infinity();
  for (int it = 0; it < opt.n_iter; ++it) {
    IterationRecord rec;
    MmseSolution sol = est.solve(obs, noise_model, prior);
    RVec eps(sol.posterior_var.size());
    for (Eigen::Index i = 0; i < eps.size(); ++i)
      eps[i] = opt.eps_override >= 0 ? opt.eps_override
                                     : opt.eps_factor * std::sqrt(sol.posterior_var[i]);
    rec.alpha_hat = sol.alpha_hat;
    rec.indicator = threshold_paths(sol.alpha_hat, eps);
    rec.noise_var_model = noise_model;

    SpMat hs = sparse_channel(sol.alpha_hat, rec.indicator, ops, n);
    Equalized eq;
    CVec x_d_hat = CVec::Zero(n);
    if (sd2 > 0) {
      eq.symbols = lmmse_solve(hs, y - hs * x_pilot, noise_var_comm / sd2);
      eq.bits = demap_symbols(eq.symbols, spec);
      x_d_hat = symbols_from_bits(eq.bits, n, spec);
    } else {
      eq.symbols = CVec::Zero(n);
      eq.bits = demap_symbols(eq.symbols, spec);
    }
    rec.residual_norm = (y - hs * (x_pilot + x_d_hat)).norm();
    if (rec.residual_norm > prev_resid * (1 + 1e-12)) res.monotone = false;
    prev_resid = rec.residual_norm;
    CMat h_hat = CMat(hs);
    if (h_true) rec.mse = channel_mse(*h_true, h_hat);
    if (true_bits && true_bits->size() == eq.bits.size()) {
      std::size_t e = 0;
      for (std::size_t k = 0; k < eq.bits.size(); ++k) e += (*true_bits)[k] != eq.bits[k];
      rec.bit_errors = e;
    }
    res.alpha_hat = rec.alpha_hat;
    res.indicator = rec.indicator;
    res.h_eff_hat = std::move(h_hat);
    res.mse = rec.mse;
    res.data = std::move(eq);
    res.iterations.push_back(std::move(rec));

    // residual data interference enters through the tap errors
    obs = y - hs * x_d_hat;
    noise_model = noise_var_comm + sd2 * sol.posterior_var.sum();
    if (opt.restrict_support) {
      int kept = 0;
      for (auto b : res.indicator) kept += b;
      if (kept > 0) {
        double post = 0;
        for (Eigen::Index i = 0; i < prior.size(); ++i) {
          post += res.indicator[i] ? sol.posterior_var[i] : 0.0;
          prior[i] = res.indicator[i] ? prior_power / kept : 0.0;
        }
        noise_model = noise_var_comm + sd2 * post;
      }
    }
  }
  return res;
}

CVec refine_with_known_data(const CVec& y, const CVec& x_data, const CMat& h, const MmseEstimator& est,
                            double noise_var) {
  return est.solve(y - h * x_data, noise_var).alpha_hat;
}

}  // namespace afdm
