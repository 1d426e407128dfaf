#include "urank/objective.hpp"

#include "urank/errors.hpp"
#include "urank/kernels.hpp"
#include "urank/model.hpp"
#include "urank/parallel.hpp"

#include <cmath>
#include <string>

namespace urank {
namespace {

// Stable log(1 + exp(z)).
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

struct RecordTerms {
  std::vector<double> loss;
  std::vector<double> g0;
  std::vector<double> g1;
};

} // namespace

Objective::Objective(const Dataset& data, Likelihood likelihood, bool scalar_dispersion, Execution execution)
    : data_(&data),
      likelihood_(likelihood),
      scalar_dispersion_(scalar_dispersion && likelihood == Likelihood::beta_binomial),
      execution_(execution) {
  if (scalar_dispersion_) intercept_ = SparseDesign::intercept(data.size());
}

Eigen::Index Objective::block_offset(int block) const { return block == 0 ? 0 : block_size(0); }

Eigen::Index Objective::parameter_size() const {
  Eigen::Index total = 0;
  for (int b = 0; b < block_count(); ++b) total += block_size(b);
  return total;
}

Eigen::VectorXd Objective::predictors(const Eigen::VectorXd& w, int block) const {
  const Eigen::VectorXd wb = w.segment(block_offset(block), block_size(block));
  return execution_ == Execution::serial ? kernels::serial::multiply(design(block), wb)
                                         : kernels::multiply(design(block), wb);
}

double Objective::evaluate(const Eigen::VectorXd& w, std::span<const double> precisions, Eigen::VectorXd* grad) const {
  if (w.size() != parameter_size()) {
    throw InputError("parameter vector has size " + std::to_string(w.size()) + ", expected " +
                     std::to_string(parameter_size()));
  }
  if (precisions.size() != static_cast<std::size_t>(block_count())) throw InputError("one precision per block required");

  const auto n = static_cast<std::int64_t>(data_->size());
  const Eigen::VectorXd s = predictors(w, 0);
  const Eigen::VectorXd t = block_count() > 1 ? predictors(w, 1) : Eigen::VectorXd();
  RecordTerms terms{std::vector<double>(data_->size()), std::vector<double>(data_->size()),
                    std::vector<double>(block_count() > 1 ? data_->size() : 0)};
  const bool bb = likelihood_ == Likelihood::beta_binomial;

  auto eval_record = [&](std::int64_t r) {
    const auto& rec = data_->records[static_cast<std::size_t>(r)];
    const auto i = static_cast<std::size_t>(r);
    if (bb) {
      const AlphaTriple a = alphas_from_predictors(s[r], t[r]);
      terms.loss[i] = -log_bb_pmf(rec.clicks, rec.impressions, a);
      const LocalDerivatives d = local_derivatives(rec.clicks, rec.impressions, a);
      terms.g0[i] = d.g_beta;
      terms.g1[i] = d.g_rho;
    } else {
      const double nn = static_cast<double>(rec.impressions);
      const double vv = static_cast<double>(rec.clicks);
      terms.loss[i] = nn * softplus(s[r]) - vv * s[r];
      terms.g0[i] = nn * sigmoid(s[r]) - vv;
    }
  };
  parallel::for_each_index(n, eval_record, execution_ == Execution::serial);

  double value = execution_ == Execution::serial ? kernels::serial::sum(terms.loss) : kernels::sum(terms.loss);
  if (!std::isfinite(value)) {
    for (std::size_t i = 0; i < terms.loss.size(); ++i) {
      if (!std::isfinite(terms.loss[i]) || !std::isfinite(terms.g0[i]) || (bb && !std::isfinite(terms.g1[i]))) {
        const auto& rec = data_->records[i];
        throw NumericError("non-finite likelihood term at record " + std::to_string(i) + " (" + rec.user_id + ", " +
                           rec.item_id + ")");
      }
    }
    throw NumericError("non-finite loss");
  }

  for (int b = 0; b < block_count(); ++b) {
    const auto wb = w.segment(block_offset(b), block_size(b));
    value += 0.5 * precisions[static_cast<std::size_t>(b)] * wb.squaredNorm();
  }

  if (grad != nullptr) {
    grad->resize(parameter_size());
    for (int b = 0; b < block_count(); ++b) {
      const auto& g = b == 0 ? terms.g0 : terms.g1;
      const Eigen::VectorXd xg = execution_ == Execution::serial ? kernels::serial::multiply_transpose(design(b), g)
                                                                 : kernels::multiply_transpose(design(b), g);
      grad->segment(block_offset(b), block_size(b)) =
          xg + precisions[static_cast<std::size_t>(b)] * w.segment(block_offset(b), block_size(b));
    }
    if (!grad->allFinite()) throw NumericError("non-finite gradient");
  }
  return value;
}

std::vector<double> Objective::curvature(const Eigen::VectorXd& w, int block) const {
  const Eigen::VectorXd s = predictors(w, 0);
  const Eigen::VectorXd t = block_count() > 1 ? predictors(w, 1) : Eigen::VectorXd();
  std::vector<double> h(data_->size());
  const auto n = static_cast<std::int64_t>(data_->size());
  const bool bb = likelihood_ == Likelihood::beta_binomial;
  parallel::for_each_index(n, [&](std::int64_t r) {
    const auto& rec = data_->records[static_cast<std::size_t>(r)];
    if (bb) {
      const LocalDerivatives d = local_derivatives(rec.clicks, rec.impressions, alphas_from_predictors(s[r], t[r]));
      h[static_cast<std::size_t>(r)] = block == 0 ? d.h_beta : d.h_rho;
    } else {
      const double p = sigmoid(s[r]);
      h[static_cast<std::size_t>(r)] = static_cast<double>(rec.impressions) * p * (1.0 - p);
    }
  });
  return h;
}

} // namespace urank
