#pragma once

#include <Eigen/Dense>

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "crda/covariance.hpp"
#include "crda/dataset.hpp"
#include "crda/discriminant.hpp"
#include "crda/model_selection.hpp"
#include "crda/selector.hpp"

namespace crda {

enum class CrdaVariant { Crda1, Crda2, Crda3, ScrdaBaseline };

std::string to_string(CrdaVariant variant);
CrdaVariant variant_from_string(const std::string& name);

/// Covariance-fit diagnostics kept with the model; fields that do not apply
/// to the chosen estimator stay NaN.
struct EstimatorDiagnostics {
  double alpha = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  double eta = std::numeric_limits<double>::quiet_NaN();          // tr(S)/p
  double eta_penalty = std::numeric_limits<double>::quiet_NaN();  // Rie-PSCM
};

/// Everything needed to score new observations.
struct CrdaModel {
  Eigen::MatrixXd means;                    // p x G
  Eigen::MatrixXd coefficients;             // row-sparse B, p x G
  std::vector<Eigen::Index> selected_rows;  // ascending
  Eigen::VectorXd log_priors;               // G
  HtSelector selector = HtSelector::Linf;
  Eigen::Index sparsity = 0;                // K
  double soft_delta = 0.0;                  // soft-threshold baseline only
  CrdaVariant variant = CrdaVariant::Crda1;
  EstimatorDiagnostics diagnostics;
  std::vector<std::string> label_names;     // optional, size G when present

  Eigen::Index dim() const { return means.rows(); }
  Eigen::Index num_classes() const { return means.cols(); }
};

Eigen::MatrixXd discriminant_scores(const Eigen::MatrixXd& xtest,
                                    const CrdaModel& model);
Eigen::VectorXi predict(const Eigen::MatrixXd& xtest, const CrdaModel& model);

struct FitConfig {
  CrdaVariant variant = CrdaVariant::Crda1;
  std::optional<HtSelector> selector;    // fix the selector (skip its CV)
  std::optional<Eigen::Index> sparsity;  // fix K (skip its CV)
  std::optional<double> soft_delta;      // fix the baseline threshold
  std::optional<double> eta_penalty;     // fix the Rie-PSCM penalty
  std::optional<double> forced_alpha;
  bool ell1_spatial_on_raw = false;
  PriorMode priors = PriorMode::Uniform;
  CvConfig cv;
};

/// Fits a CRDA model:
///  - Crda1/Crda2 use the Ell1-/Ell2-RSCM inverse and pick (selector, K) by
///    cross-validation unless both are fixed in the config;
///  - Crda3 uses the Rie-PSCM inverse with the l-infinity selector and
///    K bounded by that selector's adaptive upper bound; the penalty comes
///    from cross-validation over the default grid unless fixed;
///  - ScrdaBaseline soft-thresholds the Ell1-RSCM coefficients, with the
///    threshold cross-validated over ten linear steps up to max |B| unless
///    fixed.
CrdaModel fit(const LabeledDataset& train, const FitConfig& config);

}  // namespace crda
