#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rivercover/river_map.hpp"

namespace rivercover {

struct DepthSample {
  Vec2 position;
  double depth = 0.0;  // metres, positive down
};

/// Squared-exponential kernel k(a, b) = signal_var * exp(-|a - b|^2 / (2 l^2)), plus
/// noise_var on the diagonal of the training covariance.
struct KernelParams {
  double length_scale = 50.0;
  double signal_var = 1.0;
  double noise_var = 0.01;
};

double se_kernel(const KernelParams& k, Vec2 a, Vec2 b);

/// Value and gradient of the log marginal likelihood with respect to
/// (log length_scale, log signal_var, log noise_var).
struct MarginalLikelihood {
  double value = 0.0;
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
};

/// Samples, depths centred on their mean by the caller.
MarginalLikelihood log_marginal_likelihood(const std::vector<DepthSample>& samples, const Eigen::VectorXd& centred,
                                           const KernelParams& params);

struct GpFitOptions {
  std::optional<KernelParams> params;  // nullopt: maximise the marginal likelihood
  int restarts = 5;
  std::uint64_t seed = 1;
  std::size_t max_exact = 5000;
  /// Thinning cell in metres when there are more than max_exact samples; 0 picks the
  /// smallest multiple of the map resolution that fits.
  double thin_cell = 0.0;
};

/// Exact GP posterior with a constant mean equal to the sample mean.
class DepthGp {
 public:
  DepthGp(std::vector<DepthSample> samples, const KernelParams& params);

  double mean(Vec2 p) const;
  /// Posterior variance of the latent depth (no observation noise).
  double variance(Vec2 p) const;
  double prior_variance() const { return params_.signal_var; }
  const KernelParams& params() const { return params_; }
  const std::vector<DepthSample>& samples() const { return samples_; }

 private:
  Eigen::VectorXd cross_cov(Vec2 p) const;

  std::vector<DepthSample> samples_;
  KernelParams params_;
  double offset_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

/// Mean and standard deviation over the Free cells of a map; NaN elsewhere.
struct DepthMap {
  int width = 0;
  int height = 0;
  double resolution = 1.0;
  Vec2 origin;
  std::vector<double> mean;
  std::vector<double> stddev;
  KernelParams params;
  std::size_t samples_used = 0;
  double log_marginal_likelihood = 0.0;

  std::optional<double> mean_at(Vec2 p) const;
  std::optional<double> stddev_at(Vec2 p) const;
};

/// Sorted by (x, y, depth) so that results do not depend on input order.
std::vector<DepthSample> canonical_order(std::vector<DepthSample> samples);

/// Averages samples per square cell.
std::vector<DepthSample> thin_samples(const std::vector<DepthSample>& samples, double cell);

/// Multi-start quasi-Newton ascent of the marginal likelihood in log space, inside a
/// box scaled to the data extent and variance.
KernelParams optimize_hyperparameters(const std::vector<DepthSample>& samples, int restarts, std::uint64_t seed);

/// Throws ValidationError on fewer than 3 samples, collinear samples, or non-positive
/// or non-finite depths.
DepthGp fit_depth_gp(std::vector<DepthSample> samples, const GpFitOptions& options = {},
                     double map_resolution = 1.0);
DepthMap predict_depth_map(const RiverMap& map, const DepthGp& gp);

/// Throws ValidationError on an empty set.
double rmse(const DepthGp& gp, const std::vector<DepthSample>& held_out);
double rmse(const DepthMap& map, const std::vector<DepthSample>& held_out);

/// k-fold cross-validated RMSE; folds are drawn from a seeded shuffle of the canonical
/// order. Hyperparameters are refit per fold unless fixed in options.
double kfold_rmse(const std::vector<DepthSample>& samples, int folds, const GpFitOptions& options,
                  double map_resolution = 1.0);

enum class DepthLayer { Mean, StdDev };
/// ESRI ASCII raster, north row first, NODATA -9999.
std::string to_esri_ascii(const DepthMap& map, DepthLayer layer);

/// CSV with columns x,y,depth; a header row is optional.
std::vector<DepthSample> read_depth_csv(const std::string& text);
/// GPX track or waypoints carrying <depth> in their extensions; needs a geo reference.
std::vector<DepthSample> read_depth_gpx(const std::string& text, const GeoReference& geo);

}  // namespace rivercover
