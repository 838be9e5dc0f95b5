#include "rivercover/bathymetry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "rivercover/errors.hpp"

namespace rivercover {

namespace {

constexpr double kJitter = 1e-8;
// Hyperparameter search runs on at most this many samples; the final fit uses all.
constexpr std::size_t kOptimizeSubset = 400;

double squared_distance(Vec2 a, Vec2 b) { return dot(a - b, a - b); }

Eigen::MatrixXd training_cov(const std::vector<DepthSample>& s, const KernelParams& k) {
  const Eigen::Index n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) K(i, j) = K(j, i) = se_kernel(k, s[i].position, s[j].position);
  K.diagonal().array() += k.noise_var + kJitter;
  return K;
}

Eigen::LLT<Eigen::MatrixXd> factor(const Eigen::MatrixXd& K) {
  Eigen::LLT<Eigen::MatrixXd> llt(K);
  if (llt.info() != Eigen::Success) {
    // One more try with a larger jitter before giving up.
    Eigen::MatrixXd J = K;
    J.diagonal().array() += 1e-6 * std::max(1.0, K.diagonal().mean());
    llt.compute(J);
    if (llt.info() != Eigen::Success) throw ValidationError("kernel matrix is singular even with jitter");
  }
  return llt;
}

double sample_mean(const std::vector<DepthSample>& s) {
  double m = 0.0;
  for (const auto& d : s) m += d.depth;
  return m / static_cast<double>(s.size());
}

Eigen::VectorXd centred_depths(const std::vector<DepthSample>& s, double offset) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) y(static_cast<Eigen::Index>(i)) = s[i].depth - offset;
  return y;
}

void validate_samples(const std::vector<DepthSample>& s) {
  for (const auto& d : s)
    if (!std::isfinite(d.position.x) || !std::isfinite(d.position.y) || !std::isfinite(d.depth) || !(d.depth > 0.0))
      throw ValidationError("depth samples need finite positions and positive finite depths");
}

void require_spread(const std::vector<DepthSample>& s) {
  if (s.size() < 3) throw ValidationError("fitting hyperparameters needs at least 3 samples");
  Vec2 c{};
  for (const auto& d : s) c = c + d.position;
  c = c / static_cast<double>(s.size());
  double sxx = 0, syy = 0, sxy = 0;
  for (const auto& d : s) {
    const Vec2 v = d.position - c;
    sxx += v.x * v.x;
    syy += v.y * v.y;
    sxy += v.x * v.y;
  }
  const double tr = sxx + syy;
  const double det = sxx * syy - sxy * sxy;
  if (!(tr > 0.0) || det <= 1e-12 * tr * tr) throw ValidationError("depth samples are collinear");
}

struct Bounds {
  Eigen::Vector3d lo, hi;
};

Bounds log_bounds(const std::vector<DepthSample>& s, double var) {
  double xmin = s[0].position.x, xmax = xmin, ymin = s[0].position.y, ymax = ymin;
  for (const auto& d : s) {
    xmin = std::min(xmin, d.position.x);
    xmax = std::max(xmax, d.position.x);
    ymin = std::min(ymin, d.position.y);
    ymax = std::max(ymax, d.position.y);
  }
  const double extent = std::max(std::hypot(xmax - xmin, ymax - ymin), 1e-3);
  const double v = std::max(var, 1e-6);
  Bounds b;
  b.lo = {std::log(extent * 1e-3), std::log(v * 1e-4), std::log(v * 1e-8)};
  b.hi = {std::log(extent * 10.0), std::log(v * 100.0), std::log(v * 2.0)};
  return b;
}

KernelParams from_log(const Eigen::Vector3d& t) { return {std::exp(t(0)), std::exp(t(1)), std::exp(t(2))}; }

}  // namespace

double se_kernel(const KernelParams& k, Vec2 a, Vec2 b) {
  return k.signal_var * std::exp(-0.5 * squared_distance(a, b) / (k.length_scale * k.length_scale));
}

MarginalLikelihood log_marginal_likelihood(const std::vector<DepthSample>& samples, const Eigen::VectorXd& centred,
                                           const KernelParams& params) {
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  const Eigen::MatrixXd K = training_cov(samples, params);
  const auto llt = factor(K);
  const Eigen::VectorXd alpha = llt.solve(centred);
  const Eigen::MatrixXd L = llt.matrixL();

  MarginalLikelihood out;
  out.value = -0.5 * centred.dot(alpha) - L.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  // d/dtheta = 1/2 tr((alpha alpha^T - K^-1) dK/dtheta)
  const Eigen::MatrixXd W = alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
  const double l2 = params.length_scale * params.length_scale;
  double g_len = 0.0, g_sig = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d2 = squared_distance(samples[i].position, samples[j].position);
      const double k = params.signal_var * std::exp(-0.5 * d2 / l2);
      g_len += W(i, j) * k * d2 / l2;
      g_sig += W(i, j) * k;
    }
  out.gradient(0) = 0.5 * g_len;
  out.gradient(1) = 0.5 * g_sig;
  out.gradient(2) = 0.5 * params.noise_var * W.trace();
  return out;
}

DepthGp::DepthGp(std::vector<DepthSample> samples, const KernelParams& params)
    : samples_(std::move(samples)), params_(params) {
  if (samples_.empty()) throw ValidationError("a depth GP needs at least one sample");
  if (!(params.length_scale > 0.0) || !(params.signal_var > 0.0) || params.noise_var < 0.0)
    throw ValidationError("kernel parameters must be positive");
  offset_ = sample_mean(samples_);
  llt_ = factor(training_cov(samples_, params_));
  alpha_ = llt_.solve(centred_depths(samples_, offset_));
}

Eigen::VectorXd DepthGp::cross_cov(Vec2 p) const {
  Eigen::VectorXd k(static_cast<Eigen::Index>(samples_.size()));
  for (std::size_t i = 0; i < samples_.size(); ++i)
    k(static_cast<Eigen::Index>(i)) = se_kernel(params_, p, samples_[i].position);
  return k;
}

double DepthGp::mean(Vec2 p) const { return offset_ + cross_cov(p).dot(alpha_); }

double DepthGp::variance(Vec2 p) const {
  const Eigen::VectorXd v = llt_.matrixL().solve(cross_cov(p));
  return std::max(0.0, params_.signal_var - v.squaredNorm());
}

std::optional<double> DepthMap::mean_at(Vec2 p) const {
  const int i = static_cast<int>(std::floor((p.x - origin.x) / resolution));
  const int j = static_cast<int>(std::floor((p.y - origin.y) / resolution));
  if (i < 0 || j < 0 || i >= width || j >= height) return std::nullopt;
  const double v = mean[static_cast<std::size_t>(j) * width + i];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::optional<double> DepthMap::stddev_at(Vec2 p) const {
  const int i = static_cast<int>(std::floor((p.x - origin.x) / resolution));
  const int j = static_cast<int>(std::floor((p.y - origin.y) / resolution));
  if (i < 0 || j < 0 || i >= width || j >= height) return std::nullopt;
  const double v = stddev[static_cast<std::size_t>(j) * width + i];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

std::vector<DepthSample> canonical_order(std::vector<DepthSample> samples) {
  std::sort(samples.begin(), samples.end(), [](const DepthSample& a, const DepthSample& b) {
    if (a.position.x != b.position.x) return a.position.x < b.position.x;
    if (a.position.y != b.position.y) return a.position.y < b.position.y;
    return a.depth < b.depth;
  });
  return samples;
}

std::vector<DepthSample> thin_samples(const std::vector<DepthSample>& samples, double cell) {
  if (!(cell > 0.0)) throw ValidationError("thinning cell must be positive");
  struct Acc {
    Vec2 pos{};
    double depth = 0.0;
    int n = 0;
  };
  std::map<std::pair<long long, long long>, Acc> cells;
  for (const auto& s : canonical_order(samples)) {
    auto& a = cells[{static_cast<long long>(std::floor(s.position.x / cell)),
                     static_cast<long long>(std::floor(s.position.y / cell))}];
    a.pos = a.pos + s.position;
    a.depth += s.depth;
    ++a.n;
  }
  std::vector<DepthSample> out;
  out.reserve(cells.size());
  for (const auto& [key, a] : cells) out.push_back({a.pos / a.n, a.depth / a.n});
  return canonical_order(std::move(out));
}

KernelParams optimize_hyperparameters(const std::vector<DepthSample>& input, int restarts, std::uint64_t seed) {
  require_spread(input);
  std::vector<DepthSample> s = canonical_order(input);
  if (s.size() > kOptimizeSubset) {
    // Evenly strided subset of the canonical order.
    std::vector<DepthSample> sub;
    const double stride = static_cast<double>(s.size()) / kOptimizeSubset;
    for (std::size_t k = 0; k < kOptimizeSubset; ++k) sub.push_back(s[static_cast<std::size_t>(k * stride)]);
    s = std::move(sub);
  }
  const double mu = sample_mean(s);
  const Eigen::VectorXd y = centred_depths(s, mu);
  const double var = std::max(y.squaredNorm() / static_cast<double>(y.size()), 1e-6);
  const Bounds b = log_bounds(s, var);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  const Eigen::Vector3d base{(b.lo(0) + b.hi(0)) / 2 + std::log(0.05), std::log(var), std::log(var * 0.01)};

  Eigen::Vector3d best_theta = base;
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    Eigen::Vector3d theta = base;
    if (r > 0) theta += Eigen::Vector3d(jitter(rng), jitter(rng), 1.5 * jitter(rng));
    theta = theta.cwiseMax(b.lo).cwiseMin(b.hi);
    auto eval = [&](const Eigen::Vector3d& t, MarginalLikelihood& out) {
      try {
        out = log_marginal_likelihood(s, y, from_log(t));
        return std::isfinite(out.value);
      } catch (const ValidationError&) {
        return false;
      }
    };
    MarginalLikelihood cur;
    if (!eval(theta, cur)) continue;
    // BFGS on the negated likelihood, projected onto the box after each step.
    Eigen::Matrix3d H = Eigen::Matrix3d::Identity();
    for (int it = 0; it < 100; ++it) {
      Eigen::Vector3d dir = H * cur.gradient;
      if (dir.dot(cur.gradient) <= 0.0) {
        H.setIdentity();
        dir = cur.gradient;
      }
      if (dir.norm() > 2.0) dir *= 2.0 / dir.norm();
      double step = 1.0;
      Eigen::Vector3d trial;
      MarginalLikelihood next;
      bool moved = false;
      for (int ls = 0; ls < 30; ++ls, step *= 0.5) {
        trial = (theta + step * dir).cwiseMax(b.lo).cwiseMin(b.hi);
        if (eval(trial, next) && next.value >= cur.value + 1e-4 * (trial - theta).dot(cur.gradient)) {
          moved = true;
          break;
        }
      }
      if (!moved) break;
      const Eigen::Vector3d sk = trial - theta;
      const Eigen::Vector3d yk = cur.gradient - next.gradient;  // gradient of the negated objective
      const bool done = next.value - cur.value < 1e-10 * std::max(1.0, std::abs(cur.value)) || sk.norm() < 1e-8;
      const double sy = sk.dot(yk);
      if (sy > 1e-12) {
        const double rho = 1.0 / sy;
        const Eigen::Matrix3d I = Eigen::Matrix3d::Identity();
        H = (I - rho * sk * yk.transpose()) * H * (I - rho * yk * sk.transpose()) + rho * sk * sk.transpose();
      }
      theta = trial;
      cur = next;
      if (done) break;
    }
    if (cur.value > best) {
      best = cur.value;
      best_theta = theta;
    }
  }
  return from_log(best_theta);
}

DepthGp fit_depth_gp(std::vector<DepthSample> samples, const GpFitOptions& options, double map_resolution) {
  validate_samples(samples);
  if (samples.empty()) throw ValidationError("no depth samples");
  samples = canonical_order(std::move(samples));
  if (samples.size() > options.max_exact) {
    double cell = options.thin_cell;
    if (!(cell > 0.0)) {
      cell = map_resolution > 0.0 ? map_resolution : 1.0;
      while (thin_samples(samples, cell).size() > options.max_exact) cell *= 2.0;
    }
    samples = thin_samples(samples, cell);
    if (samples.size() > options.max_exact)
      throw ValidationError("thinning cell leaves more samples than the exact-GP limit");
  }
  if (options.params) return DepthGp(std::move(samples), *options.params);
  const KernelParams p = optimize_hyperparameters(samples, options.restarts, options.seed);
  return DepthGp(std::move(samples), p);
}

DepthMap predict_depth_map(const RiverMap& map, const DepthGp& gp) {
  DepthMap out;
  out.width = map.width();
  out.height = map.height();
  out.resolution = map.resolution();
  out.origin = map.origin();
  out.params = gp.params();
  out.samples_used = gp.samples().size();
  const std::size_t n = static_cast<std::size_t>(out.width) * out.height;
  out.mean.assign(n, std::numeric_limits<double>::quiet_NaN());
  out.stddev.assign(n, std::numeric_limits<double>::quiet_NaN());
  for (int j = 0; j < map.height(); ++j)
    for (int i = 0; i < map.width(); ++i) {
      if (!map.is_free(i, j)) continue;
      const Vec2 p = map.cell_center(i, j);
      out.mean[static_cast<std::size_t>(j) * out.width + i] = gp.mean(p);
      out.stddev[static_cast<std::size_t>(j) * out.width + i] = std::sqrt(gp.variance(p));
    }
  const double mu = sample_mean(gp.samples());
  out.log_marginal_likelihood =
      log_marginal_likelihood(gp.samples(), centred_depths(gp.samples(), mu), gp.params()).value;
  return out;
}

double rmse(const DepthGp& gp, const std::vector<DepthSample>& held_out) {
  if (held_out.empty()) throw ValidationError("rmse needs at least one held-out sample");
  double sum = 0.0;
  for (const auto& s : held_out) {
    const double e = gp.mean(s.position) - s.depth;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(held_out.size()));
}

double rmse(const DepthMap& map, const std::vector<DepthSample>& held_out) {
  if (held_out.empty()) throw ValidationError("rmse needs at least one held-out sample");
  double sum = 0.0;
  for (const auto& s : held_out) {
    const auto m = map.mean_at(s.position);
    if (!m) throw ValidationError("held-out sample lies outside the depth map");
    sum += (*m - s.depth) * (*m - s.depth);
  }
  return std::sqrt(sum / static_cast<double>(held_out.size()));
}

double kfold_rmse(const std::vector<DepthSample>& samples, int folds, const GpFitOptions& options,
                  double map_resolution) {
  if (folds < 2) throw ValidationError("k-fold needs at least 2 folds");
  const std::vector<DepthSample> s = canonical_order(samples);
  if (s.size() < static_cast<std::size_t>(folds)) throw ValidationError("fewer samples than folds");
  std::vector<std::size_t> order(s.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::mt19937_64 rng(options.seed);
  // Fisher-Yates with explicit draws so the folds do not depend on the library's shuffle.
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng() % k]);

  double sum = 0.0;
  for (int f = 0; f < folds; ++f) {
    std::vector<DepthSample> train, test;
    for (std::size_t k = 0; k < order.size(); ++k) (static_cast<int>(k % folds) == f ? test : train).push_back(s[order[k]]);
    const DepthGp gp = fit_depth_gp(train, options, map_resolution);
    for (const auto& t : test) {
      const double e = gp.mean(t.position) - t.depth;
      sum += e * e;
    }
  }
  return std::sqrt(sum / static_cast<double>(s.size()));
}

std::string to_esri_ascii(const DepthMap& map, DepthLayer layer) {
  const auto& v = layer == DepthLayer::Mean ? map.mean : map.stddev;
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "ncols %d\n", map.width);
  out += buf;
  std::snprintf(buf, sizeof buf, "nrows %d\n", map.height);
  out += buf;
  std::snprintf(buf, sizeof buf, "xllcorner %.3f\n", map.origin.x);
  out += buf;
  std::snprintf(buf, sizeof buf, "yllcorner %.3f\n", map.origin.y);
  out += buf;
  std::snprintf(buf, sizeof buf, "cellsize %.3f\n", map.resolution);
  out += buf;
  out += "NODATA_value -9999\n";
  for (int j = map.height - 1; j >= 0; --j) {
    for (int i = 0; i < map.width; ++i) {
      const double x = v[static_cast<std::size_t>(j) * map.width + i];
      if (i) out += ' ';
      if (std::isnan(x)) {
        out += "-9999";
      } else {
        std::snprintf(buf, sizeof buf, "%.3f", x);
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

std::vector<DepthSample> read_depth_csv(const std::string& text) {
  std::vector<DepthSample> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line[line.find_first_not_of(" \t")] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x, y, d;
    if (!(row >> x >> y >> d)) {
      if (out.empty() && lineno == 1) continue;  // header
      throw ValidationError("depth CSV line " + std::to_string(lineno) + ": expected x,y,depth");
    }
    out.push_back({{x, y}, d});
  }
  if (out.empty()) throw ValidationError("depth CSV has no samples");
  return out;
}

std::vector<DepthSample> read_depth_gpx(const std::string& text, const GeoReference& geo) {
  static const std::regex point(R"(<(trkpt|wpt)\b([^>]*)>([\s\S]*?)</\1>)");
  static const std::regex lat(R"re(\blat\s*=\s*"([^"]+)")re");
  static const std::regex lon(R"re(\blon\s*=\s*"([^"]+)")re");
  static const std::regex depth(R"(<(?:\w+:)?[Dd]epth>\s*([-+0-9.eE]+)\s*</)");
  std::vector<DepthSample> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), point); it != std::sregex_iterator(); ++it) {
    const std::string attrs = (*it)[2], body = (*it)[3];
    std::smatch a, o, d;
    if (!std::regex_search(body, d, depth)) continue;
    if (!std::regex_search(attrs, a, lat) || !std::regex_search(attrs, o, lon))
      throw ValidationError("GPX point without lat/lon");
    try {
      const Vec2 p = geo.from_latlon({std::stod(a[1]), std::stod(o[1])});
      out.push_back({p, std::stod(d[1])});
    } catch (const std::logic_error&) {
      throw ValidationError("GPX point with a malformed number");
    }
  }
  if (out.empty()) throw ValidationError("GPX has no points with depth");
  return out;
}

}  // namespace rivercover
