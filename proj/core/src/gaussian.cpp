#include "sigconc/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <cmath>
#include <optional>

#include "sigconc/errors.hpp"
#include "sigconc/io.hpp"
#include "sigconc/parallel.hpp"
#include "sigconc/rng.hpp"

namespace sigconc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<double> fbm_increment_factor(double hurst, const SampleGrid& grid) {
  const int n = grid.n_steps;
  const double h2 = 2.0 * hurst;
  const double scale = 0.5 * std::pow(grid.step(), h2);
  auto gamma = [&](int lag) {
    const double k = std::abs(static_cast<double>(lag));
    return scale * (std::pow(k + 1.0, h2) + std::pow(std::abs(k - 1.0), h2) - 2.0 * std::pow(k, h2));
  };
  Eigen::MatrixXd cov(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cov(i, j) = gamma(i - j);

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    cov.diagonal().array() += 1e-12 * cov.trace();
    llt.compute(cov);
    if (llt.info() != Eigen::Success)
      throw NumericError("Cholesky factorization failed for fBm(H=" + io::format_double(hurst) +
                         ") on grid n_steps=" + std::to_string(n) + ", T=" + io::format_double(grid.horizon));
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  std::vector<double> packed;
  packed.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) packed.push_back(lower(i, j));
  return packed;
}

}  // namespace

void GaussianModel::validate() const {
  if (dim < 1) throw DomainError("model.d must be >= 1");
  std::visit(overloaded{
                 [](const BrownianMotion&) {},
                 [](const FractionalBrownianMotion& f) {
                   if (!(f.hurst > 0.0 && f.hurst < 1.0)) throw DomainError("model.hurst must lie in (0,1)");
                 },
                 [](const OrnsteinUhlenbeck& o) {
                   if (!(o.theta > 0.0)) throw DomainError("model.theta must be positive");
                 },
             },
             kind);
}

std::vector<std::string> GaussianModel::warnings() const {
  std::vector<std::string> out;
  if (const auto* f = std::get_if<FractionalBrownianMotion>(&kind); f && f->hurst <= 0.25)
    out.push_back("hurst <= 1/4: outside the range where a geometric rough-path lift is guaranteed");
  return out;
}

double GaussianModel::rho() const {
  if (const auto* f = std::get_if<FractionalBrownianMotion>(&kind)) return 1.0 / (2.0 * f->hurst);
  return 1.0;
}

std::string GaussianModel::name() const {
  return std::visit(overloaded{
                        [](const BrownianMotion&) -> std::string { return "bm"; },
                        [](const FractionalBrownianMotion& f) -> std::string {
                          return "fbm(H=" + io::format_double(f.hurst) + ")";
                        },
                        [](const OrnsteinUhlenbeck& o) -> std::string {
                          return std::string("ou(theta=") + io::format_double(o.theta) +
                                 (o.start == OuStart::Zero ? ",zero)" : ",stationary)");
                        },
                    },
                    kind);
}

double covariance(const GaussianModel& model, double s, double t) {
  if (s < 0.0 || t < 0.0) throw DomainError("covariance: times must be non-negative");
  const double lo = std::min(s, t);
  return std::visit(overloaded{
                        [&](const BrownianMotion&) { return lo; },
                        [&](const FractionalBrownianMotion& f) {
                          const double h2 = 2.0 * f.hurst;
                          return 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(t - s), h2));
                        },
                        [&](const OrnsteinUhlenbeck& o) {
                          const double base = std::exp(-o.theta * std::abs(t - s)) / (2.0 * o.theta);
                          if (o.start == OuStart::Stationary) return base;
                          return base * (1.0 - std::exp(-2.0 * o.theta * lo));
                        },
                    },
                    model.kind);
}

void SampleGrid::validate() const {
  if (n_steps < 1) throw DomainError("grid.n_steps must be >= 1");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("grid.horizon must be positive");
}

PathSampler::PathSampler(GaussianModel model, SampleGrid grid) : model_(std::move(model)), grid_(grid) {
  model_.validate();
  grid_.validate();
  if (const auto* f = std::get_if<FractionalBrownianMotion>(&model_.kind)) {
    if (grid_.n_steps > kMaxFbmSteps)
      throw DomainError("grid.n_steps exceeds the fBm cap of " + std::to_string(kMaxFbmSteps));
    factor_ = fbm_increment_factor(f->hurst, grid_);
  }
}

void PathSampler::sample_values(SeedSpec seed, std::uint64_t index, std::span<double> out) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n_steps);
  const std::size_t d = static_cast<std::size_t>(model_.dim);
  if (out.size() != (n + 1) * d) throw DomainError("sample_values: output buffer has wrong size");
  RandomStream rng(seed.master_seed, index);
  const double dt = grid_.step();

  std::visit(overloaded{
                 [&](const BrownianMotion&) {
                   const double sd = std::sqrt(dt);
                   for (std::size_t c = 0; c < d; ++c) {
                     out[c] = 0.0;
                     for (std::size_t k = 1; k <= n; ++k) out[k * d + c] = out[(k - 1) * d + c] + sd * rng.normal();
                   }
                 },
                 [&](const FractionalBrownianMotion&) {
                   std::vector<double> z(n);
                   for (std::size_t c = 0; c < d; ++c) {
                     for (auto& v : z) v = rng.normal();
                     out[c] = 0.0;
                     const double* row = factor_.data();
                     for (std::size_t i = 0; i < n; ++i) {
                       double inc = 0.0;
                       for (std::size_t j = 0; j <= i; ++j) inc += row[j] * z[j];
                       row += i + 1;
                       out[(i + 1) * d + c] = out[i * d + c] + inc;
                     }
                   }
                 },
                 [&](const OrnsteinUhlenbeck& o) {
                   const double decay = std::exp(-o.theta * dt);
                   const double sd = std::sqrt(-std::expm1(-2.0 * o.theta * dt) / (2.0 * o.theta));
                   const double stationary_sd = std::sqrt(1.0 / (2.0 * o.theta));
                   for (std::size_t c = 0; c < d; ++c) {
                     out[c] = o.start == OuStart::Stationary ? stationary_sd * rng.normal() : 0.0;
                     for (std::size_t k = 1; k <= n; ++k) out[k * d + c] = decay * out[(k - 1) * d + c] + sd * rng.normal();
                   }
                 },
             },
             model_.kind);
}

Path PathSampler::sample(SeedSpec seed, std::uint64_t index) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n_steps);
  std::vector<double> values((n + 1) * static_cast<std::size_t>(model_.dim));
  sample_values(seed, index, values);
  std::vector<double> times(n + 1);
  for (std::size_t i = 0; i <= n; ++i) times[i] = grid_.time(static_cast<int>(i));
  return Path(std::move(times), std::move(values), model_.dim);
}

std::vector<Path> sample_paths(const GaussianModel& model, const SampleGrid& grid, std::size_t count, SeedSpec seed,
                               unsigned threads) {
  if (count < 1) throw DomainError("count must be >= 1");
  const PathSampler sampler(model, grid);
  std::vector<std::optional<Path>> slots(count);
  parallel_for(count, threads, [&](std::size_t i) { slots[i].emplace(sampler.sample(seed, i)); });
  std::vector<Path> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace sigconc
