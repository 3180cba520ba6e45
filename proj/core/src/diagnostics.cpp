#include "bnn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bnn/error.hpp"

namespace bnn {

double acceptance_rate(const Chain& chain) {
  if (chain.n_proposed == 0) {
    throw InvalidInput("acceptance rate undefined: no proposals");
  }
  return static_cast<double>(chain.n_accepted) /
         static_cast<double>(chain.n_proposed);
}

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // 1/N
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  for (double v : x) m.var += (v - m.mean) * (v - m.mean);
  m.var /= static_cast<double>(x.size());
  return m;
}

double autocovariance(std::span<const double> x, double mean, std::size_t lag) {
  const std::size_t n = x.size();
  double s = 0.0;
  for (std::size_t i = 0; i + lag < n; ++i) s += (x[i] - mean) * (x[i + lag] - mean);
  return s / static_cast<double>(n);
}

}  // namespace

std::vector<double> autocorrelation(std::span<const double> series,
                                    std::size_t max_lag) {
  if (series.empty()) throw InvalidInput("autocorrelation of an empty series");
  const auto m = moments(series);
  std::vector<double> rho(max_lag + 1, 0.0);
  rho[0] = 1.0;
  if (m.var <= 0.0) return rho;
  for (std::size_t t = 1; t <= max_lag && t < series.size(); ++t) {
    rho[t] = autocovariance(series, m.mean, t) / m.var;
  }
  return rho;
}

EssResult ess(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < kMinEssSamples) {
    throw InvalidInput("ESS needs >= " + std::to_string(kMinEssSamples) +
                       " samples, got " + std::to_string(n));
  }
  const auto m = moments(series);
  if (!(m.var > 0.0)) return {1.0, true};

  // tau = -1 + 2 * sum_k Gamma_k, Gamma_k = rho_{2k} + rho_{2k+1}.
  double pair_sum = 0.0;
  for (std::size_t k = 0; 2 * k + 1 < n; ++k) {
    const double rho_even =
        k == 0 ? 1.0 : autocovariance(series, m.mean, 2 * k) / m.var;
    const double rho_odd = autocovariance(series, m.mean, 2 * k + 1) / m.var;
    const double gamma = rho_even + rho_odd;
    if (gamma < 0.0) break;
    pair_sum += gamma;
  }
  const double tau = -1.0 + 2.0 * pair_sum;
  const double nd = static_cast<double>(n);
  double value = tau > 0.0 ? nd / tau : nd;
  value = std::clamp(value, 1.0, nd);
  return {value, false};
}

RhatResult split_rhat(std::span<const std::vector<double>> chains) {
  if (chains.empty()) throw InvalidInput("split R-hat needs >= 1 chain");
  const std::size_t n = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != n) throw InvalidInput("split R-hat chains differ in length");
  }
  if (n < 4) throw InvalidInput("split R-hat needs chains of length >= 4");
  const std::size_t half = n / 2;

  std::vector<double> means;
  std::vector<double> vars;
  for (const auto& c : chains) {
    for (int part = 0; part < 2; ++part) {
      const std::size_t start = part == 0 ? 0 : n - half;
      std::span<const double> seg(c.data() + start, half);
      double mean = 0.0;
      for (double v : seg) mean += v;
      mean /= static_cast<double>(half);
      double var = 0.0;
      for (double v : seg) var += (v - mean) * (v - mean);
      var /= static_cast<double>(half - 1);
      means.push_back(mean);
      vars.push_back(var);
    }
  }
  const double m = static_cast<double>(means.size());
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= m;
  double b_over_n = 0.0;
  for (double v : means) b_over_n += (v - grand) * (v - grand);
  b_over_n /= (m - 1.0);
  double w = 0.0;
  for (double v : vars) w += v;
  w /= m;

  const double nh = static_cast<double>(half);
  if (!(w > 0.0)) {
    return {b_over_n > 0.0 ? std::numeric_limits<double>::infinity() : 1.0,
            true};
  }
  return {std::sqrt((nh - 1.0) / nh + b_over_n / w), false};
}

ChainDiagnostics diagnose_chain(const Chain& chain) {
  ChainDiagnostics d;
  if (chain.n_proposed > 0) {
    d.acceptance_rate = acceptance_rate(chain);
    d.divergence_rate = static_cast<double>(chain.n_divergent) /
                        static_cast<double>(chain.n_proposed);
  } else {
    d.acceptance_rate = std::numeric_limits<double>::quiet_NaN();
    d.divergence_rate = std::numeric_limits<double>::quiet_NaN();
  }
  d.dims.resize(chain.dim);
  for (std::size_t k = 0; k < chain.dim; ++k) {
    const auto x = chain.coordinate(k);
    auto& s = d.dims[k];
    if (!x.empty()) {
      const auto mo = moments(x);
      s.mean = mo.mean;
      s.sd = x.size() > 1
                 ? std::sqrt(mo.var * static_cast<double>(x.size()) /
                             static_cast<double>(x.size() - 1))
                 : 0.0;
    }
    if (x.size() >= kMinEssSamples) s.ess = ess(x);
  }
  return d;
}

std::vector<RhatResult> split_rhat_per_dim(std::span<const Chain> chains) {
  if (chains.empty()) throw InvalidInput("no chains");
  const std::size_t dim = chains.front().dim;
  for (const auto& c : chains) {
    if (c.dim != dim) throw InvalidInput("chains differ in dimension");
  }
  std::vector<RhatResult> out(dim);
  std::vector<std::vector<double>> series(chains.size());
  for (std::size_t k = 0; k < dim; ++k) {
    for (std::size_t c = 0; c < chains.size(); ++c) {
      series[c] = chains[c].coordinate(k);
    }
    out[k] = split_rhat(series);
  }
  return out;
}

}  // namespace bnn
