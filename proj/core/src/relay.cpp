#include "crlab/relay.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>
#include <vector>

#include "crlab/channel.hpp"
#include "crlab/error.hpp"

namespace crlab::relay {
namespace {

using channel::FadingModel;
using channel::gain_ccdf;

// The first-hop density weight exp(-x/m)/m drops below 1e-12 past m*ln(1e12).
constexpr double kTailWeight = 1e-12;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string("relay link ") + name + " must be positive and finite");
  }
}

}  // namespace

void RelayLink::validate() const {
  require_positive(p_s, "p_s");
  require_positive(p_r, "p_r");
  require_positive(noise_relay, "noise_relay");
  require_positive(noise_dest, "noise_dest");
  require_positive(mean_g0, "mean_g0");
  require_positive(mean_g1, "mean_g1");
  require_positive(mean_g2, "mean_g2");
  require_positive(kappa, "kappa");
}

double decoding_rate_df(const RelayLink& link) {
  link.validate();
  return gain_ccdf(FadingModel{link.mean_g1}, link.noise_relay * link.kappa / link.p_s) *
         gain_ccdf(FadingModel{link.mean_g2}, link.noise_dest * link.kappa / link.p_r);
}

double decoding_rate_af(const RelayLink& link) {
  link.validate();
  const FadingModel g2{link.mean_g2};
  const double m1 = link.mean_g1;
  auto integrand = [&](double x) {
    if (x <= 0.0) return 0.0;
    const double threshold =
        (link.p_s * x + link.noise_relay) * link.noise_dest * link.kappa / (link.p_s * link.p_r * x);
    return gain_ccdf(g2, threshold) * std::exp(-x / m1) / m1;
  };
  const double upper = m1 * std::log(1.0 / kTailWeight);

  // The integrand rises from zero near x ~ scale, which gets very narrow for
  // strong relays; integrate piecewise over geometrically spaced breakpoints.
  const double scale = link.noise_relay * link.noise_dest * link.kappa / (link.p_s * link.p_r * link.mean_g2);
  std::vector<double> cuts{0.0};
  for (double c = std::max(scale * 1e-2, upper * 1e-16); c < upper; c *= 10.0) cuts.push_back(c);
  cuts.push_back(upper);

  double value = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e = 0.0;
    value += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, cuts[i], cuts[i + 1], 8,
                                                                           1e-10, &e);
    error += e;
  }
  if (!std::isfinite(value) || error > kAfQuadratureTolerance) {
    throw NumericError("AF decoding-rate quadrature did not converge (error estimate " +
                       std::to_string(error) + ")");
  }
  return std::clamp(value, 0.0, 1.0);
}

double decoding_rate_dl(const RelayLink& link) {
  link.validate();
  return gain_ccdf(FadingModel{link.mean_g0}, link.noise_dest * link.kappa / link.p_s);
}

double af_snr(const RelayLink& link, double g1, double g2) {
  return link.p_r / (g1 * link.p_s + link.noise_relay) * link.p_s * g1 * g2 / link.noise_dest;
}

}  // namespace crlab::relay
