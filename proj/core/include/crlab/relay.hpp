#pragma once

// Frame decoding rates for decode-and-forward, amplify-and-forward and
// direct-link transmission over exponentially faded links.

namespace crlab::relay {

/// One transmitter -> relay -> receiver triple. Powers and noise in watts.
struct RelayLink {
  double p_s = 0.01;         ///< transmitter power
  double p_r = 0.01;         ///< relay power
  double noise_relay = 1.0;  ///< noise power at the relay
  double noise_dest = 1.0;   ///< noise power at the receiver
  double mean_g0 = 1.0;      ///< mean power gain, transmitter -> receiver
  double mean_g1 = 1.0;      ///< mean power gain, transmitter -> relay
  double mean_g2 = 1.0;      ///< mean power gain, relay -> receiver
  double kappa = 1.0;        ///< SNR decoding threshold (linear)

  /// Throws DomainError unless every field is positive and finite.
  void validate() const;
};

/// P{both hops reach SNR kappa}.
double decoding_rate_df(const RelayLink& link);

/// Absolute error bound requested from the AF quadrature.
inline constexpr double kAfQuadratureTolerance = 1e-6;

/// P{end-to-end amplify-and-forward SNR >= kappa}, by adaptive
/// Gauss-Kronrod quadrature over the first-hop gain. Throws NumericError when
/// the error estimate exceeds kAfQuadratureTolerance.
double decoding_rate_af(const RelayLink& link);

/// P{direct-link SNR >= kappa}.
double decoding_rate_dl(const RelayLink& link);

/// End-to-end SNR of an amplify-and-forward hop pair for given power gains.
double af_snr(const RelayLink& link, double g1, double g2);

}  // namespace crlab::relay
