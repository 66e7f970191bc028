#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sobol_eff/core.hpp"

namespace sobol_eff {

/// Paired draws (Y_i, Y_i^X): Y_i^X reuses the input X_i with fresh noise.
///
/// The pairing is trusted as given; exchangeability of (Y, Y^X) is a property
/// of the sampling design and is not tested on user data.
class PickFreezeSample {
 public:
  /// Throws InvalidArgument unless both arrays have the same length n >= 2
  /// and every entry is finite.
  PickFreezeSample(std::vector<double> y, std::vector<double> y_pf);

  std::span<const double> y() const { return y_; }
  std::span<const double> y_pf() const { return y_pf_; }
  std::size_t size() const { return y_.size(); }

 private:
  std::vector<double> y_;
  std::vector<double> y_pf_;
};

/// Efficient influence values of E[Y Y^X], E[Y] and E[Y^2] at one pair.
struct PfInfluenceTriple {
  double if_psi = 0.0;
  double if_mu = 0.0;
  double if_m2 = 0.0;
};

/// Symmetrized empirical moments:
///   psi = mean(Y Y^X), mu = mean((Y + Y^X) / 2), m2 = mean((Y^2 + (Y^X)^2) / 2).
/// Every per-row term is symmetric in the pair, so swapping the two arrays
/// gives bit-identical results.
MomentVector empirical_moments_pf(const PickFreezeSample& s);

PfInfluenceTriple pf_influence_triple(double y1, double y2, const MomentVector& m);

/// grad(phi)(m) . pf_influence_triple(y1, y2, m).
double pf_sobol_influence(double y1, double y2, const MomentVector& m);

/// Influence values of S^X at every pair of the sample, evaluated at `m`.
std::vector<double> pf_sobol_influence_values(const PickFreezeSample& s,
                                              const MomentVector& m);

SobolEstimate estimate_sobol_pf(const PickFreezeSample& s,
                                const ConfidenceConfig& cfg = {});

}  // namespace sobol_eff
