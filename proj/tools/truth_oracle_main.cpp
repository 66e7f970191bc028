// Prints brute-force Monte Carlo estimates of the Ishigami and g-function
// truths with standard errors, for comparison with the frozen constants.
//
//   truth-oracle [draws] [seed]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "truth_oracle.hpp"

namespace {

void print(const char* name, const truth_oracle::OracleResult& r) {
  std::printf("%s (draws=%zu)\n", name, r.draws);
  std::printf("  psi = %.10f +/- %.2e\n", r.psi, r.se_psi);
  std::printf("  mu  = %.10f +/- %.2e\n", r.mu, r.se_mu);
  std::printf("  m2  = %.10f +/- %.2e\n", r.m2, r.se_m2);
  std::printf("  S   = %.10f +/- %.2e\n", r.s, r.se_s);
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t draws = argc > 1 ? std::stoull(argv[1]) : 10'000'000;
  const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 20240501;
  print("ishigami(a=7, b=0.1)", truth_oracle::ishigami(draws, seed));
  print("g_function(0,1,4.5,9,99,99,99,99)",
        truth_oracle::g_function(draws, seed + 1, {0.0, 1.0, 4.5, 9.0, 99.0, 99.0, 99.0, 99.0}));
  return EXIT_SUCCESS;
}
