// Walk through the lens space L(3) with a nontrivial character: spectrum,
// eta by both engines, rho, and what happens as the flux is turned up.

#include <cstdio>

#include "twisted_dirac/twisted_dirac.hpp"

using namespace twisted_dirac;

int main() {
  const SpectralModel lens{Lens{3, 1.0}, LensCharacter{3, 1}, 0.0};

  const Spectrum low = enumerate_spectrum(lens, 6);
  std::printf("lowest levels of L(3), character 1:\n");
  for (const auto& e : low.items) std::printf("  %+8.4f  x%lld\n", e.value, static_cast<long long>(e.multiplicity));

  EngineOptions heat;
  heat.method = EtaMethod::heat_kernel;
  const EtaValue a = compute_eta(lens, EngineOptions{});
  const EtaValue b = compute_eta(lens, heat);
  std::printf("eta: hurwitz %.12f, heat %.12f (+- %.1e)\n", a.eta, b.eta, b.error_bound);
  std::printf("rho: %.12f\n", rho(lens, EngineOptions{}).rho);

  std::printf("\nflux sweep (t, eta, sf from t = 0, rho):\n");
  for (double t : {0.0, 0.5, 1.0, 1.6, 2.4}) {
    const SpectralModel m = lens.with_flux(t);
    const auto prog = progression_spectrum(m);
    const EtaValue e = eta_hurwitz(prog);
    const auto flow = sf_affine(affine_path_from_model(m)).flow;
    std::printf("  %4.1f  %+.10f  %+lld  %+.10f\n", t, e.eta, static_cast<long long>(flow), rho(m, EngineOptions{}).rho);
  }
  return 0;
}
