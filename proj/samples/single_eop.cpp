// Solves one emitter-observer problem in Schwarzschild spacetime between a
// LEO satellite and an eccentric geosynchronous satellite and compares the
// redshift with the analytic total.

#include <cstdio>

#include "relshift/relshift.hpp"

int main() {
  using namespace relshift;
  using namespace relshift::greop;
  const scenarios::ScenarioConfig cfg = scenarios::preset("fig6-leo-geosync-e0.4");
  const Link link = cfg.link();
  const double t_e = 600.0;

  const GrEngine engine(link, 0.0, t_e, cfg.gr_options());
  const GrEpoch gr = engine.solve(t_e, 0);
  const ShiftBreakdown b = shift_breakdown(link, t_e);

  std::printf("emission at t = %.1f s\n", t_e);
  std::printf("closest approach   %.3e m after %zu generations (%zu rays)\n", gr.closest_distance, gr.generations,
              gr.evaluations);
  std::printf("light time         %.9f s\n", gr.delay);
  std::printf("z (Schwarzschild)  %.15e\n", gr.z_gr);
  std::printf("z (analytic)       %.15e\n", b.z_total);
  std::printf("difference         %.3e\n", gr.z_gr - b.z_total);
}
