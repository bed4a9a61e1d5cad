// Prints the shift breakdown and key capacity of a ground-to-geosynchronous
// uplink at a few epochs of the first day.

#include <cstdio>

#include "relshift/relshift.hpp"

int main() {
  using namespace relshift;
  const scenarios::ScenarioConfig cfg = scenarios::preset("fig3-geosync-e0.4");
  const Link link = cfg.link();
  const SignalSpec spec = cfg.signal_spec();

  std::printf("%10s %14s %14s %14s %10s\n", "t [s]", "z_ret", "z_rel0", "z_corr", "PLOB");
  for (double t = 0.0; t <= 86400.0; t += 7200.0) {
    const ShiftBreakdown b = shift_breakdown(link, t);
    if (!b.los) {
      std::printf("%10.0f   no line of sight\n", t);
      continue;
    }
    const CapacitySample c = capacity_at(t, b.z_corr, b.los, spec);
    std::printf("%10.0f %14.6e %14.6e %14.6e %10.6f\n", t, b.z_ret, b.z_rel0, b.z_corr, *c.plob_bits);
  }
}
