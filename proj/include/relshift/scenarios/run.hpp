#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "relshift/greop/deviation.hpp"
#include "relshift/parallel.hpp"
#include "relshift/qkd.hpp"
#include "relshift/redshift.hpp"
#include "relshift/scenarios/config.hpp"

namespace relshift::scenarios {

struct ResultRow {
  double t_e = 0.0;
  bool los = false;
  double z_long_exact = 0.0;
  double z_long0 = 0.0;
  double z_ret = 0.0;
  double z_rel0 = 0.0;
  double z_corr = 0.0;
  double z_total = 0.0;
  std::optional<double> gamma;
  std::optional<double> eta;
  std::optional<double> plob_bits;
  std::optional<double> z_gr;
  std::optional<double> deviation;
  std::string error;

  bool operator==(const ResultRow&) const = default;
};

/// Epochs the run evaluates: the regular grid, plus transit epochs when requested for GR engines.
inline std::vector<double> scenario_epochs(const ScenarioConfig& cfg) {
  std::vector<double> epochs = cfg.epochs();
  if (cfg.engine != Engine::Analytic && cfg.de.refine_transits) {
    const auto extra = greop::occluded_transit_epochs(cfg.link(), epochs, cfg.de.transit_step);
    epochs.insert(epochs.end(), extra.begin(), extra.end());
    std::sort(epochs.begin(), epochs.end());
    epochs.erase(std::unique(epochs.begin(), epochs.end()), epochs.end());
  }
  return epochs;
}

/// One row per epoch. Failing epochs produce rows carrying the error message.
/// Capacity uses the analytic shift, except for engine=gr where the GR shift
/// replaces the total (uncorrected) or has the compensated instantaneous
/// Doppler part removed (corrected).
inline std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  const Link link = cfg.link();
  const SignalSpec spec = cfg.signal_spec();
  const std::vector<double> epochs = scenario_epochs(cfg);
  std::vector<ResultRow> rows(epochs.size());

  parallel_blocks(epochs.size(), 256, workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ResultRow& r = rows[i];
      r.t_e = epochs[i];
      try {
        const ShiftBreakdown b = shift_breakdown(link, r.t_e);
        r.los = b.los;
        r.z_long_exact = b.z_long_exact;
        r.z_long0 = b.z_long0;
        r.z_ret = b.z_ret;
        r.z_rel0 = b.z_rel0;
        r.z_corr = b.z_corr;
        r.z_total = b.z_total;
      } catch (const std::exception& e) {
        r.error = std::string("epoch ") + std::to_string(r.t_e) + ": " + e.what();
      }
    }
  });

  if (cfg.engine != Engine::Analytic) {
    const greop::GrEngine engine(link, epochs.front(), epochs.back(), cfg.gr_options());
    const auto gr = engine.sweep(epochs, workers);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      ResultRow& r = rows[i];
      if (!gr[i].ok()) {
        if (r.error.empty()) r.error = "epoch " + std::to_string(r.t_e) + ": " + gr[i].error;
        continue;
      }
      r.z_gr = gr[i].z_gr;
      if (cfg.engine == Engine::Both && r.error.empty()) r.deviation = *r.z_gr - r.z_total;
    }
  }

  for (ResultRow& r : rows) {
    if (!r.error.empty() || !r.los) continue;
    double z = cfg.correction == CorrectionMode::Corrected ? r.z_corr : r.z_total;
    if (cfg.engine == Engine::Gr) {
      if (!r.z_gr) continue;
      z = cfg.correction == CorrectionMode::Corrected ? *r.z_gr - (r.z_total - r.z_corr) : *r.z_gr;
    }
    try {
      const CapacitySample s = capacity_at(r.t_e, z, r.los, spec);
      r.gamma = s.gamma;
      r.eta = s.eta;
      r.plob_bits = s.plob_bits;
    } catch (const std::exception& e) {
      r.error = "epoch " + std::to_string(r.t_e) + ": " + e.what();
    }
  }
  return rows;
}

}  // namespace relshift::scenarios
