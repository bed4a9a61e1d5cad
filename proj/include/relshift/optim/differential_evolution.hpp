#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace relshift::optim {

template <std::size_t D>
using Point = std::array<double, D>;

template <std::size_t D>
struct Box {
  Point<D> lo{};
  Point<D> hi{};

  bool contains(const Point<D>& p) const {
    for (std::size_t i = 0; i < D; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
};

struct DeConfig {
  std::size_t population = 20;
  double mutation = 0.7;
  double crossover = 0.9;
  std::size_t max_generations = 300;
  double target = 0.0;  // stop once the best value drops below this
  std::uint64_t seed = 0;
};

template <std::size_t D>
struct DeResult {
  Point<D> best{};
  double value = std::numeric_limits<double>::infinity();
  std::size_t generations = 0;
  std::size_t evaluations = 0;
  bool converged = false;
  Box<D> final_box{};
};

/// Identity rebox policy.
struct KeepBox {
  template <std::size_t D>
  Box<D> operator()(const Point<D>&, double, const Box<D>& box) const {
    return box;
  }
};

/// DE/rand/1/bin minimiser. After every generation rebox(best, value, box)
/// may return a new search box; members falling outside it are redrawn.
/// An optional initial point replaces the first random member.
template <std::size_t D, class Objective, class Rebox = KeepBox>
DeResult<D> differential_evolution(Objective&& f, Box<D> box, const DeConfig& cfg, Rebox&& rebox = {},
                                   std::optional<Point<D>> initial = {}) {
  if (cfg.population < 4) throw std::invalid_argument("population must hold at least 4 members");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, cfg.population - 1);
  std::uniform_int_distribution<std::size_t> pick_dim(0, D - 1);

  DeResult<D> res;
  auto evaluate = [&](const Point<D>& p) {
    ++res.evaluations;
    const double v = f(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  auto draw = [&](const Box<D>& b) {
    Point<D> p;
    for (std::size_t i = 0; i < D; ++i) p[i] = b.lo[i] + unit(rng) * (b.hi[i] - b.lo[i]);
    return p;
  };

  std::vector<Point<D>> pop(cfg.population);
  std::vector<double> val(cfg.population);
  std::size_t best = 0;
  auto finish = [&](bool converged) {
    res.best = pop[best];
    res.value = val[best];
    res.converged = converged;
    res.final_box = box;
    return res;
  };

  for (std::size_t i = 0; i < cfg.population; ++i) {
    pop[i] = (i == 0 && initial && box.contains(*initial)) ? *initial : draw(box);
    val[i] = evaluate(pop[i]);
    if (val[i] < val[best]) best = i;
    if (val[best] < cfg.target) return finish(true);
  }

  std::vector<Point<D>> next = pop;
  std::vector<double> next_val = val;
  for (res.generations = 1; res.generations <= cfg.max_generations; ++res.generations) {
    for (std::size_t i = 0; i < cfg.population; ++i) {
      std::size_t a, b, c;
      do a = pick(rng); while (a == i);
      do b = pick(rng); while (b == i || b == a);
      do c = pick(rng); while (c == i || c == a || c == b);
      const std::size_t forced = pick_dim(rng);
      Point<D> trial = pop[i];
      for (std::size_t k = 0; k < D; ++k) {
        if (k != forced && unit(rng) >= cfg.crossover) continue;
        double v = pop[a][k] + cfg.mutation * (pop[b][k] - pop[c][k]);
        // Out-of-box components fall back between the parent and the violated bound.
        if (v < box.lo[k]) v = box.lo[k] + unit(rng) * (pop[i][k] - box.lo[k]);
        if (v > box.hi[k]) v = box.hi[k] - unit(rng) * (box.hi[k] - pop[i][k]);
        trial[k] = v;
      }
      const double tv = evaluate(trial);
      if (tv <= val[i]) {
        next[i] = trial;
        next_val[i] = tv;
      } else {
        next[i] = pop[i];
        next_val[i] = val[i];
      }
      if (next_val[i] < cfg.target) {
        pop[i] = next[i];
        val[i] = next_val[i];
        best = i;
        return finish(true);
      }
    }
    pop.swap(next);
    val.swap(next_val);
    for (std::size_t i = 0; i < cfg.population; ++i)
      if (val[i] < val[best]) best = i;

    const Box<D> nb = rebox(pop[best], val[best], box);
    if (!(nb.lo == box.lo && nb.hi == box.hi)) {
      box = nb;
      for (std::size_t i = 0; i < cfg.population; ++i) {
        if (i == best || box.contains(pop[i])) continue;
        pop[i] = draw(box);
        val[i] = evaluate(pop[i]);
        if (val[i] < val[best]) best = i;
        if (val[best] < cfg.target) return finish(true);
      }
    }
  }
  res.generations = cfg.max_generations;
  return finish(false);
}

}  // namespace relshift::optim
