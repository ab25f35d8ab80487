#include "dqof/anneal.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "dqof/rng.hpp"

namespace dqof {

double AnnealSchedule::cooling() const {
  if (sweeps <= 1) return 1.0;
  return std::pow(tf / t0, 1.0 / static_cast<double>(sweeps - 1));
}

double AnnealSchedule::temperature(std::size_t sweep) const {
  if (sweeps <= 1) return t0;
  return t0 * std::pow(tf / t0, static_cast<double>(sweep) / static_cast<double>(sweeps - 1));
}

void AnnealSchedule::validate() const {
  if (!(tf > 0.0) || !(t0 > tf) || !std::isfinite(t0)) {
    throw std::invalid_argument("AnnealSchedule: need t0 > tf > 0");
  }
  if (sweeps < 1) throw std::invalid_argument("AnnealSchedule: sweeps must be >= 1");
}

AnnealSchedule AnnealSchedule::defaults(const HuboProblem& problem) {
  const double m = problem.max_abs_coefficient();
  AnnealSchedule s;
  s.t0 = m > 0.0 ? 10.0 * m : 1.0;
  s.tf = 1e-3;
  s.sweeps = 2000;
  if (s.t0 <= s.tf) s.t0 = 10.0 * s.tf;
  return s;
}

AnnealResult simulated_annealing(const HuboProblem& problem, const AnnealSchedule& schedule,
                                 std::uint64_t seed, const AnnealOptions& options) {
  schedule.validate();
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };

  const std::size_t n = problem.size();
  Rng rng(seed);
  Assignment x(n);
  for (auto& b : x) b = rng.bit() ? 1 : 0;
  double energy = evaluate(problem, x);

  // best is kept lazily: flips since the last snapshot are replayed on
  // improvement, so the cost stays linear in accepted moves.
  Assignment best = x;
  double best_energy = energy;
  std::vector<Index> pending;

  AnnealResult out;
  const double log_ratio = std::log(schedule.tf / schedule.t0);
  const bool timed = options.time_limit_seconds.has_value();
  const double limit = timed ? *options.time_limit_seconds : 0.0;
  double temperature = schedule.t0;
  std::size_t sweep = 0;

  while (true) {
    if (timed) {
      const double t = elapsed();
      if (t >= limit && sweep > 0) break;
      temperature = schedule.t0 * std::exp(log_ratio * std::min(1.0, t / limit));
    } else {
      if (sweep >= schedule.sweeps) break;
      temperature = schedule.temperature(sweep);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (timed && (i & 1023) == 1023) {
        temperature = schedule.t0 * std::exp(log_ratio * std::min(1.0, elapsed() / limit));
      }
      const auto idx = static_cast<Index>(i);
      const double delta = evaluate_flip_delta(problem, x, idx);
      if (delta <= 0.0 || rng.uniform() < std::exp(-delta / temperature)) {
        x[i] ^= 1;
        energy += delta;
        pending.push_back(idx);
        if (energy < best_energy) {
          for (Index p : pending) best[p] ^= 1;
          pending.clear();
          best_energy = energy;
        }
      }
    }
    ++sweep;
    if (options.record_trace) out.trace.push_back(best_energy);
  }

  out.x = std::move(best);
  out.energy = evaluate(problem, out.x);
  out.sweeps = sweep;
  out.seconds = elapsed();
  return out;
}

AnnealResult simulated_annealing(const QuboProblem& problem, const AnnealSchedule& schedule,
                                 std::uint64_t seed, const AnnealOptions& options) {
  return simulated_annealing(problem.qubo, schedule, seed, options);
}

}  // namespace dqof
