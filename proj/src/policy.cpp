#include "pgplan/policy.hpp"

#include <algorithm>
#include <cmath>

#include "pgplan/error.hpp"

namespace pgplan {

double score_method(int rollout_cost, int goal_distance, int adherence) {
  return 1.0 / (1.0 + goal_distance) + 1.0 / (1.0 + rollout_cost) + adherence;
}

std::vector<double> boltzmann(std::span<const double> scores, double temperature) {
  if (scores.empty()) throw EmptyScores("boltzmann: no scores");
  if (!(temperature > 0)) throw ConfigError("boltzmann: temperature must be positive");
  std::vector<double> p(scores.size(), 0.0);
  double top = kDeadEnd;
  for (double s : scores) top = std::max(top, s);
  if (top == kDeadEnd) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
    return p;
  }
  double z = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] == kDeadEnd) continue;
    p[i] = std::exp(scores[i] / temperature - top / temperature);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

double entropy(std::span<const double> dist, EntropyBase base) {
  double sum = 0, h = 0;
  for (double v : dist) {
    if (v < 0 || !std::isfinite(v)) throw NotADistribution("entropy: entry outside [0, 1]");
    sum += v;
    if (v > 0) h += v * std::log(1.0 / v);
  }
  if (dist.empty() || std::abs(sum - 1.0) > 1e-9) throw NotADistribution("entropy: entries do not sum to 1");
  if (base == EntropyBase::two) h /= std::log(2.0);
  return std::max(h, 0.0);
}

double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon) {
  const double k = static_cast<double>(q.size());
  double d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0) continue;
    double qi = (q[i] + epsilon) / (1.0 + k * epsilon);
    d += p[i] * std::log(p[i] / qi);
  }
  return d;
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

}  // namespace pgplan
