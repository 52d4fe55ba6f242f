#pragma once

#include <limits>
#include <span>
#include <vector>

namespace pgplan {

/// Sentinel score for methods whose rollout dead-ended.
inline constexpr double kDeadEnd = -std::numeric_limits<double>::infinity();

/// 1/(1+D) + 1/(1+L) + A: shorter rollouts that end closer to the goal and
/// agree with more preferences score higher.
double score_method(int rollout_cost, int goal_distance, int adherence);

/// Softmax of score/temperature, max-shifted. kDeadEnd entries get
/// probability 0; if every entry is kDeadEnd the result is uniform.
/// Throws EmptyScores.
std::vector<double> boltzmann(std::span<const double> scores, double temperature = 1.0);

enum class EntropyBase { natural, two };

/// Sum of p * log(1/p), with 0 log(1/0) = 0. Throws NotADistribution when
/// entries are negative or do not sum to 1 within 1e-9.
double entropy(std::span<const double> dist, EntropyBase base = EntropyBase::natural);

/// KL(p || q) in nats; terms with p = 0 contribute 0, q is smoothed by
/// `epsilon` and renormalized first.
double kl_divergence(std::span<const double> p, std::span<const double> q, double epsilon = 1e-9);

/// Index of the highest score; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

}  // namespace pgplan
