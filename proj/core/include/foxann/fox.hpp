#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "foxann/matrix.hpp"
#include "foxann/rng.hpp"

namespace foxann::fox {

// Schedule for the exploration scale `a`.
//   kDecreasing: a = 2 * (1 - iter/max_iter); the random walk shrinks as the
//                run progresses. Default.
//   kLiteral:    a = 2 * (iter - 1/max_iter); grows with iter. Selectable for
//                fidelity experiments against the published form.
enum class ASchedule { kDecreasing, kLiteral };

// Exploration move family.
//   kGaussianWalk:  best + normal(dim) * (min_t * a). An additive random walk
//                   around the incumbent; this is what the optimizer's
//                   reference implementation does and the default.
//   kScaledUniform: best * rand01(dim) * min_t * a. An elementwise shrink of
//                   the incumbent; every factor lies in [0, min_t * a), so
//                   coordinates can neither grow nor change sign. Selectable
//                   for fidelity experiments.
enum class ExploreMode { kGaussianWalk, kScaledUniform };

// Box constraints for the search space. Scalar bounds broadcast over all
// dimensions.
struct SearchBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    SearchBounds(double lo, double hi, std::size_t dimension)
        : lower(dimension, lo), upper(dimension, hi) {}
    SearchBounds(std::vector<double> lo, std::vector<double> hi)
        : lower(std::move(lo)), upper(std::move(hi)) {}

    std::size_t dimension() const { return lower.size(); }

    // throws std::invalid_argument unless lower[d] < upper[d] for every d
    void validate() const;
};

struct FoxParams {
    std::size_t population_size = 30;
    std::size_t max_iterations = 100;
    double c1 = 0.18;            // jump scale toward the prey
    double c2 = 0.82;            // jump scale away from the prey
    double p_threshold = 0.18;   // selects between the two jump scales
    double r_threshold = 0.5;    // exploitation vs exploration split
    double gravity = 9.81;       // jump height constant
    ASchedule a_schedule = ASchedule::kDecreasing;
    ExploreMode explore_mode = ExploreMode::kGaussianWalk;
    double walk_scale = 1.0;     // experiment knob, to be pinned

    void validate() const;
};

struct FoxPopulation {
    Matrix positions;                   // population_size x dimension
    std::vector<double> fitnesses;      // +inf until first evaluation
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    // Running minimum of per-agent mean jump times; +inf sentinel until the
    // first exploitation draw.
    double min_t = std::numeric_limits<double>::infinity();
};

struct OptResult {
    std::vector<double> best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    std::vector<double> fitness_history;  // best-so-far, one entry per iteration
    std::uint64_t exploitation_moves = 0;
    std::uint64_t exploration_moves = 0;
};

// Objective is evaluated in parallel across agents; it must be a pure
// function of its argument.
using Objective = std::function<double(std::span<const double>)>;

// Invoked once per iteration, after fitness evaluation and incumbent update.
using IterationCallback =
    std::function<void(std::size_t iter, std::span<const double> best_position,
                       double best_fitness)>;

// Uniformly samples every agent position inside the bounds. Fitnesses stay
// at the +inf sentinel until optimize() evaluates them.
FoxPopulation init_population(const FoxParams& params, const SearchBounds& bounds,
                              std::uint64_t seed);

// --- deterministic move kernels (randomness passed in explicitly) ---------

struct JumpMove {
    std::vector<double> position;
    double mean_time = 0.0;  // tt, the per-agent average of the time samples
};

// Jump toward/away from the incumbent best. `time` holds one sample per
// dimension, strictly positive; `p` selects between the c1 and c2 scales.
JumpMove exploit_position(std::span<const double> best_position,
                          std::span<const double> time, double p,
                          const FoxParams& params);

// kScaledUniform kernel: best * rand01 * min_t * a.
std::vector<double> explore_position(std::span<const double> best_position,
                                     std::span<const double> rand01, double min_t,
                                     double a);

// kGaussianWalk kernel: best + normals * (min_t * a).
std::vector<double> explore_walk_position(std::span<const double> best_position,
                                          std::span<const double> normals,
                                          double min_t, double a);

double exploration_scale(std::size_t iter, std::size_t max_iter, ASchedule schedule);

// --- sampling wrappers ------------------------------------------------------

JumpMove exploitation_move(std::span<const double> best_position,
                           const FoxParams& params, Rng& rng);

std::vector<double> exploration_move(std::span<const double> best_position,
                                     double min_t, std::size_t iter,
                                     std::size_t max_iter, const FoxParams& params,
                                     Rng& rng);

// Clamp every component into the box; in-bounds components pass through.
std::vector<double> clip(std::vector<double> position, const SearchBounds& bounds);

// Runs max_iterations rounds: evaluate all agents, update the incumbent on
// strict improvement, then move each agent (exploitation when r >= r_threshold,
// exploration otherwise) and clip. Deterministic for a fixed seed regardless
// of how many threads evaluate the objective. Throws std::runtime_error when
// the objective returns NaN, identifying the offending position.
OptResult optimize(const Objective& objective, const SearchBounds& bounds,
                   const FoxParams& params, std::uint64_t seed,
                   const IterationCallback& on_iteration = {});

}  // namespace foxann::fox
