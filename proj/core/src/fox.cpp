#include "foxann/fox.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace foxann::fox {

namespace {

// Stream tags keep the init and per-move streams disjoint.
constexpr std::uint64_t kInitStream = 0x464f582d494e4954ULL;
constexpr std::uint64_t kMoveStream = 0x464f582d4d4f5645ULL;

std::string describe_position(std::span<const double> position) {
    std::ostringstream out;
    out << "[";
    const std::size_t shown = std::min<std::size_t>(position.size(), 16);
    for (std::size_t d = 0; d < shown; ++d) {
        if (d > 0) out << ", ";
        out << position[d];
    }
    if (shown < position.size()) out << ", ... (" << position.size() << " dims)";
    out << "]";
    return out.str();
}

void evaluate_all(const Objective& objective, FoxPopulation& pop, std::size_t iter) {
    const std::int64_t n = static_cast<std::int64_t>(pop.positions.rows);
    std::exception_ptr error;
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            pop.fitnesses[static_cast<std::size_t>(i)] =
                objective(pop.positions.row(static_cast<std::size_t>(i)));
        } catch (...) {
#pragma omp critical
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);

    // NaN check in agent order so the abort is deterministic.
    for (std::size_t i = 0; i < pop.positions.rows; ++i) {
        if (std::isnan(pop.fitnesses[i])) {
            std::ostringstream msg;
            msg << "objective returned NaN at iteration " << iter << ", agent " << i
                << ", position " << describe_position(pop.positions.row(i));
            throw std::runtime_error(msg.str());
        }
    }
}

}  // namespace

void SearchBounds::validate() const {
    if (lower.size() != upper.size())
        throw std::invalid_argument("bounds: lower/upper dimension mismatch");
    if (lower.empty()) throw std::invalid_argument("bounds: dimension must be >= 1");
    for (std::size_t d = 0; d < lower.size(); ++d) {
        if (!(lower[d] < upper[d])) {
            std::ostringstream msg;
            msg << "bounds: lower must be < upper in every dimension; dimension " << d
                << " has [" << lower[d] << ", " << upper[d] << "]";
            throw std::invalid_argument(msg.str());
        }
    }
}

void FoxParams::validate() const {
    if (population_size < 1)
        throw std::invalid_argument("fox params: population_size must be >= 1");
    if (max_iterations < 1)
        throw std::invalid_argument("fox params: max_iterations must be >= 1");
    if (!(0.0 < c1 && c1 < c2 && c2 < 1.0))
        throw std::invalid_argument("fox params: need 0 < c1 < c2 < 1");
    if (p_threshold < 0.0 || p_threshold > 1.0 || r_threshold < 0.0 || r_threshold > 1.0)
        throw std::invalid_argument("fox params: thresholds must lie in [0, 1]");
}

FoxPopulation init_population(const FoxParams& params, const SearchBounds& bounds,
                              std::uint64_t seed) {
    params.validate();
    bounds.validate();

    FoxPopulation pop;
    const std::size_t dim = bounds.dimension();
    pop.positions = Matrix(params.population_size, dim);
    pop.fitnesses.assign(params.population_size,
                         std::numeric_limits<double>::infinity());

    Rng rng(derive_seed(seed, kInitStream));
    for (std::size_t i = 0; i < params.population_size; ++i)
        for (std::size_t d = 0; d < dim; ++d)
            pop.positions(i, d) = rng.uniform(bounds.lower[d], bounds.upper[d]);
    return pop;
}

JumpMove exploit_position(std::span<const double> best_position,
                          std::span<const double> time, double p,
                          const FoxParams& params) {
    const std::size_t dim = best_position.size();
    JumpMove move;
    move.position.resize(dim);

    double time_sum = 0.0;
    for (std::size_t d = 0; d < dim; ++d) time_sum += time[d];
    const double tt = time_sum / static_cast<double>(dim);
    move.mean_time = tt;

    const double t = tt / 2.0;
    const double jump = 0.5 * params.gravity * t * t;
    const double scale = p > params.p_threshold ? params.c1 : params.c2;

    for (std::size_t d = 0; d < dim; ++d) {
        const double sound_speed = best_position[d] / time[d];
        const double sound_distance = sound_speed * time[d];
        const double fox_prey_distance = 0.5 * sound_distance;
        move.position[d] = fox_prey_distance * jump * scale;
    }
    return move;
}

double exploration_scale(std::size_t iter, std::size_t max_iter, ASchedule schedule) {
    const double i = static_cast<double>(iter);
    const double m = static_cast<double>(max_iter);
    switch (schedule) {
        case ASchedule::kDecreasing:
            return 2.0 * (1.0 - i / m);
        case ASchedule::kLiteral:
            return 2.0 * (i - 1.0 / m);
    }
    return 0.0;
}

std::vector<double> explore_position(std::span<const double> best_position,
                                     std::span<const double> rand01, double min_t,
                                     double a) {
    std::vector<double> position(best_position.size());
    for (std::size_t d = 0; d < position.size(); ++d)
        position[d] = best_position[d] * rand01[d] * min_t * a;
    return position;
}

std::vector<double> explore_walk_position(std::span<const double> best_position,
                                          std::span<const double> normals,
                                          double min_t, double a) {
    std::vector<double> position(best_position.size());
    for (std::size_t d = 0; d < position.size(); ++d)
        position[d] = best_position[d] + normals[d] * (min_t * a);
    return position;
}

JumpMove exploitation_move(std::span<const double> best_position,
                           const FoxParams& params, Rng& rng) {
    std::vector<double> time(best_position.size());
    for (double& t : time) t = rng.uniform_open();
    const double p = rng.uniform();
    return exploit_position(best_position, time, p, params);
}

std::vector<double> exploration_move(std::span<const double> best_position,
                                     double min_t, std::size_t iter,
                                     std::size_t max_iter, const FoxParams& params,
                                     Rng& rng) {
    const double a = exploration_scale(iter, max_iter, params.a_schedule);
    std::vector<double> draws(best_position.size());
    if (params.explore_mode == ExploreMode::kGaussianWalk) {
        for (double& v : draws) v = rng.normal();
        return explore_walk_position(best_position, draws, min_t, a * params.walk_scale);
    }
    for (double& v : draws) v = rng.uniform();
    return explore_position(best_position, draws, min_t, a);
}

std::vector<double> clip(std::vector<double> position, const SearchBounds& bounds) {
    for (std::size_t d = 0; d < position.size(); ++d)
        position[d] = std::clamp(position[d], bounds.lower[d], bounds.upper[d]);
    return position;
}

OptResult optimize(const Objective& objective, const SearchBounds& bounds,
                   const FoxParams& params, std::uint64_t seed,
                   const IterationCallback& on_iteration) {
    FoxPopulation pop = init_population(params, bounds, seed);
    const std::size_t dim = bounds.dimension();

    OptResult result;
    result.fitness_history.reserve(params.max_iterations);

    for (std::size_t iter = 0; iter < params.max_iterations; ++iter) {
        evaluate_all(objective, pop, iter);

        // Incumbent replaced on strict improvement only; ties keep the
        // earlier best. The empty() check seats an initial incumbent even
        // when every fitness is +inf.
        for (std::size_t i = 0; i < pop.positions.rows; ++i) {
            if (pop.fitnesses[i] < pop.best_fitness || pop.best_position.empty()) {
                pop.best_fitness = pop.fitnesses[i];
                const auto row = pop.positions.row(i);
                pop.best_position.assign(row.begin(), row.end());
            }
        }
        result.fitness_history.push_back(pop.best_fitness);
        if (on_iteration) on_iteration(iter, pop.best_position, pop.best_fitness);

        // Move phase runs in fixed agent order; each agent draws from a
        // stream derived from (seed, iteration, agent), so the result does
        // not depend on how the evaluations above were scheduled.
        for (std::size_t i = 0; i < pop.positions.rows; ++i) {
            Rng rng(derive_seed(seed, kMoveStream, iter, i));
            const double r = rng.uniform();
            std::vector<double> next;
            if (r >= params.r_threshold) {
                JumpMove move = exploitation_move(pop.best_position, params, rng);
                pop.min_t = std::min(pop.min_t, move.mean_time);
                next = std::move(move.position);
                ++result.exploitation_moves;
            } else {
                const double min_t = std::isinf(pop.min_t) ? 0.0 : pop.min_t;
                next = exploration_move(pop.best_position, min_t, iter,
                                        params.max_iterations, params, rng);
                ++result.exploration_moves;
            }
            next = clip(std::move(next), bounds);
            std::copy(next.begin(), next.end(), pop.positions.row(i).begin());
        }
    }

    result.best_position = pop.best_position;
    result.best_fitness = pop.best_fitness;
    return result;
}

}  // namespace foxann::fox
