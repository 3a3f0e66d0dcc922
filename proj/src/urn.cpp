#include "polya/urn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace polya {

UrnState UrnState::initial(std::vector<double> u0, bool allow_dead_colors) {
    if (u0.size() < 2) throw std::invalid_argument("urn needs at least 2 colors");
    double total = 0.0;
    for (std::size_t i = 0; i < u0.size(); ++i) {
        const double v = u0[i];
        if (!std::isfinite(v) || v < 0.0) {
            std::ostringstream os;
            os << "initial composition coordinate " << i + 1 << " is invalid (" << v << ")";
            throw std::invalid_argument(os.str());
        }
        if (v == 0.0 && !allow_dead_colors) {
            std::ostringstream os;
            os << "initial composition coordinate " << i + 1
               << " is zero; f(0)=0 makes that color permanently dead "
                  "(set allow_dead_colors to run anyway)";
            throw std::invalid_argument(os.str());
        }
        total += v;
    }
    if (!(total > 0.0)) throw std::invalid_argument("initial composition must have positive mass");
    UrnState state;
    state.counts = std::move(u0);
    state.step = 0;
    state.total = total;
    return state;
}

std::vector<double> UrnState::theta() const {
    std::vector<double> out(counts.size());
    theta_into(out);
    return out;
}

void UrnState::theta_into(std::span<double> out) const {
    for (std::size_t i = 0; i < counts.size(); ++i) out[i] = counts[i] / total;
}

void selection_probabilities(const UrnState& state, const Reinforcement& f,
                             std::vector<double>& out) {
    const std::size_t d = state.dimension();
    out.resize(d);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double w = f.evaluate(state.counts[i] / state.total);
        if (!std::isfinite(w) || w < 0.0) {
            std::ostringstream os;
            os << "reinforcement produced invalid weight " << w << " for color " << i + 1;
            throw std::runtime_error(os.str());
        }
        out[i] = w;
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) {
        std::ostringstream os;
        os << "all reinforcement weights vanish at step " << state.step << " (theta =";
        for (std::size_t i = 0; i < d; ++i) os << ' ' << state.counts[i] / state.total;
        os << ")";
        throw std::runtime_error(os.str());
    }
    for (std::size_t i = 0; i < d; ++i) out[i] /= weight_sum;
}

std::vector<double> selection_probabilities(const UrnState& state, const Reinforcement& f) {
    std::vector<double> out;
    selection_probabilities(state, f, out);
    return out;
}

DrawRecord step_urn(UrnState& state, const Reinforcement& f, const Schedule& s, RngStream& rng) {
    DrawRecord rec;
    rec.step = state.step + 1;
    rec.sigma = s.sigma(rec.step);
    selection_probabilities(state, f, rec.probs);
    rec.drawn.resize(state.dimension());
    rng.multinomial(rec.sigma, rec.probs, rec.drawn);
    rec.martingale_increment.resize(state.dimension());
    for (std::size_t i = 0; i < state.dimension(); ++i) {
        rec.martingale_increment[i] = double(rec.drawn[i]) - double(rec.sigma) * rec.probs[i];
        state.counts[i] += double(rec.drawn[i]);
    }
    state.total += double(rec.sigma);
    state.step = rec.step;
    return rec;
}

std::optional<std::size_t> detect_dominance(std::span<const double> theta, double epsilon) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < theta.size(); ++i) {
        if (theta[i] > theta[best]) best = i;
    }
    if (theta[best] >= 1.0 - epsilon) return best;
    return std::nullopt;
}

std::optional<FixationResult> detect_fixation(std::span<const DrawRecord> history,
                                              double initial_total,
                                              std::uint64_t window_balls) {
    if (history.empty() || window_balls == 0) return std::nullopt;
    const std::size_t d = history.front().drawn.size();
    std::vector<std::int64_t> last_foreign(d, 0);
    std::vector<double> total_at_last_foreign(d, initial_total);
    double total = initial_total;
    for (const auto& rec : history) {
        total += double(rec.sigma);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                if (j != i && rec.drawn[j] > 0) {
                    last_foreign[i] = rec.step;
                    total_at_last_foreign[i] = total;
                    break;
                }
            }
        }
    }
    for (std::size_t c = 0; c < d; ++c) {
        if (total - total_at_last_foreign[c] >= double(window_balls)) {
            return FixationResult{c, last_foreign[c] + 1};
        }
    }
    return std::nullopt;
}

RunResult run_urn(const std::vector<double>& u0, const Reinforcement& f, const Schedule& s,
                  const RunOptions& options) {
    if (options.steps < 0) throw std::invalid_argument("steps must be >= 0");
    RunResult result;
    UrnState state = UrnState::initial(u0, options.allow_dead_colors);
    const std::size_t d = state.dimension();
    const std::int64_t n_steps = options.steps;

    RngStream rng = RngStream::for_replication(options.master_seed, options.replication);

    // thinned snapshot plan: evenly spaced step indices, always including 0 and N
    std::vector<std::int64_t> snapshot_steps;
    {
        const std::int64_t want = std::max<std::int64_t>(2, options.snapshots);
        if (n_steps + 1 <= want) {
            for (std::int64_t k = 0; k <= n_steps; ++k) snapshot_steps.push_back(k);
        } else {
            snapshot_steps.reserve(std::size_t(want));
            for (std::int64_t k = 0; k < want; ++k) {
                const auto step = std::int64_t(std::llround(double(k) * double(n_steps) / double(want - 1)));
                if (snapshot_steps.empty() || step > snapshot_steps.back()) {
                    snapshot_steps.push_back(step);
                }
            }
        }
    }
    std::size_t next_snapshot = 0;
    auto maybe_snapshot = [&]() {
        if (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == state.step) {
            TrajectoryPoint pt;
            pt.step = state.step;
            pt.tau = state.total;
            pt.theta = state.theta();
            result.trajectory.push_back(std::move(pt));
            ++next_snapshot;
        }
    };
    maybe_snapshot();

    // fixation tracker: last step at which some other color received a ball,
    // and the running total right after that step
    std::vector<std::int64_t> last_foreign(d, 0);
    std::vector<double> total_at_last_foreign(d, state.total);

    std::vector<double> martingale(d, 0.0);
    std::vector<double> probs(d), theta(d);
    std::vector<std::uint64_t> drawn(d);

    for (std::int64_t n = 0; n < n_steps; ++n) {
        const std::int64_t step = n + 1;
        const std::uint64_t sigma = s.sigma(step);
        for (std::size_t i = 0; i < d; ++i) theta[i] = state.counts[i] / state.total;

        double weight_sum = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            const double w = f.evaluate(theta[i]);
            if (!std::isfinite(w) || w < 0.0) {
                std::ostringstream os;
                os << "reinforcement produced invalid weight " << w << " at step " << step;
                throw std::runtime_error(os.str());
            }
            probs[i] = w;
            weight_sum += w;
        }
        if (!(weight_sum > 0.0)) {
            std::ostringstream os;
            os << "all reinforcement weights vanish at step " << step;
            throw std::runtime_error(os.str());
        }
        for (std::size_t i = 0; i < d; ++i) probs[i] /= weight_sum;

        rng.multinomial(sigma, probs, drawn);

        std::size_t receivers = 0, receiver = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (drawn[i] > 0) {
                ++receivers;
                receiver = i;
            }
            state.counts[i] += double(drawn[i]);
        }
        state.total += double(sigma);
        state.step = step;

        if (receivers == 1) {
            for (std::size_t i = 0; i < d; ++i) {
                if (i != receiver) {
                    last_foreign[i] = step;
                    total_at_last_foreign[i] = state.total;
                }
            }
        } else {
            for (std::size_t i = 0; i < d; ++i) {
                last_foreign[i] = step;
                total_at_last_foreign[i] = state.total;
            }
        }

        if (step > options.detectors.martingale_eta) {
            for (std::size_t i = 0; i < d; ++i) {
                martingale[i] += (double(drawn[i]) - double(sigma) * probs[i]) / state.total;
            }
        }

        if (options.record_draws) {
            DrawRecord rec;
            rec.step = step;
            rec.sigma = sigma;
            rec.drawn.assign(drawn.begin(), drawn.end());
            rec.probs.assign(probs.begin(), probs.end());
            rec.martingale_increment.resize(d);
            for (std::size_t i = 0; i < d; ++i) {
                rec.martingale_increment[i] = double(drawn[i]) - double(sigma) * probs[i];
            }
            result.draws.push_back(std::move(rec));
        }

        maybe_snapshot();
    }

    RunSummary& sum = result.summary;
    sum.master_seed = options.master_seed;
    sum.replication = options.replication;
    sum.stream_seed = rng.seed();
    sum.steps = n_steps;
    sum.final_tau = state.total;
    sum.final_theta = state.theta();
    sum.dominance_margin = *std::max_element(sum.final_theta.begin(), sum.final_theta.end());
    sum.dominant_color = detect_dominance(sum.final_theta, options.detectors.dominance_epsilon);
    sum.fixation_window = options.detectors.fixation_window;
    if (options.detectors.fixation_window > 0) {
        for (std::size_t c = 0; c < d; ++c) {
            if (state.total - total_at_last_foreign[c] >=
                double(options.detectors.fixation_window)) {
                sum.fixation = FixationResult{c, last_foreign[c] + 1};
                break;
            }
        }
    }
    double msq = 0.0;
    for (double m : martingale) msq += m * m;
    sum.martingale_sq_norm = msq;
    return result;
}

}  // namespace polya
