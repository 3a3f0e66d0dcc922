// The stochastic urn recursion. At step n+1, sigma_{n+1} balls are placed
// multinomially with probabilities Psi(theta_n)_i = f(theta_{n,i}) / sum_k
// f(theta_{n,k}); counts and totals grow accordingly and the martingale
// increment drawn - sigma * Psi is tracked for the L^2 audit.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polya/reinforcement.hpp"
#include "polya/rng.hpp"
#include "polya/schedule.hpp"

namespace polya {

struct UrnState {
    std::vector<double> counts;  // U_n
    std::int64_t step = 0;       // n
    double total = 0.0;          // tau_n

    // strictparameter: every coordinate must be > 0 unless allow_dead_colors
    static UrnState initial(std::vector<double> u0, bool allow_dead_colors = false);

    std::size_t dimension() const { return counts.size(); }
    std::vector<double> theta() const;
    void theta_into(std::span<double> out) const;
};

struct DrawRecord {
    std::int64_t step = 0;                      // n+1
    std::uint64_t sigma = 0;                    // balls added this step
    std::vector<std::uint64_t> drawn;           // multinomial draw, sums to sigma
    std::vector<double> probs;                  // Psi(theta_n)
    std::vector<double> martingale_increment;   // drawn - sigma * probs
};

// Psi(theta_n); throws if the weights sum to zero or are invalid.
void selection_probabilities(const UrnState& state, const Reinforcement& f,
                             std::vector<double>& out);
std::vector<double> selection_probabilities(const UrnState& state, const Reinforcement& f);

// One urn step, in place. Returns the full draw record.
DrawRecord step_urn(UrnState& state, const Reinforcement& f, const Schedule& s, RngStream& rng);

// argmax_i theta_i when max theta_i >= 1 - epsilon (ties to the lowest index)
std::optional<std::size_t> detect_dominance(std::span<const double> theta, double epsilon);

struct FixationResult {
    std::size_t color = 0;
    std::int64_t onset_step = 0;  // last step any other color received a ball, plus 1
};

// Finite-run fixation proxy over a recorded draw history: the color (if any)
// that received every one of the final `window_balls` additions.
std::optional<FixationResult> detect_fixation(std::span<const DrawRecord> history,
                                              double initial_total,
                                              std::uint64_t window_balls);

struct DetectorConfig {
    double dominance_epsilon = 0.05;
    std::uint64_t fixation_window = 10000;  // balls; 0 disables the detector
    std::int64_t martingale_eta = 0;        // audit starts after step eta
};

struct RunOptions {
    std::int64_t steps = 0;
    int snapshots = 512;        // thinned trajectory length (>= 2 unless steps == 0)
    bool record_draws = false;  // keep the full per-step draw history
    DetectorConfig detectors;
    std::uint64_t master_seed = 0;
    std::uint64_t replication = 0;
    bool allow_dead_colors = false;
};

struct TrajectoryPoint {
    std::int64_t step = 0;
    double tau = 0.0;
    std::vector<double> theta;
};

struct RunSummary {
    std::uint64_t master_seed = 0;
    std::uint64_t replication = 0;
    std::uint64_t stream_seed = 0;
    std::int64_t steps = 0;
    double final_tau = 0.0;
    std::vector<double> final_theta;
    double dominance_margin = 0.0;  // max_i theta_i
    std::optional<std::size_t> dominant_color;
    std::optional<FixationResult> fixation;
    std::uint64_t fixation_window = 0;  // window the fixation claim refers to
    double martingale_sq_norm = 0.0;    // ||sum_{j>eta} dM_j / tau_j||^2
};

struct RunResult {
    RunSummary summary;
    std::vector<TrajectoryPoint> trajectory;
    std::vector<DrawRecord> draws;  // only when record_draws
};

RunResult run_urn(const std::vector<double>& u0, const Reinforcement& f, const Schedule& s,
                  const RunOptions& options);

}  // namespace polya
