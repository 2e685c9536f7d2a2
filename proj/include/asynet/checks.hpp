#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "asynet/network.hpp"

namespace asynet {

using Rng = std::mt19937_64;
double uniform01(Rng& rng);  // 53-bit, platform independent

// Box used when drawing random states.
struct SampleBox {
    double real_half_width = 5.0;  // RealLine coordinates in [-w, w]
    double clock_max = 5.0;        // clocks in [0, clock_max]
};

class StateSampler {
public:
    explicit StateSampler(const Network& net, SampleBox box = {});

    NetworkState any(Rng& rng) const;
    // Draws a state and snaps the equality atoms of one satisfying branch of rule r.
    NetworkState near_rule(int r, Rng& rng) const;
    // Draws a state, then with equal odds snaps it toward a random rule.
    NetworkState mixed(Rng& rng) const;
    // Rejection-samples a state with event map value a; false if none found.
    bool in_event_set(int a, Rng& rng, NetworkState& out, int max_tries = 200) const;

private:
    const Network& net_;
    SampleBox box_;
    void snap(const Network::CPred& p, NetworkState& s, Rng& rng) const;
};

struct Finding {
    enum class Kind { Dependency, Nontriviality, Tangency } kind = Kind::Dependency;
    int node = -1;
    int other = -1;  // node j for dependency findings
    int hits = 0;
    int samples = 0;
    std::string message;
};

struct AdmissibilityReport {
    std::string structure;
    int samples = 0;
    std::vector<Finding> violations;
    std::vector<Finding> warnings;
    bool ok() const { return violations.empty(); }
};

AdmissibilityReport check_admissibility(const Network& net, int alpha, int n_samples, std::uint64_t seed, SampleBox box = {});

struct RegularityFinding {
    std::string structure;
    int node = -1;
    int constraint = 0;
    int samples = 0;  // states found in the event set
    int flagged = 0;
    NetworkState example;
};

struct RegularityReport {
    std::vector<RegularityFinding> entries;
    bool ok() const;
};

RegularityReport check_constraint_regularity(const Network& net, int n_samples, double margin, std::uint64_t seed, SampleBox box = {});

}  // namespace asynet
