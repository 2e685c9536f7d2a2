#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "asynet/checks.hpp"
#include "asynet/network.hpp"

namespace asynet {

struct IntegratorConfig {
    double h = 1e-3;
    double eps_loc = 1e-9;
    double eps_eq = kDefaultEpsEq;
    double t_max = 10.0;             // duration measured from the initial state's t
    int max_events = 100000;
    double dwell = 0.0;              // guard events suppressed this long after an event
    double zeno_window = -1.0;       // negative: 100 h
    int zeno_max_events = 50;
    std::uint64_t seed = 0;
    int stride = 10;                 // keep every stride-th step as a sample
    std::vector<double> output_times;  // absolute times hit exactly and sampled

    double effective_zeno_window() const { return zeno_window < 0 ? 100.0 * h : zeno_window; }
    void validate() const;  // throws std::invalid_argument
};

enum class RunStatus { CompletedTmax, ReachedTermination, StoppedAtBoundary, Error };
enum class RunError { None, Zeno, NoContinuation, Expression, MaxEvents };
enum class EventCause { Guard, ClockThreshold, Boundary, StochasticSwitch };

std::string to_string(RunStatus s);
std::string to_string(RunError e);
std::string to_string(EventCause c);

struct EventRecord {
    double t = 0.0;
    int from = -1;
    int to = -1;
    NetworkState state;
    EventCause cause = EventCause::Guard;
    int atom = -1;   // guard or clock atom index
    int node = -1;   // boundary events
};

struct Sample {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> tau;
    int alpha = -1;
};

struct Trajectory {
    std::vector<Sample> samples;
    std::vector<EventRecord> events;
    RunStatus status = RunStatus::CompletedTmax;
    RunError error = RunError::None;
    std::string message;
    NetworkState final_state;
    int final_alpha = -1;
    std::vector<std::string> warnings;

    bool ok() const { return status != RunStatus::Error; }
    // Interpolation-free lookup: the sample taken exactly at t, if any.
    const Sample* sample_at(double t) const;
};

// One RK4 step of size dt under structure a; clocks advance linearly.
NetworkState rk4_step(const Network& net, int a, const NetworkState& s, double dt, double eps_eq = kDefaultEpsEq);

// Smooth piece of the semiflow: RK4 with step h, last step shortened. No events.
NetworkState flow_under_alpha(const Network& net, int a, const NetworkState& s, double dt, const IntegratorConfig& cfg);

struct EventLocation {
    double dt = 0.0;                  // offset from the bracket start
    int atom = -1;                    // earliest atom, -1 if a boundary or map change
    std::vector<int> atoms;           // all atoms in the tie group
    std::vector<int> clock_atoms;     // clock thresholds in the tie group
    std::vector<int> boundary_coords; // interval coordinates reached
    bool map_change_only = false;
};

// Earliest event in [0, bracket] from s under a, or nullopt if nothing changes.
std::optional<EventLocation> find_event(const Network& net, int a, const NetworkState& s, double bracket, const IntegratorConfig& cfg, bool guards = true);
// As find_event but throws std::invalid_argument when the bracket holds no event.
EventLocation locate_event(const Network& net, int a, const NetworkState& s, double bracket, const IntegratorConfig& cfg);

// Snaps a coordinate onto its latch value and records it.
NetworkState latch(NetworkState s, int coord, double value);
// Drops latches whose coordinate is driven by structure a.
void unlatch_moving(const Network& net, int a, NetworkState& s, double eps_eq);

Trajectory integrate(const Network& net, const NetworkState& x0, const IntegratorConfig& cfg);

// Chooses the next structure at a switch time.
using AlphaSampler = std::function<int(int current, Rng& rng)>;
AlphaSampler uniform_other_sampler(const Network& net);
AlphaSampler constant_sampler(int a);

Trajectory integrate_stochastic(const Network& net, double rate, const AlphaSampler& sampler, const NetworkState& x0, const IntegratorConfig& cfg);

}  // namespace asynet
