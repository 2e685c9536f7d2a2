#include "asynet/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <deque>
#include <limits>
#include <stdexcept>

namespace asynet {

void IntegratorConfig::validate() const {
    if (!(h > 0)) throw std::invalid_argument("step h must be positive");
    if (!(eps_loc > 0) || !(eps_loc < h)) throw std::invalid_argument("event tolerance must satisfy 0 < eps_loc < h");
    if (!(t_max > 0)) throw std::invalid_argument("t_max must be positive");
    if (eps_eq < 0) throw std::invalid_argument("eps_eq must be non-negative");
    if (dwell < 0) throw std::invalid_argument("dwell must be non-negative");
    if (stride < 1) throw std::invalid_argument("stride must be at least 1");
    if (max_events < 1 || zeno_max_events < 1) throw std::invalid_argument("event limits must be positive");
}

std::string to_string(RunStatus s) {
    switch (s) {
        case RunStatus::CompletedTmax: return "completed";
        case RunStatus::ReachedTermination: return "reached_termination";
        case RunStatus::StoppedAtBoundary: return "stopped_at_boundary";
        case RunStatus::Error: return "error";
    }
    return "?";
}

std::string to_string(RunError e) {
    switch (e) {
        case RunError::None: return "none";
        case RunError::Zeno: return "ZenoDetected";
        case RunError::NoContinuation: return "NoContinuation";
        case RunError::Expression: return "ExpressionError";
        case RunError::MaxEvents: return "MaxEvents";
    }
    return "?";
}

std::string to_string(EventCause c) {
    switch (c) {
        case EventCause::Guard: return "guard";
        case EventCause::ClockThreshold: return "clock_threshold";
        case EventCause::Boundary: return "boundary";
        case EventCause::StochasticSwitch: return "stochastic_switch";
    }
    return "?";
}

const Sample* Trajectory::sample_at(double t) const {
    auto it = std::lower_bound(samples.begin(), samples.end(), t, [](const Sample& s, double v) { return s.t < v; });
    if (it != samples.end() && it->t == t) return &*it;
    return nullptr;
}

// ---------------------------------------------------------------- smooth pieces

NetworkState rk4_step(const Network& net, int a, const NetworkState& s, double dt, double eps_eq) {
    if (dt == 0.0) return s;
    const std::size_t n = s.x.size();
    const std::size_t m = s.tau.size();
    Derivative k1 = net.eval_field(a, s, eps_eq);
    NetworkState y = s;
    auto stage = [&](const Derivative& k, double c) {
        for (std::size_t i = 0; i < n; ++i) y.x[i] = s.x[i] + c * dt * k.dx[i];
        for (std::size_t j = 0; j < m; ++j) y.tau[j] = s.tau[j] + k.dtau[j] * c * dt;
    };
    stage(k1, 0.5);
    Derivative k2 = net.eval_field(a, y, eps_eq);
    stage(k2, 0.5);
    Derivative k3 = net.eval_field(a, y, eps_eq);
    stage(k3, 1.0);
    Derivative k4 = net.eval_field(a, y, eps_eq);

    NetworkState out = s;
    out.t = s.t + dt;
    for (std::size_t i = 0; i < n; ++i) out.x[i] = s.x[i] + dt * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]) / 6.0;
    for (std::size_t j = 0; j < m; ++j) out.tau[j] = s.tau[j] + k1.dtau[j] * dt;
    for (std::size_t i = 0; i < n; ++i) {
        if (net.factor_of(static_cast<int>(i)).kind != Factor::Kind::Circle) continue;
        constexpr double two_pi = 2.0 * std::numbers::pi;
        if (out.x[i] < 0.0 || out.x[i] >= two_pi) out.x[i] -= two_pi * std::floor(out.x[i] / two_pi);
    }
    for (auto it = out.latched.begin(); it != out.latched.end();) {
        if (out.x[static_cast<std::size_t>(it->first)] != it->second)
            it = out.latched.erase(it);
        else
            ++it;
    }
    return out;
}

NetworkState flow_under_alpha(const Network& net, int a, const NetworkState& s, double dt, const IntegratorConfig& cfg) {
    if (dt < 0) throw std::invalid_argument("flow duration must be non-negative");
    NetworkState y = s;
    const double t_end = s.t + dt;
    double left = dt;
    while (left > 0) {
        double step = std::min(cfg.h, left);
        y = rk4_step(net, a, y, step, cfg.eps_eq);
        left -= step;
        if (left <= 1e-15 * std::max(1.0, dt)) break;
    }
    y.t = t_end;
    return y;
}

// ---------------------------------------------------------------- event localization

namespace {

bool eq_sign_change(double g0, double g1) { return (g0 < 0 && g1 > 0) || (g0 > 0 && g1 < 0); }

struct Candidate {
    double theta;
    enum Kind { AtomCross, Clock, Bound } kind;
    int idx;
};

}  // namespace

std::optional<EventLocation> find_event(const Network& net, int a, const NetworkState& s, double bracket, const IntegratorConfig& cfg, bool guards) {
    const NetworkState s1 = rk4_step(net, a, s, bracket, cfg.eps_eq);
    std::vector<Candidate> cands;
    auto bisect = [&](const std::function<bool(const NetworkState&)>& flipped) {
        double lo = 0.0, hi = bracket;
        while (hi - lo > cfg.eps_loc) {
            double mid = 0.5 * (lo + hi);
            if (flipped(rk4_step(net, a, s, mid, cfg.eps_eq)))
                hi = mid;
            else
                lo = mid;
        }
        return hi;
    };

    if (guards) {
        const auto& rates = net.clock_rates(a);
        for (int k = 0; k < net.atom_count(); ++k) {
            const Cmp cmp = net.atom(k).cmp;
            const double g0 = net.atom_value(k, s.x.data(), s.tau.data());
            const double g1 = net.atom_value(k, s1.x.data(), s1.tau.data());
            const bool b0 = atom_holds(cmp, g0, cfg.eps_eq);
            const bool b1 = atom_holds(cmp, g1, cfg.eps_eq);
            if (b0 == b1 && !(cmp == Cmp::Eq && eq_sign_change(g0, g1))) continue;
            if (auto ct = net.atom_clock_threshold(k)) {
                if (rates[static_cast<std::size_t>(ct->first)] == 1) {
                    // clocks are linear: exact crossing time
                    double theta = ct->second - s.tau[static_cast<std::size_t>(ct->first)];
                    cands.push_back({std::clamp(theta, 0.0, bracket), Candidate::Clock, k});
                }
                continue;
            }
            double theta;
            if (cmp == Cmp::Eq && !b0 && eq_sign_change(g0, g1)) {
                // entering through zero: locate the crossing itself, not the tolerance band
                theta = bisect([&](const NetworkState& y) {
                    double g = net.atom_value(k, y.x.data(), y.tau.data());
                    return g == 0.0 || eq_sign_change(g0, g);
                });
            } else if (cmp == Cmp::Eq && !b0) {
                // landed inside the band without crossing: aim for the closest approach
                const double target = std::fabs(g1) * (1.0 + 1e-12) + 1e-15;
                theta = bisect([&](const NetworkState& y) { return std::fabs(net.atom_value(k, y.x.data(), y.tau.data())) <= target; });
            } else {
                theta = bisect([&](const NetworkState& y) {
                    double g = net.atom_value(k, y.x.data(), y.tau.data());
                    return atom_holds(cmp, g, cfg.eps_eq) != b0 || (cmp == Cmp::Eq && eq_sign_change(g0, g));
                });
            }
            cands.push_back({theta, Candidate::AtomCross, k});
        }
    }

    for (int c = 0; c < net.dim(); ++c) {
        const Factor& f = net.factor_of(c);
        if (f.kind != Factor::Kind::Interval || s.node_frozen(net.node_of(c))) continue;
        const double v0 = s.x[static_cast<std::size_t>(c)];
        const double v1 = s1.x[static_cast<std::size_t>(c)];
        if (v0 < f.hi && v1 >= f.hi) {
            cands.push_back({bisect([&](const NetworkState& y) { return y.x[static_cast<std::size_t>(c)] >= f.hi; }), Candidate::Bound, c});
        } else if (v0 > f.lo && v1 <= f.lo) {
            cands.push_back({bisect([&](const NetworkState& y) { return y.x[static_cast<std::size_t>(c)] <= f.lo; }), Candidate::Bound, c});
        }
    }

    EventLocation loc;
    if (cands.empty()) {
        if (guards && net.eval_event_map(s1.x.data(), s1.tau.data(), cfg.eps_eq) != a) {
            loc.dt = bracket;
            loc.map_change_only = true;
            return loc;
        }
        return std::nullopt;
    }
    double first = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) first = std::min(first, c.theta);
    double last = first;
    int earliest_atom = -1;
    double earliest_atom_t = std::numeric_limits<double>::infinity();
    for (const auto& c : cands) {
        if (c.theta > first + cfg.eps_loc) continue;
        last = std::max(last, c.theta);
        switch (c.kind) {
            case Candidate::AtomCross: loc.atoms.push_back(c.idx); break;
            case Candidate::Clock: loc.clock_atoms.push_back(c.idx); break;
            case Candidate::Bound: loc.boundary_coords.push_back(c.idx); break;
        }
        if (c.kind != Candidate::Bound && c.theta < earliest_atom_t) {
            earliest_atom_t = c.theta;
            earliest_atom = c.idx;
        }
    }
    loc.dt = last;
    loc.atom = earliest_atom;
    return loc;
}

EventLocation locate_event(const Network& net, int a, const NetworkState& s, double bracket, const IntegratorConfig& cfg) {
    if (!(bracket > 0)) throw std::invalid_argument("event bracket must have positive width");
    auto loc = find_event(net, a, s, bracket, cfg);
    if (!loc) throw std::invalid_argument("no guard changes sign inside the bracket");
    return *loc;
}

NetworkState latch(NetworkState s, int coord, double value) {
    s.x[static_cast<std::size_t>(coord)] = value;
    s.latched[coord] = value;
    return s;
}

void unlatch_moving(const Network& net, int a, NetworkState& s, double eps_eq) {
    if (s.latched.empty()) return;
    std::vector<double> dx(static_cast<std::size_t>(net.dim()));
    net.eval_field(a, s.x.data(), s.tau.data(), dx.data());
    const auto frozen = net.frozen_coords(a);
    for (auto it = s.latched.begin(); it != s.latched.end();) {
        bool held = std::fabs(dx[static_cast<std::size_t>(it->first)]) <= eps_eq || std::find(frozen.begin(), frozen.end(), it->first) != frozen.end();
        if (held)
            ++it;
        else
            it = s.latched.erase(it);
    }
}

// ---------------------------------------------------------------- runs

namespace {

struct RunAbort {
    RunError kind;
    std::string message;
};

class Runner {
public:
    Runner(const Network& net, const IntegratorConfig& cfg, const NetworkState& x0) : net_(net), cfg_(cfg), s_(x0) {
        cfg_.validate();
        if (!validate_network(net).empty()) throw std::invalid_argument("network is not well formed: " + validate_network(net).front());
        t_end_ = x0.t + cfg.t_max;
        outputs_ = cfg.output_times;
        std::sort(outputs_.begin(), outputs_.end());
        next_out_ = static_cast<std::size_t>(std::lower_bound(outputs_.begin(), outputs_.end(), x0.t) - outputs_.begin());
    }

    Trajectory run(bool guards, double rate = 0.0, const AlphaSampler* sampler = nullptr) {
        guards_ = guards;
        try {
            start();
            if (!done_) loop(rate, sampler);
        } catch (const RunAbort& e) {
            tr_.status = RunStatus::Error;
            tr_.error = e.kind;
            tr_.message = e.message;
        } catch (const ExpressionError& e) {
            tr_.status = RunStatus::Error;
            tr_.error = RunError::Expression;
            tr_.message = e.what();
        }
        push_sample();
        tr_.final_state = s_;
        tr_.final_alpha = alpha_;
        return std::move(tr_);
    }

private:
    const Network& net_;
    IntegratorConfig cfg_;
    NetworkState s_;
    Trajectory tr_;
    int alpha_ = -1;
    double t_end_ = 0.0;
    bool guards_ = true;
    bool done_ = false;
    std::vector<double> outputs_;
    std::size_t next_out_ = 0;
    long steps_ = 0;
    double dwell_end_ = -std::numeric_limits<double>::infinity();
    std::deque<double> recent_;
    int rapid_ = 0;
    long tiny_ = 0;

    void push_sample() {
        Sample smp{s_.t, s_.x, s_.tau, alpha_};
        if (!tr_.samples.empty() && tr_.samples.back().t == s_.t)
            tr_.samples.back() = std::move(smp);
        else if (tr_.samples.empty() || tr_.samples.back().t < s_.t)
            tr_.samples.push_back(std::move(smp));
    }

    // Output times swallowed by an event or the final partial step.
    void flush_outputs(double upto) {
        while (next_out_ < outputs_.size() && outputs_[next_out_] <= upto) {
            const double t = outputs_[next_out_++];
            if (!tr_.samples.empty() && tr_.samples.back().t >= t) continue;
            tr_.samples.push_back(Sample{t, s_.x, s_.tau, alpha_});
        }
    }

    // With `before`, equalities that already held there are left alone.
    void latch_equalities(const NetworkState* before = nullptr) {
        for (int k = 0; k < net_.atom_count(); ++k) {
            if (net_.atom(k).cmp != Cmp::Eq) continue;
            auto c = net_.atom_latch_coord(k);
            if (!c) continue;
            if (std::fabs(net_.atom_value(k, s_.x.data(), s_.tau.data())) > cfg_.eps_eq) continue;
            if (before && std::fabs(net_.atom_value(k, before->x.data(), before->tau.data())) <= cfg_.eps_eq) continue;
            net_.snap_atom(k, s_.x, s_.tau);
            s_.latched[*c] = s_.x[static_cast<std::size_t>(*c)];
        }
    }

    // Freezes nodes sitting on an interval endpoint whose field points outward.
    std::vector<int> freeze_at_boundary() {
        std::vector<int> newly;
        Derivative d = net_.eval_field(alpha_, s_, cfg_.eps_eq);
        for (int c = 0; c < net_.dim(); ++c) {
            const Factor& f = net_.factor_of(c);
            int node = net_.node_of(c);
            if (f.kind != Factor::Kind::Interval || s_.node_frozen(node)) continue;
            double v = s_.x[static_cast<std::size_t>(c)];
            double dv = d.dx[static_cast<std::size_t>(c)];
            if ((v >= f.hi && dv > cfg_.eps_eq) || (v <= f.lo && dv < -cfg_.eps_eq)) {
                s_.frozen_nodes.insert(std::upper_bound(s_.frozen_nodes.begin(), s_.frozen_nodes.end(), node), node);
                newly.push_back(node);
            }
        }
        return newly;
    }

    bool all_frozen() const { return static_cast<int>(s_.frozen_nodes.size()) == net_.node_count(); }

    bool check_finished() {
        if (net_.termination_reached(s_.x.data(), s_.tau.data(), cfg_.eps_eq)) {
            tr_.status = RunStatus::ReachedTermination;
            return done_ = true;
        }
        if (all_frozen()) {
            tr_.status = RunStatus::StoppedAtBoundary;
            return done_ = true;
        }
        return false;
    }

    void start() {
        latch_equalities();
        alpha_ = net_.eval_event_map(s_, cfg_.eps_eq);
        unlatch_moving(net_, alpha_, s_, cfg_.eps_eq);
        freeze_at_boundary();
        push_sample();
        check_finished();
    }

    void record(EventRecord ev) {
        if (static_cast<int>(tr_.events.size()) >= cfg_.max_events) throw RunAbort{RunError::MaxEvents, "event limit of " + std::to_string(cfg_.max_events) + " reached"};
        const double t = ev.t;
        if (!tr_.events.empty() && t - tr_.events.back().t <= 100.0 * cfg_.eps_loc) {
            if (++rapid_ > 16) throw RunAbort{RunError::NoContinuation, "no consistent continuation at t=" + format_number(t) + ": the selected field leaves its event set immediately"};
        } else {
            rapid_ = 0;
        }
        tr_.events.push_back(std::move(ev));
        recent_.push_back(t);
        const double window = cfg_.effective_zeno_window();
        while (!recent_.empty() && recent_.front() < t - window) recent_.pop_front();
        if (static_cast<int>(recent_.size()) >= cfg_.zeno_max_events)
            throw RunAbort{RunError::Zeno, std::to_string(recent_.size()) + " events within " + format_number(window) + " s ending at t=" + format_number(t)};
    }

    // Switches to new_alpha at the current state.
    void transition(int new_alpha, EventCause cause, int atom, const std::vector<int>& boundary_coords) {
        const int old = alpha_;
        if (new_alpha != old) {
            const auto& r0 = net_.clock_rates(old);
            const auto& r1 = net_.clock_rates(new_alpha);
            for (int c = 0; c < net_.clock_count(); ++c)
                if (r0[static_cast<std::size_t>(c)] == 0 && r1[static_cast<std::size_t>(c)] == 1 && net_.spec().clocks[static_cast<std::size_t>(c)].reset_on_start)
                    s_.tau[static_cast<std::size_t>(c)] = 0.0;
        }
        alpha_ = new_alpha;
        unlatch_moving(net_, alpha_, s_, cfg_.eps_eq);
        std::vector<int> frozen = freeze_at_boundary();
        if (new_alpha != old) {
            EventRecord ev{s_.t, old, new_alpha, s_, cause, atom, -1};
            if (cause == EventCause::Boundary && !boundary_coords.empty()) ev.node = net_.node_of(boundary_coords.front());
            record(std::move(ev));
            probe_exit();
            if (cfg_.dwell > 0 && guards_) dwell_end_ = s_.t + cfg_.dwell;
        }
        for (int node : frozen) record(EventRecord{s_.t, alpha_, alpha_, s_, EventCause::Boundary, -1, node});
        push_sample();
    }

    // Diagnostic only: the new piece should start inside its own event set.
    void probe_exit() {
        if (!guards_ || tr_.warnings.size() >= 20) return;
        NetworkState y = rk4_step(net_, alpha_, s_, 10.0 * cfg_.eps_loc, cfg_.eps_eq);
        if (net_.eval_event_map(y, cfg_.eps_eq) != alpha_)
            tr_.warnings.push_back("t=" + format_number(s_.t) + ": field of " + net_.structure_name(alpha_) + " leaves its event set immediately");
    }

    void apply_location(const EventLocation& loc, const NetworkState& before) {
        s_ = rk4_step(net_, alpha_, before, loc.dt, cfg_.eps_eq);
        for (int k : loc.clock_atoms) {
            auto [c, K] = *net_.atom_clock_threshold(k);
            auto& tc = s_.tau[static_cast<std::size_t>(c)];
            const Cmp cmp = net_.atom(k).cmp;
            const bool b0 = atom_holds(cmp, net_.atom_value(k, before.x.data(), before.tau.data()), cfg_.eps_eq);
            tc = K;
            if (atom_holds(cmp, net_.atom_value(k, s_.x.data(), s_.tau.data()), cfg_.eps_eq) == b0) tc = std::nextafter(K, std::numeric_limits<double>::infinity());
        }
        if (!loc.clock_atoms.empty() && loc.atoms.empty() && loc.boundary_coords.empty()) {
            // pure clock event: exact time from the clock itself
            auto [c, K] = *net_.atom_clock_threshold(loc.clock_atoms.front());
            s_.t = before.t + (K - before.tau[static_cast<std::size_t>(c)]);
        }
        // Only equalities reached at this event are snapped; one being left stays put.
        for (int k : loc.atoms) {
            if (net_.atom(k).cmp != Cmp::Eq) continue;
            const double g0 = net_.atom_value(k, before.x.data(), before.tau.data());
            const double g1 = net_.atom_value(k, s_.x.data(), s_.tau.data());
            const bool entering = (!atom_holds(Cmp::Eq, g0, cfg_.eps_eq) && atom_holds(Cmp::Eq, g1, cfg_.eps_eq)) || eq_sign_change(g0, g1);
            if (!entering) continue;
            if (auto c = net_.atom_latch_coord(k)) {
                net_.snap_atom(k, s_.x, s_.tau);
                s_.latched[*c] = s_.x[static_cast<std::size_t>(*c)];
            }
        }
        for (int c : loc.boundary_coords) {
            const Factor& f = net_.factor_of(c);
            auto& v = s_.x[static_cast<std::size_t>(c)];
            v = before.x[static_cast<std::size_t>(c)] < f.hi && v >= f.hi ? f.hi : f.lo;
        }
        for (int c = 0; c < net_.dim(); ++c) {
            const Factor& f = net_.factor_of(c);
            if (f.kind == Factor::Kind::Interval) s_.x[static_cast<std::size_t>(c)] = std::clamp(s_.x[static_cast<std::size_t>(c)], f.lo, f.hi);
        }
        latch_equalities(&before);
    }

    void loop(double rate, const AlphaSampler* sampler) {
        Rng rng(cfg_.seed);
        auto draw = [&] { return -std::log(1.0 - uniform01(rng)) / rate; };
        double next_switch = std::numeric_limits<double>::infinity();
        int next_alpha = alpha_;
        // Draws ahead until the sampler actually changes the structure, so
        // no-op draws never split an integration step.
        auto schedule = [&](double from) {
            if (!sampler) return;
            double t = from;
            do {
                t += draw();
                next_alpha = (*sampler)(alpha_, rng);
            } while (next_alpha == alpha_ && t < t_end_);
            next_switch = next_alpha == alpha_ ? std::numeric_limits<double>::infinity() : t;
        };
        schedule(s_.t);
        double grid_t0 = s_.t;
        long long grid_n = 0;
        const double tiny = 1e-12 * std::max(1.0, std::fabs(t_end_));
        while (!done_) {
            if (s_.t >= t_end_ - tiny) {
                flush_outputs(t_end_ + tiny);
                tr_.status = RunStatus::CompletedTmax;
                break;
            }
            // Step targets sit on a grid anchored at the last event, so times do not drift.
            const double grid_next = grid_t0 + static_cast<double>(grid_n + 1) * cfg_.h;
            double target = std::min(grid_next, t_end_);
            if (t_end_ - target < tiny) target = t_end_;
            bool hit_output = false;
            if (next_out_ < outputs_.size() && outputs_[next_out_] <= target) {
                target = outputs_[next_out_];
                hit_output = true;
            }
            bool hit_switch = false;
            if (next_switch <= target) {
                target = next_switch;
                hit_switch = true;
                hit_output = next_out_ < outputs_.size() && outputs_[next_out_] == target;
            }
            bool in_dwell = s_.t < dwell_end_;
            bool dwell_ends = false;
            if (in_dwell && dwell_end_ <= target) {
                target = dwell_end_;
                dwell_ends = true;
                hit_switch = hit_switch && next_switch == target;
                hit_output = next_out_ < outputs_.size() && outputs_[next_out_] == target;
            }
            const double dt = target - s_.t;
            if (dt <= 0) {
                // output or switch time already reached
                if (hit_output) ++next_out_;
                if (hit_switch) stochastic_switch(next_alpha, next_switch, schedule);
                if (hit_output) push_sample();
                continue;
            }

            auto loc = find_event(net_, alpha_, s_, dt, cfg_, guards_ && !in_dwell);
            if (!loc) {
                s_ = rk4_step(net_, alpha_, s_, dt, cfg_.eps_eq);
                s_.t = target;
                if (target >= grid_next) ++grid_n;
                ++steps_;
                tiny_ = 0;
                if (steps_ % cfg_.stride == 0) push_sample();
                if (hit_output) {
                    ++next_out_;
                    push_sample();
                }
                if (hit_switch) stochastic_switch(next_alpha, next_switch, schedule);
                if (dwell_ends && guards_) {
                    int a = net_.eval_event_map(s_, cfg_.eps_eq);
                    if (a != alpha_) transition(a, EventCause::Guard, -1, {});
                }
                check_finished();
                continue;
            }

            const NetworkState before = s_;
            apply_location(*loc, before);
            grid_t0 = s_.t;
            grid_n = 0;
            flush_outputs(s_.t + tiny);
            if (loc->dt <= 100.0 * cfg_.eps_loc) {
                if (++tiny_ > 100000) throw RunAbort{RunError::NoContinuation, "event localization makes no progress at t=" + format_number(s_.t)};
            } else {
                tiny_ = 0;
            }
            EventCause cause = EventCause::Guard;
            int atom = loc->atom;
            if (!loc->clock_atoms.empty() && loc->atoms.empty()) cause = EventCause::ClockThreshold;
            if (!loc->boundary_coords.empty() && loc->atoms.empty() && loc->clock_atoms.empty()) cause = EventCause::Boundary;
            int next = guards_ && !in_dwell ? net_.eval_event_map(s_, cfg_.eps_eq) : alpha_;
            transition(next, cause, atom, loc->boundary_coords);
            check_finished();
        }
    }

    template <class Schedule>
    void stochastic_switch(int a, double t_switch, Schedule& schedule) {
        if (a < 0 || a >= net_.structure_count()) throw std::out_of_range("sampler returned an unknown structure");
        transition(a, EventCause::StochasticSwitch, -1, {});
        schedule(t_switch);
    }
};

}  // namespace

Trajectory integrate(const Network& net, const NetworkState& x0, const IntegratorConfig& cfg) { return Runner(net, cfg, x0).run(true); }

AlphaSampler uniform_other_sampler(const Network& net) {
    const int count = net.structure_count();
    return [count](int current, Rng& rng) {
        if (count < 2) return current;
        int pick = std::min(count - 2, static_cast<int>(uniform01(rng) * (count - 1)));
        return pick >= current ? pick + 1 : pick;
    };
}

AlphaSampler constant_sampler(int a) {
    return [a](int, Rng&) { return a; };
}

Trajectory integrate_stochastic(const Network& net, double rate, const AlphaSampler& sampler, const NetworkState& x0, const IntegratorConfig& cfg) {
    if (!(rate > 0)) throw std::invalid_argument("switching rate must be positive");
    return Runner(net, cfg, x0).run(false, rate, &sampler);
}

}  // namespace asynet
