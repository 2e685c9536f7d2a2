#include "asynet/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <numbers>

namespace asynet {

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

StateSampler::StateSampler(const Network& net, SampleBox box) : net_(net), box_(box) {}

NetworkState StateSampler::any(Rng& rng) const {
    NetworkState s;
    s.x.resize(static_cast<std::size_t>(net_.dim()));
    for (int c = 0; c < net_.dim(); ++c) {
        const Factor& f = net_.factor_of(c);
        double u = uniform01(rng);
        switch (f.kind) {
            case Factor::Kind::Interval: s.x[static_cast<std::size_t>(c)] = f.lo + u * (f.hi - f.lo); break;
            case Factor::Kind::RealLine: s.x[static_cast<std::size_t>(c)] = (2.0 * u - 1.0) * box_.real_half_width; break;
            case Factor::Kind::Circle: s.x[static_cast<std::size_t>(c)] = 2.0 * std::numbers::pi * u; break;
        }
    }
    s.tau.resize(static_cast<std::size_t>(net_.clock_count()));
    for (auto& t : s.tau) t = uniform01(rng) * box_.clock_max;
    return s;
}

void StateSampler::snap(const Network::CPred& p, NetworkState& s, Rng& rng) const {
    switch (p.kind) {
        case PredNode::Kind::Atom:
            if (net_.atom(p.atom).cmp == Cmp::Eq) net_.snap_atom(p.atom, s.x, s.tau);
            return;
        case PredNode::Kind::And:
            for (const auto& k : p.kids) snap(k, s, rng);
            return;
        case PredNode::Kind::Or: {
            auto pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(p.kids.size()));
            snap(p.kids[std::min(pick, p.kids.size() - 1)], s, rng);
            return;
        }
        default: return;
    }
}

NetworkState StateSampler::near_rule(int r, Rng& rng) const {
    NetworkState s = any(rng);
    snap(net_.rule_pred(r), s, rng);
    for (int c = 0; c < net_.dim(); ++c) {
        const Factor& f = net_.factor_of(c);
        auto& v = s.x[static_cast<std::size_t>(c)];
        if (f.kind == Factor::Kind::Interval) v = std::min(std::max(v, f.lo), f.hi);
    }
    return s;
}

NetworkState StateSampler::mixed(Rng& rng) const {
    int rules = static_cast<int>(net_.spec().events.rules.size());
    if (rules == 0 || uniform01(rng) < 0.5) return any(rng);
    int r = std::min(rules - 1, static_cast<int>(uniform01(rng) * rules));
    return near_rule(r, rng);
}

bool StateSampler::in_event_set(int a, Rng& rng, NetworkState& out, int max_tries) const {
    std::vector<int> rules;
    for (int r = 0; r < static_cast<int>(net_.spec().events.rules.size()); ++r)
        if (net_.rule_target(r) == a) rules.push_back(r);
    for (int t = 0; t < max_tries; ++t) {
        NetworkState s;
        if (!rules.empty() && (net_.default_target() != a || t % 2 == 0)) {
            int r = rules[std::min(rules.size() - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(rules.size())))];
            s = near_rule(r, rng);
        } else {
            s = any(rng);
        }
        if (net_.eval_event_map(s) == a) {
            out = std::move(s);
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------- admissibility

AdmissibilityReport check_admissibility(const Network& net, int alpha, int n_samples, std::uint64_t seed, SampleBox box) {
    AdmissibilityReport rep;
    rep.structure = net.structure_name(alpha);
    rep.samples = n_samples;
    const int k = net.node_count();
    const int n = net.dim();
    const auto& st = net.structure(alpha);
    const auto& L = net.layout();
    Rng rng(seed);
    StateSampler sampler(net, box);

    // sensitive[i][j]: samples where f_i reacts to node j
    std::vector<std::vector<int>> sensitive(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k), 0));
    std::vector<int> in_region(static_cast<std::size_t>(k), 0), tangency_hits(static_cast<std::size_t>(k), 0);

    struct Region {
        Network::CPred pred;
        std::vector<Program> progs;
        std::vector<Cmp> cmps;
        std::vector<int> frozen;
    };
    std::vector<std::optional<Region>> regions(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        int ell = st.constraint(i);
        if (ell == 0) continue;
        const ConstraintSpec* c = net.constraint_spec(i, ell);
        if (!c) continue;
        Region r;
        r.pred = net.compile_pred(c->region, r.progs, r.cmps);
        for (int fc : c->frozen) r.frozen.push_back(L.offsets[static_cast<std::size_t>(i)] + fc);
        regions[static_cast<std::size_t>(i)] = std::move(r);
    }
    auto region_holds = [](const Region& r, const double* x, const double* tau) {
        std::function<bool(const Network::CPred&)> walk = [&](const Network::CPred& p) -> bool {
            switch (p.kind) {
                case PredNode::Kind::True: return true;
                case PredNode::Kind::False: return false;
                case PredNode::Kind::Atom: return atom_holds(r.cmps[static_cast<std::size_t>(p.atom)], r.progs[static_cast<std::size_t>(p.atom)].eval(x, tau), 0.0);
                case PredNode::Kind::Not: return !walk(p.kids[0]);
                case PredNode::Kind::And:
                    for (const auto& q : p.kids)
                        if (!walk(q)) return false;
                    return true;
                case PredNode::Kind::Or:
                    for (const auto& q : p.kids)
                        if (walk(q)) return true;
                    return false;
            }
            return false;
        };
        return walk(r.pred);
    };

    std::vector<double> f0(static_cast<std::size_t>(n)), fp(static_cast<std::size_t>(n)), fm(static_cast<std::size_t>(n));
    for (int s = 0; s < n_samples; ++s) {
        NetworkState X = sampler.any(rng);
        net.eval_field(alpha, X.x.data(), X.tau.data(), f0.data());
        std::vector<std::vector<char>> hit(static_cast<std::size_t>(k), std::vector<char>(static_cast<std::size_t>(k), 0));
        for (int c = 0; c < n; ++c) {
            int j = net.node_of(c);
            double xc = X.x[static_cast<std::size_t>(c)];
            double h = 1e-6 * std::max(1.0, std::fabs(xc));
            X.x[static_cast<std::size_t>(c)] = xc + h;
            net.eval_field(alpha, X.x.data(), X.tau.data(), fp.data());
            X.x[static_cast<std::size_t>(c)] = xc - h;
            net.eval_field(alpha, X.x.data(), X.tau.data(), fm.data());
            X.x[static_cast<std::size_t>(c)] = xc;
            for (int q = 0; q < n; ++q) {
                int i = net.node_of(q);
                if (i == j) continue;
                double d = (fp[static_cast<std::size_t>(q)] - fm[static_cast<std::size_t>(q)]) / (2.0 * h);
                double noise = 1e-9 * (1.0 + std::fabs(f0[static_cast<std::size_t>(q)])) / h;
                if (std::fabs(d) > std::max(1e-6, noise)) hit[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = 1;
            }
        }
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) sensitive[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += hit[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        for (int i = 0; i < k; ++i) {
            const auto& r = regions[static_cast<std::size_t>(i)];
            if (!r || !region_holds(*r, X.x.data(), X.tau.data())) continue;
            ++in_region[static_cast<std::size_t>(i)];
            for (int fc : r->frozen)
                if (std::fabs(f0[static_cast<std::size_t>(fc)]) > kDefaultEpsEq) {
                    ++tangency_hits[static_cast<std::size_t>(i)];
                    break;
                }
        }
    }

    const auto& names = net.spec().nodes;
    auto label = [&](int i) { return names[static_cast<std::size_t>(i)].name.empty() ? "node " + std::to_string(i) : names[static_cast<std::size_t>(i)].name; };
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            if (i == j) continue;
            int cnt = sensitive[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!st.depends(i, j) && cnt > 0) {
                rep.violations.push_back({Finding::Kind::Dependency, i, j, cnt, n_samples, label(i) + " depends on " + label(j) + " without a connection"});
            } else if (st.depends(i, j) && cnt == 0) {
                rep.warnings.push_back({Finding::Kind::Nontriviality, i, j, 0, n_samples, label(i) + " shows no sensitivity to " + label(j) + " at this sample size"});
            }
        }
        if (tangency_hits[static_cast<std::size_t>(i)] > 0)
            rep.violations.push_back({Finding::Kind::Tangency, i, -1, tangency_hits[static_cast<std::size_t>(i)], in_region[static_cast<std::size_t>(i)], label(i) + " moves a frozen coordinate"});
    }
    return rep;
}

// ---------------------------------------------------------------- regularity

bool RegularityReport::ok() const {
    for (const auto& e : entries)
        if (e.flagged > 0) return false;
    return true;
}

RegularityReport check_constraint_regularity(const Network& net, int n_samples, double margin, std::uint64_t seed, SampleBox box) {
    RegularityReport rep;
    Rng rng(seed);
    StateSampler sampler(net, box);
    for (int a = 0; a < net.structure_count(); ++a) {
        const auto& st = net.structure(a);
        if (st.k() != net.node_count()) continue;
        for (int i = 0; i < net.node_count(); ++i) {
            int ell = st.constraint(i);
            if (ell == 0) continue;
            const ConstraintSpec* c = net.constraint_spec(i, ell);
            if (!c) continue;
            RegularityFinding f;
            f.structure = net.structure_name(a);
            f.node = i;
            f.constraint = ell;
            std::vector<Program> progs;
            std::vector<Cmp> cmps;
            auto pred = net.compile_pred(c->region, progs, cmps);
            std::function<bool(const Network::CPred&, const NetworkState&)> holds = [&](const Network::CPred& p, const NetworkState& s) -> bool {
                switch (p.kind) {
                    case PredNode::Kind::True: return true;
                    case PredNode::Kind::False: return false;
                    case PredNode::Kind::Atom: return atom_holds(cmps[static_cast<std::size_t>(p.atom)], progs[static_cast<std::size_t>(p.atom)].eval(s.x.data(), s.tau.data()), 0.0);
                    case PredNode::Kind::Not: return !holds(p.kids[0], s);
                    case PredNode::Kind::And:
                        for (const auto& q : p.kids)
                            if (!holds(q, s)) return false;
                        return true;
                    case PredNode::Kind::Or:
                        for (const auto& q : p.kids)
                            if (holds(q, s)) return true;
                        return false;
                }
                return false;
            };
            for (int t = 0; t < n_samples; ++t) {
                NetworkState s;
                if (!sampler.in_event_set(a, rng, s, 50)) continue;
                ++f.samples;
                bool bad = !holds(pred, s);
                for (const auto& prog : progs)
                    if (std::fabs(prog.eval(s.x.data(), s.tau.data())) < margin) bad = true;
                if (bad) {
                    if (f.flagged == 0) f.example = s;
                    ++f.flagged;
                }
            }
            rep.entries.push_back(std::move(f));
        }
    }
    return rep;
}

}  // namespace asynet
