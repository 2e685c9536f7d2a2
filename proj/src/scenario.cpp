#include "asynet/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "asynet/models.hpp"

namespace asynet {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

ScenarioError::ScenarioError(const std::string& msg, std::size_t l, std::size_t c) : std::runtime_error(msg), line(l), column(c) {}

namespace {

using Path = std::vector<std::string>;

Path operator+(Path p, const std::string& k) {
    p.push_back(k);
    return p;
}
Path operator+(Path p, std::size_t i) {
    p.push_back(std::to_string(i));
    return p;
}

// Finds the byte offset of a value (or of its key) inside raw JSON text.
// nlohmann keeps no positions, so this walks the text again.
class Locator {
public:
    explicit Locator(const std::string& s) : s_(s) {}

    std::size_t find(const Path& path) {
        i_ = 0;
        ws();
        std::size_t best = i_;
        descend(path, 0, best);
        return best;
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;

    void ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    std::string string_token() {
        std::string out;
        ++i_;  // opening quote
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
            out += s_[i_++];
        }
        ++i_;
        return out;
    }
    void skip() {
        ws();
        if (i_ >= s_.size()) return;
        char c = s_[i_];
        if (c == '"') {
            string_token();
        } else if (c == '{' || c == '[') {
            char close = c == '{' ? '}' : ']';
            ++i_;
            ws();
            if (i_ < s_.size() && s_[i_] == close) {
                ++i_;
                return;
            }
            while (i_ < s_.size()) {
                ws();
                if (c == '{') {
                    string_token();
                    ws();
                    ++i_;  // colon
                }
                skip();
                ws();
                if (i_ < s_.size() && s_[i_] == ',') {
                    ++i_;
                    continue;
                }
                ++i_;  // closing bracket
                return;
            }
        } else {
            while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != '}' && s_[i_] != ']' && !std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
    }
    void descend(const Path& path, std::size_t depth, std::size_t& best) {
        ws();
        best = i_;
        if (depth == path.size() || i_ >= s_.size()) return;
        const char c = s_[i_];
        if (c != '{' && c != '[') return;
        ++i_;
        std::size_t index = 0;
        while (i_ < s_.size()) {
            ws();
            if (s_[i_] == '}' || s_[i_] == ']') return;
            if (c == '{') {
                std::size_t key_at = i_;
                std::string key = string_token();
                ws();
                ++i_;
                if (key == path[depth]) {
                    if (depth + 1 == path.size()) {
                        best = key_at;
                        return;
                    }
                    descend(path, depth + 1, best);
                    return;
                }
            } else if (std::to_string(index) == path[depth]) {
                descend(path, depth + 1, best);
                return;
            }
            skip();
            ++index;
            ws();
            if (i_ < s_.size() && s_[i_] == ',') ++i_;
        }
    }
};

std::pair<std::size_t, std::size_t> line_col(const std::string& text, std::size_t offset) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

std::string join_path(const Path& p) {
    std::string out;
    for (const auto& k : p) out += (out.empty() ? "" : ".") + k;
    return out.empty() ? "<root>" : out;
}

class Reader {
public:
    Reader(const std::string& text, std::string origin) : text_(text), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const Path& p, const std::string& msg, std::size_t extra_col = 0) const {
        Locator loc(text_);
        auto [l, c] = line_col(text_, loc.find(p));
        c += extra_col;
        throw ScenarioError(origin_ + ":" + std::to_string(l) + ":" + std::to_string(c) + ": " + join_path(p) + ": " + msg, l, c);
    }

    void keys(const json& j, const Path& p, std::initializer_list<const char*> allowed) const {
        object(j, p);
        std::set<std::string> ok(allowed.begin(), allowed.end());
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (ok.count(it.key())) continue;
            std::string list;
            for (const auto& k : ok) list += (list.empty() ? "" : ", ") + k;
            fail(p + it.key(), "unknown key '" + it.key() + "' (allowed: " + list + ")");
        }
    }
    void object(const json& j, const Path& p) const {
        if (!j.is_object()) fail(p, "expected an object");
    }
    const json& array(const json& j, const Path& p) const {
        if (!j.is_array()) fail(p, "expected an array");
        return j;
    }
    double number(const json& j, const Path& p) const {
        if (!j.is_number()) fail(p, "expected a number");
        return j.get<double>();
    }
    long long integer(const json& j, const Path& p) const {
        if (!j.is_number_integer() && !j.is_number_unsigned()) fail(p, "expected an integer");
        return j.get<long long>();
    }
    std::string string(const json& j, const Path& p) const {
        if (!j.is_string()) fail(p, "expected a string");
        return j.get<std::string>();
    }
    bool boolean(const json& j, const Path& p) const {
        if (!j.is_boolean()) fail(p, "expected true or false");
        return j.get<bool>();
    }
    std::vector<double> numbers(const json& j, const Path& p) const {
        array(j, p);
        std::vector<double> out;
        for (std::size_t k = 0; k < j.size(); ++k) out.push_back(number(j[k], p + k));
        return out;
    }
    Expr expr(const json& j, const Path& p) const {
        std::string s = string(j, p);
        try {
            return Expr::parse(s);
        } catch (const ParseError& e) {
            fail(p, e.what(), e.column);
        }
    }
    Predicate pred(const json& j, const Path& p) const {
        std::string s = string(j, p);
        try {
            return Predicate::parse(s);
        } catch (const ParseError& e) {
            fail(p, e.what(), e.column);
        }
    }

private:
    const std::string& text_;
    std::string origin_;
};

Factor read_factor(const Reader& r, const json& j, const Path& p) {
    if (j.is_string()) {
        std::string k = j.get<std::string>();
        if (k == "real") return Factor::real_line();
        if (k == "circle") return Factor::circle();
        r.fail(p, "factor must be \"real\", \"circle\" or {\"interval\": [lo, hi]}");
    }
    r.keys(j, p, {"interval"});
    if (!j.contains("interval")) r.fail(p, "factor must be \"real\", \"circle\" or {\"interval\": [lo, hi]}");
    auto b = r.numbers(j["interval"], p + "interval");
    if (b.size() != 2 || !(b[0] < b[1])) r.fail(p + "interval", "interval needs two increasing bounds");
    return Factor::interval(b[0], b[1]);
}

void read_config(const Reader& r, const json& j, const Path& p, IntegratorConfig& c) {
    r.keys(j, p, {"h", "eps_loc", "eps_eq", "t_max", "max_events", "dwell", "zeno_window", "zeno_max_events", "seed", "stride", "output_times"});
    if (j.contains("h")) c.h = r.number(j["h"], p + "h");
    if (j.contains("eps_loc")) c.eps_loc = r.number(j["eps_loc"], p + "eps_loc");
    if (j.contains("eps_eq")) c.eps_eq = r.number(j["eps_eq"], p + "eps_eq");
    if (j.contains("t_max")) c.t_max = r.number(j["t_max"], p + "t_max");
    if (j.contains("max_events")) c.max_events = static_cast<int>(r.integer(j["max_events"], p + "max_events"));
    if (j.contains("dwell")) c.dwell = r.number(j["dwell"], p + "dwell");
    if (j.contains("zeno_window")) c.zeno_window = r.number(j["zeno_window"], p + "zeno_window");
    if (j.contains("zeno_max_events")) c.zeno_max_events = static_cast<int>(r.integer(j["zeno_max_events"], p + "zeno_max_events"));
    if (j.contains("seed")) {
        long long s = r.integer(j["seed"], p + "seed");
        if (s < 0) r.fail(p + "seed", "seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (j.contains("stride")) c.stride = static_cast<int>(r.integer(j["stride"], p + "stride"));
    if (j.contains("output_times")) c.output_times = r.numbers(j["output_times"], p + "output_times");
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        r.fail(p, e.what());
    }
}

NetworkSpec read_network(const Reader& r, const json& j, const Path& p) {
    r.keys(j, p, {"name", "nodes", "clocks", "params", "structures", "constraints", "events", "termination", "metadata"});
    NetworkSpec n;
    if (j.contains("name")) n.name = r.string(j["name"], p + "name");
    if (!j.contains("nodes")) r.fail(p, "missing key 'nodes'");
    const auto& nodes = r.array(j["nodes"], p + "nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        Path q = p + "nodes" + i;
        r.keys(nodes[i], q, {"name", "factors", "constraints"});
        NodeSpec nd;
        if (nodes[i].contains("name")) nd.name = r.string(nodes[i]["name"], q + "name");
        if (!nodes[i].contains("factors")) r.fail(q, "missing key 'factors'");
        const auto& fs = r.array(nodes[i]["factors"], q + "factors");
        if (fs.empty()) r.fail(q + "factors", "a node needs at least one factor");
        for (std::size_t k = 0; k < fs.size(); ++k) nd.factors.push_back(read_factor(r, fs[k], q + "factors" + k));
        if (nodes[i].contains("constraints")) nd.constraint_count = static_cast<int>(r.integer(nodes[i]["constraints"], q + "constraints"));
        n.nodes.push_back(std::move(nd));
    }
    int dim = 0;
    for (const auto& nd : n.nodes) dim += static_cast<int>(nd.factors.size());

    if (j.contains("clocks")) {
        const auto& cs = r.array(j["clocks"], p + "clocks");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            Path q = p + "clocks" + i;
            if (cs[i].is_string()) {
                n.clocks.push_back({cs[i].get<std::string>(), false});
                continue;
            }
            r.keys(cs[i], q, {"name", "reset_on_start"});
            if (!cs[i].contains("name")) r.fail(q, "missing key 'name'");
            ClockSpec c{r.string(cs[i]["name"], q + "name"), false};
            if (cs[i].contains("reset_on_start")) c.reset_on_start = r.boolean(cs[i]["reset_on_start"], q + "reset_on_start");
            n.clocks.push_back(c);
        }
    }
    if (j.contains("params")) {
        r.object(j["params"], p + "params");
        for (auto it = j["params"].begin(); it != j["params"].end(); ++it) n.params[it.key()] = r.number(it.value(), p + "params" + it.key());
    }

    std::set<std::string> clock_names;
    for (const auto& c : n.clocks) clock_names.insert(c.name);
    auto check_refs = [&](const std::set<std::string>& params, const std::set<std::string>& clocks, const Path& q) {
        for (const auto& name : params)
            if (!n.params.count(name)) r.fail(q, "undeclared parameter '" + name + "'");
        for (const auto& name : clocks)
            if (!clock_names.count(name)) r.fail(q, "undeclared clock '" + name + "'");
    };
    auto check_expr = [&](const Expr& e, const Path& q) {
        check_refs(e.param_refs(), e.clock_refs(), q);
        for (auto [node, coord] : e.state_refs()) {
            if (node < 0 || node >= static_cast<int>(n.nodes.size()) || coord < 0 || coord >= static_cast<int>(n.nodes[static_cast<std::size_t>(node)].factors.size()))
                r.fail(q, "state reference x[" + std::to_string(node) + "][" + std::to_string(coord) + "] out of range");
        }
    };
    auto check_pred = [&](const Predicate& pr, const Path& q) {
        for (const auto& a : pr.atoms()) {
            check_expr(a.lhs, q);
            check_expr(a.rhs, q);
        }
    };

    if (!j.contains("structures")) r.fail(p, "missing key 'structures'");
    const auto& ss = r.array(j["structures"], p + "structures");
    const int k = static_cast<int>(n.nodes.size());
    for (std::size_t a = 0; a < ss.size(); ++a) {
        Path q = p + "structures" + a;
        r.keys(ss[a], q, {"name", "matrix", "field", "clock_rates"});
        if (!ss[a].contains("name")) r.fail(q, "missing key 'name'");
        std::string name = r.string(ss[a]["name"], q + "name");
        if (std::find(n.structure_names.begin(), n.structure_names.end(), name) != n.structure_names.end()) r.fail(q + "name", "duplicate structure '" + name + "'");
        std::vector<std::vector<int>> rows;
        if (ss[a].contains("matrix")) {
            const auto& m = r.array(ss[a]["matrix"], q + "matrix");
            if (static_cast<int>(m.size()) != k) r.fail(q + "matrix", "matrix needs one row per node");
            for (std::size_t i = 0; i < m.size(); ++i) {
                const auto& row = r.array(m[i], q + "matrix" + i);
                if (static_cast<int>(row.size()) != k + 1) r.fail(q + "matrix" + i, "row needs " + std::to_string(k + 1) + " entries");
                std::vector<int> rr;
                for (std::size_t c = 0; c < row.size(); ++c) rr.push_back(static_cast<int>(r.integer(row[c], q + "matrix" + i + c)));
                rows.push_back(std::move(rr));
            }
        } else {
            rows.assign(static_cast<std::size_t>(k), std::vector<int>(static_cast<std::size_t>(k + 1), 0));
        }
        try {
            n.structures.emplace_back(rows);
        } catch (const std::exception& e) {
            r.fail(q + "matrix", e.what());
        }
        n.structure_names.push_back(name);
        if (ss[a].contains("field")) {
            VectorFieldSpec f;
            const auto& fe = r.array(ss[a]["field"], q + "field");
            if (static_cast<int>(fe.size()) != dim) r.fail(q + "field", "field needs " + std::to_string(dim) + " components");
            for (std::size_t c = 0; c < fe.size(); ++c) {
                f.coords.push_back(r.expr(fe[c], q + "field" + c));
                check_expr(f.coords.back(), q + "field" + c);
            }
            if (ss[a].contains("clock_rates")) {
                const auto& cr = r.array(ss[a]["clock_rates"], q + "clock_rates");
                if (cr.size() != n.clocks.size()) r.fail(q + "clock_rates", "one rate per clock expected");
                for (std::size_t c = 0; c < cr.size(); ++c) {
                    long long v = r.integer(cr[c], q + "clock_rates" + c);
                    if (v != 0 && v != 1) r.fail(q + "clock_rates" + c, "clock rates are 0 or 1");
                    f.clock_rates.push_back(static_cast<int>(v));
                }
            } else {
                f.clock_rates.assign(n.clocks.size(), 0);
            }
            n.fields[name] = std::move(f);
        } else if (ss[a].contains("clock_rates")) {
            r.fail(q + "clock_rates", "clock_rates given without a field");
        }
    }

    if (j.contains("constraints")) {
        const auto& cs = r.array(j["constraints"], p + "constraints");
        for (std::size_t i = 0; i < cs.size(); ++i) {
            Path q = p + "constraints" + i;
            r.keys(cs[i], q, {"node", "index", "region", "frozen"});
            ConstraintSpec c;
            if (!cs[i].contains("node")) r.fail(q, "missing key 'node'");
            c.node = static_cast<int>(r.integer(cs[i]["node"], q + "node"));
            if (cs[i].contains("index")) c.index = static_cast<int>(r.integer(cs[i]["index"], q + "index"));
            if (cs[i].contains("region")) {
                c.region = r.pred(cs[i]["region"], q + "region");
                check_pred(c.region, q + "region");
            }
            if (cs[i].contains("frozen")) {
                const auto& fz = r.array(cs[i]["frozen"], q + "frozen");
                for (std::size_t z = 0; z < fz.size(); ++z) c.frozen.push_back(static_cast<int>(r.integer(fz[z], q + "frozen" + z)));
            }
            n.constraints.push_back(std::move(c));
        }
    }

    if (!j.contains("events")) r.fail(p, "missing key 'events'");
    {
        Path q = p + "events";
        r.keys(j["events"], q, {"rules", "default"});
        if (!j["events"].contains("default")) r.fail(q, "missing key 'default'");
        n.events.default_target = r.string(j["events"]["default"], q + "default");
        if (std::find(n.structure_names.begin(), n.structure_names.end(), n.events.default_target) == n.structure_names.end())
            r.fail(q + "default", "unknown structure '" + n.events.default_target + "'");
        if (j["events"].contains("rules")) {
            const auto& rs = r.array(j["events"]["rules"], q + "rules");
            for (std::size_t i = 0; i < rs.size(); ++i) {
                Path qr = q + "rules" + i;
                r.keys(rs[i], qr, {"when", "target"});
                if (!rs[i].contains("when") || !rs[i].contains("target")) r.fail(qr, "a rule needs 'when' and 'target'");
                EventRule rule{r.pred(rs[i]["when"], qr + "when"), r.string(rs[i]["target"], qr + "target")};
                check_pred(rule.when, qr + "when");
                if (std::find(n.structure_names.begin(), n.structure_names.end(), rule.target) == n.structure_names.end())
                    r.fail(qr + "target", "unknown structure '" + rule.target + "'");
                n.events.rules.push_back(std::move(rule));
            }
        }
    }

    if (j.contains("termination")) {
        Path q = p + "termination";
        r.keys(j["termination"], q, {"targets", "initialization"});
        TerminationSpec t;
        auto read_list = [&](const char* key, std::vector<Predicate>& out) {
            if (!j["termination"].contains(key)) return;
            const auto& a = r.array(j["termination"][key], q + key);
            if (static_cast<int>(a.size()) != k) r.fail(q + key, "one predicate per node expected");
            for (std::size_t i = 0; i < a.size(); ++i) {
                out.push_back(r.pred(a[i], q + key + i));
                check_pred(out.back(), q + key + i);
            }
        };
        read_list("targets", t.targets);
        read_list("initialization", t.initialization);
        if (t.targets.empty()) r.fail(q, "termination needs 'targets'");
        n.termination = std::move(t);
    }
    if (j.contains("metadata")) {
        r.object(j["metadata"], p + "metadata");
        for (auto it = j["metadata"].begin(); it != j["metadata"].end(); ++it) n.metadata[it.key()] = r.string(it.value(), p + "metadata" + it.key());
    }
    return n;
}

ojson network_to_json(const NetworkSpec& n) {
    ojson j;
    j["name"] = n.name;
    ojson nodes = ojson::array();
    for (const auto& nd : n.nodes) {
        ojson o;
        o["name"] = nd.name;
        ojson fs = ojson::array();
        for (const auto& f : nd.factors) {
            if (f.kind == Factor::Kind::RealLine) fs.push_back("real");
            else if (f.kind == Factor::Kind::Circle) fs.push_back("circle");
            else fs.push_back(ojson{{"interval", {f.lo, f.hi}}});
        }
        o["factors"] = fs;
        o["constraints"] = nd.constraint_count;
        nodes.push_back(o);
    }
    j["nodes"] = nodes;
    ojson clocks = ojson::array();
    for (const auto& c : n.clocks) clocks.push_back(ojson{{"name", c.name}, {"reset_on_start", c.reset_on_start}});
    j["clocks"] = clocks;
    j["params"] = ojson::object();
    for (const auto& [k, v] : n.params) j["params"][k] = v;
    ojson ss = ojson::array();
    for (std::size_t a = 0; a < n.structures.size(); ++a) {
        ojson o;
        o["name"] = n.structure_names[a];
        o["matrix"] = n.structures[a].rows();
        auto it = n.fields.find(n.structure_names[a]);
        if (it != n.fields.end()) {
            ojson f = ojson::array();
            for (const auto& e : it->second.coords) f.push_back(e.str());
            o["field"] = f;
            o["clock_rates"] = it->second.clock_rates;
        }
        ss.push_back(o);
    }
    j["structures"] = ss;
    ojson cs = ojson::array();
    for (const auto& c : n.constraints) cs.push_back(ojson{{"node", c.node}, {"index", c.index}, {"region", c.region.str()}, {"frozen", c.frozen}});
    j["constraints"] = cs;
    ojson rules = ojson::array();
    for (const auto& r : n.events.rules) rules.push_back(ojson{{"when", r.when.str()}, {"target", r.target}});
    j["events"] = ojson{{"rules", rules}, {"default", n.events.default_target}};
    if (n.termination) {
        ojson t;
        ojson targets = ojson::array();
        for (const auto& p : n.termination->targets) targets.push_back(p.str());
        t["targets"] = targets;
        if (!n.termination->initialization.empty()) {
            ojson init = ojson::array();
            for (const auto& p : n.termination->initialization) init.push_back(p.str());
            t["initialization"] = init;
        }
        j["termination"] = t;
    }
    if (!n.metadata.empty()) {
        j["metadata"] = ojson::object();
        for (const auto& [k, v] : n.metadata) j["metadata"][k] = v;
    }
    return j;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        auto [l, c] = line_col(text, e.byte > 0 ? e.byte - 1 : 0);
        throw ScenarioError(origin + ":" + std::to_string(l) + ":" + std::to_string(c) + ": malformed JSON: " + e.what(), l, c);
    }
    Reader r(text, origin);
    r.keys(j, {}, {"description", "preset", "params", "network", "initial", "config", "stochastic"});
    Scenario s;
    if (j.contains("description")) s.description = r.string(j["description"], {"description"});
    const bool has_preset = j.contains("preset"), has_net = j.contains("network");
    if (has_preset == has_net) r.fail({}, "exactly one of 'preset' and 'network' is required");

    const Preset* preset = nullptr;
    if (has_preset) {
        s.preset = r.string(j["preset"], {"preset"});
        preset = find_preset(s.preset);
        if (!preset) {
            std::string names;
            for (const auto& p : presets()) names += (names.empty() ? "" : ", ") + p.name;
            r.fail({"preset"}, "unknown model '" + s.preset + "' (known: " + names + ")");
        }
        s.config = preset->config;
        if (j.contains("params")) {
            r.object(j["params"], {"params"});
            for (auto it = j["params"].begin(); it != j["params"].end(); ++it) {
                if (!preset->defaults.count(it.key())) r.fail({"params", it.key()}, "undeclared parameter '" + it.key() + "' for model '" + s.preset + "'");
                s.params[it.key()] = r.number(it.value(), {"params", it.key()});
            }
        }
    } else {
        if (j.contains("params")) r.fail({"params"}, "'params' overrides a preset; put declarative parameters under network.params");
        s.network = read_network(r, j["network"], {"network"});
    }

    if (j.contains("initial")) {
        r.keys(j["initial"], {"initial"}, {"x", "tau", "t"});
        if (j["initial"].contains("x")) s.x0 = r.numbers(j["initial"]["x"], {"initial", "x"});
        if (j["initial"].contains("tau")) s.tau0 = r.numbers(j["initial"]["tau"], {"initial", "tau"});
        if (j["initial"].contains("t")) s.t0 = r.number(j["initial"]["t"], {"initial", "t"});
    }
    if (!preset && !s.x0) r.fail({}, "a declarative network needs initial.x");
    if (j.contains("config")) read_config(r, j["config"], {"config"}, s.config);
    if (j.contains("stochastic")) {
        r.keys(j["stochastic"], {"stochastic"}, {"rate", "sampler"});
        StochasticSpec st;
        if (j["stochastic"].contains("rate")) st.rate = r.number(j["stochastic"]["rate"], {"stochastic", "rate"});
        if (!(st.rate > 0)) r.fail({"stochastic", "rate"}, "rate must be positive");
        if (j["stochastic"].contains("sampler")) st.sampler = r.string(j["stochastic"]["sampler"], {"stochastic", "sampler"});
        s.stochastic = st;
    }

    // Build once so model and validation errors surface at parse time.
    Network net = [&]() {
        try {
            return build_network(s);
        } catch (const std::exception& e) {
            r.fail({has_preset ? "params" : "network"}, e.what());
        }
    }();
    auto problems = validate_network(net);
    if (!problems.empty()) {
        std::string all;
        for (const auto& p : problems) all += "\n  " + p;
        r.fail({has_preset ? "preset" : "network"}, "network fails validation:" + all);
    }
    if (s.stochastic && s.stochastic->sampler != "uniform_other" && net.structure_index(s.stochastic->sampler) < 0)
        r.fail({"stochastic", "sampler"}, "sampler must be 'uniform_other' or a structure name");
    try {
        initial_state(s, net);
    } catch (const std::invalid_argument& e) {
        r.fail({"initial"}, e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path);
}

ojson scenario_to_json(const Scenario& s) {
    ojson j;
    if (!s.description.empty()) j["description"] = s.description;
    if (!s.preset.empty()) {
        j["preset"] = s.preset;
        j["params"] = ojson::object();
        for (const auto& [k, v] : s.params) j["params"][k] = v;
    } else if (s.network) {
        j["network"] = network_to_json(*s.network);
    }
    if (s.x0 || s.tau0 || s.t0 != 0.0) {
        ojson init = ojson::object();
        if (s.x0) init["x"] = *s.x0;
        if (s.tau0) init["tau"] = *s.tau0;
        if (s.t0 != 0.0) init["t"] = s.t0;
        j["initial"] = init;
    }
    const auto& c = s.config;
    j["config"] = ojson{{"h", c.h},
                        {"eps_loc", c.eps_loc},
                        {"eps_eq", c.eps_eq},
                        {"t_max", c.t_max},
                        {"max_events", c.max_events},
                        {"dwell", c.dwell},
                        {"zeno_window", c.zeno_window},
                        {"zeno_max_events", c.zeno_max_events},
                        {"seed", c.seed},
                        {"stride", c.stride},
                        {"output_times", c.output_times}};
    if (s.stochastic) j["stochastic"] = ojson{{"rate", s.stochastic->rate}, {"sampler", s.stochastic->sampler}};
    return j;
}

std::string print_scenario(const Scenario& s) { return scenario_to_json(s).dump(2) + "\n"; }

Network build_network(const Scenario& s) {
    if (s.network) return Network(*s.network);
    const Preset* p = find_preset(s.preset);
    if (!p) throw std::invalid_argument("unknown model '" + s.preset + "'");
    return p->build(preset_params(*p, s.params));
}

NetworkState initial_state(const Scenario& s, const Network& net) {
    if (s.x0) return net.make_state(*s.x0, s.tau0.value_or(std::vector<double>{}), s.t0);
    const Preset* p = find_preset(s.preset);
    if (!p) throw std::invalid_argument("no initial state given");
    NetworkState x = p->initial(net, preset_params(*p, s.params));
    if (s.tau0) {
        if (s.tau0->size() != x.tau.size()) throw std::invalid_argument("clock vector has wrong length");
        x.tau = *s.tau0;
    }
    x.t = s.t0;
    return x;
}

Trajectory run_scenario(const Scenario& s, const Network& net, std::optional<std::uint64_t> seed) {
    IntegratorConfig cfg = s.config;
    if (seed) cfg.seed = *seed;
    NetworkState x0 = initial_state(s, net);
    if (!s.stochastic) return integrate(net, x0, cfg);
    AlphaSampler sampler = s.stochastic->sampler == "uniform_other" ? uniform_other_sampler(net) : constant_sampler(net.structure_index(s.stochastic->sampler));
    return integrate_stochastic(net, s.stochastic->rate, sampler, x0, cfg);
}

namespace {

std::string num17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> scaled(const Network& net, const std::vector<double>& x, const OutputOptions& opt) {
    std::vector<double> out = x;
    if (!opt.turns) return out;
    for (std::size_t c = 0; c < out.size(); ++c)
        if (net.factor_of(static_cast<int>(c)).kind == Factor::Kind::Circle) out[c] /= 2.0 * std::numbers::pi;
    return out;
}

ojson state_json(const Network& net, const NetworkState& s, const OutputOptions& opt) { return ojson{{"x", scaled(net, s.x, opt)}, {"tau", s.tau}}; }

ojson structure_or_null(const Network& net, int a) { return a >= 0 ? ojson(net.structure_name(a)) : ojson(nullptr); }

}  // namespace

void write_trajectory_csv(std::ostream& os, const Network& net, const Trajectory& tr, const OutputOptions& opt) {
    os << "t";
    for (const auto& l : net.coordinate_labels()) os << ',' << l;
    for (const auto& c : net.spec().clocks) os << ",tau[" << c.name << ']';
    os << ",alpha\n";
    for (const auto& s : tr.samples) {
        os << num17(s.t);
        for (double v : scaled(net, s.x, opt)) os << ',' << num17(v);
        for (double v : s.tau) os << ',' << num17(v);
        os << ',' << (s.alpha >= 0 ? net.structure_name(s.alpha) : std::string()) << '\n';
    }
}

ojson events_json(const Network& net, const Trajectory& tr, const OutputOptions& opt) {
    ojson out = ojson::array();
    for (const auto& e : tr.events) {
        out.push_back(ojson{{"t", e.t}, {"from", structure_or_null(net, e.from)}, {"to", structure_or_null(net, e.to)}, {"cause", to_string(e.cause)}, {"state", state_json(net, e.state, opt)}});
    }
    if (tr.status == RunStatus::Error) {
        out.push_back(ojson{{"t", tr.final_state.t},
                            {"from", structure_or_null(net, tr.final_alpha)},
                            {"to", nullptr},
                            {"cause", "error"},
                            {"state", state_json(net, tr.final_state, opt)},
                            {"error", to_string(tr.error)},
                            {"message", tr.message}});
    }
    return out;
}

}  // namespace asynet
