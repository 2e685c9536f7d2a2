#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "asynet/integrator.hpp"
#include "asynet/network.hpp"

namespace asynet {

// ---------------------------------------------------------------- trains

struct TrainsParams {
    double a = 1.0, b = 1.0;      // track [-a, b], passing loop at 0
    std::string V1 = "1";         // speed of train 1, may use x[0][0]; must stay > 0
    std::string V2 = "-1";        // speed of train 2, may use x[1][0]; must stay < 0
    double S = 1.0, S1 = 0.0, S2 = 0.0;
    double T1 = 0.0, T2 = 0.0;    // start delays

    void validate() const;
};

struct OscillatorParams {
    double omega1 = 1.0, omega2 = 1.0;  // rad/s
    double kc = 0.5;
    double eps = 0.1;                   // turns

    void validate() const;
};

// Clocks tau1, tau2, tau; an extra clock "depart" only when a start delay is positive.
Network build_trains(const TrainsParams& p);
// Node i becomes (x_i, theta_i); theta in radians.
Network build_trains_oscillators(const TrainsParams& p, const OscillatorParams& q);
// Whether arcsin(|w1 - w2| / (2 kc)) < 2 pi eps, with the frequency gap taken in turns per second.
bool oscillator_gate_feasible(const OscillatorParams& q, std::string* why = nullptr);
// Clock-free network with structures alpha1, alpha2, empty. Needs zero thresholds.
Network build_trains_zero_threshold(const TrainsParams& p);
NetworkState trains_initial_state(const Network& net, double x1, double x2);

// Quadrant construction with sliding on the positive x2 and negative x1 half axes.
struct FilippovTrajectory {
    std::vector<double> t;
    std::vector<std::array<double, 2>> x;
    std::vector<std::string> mode;  // mode active on arrival at each sample
};
FilippovTrajectory filippov_reference(const TrainsParams& p, std::array<double, 2> x0, const std::vector<double>& times, double h = 1e-3);

struct FilippovComparison {
    double sup_deviation = 0.0;
    double worst_t = 0.0;
    int points = 0;
    bool pass = false;  // sup_deviation < tol
};
FilippovComparison compare_filippov(const TrainsParams& p, std::array<double, 2> x0, double t_end = 3.0, int points = 301, double tol = 1e-4, double h = 1e-3);

// ---------------------------------------------------------------- combining trains

struct CombineParams {
    double V1 = 1.0, V2 = 1.0, V12 = 1.0;
    double S1 = 0.5, S2 = 0.5;
};

struct CombineNetworks {
    Network a;  // (x1, x2) plus clock tau; terminates when tau reaches S1 at the loop
    Network b;  // x12 plus clock tau
};
CombineNetworks build_combine(const CombineParams& p);
// (x1, x2, tau) -> (x12 = 0, tau)
NetworkState combine_state(const Network& b, const NetworkState& a_final);
// Inverse construction: one train into two, the clock duplicated.
Network build_split(const CombineParams& p);
NetworkState split_state(const Network& split, const NetworkState& combined);

struct CombineRun {
    Trajectory before;
    Trajectory after;
    bool handed_over = false;
    double handover_t = 0.0;
    double departure_t = -1.0;  // first time x12 leaves the loop
};
CombineRun run_combine(const CombineParams& p, double x1, double x2, const IntegratorConfig& cfg);

// ---------------------------------------------------------------- small fixtures

Network build_conex(double v1 = 1.0, double v2 = 1.0, double w1 = 1.0, double w2 = 1.3, double k = 1.0, double eps = 0.05);
Network build_collision();
Network build_amex();
Network build_path_no_sliding();
Network build_spiral_zeno(double c = 0.9);
// first = event map that depends on the other node; second = separable map.
// bad_beta puts (v1, v2) on beta instead of (0, 0).
Network build_struc_indecomp(bool second_map, bool bad_beta, double v1 = 1.0, double v2 = 1.0);

// ---------------------------------------------------------------- power grids

struct PowerGridNode {
    std::string name;
    bool second_order = true;
    double M = 1.0;      // inertia, second-order nodes only
    double D = 1.0;      // damping
    double omega = 0.0;  // power injection or drive
};

struct PowerGridParams {
    std::vector<PowerGridNode> nodes;
    std::vector<std::vector<double>> a;    // coupling magnitudes, a[i][j] acts on node i
    std::vector<std::vector<double>> phi;  // phase shifts; empty means zero
    std::vector<std::vector<double>> T;    // trip thresholds; empty or >= pi/2 means never
    bool latched = true;

    void validate() const;
};

Network build_powergrid(const PowerGridParams& p);
PowerGridParams two_node_grid(double P = 0.5, double k = 1.0, double damping = 1.0, double T12 = 1.5707963267948966);
PowerGridParams first_order_ring(int n = 5, std::uint64_t seed = 1);

// ---------------------------------------------------------------- microgrid

struct MicrogridParams {
    double B_M = 10.0, B_low = 1.0, B_high = 8.0;
    double r_ch = 1.0, p_dis = 1.0, r_grid = 1.0;
    double O0 = 2.0, A_O = 0.0, w_O = 1.0;  // O(t) = O0 + A_O sin(w_O t)
    double L0 = 1.0, A_L = 0.0, w_L = 1.0;
    double m_hi = 0.5, m_lo = 0.5, m_big = 3.0, m_export = 5.0;
    double k_f = 1.0, c_f = 0.1, f_stress = 0.5;

    void validate() const;
};

Network build_microgrid(const MicrogridParams& p);

// Kuramoto pair built with the additive constructor; structures "coupled" and "empty".
Network build_blinking_pair(double omega1, double omega2, double k);

// ---------------------------------------------------------------- presets

struct Preset {
    std::string name;
    std::string description;
    std::map<std::string, double> defaults;
    std::function<Network(const std::map<std::string, double>&)> build;
    std::function<NetworkState(const Network&, const std::map<std::string, double>&)> initial;
    IntegratorConfig config;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);
// Merges overrides into defaults; unknown keys throw std::invalid_argument.
std::map<std::string, double> preset_params(const Preset& p, const std::map<std::string, double>& overrides);

}  // namespace asynet
