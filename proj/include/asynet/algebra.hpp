#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "asynet/network.hpp"

namespace asynet {

// Entrywise max. Throws std::invalid_argument when both constrain a node
// with different nonzero indices, or node counts differ.
ConnectionStructure join(const ConnectionStructure& a, const ConnectionStructure& b);

// Places a (over |positions| nodes) into a k-node structure.
ConnectionStructure embed(const ConnectionStructure& a, const std::vector<int>& positions, int k);
// Restriction to the given nodes (the inverse of embed on its image).
ConnectionStructure project(const ConnectionStructure& a, const std::vector<int>& positions);

struct ConnectionGraph {
    int k = 0;
    std::vector<std::vector<int>> adj;  // adj[i][j] = 1: edge j -> i
    std::vector<std::string> labels;

    std::vector<std::vector<int>> components() const;  // undirected, sorted, ordered by least node
    int edge_count() const;
};

ConnectionGraph connection_graph(const Network& net);

// Product network; structure names become "a|b".
Network product(const Network& a, const Network& b);

struct DecompVerdict {
    bool pass = true;
    int samples = 0;
    std::string message;
    std::optional<NetworkState> counterexample;
    std::optional<NetworkState> counterexample_other;  // second state of the pair
    std::string detail;
};

// Clocks whose rate is a function of the component's projection of alpha.
std::vector<int> clocks_owned_by(const Network& net, const std::vector<int>& component);

DecompVerdict check_structural_decomposability(const Network& net, const std::vector<int>& component, int n_samples, std::uint64_t seed);
DecompVerdict check_dynamical_decomposability(const Network& net, const std::vector<int>& component, int n_samples, std::uint64_t seed);

struct Factorization {
    bool decomposed = false;
    std::vector<std::vector<int>> partition;
    std::vector<Network> factors;
    std::vector<DecompVerdict> structural;
    std::vector<DecompVerdict> dynamical;
    std::string reason;
};

Factorization factorize(const Network& net, int n_samples, std::uint64_t seed);

// Synchronous network with additive input structure.
struct AdditiveNetworkSpec {
    std::string name;
    std::vector<NodeSpec> nodes;
    std::vector<std::vector<Expr>> intrinsic;                  // F_i, per node coordinate
    std::map<std::pair<int, int>, std::vector<Expr>> coupling;  // (i, j): F_ij for edge j -> i
    ConnectionStructure gamma;                                 // base graph, column 0 zero
    std::map<std::string, double> params;
};

struct NamedStructure {
    std::string name;
    ConnectionStructure alpha;
};

// Builds f^alpha_i = (1 - alpha_i0)(F_i + sum_j alpha_ij F_ij). The structure
// list must contain (0 | gamma); events default to that structure.
Network asynchronize_additive(const AdditiveNetworkSpec& spec, const std::vector<NamedStructure>& structures, EventMapSpec events = {});

DecompVerdict is_input_consistent(const Network& net, int n_samples, std::uint64_t seed);

// Folds atoms with constant sides into literals and simplifies connectives.
Predicate fold_predicate(const Predicate& p, double eps_eq = kDefaultEpsEq);

}  // namespace asynet
